use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::extrema::refine_field_extrema;
use super::{pad, ConvexBody, DistanceResult};
use crate::constants::kappa;
use crate::error::{GeometryError, Result};
use crate::optimize::{nelder_mead, SimplexOptions};
use crate::sphere::{analyze, dot, make_grid, synthesize, Vec3};

/// `delta_2(K, L) = ((1/omega_n) int (h_K - h_L)^2)^{1/2}`.
pub fn l2_distance(k: &ConvexBody, l: &ConvexBody) -> Result<f64> {
    if k.grid() != l.grid() {
        return Err(GeometryError::GridMismatch);
    }
    let grid = k.grid();
    let a = k.support();
    let b = l.support();
    let sq = grid.integrate_fn_indexed(|i| (a[i] - b[i]) * (a[i] - b[i]));
    Ok((sq / grid.total_measure()).sqrt())
}

/// `V(K delta L) = (1/n) int |rho_{K-x}^n - rho_{L-x}^n|` for a common interior point `x`.
pub fn symmetric_difference_volume(k: &ConvexBody, l: &ConvexBody, x: &[f64]) -> Result<f64> {
    if k.grid() != l.grid() {
        return Err(GeometryError::GridMismatch);
    }
    if k.interior_margin(x) <= 0.0 || l.interior_margin(x) <= 0.0 {
        return Err(GeometryError::NoCommonInteriorPoint);
    }
    let n = k.dim() as i32;
    let rk = k.radial_at_nodes(x)?;
    let rl = l.radial_at_nodes(x)?;
    Ok(k.grid().integrate_fn_indexed(|i| (rk[i].powi(n) - rl[i].powi(n)).abs()) / n as f64)
}

/// Refinement of the grid on which the asymmetry integral is evaluated.
const ASYMMETRY_REFINEMENT: usize = 4;

/// `A(K~, B)`: the smallest `V(K~ delta (B + x)) / kappa_n` over translations,
/// where `K~` is the dilate of `K` with the volume of the unit ball. The
/// radial functions are taken about the Santalo point of `K~`.
pub fn relative_asymmetry_to_ball(k: &ConvexBody) -> Result<DistanceResult> {
    let body = k.normalize_volume()?;
    let n = body.dim();
    let base = body.santalo_point()?.translation;
    let rho_n: Vec<f64> = body.radial_at_nodes(&base)?.iter().map(|r| r.powi(n as i32)).collect();
    // |rho_K^n - rho_B^n| has kinks where the boundaries cross, so node
    // quadrature is only second order there. rho_K^n itself is smooth:
    // interpolate it spectrally and integrate on a finer grid.
    let grid = body.grid();
    let fine = make_grid(grid.resolution().refined(ASYMMETRY_REFINEMENT))?;
    let rho_n = synthesize(&fine, &analyze(grid, &rho_n, grid.band_limit())?)?;
    let nodes = fine.nodes();
    let weights = fine.weights();
    let volume = kappa(n);
    let objective = |c: &[f64]| -> f64 {
        let c = pad(c);
        let cc = dot(&c, &c);
        if cc >= 1.0 {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for ((u, w), rk) in nodes.iter().zip(weights).zip(&rho_n) {
            let cu = dot(&c, u);
            let rb = cu + (cu * cu - cc + 1.0).sqrt();
            acc += w * (rk - rb.powi(n as i32)).abs();
        }
        acc / (n as f64 * volume)
    };
    let options = SimplexOptions { max_evaluations: 2000, value_tolerance: 1e-14, point_tolerance: 1e-10 };
    let first = nelder_mead(objective, &vec![0.0; n], 0.05, &options);
    let r = nelder_mead(objective, &first.point, 0.01, &options);
    let translation = r.point.iter().zip(&base).map(|(c, b)| c + b).collect();
    Ok(DistanceResult {
        value: r.value.max(0.0),
        translation,
        linear_map: None,
        converged: r.converged,
        iterations: first.evaluations + r.evaluations,
    })
}

/// Unimodular SPD map `L L^T` from log-Cholesky parameters: `n - 1` log
/// diagonal entries (the last is fixed by `det = 1`) then the strictly lower part.
fn unimodular_map(n: usize, params: &[f64]) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(n, n);
    let mut sum = 0.0;
    for i in 0..n - 1 {
        l[(i, i)] = params[i].exp();
        sum += params[i];
    }
    l[(n - 1, n - 1)] = (-sum).exp();
    let mut k = n - 1;
    for i in 1..n {
        for j in 0..i {
            l[(i, j)] = params[k];
            k += 1;
        }
    }
    &l * l.transpose()
}

fn log_cholesky(map: &DMatrix<f64>) -> Option<Vec<f64>> {
    let n = map.nrows();
    let l = map.clone().cholesky()?.l();
    let mut out: Vec<f64> = (0..n - 1).map(|i| l[(i, i)].ln()).collect();
    for i in 1..n {
        for j in 0..i {
            out.push(l[(i, j)]);
        }
    }
    Some(out)
}

fn apply(map: &DMatrix<f64>, v: &Vec3) -> Vec3 {
    let n = map.nrows();
    let mut out = [0.0; 3];
    for a in 0..n {
        out[a] = (0..n).map(|b| map[(a, b)] * v[b]).sum();
    }
    out
}

/// Upper bound for the Banach-Mazur distance from `K` to the ball: the
/// smallest ratio of outer to inner radius of `m (K - x)` found by a
/// multistart simplex search over centres `x` and unimodular SPD maps `m`.
/// The returned value is the ratio certified by local refinement of the
/// boundary extremes, so it is always attained by the reported `(x, m)`.
pub fn banach_mazur_to_ball(k: &ConvexBody) -> Result<DistanceResult> {
    let n = k.dim();
    let points = k.boundary_points();
    let nodes = k.grid().nodes();
    let support = k.support();
    let scale = k.min_support();
    let split = |p: &[f64]| -> (Vec3, DMatrix<f64>) { (pad(&p[..n]), unimodular_map(n, &p[n..])) };
    let objective = |p: &[f64]| -> f64 {
        let (x, m) = split(p);
        let margin = nodes.iter().zip(support).map(|(u, h)| h - dot(&x, u)).fold(f64::INFINITY, f64::min);
        if margin <= 1e-9 * scale {
            return f64::INFINITY;
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for y in &points {
            let r = apply(&m, &[y[0] - x[0], y[1] - x[1], y[2] - x[2]]);
            let d = dot(&r, &r);
            lo = lo.min(d);
            hi = hi.max(d);
        }
        0.5 * (hi / lo).ln()
    };

    let centroid = k.centroid();
    let inertia = k.inertia();
    let eig = inertia.clone().symmetric_eigen();
    let mut whitening = DMatrix::zeros(n, n);
    for (i, lam) in eig.eigenvalues.iter().enumerate() {
        let col = eig.eigenvectors.column(i);
        whitening += (col * col.transpose()) / lam.sqrt();
    }
    let det = whitening.determinant();
    whitening /= det.powf(1.0 / n as f64);
    let free = n - 1 + n * (n - 1) / 2;
    let shape = log_cholesky(&whitening).unwrap_or_else(|| vec![0.0; free]);

    let mut starts: Vec<Vec<f64>> = Vec::new();
    starts.push(centroid.iter().copied().chain(shape.iter().copied()).collect());
    let santalo = k.santalo_point()?.translation;
    starts.push(santalo.iter().copied().chain(std::iter::repeat(0.0).take(free)).collect());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_b0d1);
    for _ in 0..8 {
        let mut p = starts[0].clone();
        for (i, v) in p.iter_mut().enumerate() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v += if i < n { 0.05 * scale * z } else { 0.3 * z };
        }
        starts.push(p);
    }

    let evals = if n == 2 { 2500 } else { 3000 };
    let options = SimplexOptions { max_evaluations: evals, value_tolerance: 1e-15, point_tolerance: 1e-10 };
    let mut iterations = 0;
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for start in &starts {
        if !objective(start).is_finite() {
            continue;
        }
        let r = nelder_mead(objective, start, 0.05, &options);
        iterations += r.evaluations;
        if best.as_ref().map_or(true, |b| r.value < b.1) {
            best = Some((r.point, r.value, r.converged));
        }
    }
    let (mut point, mut value, mut converged) = best.expect("the centroid start is interior");
    for _ in 0..2 {
        let r = nelder_mead(objective, &point, 0.01, &options);
        iterations += r.evaluations;
        if r.value <= value {
            point = r.point;
            value = r.value;
            converged = r.converged;
        }
    }

    let (x, m) = split(&point);
    let node_radius: Vec<f64> = points
        .iter()
        .map(|y| {
            let r = apply(&m, &[y[0] - x[0], y[1] - x[1], y[2] - x[2]]);
            dot(&r, &r).sqrt()
        })
        .collect();
    let extrema = refine_field_extrema(n, nodes, &node_radius, k.spacing(), 3, |v| {
        let y = k.jet(v).boundary_point(v);
        let r = apply(&m, &[y[0] - x[0], y[1] - x[1], y[2] - x[2]]);
        dot(&r, &r).sqrt()
    });
    let ratio = (extrema.max / extrema.min).max(1.0);
    Ok(DistanceResult {
        value: ratio,
        translation: x[..n].to_vec(),
        linear_map: Some(m.transpose().iter().copied().collect()),
        converged,
        iterations,
    })
}
