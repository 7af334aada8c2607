//! Analysis, synthesis and pointwise evaluation of spectral expansions.
//!
//! Grid synthesis on S^2 differentiates in (theta, phi) and applies the
//! Christoffel corrections of the round metric; the nodes never touch the
//! poles. Pointwise evaluation uses the Cartesian form
//! `Y_lm = q_lm(z) Re/Im((x + i y)^m)` instead, which is regular everywhere.

use num_complex::Complex64;

use super::legendre::{polynomial_jet_order, ring_legendre, tri, PolynomialJet};
use super::{dot, Coefficients, Plan, SphereGrid, Vec3};
use crate::error::{GeometryError, Result};

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn check(grid: &SphereGrid, coeffs: &Coefficients) -> Result<()> {
    if coeffs.dim() != grid.dim() {
        return Err(GeometryError::GridMismatch);
    }
    if coeffs.degree() > grid.band_limit() {
        return Err(GeometryError::DegreeOverflow { degree: coeffs.degree(), band_limit: grid.band_limit() });
    }
    Ok(())
}

/// Node values of an expansion.
pub fn synthesize(grid: &SphereGrid, coeffs: &Coefficients) -> Result<Vec<f64>> {
    check(grid, coeffs)?;
    Ok(match &grid.plan {
        Plan::Circle { .. } => circle_synthesis(grid, coeffs, false).values,
        Plan::Sphere { .. } => sphere_synthesis(grid, coeffs, false).values,
    })
}

/// Values, tangential gradients and covariant Hessians at every node.
#[derive(Debug, Clone)]
pub struct GridJets {
    pub values: Vec<f64>,
    /// Tangential gradient as an ambient vector.
    pub gradients: Vec<Vec3>,
    /// `[H_11, H_12, H_22]` in the node frame.
    pub hessian: Vec<[f64; 3]>,
}

pub fn synthesize_jets(grid: &SphereGrid, coeffs: &Coefficients) -> Result<GridJets> {
    check(grid, coeffs)?;
    Ok(match &grid.plan {
        Plan::Circle { .. } => circle_synthesis(grid, coeffs, true),
        Plan::Sphere { .. } => sphere_synthesis(grid, coeffs, true),
    })
}

fn circle_synthesis(grid: &SphereGrid, coeffs: &Coefficients, derivatives: bool) -> GridJets {
    let Plan::Circle { cos, sin } = &grid.plan else { unreachable!() };
    let n = grid.len();
    let c = coeffs.values();
    let degree = coeffs.degree();
    let mut values = vec![0.0; n];
    let mut gradients = if derivatives { vec![[0.0; 3]; n] } else { Vec::new() };
    let mut hessian = if derivatives { vec![[0.0; 3]; n] } else { Vec::new() };
    for j in 0..n {
        let (mut v, mut d1, mut d2) = (c[0], 0.0, 0.0);
        let mut r = 0;
        for k in 1..=degree {
            r += j;
            if r >= n {
                r -= n;
            }
            let (a, b) = (c[2 * k - 1], c[2 * k]);
            let (ck, sk) = (cos[r], sin[r]);
            let even = a * ck + b * sk;
            v += even;
            if derivatives {
                let kf = k as f64;
                d1 += kf * (b * ck - a * sk);
                d2 -= kf * kf * even;
            }
        }
        values[j] = v;
        if derivatives {
            let t = grid.frame(j)[0];
            gradients[j] = [d1 * t[0], d1 * t[1], 0.0];
            hessian[j] = [d2, 0.0, 0.0];
        }
    }
    GridJets { values, gradients, hessian }
}

fn sphere_synthesis(grid: &SphereGrid, coeffs: &Coefficients, derivatives: bool) -> GridJets {
    let Plan::Sphere { z, sin_theta, cos, sin, .. } = &grid.plan else { unreachable!() };
    let rings = z.len();
    let longitudes = cos.len();
    let degree = coeffs.degree();
    let c = coeffs.values();
    let count = grid.len();
    let mut values = vec![0.0; count];
    let mut gradients = if derivatives { vec![[0.0; 3]; count] } else { Vec::new() };
    let mut hessian = if derivatives { vec![[0.0; 3]; count] } else { Vec::new() };

    // per-order sums: [cos part, sin part] x [value, d_theta, d_theta^2]
    let mut g = vec![[[0.0; 3]; 2]; degree + 1];
    for i in 0..rings {
        let (zi, si) = (z[i], sin_theta[i]);
        let ring = ring_legendre(degree, zi, si, derivatives);
        for (m, gm) in g.iter_mut().enumerate() {
            *gm = [[0.0; 3]; 2];
            let norm = if m == 0 { 1.0 } else { SQRT2 };
            for l in m..=degree {
                let t = tri(l, m);
                let base = l * l + l;
                let cc = c[base + m] * norm;
                let cs = if m > 0 { c[base - m] * norm } else { 0.0 };
                let v = ring.value[t];
                gm[0][0] += cc * v;
                gm[1][0] += cs * v;
                if derivatives {
                    let (d1, d2) = (ring.d_theta[t], ring.d_theta2[t]);
                    gm[0][1] += cc * d1;
                    gm[1][1] += cs * d1;
                    gm[0][2] += cc * d2;
                    gm[1][2] += cs * d2;
                }
            }
        }
        let cot = zi / si;
        for j in 0..longitudes {
            let (mut h, mut ht, mut htt, mut hp, mut htp, mut hpp) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
            let mut r = 0;
            for (m, gm) in g.iter().enumerate() {
                let (cm, sm) = (cos[r], sin[r]);
                r += j;
                if r >= longitudes {
                    r -= longitudes;
                }
                h += gm[0][0] * cm + gm[1][0] * sm;
                if derivatives {
                    let mf = m as f64;
                    ht += gm[0][1] * cm + gm[1][1] * sm;
                    htt += gm[0][2] * cm + gm[1][2] * sm;
                    hp += mf * (gm[1][0] * cm - gm[0][0] * sm);
                    htp += mf * (gm[1][1] * cm - gm[0][1] * sm);
                    hpp -= mf * mf * (gm[0][0] * cm + gm[1][0] * sm);
                }
            }
            let node = i * longitudes + j;
            values[node] = h;
            if derivatives {
                let [e_t, e_p] = grid.frame(node);
                let gp = hp / si;
                gradients[node] = [ht * e_t[0] + gp * e_p[0], ht * e_t[1] + gp * e_p[1], ht * e_t[2] + gp * e_p[2]];
                hessian[node] = [htt, (htp - cot * hp) / si, hpp / (si * si) + cot * ht];
            }
        }
    }
    GridJets { values, gradients, hessian }
}

/// Spectral coefficients up to `degree` from node samples.
pub fn analyze(grid: &SphereGrid, samples: &[f64], degree: usize) -> Result<Coefficients> {
    if samples.len() != grid.len() {
        return Err(GeometryError::GridMismatch);
    }
    if degree > grid.band_limit() {
        return Err(GeometryError::DegreeOverflow { degree, band_limit: grid.band_limit() });
    }
    let mut out = Coefficients::zeros(grid.dim(), degree)?;
    match &grid.plan {
        Plan::Circle { cos, sin } => {
            let n = samples.len();
            let vals = out.values_mut();
            vals[0] = samples.iter().sum::<f64>() / n as f64;
            let scale = 2.0 / n as f64;
            for k in 1..=degree {
                let (mut a, mut b) = (0.0, 0.0);
                let mut r = 0;
                for s in samples {
                    a += s * cos[r];
                    b += s * sin[r];
                    r += k;
                    if r >= n {
                        r -= n;
                    }
                }
                vals[2 * k - 1] = a * scale;
                vals[2 * k] = b * scale;
            }
        }
        Plan::Sphere { z, sin_theta, ring_weights, cos, sin } => {
            let longitudes = cos.len();
            let dphi = 2.0 * std::f64::consts::PI / longitudes as f64;
            let vals = out.values_mut();
            let mut fourier = vec![[0.0; 2]; degree + 1];
            for i in 0..z.len() {
                let row = &samples[i * longitudes..(i + 1) * longitudes];
                for (m, fm) in fourier.iter_mut().enumerate() {
                    let (mut a, mut b) = (0.0, 0.0);
                    let mut r = 0;
                    for s in row {
                        a += s * cos[r];
                        b += s * sin[r];
                        r += m;
                        if r >= longitudes {
                            r -= longitudes;
                        }
                    }
                    *fm = [a * dphi * ring_weights[i], b * dphi * ring_weights[i]];
                }
                let ring = ring_legendre(degree, z[i], sin_theta[i], false);
                for (m, fm) in fourier.iter().enumerate() {
                    let norm = if m == 0 { 1.0 } else { SQRT2 };
                    for l in m..=degree {
                        let v = ring.value[tri(l, m)] * norm;
                        let base = l * l + l;
                        vals[base + m] += v * fm[0];
                        if m > 0 {
                            vals[base - m] += v * fm[1];
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Local second-order data of a function on the sphere at one direction.
#[derive(Debug, Clone, Copy)]
pub struct Jet {
    pub value: f64,
    /// Tangential gradient as an ambient vector.
    pub gradient: Vec3,
    /// `nabla^2 h + h g` as an ambient matrix acting on the tangent plane
    /// (annihilates the normal direction).
    pub radii: [[f64; 3]; 3],
}

impl Jet {
    /// `det(nabla^2 h + h g)` on the tangent plane.
    pub fn curvature_function(&self, dim: usize) -> f64 {
        let a = &self.radii;
        let tr = a[0][0] + a[1][1] + a[2][2];
        if dim == 2 {
            tr
        } else {
            a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0] + a[1][1] * a[2][2]
                - a[1][2] * a[2][1]
        }
    }

    /// Smallest eigenvalue of `nabla^2 h + h g` on the tangent plane.
    pub fn min_radius(&self, dim: usize) -> f64 {
        let a = &self.radii;
        let tr = a[0][0] + a[1][1] + a[2][2];
        if dim == 2 {
            tr
        } else {
            let det = self.curvature_function(3);
            let half = 0.5 * tr;
            half - (half * half - det).max(0.0).sqrt()
        }
    }

    /// Point of the boundary with outer normal `u`: `grad h + h u`.
    pub fn boundary_point(&self, u: &Vec3) -> Vec3 {
        let g = &self.gradient;
        [g[0] + self.value * u[0], g[1] + self.value * u[1], g[2] + self.value * u[2]]
    }
}

fn check_direction(dim: usize, u: &[f64]) -> Result<Vec3> {
    let mut v = [0.0; 3];
    for (k, x) in u.iter().take(dim).enumerate() {
        v[k] = *x;
    }
    let n = dot(&v, &v).sqrt();
    if (n - 1.0).abs() > 1e-12 || u.len() < dim {
        return Err(GeometryError::NonUnitDirection { norm: n });
    }
    Ok(v)
}

/// Value of an expansion at an arbitrary unit direction.
pub fn evaluate_at(coeffs: &Coefficients, u: &[f64]) -> Result<f64> {
    let v = check_direction(coeffs.dim(), u)?;
    Ok(value_unchecked(coeffs, &v))
}

/// Value, gradient and `nabla^2 h + h g` at an arbitrary unit direction.
pub fn jet_at(coeffs: &Coefficients, u: &[f64]) -> Result<Jet> {
    let v = check_direction(coeffs.dim(), u)?;
    Ok(jet_unchecked(coeffs, &v))
}

pub(crate) fn value_unchecked(coeffs: &Coefficients, u: &Vec3) -> f64 {
    if coeffs.dim() == 2 {
        circle_jet(coeffs, u, false).value
    } else {
        sphere_jet(coeffs, u, false).value
    }
}

pub(crate) fn jet_unchecked(coeffs: &Coefficients, u: &Vec3) -> Jet {
    if coeffs.dim() == 2 {
        circle_jet(coeffs, u, true)
    } else {
        sphere_jet(coeffs, u, true)
    }
}

fn circle_jet(coeffs: &Coefficients, u: &Vec3, derivatives: bool) -> Jet {
    let c = coeffs.values();
    let theta = u[1].atan2(u[0]);
    let (s1, c1) = theta.sin_cos();
    let (mut ck, mut sk) = (1.0, 0.0);
    let (mut v, mut d1, mut d2) = (c[0], 0.0, 0.0);
    for k in 1..=coeffs.degree() {
        // angle addition; periodically re-anchored to limit drift
        if k % 32 == 0 {
            let (s, c) = (k as f64 * theta).sin_cos();
            ck = c;
            sk = s;
        } else {
            let next = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = next;
        }
        let (a, b) = (c[2 * k - 1], c[2 * k]);
        let even = a * ck + b * sk;
        v += even;
        if derivatives {
            let kf = k as f64;
            d1 += kf * (b * ck - a * sk);
            d2 -= kf * kf * even;
        }
    }
    let t = [-s1, c1, 0.0];
    let r = v + d2;
    let mut radii = [[0.0; 3]; 3];
    for a in 0..2 {
        for b in 0..2 {
            radii[a][b] = r * t[a] * t[b];
        }
    }
    Jet { value: v, gradient: [d1 * t[0], d1 * t[1], 0.0], radii }
}

fn sphere_jet(coeffs: &Coefficients, u: &Vec3, derivatives: bool) -> Jet {
    let degree = coeffs.degree();
    let c = coeffs.values();
    let PolynomialJet { q, dq, ddq } = polynomial_jet_order(degree, u[2], derivatives);
    let w = Complex64::new(u[0], u[1]);
    let i_unit = Complex64::new(0.0, 1.0);

    let mut f = 0.0;
    let (mut fx, mut fy, mut fz) = (0.0, 0.0, 0.0);
    let (mut fxx, mut fxy, mut fxz, mut fyz, mut fzz) = (0.0, 0.0, 0.0, 0.0, 0.0);
    // w^m, w^(m-1), w^(m-2)
    let mut pow = Complex64::new(1.0, 0.0);
    let mut pow1 = Complex64::new(0.0, 0.0);
    let mut pow2 = Complex64::new(0.0, 0.0);
    for m in 0..=degree {
        if m > 0 {
            pow2 = pow1;
            pow1 = pow;
            pow *= w;
        }
        let norm = if m == 0 { 1.0 } else { SQRT2 };
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        let mut ddp = Complex64::new(0.0, 0.0);
        for l in m..=degree {
            let base = l * l + l;
            let coef = Complex64::new(c[base + m], if m > 0 { -c[base - m] } else { 0.0 }) * norm;
            let t = tri(l, m);
            p += coef * q[t];
            if derivatives {
                dp += coef * dq[t];
                ddp += coef * ddq[t];
            }
        }
        f += (p * pow).re;
        if !derivatives {
            continue;
        }
        let mf = m as f64;
        fz += (dp * pow).re;
        fzz += (ddp * pow).re;
        if m >= 1 {
            let a = p * mf * pow1;
            fx += a.re;
            fy += (a * i_unit).re;
            let b = dp * mf * pow1;
            fxz += b.re;
            fyz += (b * i_unit).re;
        }
        if m >= 2 {
            let a = p * (mf * (mf - 1.0)) * pow2;
            fxx += a.re;
            fxy += (a * i_unit).re;
        }
    }
    if !derivatives {
        return Jet { value: f, gradient: [0.0; 3], radii: [[0.0; 3]; 3] };
    }
    let fyy = -fxx;
    let grad = [fx, fy, fz];
    let radial = dot(&grad, u);
    let gradient = [fx - radial * u[0], fy - radial * u[1], fz - radial * u[2]];
    let d2 = [[fxx, fxy, fxz], [fxy, fyy, fyz], [fxz, fyz, fzz]];
    let mut proj = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            proj[a][b] = if a == b { 1.0 } else { 0.0 } - u[a] * u[b];
        }
    }
    // P D2 P
    let mut tmp = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            tmp[a][b] = (0..3).map(|k| d2[a][k] * proj[k][b]).sum();
        }
    }
    let mut radii = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let pdp: f64 = (0..3).map(|k| proj[a][k] * tmp[k][b]).sum();
            radii[a][b] = pdp + (f - radial) * proj[a][b];
        }
    }
    Jet { value: f, gradient, radii }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{make_grid, Resolution};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_coeffs(dim: usize, degree: usize, seed: u64) -> Coefficients {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Coefficients::zeros(dim, degree).unwrap();
        for v in c.values_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        c
    }

    // Direct summation of the series at one node, independent of the grid plans.
    fn direct_sphere_value(c: &Coefficients, u: &Vec3) -> f64 {
        let theta = u[2].clamp(-1.0, 1.0).acos();
        let phi = u[1].atan2(u[0]);
        let ring = ring_legendre(c.degree(), theta.cos(), theta.sin(), false);
        let mut total = 0.0;
        for l in 0..=c.degree() {
            for m in -(l as i64)..=(l as i64) {
                let am = m.unsigned_abs() as usize;
                let lam = ring.value[tri(l, am)];
                let y = match m {
                    0 => lam,
                    m if m > 0 => SQRT2 * lam * (am as f64 * phi).cos(),
                    _ => SQRT2 * lam * (am as f64 * phi).sin(),
                };
                total += c.get(l, m) * y;
            }
        }
        total
    }

    #[test]
    fn circle_round_trip_and_direct_sum() {
        let grid = make_grid(Resolution::Circle { nodes: 64 }).unwrap();
        let c = random_coeffs(2, 31, 1);
        let values = synthesize(&grid, &c).unwrap();
        for (j, u) in grid.nodes().iter().enumerate() {
            let theta = 2.0 * PI * j as f64 / 64.0;
            let mut direct = c.values()[0];
            for k in 1..=31 {
                direct += c.get(k, 0) * (k as f64 * theta).cos() + c.get(k, -1) * (k as f64 * theta).sin();
            }
            assert!((values[j] - direct).abs() < 1e-10);
            assert!((evaluate_at(&c, u).unwrap() - values[j]).abs() < 1e-10);
        }
        let back = analyze(&grid, &values, 31).unwrap();
        assert!(back.max_difference(&c) < 1e-12);
    }

    #[test]
    fn sphere_round_trip_and_direct_sum() {
        let grid = make_grid(Resolution::Sphere { rings: 16, longitudes: 32 }).unwrap();
        let c = random_coeffs(3, 15, 2);
        let values = synthesize(&grid, &c).unwrap();
        for (i, u) in grid.nodes().iter().enumerate().step_by(7) {
            let direct = direct_sphere_value(&c, u);
            assert!((values[i] - direct).abs() < 1e-10, "node {i}");
            assert!((evaluate_at(&c, u).unwrap() - values[i]).abs() < 1e-10);
        }
        let back = analyze(&grid, &values, 15).unwrap();
        assert!(back.max_difference(&c) < 1e-10);
    }

    #[test]
    fn cos3_vanishes_at_pi_over_6() {
        let mut c = Coefficients::zeros(2, 3).unwrap();
        c.set(3, 0, 1.0);
        let t = PI / 6.0;
        assert!(evaluate_at(&c, &[t.cos(), t.sin()]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn degree_and_direction_errors() {
        let grid = make_grid(Resolution::Circle { nodes: 16 }).unwrap();
        let c = random_coeffs(2, 8, 3);
        assert!(matches!(synthesize(&grid, &c), Err(GeometryError::DegreeOverflow { .. })));
        assert!(matches!(analyze(&grid, &vec![0.0; 16], 8), Err(GeometryError::DegreeOverflow { .. })));
        assert!(matches!(evaluate_at(&c, &[1.0, 1e-5]), Err(GeometryError::NonUnitDirection { .. })));
    }

    #[test]
    fn grid_jets_agree_with_cartesian_jets() {
        let grid = make_grid(Resolution::Sphere { rings: 12, longitudes: 24 }).unwrap();
        let c = random_coeffs(3, 9, 4);
        let jets = synthesize_jets(&grid, &c).unwrap();
        for (i, u) in grid.nodes().iter().enumerate() {
            let jet = jet_unchecked(&c, u);
            assert!((jet.value - jets.values[i]).abs() < 1e-11);
            for k in 0..3 {
                assert!((jet.gradient[k] - jets.gradients[i][k]).abs() < 1e-10);
            }
            let [e1, e2] = grid.frame(i);
            let form = |a: &Vec3, b: &Vec3| -> f64 {
                (0..3).map(|r| (0..3).map(|s| a[r] * jet.radii[r][s] * b[s]).sum::<f64>()).sum()
            };
            let h = jets.hessian[i];
            let v = jets.values[i];
            assert!((form(e1, e1) - (h[0] + v)).abs() < 1e-9, "node {i}");
            assert!((form(e1, e2) - h[1]).abs() < 1e-9);
            assert!((form(e2, e2) - (h[2] + v)).abs() < 1e-9);
        }
    }

    #[test]
    fn pole_jet_is_finite_and_matches_nearby() {
        let c = random_coeffs(3, 10, 5);
        let pole = jet_unchecked(&c, &[0.0, 0.0, 1.0]);
        let t: f64 = 1e-9;
        let near = jet_unchecked(&c, &[t.sin(), 0.0, t.cos()]);
        assert!((pole.value - near.value).abs() < 1e-5);
        assert!((pole.curvature_function(3) - near.curvature_function(3)).abs() < 1e-5 * pole.curvature_function(3).abs());
    }
}
