//! Reproducible families of test bodies.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::body::{default_grid, ConvexBody};
use crate::error::{GeometryError, Result};
use crate::sphere::legendre::gauss_legendre;
use crate::sphere::{dot, make_grid, Coefficients, Resolution, SphereGrid};

/// Largest damping factor at the band limit the default smoothing accepts,
/// so the truncated spectrum is resolved by the grid.
pub const RESOLVED_DAMPING: f64 = 1e-6;

/// Smallest radius of curvature the default smoothing accepts. Curvature
/// functions of flatter bodies are dominated by rounding noise.
pub const MIN_RADIUS_MARGIN: f64 = 1e-3;

/// Smoothing ladder for cap-cut bodies: 1, 2, 5 times powers of ten from 1e-3.
pub const SMOOTHING_LADDER: [f64; 12] = [1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1, 2e-1, 5e-1, 1.0, 2.0, 5.0];

/// Maximum number of draws for `random` bodies.
pub const MAX_DRAWS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Ball {
        radius: f64,
    },
    /// `A B` for a symmetric positive definite `A`, row-major.
    Ellipsoid {
        matrix: Vec<f64>,
    },
    /// `1 + eps Y` with a single harmonic of the given degree and order.
    Harmonic {
        eps: f64,
        degree: usize,
        order: i64,
    },
    /// Unit ball with two opposite caps of height `cap_height` removed,
    /// smoothed by a heat kernel.
    CapCut {
        cap_height: f64,
        smoothing: Option<f64>,
    },
    /// Ball plus seeded Gaussian coefficients decaying like `degree^-decay`.
    Random {
        seed: u64,
        decay: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    #[serde(flatten)]
    pub family: Family,
    pub dimension: usize,
    /// `N` on the circle or `L` on the sphere; the default grid when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
}

impl BodySpec {
    pub fn new(dimension: usize, family: Family) -> Self {
        BodySpec { family, dimension, resolution: None }
    }

    pub fn with_resolution(mut self, resolution: Option<usize>) -> Self {
        self.resolution = resolution;
        self
    }

    /// Short identifier used in reports.
    pub fn label(&self) -> String {
        let n = self.dimension;
        match &self.family {
            Family::Ball { radius } => format!("ball(n={n},r={radius})"),
            Family::Ellipsoid { matrix } => {
                let entries: Vec<String> = matrix.iter().map(|v| format!("{v}")).collect();
                format!("ellipsoid(n={n},A=[{}])", entries.join(";"))
            }
            Family::Harmonic { eps, degree, order } => format!("harmonic(n={n},k={degree},m={order},eps={eps})"),
            Family::CapCut { cap_height, smoothing } => match smoothing {
                Some(s) => format!("cap_cut(n={n},eps={cap_height},s={s})"),
                None => format!("cap_cut(n={n},eps={cap_height})"),
            },
            Family::Random { seed, decay } => format!("random(n={n},seed={seed},decay={decay})"),
        }
    }

    pub fn grid(&self) -> Result<Arc<SphereGrid>> {
        match self.resolution {
            Some(size) => make_grid(Resolution::from_size(self.dimension, size)?),
            None => default_grid(self.dimension),
        }
    }

    pub fn build(&self) -> Result<ConvexBody> {
        let grid = self.grid()?;
        match &self.family {
            Family::Ball { radius } => ball(grid, *radius),
            Family::Ellipsoid { matrix } => {
                let n = self.dimension;
                if matrix.len() != n * n {
                    return Err(GeometryError::InvalidParameter(format!(
                        "ellipsoid matrix needs {} entries, got {}",
                        n * n,
                        matrix.len()
                    )));
                }
                ellipsoid(grid, &DMatrix::from_row_slice(n, n, matrix))
            }
            Family::Harmonic { eps, degree, order } => harmonic_bump(grid, *eps, *degree, *order),
            Family::CapCut { cap_height, smoothing } => smoothed_cap_cut(grid, *cap_height, *smoothing),
            Family::Random { seed, decay } => random_convex(grid, *seed, *decay),
        }
    }
}

pub fn ball(grid: Arc<SphereGrid>, radius: f64) -> Result<ConvexBody> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(GeometryError::InvalidParameter(format!("ball radius {radius} must be positive")));
    }
    ConvexBody::on_grid(grid.clone(), Coefficients::constant(grid.dim(), radius)?)
}

/// `A B` with support function `|A u|`.
pub fn ellipsoid(grid: Arc<SphereGrid>, matrix: &DMatrix<f64>) -> Result<ConvexBody> {
    let n = grid.dim();
    if matrix.nrows() != n || matrix.ncols() != n {
        return Err(GeometryError::InvalidParameter(format!("ellipsoid matrix must be {n}x{n}")));
    }
    let asym = (matrix - matrix.transpose()).abs().max();
    if asym > 1e-12 || matrix.clone().cholesky().is_none() {
        return Err(GeometryError::InvalidParameter("ellipsoid matrix must be symmetric positive definite".into()));
    }
    let degree = grid.band_limit();
    ConvexBody::from_support_function(grid, degree, |u| {
        let mut s = 0.0;
        for a in 0..n {
            let row: f64 = (0..n).map(|b| matrix[(a, b)] * u[b]).sum();
            s += row * row;
        }
        s.sqrt()
    })
}

/// Amplitude below which `harmonic_bump` of this degree stays strictly
/// convex: `1/(k^2 - 1)` on the circle and `2/(l(l+1) - 2)` on the sphere
/// (the latter for the zonal harmonic). Infinite for degrees 0 and 1.
pub fn harmonic_threshold(dim: usize, degree: usize) -> f64 {
    let k = degree as f64;
    match (dim, degree) {
        (_, 0) | (_, 1) => f64::INFINITY,
        (2, _) => 1.0 / (k * k - 1.0),
        _ => 2.0 / (k * (k + 1.0) - 2.0),
    }
}

/// `1 + eps cos(k theta)` (order >= 0) or `1 + eps sin(k theta)` on the
/// circle; `1 + eps sqrt(4 pi / (2l+1)) Y_lm` on the sphere.
pub fn harmonic_bump(grid: Arc<SphereGrid>, eps: f64, degree: usize, order: i64) -> Result<ConvexBody> {
    let n = grid.dim();
    if !eps.is_finite() || degree > grid.band_limit() {
        return Err(GeometryError::DegreeOverflow { degree, band_limit: grid.band_limit() });
    }
    let mut c = Coefficients::constant(n, 1.0)?;
    if n == 2 {
        c.set(degree, if order >= 0 { 0 } else { -1 }, eps);
    } else {
        if order.unsigned_abs() as usize > degree {
            return Err(GeometryError::InvalidParameter(format!("order {order} exceeds degree {degree}")));
        }
        c.set(degree, order, eps * (4.0 * PI / (2.0 * degree as f64 + 1.0)).sqrt());
    }
    ConvexBody::on_grid(grid, c)
}

/// Seeded random perturbation of the unit ball. Draws are repeated until the
/// body is valid, at most [`MAX_DRAWS`] times.
pub fn random_convex(grid: Arc<SphereGrid>, seed: u64, decay: f64) -> Result<ConvexBody> {
    if !(decay > 1.0) || !decay.is_finite() {
        return Err(GeometryError::InvalidParameter(format!("decay {decay} must exceed 1")));
    }
    let n = grid.dim();
    let top = if n == 2 { 10 } else { 6 }.min(grid.band_limit());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = String::new();
    for _ in 0..MAX_DRAWS {
        let mut c = Coefficients::constant(n, 1.0)?;
        for l in 1..=top {
            let amplitude = 0.15 * (l as f64).powf(-decay);
            let orders: Vec<i64> = if n == 2 { vec![0, -1] } else { (-(l as i64)..=l as i64).collect() };
            let norm = if n == 2 { 1.0 } else { (4.0 * PI / (2.0 * l as f64 + 1.0)).sqrt() };
            for m in orders {
                let z: f64 = StandardNormal.sample(&mut rng);
                c.set(l, m, amplitude * norm * z);
            }
        }
        match ConvexBody::on_grid(grid.clone(), c) {
            Ok(body) => return Ok(body),
            Err(e) => last = e.to_string(),
        }
    }
    Err(GeometryError::ValidityExhausted { draws: MAX_DRAWS, detail: format!("seed {seed}, decay {decay}: {last}") })
}

/// Support function of `B` intersected with the slab `|x . e| <= 1 - eps`,
/// where `e` is the last coordinate axis.
pub fn cap_cut_support(dim: usize, cap_height: f64, u: &[f64; 3]) -> f64 {
    let t = 1.0 - cap_height;
    let c = u[dim - 1].abs();
    if c <= t {
        1.0
    } else {
        t * c + (1.0 - t * t).sqrt() * (1.0 - c * c).max(0.0).sqrt()
    }
}

/// Exact projection of [`cap_cut_support`] onto degrees `<= degree`.
///
/// The support function has kinks at the face normals and jumps in its
/// second derivative at the rims, so its spectrum decays slowly and node
/// sampling aliases. The integrals are split at those angles and each smooth
/// piece is integrated by Gauss-Legendre panels short enough to resolve the
/// highest harmonic, which makes the result independent of any grid.
pub fn cap_cut_coefficients(dim: usize, cap_height: f64, degree: usize) -> Result<Coefficients> {
    const PANEL_PHASE: f64 = 8.0;
    let (gz, gw) = gauss_legendre(24);
    let t = 1.0 - cap_height;
    let rim = t.asin();
    // angle breakpoints: the rims and, on the circle, the face normals
    let breaks: Vec<f64> = if dim == 2 {
        vec![0.0, rim, 0.5 * PI, PI - rim, PI, PI + rim, 1.5 * PI, 2.0 * PI - rim, 2.0 * PI]
    } else {
        vec![0.0, 0.5 * PI - rim, 0.5 * PI + rim, PI]
    };
    let max_len = PANEL_PHASE / (degree as f64 + 1.0);
    let mut out = Coefficients::zeros(dim, degree)?;
    for w in breaks.windows(2) {
        let panels = ((w[1] - w[0]) / max_len).ceil().max(1.0) as usize;
        let len = (w[1] - w[0]) / panels as f64;
        for j in 0..panels {
            let a = w[0] + j as f64 * len;
            for (x, wx) in gz.iter().zip(&gw) {
                let angle = a + 0.5 * len * (x + 1.0);
                let weight = 0.5 * len * wx;
                if dim == 2 {
                    let h = cap_cut_support(2, cap_height, &[angle.cos(), angle.sin(), 0.0]);
                    let v = out.values_mut();
                    v[0] += weight * h / (2.0 * PI);
                    for k in 1..=degree {
                        let (s, c) = (k as f64 * angle).sin_cos();
                        v[2 * k - 1] += weight * h * c / PI;
                        v[2 * k] += weight * h * s / PI;
                    }
                } else {
                    // axisymmetric: only the zonal harmonics carry weight
                    let (s, z) = angle.sin_cos();
                    let h = cap_cut_support(3, cap_height, &[s, 0.0, z]);
                    let scale = 2.0 * PI * weight * s * h;
                    let (mut p0, mut p1) = (1.0, z);
                    for l in 0..=degree {
                        let p = match l {
                            0 => p0,
                            1 => p1,
                            _ => {
                                let lf = l as f64;
                                let p2 = ((2.0 * lf - 1.0) * z * p1 - (lf - 1.0) * p0) / lf;
                                p0 = p1;
                                p1 = p2;
                                p2
                            }
                        };
                        let i = out.index(l, 0);
                        out.values_mut()[i] += scale * p * ((2.0 * l as f64 + 1.0) / (4.0 * PI)).sqrt();
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Cap-cut ball, projected to the spectral basis with heat-kernel damping
/// `exp(-s k^2)` on the circle and `exp(-s l(l+1))` on the sphere. Without
/// an explicit `smoothing`, the first value of [`SMOOTHING_LADDER`] that
/// damps the band limit below [`RESOLVED_DAMPING`] and yields a body with
/// radii of curvature at least [`MIN_RADIUS_MARGIN`] is used.
pub fn smoothed_cap_cut(grid: Arc<SphereGrid>, cap_height: f64, smoothing: Option<f64>) -> Result<ConvexBody> {
    if !(cap_height > 0.0 && cap_height < 0.5) {
        return Err(GeometryError::InvalidParameter(format!("cap height {cap_height} must lie in (0, 0.5)")));
    }
    let n = grid.dim();
    let raw = cap_cut_coefficients(n, cap_height, grid.band_limit())?;
    let factor = |s: f64, l: usize| {
        let lf = l as f64;
        if n == 2 { (-s * lf * lf).exp() } else { (-s * lf * (lf + 1.0)).exp() }
    };
    let damped = |s: f64| {
        let mut c = raw.clone();
        for i in 0..c.values().len() {
            let l = c.degree_of(i);
            c.values_mut()[i] = if l % 2 == 1 { 0.0 } else { c.values()[i] * factor(s, l) };
        }
        c
    };
    match smoothing {
        Some(s) => {
            if !(s > 0.0) {
                return Err(GeometryError::InvalidParameter(format!("smoothing {s} must be positive")));
            }
            ConvexBody::on_grid(grid, damped(s))
        }
        None => {
            let mut last = None;
            let band = grid.band_limit();
            for s in SMOOTHING_LADDER.into_iter().filter(|&s| factor(s, band) <= RESOLVED_DAMPING) {
                match ConvexBody::on_grid(grid.clone(), damped(s)) {
                    Ok(body) if body.min_radius() >= MIN_RADIUS_MARGIN => return Ok(body),
                    Ok(body) => last = Some(GeometryError::NotStrictlyConvex { min_eigenvalue: body.min_radius() }),
                    Err(e) => last = Some(e),
                }
            }
            Err(last.expect("ladder is not empty"))
        }
    }
}

/// The smoothing a cap-cut body of this height receives by default.
pub fn default_smoothing(grid: Arc<SphereGrid>, cap_height: f64) -> Option<f64> {
    let n = grid.dim();
    let band = grid.band_limit() as f64;
    let exponent = if n == 2 { band * band } else { band * (band + 1.0) };
    SMOOTHING_LADDER
        .into_iter()
        .filter(|&s| (-s * exponent).exp() <= RESOLVED_DAMPING)
        .find(|&s| smoothed_cap_cut(grid.clone(), cap_height, Some(s)).is_ok_and(|k| k.min_radius() >= MIN_RADIUS_MARGIN))
}

fn rotation(n: usize, angle: f64) -> DMatrix<f64> {
    let (s, c) = angle.sin_cos();
    let mut r = DMatrix::identity(n, n);
    r[(0, 0)] = c;
    r[(0, 1)] = -s;
    r[(1, 0)] = s;
    r[(1, 1)] = c;
    r
}

fn spd(axes: &[f64], angle: f64) -> Vec<f64> {
    let n = axes.len();
    let r = rotation(n, angle);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(axes));
    let a = &r * d * r.transpose();
    let a = (&a + a.transpose()) * 0.5;
    a.transpose().iter().copied().collect()
}

/// The default suite: one ball, three ellipsoids, harmonic bumps of degree
/// 2, 3, 4 at 0.02, 0.05 and 0.1 of the convexity threshold, cap cuts of
/// height 0.05, 0.1, 0.2 and five seeded random bodies.
pub fn default_suite(dim: usize) -> Vec<BodySpec> {
    let mut out = vec![BodySpec::new(dim, Family::Ball { radius: 1.0 })];
    let ellipsoids: Vec<Vec<f64>> = if dim == 2 {
        vec![spd(&[1.2, 0.8], 0.0), spd(&[1.5, 0.7], 0.4), spd(&[1.8, 1.1], -1.1)]
    } else {
        vec![spd(&[1.2, 1.0, 0.8], 0.0), spd(&[1.4, 0.9, 0.75], 0.5), spd(&[1.1, 1.3, 0.7], -0.9)]
    };
    out.extend(ellipsoids.into_iter().map(|matrix| BodySpec::new(dim, Family::Ellipsoid { matrix })));
    for degree in [2, 3, 4] {
        let threshold = harmonic_threshold(dim, degree);
        for fraction in [0.02, 0.05, 0.1] {
            out.push(BodySpec::new(dim, Family::Harmonic { eps: fraction * threshold, degree, order: 0 }));
        }
    }
    for cap_height in [0.05, 0.1, 0.2] {
        out.push(BodySpec::new(dim, Family::CapCut { cap_height, smoothing: None }));
    }
    for seed in 1..=5 {
        out.push(BodySpec::new(dim, Family::Random { seed, decay: 3.0 }));
    }
    out
}

/// Unit vector check used by callers that take directions from user input.
pub fn is_unit(u: &[f64]) -> bool {
    let mut v = [0.0; 3];
    for (k, x) in u.iter().take(3).enumerate() {
        v[k] = *x;
    }
    (dot(&v, &v) - 1.0).abs() < 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::l2_distance;

    fn grid2() -> Arc<SphereGrid> {
        default_grid(2).unwrap()
    }

    #[test]
    fn harmonic_examples() {
        let k = harmonic_bump(grid2(), 0.1, 3, 0).unwrap();
        assert!((k.min_radius() - 0.2).abs() < 1e-12);
        let ball = ball(grid2(), 1.0).unwrap();
        assert!((l2_distance(&k, &ball).unwrap() - 0.1 / 2f64.sqrt()).abs() < 1e-10);
        assert!(matches!(harmonic_bump(grid2(), 0.2, 3, 0), Err(GeometryError::NotStrictlyConvex { .. })));
        assert!((harmonic_threshold(2, 3) - 0.125).abs() < 1e-15);
        let s = harmonic_bump(default_grid(3).unwrap(), 0.04, 3, 2).unwrap();
        assert!(!s.is_origin_symmetric());
    }

    #[test]
    fn random_bodies_are_deterministic() {
        let a = random_convex(grid2(), 7, 3.0).unwrap();
        let b = random_convex(grid2(), 7, 3.0).unwrap();
        assert_eq!(a.coefficients(), b.coefficients());
        let c = random_convex(grid2(), 8, 3.0).unwrap();
        assert_ne!(a.coefficients(), c.coefficients());
        assert!(random_convex(grid2(), 7, 1.0).is_err());
    }

    #[test]
    fn cap_cuts_are_symmetric_and_approach_the_ball() {
        let ball = ball(grid2(), 1.0).unwrap();
        let mut previous = 0.0;
        for eps in [0.05, 0.1, 0.2] {
            let k = smoothed_cap_cut(grid2(), eps, Some(0.01)).unwrap();
            assert!(k.coefficients().max_odd() == 0.0);
            let d = l2_distance(&k, &ball).unwrap();
            assert!(d > previous);
            previous = d;
        }
        assert!(smoothed_cap_cut(grid2(), 0.1, None).is_ok());
        assert!(smoothed_cap_cut(grid2(), 0.6, None).is_err());
    }

    #[test]
    fn cap_cut_support_function() {
        assert_eq!(cap_cut_support(2, 0.1, &[1.0, 0.0, 0.0]), 1.0);
        assert!((cap_cut_support(2, 0.1, &[0.0, 1.0, 0.0]) - 0.9).abs() < 1e-15);
        assert!((cap_cut_support(3, 0.1, &[0.0, 0.0, -1.0]) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn spec_serialisation_round_trips() {
        for dim in [2, 3] {
            for spec in default_suite(dim) {
                let text = serde_json::to_string(&spec).unwrap();
                let back: BodySpec = serde_json::from_str(&text).unwrap();
                assert_eq!(back, spec);
            }
        }
        let spec: BodySpec = serde_json::from_str(r#"{"family":"ball","radius":2.0,"dimension":3}"#).unwrap();
        assert_eq!(spec.family, Family::Ball { radius: 2.0 });
    }

    #[test]
    fn default_suites_build() {
        for dim in [2, 3] {
            let suite = default_suite(dim);
            assert_eq!(suite.len(), 21);
            for spec in suite {
                spec.build().unwrap_or_else(|e| panic!("{}: {e}", spec.label()));
            }
        }
    }
}
