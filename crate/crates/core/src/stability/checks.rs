use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::{StabilityReport, Subject, DEFAULT_TOLERANCE};
use crate::body::{banach_mazur_to_ball, ConvexBody};
use crate::constants::{diameter_factor, entropy_constant, radial_constant};
use crate::error::{GeometryError, Result};
use crate::generators::harmonic_bump;
use crate::lp::{centro_affine_extremes, grad_volume_product_field, grad_width_field, width};
use crate::sphere::{dot, make_grid};

fn require_symmetric(s: &Subject) -> Result<()> {
    if !s.is_symmetric() {
        return Err(GeometryError::NotSymmetric { max_odd: s.body().max_odd_coefficient() });
    }
    Ok(())
}

/// `(1/omega_n) int h^q` over the nodes of `k`.
fn mean_power(k: &ConvexBody, shift: &[f64], q: f64) -> f64 {
    let grid = k.grid();
    let x = pad(shift);
    let h = k.support();
    grid.integrate_fn_indexed(|i| (h[i] - dot(&x, &grid.nodes()[i])).powf(q)) / grid.total_measure()
}

/// `delta_2(K - x, B_r)`.
fn distance_to_ball(k: &ConvexBody, shift: &[f64], r: f64) -> f64 {
    let grid = k.grid();
    let x = pad(shift);
    let h = k.support();
    let sq = grid.integrate_fn_indexed(|i| {
        let d = h[i] - dot(&x, &grid.nodes()[i]) - r;
        d * d
    });
    (sq / grid.total_measure()).sqrt()
}

fn pad(x: &[f64]) -> [f64; 3] {
    let mut v = [0.0; 3];
    v[..x.len()].copy_from_slice(x);
    v
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `|e_p - s|^2 <= c_0 (1 - E_p) D^{2-p}` for `p in [-n, 0)` on `K~`.
pub fn check_entropy_santalo_gap(s: &Subject, p: f64) -> Result<Vec<StabilityReport>> {
    let n = s.dim();
    if !(p >= -(n as f64) && p < 0.0) {
        return Err(GeometryError::InvalidExponent { p, min: -(n as f64) });
    }
    let w = s.width(p)?;
    let santalo = &s.santalo().translation;
    let c0 = entropy_constant(n, p);
    let d = s.diameter();
    let gap = distance(&w.point, santalo);
    let lhs = gap * gap;
    let rhs = c0 * (1.0 - w.value) * d.powf(2.0 - p);
    Ok(vec![StabilityReport::inequality("entropy_santalo_gap", s.label(), n, Some(p), lhs, rhs, DEFAULT_TOLERANCE)
        .with("c0", c0)
        .with("D", d)
        .with("E_p", w.value)
        .with("e_p_s_distance", gap)])
}

/// The proof chain for `p >= 1`: `E_p(K~) <= R_p(K)` and
/// `(1/omega_n) int h_{K~} <= E_p(K~)^{1/p}`, plus a trend row pairing
/// `A(K~, B)` with `R_p^{1/p} - 1` when the asymmetry is supplied.
pub fn check_width_upper(s: &Subject, p: f64, asymmetry: Option<f64>) -> Result<Vec<StabilityReport>> {
    let n = s.dim();
    if !(p >= 1.0) {
        return Err(GeometryError::InvalidExponent { p, min: 1.0 });
    }
    let w = s.width(p)?;
    let ratio = s.ratio(p);
    let mean = mean_power(s.normalized(), &w.point, 1.0);
    let mut rows = vec![
        StabilityReport::inequality("width_upper.width_vs_ratio", s.label(), n, Some(p), w.value, ratio, 1e-8)
            .with("E_p", w.value)
            .with("R_p", ratio),
        StabilityReport::inequality("width_upper.mean_width", s.label(), n, Some(p), mean, w.value.powf(1.0 / p), 1e-9)
            .with("E_p", w.value),
    ];
    if let Some(a) = asymmetry {
        let gap = ratio.powf(1.0 / p) - 1.0;
        rows.push(
            StabilityReport::inequality("trend:asymmetry_vs_ratio", s.label(), n, Some(p), a, gap, 0.0)
                .with("A_squared_over_gap", if gap > 0.0 { a * a / gap } else { f64::NAN }),
        );
    }
    Ok(rows)
}

/// The full chain for `0 <= p < 1` on origin-symmetric bodies.
pub fn check_symmetric_ratio_chain(s: &Subject, p: f64) -> Result<Vec<StabilityReport>> {
    let n = s.dim();
    require_symmetric(s)?;
    if !(0.0..1.0).contains(&p) {
        return Err(GeometryError::InvalidExponent { p, min: 0.0 });
    }
    let k = s.normalized();
    let ratio = s.ratio(p);
    let r = mean_power(k, &[], -2.0).powf(-0.5);
    let d = s.diameter();
    let delta = distance_to_ball(k, &[], r);
    let e_minus_one = s.width(-1.0)?.value;
    let label = s.label();
    Ok(vec![
        StabilityReport::inequality("symmetric_ratio_chain.radius_lower", label, n, Some(p), 1.0, r, 1e-8).with("r", r),
        StabilityReport::inequality("symmetric_ratio_chain.radius_upper", label, n, Some(p), r, ratio, 1e-8).with("R_p", ratio),
        StabilityReport::inequality(
            "symmetric_ratio_chain.l2_distance",
            label,
            n,
            Some(p),
            delta,
            d * (1.0 - 1.0 / ratio).max(0.0).sqrt(),
            1e-8,
        )
        .with("r", r)
        .with("D", d),
        StabilityReport::inequality(
            "symmetric_ratio_chain.diameter",
            label,
            n,
            Some(p),
            d,
            2.0 * (diameter_factor(n) * ratio).powi(3),
            DEFAULT_TOLERANCE,
        ),
        StabilityReport::inequality("symmetric_ratio_chain.width_chain", label, n, Some(p), 1.0 / ratio, e_minus_one, 1e-8)
            .with("E_-1", e_minus_one),
    ])
}

/// Stability of the width for `p in (-n, 0)` with the explicit constants.
pub fn check_negative_width_stability(s: &Subject, p: f64) -> Result<Vec<StabilityReport>> {
    let n = s.dim();
    let nf = n as f64;
    if !(p > -nf && p < 0.0) {
        return Err(GeometryError::InvalidExponent { p, min: -nf });
    }
    let k = s.normalized();
    let w = s.width(p)?;
    let eps = 1.0 - w.value;
    if eps >= 1.0 {
        return Err(GeometryError::InvalidParameter(format!("width deficit {eps} is not below 1")));
    }
    let eps_clamped = eps.max(0.0);
    let santalo = &s.santalo().translation;
    let r = mean_power(k, santalo, -nf).powf(-1.0 / nf);
    let (c0, c1) = (entropy_constant(n, p), radial_constant(n, p));
    let d = s.diameter();
    let delta = distance_to_ball(k, &w.point, r);
    let bound = if s.is_symmetric() {
        (2.0 * c1 * (0.5 * d + r).powf(nf + 1.0) * eps_clamped).sqrt()
    } else {
        (2.0 * c1 * (d + r).powf(nf + 1.0) * eps_clamped).sqrt() + (c0 * d.powf(2.0 - p) * eps_clamped).sqrt()
    };
    let label = s.label();
    Ok(vec![
        StabilityReport::inequality("negative_width_stability.radius_lower", label, n, Some(p), 1.0, r, 1e-8)
            .with("r", r)
            .with("epsilon", eps),
        StabilityReport::inequality(
            "negative_width_stability.radius_upper",
            label,
            n,
            Some(p),
            r,
            (1.0 - eps).powf(1.0 / p),
            1e-8,
        )
        .with("epsilon", eps),
        StabilityReport::inequality("negative_width_stability.l2_distance", label, n, Some(p), delta, bound, DEFAULT_TOLERANCE)
            .with("r", r)
            .with("epsilon", eps)
            .with("c0", c0)
            .with("c1", c1)
            .with("D", d),
    ])
}

/// The `p = -1` estimate with radius bracket and diameter bound, for
/// origin-symmetric bodies.
pub fn check_inverse_width_stability(s: &Subject) -> Result<Vec<StabilityReport>> {
    let n = s.dim();
    require_symmetric(s)?;
    let k = s.normalized();
    let eps = 1.0 - s.width(-1.0)?.value;
    let eps_clamped = eps.max(0.0);
    let r = mean_power(k, &[], -2.0).powf(-0.5);
    let d = s.diameter();
    let delta = distance_to_ball(k, &[], r);
    let label = s.label();
    Ok(vec![
        StabilityReport::inequality("inverse_width_stability.radius_lower", label, n, Some(-1.0), 1.0, r, 1e-8)
            .with("r", r)
            .with("epsilon", eps),
        StabilityReport::inequality("inverse_width_stability.radius_upper", label, n, Some(-1.0), r, 1.0 / (1.0 - eps), 1e-8)
            .with("epsilon", eps),
        StabilityReport::inequality(
            "inverse_width_stability.l2_distance",
            label,
            n,
            Some(-1.0),
            delta,
            d * eps_clamped.sqrt(),
            DEFAULT_TOLERANCE,
        )
        .with("r", r)
        .with("D", d),
        StabilityReport::inequality(
            "inverse_width_stability.diameter",
            label,
            n,
            Some(-1.0),
            (0.5 * d).cbrt(),
            diameter_factor(n) / (1.0 - eps),
            DEFAULT_TOLERANCE,
        )
        .with("D", d),
    ])
}

/// `int h^{-1} / ((int h^{-2})^{1/2} omega^{1/2}) = 1 - |h^{-1}/(int h^{-2})^{1/2} - omega^{-1/2}|^2 / 2`.
pub fn check_polarization_identity(s: &Subject) -> Result<Vec<StabilityReport>> {
    let k = s.body();
    let grid = k.grid();
    let h = k.support();
    let omega = grid.total_measure();
    let inv = grid.integrate_fn_indexed(|i| 1.0 / h[i]);
    let inv2 = grid.integrate_fn_indexed(|i| 1.0 / (h[i] * h[i]));
    let lhs = inv / (inv2.sqrt() * omega.sqrt());
    let sq = grid.integrate_fn_indexed(|i| {
        let d = 1.0 / (h[i] * inv2.sqrt()) - 1.0 / omega.sqrt();
        d * d
    });
    let rhs = 1.0 - 0.5 * sq;
    let tolerance = if s.dim() == 2 { 1e-10 } else { 1e-8 };
    Ok(vec![StabilityReport::identity("polarization_identity", s.label(), s.dim(), None, lhs, rhs, tolerance)])
}

/// Planar affine checks: `d_BM(K, B) <= sqrt(R_{-2})` for origin-symmetric
/// bodies, and `min (V/pi)^2 H <= 1 <= max (V/pi)^2 H` for every body.
pub fn check_planar_affine(s: &Subject) -> Result<Vec<StabilityReport>> {
    let n = s.dim();
    if n != 2 {
        return Err(GeometryError::WrongDimension { expected: 2, found: n });
    }
    let k = s.body();
    let (lo, hi) = centro_affine_extremes(k);
    let scale = (k.volume() / PI).powi(2);
    let mut rows = Vec::new();
    if s.is_symmetric() {
        let ratio = hi / lo;
        let bm = banach_mazur_to_ball(k)?;
        rows.push(
            StabilityReport::inequality("planar_affine.banach_mazur", s.label(), n, Some(-2.0), bm.value, ratio.sqrt(), 1e-6)
                .with("R_-2", ratio),
        );
    }
    rows.push(StabilityReport::inequality("planar_affine.bracket_lower", s.label(), n, Some(-2.0), scale * lo, 1.0, 1e-6));
    rows.push(StabilityReport::inequality("planar_affine.bracket_upper", s.label(), n, Some(-2.0), 1.0, scale * hi, 2e-6));
    Ok(rows)
}

/// Exploratory analogue of the planar bracket in higher dimension.
pub fn centro_affine_bracket_trend(s: &Subject) -> StabilityReport {
    let k = s.body();
    let n = s.dim();
    let (lo, hi) = centro_affine_extremes(k);
    let scale = (k.volume() / crate::constants::kappa(n)).powi(2);
    StabilityReport::inequality("trend:centro_affine_bracket", s.label(), n, Some(-(n as f64)), scale * lo, scale * hi, 0.0)
}

/// `min H` and `max H` agree for `K` and `l K`, `l` in `SL(n)`. The image is
/// computed on a grid of twice the resolution of `K`.
pub fn check_sln_invariance(s: &Subject, map: &DMatrix<f64>) -> Result<Vec<StabilityReport>> {
    let n = s.dim();
    let det = map.determinant();
    if (det - 1.0).abs() > 1e-10 {
        return Err(GeometryError::NotUnimodular { det });
    }
    let k = s.body();
    // the image is not band-limited; resolve it at twice the degree
    let fine = make_grid(k.grid().resolution().refined(2))?;
    let image = k.with_grid(fine)?.linear_image(map)?;
    let (lo, hi) = centro_affine_extremes(k);
    let (lo2, hi2) = centro_affine_extremes(&image);
    let tolerance = if n == 2 { 1e-5 } else { 1e-4 };
    Ok(vec![
        StabilityReport::inequality("sln_invariance.min_H", s.label(), n, None, (lo2 - lo).abs() / lo, 0.0, tolerance)
            .with("min_H", lo)
            .with("image_min_H", lo2),
        StabilityReport::inequality("sln_invariance.max_H", s.label(), n, None, (hi2 - hi).abs() / hi, 0.0, tolerance)
            .with("max_H", hi)
            .with("image_max_H", hi2),
    ])
}

/// Which gradient fields must vanish on the body under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqualityCase {
    Ball,
    Ellipsoid,
    None,
}

/// Norms of the two first-variation fields: the width gradient at `K - e_p`
/// and the volume-product gradient at `K - s`. Mandatory on balls and
/// ellipsoids, trend data otherwise.
pub fn check_gradient_stationarity(s: &Subject, p: f64, case: EqualityCase) -> Result<Vec<StabilityReport>> {
    let n = s.dim();
    let k = s.body();
    let e = width(k, p)?;
    let centred = k.translate(&e.point)?;
    let width_norm = grad_width_field(&centred, p)?.l2_norm();
    let santalo = k.santalo_point()?;
    let product_norm = grad_volume_product_field(&k.translate(&santalo.translation)?).l2_norm();
    let label = s.label();
    let mut rows = Vec::new();
    match case {
        EqualityCase::Ball => {
            rows.push(StabilityReport::inequality("gradient.width_at_ball", label, n, Some(p), width_norm, 0.0, 1e-8));
            rows.push(StabilityReport::inequality(
                "gradient.volume_product_at_ball",
                label,
                n,
                None,
                product_norm,
                0.0,
                1e-8,
            ));
        }
        EqualityCase::Ellipsoid => {
            rows.push(StabilityReport::inequality(
                "gradient.volume_product_at_ellipsoid",
                label,
                n,
                None,
                product_norm,
                0.0,
                1e-6,
            ));
        }
        EqualityCase::None => {
            rows.push(StabilityReport::inequality(
                "trend:gradient.width_norm",
                label,
                n,
                Some(p),
                width_norm,
                s.ratio(p) - 1.0,
                0.0,
            ));
            rows.push(StabilityReport::inequality(
                "trend:gradient.volume_product_norm",
                label,
                n,
                None,
                product_norm,
                s.ratio(-(n as f64)) - 1.0,
                0.0,
            ));
        }
    }
    Ok(rows)
}

/// Linear scaling of both gradient norms on `h = 1 + eps Y` over one
/// halving of `eps`: `|norm(eps) / norm(eps/2) - 2| <= 0.2`.
pub fn check_gradient_scaling(
    grid: std::sync::Arc<crate::sphere::SphereGrid>,
    degree: usize,
    eps: f64,
    p: f64,
) -> Result<Vec<StabilityReport>> {
    let n = grid.dim();
    let norms = |amplitude: f64| -> Result<(f64, f64)> {
        let k = harmonic_bump(grid.clone(), amplitude, degree, 0)?;
        let e = width(&k, p)?;
        let a = grad_width_field(&k.translate(&e.point)?, p)?.l2_norm();
        let s = k.santalo_point()?;
        let b = grad_volume_product_field(&k.translate(&s.translation)?).l2_norm();
        Ok((a, b))
    };
    let (w1, v1) = norms(eps)?;
    let (w2, v2) = norms(0.5 * eps)?;
    let label = format!("harmonic(n={n},k={degree},eps={eps})");
    let row = |check: &str, big: f64, small: f64| {
        let ratio = big / small;
        StabilityReport::inequality(check, label.as_str(), n, Some(p), (ratio / 2.0 - 1.0).abs(), 0.1, 0.0)
            .with("ratio", ratio)
            .with("norm", big)
            .with("half_norm", small)
    };
    Ok(vec![row("gradient.width_scaling", w1, w2), row("gradient.volume_product_scaling", v1, v2)])
}

