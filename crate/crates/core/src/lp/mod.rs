//! L_p curvature, L_p sums and mixed volumes, the width functionals and
//! the first variations used by the stability estimates.

mod width;

use serde::{Deserialize, Serialize};

use crate::body::{refine_field_extrema, ConvexBody};
use crate::constants::kappa;
use crate::error::{GeometryError, Result};
use crate::sphere::{analyze, ScalarField};

pub use width::{width, WidthResult};

/// `h^{1-p} f` at the nodes together with its refined extremes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpCurvatureSummary {
    pub p: f64,
    pub values: Vec<f64>,
    pub min: f64,
    pub max: f64,
    /// `R_p = max / min`.
    pub ratio: f64,
}

pub fn lp_curvature_field(k: &ConvexBody, p: f64) -> ScalarField {
    let values = k.support().iter().zip(k.curvature()).map(|(h, f)| h.powf(1.0 - p) * f).collect();
    ScalarField::from_values(k.grid().clone(), values).expect("one value per node")
}

/// L_p curvature with extremes refined between the nodes.
pub fn lp_curvature(k: &ConvexBody, p: f64) -> LpCurvatureSummary {
    let n = k.dim();
    let values = lp_curvature_field(k, p).values().to_vec();
    let ext = refine_field_extrema(n, k.grid().nodes(), &values, k.spacing(), 6, |v| {
        let jet = k.jet(v);
        jet.value.powf(1.0 - p) * jet.curvature_function(n)
    });
    LpCurvatureSummary { p, values, min: ext.min, max: ext.max, ratio: ext.max / ext.min }
}

/// `R_p(K)`.
pub fn lp_ratio(k: &ConvexBody, p: f64) -> f64 {
    lp_curvature(k, p).ratio
}

/// Centro-affine curvature `H = (h^{n+1} f)^{-1}` at the nodes.
pub fn centro_affine_curvature(k: &ConvexBody) -> ScalarField {
    let n = k.dim() as i32;
    let values = k.support().iter().zip(k.curvature()).map(|(h, f)| 1.0 / (h.powi(n + 1) * f)).collect();
    ScalarField::from_values(k.grid().clone(), values).expect("one value per node")
}

/// Refined `(min H, max H)`.
pub fn centro_affine_extremes(k: &ConvexBody) -> (f64, f64) {
    let s = lp_curvature(k, -(k.dim() as f64));
    (1.0 / s.max, 1.0 / s.min)
}

fn same_grid(k: &ConvexBody, l: &ConvexBody) -> Result<()> {
    if k.grid() != l.grid() {
        return Err(GeometryError::GridMismatch);
    }
    Ok(())
}

/// `a K +_p b L`, with support function `(a h_K^p + b h_L^p)^{1/p}`.
pub fn lp_sum(k: &ConvexBody, l: &ConvexBody, a: f64, b: f64, p: f64) -> Result<ConvexBody> {
    same_grid(k, l)?;
    if !(p >= 1.0) {
        return Err(GeometryError::InvalidExponent { p, min: 1.0 });
    }
    if !(a > 0.0 && b > 0.0) {
        return Err(GeometryError::InvalidParameter(format!("L_p sum weights must be positive, got {a} and {b}")));
    }
    let degree = k.grid().band_limit();
    ConvexBody::from_support_function(k.grid().clone(), degree, |u| {
        (a * k.support_unchecked(u).powf(p) + b * l.support_unchecked(u).powf(p)).powf(1.0 / p)
    })
}

/// `V_p(K, L) = (1/n) int h_L^p h_K^{1-p} f_K`.
pub fn lp_mixed_volume(k: &ConvexBody, l: &ConvexBody, p: f64) -> Result<f64> {
    same_grid(k, l)?;
    let (hk, hl, f) = (k.support(), l.support(), k.curvature());
    let n = k.dim() as f64;
    Ok(k.grid().integrate_fn_indexed(|i| hl[i].powf(p) * hk[i].powf(1.0 - p) * f[i]) / n)
}

/// `V_p(K, L) - V(K)^{1-p/n} V(L)^{p/n}`, nonnegative for `p >= 1`.
pub fn minkowski_deficit(k: &ConvexBody, l: &ConvexBody, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(GeometryError::InvalidExponent { p, min: 1.0 });
    }
    let n = k.dim() as f64;
    Ok(lp_mixed_volume(k, l, p)? - k.volume().powf(1.0 - p / n) * l.volume().powf(p / n))
}

/// `kappa_n^2 - V(K) V(K^s)`.
pub fn santalo_deficit(k: &ConvexBody) -> Result<f64> {
    let kn = kappa(k.dim());
    Ok(kn * kn - k.volume_product()?)
}

/// First variation of the scale invariant width functional at `h_K`:
/// `h^{p-1} (int h^p)^{n/p} V^{-2} (n V / int h^p - h^{1-p} f)`.
pub fn grad_width_field(k: &ConvexBody, p: f64) -> Result<ScalarField> {
    if p == 0.0 || !p.is_finite() {
        return Err(GeometryError::InvalidParameter("the width gradient needs p != 0".into()));
    }
    let n = k.dim() as f64;
    let h = k.support();
    let f = k.curvature();
    let mass = k.grid().integrate_fn_indexed(|i| h[i].powf(p));
    let v = k.volume();
    let factor = mass.powf(n / p) / (v * v);
    let values = h
        .iter()
        .zip(f)
        .map(|(h, f)| h.powf(p - 1.0) * factor * (n * v / mass - h.powf(1.0 - p) * f))
        .collect();
    ScalarField::from_values(k.grid().clone(), values)
}

/// First variation of `P(K) = V(K) V(K^*)` (polar about the origin):
/// `P^2 (V / h^{n+1} - V^* f)`. Meaningful when the Santalo point is the origin.
pub fn grad_volume_product_field(k: &ConvexBody) -> ScalarField {
    let n = k.dim() as i32;
    let v = k.volume();
    let vp = k.polar_volume();
    let product = v * vp;
    let values = k
        .support()
        .iter()
        .zip(k.curvature())
        .map(|(h, f)| product * product * (v / h.powi(n + 1) - vp * f))
        .collect();
    ScalarField::from_values(k.grid().clone(), values).expect("one value per node")
}

/// The polar body about the origin, `h_{K^*} = 1 / rho_K`, on the grid of `K`.
pub fn polar_body(k: &ConvexBody) -> Result<ConvexBody> {
    let rho = k.radial_at_nodes(&vec![0.0; k.dim()])?;
    let samples: Vec<f64> = rho.iter().map(|r| 1.0 / r).collect();
    let coefficients = analyze(k.grid(), &samples, k.grid().band_limit())?;
    ConvexBody::on_grid(k.grid().clone(), coefficients)
}
