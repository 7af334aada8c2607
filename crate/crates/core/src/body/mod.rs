//! Smooth, strictly convex bodies with the origin in their interior,
//! represented by the spectral coefficients of their support function.

mod distance;
mod extrema;
mod radial;
mod santalo;

use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::constants::kappa;
use crate::error::{GeometryError, Result};
use crate::sphere::{
    analyze, dot, jet_unchecked, make_grid, synthesize_jets, value_unchecked, Coefficients, Jet, Resolution, ScalarField, SphereGrid, Vec3,
};

pub use distance::{banach_mazur_to_ball, l2_distance, relative_asymmetry_to_ball, symmetric_difference_volume};
pub(crate) use extrema::{refine_field_extrema, refine_min};

/// Smallest admissible eigenvalue of `nabla^2 h + h g`.
/// Relative floor below which image coefficients are dropped.
const IMAGE_CHOP: f64 = 1e-15;

pub const CONVEXITY_TOLERANCE: f64 = 1e-8;

/// Outcome of an optimisation-backed geometric quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub value: f64,
    /// Optimal translation or base point.
    pub translation: Vec<f64>,
    /// Optimal linear map, row-major `n x n`, when one is part of the search.
    pub linear_map: Option<Vec<f64>>,
    pub converged: bool,
    pub iterations: usize,
}

/// Cached default grid for `dim`.
pub fn default_grid(dim: usize) -> Result<Arc<SphereGrid>> {
    static CIRCLE: OnceLock<Arc<SphereGrid>> = OnceLock::new();
    static SPHERE: OnceLock<Arc<SphereGrid>> = OnceLock::new();
    let cell = match dim {
        2 => &CIRCLE,
        3 => &SPHERE,
        _ => return Err(GeometryError::UnsupportedDimension(dim)),
    };
    if let Some(g) = cell.get() {
        return Ok(g.clone());
    }
    let grid = make_grid(Resolution::default_for(dim)?)?;
    Ok(cell.get_or_init(|| grid).clone())
}

/// A validated body of class F_0^n: `h > 0` and `nabla^2 h + h g` positive
/// definite at every node.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    grid: Arc<SphereGrid>,
    coefficients: Coefficients,
    support: Vec<f64>,
    gradients: Vec<Vec3>,
    radii: Vec<[f64; 3]>,
    curvature: Vec<f64>,
    min_radius: f64,
}

impl ConvexBody {
    /// Validate coefficients on the default grid of their dimension.
    pub fn from_coefficients(coefficients: Coefficients) -> Result<Self> {
        let grid = default_grid(coefficients.dim())?;
        Self::on_grid(grid, coefficients)
    }

    pub fn on_grid(grid: Arc<SphereGrid>, coefficients: Coefficients) -> Result<Self> {
        let jets = synthesize_jets(&grid, &coefficients)?;
        let dim = grid.dim();
        let mut radii = Vec::with_capacity(grid.len());
        let mut curvature = Vec::with_capacity(grid.len());
        let mut min_radius = f64::INFINITY;
        for (hess, h) in jets.hessian.iter().zip(&jets.values) {
            let (r, f, lo) = if dim == 2 {
                let r = hess[0] + h;
                ([r, 0.0, 0.0], r, r)
            } else {
                let (a, b, c) = (hess[0] + h, hess[1], hess[2] + h);
                let half = 0.5 * (a + c);
                let det = a * c - b * b;
                let lo = half - (half * half - det).max(0.0).sqrt();
                ([a, b, c], det, lo)
            };
            radii.push(r);
            curvature.push(f);
            min_radius = min_radius.min(lo);
        }
        let min_h = jets.values.iter().copied().fold(f64::INFINITY, f64::min);
        if min_h <= 0.0 || !min_h.is_finite() {
            return Err(GeometryError::NotPositive { min: min_h });
        }
        if min_radius <= CONVEXITY_TOLERANCE || !min_radius.is_finite() {
            return Err(GeometryError::NotStrictlyConvex { min_eigenvalue: min_radius });
        }
        Ok(ConvexBody {
            grid,
            coefficients,
            support: jets.values,
            gradients: jets.gradients,
            radii,
            curvature,
            min_radius,
        })
    }

    /// Body whose support function is `h` (not necessarily band-limited):
    /// sampled on a twice finer grid, projected to `degree` and validated on `grid`.
    pub fn from_support_function(
        grid: Arc<SphereGrid>,
        degree: usize,
        mut h: impl FnMut(&Vec3) -> f64,
    ) -> Result<Self> {
        let fine = make_grid(grid.resolution().refined(2))?;
        let samples: Vec<f64> = fine.nodes().iter().map(&mut h).collect();
        let coefficients = analyze(&fine, &samples, degree.min(grid.band_limit()))?;
        Self::on_grid(grid, coefficients)
    }

    /// The same body evaluated on another grid.
    pub fn with_grid(&self, grid: Arc<SphereGrid>) -> Result<Self> {
        Self::on_grid(grid, self.coefficients.clone())
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coefficients
    }

    /// Support function at the nodes.
    pub fn support(&self) -> &[f64] {
        &self.support
    }

    /// Curvature function `det(nabla^2 h + h g)` at the nodes.
    pub fn curvature(&self) -> &[f64] {
        &self.curvature
    }

    /// `nabla^2 h + h g` at node `i` in the node frame, `[r11, r12, r22]`.
    pub fn radii_matrix(&self, i: usize) -> [f64; 3] {
        self.radii[i]
    }

    /// Smallest eigenvalue of `nabla^2 h + h g` over the nodes.
    pub fn min_radius(&self) -> f64 {
        self.min_radius
    }

    pub fn min_support(&self) -> f64 {
        self.support.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn support_field(&self) -> ScalarField {
        ScalarField::from_coefficients(self.grid.clone(), self.coefficients.clone())
            .expect("coefficients were validated on this grid")
    }

    pub fn curvature_function(&self) -> ScalarField {
        ScalarField::from_values(self.grid.clone(), self.curvature.clone()).expect("one value per node")
    }

    /// Support function at an arbitrary unit direction.
    pub fn support_at(&self, u: &[f64]) -> Result<f64> {
        crate::sphere::evaluate_at(&self.coefficients, u)
    }

    pub(crate) fn support_unchecked(&self, u: &Vec3) -> f64 {
        value_unchecked(&self.coefficients, u)
    }

    pub(crate) fn jet(&self, u: &Vec3) -> Jet {
        jet_unchecked(&self.coefficients, u)
    }

    /// Boundary points `nu^{-1}(u_i)` at the nodes.
    pub fn boundary_points(&self) -> Vec<Vec3> {
        self.grid
            .nodes()
            .iter()
            .zip(&self.gradients)
            .zip(&self.support)
            .map(|((u, g), h)| [g[0] + h * u[0], g[1] + h * u[1], g[2] + h * u[2]])
            .collect()
    }

    /// The boundary point with outer normal `u`.
    pub fn boundary_point(&self, u: &[f64]) -> Result<Vec<f64>> {
        let jet = crate::sphere::jet_at(&self.coefficients, u)?;
        let mut v = [0.0; 3];
        v[..self.dim()].copy_from_slice(&u[..self.dim()]);
        Ok(jet.boundary_point(&v)[..self.dim()].to_vec())
    }

    /// `V(K) = (1/n) int h f dsigma`.
    pub fn volume(&self) -> f64 {
        let n = self.dim() as f64;
        self.grid.integrate_fn_indexed(|i| self.support[i] * self.curvature[i]) / n
    }

    /// Mean of `h` over the sphere (half the mean width).
    pub fn mean_support(&self) -> f64 {
        self.grid.integrate_values(&self.support) / self.grid.total_measure()
    }

    /// Diameter, the largest width `h(u) + h(-u)`, refined off the grid.
    pub fn diameter(&self) -> f64 {
        let width_at_node = |i: usize| self.support[i] + self.support[self.grid.antipode(i)];
        let mut order: Vec<usize> = (0..self.grid.len()).collect();
        order.sort_by(|&a, &b| width_at_node(b).total_cmp(&width_at_node(a)));
        let mut best = width_at_node(order[0]);
        for &i in order.iter().take(3) {
            let u = self.grid.nodes()[i];
            let (_, value) = refine_min(self.dim(), &u, self.spacing(), |v| {
                let w = [-v[0], -v[1], -v[2]];
                -(self.support_unchecked(v) + self.support_unchecked(&w))
            });
            best = best.max(-value);
        }
        best
    }

    /// Typical angular node spacing.
    pub(crate) fn spacing(&self) -> f64 {
        match self.grid.resolution() {
            Resolution::Circle { nodes } => 2.0 * std::f64::consts::PI / nodes as f64,
            Resolution::Sphere { rings, longitudes } => {
                (std::f64::consts::PI / rings as f64).max(2.0 * std::f64::consts::PI / longitudes as f64)
            }
        }
    }

    /// `min_i (h(u_i) - x . u_i)`, positive iff `x` is interior (at node resolution).
    pub fn interior_margin(&self, x: &[f64]) -> f64 {
        let x = pad(x);
        self.grid
            .nodes()
            .iter()
            .zip(&self.support)
            .map(|(u, h)| h - dot(&x, u))
            .fold(f64::INFINITY, f64::min)
    }

    /// `K - x`. Fails if `x` is not interior.
    pub fn translate(&self, x: &[f64]) -> Result<Self> {
        let margin = self.interior_margin(x);
        if margin <= 0.0 {
            return Err(GeometryError::TranslationLeavesOrigin { min: margin });
        }
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let mut coefficients = self.coefficients.clone();
        coefficients.add_linear(&neg);
        Self::on_grid(self.grid.clone(), coefficients)
    }

    /// `lambda K`.
    pub fn scale(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(GeometryError::InvalidParameter(format!("scale factor {lambda} must be positive")));
        }
        Self::on_grid(self.grid.clone(), self.coefficients.scaled(lambda))
    }

    /// The dilate with the volume of the unit ball.
    pub fn normalize_volume(&self) -> Result<Self> {
        let n = self.dim() as f64;
        self.scale((kappa(self.dim()) / self.volume()).powf(1.0 / n))
    }

    /// Image `l K` under an invertible linear map:
    /// `h_{lK}(u) = |l^T u| h(l^T u / |l^T u|)`, re-projected from a twice
    /// finer grid with the noise tail of the spectrum removed.
    pub fn linear_image(&self, map: &DMatrix<f64>) -> Result<Self> {
        let n = self.dim();
        if map.nrows() != n || map.ncols() != n {
            return Err(GeometryError::InvalidParameter(format!("linear map must be {n}x{n}")));
        }
        let det = map.determinant();
        if det.abs() < 1e-12 || !det.is_finite() {
            return Err(GeometryError::SingularMap { det });
        }
        let fine = make_grid(self.grid.resolution().refined(2))?;
        let samples: Vec<f64> = fine
            .nodes()
            .iter()
            .map(|u| {
                let mut w = [0.0; 3];
                for a in 0..n {
                    w[a] = (0..n).map(|b| map[(b, a)] * u[b]).sum();
                }
                let len = dot(&w, &w).sqrt();
                len * self.support_unchecked(&[w[0] / len, w[1] / len, w[2] / len])
            })
            .collect();
        // rounding noise in the far tail would be amplified by the curvature
        let coefficients = analyze(&fine, &samples, self.grid.band_limit())?.chopped(IMAGE_CHOP);
        let result = Self::on_grid(self.grid.clone(), coefficients);
        match result {
            Err(GeometryError::NotStrictlyConvex { min_eigenvalue }) => {
                Err(GeometryError::TruncationLostConvexity { min_eigenvalue, tail: self.image_tail(map)? })
            }
            other => other,
        }
    }

    fn image_tail(&self, map: &DMatrix<f64>) -> Result<f64> {
        let n = self.dim();
        let fine = make_grid(self.grid.resolution().refined(2))?;
        let samples: Vec<f64> = fine
            .nodes()
            .iter()
            .map(|u| {
                let mut w = [0.0; 3];
                for a in 0..n {
                    w[a] = (0..n).map(|b| map[(b, a)] * u[b]).sum();
                }
                let len = dot(&w, &w).sqrt();
                len * self.support_unchecked(&[w[0] / len, w[1] / len, w[2] / len])
            })
            .collect();
        let band = self.grid.band_limit();
        let coefficients = analyze(&fine, &samples, band)?;
        Ok(coefficients.tail(band * 9 / 10))
    }

    /// Largest magnitude of odd-degree coefficients.
    pub fn max_odd_coefficient(&self) -> f64 {
        self.coefficients.max_odd()
    }

    /// True when every odd-degree coefficient is below 1e-12.
    pub fn is_origin_symmetric(&self) -> bool {
        self.max_odd_coefficient() <= 1e-12
    }

    /// `V(K^x) = (1/n) int (h - x.u)^{-n} dsigma`.
    pub fn polar_volume_at(&self, x: &[f64]) -> Result<f64> {
        let margin = self.interior_margin(x);
        if margin <= 0.0 {
            return Err(GeometryError::NotInterior { min: margin });
        }
        let x = pad(x);
        let n = self.dim() as i32;
        let nodes = self.grid.nodes();
        Ok(self.grid.integrate_fn_indexed(|i| (self.support[i] - dot(&x, &nodes[i])).powi(-n)) / n as f64)
    }

    /// `V(K*)` with the polar taken about the origin.
    pub fn polar_volume(&self) -> f64 {
        let n = self.dim() as i32;
        self.grid.integrate_fn_indexed(|i| self.support[i].powi(-n)) / n as f64
    }

    /// Centroid of the body.
    pub fn centroid(&self) -> Vec<f64> {
        let points = self.boundary_points();
        let v = self.volume();
        let n = self.dim();
        let mut c = [0.0; 3];
        for (i, w) in self.grid.weights().iter().enumerate() {
            let s = w * self.support[i] * self.curvature[i];
            for k in 0..3 {
                c[k] += s * points[i][k];
            }
        }
        c[..n].iter().map(|x| x / ((n as f64 + 1.0) * v)).collect()
    }

    /// Covariance matrix of the uniform distribution on the body.
    pub fn inertia(&self) -> DMatrix<f64> {
        let points = self.boundary_points();
        let v = self.volume();
        let n = self.dim();
        let c = self.centroid();
        let mut m = DMatrix::zeros(n, n);
        for (i, w) in self.grid.weights().iter().enumerate() {
            let s = w * self.support[i] * self.curvature[i];
            for a in 0..n {
                for b in 0..n {
                    m[(a, b)] += s * points[i][a] * points[i][b];
                }
            }
        }
        m /= (n as f64 + 2.0) * v;
        for a in 0..n {
            for b in 0..n {
                m[(a, b)] -= c[a] * c[b];
            }
        }
        m
    }
}

pub(crate) fn pad(x: &[f64]) -> Vec3 {
    let mut v = [0.0; 3];
    for (k, xi) in x.iter().take(3).enumerate() {
        v[k] = *xi;
    }
    v
}
