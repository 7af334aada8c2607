//! Quadrature grids on S^1 and S^2 together with the spectral machinery
//! (Fourier series on the circle, real spherical harmonics on the sphere)
//! used to represent support functions.

pub mod legendre;
mod transform;

use std::f64::consts::PI;
use std::sync::Arc;

use crate::constants;
use crate::error::{GeometryError, Result};

pub use transform::{analyze, evaluate_at, jet_at, synthesize, synthesize_jets, GridJets, Jet};
pub(crate) use transform::{jet_unchecked, value_unchecked};

pub(crate) type Vec3 = [f64; 3];

#[inline]
pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Default circle resolution.
pub const DEFAULT_CIRCLE_NODES: usize = 512;
/// Default Gauss-Legendre order on S^2; the longitude count is twice this.
pub const DEFAULT_SPHERE_RINGS: usize = 48;

/// Grid resolution parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Resolution {
    /// `nodes` equispaced points on S^1.
    Circle { nodes: usize },
    /// Gauss-Legendre `rings` in cos(theta) times `longitudes` uniform angles.
    Sphere { rings: usize, longitudes: usize },
}

impl Resolution {
    pub fn default_for(dim: usize) -> Result<Self> {
        match dim {
            2 => Ok(Resolution::Circle { nodes: DEFAULT_CIRCLE_NODES }),
            3 => Ok(Resolution::Sphere { rings: DEFAULT_SPHERE_RINGS, longitudes: 2 * DEFAULT_SPHERE_RINGS }),
            _ => Err(GeometryError::UnsupportedDimension(dim)),
        }
    }

    /// Resolution from a single size parameter (`N` on S^1, `L` on S^2 with `M = 2L`).
    pub fn from_size(dim: usize, size: usize) -> Result<Self> {
        match dim {
            2 => Ok(Resolution::Circle { nodes: size }),
            3 => Ok(Resolution::Sphere { rings: size, longitudes: 2 * size }),
            _ => Err(GeometryError::UnsupportedDimension(dim)),
        }
    }

    /// The single size parameter accepted by [`Resolution::from_size`].
    pub fn size(&self) -> usize {
        match *self {
            Resolution::Circle { nodes } => nodes,
            Resolution::Sphere { rings, .. } => rings,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Resolution::Circle { .. } => 2,
            Resolution::Sphere { .. } => 3,
        }
    }

    /// The same kind of grid with every size parameter multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        match *self {
            Resolution::Circle { nodes } => Resolution::Circle { nodes: nodes * factor },
            Resolution::Sphere { rings, longitudes } => {
                Resolution::Sphere { rings: rings * factor, longitudes: longitudes * factor }
            }
        }
    }
}

#[derive(Debug)]
pub(crate) enum Plan {
    Circle {
        /// cos(2 pi k / N) and sin(2 pi k / N), indexed modulo N.
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
    Sphere {
        z: Vec<f64>,
        sin_theta: Vec<f64>,
        ring_weights: Vec<f64>,
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
}

/// Quadrature nodes and weights on S^{n-1} plus the transform plan.
///
/// Immutable after construction; share it through `Arc`.
#[derive(Debug)]
pub struct SphereGrid {
    resolution: Resolution,
    nodes: Vec<Vec3>,
    weights: Vec<f64>,
    antipodes: Vec<usize>,
    frames: Vec<[Vec3; 2]>,
    pub(crate) plan: Plan,
}

impl PartialEq for SphereGrid {
    fn eq(&self, other: &Self) -> bool {
        self.resolution == other.resolution
    }
}

/// Build a grid. Rejects odd sizes and resolutions below the minimum
/// (`N >= 16` on S^1, `L >= 8` and `M >= 2L` on S^2).
pub fn make_grid(resolution: Resolution) -> Result<Arc<SphereGrid>> {
    SphereGrid::new(resolution).map(Arc::new)
}

impl SphereGrid {
    pub fn new(resolution: Resolution) -> Result<Self> {
        match resolution {
            Resolution::Circle { nodes } => Self::circle(nodes),
            Resolution::Sphere { rings, longitudes } => Self::sphere(rings, longitudes),
        }
    }

    /// Default grid for dimension `dim`.
    pub fn default_for(dim: usize) -> Result<Arc<Self>> {
        make_grid(Resolution::default_for(dim)?)
    }

    fn circle(n: usize) -> Result<Self> {
        if n % 2 == 1 {
            return Err(GeometryError::OddResolution { what: "N", value: n });
        }
        if n < 16 {
            return Err(GeometryError::ResolutionTooLow { what: "N", value: n, min: 16 });
        }
        let (cos, sin) = trig_table(n);
        let nodes = (0..n).map(|j| [cos[j], sin[j], 0.0]).collect();
        let frames = (0..n).map(|j| [[-sin[j], cos[j], 0.0], [0.0; 3]]).collect();
        let weights = vec![2.0 * PI / n as f64; n];
        let antipodes = (0..n).map(|j| (j + n / 2) % n).collect();
        Ok(SphereGrid {
            resolution: Resolution::Circle { nodes: n },
            nodes,
            weights,
            antipodes,
            frames,
            plan: Plan::Circle { cos, sin },
        })
    }

    fn sphere(rings: usize, longitudes: usize) -> Result<Self> {
        if rings < 8 {
            return Err(GeometryError::ResolutionTooLow { what: "L", value: rings, min: 8 });
        }
        if longitudes % 2 == 1 {
            return Err(GeometryError::OddResolution { what: "M", value: longitudes });
        }
        if longitudes < 2 * rings {
            return Err(GeometryError::ResolutionTooLow { what: "M", value: longitudes, min: 2 * rings });
        }
        let (z, ring_weights) = legendre::gauss_legendre(rings);
        let sin_theta: Vec<f64> = z.iter().map(|z| (1.0 - z * z).sqrt()).collect();
        let (cos, sin) = trig_table(longitudes);
        let dphi = 2.0 * PI / longitudes as f64;
        let count = rings * longitudes;
        let mut nodes = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        let mut frames = Vec::with_capacity(count);
        let mut antipodes = Vec::with_capacity(count);
        for i in 0..rings {
            let (zi, si) = (z[i], sin_theta[i]);
            for j in 0..longitudes {
                let (cp, sp) = (cos[j], sin[j]);
                nodes.push([si * cp, si * sp, zi]);
                weights.push(ring_weights[i] * dphi);
                frames.push([[zi * cp, zi * sp, -si], [-sp, cp, 0.0]]);
                antipodes.push((rings - 1 - i) * longitudes + (j + longitudes / 2) % longitudes);
            }
        }
        Ok(SphereGrid {
            resolution: Resolution::Sphere { rings, longitudes },
            nodes,
            weights,
            antipodes,
            frames,
            plan: Plan::Sphere { z, sin_theta, ring_weights, cos, sin },
        })
    }

    pub fn dim(&self) -> usize {
        self.resolution.dim()
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node directions, stored with three components (the third is zero on S^1).
    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of the node `-u_i`.
    pub fn antipode(&self, i: usize) -> usize {
        self.antipodes[i]
    }

    /// Orthonormal tangent frame at node `i` (only the first vector is used on S^1).
    pub fn frame(&self, i: usize) -> &[[f64; 3]; 2] {
        &self.frames[i]
    }

    /// Highest degree that analysis reproduces exactly.
    pub fn band_limit(&self) -> usize {
        match self.resolution {
            Resolution::Circle { nodes } => nodes / 2 - 1,
            Resolution::Sphere { rings, longitudes } => (rings - 1).min(longitudes / 2 - 1),
        }
    }

    /// Total measure of S^{n-1}.
    pub fn total_measure(&self) -> f64 {
        constants::omega(self.dim())
    }

    /// Quadrature of raw node samples.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Quadrature of a function of the node direction.
    pub fn integrate_fn(&self, mut f: impl FnMut(&[f64; 3]) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(u, w)| w * f(u)).sum()
    }
}

fn trig_table(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Exact values at the quarter points keep the grid exactly antipodal.
    let mut cos = Vec::with_capacity(n);
    let mut sin = Vec::with_capacity(n);
    for j in 0..n {
        let t = 2.0 * PI * j as f64 / n as f64;
        cos.push(t.cos());
        sin.push(t.sin());
    }
    for j in 0..n / 2 {
        cos[j + n / 2] = -cos[j];
        sin[j + n / 2] = -sin[j];
    }
    (cos, sin)
}

/// Spectral coefficients of a real function on S^{n-1}.
///
/// Layout on S^1: `[a0, a1, b1, a2, b2, ...]` for
/// `a0 + sum_k a_k cos(k t) + b_k sin(k t)`.
/// Layout on S^2: orthonormal real spherical harmonics, `(l, m)` in
/// lexicographic order with `m` running over `-l..=l`, i.e. index `l^2 + l + m`;
/// negative `m` are the sine harmonics.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    dim: usize,
    degree: usize,
    values: Vec<f64>,
}

impl Coefficients {
    pub fn len_for(dim: usize, degree: usize) -> usize {
        if dim == 2 {
            2 * degree + 1
        } else {
            (degree + 1) * (degree + 1)
        }
    }

    pub fn zeros(dim: usize, degree: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Coefficients { dim, degree, values: vec![0.0; Self::len_for(dim, degree)] })
    }

    /// Wrap a flat coefficient array, inferring the degree from its length.
    pub fn from_vec(dim: usize, values: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        let len = values.len();
        let degree = match dim {
            2 if len % 2 == 1 => (len - 1) / 2,
            3 => {
                let r = (len as f64).sqrt().round() as usize;
                if r * r != len || r == 0 {
                    return Err(GeometryError::CoefficientLayout { len, degree: r.saturating_sub(1) });
                }
                r - 1
            }
            _ => return Err(GeometryError::CoefficientLayout { len, degree: len / 2 }),
        };
        Ok(Coefficients { dim, degree, values })
    }

    /// The constant function `c`.
    pub fn constant(dim: usize, c: f64) -> Result<Self> {
        let mut coeffs = Self::zeros(dim, 0)?;
        coeffs.values[0] = if dim == 2 { c } else { c * (4.0 * PI).sqrt() };
        Ok(coeffs)
    }

    /// The linear function `u -> x . u` (only the first `dim` components of `x` are used).
    pub fn linear(dim: usize, x: &[f64]) -> Result<Self> {
        let mut coeffs = Self::zeros(dim, 1)?;
        coeffs.add_linear(x);
        Ok(coeffs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Flat index of the harmonic of degree `l` and order `m`. On S^1 the
    /// order selects cosine (`m >= 0`) or sine (`m < 0`).
    pub fn index(&self, l: usize, m: i64) -> usize {
        index_of(self.dim, l, m)
    }

    pub fn get(&self, l: usize, m: i64) -> f64 {
        if l > self.degree {
            return 0.0;
        }
        self.values[self.index(l, m)]
    }

    /// Set one coefficient, growing the expansion if needed.
    pub fn set(&mut self, l: usize, m: i64, value: f64) {
        if l > self.degree {
            *self = self.resized(l);
        }
        let i = self.index(l, m);
        self.values[i] = value;
    }

    /// Copy truncated or zero-padded to `degree`.
    pub fn resized(&self, degree: usize) -> Self {
        let mut out = Coefficients { dim: self.dim, degree, values: vec![0.0; Self::len_for(self.dim, degree)] };
        let n = out.values.len().min(self.values.len());
        out.values[..n].copy_from_slice(&self.values[..n]);
        out
    }

    /// Degree of each flat index.
    pub fn degree_of(&self, index: usize) -> usize {
        if self.dim == 2 {
            index.div_ceil(2)
        } else {
            (index as f64).sqrt().floor() as usize
        }
    }

    /// Add the linear function `u -> x . u`.
    pub fn add_linear(&mut self, x: &[f64]) {
        if self.degree < 1 {
            *self = self.resized(1);
        }
        if self.dim == 2 {
            self.values[1] += x[0];
            self.values[2] += x[1];
        } else {
            let c = (4.0 * PI / 3.0).sqrt();
            self.values[3] += c * x[0];
            self.values[1] += c * x[1];
            self.values[2] += c * x[2];
        }
    }

    /// The degree-one part as a vector `x` with `h_1(u) = x . u`.
    pub fn linear_part(&self) -> [f64; 3] {
        if self.degree < 1 {
            return [0.0; 3];
        }
        if self.dim == 2 {
            [self.values[1], self.values[2], 0.0]
        } else {
            let c = (3.0 / (4.0 * PI)).sqrt();
            [c * self.values[3], c * self.values[1], c * self.values[2]]
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        out
    }

    /// Largest magnitude among odd-degree coefficients.
    pub fn max_odd(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| self.degree_of(*i) % 2 == 1)
            .fold(0.0, |acc, (_, v)| acc.max(v.abs()))
    }

    /// Truncated after the last degree holding a coefficient above
    /// `relative` times the largest one.
    pub fn chopped(&self, relative: f64) -> Self {
        let floor = relative * self.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let last = (0..self.values.len()).rev().find(|&i| self.values[i].abs() > floor).map_or(0, |i| self.degree_of(i));
        self.resized(last)
    }

    /// Largest magnitude among coefficients of degree `>= from`.
    pub fn tail(&self, from: usize) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| self.degree_of(*i) >= from)
            .fold(0.0, |acc, (_, v)| acc.max(v.abs()))
    }

    /// Largest coefficient difference, treating missing entries as zero.
    pub fn max_difference(&self, other: &Self) -> f64 {
        let n = self.values.len().max(other.values.len());
        (0..n)
            .map(|i| {
                let a = self.values.get(i).copied().unwrap_or(0.0);
                let b = other.values.get(i).copied().unwrap_or(0.0);
                (a - b).abs()
            })
            .fold(0.0, f64::max)
    }
}

pub(crate) fn index_of(dim: usize, l: usize, m: i64) -> usize {
    if dim == 2 {
        match (l, m) {
            (0, _) => 0,
            (k, m) if m >= 0 => 2 * k - 1,
            (k, _) => 2 * k,
        }
    } else {
        ((l * l + l) as i64 + m) as usize
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(GeometryError::UnsupportedDimension(dim))
    }
}

/// Real field sampled at the nodes of a grid, optionally with its spectrum.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
    coefficients: Option<Coefficients>,
}

impl ScalarField {
    pub fn from_values(grid: Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(GeometryError::GridMismatch);
        }
        Ok(ScalarField { grid, values, coefficients: None })
    }

    pub fn from_fn(grid: Arc<SphereGrid>, f: impl FnMut(&[f64; 3]) -> f64) -> Self {
        let values = grid.nodes().iter().map(f).collect();
        ScalarField { grid, values, coefficients: None }
    }

    /// Field synthesized from coefficients; keeps the spectrum.
    pub fn from_coefficients(grid: Arc<SphereGrid>, coefficients: Coefficients) -> Result<Self> {
        let values = synthesize(&grid, &coefficients)?;
        Ok(ScalarField { grid, values, coefficients: Some(coefficients) })
    }

    /// Attach a spectrum computed by analysis up to `degree`.
    pub fn with_analysis(mut self, degree: usize) -> Result<Self> {
        self.coefficients = Some(analyze(&self.grid, &self.values, degree)?);
        Ok(self)
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coefficients(&self) -> Option<&Coefficients> {
        self.coefficients.as_ref()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `sqrt(int field^2 dsigma)`.
    pub fn l2_norm(&self) -> f64 {
        self.grid.integrate_fn_indexed(|i| self.values[i] * self.values[i]).sqrt()
    }
}

impl SphereGrid {
    pub(crate) fn integrate_fn_indexed(&self, mut f: impl FnMut(usize) -> f64) -> f64 {
        self.weights.iter().enumerate().map(|(i, w)| w * f(i)).sum()
    }
}

/// Quadrature of a field living on `grid`.
pub fn integrate(grid: &SphereGrid, field: &ScalarField) -> Result<f64> {
    if field.grid.as_ref() != grid {
        return Err(GeometryError::GridMismatch);
    }
    Ok(grid.integrate_values(&field.values))
}

/// Covariant Hessian of a scalar field in the node tangent frames:
/// `[H_11, H_12, H_22]` per node (only `H_11` is meaningful on S^1).
#[derive(Debug, Clone)]
pub struct HessianField {
    grid: Arc<SphereGrid>,
    entries: Vec<[f64; 3]>,
}

impl HessianField {
    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn entries(&self) -> &[[f64; 3]] {
        &self.entries
    }

    /// Entry `(a, b)` at node `i`; symmetric by construction.
    pub fn get(&self, i: usize, a: usize, b: usize) -> f64 {
        let e = &self.entries[i];
        match (a, b) {
            (0, 0) => e[0],
            (1, 1) => e[2],
            _ => e[1],
        }
    }
}

/// Covariant Hessian of a field with a spectral representation.
pub fn covariant_hessian(field: &ScalarField) -> Result<HessianField> {
    let coeffs = field.coefficients.as_ref().ok_or(GeometryError::MissingSpectrum)?;
    let jets = synthesize_jets(&field.grid, coeffs)?;
    Ok(HessianField { grid: field.grid.clone(), entries: jets.hessian })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_grid_weights() {
        let grid = make_grid(Resolution::Circle { nodes: 256 }).unwrap();
        for w in grid.weights() {
            assert_eq!(*w, 2.0 * PI / 256.0);
        }
        assert!((grid.weights().iter().sum::<f64>() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn sphere_grid_invariants() {
        let grid = make_grid(Resolution::Sphere { rings: 32, longitudes: 64 }).unwrap();
        assert!((grid.weights().iter().sum::<f64>() - 4.0 * PI).abs() < 1e-10);
        for (i, u) in grid.nodes().iter().enumerate() {
            assert!((dot(u, u).sqrt() - 1.0).abs() < 1e-14);
            let v = grid.nodes()[grid.antipode(i)];
            for k in 0..3 {
                assert_eq!(u[k], -v[k]);
            }
            assert_eq!(grid.weights()[i], grid.weights()[grid.antipode(i)]);
        }
    }

    #[test]
    fn resolution_errors() {
        assert!(matches!(
            make_grid(Resolution::Sphere { rings: 7, longitudes: 14 }),
            Err(GeometryError::ResolutionTooLow { .. })
        ));
        assert!(matches!(make_grid(Resolution::Circle { nodes: 257 }), Err(GeometryError::OddResolution { .. })));
        assert!(matches!(make_grid(Resolution::Circle { nodes: 8 }), Err(GeometryError::ResolutionTooLow { .. })));
        assert!(matches!(
            make_grid(Resolution::Sphere { rings: 16, longitudes: 33 }),
            Err(GeometryError::OddResolution { .. })
        ));
        assert!(matches!(Resolution::default_for(4), Err(GeometryError::UnsupportedDimension(4))));
    }

    #[test]
    fn coefficient_layout() {
        let c = Coefficients::from_vec(3, vec![0.0; 16]).unwrap();
        assert_eq!(c.degree(), 3);
        assert_eq!(c.index(2, -2), 4);
        assert_eq!(c.index(1, 1), 3);
        assert!(Coefficients::from_vec(3, vec![0.0; 15]).is_err());
        let c = Coefficients::from_vec(2, vec![0.0; 7]).unwrap();
        assert_eq!(c.degree(), 3);
        assert_eq!(c.index(3, 0), 5);
        assert_eq!(c.index(3, -1), 6);
        assert_eq!(c.degree_of(6), 3);
        assert_eq!(c.degree_of(1), 1);
        assert!(Coefficients::from_vec(2, vec![0.0; 6]).is_err());
    }

    #[test]
    fn linear_part_round_trip() {
        for dim in [2, 3] {
            let x = [0.3, -0.2, 0.7];
            let c = Coefficients::linear(dim, &x).unwrap();
            let back = c.linear_part();
            for k in 0..dim {
                assert!((back[k] - x[k]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn integrate_checks_grid() {
        let a = make_grid(Resolution::Circle { nodes: 32 }).unwrap();
        let b = make_grid(Resolution::Circle { nodes: 64 }).unwrap();
        let field = ScalarField::from_fn(b.clone(), |_| 1.0);
        assert_eq!(integrate(&a, &field), Err(GeometryError::GridMismatch));
        assert!((integrate(&b, &field).unwrap() - 2.0 * PI).abs() < 1e-13);
    }
}
