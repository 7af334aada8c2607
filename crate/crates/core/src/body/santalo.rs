use nalgebra::{DMatrix, DVector};

use super::{pad, ConvexBody, DistanceResult};
use crate::constants::kappa;
use crate::error::{GeometryError, Result};
use crate::optimize::{damped_newton, SecondOrder};
use crate::sphere::dot;

impl ConvexBody {
    /// Value, gradient and Hessian of `x -> V(K^x)`; `None` outside the body.
    pub(crate) fn polar_volume_jet(&self, x: &DVector<f64>) -> Option<SecondOrder> {
        let n = self.dim();
        let p = pad(x.as_slice());
        let nodes = self.grid.nodes();
        let weights = self.grid.weights();
        let mut value = 0.0;
        let mut gradient = DVector::zeros(n);
        let mut hessian = DMatrix::zeros(n, n);
        for i in 0..nodes.len() {
            let d = self.support[i] - dot(&p, &nodes[i]);
            if d <= 0.0 {
                return None;
            }
            let base = weights[i] * d.powi(-(n as i32));
            value += base;
            let g = base / d;
            let hh = (n as f64 + 1.0) * g / d;
            let u = &nodes[i];
            for a in 0..n {
                gradient[a] += g * u[a];
                for b in 0..n {
                    hessian[(a, b)] += hh * u[a] * u[b];
                }
            }
        }
        Some(SecondOrder { value: value / n as f64, gradient, hessian })
    }

    /// The Santalo point: the unique minimiser of `V(K^x)` over interior `x`.
    /// The value of the result is `V(K^s)`.
    pub fn santalo_point(&self) -> Result<DistanceResult> {
        let n = self.dim();
        let start = DVector::zeros(n);
        let tolerance = 1e-13 * kappa(n);
        let r = damped_newton(|x| self.polar_volume_jet(x), start, tolerance, 200);
        if !r.value.is_finite() {
            return Err(GeometryError::NotInterior { min: self.min_support() });
        }
        Ok(DistanceResult {
            value: r.value,
            translation: r.point.as_slice().to_vec(),
            linear_map: None,
            converged: r.gradient_norm <= 1e-9 * kappa(n),
            iterations: r.iterations,
        })
    }

    /// `V(K) V(K^s)`.
    pub fn volume_product(&self) -> Result<f64> {
        Ok(self.volume() * self.santalo_point()?.value)
    }
}
