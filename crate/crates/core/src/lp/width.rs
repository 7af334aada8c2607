use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::body::ConvexBody;
use crate::constants::kappa;
use crate::error::{GeometryError, Result};
use crate::optimize::{damped_newton, SecondOrder};
use crate::sphere::dot;

/// `E_p(K)` together with the point `e_p` where it is attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthResult {
    pub p: f64,
    pub value: f64,
    pub point: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// The L_p width. The inner problem over `x` is an infimum for `p >= 1` and
/// `-n <= p < 0`, a supremum for `0 <= p < 1`; `p = 0` uses `log h`.
///
/// For `p = 1` the objective does not depend on `x`, and the Steiner point
/// is returned as `e_1`.
pub fn width(k: &ConvexBody, p: f64) -> Result<WidthResult> {
    let n = k.dim();
    if !p.is_finite() || p < -(n as f64) {
        return Err(GeometryError::InvalidExponent { p, min: -(n as f64) });
    }
    let grid = k.grid();
    let omega = grid.total_measure();
    let h = k.support();
    let nodes = grid.nodes();
    let weights = grid.weights();

    if p == 1.0 {
        let mut s = vec![0.0; n];
        for i in 0..nodes.len() {
            for a in 0..n {
                s[a] += weights[i] * h[i] * nodes[i][a];
            }
        }
        s.iter_mut().for_each(|v| *v /= kappa(n));
        return Ok(WidthResult { p, value: grid.integrate_values(h) / omega, point: s, iterations: 0, converged: true });
    }

    // minimise sign * Phi(x)
    let sign = if p > 0.0 && p < 1.0 || p == 0.0 { -1.0 } else { 1.0 };
    let floor = 1e-6 * k.min_support();
    let oracle = |x: &DVector<f64>| -> Option<SecondOrder> {
        let mut value = 0.0;
        let mut gradient = DVector::zeros(n);
        let mut hessian = DMatrix::zeros(n, n);
        let xp = [x[0], x[1], if n == 3 { x[2] } else { 0.0 }];
        for i in 0..nodes.len() {
            let d = h[i] - dot(&xp, &nodes[i]);
            if d < floor {
                return None;
            }
            let w = weights[i] / omega;
            let (v, d1, d2) = if p == 0.0 {
                (d.ln(), -1.0 / d, -1.0 / (d * d))
            } else {
                let dp = d.powf(p);
                (dp, -p * dp / d, p * (p - 1.0) * dp / (d * d))
            };
            value += w * v;
            let u = &nodes[i];
            for a in 0..n {
                gradient[a] += w * d1 * u[a];
                for b in 0..n {
                    hessian[(a, b)] += w * d2 * u[a] * u[b];
                }
            }
        }
        Some(SecondOrder { value: sign * value, gradient: sign * gradient, hessian: sign * hessian })
    };
    let r = damped_newton(oracle, DVector::zeros(n), 1e-13, 200);
    if !r.value.is_finite() {
        return Err(GeometryError::NotInterior { min: k.min_support() });
    }
    Ok(WidthResult {
        p,
        value: sign * r.value,
        point: r.point.as_slice().to_vec(),
        iterations: r.iterations,
        converged: r.gradient_norm <= 1e-9,
    })
}
