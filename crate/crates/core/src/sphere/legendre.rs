//! Gauss-Legendre rules and orthonormal associated Legendre functions.
//!
//! The normalisation is the one of real orthonormal spherical harmonics
//! without the Condon-Shortley phase:
//!
//! `Y_l0 = lambda_l0`, `Y_lm = sqrt(2) lambda_lm cos(m phi)`,
//! `Y_l,-m = sqrt(2) lambda_lm sin(m phi)` for `m > 0`, where
//! `lambda_lm(cos t) = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(cos t)`.

use std::f64::consts::PI;

/// Nodes (descending in `z`, i.e. ascending colatitude) and weights of the
/// `order`-point Gauss-Legendre rule on [-1, 1].
///
/// The rule is built from the upper half and mirrored, so nodes are exactly
/// symmetric: `z[i] == -z[order - 1 - i]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut z = vec![0.0; order];
    let mut w = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(order, x);
        if d != 0.0 {
            dp = d;
        }
        let weight = 2.0 / ((1.0 - x * x) * dp * dp);
        z[i] = x;
        w[i] = weight;
        z[order - 1 - i] = -x;
        w[order - 1 - i] = weight;
    }
    if order % 2 == 1 {
        z[order / 2] = 0.0;
    }
    (z, w)
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if order == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = order as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Packed index of `(l, m)` with `0 <= m <= l`.
#[inline]
pub fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

pub fn tri_len(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Values and colatitude derivatives of `lambda_lm` at one ring.
pub struct RingLegendre {
    pub value: Vec<f64>,
    pub d_theta: Vec<f64>,
    pub d_theta2: Vec<f64>,
}

/// `lambda_lm`, `d/dtheta` and `d^2/dtheta^2` for `l <= degree` at
/// `z = cos(theta)`, `s = sin(theta) > 0`.
pub fn ring_legendre(degree: usize, z: f64, s: f64, derivatives: bool) -> RingLegendre {
    let len = tri_len(degree);
    let mut value = vec![0.0; len];
    let mut mm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=degree {
        if m > 0 {
            let mf = m as f64;
            mm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
        }
        value[tri(m, m)] = mm;
        if m < degree {
            value[tri(m + 1, m)] = z * (2.0 * m as f64 + 3.0).sqrt() * mm;
        }
        for l in (m + 2)..=degree {
            let (a, b) = recurrence(l, m);
            value[tri(l, m)] = a * (z * value[tri(l - 1, m)] - b * value[tri(l - 2, m)]);
        }
    }
    if !derivatives {
        return RingLegendre { value, d_theta: Vec::new(), d_theta2: Vec::new() };
    }
    let mut d_theta = vec![0.0; len];
    let mut d_theta2 = vec![0.0; len];
    let cot = z / s;
    for m in 0..=degree {
        let mf = m as f64;
        for l in m..=degree {
            let lf = l as f64;
            let prev = if l > m { value[tri(l - 1, m)] } else { 0.0 };
            let c = ((2.0 * lf + 1.0) * (lf * lf - mf * mf) / (2.0 * lf - 1.0).max(1.0)).sqrt();
            let v = value[tri(l, m)];
            let dt = (lf * z * v - c * prev) / s;
            d_theta[tri(l, m)] = dt;
            d_theta2[tri(l, m)] = -cot * dt - (lf * (lf + 1.0) - mf * mf / (s * s)) * v;
        }
    }
    RingLegendre { value, d_theta, d_theta2 }
}

#[inline]
fn recurrence(l: usize, m: usize) -> (f64, f64) {
    let lf = l as f64;
    let mf = m as f64;
    let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
    let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
    (a, b)
}

/// Polynomial parts `q_lm(z) = lambda_lm / sin^m` with first and second
/// `z`-derivatives. These are smooth up to the poles, which makes the
/// Cartesian evaluation of harmonics pole-free.
pub struct PolynomialJet {
    pub q: Vec<f64>,
    pub dq: Vec<f64>,
    pub ddq: Vec<f64>,
}

pub fn polynomial_jet(degree: usize, z: f64) -> PolynomialJet {
    polynomial_jet_order(degree, z, true)
}

/// As [`polynomial_jet`]; skips the derivative tables when `derivatives` is false.
pub fn polynomial_jet_order(degree: usize, z: f64, derivatives: bool) -> PolynomialJet {
    let len = tri_len(degree);
    let dlen = if derivatives { len } else { 0 };
    let mut q = vec![0.0; len];
    let mut dq = vec![0.0; dlen];
    let mut ddq = vec![0.0; dlen];
    let mut mm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=degree {
        if m > 0 {
            let mf = m as f64;
            mm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt();
        }
        q[tri(m, m)] = mm;
        if m < degree {
            let c = (2.0 * m as f64 + 3.0).sqrt();
            q[tri(m + 1, m)] = c * z * mm;
            if derivatives {
                dq[tri(m + 1, m)] = c * mm;
            }
        }
        for l in (m + 2)..=degree {
            let (a, b) = recurrence(l, m);
            let (i1, i2) = (tri(l - 1, m), tri(l - 2, m));
            q[tri(l, m)] = a * (z * q[i1] - b * q[i2]);
            if derivatives {
                dq[tri(l, m)] = a * (q[i1] + z * dq[i1] - b * dq[i2]);
                ddq[tri(l, m)] = a * (2.0 * dq[i1] + z * ddq[i1] - b * ddq[i2]);
            }
        }
    }
    PolynomialJet { q, dq, ddq }
}
