//! Closed-form dimension constants, valid for every n >= 1.

use std::f64::consts::PI;

/// Volume of the unit ball in R^n.
pub fn kappa(n: usize) -> f64 {
    // kappa_n = pi^{n/2} / Gamma(n/2 + 1), via the two-step recurrence.
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => kappa(n - 2) * 2.0 * PI / n as f64,
    }
}

/// Surface area of the unit sphere S^{n-1}, omega_n = n kappa_n.
pub fn omega(n: usize) -> f64 {
    n as f64 * kappa(n)
}

/// Constant of the entropy/Santalo point estimate, c0 = 2n / (p (p - 1)).
pub fn entropy_constant(n: usize, p: f64) -> f64 {
    2.0 * n as f64 / (p * (p - 1.0))
}

/// c1 = max{ n / (p + n), -n / p } for p in (-n, 0).
pub fn radial_constant(n: usize, p: f64) -> f64 {
    let n = n as f64;
    (n / (p + n)).max(-n / p)
}

/// The factor 1 + sqrt(4 omega_{n-1} / omega_n) of the diameter bounds.
pub fn diameter_factor(n: usize) -> f64 {
    1.0 + (4.0 * omega(n - 1) / omega(n)).sqrt()
}
