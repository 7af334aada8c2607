//! Small local optimisers: Nelder-Mead, Brent's 1-D method and a damped
//! Newton iteration for smooth convex objectives on an open domain.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    pub max_evaluations: usize,
    /// Stop when the spread of simplex values falls below this.
    pub value_tolerance: f64,
    /// ... and the simplex diameter falls below this.
    pub point_tolerance: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { max_evaluations: 4000, value_tolerance: 1e-14, point_tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimise `f` from `start` with an axis-aligned initial simplex of edge `step`.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    start: &[f64],
    step: f64,
    options: &SimplexOptions,
) -> SimplexResult {
    let dim = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for k in 0..dim {
        let mut p = start.to_vec();
        p[k] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut evaluations = dim + 1;
    let mut converged = false;

    while evaluations < options.max_evaluations {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[dim] - values[0];
        let size = simplex[1..]
            .iter()
            .map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.abs() <= options.value_tolerance && size <= options.point_tolerance {
            converged = true;
            break;
        }
        if size <= 1e-15 * (1.0 + simplex[0].iter().map(|x| x.abs()).fold(0.0, f64::max)) {
            converged = spread.abs() <= options.value_tolerance.max(1e-12);
            break;
        }

        let mut centroid = vec![0.0; dim];
        for p in &simplex[..dim] {
            for k in 0..dim {
                centroid[k] += p[k] / dim as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> { (0..dim).map(|k| centroid[k] + t * (simplex[dim][k] - centroid[k])).collect() };

        let reflected = along(-1.0);
        let fr = f(&reflected);
        evaluations += 1;
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            evaluations += 1;
            if fe < fr {
                simplex[dim] = expanded;
                values[dim] = fe;
            } else {
                simplex[dim] = reflected;
                values[dim] = fr;
            }
            continue;
        }
        if fr < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[dim] {
            let c = along(-0.5);
            let fc = f(&c);
            (c, fc)
        } else {
            let c = along(0.5);
            let fc = f(&c);
            (c, fc)
        };
        evaluations += 1;
        if fc < values[dim].min(fr) {
            simplex[dim] = contracted;
            values[dim] = fc;
            continue;
        }
        // shrink towards the best vertex
        for i in 1..=dim {
            for k in 0..dim {
                simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
            }
            values[i] = f(&simplex[i]);
        }
        evaluations += dim;
    }
    let best = (0..=dim).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    SimplexResult { point: simplex[best].clone(), value: values[best], evaluations, converged }
}

/// Brent's method for a local minimum of `f` on `[a, b]`.
/// Returns `(argmin, min)`.
pub fn brent_minimize(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64, max_iter: usize) -> (f64, f64) {
    const GOLDEN: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e): (f64, f64) = (0.0, 0.0);
    for _ in 0..max_iter {
        let mid = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-15;
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < mid { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < mid { b - x } else { a - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// Value, gradient and Hessian of a smooth objective.
pub struct SecondOrder {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct NewtonResult {
    pub point: DVector<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Damped Newton minimisation of a convex objective. `oracle` returns
/// `None` outside the open domain; steps are backtracked until they land
/// inside with sufficient decrease.
pub fn damped_newton(
    mut oracle: impl FnMut(&DVector<f64>) -> Option<SecondOrder>,
    start: DVector<f64>,
    gradient_tolerance: f64,
    max_iterations: usize,
) -> NewtonResult {
    let mut x = start;
    let mut current = match oracle(&x) {
        Some(s) => s,
        None => {
            return NewtonResult {
                value: f64::NAN,
                gradient_norm: f64::NAN,
                point: x,
                iterations: 0,
                converged: false,
            }
        }
    };
    for iteration in 0..max_iterations {
        let gnorm = current.gradient.norm();
        if gnorm <= gradient_tolerance {
            return NewtonResult { point: x, value: current.value, gradient_norm: gnorm, iterations: iteration, converged: true };
        }
        let direction = match current.hessian.clone().cholesky() {
            Some(ch) => -ch.solve(&current.gradient),
            None => -current.gradient.clone(),
        };
        let slope = current.gradient.dot(&direction);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = &x + t * &direction;
            if let Some(next) = oracle(&trial) {
                let noise = 1e-14 * current.value.abs().max(1.0);
                let sufficient = next.value <= current.value + 1e-4 * t * slope + noise;
                let still_improving = next.gradient.norm() < gnorm;
                if sufficient && (next.value < current.value || still_improving) {
                    accepted = Some((trial, next));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, next)) => {
                x = trial;
                current = next;
            }
            None => {
                return NewtonResult {
                    point: x,
                    value: current.value,
                    gradient_norm: gnorm,
                    iterations: iteration,
                    converged: false,
                }
            }
        }
    }
    let gnorm = current.gradient.norm();
    NewtonResult {
        point: x,
        value: current.value,
        gradient_norm: gnorm,
        iterations: max_iterations,
        converged: gnorm <= gradient_tolerance,
    }
}
