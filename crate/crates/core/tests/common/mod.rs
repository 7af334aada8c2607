//! Monte-Carlo membership oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use lpcurv::body::ConvexBody;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Monte-Carlo membership oracle built only from evaluations of the support
// function: x lies in K iff max_u (x.u - h(u)) <= 0.
pub struct Oracle<'a> {
    body: &'a ConvexBody,
    n: usize,
    nodes: Vec<[f64; 3]>,
    h: Vec<f64>,
    // a node lies within `spacing` of every direction
    spacing: f64,
    max_radius: f64,
}

impl<'a> Oracle<'a> {
    pub fn new(body: &'a ConvexBody) -> Self {
        let grid = body.grid();
        let n = body.dim();
        let nodes = grid.nodes().to_vec();
        let spacing = if n == 2 {
            PI / nodes.len() as f64
        } else {
            let mut colat: Vec<f64> = nodes.iter().map(|u| u[2].clamp(-1.0, 1.0).acos()).collect();
            colat.sort_by(f64::total_cmp);
            colat.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            let rings = colat.len();
            let lon_half = PI * rings as f64 / nodes.len() as f64;
            let gap = colat.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
            (0.5 * gap).hypot(lon_half).max(colat[0]).max(PI - colat[rings - 1])
        };
        let max_radius = (0..nodes.len())
            .map(|i| {
                let [a, b, c] = body.radii_matrix(i);
                0.5 * (a + c) + (0.25 * (a - c) * (a - c) + b * b).sqrt()
            })
            .fold(0.0, f64::max);
        Oracle { body, n, nodes, h: body.support().to_vec(), spacing, max_radius }
    }

    fn gap(&self, x: &[f64; 3], u: &[f64; 3]) -> f64 {
        x[0] * u[0] + x[1] * u[1] + x[2] * u[2] - self.body.support_at(&u[..self.n]).unwrap()
    }

    pub fn contains(&self, x: &[f64; 3]) -> bool {
        let mut best = f64::NEG_INFINITY;
        let mut at = 0;
        for (i, (u, h)) in self.nodes.iter().zip(&self.h).enumerate() {
            let g = x[0] * u[0] + x[1] * u[1] + x[2] * u[2] - h;
            if g > 0.0 {
                return false;
            }
            if g > best {
                best = g;
                at = i;
            }
        }
        // between nodes the gap exceeds its node maximum by at most this
        let slack = (2.0 * self.max_radius + 1.0 + best.abs()) * self.spacing * self.spacing;
        if best < -slack {
            return true;
        }
        self.refined_gap(x, at) <= 0.0
    }

    fn refined_gap(&self, x: &[f64; 3], at: usize) -> f64 {
        let u0 = self.nodes[at];
        if self.n == 2 {
            let t0 = u0[1].atan2(u0[0]);
            let f = |t: f64| -self.gap(x, &[t.cos(), t.sin(), 0.0]);
            let (mut a, mut b) = (t0 - 2.0 * self.spacing, t0 + 2.0 * self.spacing);
            let r = 0.5 * (5f64.sqrt() - 1.0);
            let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
            let (mut fc, mut fd) = (f(c), f(d));
            while b - a > 1e-10 {
                if fc < fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - r * (b - a);
                    fc = f(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + r * (b - a);
                    fd = f(d);
                }
            }
            -fc.min(fd)
        } else {
            // compass search in a tangent chart around the best node
            let e1 = if u0[2].abs() < 0.9 { cross(&u0, &[0.0, 0.0, 1.0]) } else { cross(&u0, &[1.0, 0.0, 0.0]) };
            let e1 = normalize(&e1);
            let e2 = cross(&u0, &e1);
            let at_chart = |s: f64, t: f64| normalize(&[0, 1, 2].map(|i| u0[i] + s * e1[i] + t * e2[i]));
            let (mut s, mut t) = (0.0, 0.0);
            let mut value = self.gap(x, &u0);
            let mut step = 2.0 * self.spacing;
            while step > 1e-9 {
                let mut moved = false;
                for (ds, dt) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                    let v = self.gap(x, &at_chart(s + ds, t + dt));
                    if v > value {
                        value = v;
                        s += ds;
                        t += dt;
                        moved = true;
                        break;
                    }
                }
                if value > 0.0 {
                    return value;
                }
                if !moved {
                    step *= 0.5;
                }
            }
            value
        }
    }
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(v: &[f64; 3]) -> [f64; 3] {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.map(|x| x / r)
}

pub struct Estimate {
    pub value: f64,
    pub standard_error: f64,
}

impl Estimate {
    fn from_count(hits: usize, samples: usize, box_volume: f64) -> Self {
        let q = hits as f64 / samples as f64;
        Estimate { value: box_volume * q, standard_error: box_volume * (q * (1.0 - q) / samples as f64).sqrt() }
    }

    pub fn agrees(&self, exact: f64) -> bool {
        (exact - self.value).abs() <= 3.0 * self.standard_error
    }
}

/// Volume of `K` and of `K delta r B` from one batch of uniform samples.
pub fn monte_carlo(
    body: &ConvexBody,
    contains: impl Fn(&[f64; 3]) -> bool,
    radius: f64,
    samples: usize,
    seed: u64,
) -> (Estimate, Estimate) {
    let n = body.dim();
    let mut lo = [0.0; 3];
    let mut hi = [0.0; 3];
    for i in 0..n {
        let mut e = [0.0; 3];
        e[i] = 1.0;
        hi[i] = body.support_at(&e[..n]).unwrap().max(radius);
        e[i] = -1.0;
        lo[i] = -body.support_at(&e[..n]).unwrap().max(radius);
    }
    let box_volume: f64 = (0..n).map(|i| hi[i] - lo[i]).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut inside, mut differ) = (0, 0);
    for _ in 0..samples {
        let mut x = [0.0; 3];
        for i in 0..n {
            x[i] = rng.random_range(lo[i]..hi[i]);
        }
        let in_k = contains(&x);
        let in_ball = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] <= radius * radius;
        inside += usize::from(in_k);
        differ += usize::from(in_k != in_ball);
    }
    (Estimate::from_count(inside, samples, box_volume), Estimate::from_count(differ, samples, box_volume))
}
