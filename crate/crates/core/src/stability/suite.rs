use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::checks::*;
use super::{StabilityReport, Subject};
use crate::body::relative_asymmetry_to_ball;
use crate::error::Result;
use crate::generators::{BodySpec, Family};

/// Exponents and options for [`run_suite`].
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    /// Replaces every default exponent list; each check keeps the values in
    /// its own admissible range.
    pub p_grid: Option<Vec<f64>>,
    /// Number of seeded unimodular maps per body.
    pub sln_maps: usize,
    pub sln_seed: u64,
    /// Exponent used by the gradient rows.
    pub gradient_p: f64,
    /// Emit the asymmetry trend rows (one asymmetry solve per body).
    pub asymmetry: bool,
    /// Run the two-point scaling test on harmonic specs of degree >= 3.
    pub gradient_scaling: bool,
    /// Overrides the tolerance of every pass/fail row.
    pub tolerance: Option<f64>,
    /// Worker threads; `None` uses the available parallelism.
    pub threads: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            p_grid: None,
            sln_maps: 10,
            sln_seed: 0x51_2e,
            gradient_p: -1.0,
            asymmetry: true,
            gradient_scaling: true,
            tolerance: None,
            threads: None,
        }
    }
}

struct Exponents {
    gap: Vec<f64>,
    negative: Vec<f64>,
    upper: Vec<f64>,
    symmetric: Vec<f64>,
}

impl SuiteConfig {
    fn exponents(&self, n: usize) -> Exponents {
        let nf = n as f64;
        match &self.p_grid {
            Some(grid) => Exponents {
                gap: grid.iter().copied().filter(|&p| p >= -nf && p < 0.0).collect(),
                negative: grid.iter().copied().filter(|&p| p > -nf && p < 0.0).collect(),
                upper: grid.iter().copied().filter(|&p| p >= 1.0).collect(),
                symmetric: grid.iter().copied().filter(|&p| (0.0..1.0).contains(&p)).collect(),
            },
            None => Exponents {
                gap: vec![-nf + 0.1, -1.5, -1.0, -0.5, -0.1],
                negative: if n == 2 { vec![-1.5, -1.0, -0.5] } else { vec![-2.0, -1.0] },
                upper: vec![1.0, 2.0, 5.0],
                symmetric: vec![0.0, 0.25, 0.5, 0.75],
            },
        }
    }
}

/// `count` seeded maps `exp(X)` with `X` traceless Gaussian of scale 0.15,
/// rescaled to determinant one.
pub fn unimodular_maps(n: usize, count: usize, seed: u64) -> Vec<DMatrix<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 0.15).expect("positive scale");
    (0..count)
        .map(|_| {
            let mut x = DMatrix::from_fn(n, n, |_, _| normal.sample(&mut rng));
            let trace = x.trace() / n as f64;
            for i in 0..n {
                x[(i, i)] -= trace;
            }
            let m = x.exp();
            let det = m.determinant();
            m / det.powf(1.0 / n as f64)
        })
        .collect()
}

fn record(rows: &mut Vec<StabilityReport>, check: &str, label: &str, n: usize, p: Option<f64>, r: Result<Vec<StabilityReport>>) {
    match r {
        Ok(v) => rows.extend(v),
        Err(e) => rows.push(StabilityReport::failure(check, label, n, p, e.to_string())),
    }
}

fn run_body(spec: &BodySpec, config: &SuiteConfig) -> Vec<StabilityReport> {
    let label = spec.label();
    let n = spec.dimension;
    let mut rows = Vec::new();
    let body = match spec.build() {
        Ok(b) => b,
        Err(e) => return vec![StabilityReport::failure("generator", label, n, None, e.to_string())],
    };
    let s = match Subject::new(label.clone(), body) {
        Ok(s) => s,
        Err(e) => return vec![StabilityReport::failure("setup", label, n, None, e.to_string())],
    };
    let ex = config.exponents(n);

    record(&mut rows, "polarization_identity", &label, n, None, check_polarization_identity(&s));
    for &p in &ex.gap {
        record(&mut rows, "entropy_santalo_gap", &label, n, Some(p), check_entropy_santalo_gap(&s, p));
    }
    for &p in &ex.negative {
        record(&mut rows, "negative_width_stability", &label, n, Some(p), check_negative_width_stability(&s, p));
    }
    let asymmetry = if config.asymmetry && !ex.upper.is_empty() {
        match relative_asymmetry_to_ball(s.normalized()) {
            Ok(a) => Some(a.value),
            Err(e) => {
                rows.push(StabilityReport::failure("trend:asymmetry_vs_ratio", &label, n, None, e.to_string()));
                None
            }
        }
    } else {
        None
    };
    for &p in &ex.upper {
        record(&mut rows, "width_upper", &label, n, Some(p), check_width_upper(&s, p, asymmetry));
    }
    if s.is_symmetric() {
        for &p in &ex.symmetric {
            record(&mut rows, "symmetric_ratio_chain", &label, n, Some(p), check_symmetric_ratio_chain(&s, p));
        }
        let inverse = check_inverse_width_stability(&s);
        if let (Family::CapCut { cap_height, .. }, Ok(found)) = (&spec.family, &inverse) {
            if let Some(row) = found.iter().find(|r| r.check == "inverse_width_stability.l2_distance") {
                rows.push(
                    StabilityReport::inequality(
                        "trend:inverse_width_stability.delta_over_cap",
                        &label,
                        n,
                        Some(-1.0),
                        row.lhs / cap_height,
                        0.0,
                        0.0,
                    )
                    .with("cap_height", *cap_height)
                    .with("delta", row.lhs),
                );
            }
        }
        record(&mut rows, "inverse_width_stability", &label, n, Some(-1.0), inverse);
    }
    if n == 2 {
        record(&mut rows, "planar_affine", &label, n, Some(-2.0), check_planar_affine(&s));
    } else {
        rows.push(centro_affine_bracket_trend(&s));
    }
    for map in unimodular_maps(n, config.sln_maps, config.sln_seed) {
        match check_sln_invariance(&s, &map) {
            Ok(v) => rows.extend(v),
            Err(crate::GeometryError::TruncationLostConvexity { min_eigenvalue, tail }) => rows.push(
                StabilityReport::inequality("trend:sln_invariance.skipped", &label, n, None, 0.0, 0.0, 0.0)
                    .with("min_eigenvalue", min_eigenvalue)
                    .with("tail", tail),
            ),
            Err(e) => rows.push(StabilityReport::failure("sln_invariance", &label, n, None, e.to_string())),
        }
    }
    let case = match &spec.family {
        Family::Ball { .. } => EqualityCase::Ball,
        Family::Ellipsoid { .. } => EqualityCase::Ellipsoid,
        _ => EqualityCase::None,
    };
    let p = config.gradient_p;
    record(&mut rows, "gradient", &label, n, Some(p), check_gradient_stationarity(&s, p, case));
    if let Family::Harmonic { eps, degree, .. } = &spec.family {
        if config.gradient_scaling && *degree >= 3 {
            let r = spec.grid().and_then(|g| check_gradient_scaling(g, *degree, *eps, p));
            record(&mut rows, "gradient_scaling", &label, n, Some(p), r);
        }
    }

    if let Some(tol) = config.tolerance {
        rows = rows.into_iter().map(|r| if r.is_trend() { r } else { r.with_tolerance(tol) }).collect();
    }
    rows
}

/// Runs every applicable check on every spec. Bodies are processed in
/// parallel; the output lists specs in input order, and the rows of one
/// spec in a fixed order. Failures become rows with `error` set.
pub fn run_suite(specs: &[BodySpec], config: &SuiteConfig) -> Vec<StabilityReport> {
    let threads = config
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
        .clamp(1, specs.len().max(1));
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Vec<StabilityReport>>>> = Mutex::new(vec![None; specs.len()]);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= specs.len() {
                    break;
                }
                let rows = run_body(&specs[i], config);
                results.lock().expect("no worker panicked")[i] = Some(rows);
            });
        }
    });
    results.into_inner().expect("no worker panicked").into_iter().flatten().flatten().collect()
}
