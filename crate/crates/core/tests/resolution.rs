use lpcurv::generators::{default_smoothing, default_suite, BodySpec, Family};
use lpcurv::sphere::Resolution;
use lpcurv::stability::{run_suite, StabilityReport, SuiteConfig};

fn refine(specs: &[BodySpec]) -> Vec<BodySpec> {
    specs
        .iter()
        .map(|s| {
            // cap cuts pick their smoothing from the grid; keep the coarse choice
            let mut s = s.clone();
            if let Family::CapCut { cap_height, smoothing: None } = s.family {
                let smoothing = default_smoothing(s.grid().unwrap(), cap_height);
                s.family = Family::CapCut { cap_height, smoothing };
            }
            let size = Resolution::default_for(s.dimension).unwrap().refined(2).size();
            s.with_resolution(Some(size))
        })
        .collect()
}

fn relative_change(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Largest change of lhs and rhs over the rows that both runs report.
fn worst_changes(coarse: &[StabilityReport], fine: &[StabilityReport]) -> Vec<(f64, String)> {
    assert_eq!(coarse.len(), fine.len());
    let mut out = Vec::new();
    for (a, b) in coarse.iter().zip(fine) {
        assert_eq!((&a.check, a.p), (&b.check, b.p));
        assert!(a.error.is_none() && b.error.is_none(), "{a:?}");
        let change = relative_change(a.lhs, b.lhs).max(relative_change(a.rhs, b.rhs));
        out.push((change, format!("{} {} p={:?}", a.check, a.body, a.p)));
    }
    out.sort_by(|x, y| y.0.total_cmp(&x.0));
    out
}

fn config() -> SuiteConfig {
    SuiteConfig { sln_maps: 2, ..SuiteConfig::default() }
}

#[test]
fn doubling_the_planar_resolution_changes_reports_by_at_most_1e_5() {
    let specs = default_suite(2);
    let coarse = run_suite(&specs, &config());
    let fine = run_suite(&refine(&specs), &config());
    let changes = worst_changes(&coarse, &fine);
    for (c, what) in changes.iter().take(8) {
        eprintln!("{c:.3e} {what}");
    }
    assert!(changes[0].0 <= 1e-5, "{:?}", changes[0]);
}


#[test]
fn doubling_the_spatial_resolution_changes_reports_by_at_most_1e_5() {
    // one body per family; the full spatial suite at twice the resolution is
    // left to the acceptance run's budget
    let suite = default_suite(3);
    let specs: Vec<BodySpec> = [0, 2, 7, 13, 16].iter().map(|&i| suite[i].clone()).collect();
    let config = SuiteConfig { sln_maps: 0, ..SuiteConfig::default() };
    let coarse = run_suite(&specs, &config);
    let fine = run_suite(&refine(&specs), &config);
    let changes = worst_changes(&coarse, &fine);
    for (c, what) in changes.iter().take(8) {
        eprintln!("{c:.3e} {what}");
    }
    assert!(changes[0].0 <= 1e-5, "{:?}", changes[0]);
}

mod examples {
    use std::sync::Arc;

    use lpcurv::body::{default_grid, ConvexBody};
    use lpcurv::sphere::{make_grid, Coefficients, SphereGrid};
    use lpcurv::stability::*;

    type Check = fn(&Subject) -> lpcurv::Result<Vec<StabilityReport>>;

    fn grids() -> [Arc<SphereGrid>; 2] {
        let coarse = default_grid(2).unwrap();
        let fine = make_grid(coarse.resolution().refined(2)).unwrap();
        [coarse, fine]
    }

    fn trigonometric(grid: Arc<SphereGrid>, terms: &[(usize, f64)]) -> ConvexBody {
        let mut c = Coefficients::constant(2, 1.0).unwrap();
        for &(k, a) in terms {
            c.set(k, 0, a);
        }
        ConvexBody::on_grid(grid, c).unwrap()
    }

    /// `h^4 = 1 + a cos 4 theta`.
    fn quartic(grid: Arc<SphereGrid>, a: f64) -> ConvexBody {
        let band = grid.band_limit();
        ConvexBody::from_support_function(grid, band, |u| (1.0 + a * (4.0 * u[1].atan2(u[0])).cos()).powf(0.25)).unwrap()
    }

    fn agree(build: impl Fn(Arc<SphereGrid>) -> ConvexBody, check: Check) {
        let [coarse, fine] = grids();
        let rows: Vec<Vec<StabilityReport>> = [coarse, fine]
            .into_iter()
            .map(|g| {
                let rows = check(&Subject::new("example", build(g)).unwrap()).unwrap();
                assert!(rows.iter().all(|r| r.pass), "{rows:?}");
                rows
            })
            .collect();
        for (a, b) in rows[0].iter().zip(&rows[1]) {
            for (x, y) in [(a.lhs, b.lhs), (a.rhs, b.rhs)] {
                assert!((x - y).abs() <= 1e-6 * x.abs().max(1.0), "{}: {x} vs {y}", a.check);
            }
        }
    }

    #[test]
    fn gap_example() {
        agree(|g| trigonometric(g, &[(1, 0.05), (3, 0.05)]), |s| {
            let rows = check_entropy_santalo_gap(s, -1.0)?;
            assert!(rows[0].margin > 0.0);
            Ok(rows)
        });
    }

    #[test]
    fn width_upper_example() {
        agree(|g| trigonometric(g, &[(3, 0.1)]), |s| {
            let rows = check_width_upper(s, 1.0, None)?;
            assert!(rows[0].margin > 0.0);
            Ok(rows)
        });
    }

    #[test]
    fn symmetric_chain_example() {
        agree(|g| quartic(g, 0.1), |s| check_symmetric_ratio_chain(s, 0.0));
    }

    #[test]
    fn negative_width_example() {
        agree(|g| quartic(g, 0.1), |s| check_negative_width_stability(s, -1.5));
    }
}
