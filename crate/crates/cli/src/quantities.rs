//! Named scalar quantities shared by `eval` and `sweep`.

use lpcurv::body::{banach_mazur_to_ball, l2_distance, relative_asymmetry_to_ball, ConvexBody};
use lpcurv::generators::ball;
use lpcurv::lp::{centro_affine_extremes, lp_ratio, width};
use lpcurv::{GeometryError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Volume,
    Diameter,
    Ratio,
    Width,
    Santalo,
    CentroAffine,
    Delta2,
    Delta2Best,
    Delta2Radius,
    Asymmetry,
    BanachMazur,
}

pub const NAMES: &[&str] =
    &["volume", "diameter", "Rp", "Ep", "santalo", "H", "delta2", "delta2_best", "delta2_r", "asymmetry", "dbm"];

impl Quantity {
    pub fn parse(name: &str) -> Option<Self> {
        use Quantity::*;
        Some(match name.to_ascii_lowercase().as_str() {
            "volume" => Volume,
            "diameter" => Diameter,
            "rp" => Ratio,
            "ep" => Width,
            "santalo" => Santalo,
            "h" => CentroAffine,
            "delta2" => Delta2,
            "delta2_best" => Delta2Best,
            "delta2_r" => Delta2Radius,
            "asymmetry" => Asymmetry,
            "dbm" => BanachMazur,
            _ => return None,
        })
    }

    pub fn needs_p(self) -> bool {
        matches!(self, Quantity::Ratio | Quantity::Width)
    }

    /// Column names, in the order [`Quantity::evaluate`] returns values.
    pub fn columns(self, ps: &[f64], n: usize) -> Vec<String> {
        match self {
            Quantity::Volume => vec!["volume".into()],
            Quantity::Diameter => vec!["diameter".into()],
            Quantity::Ratio => ps.iter().map(|p| format!("Rp(p={p})")).collect(),
            Quantity::Width => ps
                .iter()
                .flat_map(|p| {
                    std::iter::once(format!("Ep(p={p})")).chain((0..n).map(move |i| format!("e_p(p={p})[{i}]")))
                })
                .collect(),
            Quantity::Santalo => {
                (0..n).map(|i| format!("santalo[{i}]")).chain(std::iter::once("polar_volume".into())).collect()
            }
            Quantity::CentroAffine => vec!["H_min".into(), "H_max".into()],
            Quantity::Delta2 => vec!["delta2".into()],
            Quantity::Delta2Best => vec!["delta2_best".into()],
            Quantity::Delta2Radius => vec!["delta2_r".into(), "r".into()],
            Quantity::Asymmetry => vec!["asymmetry".into()],
            Quantity::BanachMazur => vec!["dbm".into()],
        }
    }

    pub fn evaluate(self, k: &ConvexBody, ps: &[f64]) -> Result<Vec<f64>> {
        let grid = k.grid();
        let omega = grid.total_measure();
        let h = k.support();
        Ok(match self {
            Quantity::Volume => vec![k.volume()],
            Quantity::Diameter => vec![k.diameter()],
            Quantity::Ratio => ps.iter().map(|&p| lp_ratio(k, p)).collect(),
            Quantity::Width => {
                let mut out = Vec::new();
                for &p in ps {
                    let w = width(k, p)?;
                    out.push(w.value);
                    out.extend(w.point);
                }
                out
            }
            Quantity::Santalo => {
                let s = k.santalo_point()?;
                let mut out = s.translation;
                out.push(s.value);
                out
            }
            Quantity::CentroAffine => {
                let (lo, hi) = centro_affine_extremes(k);
                vec![lo, hi]
            }
            Quantity::Delta2 => vec![l2_distance(k, &ball(grid.clone(), 1.0)?)?],
            Quantity::Delta2Best => {
                // the closest ball removes the degree 0 and 1 parts of h
                let n = k.dim();
                let nodes = grid.nodes();
                let mean = grid.integrate_values(h) / omega;
                let mut x = [0.0; 3];
                for (a, xa) in x.iter_mut().enumerate().take(n) {
                    let moment: Vec<f64> = h.iter().zip(nodes).map(|(hi, u)| hi * u[a]).collect();
                    *xa = grid.integrate_values(&moment) * n as f64 / omega;
                }
                let sq: Vec<f64> = h
                    .iter()
                    .zip(nodes)
                    .map(|(hi, u)| (hi - mean - (x[0] * u[0] + x[1] * u[1] + x[2] * u[2])).powi(2))
                    .collect();
                vec![(grid.integrate_values(&sq) / omega).sqrt()]
            }
            Quantity::Delta2Radius => {
                let t = k.normalize_volume()?;
                let th = t.support();
                let inv: Vec<f64> = th.iter().map(|v| v.powi(-2)).collect();
                let r = (grid.integrate_values(&inv) / omega).powf(-0.5);
                let sq: Vec<f64> = th.iter().map(|v| (v - r).powi(2)).collect();
                vec![(grid.integrate_values(&sq) / omega).sqrt(), r]
            }
            Quantity::Asymmetry => vec![relative_asymmetry_to_ball(k)?.value],
            Quantity::BanachMazur => vec![banach_mazur_to_ball(k)?.value],
        })
    }
}

/// Parses names, reporting the first unknown one.
pub fn parse_all(names: &[String]) -> std::result::Result<Vec<Quantity>, String> {
    names
        .iter()
        .map(|n| {
            Quantity::parse(n)
                .ok_or_else(|| format!("unknown quantity `{n}`; expected one of {}", NAMES.join(", ")))
        })
        .collect()
}

/// Exponents must lie in `[-n, inf)` and be present when a quantity needs them.
pub fn check_exponents(quantities: &[Quantity], ps: &[f64], n: usize) -> std::result::Result<(), String> {
    if let Some(p) = ps.iter().find(|p| !p.is_finite() || **p < -(n as f64)) {
        return Err(GeometryError::InvalidExponent { p: *p, min: -(n as f64) }.to_string());
    }
    if ps.is_empty() && quantities.iter().any(|q| q.needs_p()) {
        return Err("quantities Rp and Ep need at least one --p value".into());
    }
    Ok(())
}
