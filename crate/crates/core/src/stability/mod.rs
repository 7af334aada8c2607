//! Executable checks of the stability inequalities, one report row per
//! sub-inequality.

mod checks;
mod suite;

use std::cell::RefCell;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::body::{ConvexBody, DistanceResult};
use crate::error::Result;
use crate::lp::{lp_ratio, width, WidthResult};

pub use checks::*;
pub use suite::{run_suite, unimodular_maps, SuiteConfig};

/// Default relative slack for inequalities.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Prefix of check names that carry trend data only.
pub const TREND_PREFIX: &str = "trend:";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub check: String,
    pub body: String,
    pub n: usize,
    pub p: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub margin: f64,
    pub pass: bool,
    pub tolerance: f64,
    pub aux: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl StabilityReport {
    /// Row for `lhs <= rhs`, passing when `rhs - lhs >= -tolerance * max(1, |rhs|)`.
    pub fn inequality(
        check: impl Into<String>,
        body: impl Into<String>,
        n: usize,
        p: Option<f64>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        let mut r = StabilityReport {
            check: check.into(),
            body: body.into(),
            n,
            p,
            lhs,
            rhs,
            margin: rhs - lhs,
            pass: false,
            tolerance,
            aux: BTreeMap::new(),
            error: None,
        };
        r.evaluate();
        r
    }

    /// Row for an identity `a = b`, stored as `|a - b| <= 0`.
    pub fn identity(
        check: impl Into<String>,
        body: impl Into<String>,
        n: usize,
        p: Option<f64>,
        a: f64,
        b: f64,
        tolerance: f64,
    ) -> Self {
        Self::inequality(check, body, n, p, (a - b).abs(), 0.0, tolerance).with("lhs_value", a).with("rhs_value", b)
    }

    /// Row recording that a check could not be evaluated.
    pub fn failure(check: impl Into<String>, body: impl Into<String>, n: usize, p: Option<f64>, error: String) -> Self {
        StabilityReport {
            check: check.into(),
            body: body.into(),
            n,
            p,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            pass: false,
            tolerance: 0.0,
            aux: BTreeMap::new(),
            error: Some(error),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.aux.insert(key.to_string(), value);
        self
    }

    pub fn is_trend(&self) -> bool {
        self.check.starts_with(TREND_PREFIX)
    }

    /// Re-evaluate `pass` with another tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        if self.error.is_none() {
            self.tolerance = tolerance;
            self.evaluate();
        }
        self
    }

    fn evaluate(&mut self) {
        self.pass = if self.is_trend() {
            true
        } else {
            self.margin.is_finite() && self.margin >= -self.tolerance * self.rhs.abs().max(1.0)
        };
    }
}

/// True when every non-trend row passes.
pub fn all_pass(reports: &[StabilityReport]) -> bool {
    reports.iter().filter(|r| !r.is_trend()).all(|r| r.pass)
}

/// A body with the quantities most checks share: its volume-normalised
/// dilate `K~`, the Santalo point and diameter of `K~`, and cached widths.
pub struct Subject {
    label: String,
    body: ConvexBody,
    normalized: ConvexBody,
    santalo: DistanceResult,
    diameter: f64,
    widths: RefCell<Vec<WidthResult>>,
    ratios: RefCell<Vec<(f64, f64)>>,
}

impl Subject {
    pub fn new(label: impl Into<String>, body: ConvexBody) -> Result<Self> {
        let normalized = body.normalize_volume()?;
        let santalo = normalized.santalo_point()?;
        let diameter = normalized.diameter();
        Ok(Subject {
            label: label.into(),
            body,
            normalized,
            santalo,
            diameter,
            widths: RefCell::new(Vec::new()),
            ratios: RefCell::new(Vec::new()),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    /// `K~`.
    pub fn normalized(&self) -> &ConvexBody {
        &self.normalized
    }

    /// Santalo point of `K~`.
    pub fn santalo(&self) -> &DistanceResult {
        &self.santalo
    }

    /// `D(K~)`.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn is_symmetric(&self) -> bool {
        self.body.is_origin_symmetric()
    }

    /// `E_p(K~)` and `e_p(K~)`.
    pub fn width(&self, p: f64) -> Result<WidthResult> {
        if let Some(w) = self.widths.borrow().iter().find(|w| w.p == p) {
            return Ok(w.clone());
        }
        let w = width(&self.normalized, p)?;
        self.widths.borrow_mut().push(w.clone());
        Ok(w)
    }

    /// `R_p(K)`.
    pub fn ratio(&self, p: f64) -> f64 {
        if let Some(&(_, r)) = self.ratios.borrow().iter().find(|(q, _)| *q == p) {
            return r;
        }
        let r = lp_ratio(&self.body, p);
        self.ratios.borrow_mut().push((p, r));
        r
    }
}
