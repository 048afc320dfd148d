//! Verdicts and shared report pieces.

use serde::Serialize;

use crate::expr::EvalError;

/// Outcome of a thresholded check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

impl Verdict {
    /// `residual < tol` passes, `residual > 10 tol` fails, anything in
    /// between is too close to call at grid precision.
    pub fn from_residual(residual: f64, tol: f64) -> Verdict {
        if residual < tol {
            Verdict::Pass
        } else if residual > 10.0 * tol {
            Verdict::Fail
        } else {
            Verdict::Indeterminate
        }
    }

    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Pass, Verdict::Pass) => Verdict::Pass,
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            _ => Verdict::Indeterminate,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

/// Grid point where evaluation failed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkippedPoint {
    pub index: usize,
    pub point: Vec<f64>,
    pub reason: String,
}

impl SkippedPoint {
    pub fn new(index: usize, err: &EvalError) -> Self {
        Self {
            index,
            point: err.point.clone(),
            reason: err.kind.to_string(),
        }
    }
}
