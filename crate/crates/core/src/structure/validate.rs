//! Pointwise checks of the structure axioms over a sample grid.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{SampleSpec, StructureDef, StructureJets};
use crate::frames::omega_from_jets;
use crate::grid::{par_map, sample_points, GridInfo, MaxResidual};
use crate::report::{SkippedPoint, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    /// `eta_n = 1`, so that `xi = d_n`.
    EtaNUnit,
    /// `d_n eta_a = 0`.
    EtaReebInvariant,
    /// `phi^a_c phi^c_b = -delta^a_b`.
    PhiSquaredMinusIdentity,
    GSymmetric,
    /// Leading principal minors of `g` positive. Residual is the largest
    /// negative minor, clipped at zero.
    GPositiveDefinite,
    /// `g_cd phi^c_a phi^d_b = g_ab`.
    GPhiCompatible,
    /// `|det omega_ab| >= tolerance`. Residual is the shortfall.
    OmegaNondegenerate,
}

impl CheckName {
    pub const ALL: [CheckName; 7] = [
        CheckName::EtaNUnit,
        CheckName::EtaReebInvariant,
        CheckName::PhiSquaredMinusIdentity,
        CheckName::GSymmetric,
        CheckName::GPositiveDefinite,
        CheckName::GPhiCompatible,
        CheckName::OmegaNondegenerate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::EtaNUnit => "eta_n_unit",
            CheckName::EtaReebInvariant => "eta_reeb_invariant",
            CheckName::PhiSquaredMinusIdentity => "phi_squared_minus_identity",
            CheckName::GSymmetric => "g_symmetric",
            CheckName::GPositiveDefinite => "g_positive_definite",
            CheckName::GPhiCompatible => "g_phi_compatible",
            CheckName::OmegaNondegenerate => "omega_nondegenerate",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            CheckName::EtaNUnit => "eta_n == 1 (Reeb field is d/dx^n)",
            CheckName::EtaReebInvariant => "d_n eta_a == 0",
            CheckName::PhiSquaredMinusIdentity => "phi^2 == -Id on D",
            CheckName::GSymmetric => "g symmetric",
            CheckName::GPositiveDefinite => "g positive definite",
            CheckName::GPhiCompatible => "g(phi u, phi v) == g(u, v)",
            CheckName::OmegaNondegenerate => "omega = d eta nondegenerate on D",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: CheckName,
    pub description: &'static str,
    pub verdict: Verdict,
    pub max_residual: Option<f64>,
    pub witness_point: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub structure: String,
    pub tolerance: f64,
    pub grid: GridInfo,
    pub checks: Vec<CheckRecord>,
    pub skipped_points: Vec<SkippedPoint>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict == Verdict::Pass)
    }

    pub fn check(&self, name: CheckName) -> &CheckRecord {
        self.checks
            .iter()
            .find(|c| c.check == name)
            .expect("every check is recorded")
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.verdict != Verdict::Pass)
    }
}

/// One check at one point: residual and whether the point satisfies it.
#[derive(Clone, Copy, Debug)]
struct PointCheck {
    residual: f64,
    ok: bool,
}

/// Run every axiom check over the sample grid.
pub fn validate(def: &StructureDef, spec: &SampleSpec) -> ValidationReport {
    let points = sample_points(def.sample_box(), spec.count, spec.seed);
    let tol = spec.tolerance;
    let per_point = par_map(&points, |p| def.jets_at(p).map(|j| point_checks(&j, tol)));

    let mut skipped = Vec::new();
    for (i, r) in per_point.iter().enumerate() {
        if let Err(e) = r {
            skipped.push(SkippedPoint::new(i, e));
        }
    }

    let checks = CheckName::ALL
        .iter()
        .enumerate()
        .map(|(k, &name)| {
            let max = MaxResidual::over(
                per_point
                    .iter()
                    .map(|r| r.as_ref().ok().map(|c| c[k].residual)),
            );
            let first_bad = per_point
                .iter()
                .position(|r| matches!(r, Ok(c) if !c[k].ok));
            let verdict = if first_bad.is_some() {
                Verdict::Fail
            } else if !skipped.is_empty() || max.index.is_none() {
                Verdict::Indeterminate
            } else {
                Verdict::Pass
            };
            // For a failure, point at the worst violator.
            let witness = match (verdict, first_bad) {
                (Verdict::Fail, Some(first)) => {
                    let worst = per_point
                        .iter()
                        .enumerate()
                        .filter_map(|(i, r)| match r {
                            Ok(c) if !c[k].ok => Some((i, c[k].residual)),
                            _ => None,
                        })
                        .fold((first, f64::NEG_INFINITY), |best, cur| {
                            if cur.1 > best.1 {
                                cur
                            } else {
                                best
                            }
                        });
                    Some(points[worst.0].clone())
                }
                _ => max.witness(&points).map(<[f64]>::to_vec),
            };
            CheckRecord {
                check: name,
                description: name.description(),
                verdict,
                max_residual: max.index.map(|_| max.value),
                witness_point: witness,
            }
        })
        .collect();

    ValidationReport {
        structure: def.name().to_string(),
        tolerance: tol,
        grid: GridInfo {
            seed: spec.seed,
            count: spec.count,
            sample_box: def.sample_box().to_vec(),
        },
        checks,
        skipped_points: skipped,
    }
}

fn point_checks(j: &StructureJets, tol: f64) -> [PointCheck; 7] {
    let n = j.dim();
    let m = j.rank();
    let eq = |residual: f64| PointCheck {
        residual,
        ok: residual <= tol,
    };

    let eta_n = eq((j.eta[n - 1].value - 1.0).abs());
    let reeb = eq((0..m).fold(0.0, |acc, a| acc.max(j.reeb_derivative(&j.eta[a]).abs())));

    let phi = j.phi_matrix();
    let g = j.g_matrix();
    let id = DMatrix::<f64>::identity(m, m);
    let phi_sq = eq((&phi * &phi + &id).amax());
    let g_sym = eq((&g - g.transpose()).amax());

    let min_minor = (1..=m)
        .map(|k| g.view((0, 0), (k, k)).determinant())
        .fold(f64::INFINITY, f64::min);
    let g_pd = PointCheck {
        residual: (-min_minor).max(0.0),
        ok: min_minor > 0.0,
    };

    let g_compat = eq((phi.transpose() * &g * &phi - &g).amax());

    let det = omega_from_jets(j).determinant().abs();
    let omega = PointCheck {
        residual: (tol - det).max(0.0),
        ok: det >= tol,
    };

    [eta_n, reeb, phi_sq, g_sym, g_pd, g_compat, omega]
}
