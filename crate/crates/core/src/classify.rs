//! Classification predicates over a sample grid, the extended metric on the
//! whole manifold and the K-contact equivalence chain.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::connections::{christoffel_from_jets, phi_covariant_from_jets, ConnectionError};
use crate::expr::EvalError;
use crate::frames::omega_from_jets;
use crate::grid::{par_map, sample_points, GridInfo, MaxResidual};
use crate::jet::Jet2;
use crate::nijenhuis::{nijenhuis_from_jets, normality_from_jets};
use crate::report::{SkippedPoint, Verdict};
use crate::structure::{validate, SampleSpec, StructureDef, StructureJets, ValidationReport};

/// Version of the JSON report layout.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    AlmostContactMetric,
    ContactMetric,
    HermitianAcm,
    Normal,
    Sasakian,
    KContact,
    PhiQuasiIntegrable,
    GQuasiIntegrable,
    PhiIntegrable,
}

impl Predicate {
    pub const ALL: [Predicate; 9] = [
        Predicate::AlmostContactMetric,
        Predicate::ContactMetric,
        Predicate::HermitianAcm,
        Predicate::Normal,
        Predicate::Sasakian,
        Predicate::KContact,
        Predicate::PhiQuasiIntegrable,
        Predicate::GQuasiIntegrable,
        Predicate::PhiIntegrable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Predicate::AlmostContactMetric => "almost_contact_metric",
            Predicate::ContactMetric => "contact_metric",
            Predicate::HermitianAcm => "hermitian_acm",
            Predicate::Normal => "normal",
            Predicate::Sasakian => "sasakian",
            Predicate::KContact => "k_contact",
            Predicate::PhiQuasiIntegrable => "phi_quasi_integrable",
            Predicate::GQuasiIntegrable => "g_quasi_integrable",
            Predicate::PhiIntegrable => "phi_integrable",
        }
    }

    pub fn criterion(self) -> &'static str {
        match self {
            Predicate::AlmostContactMetric => "all structure checks pass on the grid",
            Predicate::ContactMetric => "max |Omega_ab - omega_ab| with Omega_ab = g_ac phi^c_b",
            Predicate::HermitianAcm => "max |P(N_phi)|",
            Predicate::Normal => "max |N_phi + 2 d eta (x) xi|",
            Predicate::Sasakian => "contact_metric and normal",
            Predicate::KContact => {
                "contact_metric and g_quasi_integrable (a contact metric structure is required)"
            }
            Predicate::PhiQuasiIntegrable => "max |d_n phi|",
            Predicate::GQuasiIntegrable => "max |d_n g|",
            Predicate::PhiIntegrable => {
                "max |nabla^1 phi| (metric connection along D, d_n along xi); \
                 effective integrability criterion, no flattening atlas is built"
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredicateRecord {
    pub predicate: Predicate,
    pub verdict: Verdict,
    pub max_residual: Option<f64>,
    pub witness_point: Option<Vec<f64>>,
    pub tolerance: f64,
    pub grid: GridInfo,
    pub criterion: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub structure: String,
    pub tolerance: f64,
    pub grid: GridInfo,
    pub validation: ValidationReport,
    pub predicates: Vec<PredicateRecord>,
    pub skipped_points: Vec<SkippedPoint>,
}

impl ClassificationReport {
    pub fn get(&self, p: Predicate) -> &PredicateRecord {
        self.predicates
            .iter()
            .find(|r| r.predicate == p)
            .expect("every predicate is recorded")
    }

    pub fn verdict(&self, p: Predicate) -> Verdict {
        self.get(p).verdict
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// `Omega_ab = g(e_a, phi e_b) = g_ac phi^c_b`.
pub fn fundamental_form(def: &StructureDef, p: &[f64]) -> Result<DMatrix<f64>, EvalError> {
    let j = def.jets_at(p)?;
    Ok(j.g_matrix() * j.phi_matrix())
}

/// Riemannian metric on the whole manifold in coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedMetric {
    pub table: DMatrix<f64>,
}

impl ExtendedMetric {
    /// `g~(u, v)` for coordinate vectors.
    pub fn apply(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.table.nrows();
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                acc += u[a] * self.table[(a, b)] * v[b];
            }
        }
        acc
    }
}

/// `g~ = g_ab dx^a dx^b + theta^n theta^n`, so `g~(u, xi) = 0` for `u` in
/// `D`, `g~(xi, xi) = 1` and `g~ = g` on `D`.
pub fn extend_metric(def: &StructureDef, p: &[f64]) -> Result<ExtendedMetric, EvalError> {
    let j = def.jets_at(p)?;
    let values = extended_metric_jets(&j);
    let n = j.dim();
    Ok(ExtendedMetric {
        table: DMatrix::from_fn(n, n, |a, b| values[a * n + b].value),
    })
}

fn extended_metric_jets(j: &StructureJets) -> Vec<Jet2> {
    let n = j.dim();
    let m = j.rank();
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let jet = match (a < m, b < m) {
                (true, true) => &j.g[a * m + b] + &(&j.eta[a] * &j.eta[b]),
                (true, false) => j.eta[a].clone(),
                (false, true) => j.eta[b].clone(),
                (false, false) => Jet2::constant(1.0, n),
            };
            out.push(jet);
        }
    }
    out
}

/// One link of the K-contact chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainLink {
    pub holds: bool,
    pub max_residual: Option<f64>,
    pub witness_point: Option<Vec<f64>>,
}

/// `L_xi g~ = 0`, `L_xi g = 0` and `d_n g = 0` evaluated independently.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KContactChain {
    pub lie_extended_metric: ChainLink,
    pub lie_admissible_metric: ChainLink,
    pub reeb_derivative: ChainLink,
    pub tolerance: f64,
}

impl KContactChain {
    pub fn agrees(&self) -> bool {
        self.lie_extended_metric.holds == self.lie_admissible_metric.holds
            && self.lie_admissible_metric.holds == self.reeb_derivative.holds
    }

    pub fn links(&self) -> [&ChainLink; 3] {
        [
            &self.lie_extended_metric,
            &self.lie_admissible_metric,
            &self.reeb_derivative,
        ]
    }
}

pub fn k_contact_chain(def: &StructureDef, spec: &SampleSpec) -> KContactChain {
    let points = sample_points(def.sample_box(), spec.count, spec.seed);
    let per_point = par_map(&points, |p| def.jets_at(p).map(|j| chain_residuals(&j)));
    let link = |k: usize| {
        let max = MaxResidual::over(per_point.iter().map(|r| r.as_ref().ok().map(|v| v[k])));
        ChainLink {
            holds: max.index.is_some() && max.value <= spec.tolerance,
            max_residual: max.index.map(|_| max.value),
            witness_point: max.witness(&points).map(<[f64]>::to_vec),
        }
    };
    KContactChain {
        lie_extended_metric: link(0),
        lie_admissible_metric: link(1),
        reeb_derivative: link(2),
        tolerance: spec.tolerance,
    }
}

fn chain_residuals(j: &StructureJets) -> [f64; 3] {
    let n = j.dim();
    let m = j.rank();
    let xi: Vec<f64> = (0..n).map(|k| if k == n - 1 { 1.0 } else { 0.0 }).collect();
    // Components of xi are constant, so their derivatives vanish.
    let dxi = DMatrix::<f64>::zeros(n, n);

    // (L_xi g~)_ab = xi^c d_c g~_ab + g~_cb d_a xi^c + g~_ac d_b xi^c
    let gt = extended_metric_jets(j);
    let mut lie_ext = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let mut v: f64 = (0..n).map(|c| xi[c] * gt[a * n + b].gradient[c]).sum();
            for c in 0..n {
                v += gt[c * n + b].value * dxi[(c, a)] + gt[a * n + c].value * dxi[(c, b)];
            }
            lie_ext = lie_ext.max(v.abs());
        }
    }

    // (L_xi g)(e_a, e_b) = xi(g_ab) - g(P[xi, e_a], e_b) - g(e_a, P[xi, e_b])
    // with [xi, e_a]^c = xi^d d_d e_a^c - e_a^d d_d xi^c. The frame vector
    // e_a has constant admissible components, so only d_n eta_a enters, and
    // that lands in the vertical slot removed by P.
    let bracket_p: Vec<Vec<f64>> = (0..m)
        .map(|a| {
            let mut frame_grad = vec![vec![0.0; n]; n];
            frame_grad[n - 1] = j.eta[a].gradient.iter().map(|g| -g).collect();
            (0..m)
                .map(|c| (0..n).map(|d| xi[d] * frame_grad[c][d]).sum::<f64>())
                .collect()
        })
        .collect();
    let mut lie_adm = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            let mut v = j.reeb_derivative(&j.g[a * m + b]);
            for c in 0..m {
                v -= bracket_p[a][c] * j.g(c, b) + j.g(a, c) * bracket_p[b][c];
            }
            lie_adm = lie_adm.max(v.abs());
        }
    }

    let dn_g =
        j.g.iter()
            .fold(0.0f64, |acc, x| acc.max(j.reeb_derivative(x).abs()));
    [lie_ext, lie_adm, dn_g]
}

/// Per-point residuals, one per non-derived predicate.
#[derive(Clone, Copy, Debug)]
struct PointResiduals {
    contact_metric: f64,
    hermitian: f64,
    normal: f64,
    phi_quasi: f64,
    g_quasi: f64,
    phi_integrable: f64,
}

fn point_residuals(j: &StructureJets) -> Result<PointResiduals, ConnectionError> {
    let omega = omega_from_jets(j);
    let big_omega = j.g_matrix() * j.phi_matrix();
    let contact_metric = (big_omega - omega).amax();
    let hermitian = nijenhuis_from_jets(j).projected_norm();
    let normal = normality_from_jets(j);
    let max_dn = |xs: &[Jet2]| {
        xs.iter()
            .fold(0.0f64, |acc, x| acc.max(j.reeb_derivative(x).abs()))
    };
    let phi_quasi = max_dn(&j.phi);
    let g_quasi = max_dn(&j.g);
    let conn = christoffel_from_jets(j)?;
    let nabla_phi = phi_covariant_from_jets(j, &conn).max_abs();
    Ok(PointResiduals {
        contact_metric,
        hermitian,
        normal,
        phi_quasi,
        g_quasi,
        phi_integrable: nabla_phi.max(phi_quasi),
    })
}

/// Evaluate every predicate over the sample grid.
pub fn classify(def: &StructureDef, spec: &SampleSpec) -> ClassificationReport {
    let validation = validate(def, spec);
    let points = sample_points(def.sample_box(), spec.count, spec.seed);
    let tol = spec.tolerance;
    let grid = GridInfo {
        seed: spec.seed,
        count: spec.count,
        sample_box: def.sample_box().to_vec(),
    };

    let per_point = par_map(&points, |p| -> Result<PointResiduals, String> {
        let j = def.jets_at(p).map_err(|e| e.kind.to_string())?;
        point_residuals(&j).map_err(|e| match e {
            ConnectionError::Eval(e) => e.kind.to_string(),
            ConnectionError::SingularMetric { .. } => "metric is singular".to_string(),
        })
    });
    let skipped: Vec<SkippedPoint> = per_point
        .iter()
        .enumerate()
        .filter_map(|(i, r)| {
            r.as_ref().err().map(|reason| SkippedPoint {
                index: i,
                point: points[i].clone(),
                reason: reason.clone(),
            })
        })
        .collect();

    let valid = validation.passed();
    let record = |predicate: Predicate, max: MaxResidual| {
        let verdict = match max.index {
            None => Verdict::Indeterminate,
            Some(_) if !valid => Verdict::Indeterminate,
            Some(_) if !skipped.is_empty() && max.value < tol => Verdict::Indeterminate,
            Some(_) => Verdict::from_residual(max.value, tol),
        };
        PredicateRecord {
            predicate,
            verdict,
            max_residual: max.index.map(|_| max.value),
            witness_point: max.witness(&points).map(<[f64]>::to_vec),
            tolerance: tol,
            grid: grid.clone(),
            criterion: predicate.criterion(),
        }
    };
    let reduce = |f: fn(&PointResiduals) -> f64| {
        MaxResidual::over(per_point.iter().map(|r| r.as_ref().ok().map(f)))
    };

    let contact = record(Predicate::ContactMetric, reduce(|r| r.contact_metric));
    let hermitian = record(Predicate::HermitianAcm, reduce(|r| r.hermitian));
    let normal = record(Predicate::Normal, reduce(|r| r.normal));
    let phi_quasi = record(Predicate::PhiQuasiIntegrable, reduce(|r| r.phi_quasi));
    let g_quasi = record(Predicate::GQuasiIntegrable, reduce(|r| r.g_quasi));
    let phi_int = record(Predicate::PhiIntegrable, reduce(|r| r.phi_integrable));
    let sasakian = conjunction(Predicate::Sasakian, &contact, &normal);
    let k_contact = conjunction(Predicate::KContact, &contact, &g_quasi);

    let acm = {
        let worst = validation
            .checks
            .iter()
            .filter(|c| c.max_residual.is_some())
            .fold(
                None::<&crate::structure::CheckRecord>,
                |best, c| match best {
                    Some(b) if b.max_residual >= c.max_residual => Some(b),
                    _ => Some(c),
                },
            );
        PredicateRecord {
            predicate: Predicate::AlmostContactMetric,
            verdict: if valid {
                Verdict::Pass
            } else if validation
                .failed_checks()
                .any(|c| c.verdict == Verdict::Fail)
            {
                Verdict::Fail
            } else {
                Verdict::Indeterminate
            },
            max_residual: worst.and_then(|c| c.max_residual),
            witness_point: worst.and_then(|c| c.witness_point.clone()),
            tolerance: tol,
            grid: grid.clone(),
            criterion: Predicate::AlmostContactMetric.criterion(),
        }
    };

    ClassificationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        structure: def.name().to_string(),
        tolerance: tol,
        grid,
        validation,
        predicates: vec![
            acm, contact, hermitian, normal, sasakian, k_contact, phi_quasi, g_quasi, phi_int,
        ],
        skipped_points: skipped,
    }
}

fn conjunction(predicate: Predicate, a: &PredicateRecord, b: &PredicateRecord) -> PredicateRecord {
    // Report the residual and witness of the weaker conjunct.
    let worse = if b.verdict == Verdict::Fail && a.verdict != Verdict::Fail {
        b
    } else if a.verdict == Verdict::Fail && b.verdict != Verdict::Fail {
        a
    } else if b.max_residual > a.max_residual {
        b
    } else {
        a
    };
    PredicateRecord {
        predicate,
        verdict: a.verdict.and(b.verdict),
        max_residual: worse.max_residual,
        witness_point: worse.witness_point.clone(),
        tolerance: a.tolerance,
        grid: a.grid.clone(),
        criterion: predicate.criterion(),
    }
}
