//! Intrinsic linear connections on the distribution.
//!
//! A connection is given by `nabla_{e_a} e_b = Gamma^c_ab e_c`. Since
//! `P[e_a, e_b] = 0`, the torsion is simply `S^c_ab = Gamma^c_ab - Gamma^c_ba`.
//!
//! The metric connection is the unique symmetric solution of
//! `e_c g_ab - Gamma^d_ca g_db - Gamma^d_cb g_ad = 0`:
//!
//! ```text
//! Gamma^c_ab = 1/2 g^cd (e_a g_bd + e_b g_ad - e_d g_ab)
//! ```
//!
//! The phi-compatible connection subtracts
//!
//! ```text
//! Q(u, v) = 1/4 [ (nabla_{phi v} phi) u + phi((nabla_v phi) u) + 2 phi((nabla_u phi) v) ]
//! ```
//!
//! from the metric connection. Its torsion is `P N_phi / 4` on `D`.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::expr::EvalError;
use crate::frames::frame_gradients;
use crate::structure::{StructureDef, StructureJets};
use crate::tensor::{flat_index, multi_index, Tensor, TensorExpr, Valence};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ConnectionError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("metric is singular at point {point:?}")]
    SingularMetric { point: Vec<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnectionKind {
    /// Symmetric and metric: `nabla g = 0`.
    MetricSymmetric,
    /// Metric connection corrected so that `nabla phi = 0`.
    KnCorrected,
}

/// Connection coefficients at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionData {
    pub kind: ConnectionKind,
    pub dim: usize,
    /// `Gamma^c_ab`, flat `[c][a][b]`.
    pub gamma: Vec<f64>,
}

impl ConnectionData {
    pub fn gamma(&self, c: usize, a: usize, b: usize) -> f64 {
        self.gamma[(c * self.dim + a) * self.dim + b]
    }

    pub fn max_abs(&self) -> f64 {
        self.gamma.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Derivatives of an admissible tensor along `D` and along the Reeb field.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedDerivative {
    /// `nabla_c t`, derivative index placed after the upper indices.
    pub along_distribution: Tensor,
    /// `nabla^1_n t = d_n t`.
    pub along_reeb: Tensor,
}

impl ExtendedDerivative {
    pub fn max_abs(&self) -> f64 {
        self.along_distribution
            .max_abs()
            .max(self.along_reeb.max_abs())
    }
}

pub fn christoffel(def: &StructureDef, p: &[f64]) -> Result<ConnectionData, ConnectionError> {
    christoffel_from_jets(&def.jets_at(p)?)
}

pub fn kn_connection(def: &StructureDef, p: &[f64]) -> Result<ConnectionData, ConnectionError> {
    kn_from_jets(&def.jets_at(p)?)
}

/// Covariant derivative of an admissible tensor of rank at most 2.
///
/// For a `(1,1)` tensor the result is
/// `(nabla_c t)^e_b = e_c t^e_b + Gamma^e_cd t^d_b - Gamma^d_cb t^e_d`,
/// stored at `[e][c][b]`; a `(0,2)` tensor gives `[c][a][b]`.
pub fn covariant_derivative(
    def: &StructureDef,
    conn: &ConnectionData,
    t: &TensorExpr,
    p: &[f64],
) -> Result<Tensor, EvalError> {
    let jets = def.jets_at(p)?;
    let tj = t.jets(p)?;
    let values = Tensor {
        valence: t.valence,
        dim: t.dim,
        components: tj.iter().map(|j| j.value).collect(),
    };
    Ok(covariant_values(
        conn,
        &values,
        &frame_gradients(&jets, &tj),
    ))
}

/// `S^c_ab = Gamma^c_ab - Gamma^c_ba`.
pub fn torsion(conn: &ConnectionData) -> Tensor {
    Tensor::from_fn(Valence::MIXED_12, conn.dim, |i| {
        conn.gamma(i[0], i[1], i[2]) - conn.gamma(i[0], i[2], i[1])
    })
}

/// Covariant derivative along `D` together with `d_n` along the Reeb field.
pub fn extended_derivative(
    def: &StructureDef,
    conn: &ConnectionData,
    t: &TensorExpr,
    p: &[f64],
) -> Result<ExtendedDerivative, EvalError> {
    Ok(ExtendedDerivative {
        along_distribution: covariant_derivative(def, conn, t, p)?,
        along_reeb: crate::frames::dn_tensor(def, t, p)?,
    })
}

pub(crate) fn christoffel_from_jets(j: &StructureJets) -> Result<ConnectionData, ConnectionError> {
    let m = j.rank();
    let g = j.g_matrix();
    let g_inv = invert_metric(&g).ok_or_else(|| ConnectionError::SingularMetric {
        point: j.point.clone(),
    })?;
    let grads = frame_gradients(j, &j.g);
    // e_c g_ab
    let eg = |c: usize, a: usize, b: usize| grads[a * m + b][c];
    let mut lowered = vec![0.0; m * m * m];
    for d in 0..m {
        for a in 0..m {
            for b in 0..m {
                lowered[(d * m + a) * m + b] = 0.5 * (eg(a, b, d) + eg(b, a, d) - eg(d, a, b));
            }
        }
    }
    let mut gamma = vec![0.0; m * m * m];
    for c in 0..m {
        for a in 0..m {
            for b in 0..m {
                gamma[(c * m + a) * m + b] = (0..m)
                    .map(|d| g_inv[(c, d)] * lowered[(d * m + a) * m + b])
                    .sum();
            }
        }
    }
    Ok(ConnectionData {
        kind: ConnectionKind::MetricSymmetric,
        dim: m,
        gamma,
    })
}

fn invert_metric(g: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let det = g.determinant();
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    g.clone().try_inverse()
}

pub(crate) fn kn_from_jets(j: &StructureJets) -> Result<ConnectionData, ConnectionError> {
    let m = j.rank();
    let metric = christoffel_from_jets(j)?;
    let nabla_phi = phi_covariant_from_jets(j, &metric);
    // (nabla_c phi)^e_b
    let dphi = |c: usize, e: usize, b: usize| nabla_phi.get(&[e, c, b]);
    let phi = |a: usize, b: usize| j.phi(a, b);
    let mut gamma = metric.gamma.clone();
    for c in 0..m {
        for a in 0..m {
            for b in 0..m {
                let mut q = 0.0;
                for d in 0..m {
                    q += phi(d, b) * dphi(d, c, a)
                        + phi(c, d) * dphi(b, d, a)
                        + 2.0 * phi(c, d) * dphi(a, d, b);
                }
                gamma[(c * m + a) * m + b] -= 0.25 * q;
            }
        }
    }
    Ok(ConnectionData {
        kind: ConnectionKind::KnCorrected,
        dim: m,
        gamma,
    })
}

/// `nabla phi` at `[e][c][b]`.
pub(crate) fn phi_covariant_from_jets(j: &StructureJets, conn: &ConnectionData) -> Tensor {
    let values = Tensor {
        valence: Valence::ENDOMORPHISM,
        dim: j.rank(),
        components: j.phi.iter().map(|x| x.value).collect(),
    };
    covariant_values(conn, &values, &frame_gradients(j, &j.phi))
}

/// Covariant derivative from component values and their frame derivatives
/// (`grads[k][c] = e_c t_k`).
pub(crate) fn covariant_values(conn: &ConnectionData, t: &Tensor, grads: &[Vec<f64>]) -> Tensor {
    let m = t.dim;
    let (up, low) = (t.valence.upper, t.valence.lower);
    let rank = up + low;
    let mut out = Tensor::zeros(t.valence.with_extra_lower(), m);
    for flat_out in 0..out.components.len() {
        let idx = multi_index(m, rank + 1, flat_out);
        let c = idx[up];
        let base: Vec<usize> = idx[..up].iter().chain(&idx[up + 1..]).copied().collect();
        let mut acc = grads[flat_index(m, &base)][c];
        let mut shifted = base.clone();
        for slot in 0..rank {
            let orig = base[slot];
            for d in 0..m {
                shifted[slot] = d;
                let tv = t.components[flat_index(m, &shifted)];
                if slot < up {
                    acc += conn.gamma(orig, c, d) * tv;
                } else {
                    acc -= conn.gamma(d, c, orig) * tv;
                }
            }
            shifted[slot] = orig;
        }
        out.components[flat_out] = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::structure::builtin;

    #[test]
    fn darboux_is_flat_and_phi_parallel() {
        let d = builtin("darboux_r3").unwrap();
        let p = [0.3, 0.7, 0.1];
        let conn = christoffel(&d, &p).unwrap();
        assert_eq!(conn.max_abs(), 0.0);
        let dphi = covariant_derivative(&d, &conn, &d.phi_tensor(), &p).unwrap();
        assert_eq!(dphi.valence, Valence::MIXED_12);
        assert_eq!(dphi.max_abs(), 0.0);
        assert_eq!(kn_connection(&d, &p).unwrap().max_abs(), 0.0);
        assert_eq!(
            kn_connection(&d, &p).unwrap().kind,
            ConnectionKind::KnCorrected
        );
    }

    #[test]
    fn conformal_metric_is_parallel() {
        let c = builtin("conformal_r3").unwrap();
        for p in [[0.3, 0.7, 0.1], [-0.9, 0.2, 0.8]] {
            let conn = christoffel(&c, &p).unwrap();
            assert!(conn.max_abs() > 0.05);
            let dg = covariant_derivative(&c, &conn, &c.g_tensor(), &p).unwrap();
            assert_eq!(dg.valence, Valence::new(0, 3));
            assert!(dg.max_abs() < 1e-12);
            assert_eq!(torsion(&conn).max_abs(), 0.0);
        }
    }

    #[test]
    fn identity_is_parallel_for_any_connection() {
        let t = builtin("twisted_r3").unwrap();
        let p = [0.1, 0.2, 0.3];
        let id = TensorExpr::new(
            Valence::ENDOMORPHISM,
            2,
            vec![
                Expr::Const(1.0),
                Expr::Const(0.0),
                Expr::Const(0.0),
                Expr::Const(1.0),
            ],
        );
        for conn in [christoffel(&t, &p).unwrap(), kn_connection(&t, &p).unwrap()] {
            let d = covariant_derivative(&t, &conn, &id, &p).unwrap();
            assert!(d.max_abs() < 1e-14);
        }
    }

    #[test]
    fn singular_metric_is_reported() {
        let d = builtin("darboux_r3")
            .unwrap()
            .with_g(vec![Expr::Const(1.0); 4])
            .unwrap();
        assert!(matches!(
            christoffel(&d, &[0.0; 3]),
            Err(ConnectionError::SingularMetric { .. })
        ));
    }

    #[test]
    fn extended_derivative_examples() {
        let p = [0.3, 0.7, 0.1];
        let d = builtin("darboux_r3").unwrap();
        let conn = christoffel(&d, &p).unwrap();
        assert_eq!(
            extended_derivative(&d, &conn, &d.phi_tensor(), &p)
                .unwrap()
                .max_abs(),
            0.0
        );

        let t = builtin("twisted_r3").unwrap();
        let conn = christoffel(&t, &p).unwrap();
        let ext = extended_derivative(&t, &conn, &t.phi_tensor(), &p).unwrap();
        assert_eq!(ext.along_reeb.get(&[0, 0]), 1.0);

        let c = builtin("conformal_r3").unwrap();
        let conn = christoffel(&c, &p).unwrap();
        let ext = extended_derivative(&c, &conn, &c.g_tensor(), &p).unwrap();
        assert!(ext.along_distribution.max_abs() < 1e-12);
        assert!(ext.along_reeb.max_abs() > 0.5);
    }
}
