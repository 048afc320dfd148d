//! Nijenhuis torsion of `phi` in adapted coordinates.
//!
//! With `N(X, Y) = [phi X, phi Y] + phi^2 [X, Y] - phi [phi X, Y] - phi [X, phi Y]`
//! the nonzero blocks are
//!
//! ```text
//! N^e_ab = phi^c_a e_c phi^e_b - phi^c_b e_c phi^e_a
//!        + phi^e_c e_b phi^c_a - phi^e_d e_a phi^d_b
//! N^n_ab = 2 phi^c_a phi^d_b omega_dc
//! N^e_na = -phi^e_c d_n phi^c_a
//! ```
//!
//! while `N^n_na` and `N^a_nn` vanish identically and are not stored.

use nalgebra::DMatrix;

use crate::expr::EvalError;
use crate::frames::{frame_gradients, omega_from_jets};
use crate::structure::{StructureDef, StructureJets};

#[derive(Clone, Debug, PartialEq)]
pub struct NijenhuisComponents {
    pub dim: usize,
    /// `N^e_ab`, flat `[e][a][b]`.
    pub ne_ab: Vec<f64>,
    /// `N^n_ab`.
    pub nn_ab: DMatrix<f64>,
    /// `N^e_na`, indexed `(e, a)`.
    pub ne_na: DMatrix<f64>,
}

impl NijenhuisComponents {
    pub fn ne_ab(&self, e: usize, a: usize, b: usize) -> f64 {
        self.ne_ab[(e * self.dim + a) * self.dim + b]
    }

    /// Max-norm of the admissible part `P(N_phi)`, carried by `N^e_ab` and
    /// `N^e_na`.
    pub fn projected_norm(&self) -> f64 {
        self.ne_ab
            .iter()
            .fold(self.ne_na.amax(), |m, v| m.max(v.abs()))
    }
}

pub fn nijenhuis(def: &StructureDef, p: &[f64]) -> Result<NijenhuisComponents, EvalError> {
    Ok(nijenhuis_from_jets(&def.jets_at(p)?))
}

/// Max-norm of `P(N_phi)` at `p`; zero exactly where the structure is
/// Hermitian.
pub fn p_nijenhuis_norm(def: &StructureDef, p: &[f64]) -> Result<f64, EvalError> {
    Ok(nijenhuis(def, p)?.projected_norm())
}

/// Max-norm of `N_phi + 2 d eta (x) xi` at `p`.
pub fn normality_residual(def: &StructureDef, p: &[f64]) -> Result<f64, EvalError> {
    Ok(normality_from_jets(&def.jets_at(p)?))
}

/// Max over `a, b` of `|omega(phi e_a, phi e_b) - omega(e_a, e_b)|`.
pub fn omega_invariance_residual(def: &StructureDef, p: &[f64]) -> Result<f64, EvalError> {
    Ok(omega_invariance_from_jets(&def.jets_at(p)?))
}

pub(crate) fn nijenhuis_from_jets(j: &StructureJets) -> NijenhuisComponents {
    let m = j.rank();
    // dphi[c][e*m+b] = e_c phi^e_b
    let grads = frame_gradients(j, &j.phi);
    let e_phi = |c: usize, e: usize, b: usize| grads[e * m + b][c];
    let phi = |a: usize, b: usize| j.phi(a, b);

    let mut ne_ab = vec![0.0; m * m * m];
    for e in 0..m {
        for a in 0..m {
            for b in 0..m {
                let mut acc = 0.0;
                for c in 0..m {
                    acc += phi(c, a) * e_phi(c, e, b) - phi(c, b) * e_phi(c, e, a)
                        + phi(e, c) * e_phi(b, c, a)
                        - phi(e, c) * e_phi(a, c, b);
                }
                ne_ab[(e * m + a) * m + b] = acc;
            }
        }
    }

    let omega = omega_from_jets(j);
    let nn_ab = DMatrix::from_fn(m, m, |a, b| {
        let mut acc = 0.0;
        for c in 0..m {
            for d in 0..m {
                acc += phi(c, a) * phi(d, b) * omega[(d, c)];
            }
        }
        2.0 * acc
    });

    let ne_na = DMatrix::from_fn(m, m, |e, a| {
        -(0..m)
            .map(|c| phi(e, c) * j.reeb_derivative(&j.phi[c * m + a]))
            .sum::<f64>()
    });

    NijenhuisComponents {
        dim: m,
        ne_ab,
        nn_ab,
        ne_na,
    }
}

pub(crate) fn omega_invariance_from_jets(j: &StructureJets) -> f64 {
    let omega = omega_from_jets(j);
    let phi = j.phi_matrix();
    (phi.transpose() * &omega * phi - omega).amax()
}

pub(crate) fn normality_from_jets(j: &StructureJets) -> f64 {
    let n = nijenhuis_from_jets(j);
    let omega = omega_from_jets(j);
    // Vertical block: N^n_ab must equal 2 omega_ba.
    let vertical = (&n.nn_ab - omega.transpose() * 2.0).amax();
    n.projected_norm().max(vertical)
}
