//! Adapted frame `e_a = d_a - Gamma^n_a d_n` with `Gamma^n_a = eta_a`, and
//! the objects built from `eta` alone.
//!
//! Exterior derivative convention used throughout the crate:
//!
//! ```text
//! d eta(X, Y) = 1/2 (X eta(Y) - Y eta(X) - eta([X, Y]))
//! ```
//!
//! With it, `[e_a, e_b] = M^n_ab d_n` and `M^n_ab = 2 omega_ba`, where
//! `omega = d eta` and
//!
//! ```text
//! M^n_ab = e_b Gamma^n_a - e_a Gamma^n_b
//! ```
//!
//! which follows from expanding the bracket of `d_a - eta_a d_n` and
//! `d_b - eta_b d_n`.

use nalgebra::DMatrix;

use crate::expr::{EvalError, Expr};
use crate::jet::Jet2;
use crate::structure::{StructureDef, StructureJets};
use crate::tensor::{Tensor, TensorExpr};

/// Frame objects at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameData {
    /// `Gamma^n_a`, equal to `eta_a`.
    pub gamma_n: Vec<f64>,
    /// `M^n_ab`, skew.
    pub nonholonomicity: DMatrix<f64>,
    /// `omega_ab = d eta(e_a, e_b)`, skew.
    pub omega: DMatrix<f64>,
}

/// `omega` restricted to the distribution, with its determinant.
#[derive(Clone, Debug, PartialEq)]
pub struct Omega {
    pub table: DMatrix<f64>,
    pub determinant: f64,
}

impl Omega {
    /// The standing assumption is that `omega` is nondegenerate on `D`.
    pub fn is_degenerate(&self, tolerance: f64) -> bool {
        self.determinant.abs() < tolerance
    }
}

pub fn frame_data(def: &StructureDef, p: &[f64]) -> Result<FrameData, EvalError> {
    let jets = def.jets_at(p)?;
    Ok(FrameData {
        gamma_n: (0..jets.rank()).map(|a| jets.gamma_n(a)).collect(),
        nonholonomicity: nonholonomicity_from_jets(&jets),
        omega: omega_from_jets(&jets),
    })
}

/// `e_a f` at `p`.
pub fn frame_derivative(
    def: &StructureDef,
    f: &Expr,
    a: usize,
    p: &[f64],
) -> Result<f64, EvalError> {
    assert!(a < def.rank(), "frame index {a} out of range");
    def.check_point(p)?;
    let eta_a = def.eta()[a].eval(p)?;
    let jf = f.eval_jet(p)?;
    Ok(jf.gradient[a] - eta_a * jf.gradient[def.dim() - 1])
}

/// Coefficients of `P(v)` in the basis `e_a`.
///
/// Writing `v = v^a d_a + v^n d_n = v^a e_a + (v^n + eta_a v^a) d_n` shows the
/// coefficients are the first `n - 1` coordinate components.
pub fn project(def: &StructureDef, v: &[f64]) -> Vec<f64> {
    assert_eq!(v.len(), def.dim(), "vector has wrong length");
    v[..def.rank()].to_vec()
}

/// Coordinate components of the admissible vector `v^a e_a` at `p`.
pub fn embed(def: &StructureDef, v: &[f64], p: &[f64]) -> Result<Vec<f64>, EvalError> {
    assert_eq!(v.len(), def.rank(), "admissible vector has wrong length");
    def.check_point(p)?;
    let mut full = v.to_vec();
    let mut vertical = 0.0;
    for (a, va) in v.iter().enumerate() {
        vertical -= def.eta()[a].eval(p)? * va;
    }
    full.push(vertical);
    Ok(full)
}

pub fn nonholonomicity(def: &StructureDef, p: &[f64]) -> Result<DMatrix<f64>, EvalError> {
    Ok(nonholonomicity_from_jets(&def.jets_at(p)?))
}

/// `omega_ab` along the frame path, `-M^n_ab / 2`.
pub fn omega(def: &StructureDef, p: &[f64]) -> Result<Omega, EvalError> {
    let table = omega_from_jets(&def.jets_at(p)?);
    let determinant = table.determinant();
    Ok(Omega { table, determinant })
}

/// `omega_ab` along the coordinate path: `omega_{alpha beta} =
/// (d_alpha eta_beta - d_beta eta_alpha) / 2` contracted with the frame
/// vectors.
pub fn omega_coordinate(def: &StructureDef, p: &[f64]) -> Result<DMatrix<f64>, EvalError> {
    Ok(omega_coordinate_from_jets(&def.jets_at(p)?))
}

/// Componentwise `d_n` of an admissible tensor.
pub fn dn_tensor(def: &StructureDef, t: &TensorExpr, p: &[f64]) -> Result<Tensor, EvalError> {
    def.check_point(p)?;
    let n = def.dim();
    let components = t
        .components
        .iter()
        .map(|e| e.eval_jet(p).map(|j| j.gradient[n - 1]))
        .collect::<Result<_, _>>()?;
    Ok(Tensor {
        valence: t.valence,
        dim: t.dim,
        components,
    })
}

pub(crate) fn nonholonomicity_from_jets(j: &StructureJets) -> DMatrix<f64> {
    let m = j.rank();
    DMatrix::from_fn(m, m, |a, b| {
        j.frame_derivative(&j.eta[a], b) - j.frame_derivative(&j.eta[b], a)
    })
}

pub(crate) fn omega_from_jets(j: &StructureJets) -> DMatrix<f64> {
    nonholonomicity_from_jets(j) * -0.5
}

pub(crate) fn omega_coordinate_from_jets(j: &StructureJets) -> DMatrix<f64> {
    let n = j.dim();
    let m = j.rank();
    let full = DMatrix::from_fn(n, n, |al, be| {
        0.5 * (j.eta[be].gradient[al] - j.eta[al].gradient[be])
    });
    // Columns are frame vectors in coordinates.
    let frame = DMatrix::from_fn(n, m, |al, a| {
        if al == a {
            1.0
        } else if al == n - 1 {
            -j.gamma_n(a)
        } else {
            0.0
        }
    });
    frame.transpose() * full * frame
}

/// `e_c` applied to every jet: `out[k][c] = e_c f_k`.
pub(crate) fn frame_gradients(j: &StructureJets, fs: &[Jet2]) -> Vec<Vec<f64>> {
    fs.iter()
        .map(|f| (0..j.rank()).map(|c| j.frame_derivative(f, c)).collect())
        .collect()
}
