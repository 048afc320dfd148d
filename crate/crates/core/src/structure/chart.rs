//! Transitions between adapted charts.
//!
//! Adapted charts are related by maps of gradient form
//! `x~^a = x~^a(x^b)`, `x~^n = x~^n(x^b, x^n)`. Admissible components then
//! transform with the `(n-1) x (n-1)` blocks only:
//!
//! ```text
//! t~^{a~..}_{b~..} = B^{a~}_a .. t^{a..}_{b..} .. A^b_{b~}
//! ```
//!
//! with `B = d x~ / d x` and `A = d x / d x~` restricted to admissible indices.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::expr::{EvalError, Expr};
use crate::tensor::{contract_slot, Tensor};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ChartError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("chart map components have inconsistent lengths")]
    Shape,
    #[error("admissible Jacobian block is singular at {point:?}")]
    SingularJacobian { point: Vec<f64> },
    #[error("map is not of gradient form: d x~^{index} / d x^n = {value} at {point:?}")]
    NotGradient {
        index: usize,
        value: f64,
        point: Vec<f64>,
    },
    #[error("inverse does not undo forward map at {point:?} (error {error})")]
    NotInverse { point: Vec<f64>, error: f64 },
}

/// Forward and inverse transition maps between two adapted charts.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartMap {
    /// `x~^alpha` as expressions in the old coordinates.
    pub forward: Vec<Expr>,
    /// `x^alpha` as expressions in the new coordinates.
    pub inverse: Vec<Expr>,
}

/// Jacobian data of a chart map at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobianBlocks {
    /// Image of the point in the new chart.
    pub image: Vec<f64>,
    /// `d x~^a / d x^b`, admissible block.
    pub forward: DMatrix<f64>,
    /// `d x^a / d x~^b`, admissible block, evaluated at the image.
    pub inverse: DMatrix<f64>,
    /// `d x~^n / d x^n`; relates `d_n` and `d_n~` by `d_n = factor * d_n~`.
    pub reeb_factor: f64,
    /// Full inverse Jacobian `d x^alpha / d x~^beta`.
    pub inverse_full: DMatrix<f64>,
}

impl ChartMap {
    pub fn new(forward: Vec<Expr>, inverse: Vec<Expr>) -> Result<Self, ChartError> {
        if forward.is_empty() || forward.len() != inverse.len() {
            return Err(ChartError::Shape);
        }
        Ok(Self { forward, inverse })
    }

    pub fn identity(n: usize) -> Self {
        let id: Vec<Expr> = (0..n).map(Expr::var).collect();
        Self {
            forward: id.clone(),
            inverse: id,
        }
    }

    pub fn dim(&self) -> usize {
        self.forward.len()
    }

    pub fn apply(&self, p: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.forward.iter().map(|e| e.eval(p)).collect()
    }

    pub fn apply_inverse(&self, q: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.inverse.iter().map(|e| e.eval(q)).collect()
    }

    /// Check gradient form and `inverse(forward(p)) = p` within `tolerance`,
    /// and return the Jacobian blocks at `p`.
    pub fn jacobian_blocks(&self, p: &[f64], tolerance: f64) -> Result<JacobianBlocks, ChartError> {
        let n = self.dim();
        if p.len() != n {
            return Err(ChartError::Shape);
        }
        let m = n - 1;
        let fwd: Vec<_> = self
            .forward
            .iter()
            .map(|e| e.eval_jet(p))
            .collect::<Result<_, _>>()?;
        for (index, jet) in fwd.iter().enumerate().take(m) {
            let value = jet.gradient[n - 1];
            if value.abs() > tolerance {
                return Err(ChartError::NotGradient {
                    index: index + 1,
                    value,
                    point: p.to_vec(),
                });
            }
        }
        let image: Vec<f64> = fwd.iter().map(|j| j.value).collect();
        let inv: Vec<_> = self
            .inverse
            .iter()
            .map(|e| e.eval_jet(&image))
            .collect::<Result<_, _>>()?;
        let error = inv
            .iter()
            .zip(p)
            .fold(0.0f64, |m, (j, x)| m.max((j.value - x).abs()));
        if error > tolerance {
            return Err(ChartError::NotInverse {
                point: p.to_vec(),
                error,
            });
        }
        let forward = DMatrix::from_fn(m, m, |a, b| fwd[a].gradient[b]);
        let inverse = DMatrix::from_fn(m, m, |a, b| inv[a].gradient[b]);
        let inverse_full = DMatrix::from_fn(n, n, |a, b| inv[a].gradient[b]);
        let det = forward.determinant();
        if det == 0.0 || !det.is_finite() || inverse.determinant() == 0.0 {
            return Err(ChartError::SingularJacobian { point: p.to_vec() });
        }
        Ok(JacobianBlocks {
            image,
            forward,
            inverse,
            reeb_factor: fwd[n - 1].gradient[n - 1],
            inverse_full,
        })
    }

    /// Pull back a full (non-admissible) covector: `w~_beta = w_alpha d x^alpha / d x~^beta`.
    pub fn pullback_covector(&self, w: &[f64], p: &[f64]) -> Result<Vec<f64>, ChartError> {
        let blocks = self.jacobian_blocks(p, DEFAULT_CHART_TOLERANCE)?;
        let n = self.dim();
        Ok((0..n)
            .map(|b| (0..n).map(|a| w[a] * blocks.inverse_full[(a, b)]).sum())
            .collect())
    }
}

/// Tolerance for the gradient-form and inverse checks.
pub const DEFAULT_CHART_TOLERANCE: f64 = 1e-9;

/// Components of an admissible tensor in the new chart; `t` holds the
/// components at `p` in the old chart.
pub fn transform_tensor(map: &ChartMap, t: &Tensor, p: &[f64]) -> Result<Tensor, ChartError> {
    let blocks = map.jacobian_blocks(p, DEFAULT_CHART_TOLERANCE)?;
    if t.dim + 1 != map.dim() {
        return Err(ChartError::Shape);
    }
    Ok(transform_with(&blocks, t))
}

pub(crate) fn transform_with(blocks: &JacobianBlocks, t: &Tensor) -> Tensor {
    let rank = t.rank();
    let mut comps = t.components.clone();
    for slot in 0..rank {
        comps = if slot < t.valence.upper {
            contract_slot(&comps, t.dim, rank, slot, |new, old| {
                blocks.forward[(new, old)]
            })
        } else {
            contract_slot(&comps, t.dim, rank, slot, |new, old| {
                blocks.inverse[(old, new)]
            })
        };
    }
    Tensor {
        valence: t.valence,
        dim: t.dim,
        components: comps,
    }
}
