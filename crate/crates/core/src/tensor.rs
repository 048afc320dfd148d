//! Admissible tensors: component tables over the adapted frame `e_1..e_{n-1}`.
//!
//! Components are stored flat, upper indices first, then lower indices,
//! row-major. A `(1,1)` tensor `t^a_b` therefore lives at `a * m + b`.

use crate::expr::{EvalError, Expr};
use crate::jet::Jet2;

/// Supported ranks (upper + lower) go up to 3, enough for covariant
/// derivatives of `(1,1)` and `(0,2)` tensors.
pub const MAX_RANK: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Valence {
    pub upper: usize,
    pub lower: usize,
}

impl Valence {
    pub const SCALAR: Valence = Valence::new(0, 0);
    pub const VECTOR: Valence = Valence::new(1, 0);
    pub const FORM: Valence = Valence::new(0, 1);
    pub const ENDOMORPHISM: Valence = Valence::new(1, 1);
    pub const BILINEAR: Valence = Valence::new(0, 2);
    pub const MIXED_12: Valence = Valence::new(1, 2);

    pub const fn new(upper: usize, lower: usize) -> Self {
        Self { upper, lower }
    }

    pub fn rank(self) -> usize {
        self.upper + self.lower
    }

    /// One extra covariant slot, as produced by a covariant derivative.
    pub fn with_extra_lower(self) -> Valence {
        Valence::new(self.upper, self.lower + 1)
    }
}

/// Number of components of a tensor of rank `rank` over dimension `dim`.
pub fn component_count(dim: usize, rank: usize) -> usize {
    dim.pow(rank as u32)
}

/// Flat offset of a multi-index.
pub fn flat_index(dim: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * dim + i)
}

/// Multi-index of a flat offset.
pub fn multi_index(dim: usize, rank: usize, mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for slot in (0..rank).rev() {
        idx[slot] = flat % dim;
        flat /= dim;
    }
    idx
}

/// Point-evaluated admissible tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    pub valence: Valence,
    pub dim: usize,
    pub components: Vec<f64>,
}

impl Tensor {
    pub fn zeros(valence: Valence, dim: usize) -> Self {
        assert!(valence.rank() <= MAX_RANK, "rank above {MAX_RANK}");
        Self {
            valence,
            dim,
            components: vec![0.0; component_count(dim, valence.rank())],
        }
    }

    pub fn from_fn(valence: Valence, dim: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Self::zeros(valence, dim);
        for flat in 0..t.components.len() {
            let idx = multi_index(dim, valence.rank(), flat);
            t.components[flat] = f(&idx);
        }
        t
    }

    pub fn rank(&self) -> usize {
        self.valence.rank()
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.components[flat_index(self.dim, idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let i = flat_index(self.dim, idx);
        self.components[i] = value;
    }

    /// Largest absolute component; 0 for an empty table.
    pub fn max_abs(&self) -> f64 {
        self.components.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Max-norm distance to another tensor of the same shape.
    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        assert_eq!(self.valence, other.valence);
        assert_eq!(self.dim, other.dim);
        self.components
            .iter()
            .zip(&other.components)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn scaled(&self, factor: f64) -> Tensor {
        Tensor {
            valence: self.valence,
            dim: self.dim,
            components: self.components.iter().map(|c| c * factor).collect(),
        }
    }
}

/// Admissible tensor with expression components.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorExpr {
    pub valence: Valence,
    pub dim: usize,
    pub components: Vec<Expr>,
}

impl TensorExpr {
    pub fn new(valence: Valence, dim: usize, components: Vec<Expr>) -> Self {
        assert!(valence.rank() <= MAX_RANK, "rank above {MAX_RANK}");
        assert_eq!(components.len(), component_count(dim, valence.rank()));
        Self {
            valence,
            dim,
            components,
        }
    }

    pub fn eval(&self, p: &[f64]) -> Result<Tensor, EvalError> {
        let components = self
            .components
            .iter()
            .map(|e| e.eval(p))
            .collect::<Result<_, _>>()?;
        Ok(Tensor {
            valence: self.valence,
            dim: self.dim,
            components,
        })
    }

    pub fn jets(&self, p: &[f64]) -> Result<Vec<Jet2>, EvalError> {
        self.components.iter().map(|e| e.eval_jet(p)).collect()
    }
}

/// Contract one slot of a flat component table with a matrix.
///
/// For every multi-index, the entry at `slot` is replaced by
/// `sum_i m(new, i) * old[.., i, ..]`.
pub(crate) fn contract_slot(
    components: &[f64],
    dim: usize,
    rank: usize,
    slot: usize,
    m: impl Fn(usize, usize) -> f64,
) -> Vec<f64> {
    let mut out = vec![0.0; components.len()];
    for (flat, slot_out) in out.iter_mut().enumerate() {
        let mut idx = multi_index(dim, rank, flat);
        let target = idx[slot];
        let mut acc = 0.0;
        for i in 0..dim {
            idx[slot] = i;
            acc += m(target, i) * components[flat_index(dim, &idx)];
        }
        *slot_out = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        for flat in 0..27 {
            let idx = multi_index(3, 3, flat);
            assert_eq!(flat_index(3, &idx), flat);
        }
        assert_eq!(flat_index(4, &[1, 2]), 6);
    }

    #[test]
    fn contraction_with_identity_is_noop() {
        let t = Tensor::from_fn(Valence::MIXED_12, 2, |i| {
            (i[0] * 4 + i[1] * 2 + i[2]) as f64
        });
        for slot in 0..3 {
            let out = contract_slot(&t.components, 2, 3, slot, |a, b| (a == b) as u8 as f64);
            assert_eq!(out, t.components);
        }
    }
}
