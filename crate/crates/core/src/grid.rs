//! Deterministic sample grids and max-residual reductions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Grid metadata recorded in reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridInfo {
    pub seed: u64,
    pub count: usize,
    #[serde(rename = "box")]
    pub sample_box: Vec<[f64; 2]>,
}

/// Quasi-uniform points in `sample_box`: a Halton sequence with a
/// seeded random shift modulo 1 per axis.
pub fn sample_points(sample_box: &[[f64; 2]], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bases = first_primes(sample_box.len());
    let shifts: Vec<f64> = sample_box.iter().map(|_| rng.gen::<f64>()).collect();
    (0..count)
        .map(|k| {
            sample_box
                .iter()
                .zip(&bases)
                .zip(&shifts)
                .map(|((&[lo, hi], &base), &shift)| {
                    let u = (radical_inverse(k as u64 + 1, base) + shift).fract();
                    lo + (hi - lo) * u
                })
                .collect()
        })
        .collect()
}

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut acc = 0.0;
    while k > 0 {
        acc += (k % base) as f64 * scale;
        k /= base;
        scale *= inv;
    }
    acc
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut primes: Vec<u64> = Vec::with_capacity(count);
    let mut candidate = 2;
    while primes.len() < count {
        if primes.iter().all(|p| candidate % p != 0) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// Evaluate `f` at every point in parallel; results keep grid order.
pub(crate) fn par_map<T, F>(points: &[Vec<f64>], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[f64]) -> T + Sync + Send,
{
    points.par_iter().map(|p| f(p)).collect()
}

/// Running maximum with the first grid index that attains it.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MaxResidual {
    pub value: f64,
    pub index: Option<usize>,
}

impl MaxResidual {
    pub fn update(&mut self, value: f64, index: usize) {
        if self.index.is_none() || value > self.value || value.is_nan() && !self.value.is_nan() {
            self.value = value;
            self.index = Some(index);
        }
    }

    /// Fold an ordered sequence of optional residuals; `None` entries are
    /// skipped points.
    pub fn over(values: impl IntoIterator<Item = Option<f64>>) -> Self {
        let mut acc = Self::default();
        for (i, v) in values.into_iter().enumerate() {
            if let Some(v) = v {
                acc.update(v, i);
            }
        }
        acc
    }

    pub fn witness<'a>(&self, points: &'a [Vec<f64>]) -> Option<&'a [f64]> {
        self.index.map(|i| points[i].as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_are_deterministic_and_inside_box() {
        let b = [[-1.0, 1.0], [0.0, 2.0], [5.0, 6.0]];
        let a = sample_points(&b, 200, 42);
        assert_eq!(a, sample_points(&b, 200, 42));
        assert_ne!(a, sample_points(&b, 200, 43));
        assert_eq!(a.len(), 200);
        for p in &a {
            for (x, [lo, hi]) in p.iter().zip(b) {
                assert!(*x >= lo && *x < hi);
            }
        }
    }

    #[test]
    fn max_residual_keeps_first_argmax() {
        let m = MaxResidual::over([Some(1.0), None, Some(3.0), Some(3.0), Some(2.0)]);
        assert_eq!(
            m,
            MaxResidual {
                value: 3.0,
                index: Some(2)
            }
        );
        assert_eq!(MaxResidual::over([None, None]).index, None);
    }

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert_eq!(first_primes(5), vec![2, 3, 5, 7, 11]);
    }
}
