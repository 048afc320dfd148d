//! Random adapted chart changes and a full-dimensional transformation
//! oracle.

use adapted_geom::expr::{EvalError, Expr};
use adapted_geom::structure::ChartMap;
use adapted_geom::{Tensor, TensorExpr};
use nalgebra::DMatrix;
use rand::Rng;

use crate::random::poly;

/// Random triangular map of gradient form with an explicit inverse:
///
/// ```text
/// y^a = c_a x^a + f_a(x^1, .., x^{a-1})
/// y^n = exp(h(x^a)) x^n + f_n(x^a)
/// ```
pub fn random_gradient_map(rng: &mut impl Rng, n: usize) -> ChartMap {
    let m = n - 1;
    let mut forward = Vec::with_capacity(n);
    let mut inverse: Vec<Expr> = Vec::with_capacity(n);
    for a in 0..m {
        let c = rng.gen_range(0.5..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let vars: Vec<usize> = (0..a).collect();
        let f = poly(rng, &vars, 0.5);
        forward.push(Expr::constant(c) * Expr::var(a) + f.clone());
        let back = (Expr::var(a) - f.substitute(&inverse)) / Expr::constant(c);
        inverse.push(back);
    }
    let adm: Vec<usize> = (0..m).collect();
    let h = poly(rng, &adm, 0.3);
    let f = poly(rng, &adm, 0.5);
    forward.push(h.clone().exp() * Expr::var(m) + f.clone());
    let back = (Expr::var(m) - f.substitute(&inverse)) * (-h.substitute(&inverse)).exp();
    inverse.push(back);
    ChartMap::new(forward, inverse).expect("consistent shape")
}

/// Value with its derivative along one direction.
#[derive(Clone, Copy, Debug, Default)]
struct Dual {
    v: f64,
    d: f64,
}

impl Dual {
    fn add(self, o: Dual) -> Dual {
        Dual {
            v: self.v + o.v,
            d: self.d + o.d,
        }
    }

    fn mul(self, o: Dual) -> Dual {
        Dual {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
        }
    }

    fn constant(v: f64) -> Dual {
        Dual { v, d: 0.0 }
    }
}

/// Replace index `slot` (old extent `dims[slot]`) by a new index of extent
/// `new_dim`, summing `coef(new, old) * data[.., old, ..]`.
fn map_slot(
    data: &[Dual],
    dims: &mut [usize],
    slot: usize,
    new_dim: usize,
    coef: impl Fn(usize, usize) -> Dual,
) -> Vec<Dual> {
    let outer: usize = dims[..slot].iter().product();
    let inner: usize = dims[slot + 1..].iter().product();
    let old_dim = dims[slot];
    let mut out = vec![Dual::default(); outer * new_dim * inner];
    for o in 0..outer {
        for new in 0..new_dim {
            for old in 0..old_dim {
                let c = coef(new, old);
                if c.v == 0.0 && c.d == 0.0 {
                    continue;
                }
                for i in 0..inner {
                    let src = data[(o * old_dim + old) * inner + i];
                    let dst = &mut out[(o * new_dim + new) * inner + i];
                    *dst = dst.add(c.mul(src));
                }
            }
        }
    }
    dims[slot] = new_dim;
    out
}

/// Components of the admissible tensor `t` (frame components in the old
/// chart, with contact form `eta`) in the chart `y = map(x)`, together with
/// their `d / d y^n` derivative, both at `map(p)`.
///
/// The tensor is first written out in full coordinates, vectors `e_a` as
/// `d_a - eta_a d_n` and forms extended by zero on `d_n`. It is then moved
/// by the full Jacobian and its inverse, and the admissible block is read
/// off. Derivatives follow by the chain rule along `d x / d y^n`.
pub fn transform_oracle(
    map: &ChartMap,
    t: &TensorExpr,
    eta: &[Expr],
    p: &[f64],
) -> Result<(Tensor, Tensor), EvalError> {
    let n = p.len();
    let m = n - 1;
    let fwd: Vec<_> = map
        .forward
        .iter()
        .map(|e| e.eval_jet(p))
        .collect::<Result<_, _>>()?;
    let jac = DMatrix::from_fn(n, n, |i, j| fwd[i].gradient[j]);
    let jac_inv = jac.clone().try_inverse().expect("invertible chart map");
    let w: Vec<f64> = (0..n).map(|g| jac_inv[(g, n - 1)]).collect();
    let along = |grad: &[f64]| grad.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
    let d_jac = DMatrix::from_fn(n, n, |i, j| along(&fwd[i].hessian[j * n..(j + 1) * n]));
    let d_jac_inv = -(&jac_inv * &d_jac * &jac_inv);
    let jd = |i: usize, j: usize| Dual {
        v: jac[(i, j)],
        d: d_jac[(i, j)],
    };
    let jid = |i: usize, j: usize| Dual {
        v: jac_inv[(i, j)],
        d: d_jac_inv[(i, j)],
    };

    let eta_d: Vec<Dual> = eta
        .iter()
        .map(|e| {
            e.eval_jet(p).map(|j| Dual {
                v: j.value,
                d: along(&j.gradient),
            })
        })
        .collect::<Result<_, _>>()?;
    let mut data: Vec<Dual> = t
        .components
        .iter()
        .map(|e| {
            e.eval_jet(p).map(|j| Dual {
                v: j.value,
                d: along(&j.gradient),
            })
        })
        .collect::<Result<_, _>>()?;

    let (up, rank) = (t.valence.upper, t.valence.rank());
    let mut dims = vec![m; rank];
    for slot in 0..rank {
        data = if slot < up {
            map_slot(&data, &mut dims, slot, n, |alpha, a| {
                if alpha < m {
                    Dual::constant(if alpha == a { 1.0 } else { 0.0 })
                } else {
                    Dual {
                        v: -eta_d[a].v,
                        d: -eta_d[a].d,
                    }
                }
            })
        } else {
            map_slot(&data, &mut dims, slot, n, |beta, b| {
                Dual::constant(if beta == b { 1.0 } else { 0.0 })
            })
        };
    }
    for slot in 0..rank {
        data = if slot < up {
            map_slot(&data, &mut dims, slot, n, jd)
        } else {
            map_slot(&data, &mut dims, slot, n, |new, old| jid(old, new))
        };
    }
    for slot in 0..rank {
        data = map_slot(&data, &mut dims, slot, m, |new, old| {
            Dual::constant(if new == old { 1.0 } else { 0.0 })
        });
    }
    let value = Tensor {
        valence: t.valence,
        dim: m,
        components: data.iter().map(|x| x.v).collect(),
    };
    let derivative = Tensor {
        valence: t.valence,
        dim: m,
        components: data.iter().map(|x| x.d).collect(),
    };
    Ok((value, derivative))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_maps_invert() {
        let mut rng = crate::rng(3);
        for n in [3, 5] {
            let map = random_gradient_map(&mut rng, n);
            let p: Vec<f64> = (0..n).map(|i| 0.1 * i as f64 - 0.2).collect();
            let back = map.apply_inverse(&map.apply(&p).unwrap()).unwrap();
            for (a, b) in back.iter().zip(&p) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
