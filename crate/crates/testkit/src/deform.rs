//! Random structures built from the gallery.

use adapted_geom::expr::Expr;
use adapted_geom::{builtin, StructureDef};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::random::poly;

/// Row-major square matrices of expressions.
pub fn mat_mul(a: &[Expr], b: &[Expr], m: usize) -> Vec<Expr> {
    let mut out = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            out.push((0..m).fold(Expr::constant(0.0), |acc, k| {
                acc + a[i * m + k].clone() * b[k * m + j].clone()
            }));
        }
    }
    out
}

pub fn transpose(a: &[Expr], m: usize) -> Vec<Expr> {
    (0..m * m).map(|k| a[(k % m) * m + k / m].clone()).collect()
}

pub fn identity(m: usize) -> Vec<Expr> {
    (0..m * m)
        .map(|k| Expr::constant(if k / m == k % m { 1.0 } else { 0.0 }))
        .collect()
}

/// Variables a random coefficient may depend on: two admissible
/// coordinates, plus the Reeb coordinate when requested.
fn coefficient_vars(rng: &mut impl Rng, n: usize, reeb_dependent: bool) -> Vec<usize> {
    let mut vars: Vec<usize> = (0..n - 1).collect();
    vars.shuffle(rng);
    vars.truncate(2);
    if reeb_dependent {
        vars.push(n - 1);
    }
    vars
}

/// `phi = phi_0 + scale * random polynomial`, depending on every coordinate.
/// The result is admissible but in general not an almost complex structure;
/// the torsion oracle does not need `phi^2 = -1`.
pub fn perturbed_phi(rng: &mut impl Rng, def: &StructureDef, scale: f64) -> StructureDef {
    let vars: Vec<usize> = (0..def.dim()).collect();
    let phi = def
        .phi()
        .iter()
        .map(|e| e.clone() + poly(rng, &vars, scale))
        .collect();
    def.clone()
        .with_phi(phi)
        .expect("same shape")
        .with_name(format!("{}_perturbed", def.name()))
}

/// Conjugate the constant `phi` of `base` by a random invertible matrix
/// field and average a random metric over `phi`.
///
/// With `A` a product of elementary matrices `I + p E_ij`, whose inverses are
/// `I - p E_ij`, the new `phi = A phi_0 A^-1` still squares to `-1`. The
/// metric `g = (h + phi^T h phi) / 2` with `h = L^T D L` positive definite is
/// then `phi`-compatible.
pub fn compatible_deformation(
    rng: &mut impl Rng,
    base: &StructureDef,
    reeb_dependent: bool,
) -> StructureDef {
    let n = base.dim();
    let m = n - 1;
    let mut a = identity(m);
    let mut a_inv = identity(m);
    for _ in 0..2 {
        let i = rng.gen_range(0..m);
        let j = (i + rng.gen_range(1..m)) % m;
        let vars = coefficient_vars(rng, n, reeb_dependent);
        let p = poly(rng, &vars, 0.4);
        let mut e = identity(m);
        e[i * m + j] = p.clone();
        let mut e_inv = identity(m);
        e_inv[i * m + j] = -p;
        a = mat_mul(&a, &e, m);
        a_inv = mat_mul(&e_inv, &a_inv, m);
    }
    let phi = mat_mul(&mat_mul(&a, base.phi(), m), &a_inv, m);

    let mut l = identity(m);
    let mut d = identity(m);
    for i in 0..m {
        let vars = coefficient_vars(rng, n, reeb_dependent);
        d[i * m + i] = poly(rng, &vars, 0.3).exp();
        if i > 0 {
            let j = rng.gen_range(0..i);
            let vars = coefficient_vars(rng, n, reeb_dependent);
            l[i * m + j] = poly(rng, &vars, 0.3);
        }
    }
    let h = mat_mul(&mat_mul(&transpose(&l, m), &d, m), &l, m);
    let twisted = mat_mul(&mat_mul(&transpose(&phi, m), &h, m), &phi, m);
    let g = h
        .into_iter()
        .zip(twisted)
        .map(|(x, y)| Expr::constant(0.5) * (x + y))
        .collect();
    base.clone()
        .with_phi(phi)
        .and_then(|s| s.with_g(g))
        .expect("same shape")
        .with_name(format!("{}_deformed", base.name()))
}

/// Random contact metric structure over the Darboux contact form in three
/// dimensions.
///
/// `phi = [[a, b], [c, -a]]` with `b = exp(s)`, `c = -(1 + a^2) exp(-s)` has
/// determinant 1 and squares to `-1`; `g = -omega phi` is then symmetric,
/// positive definite, `phi`-compatible and satisfies `g phi = omega`.
pub fn contact_metric_r3(rng: &mut impl Rng, reeb_dependent: bool) -> StructureDef {
    let base = builtin("darboux_r3").expect("gallery member");
    let vars = coefficient_vars(rng, 3, reeb_dependent);
    let a = poly(rng, &vars, 0.5);
    let s = poly(rng, &vars, 0.5);
    let b = s.clone().exp();
    let c = -(Expr::constant(1.0) + a.clone() * a.clone()) * (-s).exp();
    let half = |e: Expr| Expr::constant(0.5) * e;
    let phi = vec![a.clone(), b.clone(), c.clone(), -a.clone()];
    let g = vec![half(-c), half(a.clone()), half(a), half(b)];
    base.with_phi(phi)
        .and_then(|s| s.with_g(g))
        .expect("same shape")
        .with_name("contact_metric_r3")
}

#[cfg(test)]
mod tests {
    use super::*;
    use adapted_geom::{validate, SampleSpec};

    #[test]
    fn deformations_are_valid_structures() {
        let mut rng = crate::rng(7);
        let spec = SampleSpec {
            count: 40,
            ..SampleSpec::default()
        };
        for base in ["darboux_r3", "darboux_r5"] {
            for reeb in [false, true] {
                let def = compatible_deformation(&mut rng, &builtin(base).unwrap(), reeb);
                let report = validate(&def, &spec);
                assert!(report.passed(), "{report:#?}");
            }
        }
        for reeb in [false, true] {
            let report = validate(&contact_metric_r3(&mut rng, reeb), &spec);
            assert!(report.passed(), "{report:#?}");
        }
    }
}
