//! Coordinate-free Nijenhuis torsion from brackets of full vector fields.
//!
//! `phi` is extended to the whole tangent space by `phi(xi) = 0`. In
//! coordinates the extension `Phi` has `Phi^a_b = phi^a_b`,
//! `Phi^n_b = -eta_a phi^a_b` and a zero last column. Brackets use exact
//! first derivatives from jets.

use adapted_geom::expr::{EvalError, Expr};
use adapted_geom::StructureDef;

/// Coordinate components of a vector field.
pub type Field = Vec<Expr>;

/// `Phi^alpha_beta`, row-major `n x n`.
pub fn extended_phi(def: &StructureDef) -> Vec<Expr> {
    let n = def.dim();
    let m = n - 1;
    let phi = def.phi();
    let mut out = vec![Expr::constant(0.0); n * n];
    for a in 0..m {
        for b in 0..m {
            out[a * n + b] = phi[a * m + b].clone();
        }
    }
    for b in 0..m {
        let mut acc = Expr::constant(0.0);
        for a in 0..m {
            acc = acc - def.eta()[a].clone() * phi[a * m + b].clone();
        }
        out[m * n + b] = acc;
    }
    out
}

/// `e_a = d_a - eta_a d_n`.
pub fn frame_field(def: &StructureDef, a: usize) -> Field {
    let n = def.dim();
    let mut f = vec![Expr::constant(0.0); n];
    f[a] = Expr::constant(1.0);
    f[n - 1] = -def.eta()[a].clone();
    f
}

/// `xi = d_n`.
pub fn reeb_field(n: usize) -> Field {
    let mut f = vec![Expr::constant(0.0); n];
    f[n - 1] = Expr::constant(1.0);
    f
}

/// `t^alpha_beta X^beta` as a field.
pub fn apply(t: &[Expr], x: &[Expr]) -> Field {
    let n = x.len();
    (0..n)
        .map(|i| {
            (0..n).fold(Expr::constant(0.0), |acc, j| {
                acc + t[i * n + j].clone() * x[j].clone()
            })
        })
        .collect()
}

/// `[X, Y]^alpha = X^beta d_beta Y^alpha - Y^beta d_beta X^alpha` at `p`.
pub fn bracket_at(x: &[Expr], y: &[Expr], p: &[f64]) -> Result<Vec<f64>, EvalError> {
    let n = x.len();
    let xj: Vec<_> = x.iter().map(|e| e.eval_jet(p)).collect::<Result<_, _>>()?;
    let yj: Vec<_> = y.iter().map(|e| e.eval_jet(p)).collect::<Result<_, _>>()?;
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| xj[j].value * yj[i].gradient[j] - yj[j].value * xj[i].gradient[j])
                .sum()
        })
        .collect())
}

fn apply_values(t: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| (0..n).map(|j| t[i * n + j] * v[j]).sum())
        .collect()
}

/// `N(X, Y) = [Phi X, Phi Y] + Phi^2 [X, Y] - Phi [Phi X, Y] - Phi [X, Phi Y]`
/// at `p`, in coordinate components.
pub fn nijenhuis_at(
    def: &StructureDef,
    x: &[Expr],
    y: &[Expr],
    p: &[f64],
) -> Result<Vec<f64>, EvalError> {
    let phi = extended_phi(def);
    let phi_p: Vec<f64> = phi.iter().map(|e| e.eval(p)).collect::<Result<_, _>>()?;
    let (px, py) = (apply(&phi, x), apply(&phi, y));
    let t1 = bracket_at(&px, &py, p)?;
    let t2 = apply_values(&phi_p, &apply_values(&phi_p, &bracket_at(x, y, p)?));
    let t3 = apply_values(&phi_p, &bracket_at(&px, y, p)?);
    let t4 = apply_values(&phi_p, &bracket_at(x, &py, p)?);
    Ok((0..x.len())
        .map(|i| t1[i] + t2[i] - t3[i] - t4[i])
        .collect())
}

/// Frame components of a coordinate vector: the admissible part `P(v)`
/// followed by the coefficient of `d_n` in `v = v^a e_a + v^n' d_n`.
pub fn frame_components(
    def: &StructureDef,
    v: &[f64],
    p: &[f64],
) -> Result<(Vec<f64>, f64), EvalError> {
    let m = def.rank();
    let mut vertical = v[m];
    for a in 0..m {
        vertical += def.eta()[a].eval(p)? * v[a];
    }
    Ok((v[..m].to_vec(), vertical))
}
