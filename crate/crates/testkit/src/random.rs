//! Random expressions and points.

use adapted_geom::expr::{Expr, Func};
use rand::Rng;

/// Uniform point in a box.
pub fn point(rng: &mut impl Rng, sample_box: &[[f64; 2]]) -> Vec<f64> {
    sample_box
        .iter()
        .map(|&[lo, hi]| rng.gen_range(lo..hi))
        .collect()
}

/// Polynomial of total degree at most 2 in the listed variables, with
/// coefficients in `[-scale, scale]`.
pub fn poly(rng: &mut impl Rng, vars: &[usize], scale: f64) -> Expr {
    let mut acc = Expr::constant(rng.gen_range(-scale..scale));
    for (k, &i) in vars.iter().enumerate() {
        acc = acc + Expr::constant(rng.gen_range(-scale..scale)) * Expr::var(i);
        for &j in &vars[k..] {
            acc = acc + Expr::constant(rng.gen_range(-scale..scale)) * Expr::var(i) * Expr::var(j);
        }
    }
    acc
}

/// Random expression over `n` variables that is defined and smooth
/// everywhere: divisions, logarithms and roots are guarded by positive
/// denominators and arguments.
pub fn smooth_expr(rng: &mut impl Rng, n: usize, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.7) {
            Expr::var(rng.gen_range(0..n))
        } else {
            Expr::constant(rng.gen_range(-1.5..1.5))
        };
    }
    let sub = |rng: &mut _| smooth_expr(rng, n, depth - 1);
    match rng.gen_range(0..12) {
        0 => sub(rng) + sub(rng),
        1 => sub(rng) - sub(rng),
        2 | 3 => sub(rng) * sub(rng),
        4 => {
            let den = sub(rng);
            sub(rng) / (Expr::constant(1.0) + den.clone() * den)
        }
        5 => sub(rng).powi(rng.gen_range(2..4)),
        6 => Expr::call(Func::Sin, sub(rng)),
        7 => Expr::call(Func::Cos, sub(rng)),
        8 => Expr::call(
            Func::Exp,
            Expr::constant(0.5) * Expr::call(Func::Sin, sub(rng)),
        ),
        9 => Expr::call(
            Func::Log,
            Expr::constant(2.0) + Expr::call(Func::Cos, sub(rng)),
        ),
        10 => {
            let a = sub(rng);
            Expr::call(Func::Sqrt, Expr::constant(1.0) + a.clone() * a)
        }
        _ => Expr::call(
            if rng.gen_bool(0.5) {
                Func::Sinh
            } else {
                Func::Cosh
            },
            Expr::call(Func::Sin, sub(rng)),
        ),
    }
}
