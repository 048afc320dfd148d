//! Central finite differences.

use adapted_geom::expr::{EvalError, Expr};

/// Step for first derivatives; truncation error is `O(h^2)`.
pub const GRADIENT_STEP: f64 = 1e-5;
/// Step for second derivatives, balancing truncation against cancellation.
pub const HESSIAN_STEP: f64 = 1e-4;

pub fn gradient(e: &Expr, p: &[f64]) -> Result<Vec<f64>, EvalError> {
    let h = GRADIENT_STEP;
    (0..p.len())
        .map(|i| {
            Ok((e.eval(&shifted(p, &[(i, h)]))? - e.eval(&shifted(p, &[(i, -h)]))?) / (2.0 * h))
        })
        .collect()
}

/// Row-major Hessian.
pub fn hessian(e: &Expr, p: &[f64]) -> Result<Vec<f64>, EvalError> {
    let h = HESSIAN_STEP;
    let n = p.len();
    let f0 = e.eval(p)?;
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = if i == j {
                (e.eval(&shifted(p, &[(i, h)]))? - 2.0 * f0 + e.eval(&shifted(p, &[(i, -h)]))?)
                    / (h * h)
            } else {
                (e.eval(&shifted(p, &[(i, h), (j, h)]))?
                    - e.eval(&shifted(p, &[(i, h), (j, -h)]))?
                    - e.eval(&shifted(p, &[(i, -h), (j, h)]))?
                    + e.eval(&shifted(p, &[(i, -h), (j, -h)]))?)
                    / (4.0 * h * h)
            };
        }
    }
    Ok(out)
}

fn shifted(p: &[f64], steps: &[(usize, f64)]) -> Vec<f64> {
    let mut q = p.to_vec();
    for &(i, h) in steps {
        q[i] += h;
    }
    q
}
