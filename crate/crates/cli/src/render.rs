//! Plain-text tables.

use adapted_geom::classify::ClassificationReport;
use adapted_geom::nijenhuis::NijenhuisComponents;
use adapted_geom::structure::ValidationReport;
use adapted_geom::Verdict;

/// Number rounded to 12 significant digits, printed in shortest form, so
/// that `0.5 + 0.7^2` shows as `0.99`.
pub fn num(x: f64) -> String {
    if !x.is_finite() || x == 0.0 {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("float round trip");
    format!("{rounded}")
}

/// Witness column; passing rows show none.
fn witness(verdict: Verdict, p: Option<&[f64]>) -> String {
    match p.filter(|_| verdict != Verdict::Pass) {
        Some(p) => format!(
            "({})",
            p.iter().map(|x| num(*x)).collect::<Vec<_>>().join(", ")
        ),
        None => "-".to_string(),
    }
}

fn residual(r: Option<f64>) -> String {
    r.map_or_else(|| "-".to_string(), |r| format!("{r:.3e}"))
}

fn header(structure: &str, count: usize, seed: u64, tolerance: f64) -> String {
    format!("structure {structure}: {count} grid points, seed {seed}, tolerance {tolerance:e}\n")
}

pub fn validation(report: &ValidationReport) -> String {
    let mut out = header(
        &report.structure,
        report.grid.count,
        report.grid.seed,
        report.tolerance,
    );
    out += &format!(
        "{:<28} {:<14} {:<12} witness\n",
        "check", "verdict", "max residual"
    );
    for c in &report.checks {
        out += &format!(
            "{:<28} {:<14} {:<12} {}\n",
            c.check.as_str(),
            c.verdict.as_str(),
            residual(c.max_residual),
            witness(c.verdict, c.witness_point.as_deref()),
        );
    }
    if !report.skipped_points.is_empty() {
        out += &format!(
            "{} grid points could not be evaluated\n",
            report.skipped_points.len()
        );
    }
    out
}

pub fn classification(report: &ClassificationReport) -> String {
    let mut out = header(
        &report.structure,
        report.grid.count,
        report.grid.seed,
        report.tolerance,
    );
    out += &format!(
        "{:<22} {:<14} {:<12} witness\n",
        "predicate", "verdict", "max residual"
    );
    for r in &report.predicates {
        out += &format!(
            "{:<22} {:<14} {:<12} {}\n",
            r.predicate.as_str(),
            r.verdict.as_str(),
            residual(r.max_residual),
            witness(r.verdict, r.witness_point.as_deref()),
        );
    }
    out
}

/// Square table with 1-based row and column labels.
pub fn matrix(
    title: &str,
    rows: usize,
    cols: usize,
    entry: impl Fn(usize, usize) -> f64,
) -> String {
    let mut out = format!("{title}\n");
    for a in 0..rows {
        let cells: Vec<String> = (0..cols)
            .map(|b| format!("{:>14}", num(entry(a, b))))
            .collect();
        out += &format!("  {:>2} {}\n", a + 1, cells.join(" "));
    }
    out
}

pub fn nijenhuis(n: &NijenhuisComponents, dim: usize) -> String {
    let m = n.dim;
    let mut out = String::new();
    for e in 0..m {
        for a in 0..m {
            for b in a + 1..m {
                out += &format!(
                    "N^{}_{}{} = {}\n",
                    e + 1,
                    a + 1,
                    b + 1,
                    num(n.ne_ab(e, a, b))
                );
            }
        }
    }
    for a in 0..m {
        for b in a + 1..m {
            out += &format!("N^{dim}_{}{} = {}\n", a + 1, b + 1, num(n.nn_ab[(a, b)]));
        }
    }
    for e in 0..m {
        for a in 0..m {
            out += &format!("N^{}_{dim}{} = {}\n", e + 1, a + 1, num(n.ne_na[(e, a)]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn numbers_are_rounded_for_display() {
        assert_eq!(num(0.5 + 0.7 * 0.7), "0.99");
        assert_eq!(num(-0.7), "-0.7");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(1e-20), "0.00000000000000000001");
    }
}
