//! Subcommand implementations.

use std::fs;
use std::io::Write;
use std::path::Path;

use adapted_geom::classify::{extend_metric, Predicate};
use adapted_geom::connections::christoffel;
use adapted_geom::format::{parse_structure_file, StructureFile};
use adapted_geom::frames::omega;
use adapted_geom::nijenhuis::{nijenhuis, normality_residual};
use adapted_geom::structure::BUILTIN_NAMES;
use adapted_geom::{SampleSpec, StructureDef, Verdict};

use crate::{exit, render, Failure, Quantity};

fn load(path: &Path) -> Result<(StructureDef, SampleSpec), Failure> {
    let text = fs::read_to_string(path).map_err(|e| {
        Failure::new(
            exit::NO_INPUT,
            format!("cannot read {}: {e}", path.display()),
        )
    })?;
    parse_structure_file(&text)
        .map_err(|e| Failure::new(exit::DATA, format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| {
        Failure::new(
            exit::CANNOT_WRITE,
            format!("cannot write {}: {e}", path.display()),
        )
    })
}

fn report_failed_checks(report: &adapted_geom::ValidationReport) {
    for c in report.failed_checks() {
        let at = c
            .witness_point
            .as_ref()
            .map(|p| format!(" at {p:?}"))
            .unwrap_or_default();
        eprintln!(
            "validation failed: {} ({}) is {}{}",
            c.check.as_str(),
            c.description,
            c.verdict.as_str(),
            at
        );
    }
}

pub fn validate(path: &Path) -> Result<u8, Failure> {
    let (def, spec) = load(path)?;
    let report = adapted_geom::validate(&def, &spec);
    print!("{}", render::validation(&report));
    if report.passed() {
        Ok(exit::OK)
    } else {
        report_failed_checks(&report);
        Ok(exit::VALIDATION_FAILED)
    }
}

pub fn classify(path: &Path, json: Option<&Path>, strict: bool) -> Result<u8, Failure> {
    let (def, spec) = load(path)?;
    let report = adapted_geom::classify(&def, &spec);
    match json {
        Some(out) if out == Path::new("-") => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(report.to_json().as_bytes()).map_err(|e| {
                Failure::new(exit::CANNOT_WRITE, format!("cannot write report: {e}"))
            })?;
        }
        Some(out) => {
            write_file(out, &report.to_json())?;
            print!("{}", render::classification(&report));
        }
        None => print!("{}", render::classification(&report)),
    }
    if !report.validation.passed() {
        report_failed_checks(&report.validation);
        return Ok(exit::VALIDATION_FAILED);
    }
    let failing: Vec<&str> = Predicate::ALL
        .iter()
        .filter(|p| report.verdict(**p) == Verdict::Fail)
        .map(|p| p.as_str())
        .collect();
    if strict && !failing.is_empty() {
        eprintln!("failing predicates: {}", failing.join(", "));
        return Ok(exit::STRICT_FAIL);
    }
    Ok(exit::OK)
}

pub fn builtin(name: &str, emit: Option<&Path>) -> Result<u8, Failure> {
    let def = adapted_geom::builtin(name).map_err(|_| {
        Failure::new(
            exit::USAGE,
            format!(
                "unknown structure {name:?}; available: {}",
                BUILTIN_NAMES.join(", ")
            ),
        )
    })?;
    let text = StructureFile::from_def(&def, &SampleSpec::default()).to_toml_string();
    match emit {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    Ok(exit::OK)
}

fn parse_point(raw: &str, dim: usize) -> Result<Vec<f64>, Failure> {
    let p: Vec<f64> = raw
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| {
                    Failure::new(
                        exit::BAD_POINT,
                        format!("invalid coordinate {s:?} in --point"),
                    )
                })
        })
        .collect::<Result<_, _>>()?;
    if p.len() != dim {
        return Err(Failure::new(
            exit::BAD_POINT,
            format!(
                "--point has {} coordinates but the structure has dimension {dim}",
                p.len()
            ),
        ));
    }
    Ok(p)
}

pub fn eval(path: &Path, raw_point: &str, what: Quantity) -> Result<u8, Failure> {
    let (def, _) = load(path)?;
    let p = parse_point(raw_point, def.dim())?;
    let failed = |e: &dyn std::fmt::Display| {
        Failure::new(exit::EVALUATION, format!("evaluation failed: {e}"))
    };
    let m = def.rank();
    let n = def.dim();
    let text = match what {
        Quantity::Omega => {
            let w = omega(&def, &p).map_err(|e| failed(&e))?;
            let mut s = render::matrix("omega_ab = d eta(e_a, e_b)", m, m, |a, b| w.table[(a, b)]);
            s += &format!("det omega = {}\n", render::num(w.determinant));
            s
        }
        Quantity::Nijenhuis => {
            let nj = nijenhuis(&def, &p).map_err(|e| failed(&e))?;
            let normal = normality_residual(&def, &p).map_err(|e| failed(&e))?;
            let mut s = render::nijenhuis(&nj, n);
            s += &format!("|P(N)| = {}\n", render::num(nj.projected_norm()));
            s += &format!("normality residual = {}\n", render::num(normal));
            s
        }
        Quantity::Christoffel => {
            let conn = christoffel(&def, &p).map_err(|e| failed(&e))?;
            let mut s = String::new();
            for c in 0..m {
                s += &render::matrix(&format!("Gamma^{}_ab", c + 1), m, m, |a, b| {
                    conn.gamma(c, a, b)
                });
            }
            s
        }
        Quantity::ExtendMetric => {
            let g = extend_metric(&def, &p).map_err(|e| failed(&e))?;
            let mut s = String::new();
            for a in 0..n {
                for b in a..n {
                    s += &format!("g~_{}{} = {}\n", a + 1, b + 1, render::num(g.table[(a, b)]));
                }
            }
            s
        }
    };
    print!("{text}");
    Ok(exit::OK)
}
