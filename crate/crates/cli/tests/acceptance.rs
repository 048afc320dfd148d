//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use adapted_geom::classify::{k_contact_chain, Predicate};
use adapted_geom::connections::{christoffel, covariant_derivative};
use adapted_geom::frames::frame_data;
use adapted_geom::grid::sample_points;
use adapted_geom::structure::BUILTIN_NAMES;
use adapted_geom::TensorExpr;
use adapted_geom::{builtin, classify, validate, SampleSpec, StructureDef, Valence, Verdict};
use adapted_geom_testkit::charts::random_gradient_map;
use adapted_geom_testkit::deform::{compatible_deformation, contact_metric_r3, perturbed_phi};
use adapted_geom_testkit::random::{point, poly, smooth_expr};
use adapted_geom_testkit::residuals::{
    kn_residuals, nijenhuis_gaps, transform_gaps, NijenhuisGaps,
};
use adapted_geom_testkit::{fd, rng};
use rand::Rng;

use Predicate::*;
use Verdict::*;

type Check = fn() -> Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gallery() -> Vec<StructureDef> {
    BUILTIN_NAMES.iter().map(|n| builtin(n).unwrap()).collect()
}

fn residual(report: &adapted_geom::ClassificationReport, p: Predicate) -> f64 {
    report.get(p).max_residual.unwrap_or(f64::NAN)
}

fn gallery_matrix() -> Result<String, String> {
    let spec = SampleSpec::default();
    let start = Instant::now();
    let reports: Vec<_> = gallery().iter().map(|d| classify(d, &spec)).collect();
    let elapsed = start.elapsed();
    for r in &reports {
        let name = r.structure.as_str();
        ensure(r.validation.passed(), || {
            format!("{name}: validation did not pass")
        })?;
        let expect = |p: Predicate, v: Verdict| {
            ensure(r.verdict(p) == v, || {
                format!(
                    "{name}: {} is {}, expected {}",
                    p.as_str(),
                    r.verdict(p).as_str(),
                    v.as_str()
                )
            })
        };
        match name {
            "darboux_r3" | "darboux_r5" => {
                for p in [
                    ContactMetric,
                    HermitianAcm,
                    Normal,
                    Sasakian,
                    KContact,
                    PhiQuasiIntegrable,
                    GQuasiIntegrable,
                    PhiIntegrable,
                ] {
                    expect(p, Pass)?;
                    let res = r.get(p).max_residual.unwrap_or(0.0);
                    ensure(res < 1e-10, || {
                        format!("{name}: {} residual {res:e}", p.as_str())
                    })?;
                }
            }
            "conformal_r3" => {
                expect(HermitianAcm, Pass)?;
                expect(Normal, Pass)?;
                for p in [ContactMetric, KContact, GQuasiIntegrable] {
                    expect(p, Fail)?;
                    ensure(r.get(p).witness_point.is_some(), || {
                        format!("{name}: no witness for {}", p.as_str())
                    })?;
                }
            }
            "twisted_r3" => {
                for p in [HermitianAcm, Normal, Sasakian] {
                    expect(p, Fail)?;
                }
                for p in [HermitianAcm, Normal] {
                    let res = residual(r, p);
                    ensure(res >= 0.1, || {
                        format!("{name}: {} residual {res}", p.as_str())
                    })?;
                }
            }
            other => return Err(format!("unexpected gallery member {other}")),
        }
    }
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "4 structures classified in {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn frame_identity() -> Result<String, String> {
    let mut worst = 0.0f64;
    let mut points = 0;
    for def in gallery() {
        for p in sample_points(def.sample_box(), 200, 42) {
            let f = frame_data(&def, &p).map_err(|e| e.to_string())?;
            worst = worst.max((&f.nonholonomicity - 2.0 * f.omega.transpose()).amax());
            points += 1;
        }
    }
    ensure(worst < 1e-10, || format!("max |M - 2 omega^T| = {worst:e}"))?;
    Ok(format!(
        "max |M^n_ab - 2 omega_ba| = {worst:.1e} over {points} points"
    ))
}

fn nijenhuis_oracle() -> Result<String, String> {
    let mut r = rng(0xA3);
    let base = builtin("darboux_r3").unwrap();
    let mut gaps = NijenhuisGaps::default();
    for _ in 0..20 {
        let def = perturbed_phi(&mut r, &base, 0.7);
        for _ in 0..5 {
            let p = point(&mut r, def.sample_box());
            gaps = gaps.max(nijenhuis_gaps(&def, &p));
        }
    }
    let assembled = gaps.admissible.max(gaps.vertical);
    ensure(assembled < 1e-7, || format!("assembly gap {assembled:e}"))?;
    ensure(gaps.vanishing < 1e-9, || {
        format!("zero blocks {:e}", gaps.vanishing)
    })?;
    Ok(format!(
        "20 random phi fields: assembly gap {assembled:.1e}, zero blocks {:.1e}",
        gaps.vanishing
    ))
}

fn phi_compatible_connection() -> Result<String, String> {
    let mut r = rng(0xA4);
    let mut defs = gallery();
    let r5 = builtin("darboux_r5").unwrap();
    let r3 = builtin("darboux_r3").unwrap();
    for k in 0..20 {
        defs.push(if k < 14 {
            compatible_deformation(&mut r, &r5, k % 2 == 0)
        } else {
            compatible_deformation(&mut r, &r3, k % 2 == 0)
        });
    }
    let (mut parallel, mut torsion) = (0.0f64, 0.0f64);
    for def in &defs {
        for _ in 0..5 {
            let p = point(&mut r, def.sample_box());
            let (a, b) = kn_residuals(def, &p);
            parallel = parallel.max(a);
            torsion = torsion.max(b);
        }
    }
    ensure(parallel < 1e-7, || format!("|nabla~ phi| = {parallel:e}"))?;
    ensure(torsion < 1e-7, || format!("|S~ - N/4| = {torsion:e}"))?;
    Ok(format!(
        "gallery + 20 deformations: |nabla~ phi| {parallel:.1e}, |S~ - N^e/4| {torsion:.1e}"
    ))
}

fn phi_parallel_verdict(def: &StructureDef, spec: &SampleSpec) -> Verdict {
    let worst = sample_points(def.sample_box(), spec.count, spec.seed)
        .iter()
        .map(|p| {
            let conn = christoffel(def, p).unwrap();
            covariant_derivative(def, &conn, &def.phi_tensor(), p)
                .unwrap()
                .max_abs()
        })
        .fold(0.0, f64::max);
    Verdict::from_residual(worst, spec.tolerance)
}

fn normality_biconditionals() -> Result<String, String> {
    let spec = SampleSpec::default();
    let mut r = rng(0xA5);
    let extra = (0..10).map(|k| contact_metric_r3(&mut r, k % 2 == 1));
    let (mut gallery_checked, mut checked) = (0, 0);
    for (k, def) in gallery().into_iter().chain(extra).enumerate() {
        let report = classify(&def, &spec);
        if report.verdict(ContactMetric) != Pass {
            continue;
        }
        checked += 1;
        if k < BUILTIN_NAMES.len() {
            gallery_checked += 1;
        }
        let normal = report.verdict(Normal);
        let split = report
            .verdict(PhiQuasiIntegrable)
            .and(phi_parallel_verdict(&def, &spec));
        ensure(normal == split, || {
            format!(
                "{}: normal {} vs quasi-integrable and parallel {}",
                def.name(),
                normal.as_str(),
                split.as_str()
            )
        })?;
        let extended = report.verdict(PhiIntegrable);
        ensure(normal == extended, || {
            format!(
                "{}: normal {} vs nabla^1 phi = 0 {}",
                def.name(),
                normal.as_str(),
                extended.as_str()
            )
        })?;
    }
    ensure(gallery_checked >= 2, || {
        "no contact metric gallery member".to_string()
    })?;
    Ok(format!(
        "0 disagreements on {gallery_checked} contact metric gallery members and {} random ones",
        checked - gallery_checked
    ))
}

fn k_contact_chain_agreement() -> Result<String, String> {
    let spec = SampleSpec::default();
    let mut r = rng(0xA6);
    let extra: Vec<_> = (0..10)
        .map(|k| contact_metric_r3(&mut r, k % 2 == 0))
        .collect();
    let mut holds = 0;
    for def in gallery().iter().chain(&extra) {
        let chain = k_contact_chain(def, &spec);
        ensure(chain.agrees(), || format!("{}: {chain:?}", def.name()))?;
        holds += chain.reeb_derivative.holds as usize;
    }
    Ok(format!(
        "14 structures, all three links agree ({holds} K-contact chains hold)"
    ))
}

fn transformation_law() -> Result<String, String> {
    let mut r = rng(0xA7);
    let deformed = compatible_deformation(&mut r, &builtin("darboux_r5").unwrap(), true);
    let def = perturbed_phi(&mut r, &deformed, 0.3);
    let vars: Vec<usize> = (0..def.dim()).collect();
    let m = def.rank();
    let (mut value, mut reeb) = (0.0f64, 0.0f64);
    for _ in 0..5 {
        let map = random_gradient_map(&mut r, def.dim());
        let mut tensors = vec![def.phi_tensor(), def.g_tensor()];
        for v in [Valence::VECTOR, Valence::FORM, Valence::MIXED_12] {
            let count = m.pow(v.rank() as u32);
            tensors.push(TensorExpr::new(
                v,
                m,
                (0..count).map(|_| poly(&mut r, &vars, 0.8)).collect(),
            ));
        }
        for _ in 0..3 {
            let p = point(&mut r, def.sample_box());
            for t in &tensors {
                let (a, b) = transform_gaps(&map, &def, t, &p);
                value = value.max(a);
                reeb = reeb.max(b);
            }
        }
    }
    ensure(value < 1e-8 && reeb < 1e-8, || {
        format!("gaps {value:e}, {reeb:e}")
    })?;
    Ok(format!(
        "5 maps: components {value:.1e}, d_n components {reeb:.1e}"
    ))
}

fn differentiation_soundness() -> Result<String, String> {
    let mut r = rng(0xA8);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = r.gen_range(1..=5);
        let e = smooth_expr(&mut r, n, 4);
        let p: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let j = e.eval_jet(&p).map_err(|e| e.to_string())?;
        let g = fd::gradient(&e, &p).map_err(|e| e.to_string())?;
        let h = fd::hessian(&e, &p).map_err(|e| e.to_string())?;
        for (a, b) in j.gradient.iter().zip(&g).chain(j.hessian.iter().zip(&h)) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst < 1e-6, || format!("max discrepancy {worst:e}"))?;
    Ok(format!("100 expressions: max discrepancy {worst:.1e}"))
}

fn determinism() -> Result<String, String> {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_adapted-geom");
    for name in BUILTIN_NAMES {
        let file = dir.path().join(format!("{name}.toml"));
        let status = Command::new(bin)
            .args(["builtin", name, "--emit"])
            .arg(&file)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("builtin {name} failed"))?;
        let run = || {
            Command::new(bin)
                .arg("classify")
                .arg(&file)
                .args(["--json", "-"])
                .output()
                .map(|o| o.stdout)
                .map_err(|e| e.to_string())
        };
        let (a, b) = (run()?, run()?);
        ensure(!a.is_empty() && a == b, || {
            format!("{name}: reports differ")
        })?;
    }
    Ok("byte-identical JSON for every gallery member".to_string())
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        ("gallery classification matrix", gallery_matrix),
        ("frame identity M = 2 omega^T", frame_identity),
        ("Nijenhuis assembly vs bracket oracle", nijenhuis_oracle),
        ("phi-compatible connection", phi_compatible_connection),
        ("normality biconditionals", normality_biconditionals),
        ("K-contact chain", k_contact_chain_agreement),
        ("chart transformation law", transformation_law),
        ("differentiation soundness", differentiation_soundness),
        ("report determinism", determinism),
    ];
    // validation of the gallery is a precondition for every criterion
    for def in gallery() {
        assert!(validate(&def, &SampleSpec::default()).passed());
    }
    let mut failed = 0;
    for (k, (title, check)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("criterion {} PASS {title}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {title}: {detail}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
