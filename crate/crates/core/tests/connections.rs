use adapted_geom::connections::{christoffel, covariant_derivative, torsion};
use adapted_geom::nijenhuis::nijenhuis;
use adapted_geom::structure::BUILTIN_NAMES;
use adapted_geom::{builtin, StructureDef};
use adapted_geom_testkit::deform::{compatible_deformation, contact_metric_r3};
use adapted_geom_testkit::random::point;
use adapted_geom_testkit::residuals::kn_residuals;
use adapted_geom_testkit::rng;

fn random_structures() -> Vec<StructureDef> {
    let mut r = rng(501);
    let r3 = builtin("darboux_r3").unwrap();
    let r5 = builtin("darboux_r5").unwrap();
    let mut out = Vec::new();
    for k in 0..10 {
        out.push(compatible_deformation(&mut r, &r5, k % 2 == 0));
    }
    for k in 0..5 {
        out.push(compatible_deformation(&mut r, &r3, k % 2 == 0));
        out.push(contact_metric_r3(&mut r, k % 2 == 1));
    }
    out
}

#[test]
fn kn_connection_is_phi_parallel_with_nijenhuis_torsion() {
    let mut r = rng(502);
    let gallery = BUILTIN_NAMES.iter().map(|n| builtin(n).unwrap());
    let mut worst = (0.0f64, 0.0f64);
    let mut nontrivial = 0.0f64;
    for def in gallery.chain(random_structures()) {
        for _ in 0..5 {
            let p = point(&mut r, def.sample_box());
            let (a, b) = kn_residuals(&def, &p);
            worst = (worst.0.max(a), worst.1.max(b));
            if def.dim() == 5 {
                nontrivial = nontrivial.max(
                    nijenhuis(&def, &p)
                        .unwrap()
                        .ne_ab
                        .iter()
                        .fold(0.0, |m, v| m.max(v.abs())),
                );
            }
        }
    }
    assert!(worst.0 < 1e-7 && worst.1 < 1e-7, "{worst:?}");
    // the torsion identity is not vacuous on the five-dimensional samples
    assert!(nontrivial > 1e-2, "{nontrivial}");
}

#[test]
fn metric_connection_is_metric_and_symmetric() {
    let mut r = rng(503);
    for def in random_structures() {
        let p = point(&mut r, def.sample_box());
        let conn = christoffel(&def, &p).unwrap();
        let dg = covariant_derivative(&def, &conn, &def.g_tensor(), &p).unwrap();
        assert!(dg.max_abs() < 1e-9, "{}: {}", def.name(), dg.max_abs());
        assert!(torsion(&conn).max_abs() < 1e-12);
    }
}
