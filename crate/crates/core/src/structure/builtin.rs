use super::{StructureDef, StructureError};

pub const BUILTIN_NAMES: [&str; 4] = ["darboux_r3", "darboux_r5", "conformal_r3", "twisted_r3"];

const R3: [&str; 3] = ["x1", "x2", "x3"];
const R5: [&str; 5] = ["x1", "x2", "x3", "x4", "x5"];

/// Structures of the built-in gallery.
///
/// * `darboux_r3`: `eta = dx3 - x2 dx1`, `phi(e1) = -e2`, `phi(e2) = e1`,
///   `g = Id/2`. Sasakian.
/// * `darboux_r5`: `eta = dx5 - x2 dx1 - x4 dx3`, two copies of the above.
/// * `conformal_r3`: `darboux_r3` with `g = exp(x3) Id/2`. Normal, not
///   contact metric.
/// * `twisted_r3`: `darboux_r3` with an `x3`-dependent `phi` and the
///   phi-averaged Euclidean metric. Not Hermitian.
pub fn builtin(name: &str) -> Result<StructureDef, StructureError> {
    let box3 = vec![[-1.0, 1.0]; 3];
    match name {
        "darboux_r3" => StructureDef::from_sources(
            name,
            &R3,
            &["-x2", "0", "1"],
            &["0", "1", "-1", "0"],
            &["0.5", "0", "0", "0.5"],
            box3,
        ),
        "darboux_r5" => {
            let mut phi = vec!["0"; 16];
            let mut g = vec!["0"; 16];
            for (a, b) in [(0, 1), (2, 3)] {
                phi[a * 4 + b] = "1";
                phi[b * 4 + a] = "-1";
            }
            for a in 0..4 {
                g[a * 4 + a] = "0.5";
            }
            StructureDef::from_sources(
                name,
                &R5,
                &["-x2", "0", "-x4", "0", "1"],
                &phi,
                &g,
                vec![[-1.0, 1.0]; 5],
            )
        }
        "conformal_r3" => StructureDef::from_sources(
            name,
            &R3,
            &["-x2", "0", "1"],
            &["0", "1", "-1", "0"],
            &["0.5*exp(x3)", "0", "0", "0.5*exp(x3)"],
            box3,
        ),
        // g_ab = (delta_ab + phi^c_a phi^c_b) / 2
        "twisted_r3" => StructureDef::from_sources(
            name,
            &R3,
            &["-x2", "0", "1"],
            &["x3", "1", "-(1 + x3^2)", "-x3"],
            &[
                "0.5*(1 + x3^2 + (1 + x3^2)^2)",
                "0.5*(x3 + (1 + x3^2)*x3)",
                "0.5*(x3 + (1 + x3^2)*x3)",
                "0.5*(2 + x3^2)",
            ],
            box3,
        ),
        _ => Err(StructureError::UnknownBuiltin(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gallery_builds() {
        for name in BUILTIN_NAMES {
            let def = builtin(name).unwrap();
            assert_eq!(def.name(), name);
            assert_eq!(def.eta().last().unwrap().as_const(), Some(1.0));
        }
        assert_eq!(
            builtin("nope"),
            Err(StructureError::UnknownBuiltin("nope".into()))
        );
    }

    #[test]
    fn twisted_phi_has_unit_determinant_and_zero_trace() {
        let def = builtin("twisted_r3").unwrap();
        for x3 in [-1.0, -0.3, 0.0, 0.6, 1.0] {
            let j = def.jets_at(&[0.2, -0.4, x3]).unwrap();
            let det = j.phi(0, 0) * j.phi(1, 1) - j.phi(0, 1) * j.phi(1, 0);
            let tr = j.phi(0, 0) + j.phi(1, 1);
            assert!((det - 1.0).abs() < 1e-14);
            assert_eq!(tr, 0.0);
        }
    }
}
