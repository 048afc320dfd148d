//! Library-versus-oracle gaps shared by the test suites.

use adapted_geom::connections::{covariant_derivative, kn_connection, torsion};
use adapted_geom::frames::dn_tensor;
use adapted_geom::nijenhuis::nijenhuis;
use adapted_geom::structure::{transform_tensor, ChartMap, DEFAULT_CHART_TOLERANCE};
use adapted_geom::{StructureDef, TensorExpr};

use crate::brackets::{frame_components, frame_field, nijenhuis_at, reeb_field};
use crate::charts::transform_oracle;

/// Gaps between the frame formulas for the Nijenhuis torsion and the
/// bracket definition at `p`.
#[derive(Clone, Copy, Debug, Default)]
pub struct NijenhuisGaps {
    /// `P N(e_a, e_b)` against `N^e_ab`, and `P N(xi, e_a)` against `N^e_na`.
    pub admissible: f64,
    /// Vertical part of `N(e_a, e_b)` against `N^n_ab`.
    pub vertical: f64,
    /// Vertical part of `N(xi, e_a)` and all of `N(xi, xi)`, which vanish.
    pub vanishing: f64,
}

impl NijenhuisGaps {
    pub fn max(self, o: NijenhuisGaps) -> NijenhuisGaps {
        NijenhuisGaps {
            admissible: self.admissible.max(o.admissible),
            vertical: self.vertical.max(o.vertical),
            vanishing: self.vanishing.max(o.vanishing),
        }
    }
}

pub fn nijenhuis_gaps(def: &StructureDef, p: &[f64]) -> NijenhuisGaps {
    let m = def.rank();
    let n = def.dim();
    let blocks = nijenhuis(def, p).expect("structure evaluates at p");
    let mut gaps = NijenhuisGaps::default();
    for a in 0..m {
        for b in 0..m {
            let v = nijenhuis_at(def, &frame_field(def, a), &frame_field(def, b), p).unwrap();
            let (pv, vv) = frame_components(def, &v, p).unwrap();
            for e in 0..m {
                gaps.admissible = gaps.admissible.max((pv[e] - blocks.ne_ab(e, a, b)).abs());
            }
            gaps.vertical = gaps.vertical.max((vv - blocks.nn_ab[(a, b)]).abs());
        }
        let v = nijenhuis_at(def, &reeb_field(n), &frame_field(def, a), p).unwrap();
        let (pv, vv) = frame_components(def, &v, p).unwrap();
        for e in 0..m {
            gaps.admissible = gaps.admissible.max((pv[e] - blocks.ne_na[(e, a)]).abs());
        }
        gaps.vanishing = gaps.vanishing.max(vv.abs());
    }
    let v = nijenhuis_at(def, &reeb_field(n), &reeb_field(n), p).unwrap();
    gaps.vanishing = v.iter().fold(gaps.vanishing, |z, x| z.max(x.abs()));
    gaps
}

/// `max |nabla~ phi|` and `max |S~ - N^e / 4|` for the phi-compatible
/// connection at `p`.
pub fn kn_residuals(def: &StructureDef, p: &[f64]) -> (f64, f64) {
    let conn = kn_connection(def, p).expect("structure evaluates at p");
    let parallel = covariant_derivative(def, &conn, &def.phi_tensor(), p)
        .unwrap()
        .max_abs();
    let s = torsion(&conn);
    let nj = nijenhuis(def, p).unwrap();
    let m = def.rank();
    let mut gap = 0.0f64;
    for e in 0..m {
        for a in 0..m {
            for b in 0..m {
                gap = gap.max((s.get(&[e, a, b]) - 0.25 * nj.ne_ab(e, a, b)).abs());
            }
        }
    }
    (parallel, gap)
}

/// Gaps between the admissible-block transform and the full-dimensional
/// oracle, for `t` and for its Reeb derivative.
pub fn transform_gaps(map: &ChartMap, def: &StructureDef, t: &TensorExpr, p: &[f64]) -> (f64, f64) {
    let n = def.dim();
    let blocks = map.jacobian_blocks(p, DEFAULT_CHART_TOLERANCE).unwrap();
    let value = transform_tensor(map, &t.eval(p).unwrap(), p).unwrap();
    // d_n~ = (d x^n / d x~^n) d_n along the new Reeb coordinate
    let dn = transform_tensor(map, &dn_tensor(def, t, p).unwrap(), p)
        .unwrap()
        .scaled(blocks.inverse_full[(n - 1, n - 1)]);
    let (want, want_dn) = transform_oracle(map, t, def.eta(), p).unwrap();
    (value.max_abs_diff(&want), dn.max_abs_diff(&want_dn))
}
