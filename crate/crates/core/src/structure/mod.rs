//! Almost contact metric structures given by a contact form `eta` and a pair
//! of admissible tensors `(phi, g)` in an adapted chart with Reeb field
//! `xi = d/dx^n`.
//!
//! `phi` and `g` are component tables over the adapted frame
//! `e_a = d_a - eta_a d_n`, `a = 1..n-1`. Inputs that are not written in
//! such a chart are rejected by [`validate`], never normalized.

mod builtin;
mod chart;
mod validate;

pub use builtin::{builtin, BUILTIN_NAMES};
pub use chart::{transform_tensor, ChartError, ChartMap, JacobianBlocks, DEFAULT_CHART_TOLERANCE};
pub use validate::{validate, CheckName, CheckRecord, ValidationReport};

use thiserror::Error;

use crate::expr::{self, EvalError, Expr, Func, ParseError};
use crate::jet::Jet2;
use crate::tensor::{TensorExpr, Valence};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum StructureError {
    #[error("dimension must be odd and at least 3, got {0}")]
    Dimension(usize),
    #[error("expected {expected} {what}, got {got}")]
    Length {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid coordinate name `{0}`")]
    CoordinateName(String),
    #[error("duplicate coordinate name `{0}`")]
    DuplicateCoordinate(String),
    #[error("sample interval {index} is [{lo}, {hi}]; need finite lo < hi")]
    SampleBox { index: usize, lo: f64, hi: f64 },
    #[error("expression {field}[{index}] refers to coordinate {var} beyond dimension")]
    Arity {
        field: &'static str,
        index: usize,
        var: usize,
    },
    #[error("cannot parse {field}[{index}]: {source}")]
    Parse {
        field: &'static str,
        index: usize,
        #[source]
        source: ParseError,
    },
    #[error("unknown builtin structure `{0}`")]
    UnknownBuiltin(String),
}

/// Almost contact metric structure data in an adapted chart.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureDef {
    name: String,
    coords: Vec<String>,
    eta: Vec<Expr>,
    phi: Vec<Expr>,
    g: Vec<Expr>,
    sample_box: Vec<[f64; 2]>,
}

impl StructureDef {
    /// `phi` and `g` are row-major `(n-1) x (n-1)` tables; `phi[a*(n-1)+b]`
    /// is `phi^a_b`.
    pub fn new(
        name: impl Into<String>,
        coords: Vec<String>,
        eta: Vec<Expr>,
        phi: Vec<Expr>,
        g: Vec<Expr>,
        sample_box: Vec<[f64; 2]>,
    ) -> Result<Self, StructureError> {
        let n = coords.len();
        if n < 3 || n % 2 == 0 {
            return Err(StructureError::Dimension(n));
        }
        for (i, c) in coords.iter().enumerate() {
            let valid = c
                .chars()
                .next()
                .is_some_and(|ch| ch.is_ascii_alphabetic() || ch == '_')
                && c.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
                && Func::from_name(c).is_none();
            if !valid {
                return Err(StructureError::CoordinateName(c.clone()));
            }
            if coords[..i].contains(c) {
                return Err(StructureError::DuplicateCoordinate(c.clone()));
            }
        }
        let m = n - 1;
        check_len("eta components", n, eta.len())?;
        check_len("phi components", m * m, phi.len())?;
        check_len("g components", m * m, g.len())?;
        check_len("sample intervals", n, sample_box.len())?;
        for (index, &[lo, hi]) in sample_box.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(StructureError::SampleBox { index, lo, hi });
            }
        }
        for (field, table) in [("eta", &eta), ("phi", &phi), ("g", &g)] {
            for (index, e) in table.iter().enumerate() {
                if e.arity() > n {
                    return Err(StructureError::Arity {
                        field,
                        index,
                        var: e.arity(),
                    });
                }
            }
        }
        Ok(Self {
            name: name.into(),
            coords,
            eta,
            phi,
            g,
            sample_box,
        })
    }

    /// Build from expression sources.
    pub fn from_sources<S: AsRef<str>>(
        name: impl Into<String>,
        coords: &[S],
        eta: &[S],
        phi: &[S],
        g: &[S],
        sample_box: Vec<[f64; 2]>,
    ) -> Result<Self, StructureError> {
        let coords: Vec<String> = coords.iter().map(|c| c.as_ref().to_string()).collect();
        let parse_all = |field: &'static str, srcs: &[S]| -> Result<Vec<Expr>, StructureError> {
            srcs.iter()
                .enumerate()
                .map(|(index, s)| {
                    expr::parse(s.as_ref(), &coords).map_err(|source| StructureError::Parse {
                        field,
                        index,
                        source,
                    })
                })
                .collect()
        };
        let eta = parse_all("eta", eta)?;
        let phi = parse_all("phi", phi)?;
        let g = parse_all("g", g)?;
        Self::new(name, coords, eta, phi, g, sample_box)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Manifold dimension `n`.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Rank `n - 1` of the distribution.
    pub fn rank(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn eta(&self) -> &[Expr] {
        &self.eta
    }

    pub fn phi(&self) -> &[Expr] {
        &self.phi
    }

    pub fn g(&self) -> &[Expr] {
        &self.g
    }

    pub fn sample_box(&self) -> &[[f64; 2]] {
        &self.sample_box
    }

    pub fn phi_tensor(&self) -> TensorExpr {
        TensorExpr::new(Valence::ENDOMORPHISM, self.rank(), self.phi.clone())
    }

    pub fn g_tensor(&self) -> TensorExpr {
        TensorExpr::new(Valence::BILINEAR, self.rank(), self.g.clone())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Replace one `eta` component.
    pub fn with_eta(mut self, index: usize, e: Expr) -> Self {
        self.eta[index] = e;
        self
    }

    /// Replace the whole `phi` table.
    pub fn with_phi(mut self, phi: Vec<Expr>) -> Result<Self, StructureError> {
        check_len("phi components", self.rank() * self.rank(), phi.len())?;
        self.phi = phi;
        Ok(self)
    }

    /// Replace the whole `g` table.
    pub fn with_g(mut self, g: Vec<Expr>) -> Result<Self, StructureError> {
        check_len("g components", self.rank() * self.rank(), g.len())?;
        self.g = g;
        Ok(self)
    }

    pub fn check_point(&self, p: &[f64]) -> Result<(), EvalError> {
        if p.len() != self.dim() {
            return Err(EvalError {
                kind: expr::DomainError::Arity {
                    expected: self.dim(),
                    got: p.len(),
                },
                point: p.to_vec(),
            });
        }
        Ok(())
    }

    /// Jets of every component at `p`.
    pub fn jets_at(&self, p: &[f64]) -> Result<StructureJets, EvalError> {
        self.check_point(p)?;
        let jets = |table: &[Expr]| -> Result<Vec<Jet2>, EvalError> {
            table.iter().map(|e| e.eval_jet(p)).collect()
        };
        Ok(StructureJets {
            point: p.to_vec(),
            eta: jets(&self.eta)?,
            phi: jets(&self.phi)?,
            g: jets(&self.g)?,
        })
    }
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<(), StructureError> {
    if expected != got {
        return Err(StructureError::Length {
            what,
            expected,
            got,
        });
    }
    Ok(())
}

/// All component jets of a structure at one point. Every pointwise quantity
/// in the crate is assembled from this.
#[derive(Clone, Debug)]
pub struct StructureJets {
    pub point: Vec<f64>,
    pub eta: Vec<Jet2>,
    pub phi: Vec<Jet2>,
    pub g: Vec<Jet2>,
}

impl StructureJets {
    pub fn dim(&self) -> usize {
        self.point.len()
    }

    pub fn rank(&self) -> usize {
        self.point.len() - 1
    }

    /// `Gamma^n_a = eta_a`.
    pub fn gamma_n(&self, a: usize) -> f64 {
        self.eta[a].value
    }

    pub fn phi(&self, a: usize, b: usize) -> f64 {
        self.phi[a * self.rank() + b].value
    }

    pub fn g(&self, a: usize, b: usize) -> f64 {
        self.g[a * self.rank() + b].value
    }

    /// `e_a f = d_a f - Gamma^n_a d_n f` for a jet of `f`.
    pub fn frame_derivative(&self, f: &Jet2, a: usize) -> f64 {
        let n = self.dim();
        f.gradient[a] - self.gamma_n(a) * f.gradient[n - 1]
    }

    /// `d_n f`.
    pub fn reeb_derivative(&self, f: &Jet2) -> f64 {
        f.gradient[self.dim() - 1]
    }

    pub fn phi_matrix(&self) -> nalgebra::DMatrix<f64> {
        let m = self.rank();
        nalgebra::DMatrix::from_fn(m, m, |a, b| self.phi(a, b))
    }

    pub fn g_matrix(&self) -> nalgebra::DMatrix<f64> {
        let m = self.rank();
        nalgebra::DMatrix::from_fn(m, m, |a, b| self.g(a, b))
    }
}

/// Grid parameters for pointwise checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl SampleSpec {
    pub const DEFAULT_COUNT: usize = 200;
    pub const DEFAULT_SEED: u64 = 42;
    pub const DEFAULT_TOLERANCE: f64 = 1e-8;
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            count: Self::DEFAULT_COUNT,
            seed: Self::DEFAULT_SEED,
            tolerance: Self::DEFAULT_TOLERANCE,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn darboux() -> StructureDef {
        builtin("darboux_r3").unwrap()
    }

    #[test]
    fn rejects_even_dimension() {
        let err = StructureDef::from_sources(
            "bad",
            &["x1", "x2"],
            &["0", "1"],
            &["0"],
            &["1"],
            vec![[-1.0, 1.0]; 2],
        )
        .unwrap_err();
        assert_eq!(err, StructureError::Dimension(2));
    }

    #[test]
    fn rejects_bad_tables() {
        let d = darboux();
        assert!(matches!(
            d.clone().with_phi(vec![Expr::Const(0.0); 3]),
            Err(StructureError::Length { .. })
        ));
        let err = StructureDef::from_sources(
            "bad",
            &["x1", "x2", "x3"],
            &["-x2", "0", "1"],
            &["0", "1", "-1", "0"],
            &["0.5", "0", "0", "0.5 +"],
            vec![[-1.0, 1.0]; 3],
        )
        .unwrap_err();
        assert!(matches!(
            err,
            StructureError::Parse {
                field: "g",
                index: 3,
                ..
            }
        ));
        let err = StructureDef::from_sources(
            "bad",
            &["x1", "x2", "sin"],
            &["-x2", "0", "1"],
            &["0", "1", "-1", "0"],
            &["0.5", "0", "0", "0.5"],
            vec![[-1.0, 1.0]; 3],
        )
        .unwrap_err();
        assert_eq!(err, StructureError::CoordinateName("sin".into()));
        let err = StructureDef::new(
            "bad",
            d.coords().to_vec(),
            d.eta().to_vec(),
            d.phi().to_vec(),
            d.g().to_vec(),
            vec![[-1.0, 1.0], [1.0, 1.0], [-1.0, 1.0]],
        )
        .unwrap_err();
        assert!(matches!(err, StructureError::SampleBox { index: 1, .. }));
    }

    #[test]
    fn frame_derivative_from_jets() {
        let d = darboux();
        let j = d.jets_at(&[0.3, 0.7, 0.1]).unwrap();
        assert_eq!(j.gamma_n(0), -0.7);
        let f = Expr::var(2).eval_jet(&[0.3, 0.7, 0.1]).unwrap();
        assert!((j.frame_derivative(&f, 0) - 0.7).abs() < 1e-15);
        assert!(d.jets_at(&[0.3, 0.7]).is_err());
    }
}
