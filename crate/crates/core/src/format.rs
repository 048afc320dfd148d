//! Structure definition files (TOML).
//!
//! ```toml
//! name = "darboux_r3"            # optional
//! dimension = 3
//! coordinates = ["x1", "x2", "x3"] # optional, defaults to x1..xn
//! eta = ["-x2", "0", "1"]
//! phi = ["0", "1", "-1", "0"]     # phi^a_b, row-major (row a, column b)
//! g = ["0.5", "0", "0", "0.5"]    # g_ab, row-major
//! sample_box = [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]]
//! grid_points = 200               # optional
//! seed = 42                       # optional
//! tolerance = 1e-8                # optional
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::structure::{SampleSpec, StructureDef, StructureError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed document: {0}")]
    Syntax(String),
    #[error("invalid document: {0}")]
    Schema(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<Vec<String>>,
    pub eta: Vec<String>,
    pub phi: Vec<String>,
    pub g: Vec<String>,
    pub sample_box: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl StructureFile {
    pub fn from_toml_str(text: &str) -> Result<Self, FormatError> {
        toml::from_str(text).map_err(|e| FormatError::Syntax(e.message().to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("structure file serializes")
    }

    /// Describe `def` and `spec` as a file; every optional key is written.
    pub fn from_def(def: &StructureDef, spec: &SampleSpec) -> Self {
        let coords = def.coords();
        let show = |table: &[crate::expr::Expr]| -> Vec<String> {
            table
                .iter()
                .map(|e| e.display(coords).to_string())
                .collect()
        };
        Self {
            name: Some(def.name().to_string()),
            dimension: def.dim(),
            coordinates: Some(coords.to_vec()),
            eta: show(def.eta()),
            phi: show(def.phi()),
            g: show(def.g()),
            sample_box: def.sample_box().to_vec(),
            grid_points: Some(spec.count),
            seed: Some(spec.seed),
            tolerance: Some(spec.tolerance),
        }
    }

    pub fn sample_spec(&self) -> Result<SampleSpec, FormatError> {
        let count = self.grid_points.unwrap_or(SampleSpec::DEFAULT_COUNT);
        if count == 0 {
            return Err(FormatError::Schema("grid_points must be positive".into()));
        }
        let tolerance = self.tolerance.unwrap_or(SampleSpec::DEFAULT_TOLERANCE);
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(FormatError::Schema(format!(
                "tolerance must be positive and finite, got {tolerance}"
            )));
        }
        Ok(SampleSpec {
            count,
            seed: self.seed.unwrap_or(SampleSpec::DEFAULT_SEED),
            tolerance,
        })
    }

    pub fn to_structure(&self) -> Result<StructureDef, FormatError> {
        let n = self.dimension;
        let coords = match &self.coordinates {
            Some(c) => {
                if c.len() != n {
                    return Err(FormatError::Schema(format!(
                        "dimension is {n} but {} coordinates are named",
                        c.len()
                    )));
                }
                c.clone()
            }
            None => (1..=n).map(|i| format!("x{i}")).collect(),
        };
        let name = self.name.clone().unwrap_or_else(|| "unnamed".to_string());
        Ok(StructureDef::from_sources(
            name,
            &coords,
            &self.eta,
            &self.phi,
            &self.g,
            self.sample_box.clone(),
        )?)
    }
}

/// Parse a structure file into a definition and grid parameters.
pub fn parse_structure_file(text: &str) -> Result<(StructureDef, SampleSpec), FormatError> {
    let file = StructureFile::from_toml_str(text)?;
    Ok((file.to_structure()?, file.sample_spec()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{builtin, BUILTIN_NAMES};

    const DARBOUX: &str = r#"
dimension = 3
eta = ["-x2", "0", "1"]
phi = ["0", "1", "-1", "0"]
g = ["0.5", "0", "0", "0.5"]
sample_box = [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]]
"#;

    #[test]
    fn defaults_apply() {
        let (def, spec) = parse_structure_file(DARBOUX).unwrap();
        assert_eq!(spec, SampleSpec::default());
        assert_eq!(def.coords(), ["x1", "x2", "x3"]);
        assert_eq!(def.name(), "unnamed");
        assert_eq!(def.eta(), builtin("darboux_r3").unwrap().eta());
    }

    #[test]
    fn gallery_round_trips() {
        for name in BUILTIN_NAMES {
            let def = builtin(name).unwrap();
            let text = StructureFile::from_def(&def, &SampleSpec::default()).to_toml_string();
            let (back, spec) = parse_structure_file(&text).unwrap();
            assert_eq!(back, def, "{text}");
            assert_eq!(spec, SampleSpec::default());
        }
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(
            parse_structure_file("dimension = "),
            Err(FormatError::Syntax(_))
        ));
        assert!(matches!(
            parse_structure_file(&format!("{DARBOUX}\nextra = 1")),
            Err(FormatError::Syntax(_))
        ));
        let wrong_coords = format!("{DARBOUX}\ncoordinates = [\"a\", \"b\"]");
        assert!(matches!(
            parse_structure_file(&wrong_coords),
            Err(FormatError::Schema(_))
        ));
        let bad_expr = DARBOUX.replace("\"-x2\"", "\"-y\"");
        assert!(matches!(
            parse_structure_file(&bad_expr),
            Err(FormatError::Structure(StructureError::Parse { .. }))
        ));
        let bad_tol = format!("{DARBOUX}\ntolerance = -1.0");
        assert!(matches!(
            parse_structure_file(&bad_tol),
            Err(FormatError::Schema(_))
        ));
        let short = DARBOUX.replace("dimension = 3", "dimension = 5");
        assert!(matches!(
            parse_structure_file(&short),
            Err(FormatError::Structure(StructureError::Length { .. }))
        ));
    }
}
