//! JSON run configuration; command-line flags override file values.

use std::path::Path;

use serde::Deserialize;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

/// `{ "n", "lambda_p", "mbar", "rd", "R", "k", "samples", "seed" }`, every
/// field optional.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: Option<u32>,
    pub lambda_p: Option<OneOrMany>,
    pub mbar: Option<f64>,
    pub rd: Option<f64>,
    #[serde(rename = "R")]
    pub range: Option<f64>,
    pub k: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_schema() {
        let c = RunConfig::parse(
            r#"{"n": 2, "lambda_p": [0.03, 0.013], "mbar": 2, "rd": 50, "R": 5, "k": [1, 2], "samples": 1000, "seed": 7}"#,
        )
        .unwrap();
        assert_eq!(c.n, Some(2));
        assert_eq!(c.lambda_p.unwrap().into_vec(), vec![0.03, 0.013]);
        assert_eq!(c.range, Some(5.0));
        assert_eq!(c.k, Some(vec![1, 2]));
        let single = RunConfig::parse(r#"{"lambda_p": 2e-5}"#).unwrap();
        assert_eq!(single.lambda_p.unwrap().into_vec(), vec![2e-5]);
        assert!(RunConfig::parse(r#"{"lambda": 1}"#).is_err());
    }
}
