use std::str::FromStr;

use monodyn::torus::AffineMonomialMap;
use monodyn::{IntMatrix, KummerNumber};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

/// Per-map defaults; command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterate_cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_bound: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion_cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Relative width of the spectral radius enclosure, as a rational `p/q`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
}

impl Options {
    fn is_empty(&self) -> bool {
        *self == Options::default()
    }
}

/// A map `x ↦ γ·x^A` as written in a fixture file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub dimension: usize,
    pub matrix: Vec<Vec<i64>>,
    pub gamma: Vec<String>,
    #[serde(default, skip_serializing_if = "Options::is_empty")]
    pub options: Options,
}

fn invalid(msg: impl Into<String>) -> SpecError {
    SpecError::Invalid(msg.into())
}

pub fn parse_tolerance(s: &str) -> Result<num_rational::BigRational, SpecError> {
    let t = num_rational::BigRational::from_str(s.trim()).map_err(|_| invalid(format!("bad tolerance {s:?}")))?;
    if !t.is_positive() {
        return Err(invalid("tolerance must be positive"));
    }
    Ok(t)
}

impl MapSpec {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let spec: MapSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_map(phi: &AffineMonomialMap) -> Self {
        let a = phi.matrix();
        let matrix = (0..a.rows())
            .map(|i| a.row(i).iter().map(|x| i64::try_from(x).expect("matrix entry fits in i64")).collect())
            .collect();
        MapSpec {
            dimension: phi.dim(),
            matrix,
            gamma: phi.gamma().iter().map(ToString::to_string).collect(),
            options: Options::default(),
        }
    }

    fn validate(&self) -> Result<(), SpecError> {
        let n = self.dimension;
        if n == 0 {
            return Err(invalid("dimension must be positive"));
        }
        if self.matrix.len() != n || self.matrix.iter().any(|r| r.len() != n) {
            return Err(invalid(format!("matrix must be {n}x{n}")));
        }
        if self.gamma.len() != n {
            return Err(invalid(format!("gamma must have {n} entries, found {}", self.gamma.len())));
        }
        let o = &self.options;
        if o.iterate_cap == Some(0) || o.degree_bound == Some(0) || o.torsion_cap == Some(0) {
            return Err(invalid("options must be positive"));
        }
        if let Some(t) = &o.tolerance {
            parse_tolerance(t)?;
        }
        self.gamma_values()?;
        if self.int_matrix().det().is_zero() {
            return Err(invalid("matrix is singular"));
        }
        Ok(())
    }

    pub fn int_matrix(&self) -> IntMatrix {
        let rows: Vec<Vec<BigInt>> = self.matrix.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        IntMatrix::from_rows(&rows).expect("validated shape")
    }

    pub fn gamma_values(&self) -> Result<Vec<KummerNumber>, SpecError> {
        self.gamma
            .iter()
            .map(|s| KummerNumber::from_str(s).map_err(|e| invalid(format!("gamma entry {s:?}: {e}"))))
            .collect()
    }

    pub fn to_map(&self) -> Result<AffineMonomialMap, SpecError> {
        AffineMonomialMap::new(self.int_matrix(), self.gamma_values()?).map_err(|e| invalid(e.to_string()))
    }

    /// Same map with every coordinate rewritten in normal form.
    pub fn canonical(&self) -> Result<Self, SpecError> {
        let gamma = self.gamma_values()?.iter().map(ToString::to_string).collect();
        let options = Options {
            tolerance: self.options.tolerance.as_deref().map(parse_tolerance).transpose()?.map(|t| t.to_string()),
            ..self.options.clone()
        };
        Ok(MapSpec { gamma, options, ..self.clone() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}
