//! Run configuration shared by the library and the CLI.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::views::{MetaPath, ViewError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config violation: {key} {message}")]
    Invalid { key: &'static str, message: String },
    #[error("config violation: meta_paths: {0}")]
    MetaPath(#[from] ViewError),
}

/// Which author attribute drives blocking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attribute {
    Email,
    Affiliation,
}

impl std::str::FromStr for Attribute {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "email" => Ok(Attribute::Email),
            "affiliation" => Ok(Attribute::Affiliation),
            other => Err(format!("unknown attribute `{other}` (email or affiliation)")),
        }
    }
}

/// All tunables of a run. Field names double as config-file keys and
/// (kebab-cased) CLI flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Meta-path view set by canonical name.
    pub meta_paths: Vec<String>,
    /// Paper feature dimension (hashed token buckets).
    pub d0: usize,
    /// Node embedding dimension.
    pub d: usize,
    /// Attention transform / preference-vector dimension.
    pub d_prime: usize,
    /// Number of aggregation layers.
    pub k: usize,
    /// Egonet sampling depth for mini-batches.
    pub l: usize,
    /// Recurrent hidden size.
    pub d_h: usize,
    pub lr: f64,
    pub dropout: f64,
    /// Weight of the sequence-similarity loss term.
    pub eta: f64,
    /// Positive-decision threshold on the same-author probability.
    pub tau: f64,
    /// Probability that a synthetic author's attributes switch mid-career.
    pub attr_change_prob: f64,
    pub attribute: Attribute,
    pub batch_size: usize,
    pub epochs: usize,
    pub patience: usize,
    pub seed: u64,
    /// Negatives sampled per positive pair.
    pub neg_ratio: usize,
    /// Force serial, bit-reproducible execution.
    pub deterministic: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            meta_paths: vec!["PP", "PAP", "PTP", "PVP"]
                .into_iter()
                .map(String::from)
                .collect(),
            d0: 128,
            d: 64,
            d_prime: 32,
            k: 2,
            l: 2,
            d_h: 64,
            lr: 5e-4,
            dropout: 0.2,
            eta: 1.0,
            tau: 0.5,
            attr_change_prob: 0.6,
            attribute: Attribute::Email,
            batch_size: 16,
            epochs: 100,
            patience: 10,
            seed: 42,
            neg_ratio: 1,
            deterministic: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        fn positive(key: &'static str, v: usize) -> Result<(), ConfigError> {
            if v == 0 {
                Err(ConfigError::Invalid {
                    key,
                    message: "must be positive".into(),
                })
            } else {
                Ok(())
            }
        }
        if self.meta_paths.is_empty() {
            return Err(ConfigError::Invalid {
                key: "meta_paths",
                message: "must name at least one view".into(),
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in &self.meta_paths {
            MetaPath::parse(name)?;
            if !seen.insert(name) {
                return Err(ConfigError::Invalid {
                    key: "meta_paths",
                    message: format!("duplicate entry `{name}`"),
                });
            }
        }
        if self.d0 < 8 {
            return Err(ConfigError::Invalid {
                key: "d0",
                message: format!("must be at least 8, got {}", self.d0),
            });
        }
        positive("d", self.d)?;
        positive("d_prime", self.d_prime)?;
        positive("k", self.k)?;
        positive("d_h", self.d_h)?;
        if self.d_h < 2 {
            return Err(ConfigError::Invalid {
                key: "d_h",
                message: "must be at least 2 (the classifier halves it)".into(),
            });
        }
        positive("batch_size", self.batch_size)?;
        positive("epochs", self.epochs)?;
        positive("patience", self.patience)?;
        positive("neg_ratio", self.neg_ratio)?;
        if !(self.lr > 0.0) || !self.lr.is_finite() {
            return Err(ConfigError::Invalid {
                key: "lr",
                message: format!("must be positive, got {}", self.lr),
            });
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(ConfigError::Invalid {
                key: "dropout",
                message: format!("must lie in [0, 1), got {}", self.dropout),
            });
        }
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(ConfigError::Invalid {
                key: "eta",
                message: format!("must be nonnegative, got {}", self.eta),
            });
        }
        if !(0.0 < self.tau && self.tau < 1.0) {
            return Err(ConfigError::Invalid {
                key: "tau",
                message: format!("must lie in (0, 1), got {}", self.tau),
            });
        }
        if !(0.0..=1.0).contains(&self.attr_change_prob) {
            return Err(ConfigError::Invalid {
                key: "attr_change_prob",
                message: format!("must lie in [0, 1], got {}", self.attr_change_prob),
            });
        }
        Ok(())
    }

    pub fn parsed_meta_paths(&self) -> Result<Vec<MetaPath>, ViewError> {
        self.meta_paths.iter().map(|n| MetaPath::parse(n)).collect()
    }

    /// Keys whose values fix the parameter shapes. A checkpoint trained
    /// under one setting cannot be loaded under a different one.
    pub fn architecture_diff(&self, other: &RunConfig) -> Vec<String> {
        let mut diff = Vec::new();
        if self.meta_paths != other.meta_paths {
            diff.push(format!(
                "meta_paths ({:?} vs {:?})",
                self.meta_paths, other.meta_paths
            ));
        }
        if self.d0 != other.d0 {
            diff.push(format!("d0 ({} vs {})", self.d0, other.d0));
        }
        if self.d != other.d {
            diff.push(format!("d ({} vs {})", self.d, other.d));
        }
        if self.d_prime != other.d_prime {
            diff.push(format!("d_prime ({} vs {})", self.d_prime, other.d_prime));
        }
        if self.k != other.k {
            diff.push(format!("k ({} vs {})", self.k, other.k));
        }
        if self.d_h != other.d_h {
            diff.push(format!("d_h ({} vs {})", self.d_h, other.d_h));
        }
        diff
    }
}
