//! Run configuration: JSON file plus command-line overrides.
//!
//! Precedence, lowest first: built-in defaults, the `--config` JSON file,
//! explicit flags. Unknown JSON keys are rejected.
//!
//! ```json
//! {
//!   "dataset": "data/articles.csv",
//!   "label_fake": 1,
//!   "embeddings": null,
//!   "builtin_dim": 64,
//!   "hidden_dim": 32,
//!   "heads": 4,
//!   "ffn_dim": null,
//!   "ablation": "full",
//!   "folds": 5,
//!   "seed": 42,
//!   "threads": 1,
//!   "output": "out",
//!   "train": { "learning_rate": 0.001, "batch_size": 32, "max_epochs": 20, "patience": 3 }
//! }
//! ```
//!
//! `embeddings` selects the precomputed encoder; without it the built-in
//! encoder of width `builtin_dim` is trained. `ffn_dim` defaults to twice
//! `hidden_dim`. `train.seed` is always replaced by `seed`.

use std::path::{Path, PathBuf};

use fusenews_core::model::{Ablation, EncoderKind, ModelConfig};
use fusenews_core::train::TrainConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    /// Label value (0 or 1) that marks fake articles.
    pub label_fake: u8,
    /// Interchange file of precomputed semantic vectors.
    pub embeddings: Option<PathBuf>,
    pub builtin_dim: usize,
    pub hidden_dim: usize,
    pub heads: usize,
    pub ffn_dim: Option<usize>,
    /// `semantic-only`, `stat`, `attention` or `full`.
    pub ablation: String,
    pub folds: usize,
    pub seed: u64,
    pub threads: usize,
    pub output: PathBuf,
    pub train: TrainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            label_fake: 1,
            embeddings: None,
            builtin_dim: fusenews_core::encoder::DEFAULT_BUILTIN_DIM,
            hidden_dim: 32,
            heads: 4,
            ffn_dim: None,
            ablation: Ablation::Full.name().into(),
            folds: 5,
            seed: 42,
            threads: 1,
            output: PathBuf::from("out"),
            train: TrainConfig::default(),
        }
    }
}

/// The settings that determine results; paths and thread count are left
/// out so relocated or parallel runs share a hash.
#[derive(Serialize)]
struct Fingerprint<'a> {
    label_fake: u8,
    precomputed: bool,
    builtin_dim: usize,
    hidden_dim: usize,
    heads: usize,
    ffn_dim: Option<usize>,
    ablation: &'a str,
    folds: usize,
    seed: u64,
    train: &'a TrainConfig,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("config {}: {e}", path.display())))
    }

    pub fn ablation(&self) -> Result<Ablation, CliError> {
        Ablation::parse(&self.ablation).ok_or_else(|| {
            CliError::input(format!(
                "unknown ablation {:?}; expected one of semantic-only, stat, attention, full",
                self.ablation
            ))
        })
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: self.seed,
            ..self.train
        }
    }

    /// Model configuration for a semantic input of width `semantic_dim`
    /// (ignored for the built-in encoder, whose width is `builtin_dim`).
    pub fn model_config(&self, semantic_dim: usize) -> Result<ModelConfig, CliError> {
        let (dim, encoder) = match self.embeddings {
            Some(_) => (semantic_dim, EncoderKind::Precomputed),
            // The vocabulary size is fixed once training has built the vocabulary.
            None => (self.builtin_dim, EncoderKind::Builtin { vocab_size: 1 }),
        };
        let mut cfg = ModelConfig::new(dim, encoder)
            .with_hidden(self.hidden_dim, self.heads)
            .with_ablation(self.ablation()?);
        if let Some(f) = self.ffn_dim {
            cfg.ffn_dim = f;
        }
        cfg.validate().map_err(|e| CliError::input(e.to_string()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.label_fake > 1 {
            return Err(CliError::input("label_fake must be 0 or 1"));
        }
        if self.folds < 2 {
            return Err(CliError::input("folds must be at least 2"));
        }
        if self.threads == 0 {
            return Err(CliError::input("threads must be at least 1"));
        }
        self.ablation()?;
        self.train_config().validate().map_err(|e| CliError::input(e.to_string()))?;
        self.model_config(self.builtin_dim.max(1)).map(|_| ())
    }

    /// First 16 hex digits of the SHA-256 of the result-determining settings.
    pub fn hash(&self) -> String {
        let train = self.train_config();
        let fp = Fingerprint {
            label_fake: self.label_fake,
            precomputed: self.embeddings.is_some(),
            builtin_dim: self.builtin_dim,
            hidden_dim: self.hidden_dim,
            heads: self.heads,
            ffn_dim: self.ffn_dim,
            ablation: &self.ablation,
            folds: self.folds,
            seed: self.seed,
            train: &train,
        };
        let digest = Sha256::digest(serde_json::to_vec(&fp).expect("fingerprint serialises"));
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn partial_json_keeps_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"seed": 7, "train": {"max_epochs": 4}}"#).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.train.max_epochs, 4);
        assert_eq!(cfg.train.batch_size, 32);
        assert_eq!(cfg.hidden_dim, 32);
        assert!(serde_json::from_str::<RunConfig>(r#"{"sed": 7}"#).is_err());
    }

    #[test]
    fn hash_ignores_paths_but_not_settings() {
        let a = RunConfig::default();
        let b = RunConfig {
            output: "elsewhere".into(),
            threads: 4,
            ..a.clone()
        };
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
        let c = RunConfig { seed: 1, ..a.clone() };
        assert_ne!(a.hash(), c.hash());
    }
}
