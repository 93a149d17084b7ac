//! Versioned weights files.
//!
//! A weights file is a JSON document holding the model configuration, the
//! frozen feature order, the fitted normaliser, the vocabulary (built-in
//! encoder only) and every parameter block. Block values are little-endian
//! `f64` bytes in base 64, so saving and loading is bit-exact.

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use fusenews_core::encoder::Vocab;
use fusenews_core::model::{EncoderKind, FusionModel, ModelConfig, Params};
use fusenews_core::text::{FitTag, NormalizationStats, FEATURE_NAMES};
use fusenews_core::train::{TrainConfig, TrainedModel};
use fusenews_core::Matrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const WEIGHTS_FORMAT: &str = "fusenews-weights";
pub const WEIGHTS_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum WeightsError {
    #[error("weights file is not valid JSON: {0}")]
    Json(String),
    #[error("weights header field \"format\" must be \"{WEIGHTS_FORMAT}\"")]
    Format,
    #[error("weights header field \"version\" is {0}; this build reads version {WEIGHTS_VERSION}")]
    Version(String),
    #[error("weights file is malformed: {0}")]
    Malformed(String),
    #[error("weights feature order {0:?} does not match this build")]
    FeatureOrder(Vec<String>),
    #[error("weights block {name}: {reason}")]
    Block { name: String, reason: String },
    #[error("weights do not fit their configuration: {0}")]
    Model(fusenews_core::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct VocabRecord {
    tokens: Vec<String>,
    fitted_on: FitTag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct BlockRecord {
    name: String,
    rows: usize,
    cols: usize,
    data: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsFile {
    format: String,
    version: u64,
    seed: u64,
    config_hash: String,
    config: ModelConfig,
    train: Option<TrainConfig>,
    feature_order: Vec<String>,
    normalizer: NormalizationStats,
    vocab: Option<VocabRecord>,
    blocks: Vec<BlockRecord>,
}

/// Provenance recorded alongside the weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightsMeta {
    pub seed: u64,
    pub config_hash: String,
    pub train: Option<TrainConfig>,
}

fn encode_block(m: &Matrix) -> String {
    let bytes: Vec<u8> = m.as_slice().iter().flat_map(|v| v.to_le_bytes()).collect();
    STANDARD.encode(bytes)
}

fn decode_block(b: &BlockRecord) -> Result<Matrix, WeightsError> {
    let err = |reason: String| WeightsError::Block {
        name: b.name.clone(),
        reason,
    };
    let bytes = STANDARD.decode(&b.data).map_err(|e| err(e.to_string()))?;
    if bytes.len() != b.rows * b.cols * 8 {
        return Err(err(format!(
            "{} bytes for a {}x{} block",
            bytes.len(),
            b.rows,
            b.cols
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Matrix::from_vec(b.rows, b.cols, values).map_err(|e| err(e.to_string()))
}

/// Serialises a trained model; identical inputs give identical bytes.
pub fn save_weights(trained: &TrainedModel, meta: &WeightsMeta) -> String {
    let file = WeightsFile {
        format: WEIGHTS_FORMAT.into(),
        version: WEIGHTS_VERSION,
        seed: meta.seed,
        config_hash: meta.config_hash.clone(),
        config: trained.model.config,
        train: meta.train,
        feature_order: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        normalizer: trained.normalizer.clone(),
        vocab: trained.vocab.as_ref().map(|v| VocabRecord {
            tokens: v.tokens().to_vec(),
            fitted_on: v.fitted_on,
        }),
        blocks: trained
            .model
            .params
            .blocks()
            .into_iter()
            .map(|(name, m)| BlockRecord {
                name: name.into(),
                rows: m.rows(),
                cols: m.cols(),
                data: encode_block(m),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("weights serialise");
    text.push('\n');
    text
}

pub fn load_weights(text: &str) -> Result<(TrainedModel, WeightsMeta), WeightsError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| WeightsError::Json(e.to_string()))?;
    if value.get("format").and_then(|f| f.as_str()) != Some(WEIGHTS_FORMAT) {
        return Err(WeightsError::Format);
    }
    match value.get("version") {
        Some(v) if v.as_u64() == Some(WEIGHTS_VERSION) => {}
        Some(v) => return Err(WeightsError::Version(v.to_string())),
        None => return Err(WeightsError::Version("missing".into())),
    }
    let file: WeightsFile = serde_json::from_value(value).map_err(|e| WeightsError::Malformed(e.to_string()))?;
    if file.feature_order.iter().map(String::as_str).ne(FEATURE_NAMES.iter().copied()) {
        return Err(WeightsError::FeatureOrder(file.feature_order));
    }
    let blocks = file
        .blocks
        .iter()
        .map(|b| Ok((b.name.clone(), decode_block(b)?)))
        .collect::<Result<Vec<_>, WeightsError>>()?;
    let params = Params::from_blocks(&file.config, blocks).map_err(WeightsError::Model)?;
    let model = FusionModel::from_params(file.config, params).map_err(WeightsError::Model)?;
    let vocab = match (file.config.encoder, file.vocab) {
        (EncoderKind::Builtin { vocab_size }, Some(v)) => {
            let vocab = Vocab::from_tokens(v.tokens, v.fitted_on).map_err(WeightsError::Model)?;
            if vocab.len() != vocab_size {
                return Err(WeightsError::Malformed(format!(
                    "vocabulary has {} tokens but the encoder expects {vocab_size}",
                    vocab.len()
                )));
            }
            Some(vocab)
        }
        (EncoderKind::Builtin { .. }, None) => {
            return Err(WeightsError::Malformed("built-in encoder without a vocabulary".into()))
        }
        (EncoderKind::Precomputed, None) => None,
        (EncoderKind::Precomputed, Some(_)) => {
            return Err(WeightsError::Malformed("vocabulary given for a precomputed encoder".into()))
        }
    };
    Ok((
        TrainedModel {
            model,
            normalizer: file.normalizer,
            vocab,
        },
        WeightsMeta {
            seed: file.seed,
            config_hash: file.config_hash,
            train: file.train,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use fusenews_core::text::STAT_DIM;
    use fusenews_core::Rng;

    fn sample(encoder: EncoderKind) -> TrainedModel {
        let cfg = ModelConfig::new(5, encoder).with_hidden(8, 2);
        let tag = FitTag {
            held_out_fold: Some(3),
            samples: 17,
        };
        TrainedModel {
            model: FusionModel::new(cfg, &mut Rng::new(1)).unwrap(),
            normalizer: NormalizationStats {
                mean: [0.1, 1.0 / 3.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0],
                std: [1.0 / 7.0; STAT_DIM],
                fitted_on: tag,
            },
            vocab: match encoder {
                EncoderKind::Builtin { .. } => Some(
                    Vocab::from_tokens(vec!["<oov>".into(), "a".into(), "b".into()], tag).unwrap(),
                ),
                EncoderKind::Precomputed => None,
            },
        }
    }

    fn meta() -> WeightsMeta {
        WeightsMeta {
            seed: 9,
            config_hash: "abc".into(),
            train: Some(TrainConfig::default()),
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        for encoder in [EncoderKind::Precomputed, EncoderKind::Builtin { vocab_size: 3 }] {
            let t = sample(encoder);
            let text = save_weights(&t, &meta());
            let (back, m) = load_weights(&text).unwrap();
            assert_eq!(back, t);
            assert_eq!(m, meta());
            assert_eq!(save_weights(&back, &m), text);
        }
    }

    #[test]
    fn version_problems_name_the_field() {
        let text = save_weights(&sample(EncoderKind::Precomputed), &meta());
        let bumped = text.replace("\"version\": 1", "\"version\": 7");
        let err = load_weights(&bumped).unwrap_err();
        assert!(matches!(err, WeightsError::Version(_)));
        assert!(err.to_string().contains("version"));
        let missing = text.replace("\"version\": 1,", "");
        assert!(load_weights(&missing).unwrap_err().to_string().contains("version"));
    }

    #[test]
    fn damaged_blocks_are_rejected() {
        let t = sample(EncoderKind::Precomputed);
        let text = save_weights(&t, &meta());
        let truncated = text.replacen("\"rows\": 1,", "\"rows\": 2,", 1);
        assert!(load_weights(&truncated).is_err());
        assert!(matches!(load_weights("{"), Err(WeightsError::Json(_))));
    }
}
