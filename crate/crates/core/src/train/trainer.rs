use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{adam_step, AdamState, ConfusionMatrix, Scores};
use crate::dataset::Example;
use crate::encoder::{build_vocab, Vocab, DEFAULT_VOCAB_CAP};
use crate::model::{EncoderKind, Forward, FusionModel, ModelConfig, SemanticInput};
use crate::text::{apply_zscore, fit_normalizer, FitTag, Label, NormalizationStats, StatFeatureVector};
use crate::{Error, Result, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without a validation-F1 improvement before stopping.
    pub patience: usize,
    /// Share of each training split held back for early stopping.
    pub validation_fraction: f64,
    pub vocab_cap: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 32,
            max_epochs: 20,
            patience: 3,
            validation_fraction: 0.1,
            vocab_cap: DEFAULT_VOCAB_CAP,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = self.learning_rate > 0.0
            && self.epsilon > 0.0
            && self.batch_size > 0
            && self.max_epochs > 0
            && self.patience > 0
            && self.vocab_cap > 0;
        let betas = (0.0..1.0).contains(&self.beta1) && (0.0..1.0).contains(&self.beta2);
        let fraction = (0.0..1.0).contains(&self.validation_fraction);
        if !positive || !betas || !fraction {
            return Err(Error::Config(alloc::format!("invalid training configuration {self:?}")));
        }
        if self.patience > self.max_epochs {
            return Err(Error::Config("patience exceeds max_epochs".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_f1: f64,
}

/// Model inputs for one example after normalisation and vocabulary lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedInput {
    pub z: StatFeatureVector,
    pub semantic: PreparedSemantic,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PreparedSemantic {
    Dense(Vec<f64>),
    Tokens(Vec<u32>),
}

impl PreparedInput {
    pub fn semantic_input(&self) -> SemanticInput<'_> {
        match &self.semantic {
            PreparedSemantic::Dense(v) => SemanticInput::Dense(v),
            PreparedSemantic::Tokens(ids) => SemanticInput::Tokens(ids),
        }
    }
}

/// A fusion model together with the normaliser and vocabulary fitted on its
/// training split.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub model: FusionModel,
    pub normalizer: NormalizationStats,
    pub vocab: Option<Vocab>,
}

impl TrainedModel {
    pub fn prepare(&self, example: &Example) -> Result<PreparedInput> {
        let z = apply_zscore(&example.stats, &self.normalizer);
        let semantic = match (&self.model.config.encoder, &self.vocab) {
            (EncoderKind::Builtin { .. }, Some(vocab)) => PreparedSemantic::Tokens(vocab.ids(&example.tokens)),
            (EncoderKind::Builtin { .. }, None) => {
                return Err(Error::Config("built-in encoder without a vocabulary".into()))
            }
            (EncoderKind::Precomputed, _) => {
                let v = example
                    .embedding
                    .as_ref()
                    .ok_or_else(|| Error::MissingEmbedding(example.id.clone()))?;
                if v.len() != self.model.config.semantic_dim {
                    return Err(Error::Length {
                        what: "precomputed embedding",
                        expected: self.model.config.semantic_dim,
                        found: v.len(),
                    });
                }
                PreparedSemantic::Dense(v.clone())
            }
        };
        Ok(PreparedInput { z, semantic })
    }

    /// Semantic embedding the model sees for `example`.
    pub fn semantic_embedding(&self, example: &Example) -> Result<Vec<f64>> {
        match self.prepare(example)?.semantic {
            PreparedSemantic::Dense(v) => Ok(v),
            PreparedSemantic::Tokens(ids) => self.model.embed(&ids),
        }
    }

    pub fn forward(&self, example: &Example) -> Result<Forward> {
        let input = self.prepare(example)?;
        self.model.forward(&input.z, input.semantic_input())
    }

    /// `[p_real, p_fake]`.
    pub fn predict(&self, example: &Example) -> Result<[f64; 2]> {
        self.forward(example).map(|f| f.probs)
    }

    /// Argmax decision, i.e. fake when `p_fake > 0.5`.
    pub fn predict_label(&self, example: &Example) -> Result<Label> {
        self.predict(example).map(|p| decide(&p))
    }
}

pub(crate) fn decide(probs: &[f64; 2]) -> Label {
    if probs[1] > probs[0] {
        Label::Fake
    } else {
        Label::Real
    }
}

pub struct TrainOutcome {
    pub model: TrainedModel,
    pub history: Vec<EpochRecord>,
    /// 1-based epoch whose weights were kept.
    pub best_epoch: usize,
    pub validation: Scores,
}

/// Seeded stratified split of `indices` into (train, validation).
fn split_validation(examples: &[Example], indices: &[usize], fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut train = Vec::new();
    let mut val = Vec::new();
    for class in [Label::Real, Label::Fake] {
        let mut members: Vec<usize> = indices.iter().copied().filter(|&i| examples[i].label == class).collect();
        Rng::derive(seed, 100 + class.class_index() as u64).shuffle(&mut members);
        let mut n_val = libm::round(fraction * members.len() as f64) as usize;
        if fraction > 0.0 && members.len() >= 2 {
            n_val = n_val.clamp(1, members.len() - 1);
        }
        val.extend_from_slice(&members[..n_val]);
        train.extend_from_slice(&members[n_val..]);
    }
    train.sort_unstable();
    val.sort_unstable();
    (train, val)
}

fn evaluate(trained: &TrainedModel, inputs: &[(PreparedInput, Label)]) -> Result<(f64, Scores)> {
    let mut confusion = ConfusionMatrix::default();
    let mut loss = 0.0;
    for (input, label) in inputs {
        let p = trained.model.predict_proba(&input.z, input.semantic_input())?;
        loss += super::cross_entropy(&p, label.class_index());
        confusion.record(label.class_index(), decide(&p).class_index());
    }
    Ok((loss / inputs.len().max(1) as f64, confusion.scores()))
}

/// Trains a fusion model on `indices`.
///
/// A seeded stratified share of the indices (`validation_fraction`) is held
/// back for early stopping on F1; the normaliser and, for the built-in
/// encoder, the vocabulary are fitted on the remaining training part only
/// and tagged with `held_out_fold`. The weights of the best validation
/// epoch are returned.
pub fn train(
    examples: &[Example],
    indices: &[usize],
    model_config: &ModelConfig,
    config: &TrainConfig,
    held_out_fold: Option<u32>,
) -> Result<TrainOutcome> {
    config.validate()?;
    if indices.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let has = |l: Label| indices.iter().any(|&i| examples[i].label == l);
    if !has(Label::Real) || !has(Label::Fake) {
        return Err(Error::SingleClass);
    }
    let (train_idx, mut val_idx) = split_validation(examples, indices, config.validation_fraction, config.seed);
    if val_idx.is_empty() {
        // Too small to hold anything back; early stopping watches training F1.
        val_idx = train_idx.clone();
    }
    let tag = FitTag {
        held_out_fold,
        samples: train_idx.len(),
    };
    let stats: Vec<StatFeatureVector> = train_idx.iter().map(|&i| examples[i].stats).collect();
    let mut normalizer = fit_normalizer(&stats, held_out_fold)?;
    normalizer.fitted_on = tag;

    let mut cfg = *model_config;
    let vocab = match cfg.encoder {
        EncoderKind::Builtin { .. } => {
            let v = build_vocab(train_idx.iter().map(|&i| &examples[i].tokens), config.vocab_cap, tag)?;
            cfg.encoder = EncoderKind::Builtin { vocab_size: v.len() };
            Some(v)
        }
        EncoderKind::Precomputed => None,
    };
    let model = FusionModel::new(cfg, &mut Rng::derive(config.seed, 2))?;
    let mut trained = TrainedModel {
        model,
        normalizer,
        vocab,
    };

    let prepare = |idx: &[usize], t: &TrainedModel| -> Result<Vec<(PreparedInput, Label)>> {
        idx.iter()
            .map(|&i| Ok((t.prepare(&examples[i])?, examples[i].label)))
            .collect()
    };
    let train_inputs = prepare(&train_idx, &trained)?;
    let val_inputs = prepare(&val_idx, &trained)?;

    let mut adam = AdamState::new(&trained.model.params);
    let mut grads = trained.model.params.zeros_like();
    let mut order: Vec<usize> = (0..train_inputs.len()).collect();
    let mut shuffler = Rng::derive(config.seed, 3);
    let mut history = Vec::new();
    let mut best: Option<(f64, usize, crate::model::Params, Scores)> = None;
    let mut since_best = 0;

    for epoch in 1..=config.max_epochs {
        shuffler.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            grads.blocks_mut().into_iter().for_each(|(_, m)| m.fill(0.0));
            let weight = 1.0 / batch.len() as f64;
            for &b in batch {
                let (input, label) = &train_inputs[b];
                let fwd = trained.model.forward(&input.z, input.semantic_input())?;
                epoch_loss += trained
                    .model
                    .accumulate_gradients(&fwd, label.class_index(), weight, &mut grads);
            }
            adam_step(&mut trained.model.params, &grads, &mut adam, config)?;
        }
        let (val_loss, scores) = evaluate(&trained, &val_inputs)?;
        history.push(EpochRecord {
            epoch,
            train_loss: epoch_loss / train_inputs.len() as f64,
            val_loss,
            val_f1: scores.f1,
        });
        let improved = best.as_ref().is_none_or(|(f1, ..)| scores.f1 > *f1);
        if improved {
            best = Some((scores.f1, epoch, trained.model.params.clone(), scores));
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= config.patience {
                break;
            }
        }
    }
    let (_, best_epoch, params, validation) = best.expect("at least one epoch runs");
    trained.model.params = params;
    Ok(TrainOutcome {
        model: trained,
        history,
        best_epoch,
        validation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_validate() {
        let c = TrainConfig::default();
        c.validate().unwrap();
        assert_eq!((c.learning_rate, c.beta1, c.beta2, c.epsilon), (1e-3, 0.9, 0.999, 1e-8));
        assert_eq!((c.batch_size, c.max_epochs, c.patience), (32, 20, 3));
        let bad = TrainConfig { patience: 30, ..c };
        assert!(bad.validate().is_err());
        let bad = TrainConfig { learning_rate: 0.0, ..c };
        assert!(bad.validate().is_err());
    }
}
