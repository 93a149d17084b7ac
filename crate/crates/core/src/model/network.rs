use alloc::vec;
use alloc::vec::Vec;

use super::{attention, classifier, interaction, transform};
use super::{AttentionMap, EncoderKind, InteractionMatrix, ModelConfig, Params};
use crate::encoder::{mean_pool, mean_pool_backward};
use crate::numerics::{grad_check, GradCheck};
use crate::text::{StatFeatureVector, STAT_DIM};
use crate::train::cross_entropy;
use crate::{Error, Matrix, Result, Rng};

/// Semantic side of one forward pass.
#[derive(Debug, Clone, Copy)]
pub enum SemanticInput<'a> {
    /// A ready embedding of length `semantic_dim`.
    Dense(&'a [f64]),
    /// Vocabulary ids, mean-pooled through the built-in embedding table.
    Tokens(&'a [u32]),
}

/// Configuration plus parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionModel {
    pub config: ModelConfig,
    pub params: Params,
}

struct ForwardCache {
    token_ids: Option<Vec<u32>>,
    transform: transform::TransformCache,
    attention: Option<attention::AttentionCache>,
    u_s: Vec<f64>,
    u_t: Vec<f64>,
    classifier: classifier::ClassifierCache,
}

/// Result of a forward pass, with everything the backward pass needs.
pub struct Forward {
    /// `[p_real, p_fake]`.
    pub probs: [f64; 2],
    pub attention: Option<AttentionMap>,
    pub interaction: Option<InteractionMatrix>,
    pub fused: Vec<f64>,
    cache: ForwardCache,
}

impl Forward {
    pub fn fake_probability(&self) -> f64 {
        self.probs[1]
    }
}

impl FusionModel {
    pub fn new(config: ModelConfig, rng: &mut Rng) -> Result<Self> {
        let params = Params::init(&config, rng)?;
        Ok(Self { config, params })
    }

    pub fn from_params(config: ModelConfig, params: Params) -> Result<Self> {
        config.validate()?;
        let blocks = params
            .blocks()
            .into_iter()
            .map(|(n, m)| (alloc::string::String::from(n), m.clone()))
            .collect();
        let params = Params::from_blocks(&config, blocks)?;
        Ok(Self { config, params })
    }

    pub fn parameter_count(&self) -> usize {
        self.params.count()
    }

    /// Mean-pooled embedding of vocabulary ids (built-in encoder only).
    pub fn embed(&self, ids: &[u32]) -> Result<Vec<f64>> {
        let table = self.embedding_table()?;
        if let Some(&bad) = ids.iter().find(|&&i| i as usize >= table.rows()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "token id {bad} outside vocabulary of {}",
                table.rows()
            )));
        }
        Ok(mean_pool(ids, table))
    }

    fn embedding_table(&self) -> Result<&Matrix> {
        match (&self.config.encoder, &self.params.embedding) {
            (EncoderKind::Builtin { .. }, Some(t)) => Ok(t),
            _ => Err(Error::Config(
                "token input needs the built-in encoder".into(),
            )),
        }
    }

    pub fn forward(&self, z: &StatFeatureVector, semantic: SemanticInput<'_>) -> Result<Forward> {
        let (embedding, token_ids) = match semantic {
            SemanticInput::Dense(s) => (s.to_vec(), None),
            SemanticInput::Tokens(ids) => (self.embed(ids)?, Some(ids.to_vec())),
        };
        let cfg = &self.config;
        let p = &self.params;
        let (tokens, transform_cache) = transform::forward(cfg, p, z, &embedding)?;
        let (attended, attention_cache) = match &p.attention {
            Some(ap) => {
                let (y, c) = attention::forward(ap, cfg.heads, &tokens)?;
                (y, Some(c))
            }
            None => (tokens, None),
        };
        let d = cfg.hidden_dim;
        let mut u_s = vec![0.0; d];
        if cfg.use_stat {
            for k in 0..STAT_DIM {
                for (u, x) in u_s.iter_mut().zip(attended.row(k)) {
                    *u += x;
                }
            }
            u_s.iter_mut().for_each(|u| *u /= STAT_DIM as f64);
        }
        let u_t = attended.row(cfg.n_tokens() - 1).to_vec();
        let (interaction, fused) = if cfg.use_interaction {
            let (m, fused) = interaction::cross_interaction(&u_s, &u_t)?;
            (Some(m), fused)
        } else {
            let mut fused = u_s.clone();
            fused.extend_from_slice(&u_t);
            (None, fused)
        };
        let (probs, classifier_cache) = classifier::forward(&p.ffn, &p.classifier, &fused)?;
        let attention = attention_cache.as_ref().map(|c| AttentionMap {
            heads: c.probs.clone(),
        });
        Ok(Forward {
            probs,
            attention,
            interaction,
            fused,
            cache: ForwardCache {
                token_ids,
                transform: transform_cache,
                attention: attention_cache,
                u_s,
                u_t,
                classifier: classifier_cache,
            },
        })
    }

    pub fn predict_proba(&self, z: &StatFeatureVector, semantic: SemanticInput<'_>) -> Result<[f64; 2]> {
        self.forward(z, semantic).map(|f| f.probs)
    }

    /// Gradients of the cross-entropy loss for `label` (class index).
    pub fn backward(&self, forward: &Forward, label: usize) -> Params {
        let mut grads = self.params.zeros_like();
        self.accumulate_gradients(forward, label, 1.0, &mut grads);
        grads
    }

    /// Adds `weight ·` the loss gradient into `grads` and returns the loss.
    pub fn accumulate_gradients(&self, forward: &Forward, label: usize, weight: f64, grads: &mut Params) -> f64 {
        let loss = cross_entropy(&forward.probs, label);
        let mut d_logits = forward.probs;
        d_logits[label] -= 1.0;
        d_logits.iter_mut().for_each(|d| *d *= weight);
        self.backward_from_logits(forward, &d_logits, grads);
        loss
    }

    /// Backpropagates an arbitrary logit gradient.
    pub fn backward_from_logits(&self, forward: &Forward, d_logits: &[f64; 2], grads: &mut Params) {
        let cfg = &self.config;
        let p = &self.params;
        let c = &forward.cache;
        let d = cfg.hidden_dim;
        let d_fused = classifier::backward(
            &p.ffn,
            &p.classifier,
            &c.classifier,
            d_logits,
            &mut grads.ffn,
            &mut grads.classifier,
        );
        let (du_s, du_t) = match &forward.interaction {
            Some(m) => interaction::backward(&c.u_s, &c.u_t, &m.0, &d_fused),
            None => (d_fused[..d].to_vec(), d_fused[d..2 * d].to_vec()),
        };
        let n = cfg.n_tokens();
        let mut d_attended = Matrix::zeros(n, d);
        if cfg.use_stat {
            for k in 0..STAT_DIM {
                for (o, g) in d_attended.row_mut(k).iter_mut().zip(&du_s) {
                    *o = g / STAT_DIM as f64;
                }
            }
        }
        d_attended.row_mut(n - 1).copy_from_slice(&du_t);
        let d_tokens = match (&p.attention, &c.attention, &mut grads.attention) {
            (Some(ap), Some(ac), Some(ag)) => attention::backward(ap, cfg.heads, ac, &d_attended, ag),
            _ => d_attended,
        };
        let d_semantic = transform::backward(cfg, p, &c.transform, &d_tokens, grads);
        if let (Some(ids), Some(g)) = (&c.token_ids, &mut grads.embedding) {
            mean_pool_backward(ids, &d_semantic, g);
        }
    }

    /// Compares the analytic gradient of every parameter block with central
    /// differences of the loss.
    pub fn check_gradients(
        &self,
        z: &StatFeatureVector,
        semantic: SemanticInput<'_>,
        label: usize,
        h: f64,
    ) -> Result<Vec<(&'static str, GradCheck)>> {
        let forward = self.forward(z, semantic)?;
        let grads = self.backward(&forward, label);
        let mut probe = self.clone();
        let mut out = Vec::new();
        for (bi, (name, g)) in grads.blocks().into_iter().enumerate() {
            let theta = probe.params.blocks()[bi].1.as_slice().to_vec();
            let set = |probe: &mut FusionModel, values: &[f64]| {
                probe.params.blocks_mut()[bi].1.as_mut_slice().copy_from_slice(values);
            };
            let check = grad_check(
                |point| {
                    set(&mut probe, point);
                    probe.loss(z, semantic, label).unwrap_or(f64::NAN)
                },
                &theta,
                g.as_slice(),
                h,
            )?;
            set(&mut probe, &theta);
            out.push((name, check));
        }
        Ok(out)
    }

    /// Loss of one example, used by gradient checks.
    pub fn loss(&self, z: &StatFeatureVector, semantic: SemanticInput<'_>, label: usize) -> Result<f64> {
        self.forward(z, semantic).map(|f| cross_entropy(&f.probs, label))
    }
}
