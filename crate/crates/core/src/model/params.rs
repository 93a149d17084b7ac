use alloc::vec::Vec;

use super::{EncoderKind, ModelConfig};
use crate::numerics::xavier_init;
use crate::text::STAT_DIM;
use crate::{Error, Matrix, Result, Rng};

/// Affine parameters of a layer normalisation, stored as `1 × d` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerNormParams {
    pub gain: Matrix,
    pub bias: Matrix,
}

impl LayerNormParams {
    fn identity(dim: usize) -> Self {
        Self {
            gain: Matrix::filled(1, dim, 1.0),
            bias: Matrix::zeros(1, dim),
        }
    }
}

/// Per-feature token embedders: token `k` is `layer_norm(z_k · scale_k + bias_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StatEmbedder {
    pub scale: Matrix,
    pub bias: Matrix,
    pub norm: LayerNormParams,
}

/// Semantic token: `layer_norm(s · weight + bias)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticProjection {
    pub weight: Matrix,
    pub bias: Matrix,
    pub norm: LayerNormParams,
}

/// Query, key and value projections for all heads, each `d_h × d_h`; head
/// `h` owns columns `h·d_k .. (h+1)·d_k`. `w_o` projects the concatenated
/// head outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionParams {
    pub w_q: Matrix,
    pub w_k: Matrix,
    pub w_v: Matrix,
    pub w_o: Matrix,
}

/// `y = x · weight + bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weight: Matrix,
    pub bias: Matrix,
}

/// All learnable parameters. Gradients and optimiser moments reuse this
/// layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub embedding: Option<Matrix>,
    pub stat: Option<StatEmbedder>,
    pub semantic: SemanticProjection,
    pub attention: Option<AttentionParams>,
    pub ffn: Dense,
    pub classifier: Dense,
}

impl Params {
    pub fn init(config: &ModelConfig, rng: &mut Rng) -> Result<Self> {
        config.validate()?;
        let d = config.hidden_dim;
        let embedding = match config.encoder {
            EncoderKind::Builtin { vocab_size } => {
                Some(xavier_init(vocab_size, config.semantic_dim, rng))
            }
            EncoderKind::Precomputed => None,
        };
        let stat = config.use_stat.then(|| StatEmbedder {
            scale: xavier_init(STAT_DIM, d, rng),
            bias: xavier_init(STAT_DIM, d, rng),
            norm: LayerNormParams::identity(d),
        });
        let semantic = SemanticProjection {
            weight: xavier_init(config.semantic_dim, d, rng),
            bias: Matrix::zeros(1, d),
            norm: LayerNormParams::identity(d),
        };
        let attention = config.use_attention.then(|| AttentionParams {
            w_q: xavier_init(d, d, rng),
            w_k: xavier_init(d, d, rng),
            w_v: xavier_init(d, d, rng),
            w_o: xavier_init(d, d, rng),
        });
        let ffn = Dense {
            weight: xavier_init(config.fused_dim(), config.ffn_dim, rng),
            bias: Matrix::zeros(1, config.ffn_dim),
        };
        let classifier = Dense {
            weight: xavier_init(config.ffn_dim, 2, rng),
            bias: Matrix::zeros(1, 2),
        };
        Ok(Self {
            embedding,
            stat,
            semantic,
            attention,
            ffn,
            classifier,
        })
    }

    /// Same layout, all zeros.
    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.blocks_mut().into_iter().for_each(|(_, m)| m.fill(0.0));
        z
    }

    /// Named parameter blocks in serialisation order.
    pub fn blocks(&self) -> Vec<(&'static str, &Matrix)> {
        let mut out = Vec::with_capacity(18);
        if let Some(e) = &self.embedding {
            out.push(("encoder.embedding", e));
        }
        if let Some(s) = &self.stat {
            out.push(("stat.scale", &s.scale));
            out.push(("stat.bias", &s.bias));
            out.push(("stat.norm.gain", &s.norm.gain));
            out.push(("stat.norm.bias", &s.norm.bias));
        }
        let sem = &self.semantic;
        out.push(("semantic.weight", &sem.weight));
        out.push(("semantic.bias", &sem.bias));
        out.push(("semantic.norm.gain", &sem.norm.gain));
        out.push(("semantic.norm.bias", &sem.norm.bias));
        if let Some(a) = &self.attention {
            out.push(("attention.w_q", &a.w_q));
            out.push(("attention.w_k", &a.w_k));
            out.push(("attention.w_v", &a.w_v));
            out.push(("attention.w_o", &a.w_o));
        }
        out.push(("ffn.weight", &self.ffn.weight));
        out.push(("ffn.bias", &self.ffn.bias));
        out.push(("classifier.weight", &self.classifier.weight));
        out.push(("classifier.bias", &self.classifier.bias));
        out
    }

    pub fn blocks_mut(&mut self) -> Vec<(&'static str, &mut Matrix)> {
        let mut out = Vec::with_capacity(18);
        if let Some(e) = &mut self.embedding {
            out.push(("encoder.embedding", e));
        }
        if let Some(s) = &mut self.stat {
            out.push(("stat.scale", &mut s.scale));
            out.push(("stat.bias", &mut s.bias));
            out.push(("stat.norm.gain", &mut s.norm.gain));
            out.push(("stat.norm.bias", &mut s.norm.bias));
        }
        let sem = &mut self.semantic;
        out.push(("semantic.weight", &mut sem.weight));
        out.push(("semantic.bias", &mut sem.bias));
        out.push(("semantic.norm.gain", &mut sem.norm.gain));
        out.push(("semantic.norm.bias", &mut sem.norm.bias));
        if let Some(a) = &mut self.attention {
            out.push(("attention.w_q", &mut a.w_q));
            out.push(("attention.w_k", &mut a.w_k));
            out.push(("attention.w_v", &mut a.w_v));
            out.push(("attention.w_o", &mut a.w_o));
        }
        out.push(("ffn.weight", &mut self.ffn.weight));
        out.push(("ffn.bias", &mut self.ffn.bias));
        out.push(("classifier.weight", &mut self.classifier.weight));
        out.push(("classifier.bias", &mut self.classifier.bias));
        out
    }

    /// Total number of scalar parameters.
    pub fn count(&self) -> usize {
        self.blocks().iter().map(|(_, m)| m.len()).sum()
    }

    /// All parameters concatenated in block order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.count());
        for (_, m) in self.blocks() {
            out.extend_from_slice(m.as_slice());
        }
        out
    }

    /// Inverse of [`Params::flatten`].
    pub fn assign_flat(&mut self, flat: &[f64]) -> Result<()> {
        let expected = self.count();
        if flat.len() != expected {
            return Err(Error::Length {
                what: "flat parameter vector",
                expected,
                found: flat.len(),
            });
        }
        let mut offset = 0;
        for (_, m) in self.blocks_mut() {
            let n = m.len();
            m.as_mut_slice().copy_from_slice(&flat[offset..offset + n]);
            offset += n;
        }
        Ok(())
    }

    /// Block names and shapes a configuration requires, in block order.
    pub fn layout(config: &ModelConfig) -> Vec<(&'static str, (usize, usize))> {
        let d = config.hidden_dim;
        let mut out = Vec::new();
        if let EncoderKind::Builtin { vocab_size } = config.encoder {
            out.push(("encoder.embedding", (vocab_size, config.semantic_dim)));
        }
        if config.use_stat {
            out.push(("stat.scale", (STAT_DIM, d)));
            out.push(("stat.bias", (STAT_DIM, d)));
            out.push(("stat.norm.gain", (1, d)));
            out.push(("stat.norm.bias", (1, d)));
        }
        out.push(("semantic.weight", (config.semantic_dim, d)));
        out.push(("semantic.bias", (1, d)));
        out.push(("semantic.norm.gain", (1, d)));
        out.push(("semantic.norm.bias", (1, d)));
        if config.use_attention {
            for name in ["attention.w_q", "attention.w_k", "attention.w_v", "attention.w_o"] {
                out.push((name, (d, d)));
            }
        }
        out.push(("ffn.weight", (config.fused_dim(), config.ffn_dim)));
        out.push(("ffn.bias", (1, config.ffn_dim)));
        out.push(("classifier.weight", (config.ffn_dim, 2)));
        out.push(("classifier.bias", (1, 2)));
        out
    }

    /// Builds parameters from named blocks, checking them against the
    /// layout of `config`.
    pub fn from_blocks(config: &ModelConfig, blocks: Vec<(alloc::string::String, Matrix)>) -> Result<Self> {
        let mut params = Params::init(config, &mut Rng::new(0))?;
        let layout = Params::layout(config);
        if blocks.len() != layout.len() {
            return Err(Error::Config(alloc::format!(
                "expected {} parameter blocks, found {}",
                layout.len(),
                blocks.len()
            )));
        }
        for ((name, target), (got_name, m)) in params.blocks_mut().into_iter().zip(blocks) {
            if name != got_name {
                return Err(Error::Config(alloc::format!(
                    "expected parameter block {name}, found {got_name}"
                )));
            }
            if target.shape() != m.shape() {
                return Err(Error::Shape {
                    op: name,
                    left_rows: target.rows(),
                    left_cols: target.cols(),
                    right_rows: m.rows(),
                    right_cols: m.cols(),
                });
            }
            *target = m;
        }
        Ok(params)
    }
}
