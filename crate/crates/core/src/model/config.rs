use alloc::format;

use serde::{Deserialize, Serialize};

use crate::text::STAT_DIM;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EncoderKind {
    /// Mean-pooled trainable embeddings over a vocabulary of `vocab_size`
    /// entries (OOV included).
    Builtin { vocab_size: usize },
    /// Vectors supplied from an embedding file.
    Precomputed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub stat_dim: usize,
    pub semantic_dim: usize,
    pub hidden_dim: usize,
    pub heads: usize,
    pub ffn_dim: usize,
    pub use_stat: bool,
    pub use_attention: bool,
    pub use_interaction: bool,
    pub encoder: EncoderKind,
}

impl ModelConfig {
    /// Full model with hidden size 32, 4 heads and an FFN of twice the
    /// hidden size.
    pub fn new(semantic_dim: usize, encoder: EncoderKind) -> Self {
        Self {
            stat_dim: STAT_DIM,
            semantic_dim,
            hidden_dim: 32,
            heads: 4,
            ffn_dim: 64,
            use_stat: true,
            use_attention: true,
            use_interaction: true,
            encoder,
        }
    }

    /// Sets the hidden size and resizes the FFN to `2 · hidden`.
    pub fn with_hidden(mut self, hidden_dim: usize, heads: usize) -> Self {
        self.hidden_dim = hidden_dim;
        self.heads = heads;
        self.ffn_dim = 2 * hidden_dim;
        self
    }

    pub fn with_ablation(mut self, ablation: Ablation) -> Self {
        let (s, a, i) = ablation.flags();
        self.use_stat = s;
        self.use_attention = a;
        self.use_interaction = i;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.stat_dim != STAT_DIM {
            return Err(Error::Config(format!(
                "statistical dimension must be {STAT_DIM}, got {}",
                self.stat_dim
            )));
        }
        for (name, v) in [
            ("semantic_dim", self.semantic_dim),
            ("hidden_dim", self.hidden_dim),
            ("heads", self.heads),
            ("ffn_dim", self.ffn_dim),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        if !self.hidden_dim.is_multiple_of(self.heads) {
            return Err(Error::Config(format!(
                "{} heads do not divide hidden dimension {}",
                self.heads, self.hidden_dim
            )));
        }
        if let EncoderKind::Builtin { vocab_size: 0 } = self.encoder {
            return Err(Error::Config("builtin encoder needs a vocabulary".into()));
        }
        Ok(())
    }

    pub fn key_dim(&self) -> usize {
        self.hidden_dim / self.heads
    }

    pub fn n_tokens(&self) -> usize {
        if self.use_stat {
            self.stat_dim + 1
        } else {
            1
        }
    }

    /// Width of the classifier input: `4·d_h` with the interaction layer,
    /// `2·d_h` (`[u_s, u_t]`) without it.
    pub fn fused_dim(&self) -> usize {
        if self.use_interaction {
            4 * self.hidden_dim
        } else {
            2 * self.hidden_dim
        }
    }

    pub fn ablation(&self) -> Option<Ablation> {
        Ablation::ALL
            .into_iter()
            .find(|a| a.flags() == (self.use_stat, self.use_attention, self.use_interaction))
    }
}

/// Component configurations compared in the ablation study, cumulative in
/// the order listed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ablation {
    SemanticOnly,
    WithStat,
    WithAttention,
    Full,
}

impl Ablation {
    pub const ALL: [Ablation; 4] = [
        Ablation::SemanticOnly,
        Ablation::WithStat,
        Ablation::WithAttention,
        Ablation::Full,
    ];

    /// `(use_stat, use_attention, use_interaction)`.
    pub fn flags(self) -> (bool, bool, bool) {
        match self {
            Ablation::SemanticOnly => (false, false, false),
            Ablation::WithStat => (true, false, false),
            Ablation::WithAttention => (true, true, false),
            Ablation::Full => (true, true, true),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Ablation::SemanticOnly => "semantic-only",
            Ablation::WithStat => "stat",
            Ablation::WithAttention => "attention",
            Ablation::Full => "full",
        }
    }

    pub fn parse(name: &str) -> Option<Ablation> {
        Ablation::ALL.into_iter().find(|a| a.name() == name)
    }
}
