use serde::{Deserialize, Serialize};

use super::{StatFeatureVector, STAT_DIM};
use crate::{Error, Result};

/// Records which data a normaliser (or vocabulary) was fitted on.
///
/// `held_out_fold` names the cross-validation fold whose samples were
/// excluded from fitting; `None` means the whole dataset was used (final
/// model training outside cross-validation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FitTag {
    pub held_out_fold: Option<u32>,
    pub samples: usize,
}

impl FitTag {
    /// Errors unless the fit excluded `fold`.
    pub fn assert_excludes(&self, fold: u32) -> Result<()> {
        if self.held_out_fold == Some(fold) {
            Ok(())
        } else {
            Err(Error::Leakage {
                fitted: self.held_out_fold,
                evaluated: fold,
            })
        }
    }
}

/// Per-feature population mean and standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub mean: [f64; STAT_DIM],
    pub std: [f64; STAT_DIM],
    pub fitted_on: FitTag,
}

impl NormalizationStats {
    /// Zero-variance features; they normalise to 0.
    pub fn is_degenerate(&self, feature: usize) -> bool {
        self.std[feature] == 0.0
    }
}

/// Two-pass population statistics over the training vectors.
pub fn fit_normalizer(train: &[StatFeatureVector], held_out_fold: Option<u32>) -> Result<NormalizationStats> {
    if train.len() < 2 {
        return Err(Error::TooFewSamples {
            what: "fit_normalizer",
            needed: 2,
            found: train.len(),
        });
    }
    let n = train.len() as f64;
    let mut mean = [0.0; STAT_DIM];
    for v in train {
        for (m, x) in mean.iter_mut().zip(v.0) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = [0.0; STAT_DIM];
    for v in train {
        for k in 0..STAT_DIM {
            let d = v.0[k] - mean[k];
            var[k] += d * d;
        }
    }
    let std = var.map(|s| libm::sqrt(s / n));
    Ok(NormalizationStats {
        mean,
        std,
        fitted_on: FitTag {
            held_out_fold,
            samples: train.len(),
        },
    })
}

/// `(x − μ) / σ` per feature, 0 where `σ = 0`.
pub fn apply_zscore(x: &StatFeatureVector, stats: &NormalizationStats) -> StatFeatureVector {
    let mut out = [0.0; STAT_DIM];
    for k in 0..STAT_DIM {
        out[k] = if stats.std[k] == 0.0 {
            0.0
        } else {
            (x.0[k] - stats.mean[k]) / stats.std[k]
        };
    }
    StatFeatureVector(out)
}
