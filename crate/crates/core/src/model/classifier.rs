use alloc::vec::Vec;

use super::{Dense, FusionModel};
use crate::numerics::{relu, softmax_in_place};
use crate::{Error, Result};

pub(crate) struct ClassifierCache {
    fused: Vec<f64>,
    hidden_pre: Vec<f64>,
    hidden: Vec<f64>,
}

/// One ReLU hidden layer, a linear map to two logits and a softmax.
pub(crate) fn forward(ffn: &Dense, out: &Dense, fused: &[f64]) -> Result<([f64; 2], ClassifierCache)> {
    let mut hidden_pre = ffn.weight.vec_mul(fused)?;
    for (h, b) in hidden_pre.iter_mut().zip(ffn.bias.as_slice()) {
        *h += b;
    }
    let hidden: Vec<f64> = hidden_pre.iter().map(|&x| relu(x)).collect();
    let logits = out.weight.vec_mul(&hidden)?;
    let mut probs = [logits[0] + out.bias.as_slice()[0], logits[1] + out.bias.as_slice()[1]];
    softmax_in_place(&mut probs);
    Ok((
        probs,
        ClassifierCache {
            fused: fused.to_vec(),
            hidden_pre,
            hidden,
        },
    ))
}

/// Accumulates gradients for a logit gradient; returns the fused-vector
/// gradient.
pub(crate) fn backward(
    ffn: &Dense,
    out: &Dense,
    cache: &ClassifierCache,
    d_logits: &[f64; 2],
    g_ffn: &mut Dense,
    g_out: &mut Dense,
) -> Vec<f64> {
    g_out.weight.add_outer(&cache.hidden, d_logits);
    for (b, d) in g_out.bias.as_mut_slice().iter_mut().zip(d_logits) {
        *b += d;
    }
    let mut d_hidden = out.weight.mul_vec(d_logits).expect("classifier shape");
    for (d, &pre) in d_hidden.iter_mut().zip(&cache.hidden_pre) {
        if pre <= 0.0 {
            *d = 0.0;
        }
    }
    g_ffn.weight.add_outer(&cache.fused, &d_hidden);
    for (b, d) in g_ffn.bias.as_mut_slice().iter_mut().zip(&d_hidden) {
        *b += d;
    }
    ffn.weight.mul_vec(&d_hidden).expect("ffn shape")
}

/// Class probabilities `[p_real, p_fake]` for a fused vector.
pub fn classify(fused: &[f64], model: &FusionModel) -> Result<[f64; 2]> {
    let expected = model.config.fused_dim();
    if fused.len() != expected {
        return Err(Error::Length {
            what: "fused vector",
            expected,
            found: fused.len(),
        });
    }
    forward(&model.params.ffn, &model.params.classifier, fused).map(|(p, _)| p)
}
