use alloc::vec::Vec;

use super::{FusionModel, ModelConfig, Params};
use crate::numerics::{layer_norm_backward, layer_norm_cached, LayerNormCache, LAYER_NORM_EPS};
use crate::text::{StatFeatureVector, STAT_DIM};
use crate::{Error, Matrix, Result};

/// Feature tokens, one `d_h` row per token.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTokens(pub Matrix);

pub(crate) struct TransformCache {
    z: [f64; STAT_DIM],
    semantic: Vec<f64>,
    stat_norm: Vec<LayerNormCache>,
    semantic_norm: LayerNormCache,
}

pub(crate) fn forward(
    config: &ModelConfig,
    params: &Params,
    z: &StatFeatureVector,
    semantic: &[f64],
) -> Result<(Matrix, TransformCache)> {
    if semantic.len() != config.semantic_dim {
        return Err(Error::Length {
            what: "semantic embedding",
            expected: config.semantic_dim,
            found: semantic.len(),
        });
    }
    let d = config.hidden_dim;
    let mut tokens = Matrix::zeros(config.n_tokens(), d);
    let mut stat_norm = Vec::new();
    if let Some(stat) = &params.stat {
        let mut pre = alloc::vec![0.0; d];
        for k in 0..STAT_DIM {
            for ((p, e), b) in pre.iter_mut().zip(stat.scale.row(k)).zip(stat.bias.row(k)) {
                *p = z.0[k] * e + b;
            }
            let (out, cache) = layer_norm_cached(
                &pre,
                stat.norm.gain.as_slice(),
                stat.norm.bias.as_slice(),
                LAYER_NORM_EPS,
            )?;
            tokens.row_mut(k).copy_from_slice(&out);
            stat_norm.push(cache);
        }
    }
    let sem = &params.semantic;
    let mut pre = sem.weight.vec_mul(semantic)?;
    for (p, b) in pre.iter_mut().zip(sem.bias.as_slice()) {
        *p += b;
    }
    let (out, semantic_norm) =
        layer_norm_cached(&pre, sem.norm.gain.as_slice(), sem.norm.bias.as_slice(), LAYER_NORM_EPS)?;
    tokens.row_mut(config.n_tokens() - 1).copy_from_slice(&out);
    Ok((
        tokens,
        TransformCache {
            z: z.0,
            semantic: semantic.to_vec(),
            stat_norm,
            semantic_norm,
        },
    ))
}

/// Accumulates parameter gradients; returns the gradient w.r.t. the
/// semantic embedding.
pub(crate) fn backward(
    config: &ModelConfig,
    params: &Params,
    cache: &TransformCache,
    d_tokens: &Matrix,
    grads: &mut Params,
) -> Vec<f64> {
    if let (Some(stat), Some(g)) = (&params.stat, &mut grads.stat) {
        for k in 0..STAT_DIM {
            let dpre = layer_norm_backward(
                &cache.stat_norm[k],
                stat.norm.gain.as_slice(),
                d_tokens.row(k),
                g.norm.gain.as_mut_slice(),
                g.norm.bias.as_mut_slice(),
            );
            let zk = cache.z[k];
            for ((ds, db), dp) in g.scale.row_mut(k).iter_mut().zip(g.bias.row_mut(k)).zip(&dpre) {
                *ds += zk * dp;
                *db += dp;
            }
        }
    }
    let sem = &params.semantic;
    let g = &mut grads.semantic;
    let dpre = layer_norm_backward(
        &cache.semantic_norm,
        sem.norm.gain.as_slice(),
        d_tokens.row(config.n_tokens() - 1),
        g.norm.gain.as_mut_slice(),
        g.norm.bias.as_mut_slice(),
    );
    g.weight.add_outer(&cache.semantic, &dpre);
    for (b, dp) in g.bias.as_mut_slice().iter_mut().zip(&dpre) {
        *b += dp;
    }
    sem.weight.mul_vec(&dpre).expect("projection shape checked in forward")
}

/// Maps Z-scored statistics and a semantic embedding to feature tokens.
pub fn transform_features(
    z: &StatFeatureVector,
    semantic: &[f64],
    model: &FusionModel,
) -> Result<FeatureTokens> {
    forward(&model.config, &model.params, z, semantic).map(|(t, _)| FeatureTokens(t))
}
