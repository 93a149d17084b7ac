use crate::model::Params;
use crate::{Error, Result};

/// First and second moment estimates plus the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Params,
    pub v: Params,
    pub step: u64,
}

impl AdamState {
    pub fn new(params: &Params) -> Self {
        Self {
            m: params.zeros_like(),
            v: params.zeros_like(),
            step: 0,
        }
    }
}

/// Bias-corrected Adam update of one flat block; `step` is the 1-based
/// step number.
#[allow(clippy::too_many_arguments)]
pub fn adam_update(
    params: &mut [f64],
    grads: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    step: u64,
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
) {
    let c1 = 1.0 - libm::pow(beta1, step as f64);
    let c2 = 1.0 - libm::pow(beta2, step as f64);
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
        let m_hat = m[i] / c1;
        let v_hat = v[i] / c2;
        params[i] -= lr * m_hat / (libm::sqrt(v_hat) + eps);
    }
}

/// One Adam step over every parameter block.
pub fn adam_step(params: &mut Params, grads: &Params, state: &mut AdamState, config: &super::TrainConfig) -> Result<()> {
    let grad_blocks = grads.blocks();
    let mut m_blocks = state.m.blocks_mut();
    let mut v_blocks = state.v.blocks_mut();
    let mut p_blocks = params.blocks_mut();
    if grad_blocks.len() != p_blocks.len() || m_blocks.len() != p_blocks.len() {
        return Err(Error::Config("gradient layout differs from parameters".into()));
    }
    for (((p, g), m), v) in p_blocks
        .iter()
        .zip(&grad_blocks)
        .zip(&m_blocks)
        .zip(&v_blocks)
    {
        if p.1.shape() != g.1.shape() || p.1.shape() != m.1.shape() || p.1.shape() != v.1.shape() {
            return Err(Error::Shape {
                op: p.0,
                left_rows: p.1.rows(),
                left_cols: p.1.cols(),
                right_rows: g.1.rows(),
                right_cols: g.1.cols(),
            });
        }
    }
    state.step += 1;
    for (((p, g), m), v) in p_blocks
        .iter_mut()
        .zip(&grad_blocks)
        .zip(m_blocks.iter_mut())
        .zip(v_blocks.iter_mut())
    {
        adam_update(
            p.1.as_mut_slice(),
            g.1.as_slice(),
            m.1.as_mut_slice(),
            v.1.as_mut_slice(),
            state.step,
            config.learning_rate,
            config.beta1,
            config.beta2,
            config.epsilon,
        );
    }
    Ok(())
}
