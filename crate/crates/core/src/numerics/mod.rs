//! Dense linear algebra and the differentiable building blocks the fusion
//! model is assembled from.

mod gradcheck;
mod matrix;
mod ops;
mod rng;

pub use gradcheck::{grad_check, GradCheck};
pub use matrix::Matrix;
pub use ops::{
    dot, layer_norm, layer_norm_backward, layer_norm_cached, relu, softmax_backward,
    softmax_stable, xavier_init, LayerNormCache, LAYER_NORM_EPS,
};
pub use rng::Rng;

pub(crate) use ops::softmax_in_place;
