use alloc::vec;
use alloc::vec::Vec;

use super::{Matrix, Rng};
use crate::{Error, Result};

pub const LAYER_NORM_EPS: f64 = 1e-5;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// Max-shifted softmax over `v`.
pub fn softmax_stable(v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::Empty("softmax"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("softmax"));
    }
    let mut out = v.to_vec();
    softmax_in_place(&mut out);
    Ok(out)
}

pub(crate) fn softmax_in_place(v: &mut [f64]) {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for x in v.iter_mut() {
        *x = libm::exp(*x - max);
        sum += *x;
    }
    let inv = 1.0 / sum;
    v.iter_mut().for_each(|x| *x *= inv);
}

/// Gradient w.r.t. the softmax input given its output `p` and the gradient
/// `dp` w.r.t. that output.
pub fn softmax_backward(p: &[f64], dp: &[f64]) -> Vec<f64> {
    let inner = dot(p, dp);
    p.iter().zip(dp).map(|(pi, di)| pi * (di - inner)).collect()
}

/// Intermediate values kept for the layer-norm backward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerNormCache {
    pub normalized: Vec<f64>,
    pub inv_std: f64,
}

pub fn layer_norm(v: &[f64], gamma: &[f64], beta: &[f64], eps: f64) -> Result<Vec<f64>> {
    layer_norm_cached(v, gamma, beta, eps).map(|(out, _)| out)
}

pub fn layer_norm_cached(
    v: &[f64],
    gamma: &[f64],
    beta: &[f64],
    eps: f64,
) -> Result<(Vec<f64>, LayerNormCache)> {
    if v.is_empty() {
        return Err(Error::Empty("layer_norm"));
    }
    for (what, other) in [("layer_norm gamma", gamma), ("layer_norm beta", beta)] {
        if other.len() != v.len() {
            return Err(Error::Length {
                what,
                expected: v.len(),
                found: other.len(),
            });
        }
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "layer_norm eps must be positive, got {eps}"
        )));
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let inv_std = 1.0 / libm::sqrt(var + eps);
    let normalized: Vec<f64> = v.iter().map(|x| (x - mean) * inv_std).collect();
    let out = normalized
        .iter()
        .zip(gamma.iter().zip(beta))
        .map(|(x, (g, b))| x * g + b)
        .collect();
    Ok((out, LayerNormCache { normalized, inv_std }))
}

/// Returns the input gradient and accumulates `dgamma`, `dbeta`.
pub fn layer_norm_backward(
    cache: &LayerNormCache,
    gamma: &[f64],
    dy: &[f64],
    dgamma: &mut [f64],
    dbeta: &mut [f64],
) -> Vec<f64> {
    let n = dy.len() as f64;
    let mut dxhat = vec![0.0; dy.len()];
    for i in 0..dy.len() {
        dxhat[i] = dy[i] * gamma[i];
        dgamma[i] += dy[i] * cache.normalized[i];
        dbeta[i] += dy[i];
    }
    let mean_dxhat = dxhat.iter().sum::<f64>() / n;
    let mean_dxhat_xhat = dot(&dxhat, &cache.normalized) / n;
    dxhat
        .iter()
        .zip(&cache.normalized)
        .map(|(d, x)| cache.inv_std * (d - mean_dxhat - x * mean_dxhat_xhat))
        .collect()
}

/// Glorot-uniform initialisation: entries in `±sqrt(6 / (rows + cols))`.
pub fn xavier_init(rows: usize, cols: usize, rng: &mut Rng) -> Matrix {
    let bound = libm::sqrt(6.0 / (rows + cols) as f64);
    let data = (0..rows * cols)
        .map(|_| rng.uniform(-bound, bound))
        .collect();
    Matrix::from_vec(rows, cols, data).expect("length is rows * cols")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use crate::numerics::Rng;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn softmax_examples() {
        let third = 1.0 / 3.0;
        assert!(close(
            &softmax_stable(&[0.0, 0.0, 0.0]).unwrap(),
            &[third, third, third],
            1e-15
        ));
        assert!(close(
            &softmax_stable(&[0.0, libm::log(3.0)]).unwrap(),
            &[0.25, 0.75],
            1e-15
        ));
        assert_eq!(softmax_stable(&[1000.0, 1000.0]).unwrap(), [0.5, 0.5]);
        assert_eq!(softmax_stable(&[]), Err(Error::Empty("softmax")));
        assert_eq!(
            softmax_stable(&[f64::NAN]),
            Err(Error::NonFinite("softmax"))
        );
    }

    #[test]
    fn layer_norm_examples() {
        let ones = [1.0; 4];
        let zeros = [0.0; 4];
        let out = layer_norm(&[2.5; 4], &ones, &zeros, LAYER_NORM_EPS).unwrap();
        assert_eq!(out, [0.0; 4]);

        let out = layer_norm(&[1.0, 3.0], &[1.0; 2], &[0.0; 2], LAYER_NORM_EPS).unwrap();
        assert!(close(&out, &[-1.0, 1.0], 1e-4));

        let v = [0.3, -1.2, 4.0, 2.2];
        let base = layer_norm(&v, &ones, &zeros, LAYER_NORM_EPS).unwrap();
        let affine = layer_norm(&v, &[2.0; 4], &[1.0; 4], LAYER_NORM_EPS).unwrap();
        let expected: Vec<f64> = base.iter().map(|x| 2.0 * x + 1.0).collect();
        assert!(close(&affine, &expected, 1e-14));
    }

    #[test]
    fn layer_norm_rejects_mismatched_lengths() {
        assert!(matches!(
            layer_norm(&[1.0, 2.0], &[1.0], &[0.0, 0.0], 1e-5),
            Err(Error::Length { .. })
        ));
        assert!(matches!(
            layer_norm(&[1.0, 2.0], &[1.0, 1.0], &[0.0], 1e-5),
            Err(Error::Length { .. })
        ));
    }

    #[test]
    fn layer_norm_moments_at_moderate_variance() {
        let v = [30.0, -10.0, 75.0, 2.5, 20.0];
        let out = layer_norm(&v, &[1.0; 5], &[0.0; 5], LAYER_NORM_EPS).unwrap();
        let mean = out.iter().sum::<f64>() / 5.0;
        let var = out.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 5.0;
        assert!(mean.abs() < 1e-9);
        assert!((var - 1.0).abs() < 1e-6);
    }

    #[test]
    fn layer_norm_moments() {
        let v = [3.0, -1.0, 7.5, 0.25, 2.0];
        let out = layer_norm(&v, &[1.0; 5], &[0.0; 5], LAYER_NORM_EPS).unwrap();
        let mean = out.iter().sum::<f64>() / 5.0;
        let var = out.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 5.0;
        let raw_mean = v.iter().sum::<f64>() / 5.0;
        let raw_var = v.iter().map(|x| (x - raw_mean).powi(2)).sum::<f64>() / 5.0;
        assert!(mean.abs() < 1e-12);
        assert!((var - raw_var / (raw_var + LAYER_NORM_EPS)).abs() < 1e-12);
    }

    #[test]
    fn xavier_bounds_and_determinism() {
        let a = xavier_init(1, 1, &mut Rng::new(42));
        let b = xavier_init(1, 1, &mut Rng::new(42));
        assert_eq!(a, b);
        assert!(a[(0, 0)].abs() <= libm::sqrt(3.0));

        let big = xavier_init(64, 64, &mut Rng::new(42));
        let bound = libm::sqrt(6.0 / 128.0);
        assert!(big.as_slice().iter().all(|x| x.abs() <= bound));
        let mean = big.as_slice().iter().sum::<f64>() / big.len() as f64;
        assert!(mean.abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn softmax_backward_matches_finite_differences() {
        let logits = [0.3, -1.1, 2.0, 0.7];
        let upstream = [0.5, -0.2, 1.3, 0.1];
        let p = softmax_stable(&logits).unwrap();
        let analytic = softmax_backward(&p, &upstream);
        let f = |x: &[f64]| dot(&softmax_stable(x).unwrap(), &upstream);
        let check = crate::numerics::grad_check(f, &logits, &analytic, 1e-5).unwrap();
        assert!(check.max_rel_error < 1e-8);
    }

    #[test]
    fn layer_norm_backward_matches_finite_differences() {
        let v = [0.4, -2.0, 1.5, 3.3, -0.7];
        let gamma = [1.2, 0.8, -0.5, 2.0, 1.0];
        let beta = [0.1, 0.0, -0.3, 0.2, 0.5];
        let upstream = [0.9, -1.0, 0.3, 0.25, -0.6];
        let (_, cache) = layer_norm_cached(&v, &gamma, &beta, LAYER_NORM_EPS).unwrap();
        let mut dg = [0.0; 5];
        let mut db = [0.0; 5];
        let dx = layer_norm_backward(&cache, &gamma, &upstream, &mut dg, &mut db);

        let f = |x: &[f64]| dot(&layer_norm(x, &gamma, &beta, LAYER_NORM_EPS).unwrap(), &upstream);
        assert!(crate::numerics::grad_check(f, &v, &dx, 1e-5).unwrap().max_rel_error < 1e-8);
        let f = |g: &[f64]| dot(&layer_norm(&v, g, &beta, LAYER_NORM_EPS).unwrap(), &upstream);
        assert!(crate::numerics::grad_check(f, &gamma, &dg, 1e-5).unwrap().max_rel_error < 1e-8);
        let f = |b: &[f64]| dot(&layer_norm(&v, &gamma, b, LAYER_NORM_EPS).unwrap(), &upstream);
        assert!(crate::numerics::grad_check(f, &beta, &db, 1e-5).unwrap().max_rel_error < 1e-8);
    }

    proptest! {
        #[test]
        fn softmax_sums_to_one_and_is_shift_invariant(
            v in proptest::collection::vec(-50.0f64..50.0, 1..20),
            shift in -100.0f64..100.0,
        ) {
            let p = softmax_stable(&v).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(p.iter().all(|&x| x >= 0.0));
            let shifted: Vec<f64> = v.iter().map(|x| x + shift).collect();
            let q = softmax_stable(&shifted).unwrap();
            prop_assert!(close(&p, &q, 1e-12));
        }

        #[test]
        fn layer_norm_is_affine_invariant(
            v in proptest::collection::vec(-10.0f64..10.0, 2..16),
            a in 0.5f64..10.0,
            b in -20.0f64..20.0,
        ) {
            let n = v.len();
            let mean = v.iter().sum::<f64>() / n as f64;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
            prop_assume!(var > 0.5);
            let ones = vec![1.0; n];
            let zeros = vec![0.0; n];
            let base = layer_norm(&v, &ones, &zeros, LAYER_NORM_EPS).unwrap();
            let moved: Vec<f64> = v.iter().map(|x| a * x + b).collect();
            // Scaling the inputs by a scales the variance by a², so eps follows.
            let other = layer_norm(&moved, &ones, &zeros, LAYER_NORM_EPS * a * a).unwrap();
            prop_assert!(close(&base, &other, 1e-9));
        }

        #[test]
        fn layer_norm_affine_invariance_at_fixed_eps(
            v in proptest::collection::vec(-100.0f64..100.0, 2..16),
            a in 1.0f64..10.0,
            b in -20.0f64..20.0,
        ) {
            let n = v.len();
            let mean = v.iter().sum::<f64>() / n as f64;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
            prop_assume!(var > 100.0);
            let ones = vec![1.0; n];
            let zeros = vec![0.0; n];
            let base = layer_norm(&v, &ones, &zeros, LAYER_NORM_EPS).unwrap();
            let moved: Vec<f64> = v.iter().map(|x| a * x + b).collect();
            let other = layer_norm(&moved, &ones, &zeros, LAYER_NORM_EPS).unwrap();
            prop_assert!(close(&base, &other, 1e-6));
        }
    }
}
