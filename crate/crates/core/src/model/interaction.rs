use alloc::vec;
use alloc::vec::Vec;

use crate::numerics::{softmax_backward, softmax_in_place};
use crate::{Error, Matrix, Result};

/// Row-softmax-normalised `d_h × d_h` coupling between the pooled
/// statistical and semantic representations.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionMatrix(pub Matrix);

/// Cross-feature interaction.
///
/// `S_ij = u_s,i · u_t,j / √d_h`, `M = row_softmax(S)`, `v = M·u_t`,
/// `v' = Mᵀ·u_s`; the fused vector is `[u_s, u_t, v, v']`.
pub fn cross_interaction(u_s: &[f64], u_t: &[f64]) -> Result<(InteractionMatrix, Vec<f64>)> {
    let d = u_s.len();
    if d == 0 {
        return Err(Error::Empty("cross_interaction"));
    }
    if u_t.len() != d {
        return Err(Error::Length {
            what: "semantic representation",
            expected: d,
            found: u_t.len(),
        });
    }
    let scale = 1.0 / libm::sqrt(d as f64);
    let mut m = Matrix::zeros(d, d);
    for i in 0..d {
        let row = m.row_mut(i);
        for (s, t) in row.iter_mut().zip(u_t) {
            *s = u_s[i] * t * scale;
        }
        softmax_in_place(row);
    }
    let v = m.mul_vec(u_t)?;
    let v_prime = m.vec_mul(u_s)?;
    let mut fused = Vec::with_capacity(4 * d);
    fused.extend_from_slice(u_s);
    fused.extend_from_slice(u_t);
    fused.extend_from_slice(&v);
    fused.extend_from_slice(&v_prime);
    Ok((InteractionMatrix(m), fused))
}

/// Gradients w.r.t. `u_s` and `u_t` given the gradient of the fused vector.
pub(crate) fn backward(u_s: &[f64], u_t: &[f64], m: &Matrix, d_fused: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let d = u_s.len();
    let scale = 1.0 / libm::sqrt(d as f64);
    let dv = &d_fused[2 * d..3 * d];
    let dv_prime = &d_fused[3 * d..];
    let mut du_s = d_fused[..d].to_vec();
    let mut du_t = d_fused[d..2 * d].to_vec();
    // v = M u_t, v' = Mᵀ u_s
    for (t, x) in du_t.iter_mut().zip(m.vec_mul(dv).expect("square")) {
        *t += x;
    }
    for (s, x) in du_s.iter_mut().zip(m.mul_vec(dv_prime).expect("square")) {
        *s += x;
    }
    let mut dm_row = vec![0.0; d];
    for i in 0..d {
        for j in 0..d {
            dm_row[j] = dv[i] * u_t[j] + u_s[i] * dv_prime[j];
        }
        let ds = softmax_backward(m.row(i), &dm_row);
        for j in 0..d {
            du_s[i] += ds[j] * u_t[j] * scale;
            du_t[j] += ds[j] * u_s[i] * scale;
        }
    }
    (du_s, du_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{dot, grad_check};
    use crate::Rng;

    #[test]
    fn zero_statistics_give_uniform_rows() {
        let (m, fused) = cross_interaction(&[0.0; 4], &[0.3, -1.0, 2.0, 0.5]).unwrap();
        assert_eq!(m.0.shape(), (4, 4));
        assert!(m.0.as_slice().iter().all(|&x| (x - 0.25).abs() < 1e-15));
        assert_eq!(fused.len(), 16);
    }

    #[test]
    fn rows_sum_to_one_and_match_direct_recomputation() {
        let mut rng = Rng::new(8);
        let u_s: Vec<f64> = (0..6).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let u_t: Vec<f64> = (0..6).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let (m, fused) = cross_interaction(&u_s, &u_t).unwrap();
        for i in 0..6 {
            assert!((m.0.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let denom: f64 = (0..6).map(|k| libm::exp(u_s[i] * u_t[k] / libm::sqrt(6.0))).sum();
            for j in 0..6 {
                let direct = libm::exp(u_s[i] * u_t[j] / libm::sqrt(6.0)) / denom;
                assert!((m.0[(i, j)] - direct).abs() < 1e-12);
            }
        }
        assert_eq!(fused.len(), 24);
        assert_eq!(&fused[..6], &u_s[..]);
        assert_eq!(&fused[6..12], &u_t[..]);
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = Rng::new(21);
        let d = 5;
        let x: Vec<f64> = (0..2 * d).map(|_| rng.uniform(-1.5, 1.5)).collect();
        let upstream: Vec<f64> = (0..4 * d).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let (m, _) = cross_interaction(&x[..d], &x[d..]).unwrap();
        let (du_s, du_t) = backward(&x[..d], &x[d..], &m.0, &upstream);
        let analytic: Vec<f64> = du_s.into_iter().chain(du_t).collect();
        let f = |p: &[f64]| dot(&cross_interaction(&p[..d], &p[d..]).unwrap().1, &upstream);
        assert!(grad_check(f, &x, &analytic, 1e-5).unwrap().max_rel_error < 1e-8);
    }

    #[test]
    fn rejects_mismatched_inputs() {
        assert!(cross_interaction(&[1.0, 2.0], &[1.0]).is_err());
        assert!(cross_interaction(&[], &[]).is_err());
    }
}
