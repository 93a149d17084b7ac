use alloc::vec::Vec;

use super::AttentionParams;
use crate::numerics::{dot, softmax_backward, softmax_in_place};
use crate::{Error, Matrix, Result};

/// Per-head row-stochastic `n × n` attention weights.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionMap {
    pub heads: Vec<Matrix>,
}

impl AttentionMap {
    /// Element-wise mean over heads.
    pub fn mean(&self) -> Matrix {
        let mut out = Matrix::zeros(self.heads[0].rows(), self.heads[0].cols());
        for h in &self.heads {
            out.add_assign(h).expect("heads share a shape");
        }
        out.scale(1.0 / self.heads.len() as f64);
        out
    }
}

pub(crate) struct AttentionCache {
    x: Matrix,
    q: Matrix,
    k: Matrix,
    v: Matrix,
    concat: Matrix,
    pub(crate) probs: Vec<Matrix>,
}

pub(crate) fn forward(p: &AttentionParams, heads: usize, x: &Matrix) -> Result<(Matrix, AttentionCache)> {
    let d = x.cols();
    if !d.is_multiple_of(heads) || p.w_q.shape() != (d, d) {
        return Err(Error::Shape {
            op: "feature_attention",
            left_rows: x.rows(),
            left_cols: d,
            right_rows: p.w_q.rows(),
            right_cols: p.w_q.cols(),
        });
    }
    let n = x.rows();
    let dk = d / heads;
    let scale = 1.0 / libm::sqrt(dk as f64);
    let q = x.matmul(&p.w_q)?;
    let k = x.matmul(&p.w_k)?;
    let v = x.matmul(&p.w_v)?;
    let mut concat = Matrix::zeros(n, d);
    let mut probs = Vec::with_capacity(heads);
    for h in 0..heads {
        let cols = h * dk..(h + 1) * dk;
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            let qi = &q.row(i)[cols.clone()];
            let row = a.row_mut(i);
            for (j, e) in row.iter_mut().enumerate() {
                *e = dot(qi, &k.row(j)[cols.clone()]) * scale;
            }
            softmax_in_place(row);
        }
        for i in 0..n {
            let out = &mut concat.row_mut(i)[cols.clone()];
            for j in 0..n {
                let w = a[(i, j)];
                for (o, vj) in out.iter_mut().zip(&v.row(j)[cols.clone()]) {
                    *o += w * vj;
                }
            }
        }
        probs.push(a);
    }
    let mut y = concat.matmul(&p.w_o)?;
    y.add_assign(x)?;
    Ok((
        y,
        AttentionCache {
            x: x.clone(),
            q,
            k,
            v,
            concat,
            probs,
        },
    ))
}

/// Accumulates parameter gradients into `g`; returns the input gradient.
pub(crate) fn backward(
    p: &AttentionParams,
    heads: usize,
    cache: &AttentionCache,
    dy: &Matrix,
    g: &mut AttentionParams,
) -> Matrix {
    let (n, d) = cache.x.shape();
    let dk = d / heads;
    let scale = 1.0 / libm::sqrt(dk as f64);
    g.w_o.add_assign(&cache.concat.t_matmul(dy).unwrap()).unwrap();
    let dconcat = dy.matmul_t(&p.w_o).unwrap();
    let mut dq = Matrix::zeros(n, d);
    let mut dk_m = Matrix::zeros(n, d);
    let mut dv = Matrix::zeros(n, d);
    for (h, a) in cache.probs.iter().enumerate() {
        let cols = h * dk..(h + 1) * dk;
        for i in 0..n {
            let dci = &dconcat.row(i)[cols.clone()];
            let da: Vec<f64> = (0..n).map(|j| dot(dci, &cache.v.row(j)[cols.clone()])).collect();
            for j in 0..n {
                let w = a[(i, j)];
                for (o, x) in dv.row_mut(j)[cols.clone()].iter_mut().zip(dci) {
                    *o += w * x;
                }
            }
            let de = softmax_backward(a.row(i), &da);
            for (j, &dij) in de.iter().enumerate() {
                if dij == 0.0 {
                    continue;
                }
                let s = dij * scale;
                for (o, kj) in dq.row_mut(i)[cols.clone()].iter_mut().zip(&cache.k.row(j)[cols.clone()]) {
                    *o += s * kj;
                }
                for (o, qi) in dk_m.row_mut(j)[cols.clone()].iter_mut().zip(&cache.q.row(i)[cols.clone()]) {
                    *o += s * qi;
                }
            }
        }
    }
    let x = &cache.x;
    g.w_q.add_assign(&x.t_matmul(&dq).unwrap()).unwrap();
    g.w_k.add_assign(&x.t_matmul(&dk_m).unwrap()).unwrap();
    g.w_v.add_assign(&x.t_matmul(&dv).unwrap()).unwrap();
    let mut dx = dy.clone();
    dx.add_assign(&dq.matmul_t(&p.w_q).unwrap()).unwrap();
    dx.add_assign(&dk_m.matmul_t(&p.w_k).unwrap()).unwrap();
    dx.add_assign(&dv.matmul_t(&p.w_v).unwrap()).unwrap();
    dx
}

/// Multi-head scaled dot-product attention across feature tokens.
///
/// For head `h`, `α_ij = softmax_j((h_i W_q)·(h_j W_k) / √d_k)` over the
/// head's column block; head outputs `Σ_j α_ij (h_j W_v)` are
/// concatenated, projected by `W_o` and added to the input tokens.
pub fn feature_attention(tokens: &Matrix, p: &AttentionParams, heads: usize) -> Result<(Matrix, AttentionMap)> {
    if heads == 0 {
        return Err(Error::Config("attention needs at least one head".into()));
    }
    forward(p, heads, tokens).map(|(y, c)| (y, AttentionMap { heads: c.probs }))
}
