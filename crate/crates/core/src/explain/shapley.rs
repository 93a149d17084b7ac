use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::Example;
use crate::model::SemanticInput;
use crate::text::{StatFeatureVector, FEATURE_NAMES, STAT_DIM};
use crate::train::TrainedModel;
use crate::{Error, Result, Rng};

/// Largest game solved by full coalition enumeration.
pub const MAX_EXACT_PLAYERS: usize = 20;

/// Eight statistics plus the semantic embedding.
pub const SHAPLEY_PLAYERS: usize = STAT_DIM + 1;

/// Per-player attributions of one prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapleyReport {
    pub players: Vec<String>,
    pub phi: Vec<f64>,
    /// Monte-Carlo standard errors; `None` for the exact computation.
    pub std_error: Option<Vec<f64>>,
    /// Value of the empty coalition.
    pub base_value: f64,
    /// Value of the grand coalition.
    pub prediction: f64,
    /// `Σφ − (prediction − base_value)`.
    pub residual: f64,
    /// Number of value-function calls made.
    pub evaluations: usize,
    pub permutations: Option<usize>,
}

impl ShapleyReport {
    /// Player indices by decreasing |φ|, ties by index.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.phi.len()).collect();
        order.sort_by(|&a, &b| {
            libm::fabs(self.phi[b])
                .total_cmp(&libm::fabs(self.phi[a]))
                .then(a.cmp(&b))
        });
        order
    }

    fn finish(players: Vec<String>, phi: Vec<f64>, base_value: f64, prediction: f64) -> Self {
        let residual = phi.iter().sum::<f64>() - (prediction - base_value);
        Self {
            players,
            phi,
            std_error: None,
            base_value,
            prediction,
            residual,
            evaluations: 0,
            permutations: None,
        }
    }
}

pub fn shapley_players() -> Vec<String> {
    FEATURE_NAMES
        .iter()
        .copied()
        .chain(core::iter::once("semantic"))
        .map(String::from)
        .collect()
}

/// Shapley values of an arbitrary game by enumerating all `2^n`
/// coalitions. `value` receives a bitmask with bit `k` set when player `k`
/// is present and is called once per coalition.
pub fn exact_shapley_game<F>(players: Vec<String>, mut value: F) -> Result<ShapleyReport>
where
    F: FnMut(u32) -> Result<f64>,
{
    let n = players.len();
    if n == 0 {
        return Err(Error::Empty("players"));
    }
    if n > MAX_EXACT_PLAYERS {
        return Err(Error::TooManyPlayers {
            players: n,
            max: MAX_EXACT_PLAYERS,
        });
    }
    let coalitions = 1usize << n;
    let values = (0..coalitions as u32).map(&mut value).collect::<Result<Vec<f64>>>()?;
    // weight[s] = s!(n-s-1)!/n! = 1 / (n * C(n-1, s))
    let mut weight = vec![0.0; n];
    let mut binom = 1.0;
    for (s, w) in weight.iter_mut().enumerate() {
        *w = 1.0 / (n as f64 * binom);
        binom = binom * (n - 1 - s) as f64 / (s + 1) as f64;
    }
    let mut phi = vec![0.0; n];
    for (mask, &v) in values.iter().enumerate() {
        let size = (mask as u32).count_ones() as usize;
        for (k, p) in phi.iter_mut().enumerate() {
            if mask & (1 << k) == 0 {
                *p += weight[size] * (values[mask | (1 << k)] - v);
            }
        }
    }
    let mut report = ShapleyReport::finish(players, phi, values[0], values[coalitions - 1]);
    report.evaluations = coalitions;
    Ok(report)
}

/// Monte-Carlo permutation estimate of the Shapley values of a game.
///
/// Each sampled ordering adds players one at a time and credits each with
/// its marginal contribution; φ is the mean over orderings and the standard
/// error is the sample standard deviation over `sqrt(permutations)` (zero
/// for a single ordering).
pub fn sampled_shapley_game<F>(players: Vec<String>, mut value: F, permutations: usize, seed: u64) -> Result<ShapleyReport>
where
    F: FnMut(u32) -> Result<f64>,
{
    let n = players.len();
    if n == 0 {
        return Err(Error::Empty("players"));
    }
    if n > 32 {
        return Err(Error::TooManyPlayers { players: n, max: 32 });
    }
    if permutations == 0 {
        return Err(Error::InvalidArgument("permutations must be at least 1".into()));
    }
    let full_mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let base = value(0)?;
    let full = value(full_mask)?;
    let mut evaluations = 2;
    let mut rng = Rng::new(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut sum = vec![0.0; n];
    let mut sum_sq = vec![0.0; n];
    for _ in 0..permutations {
        rng.shuffle(&mut order);
        let mut mask = 0u32;
        let mut previous = base;
        for (step, &k) in order.iter().enumerate() {
            mask |= 1 << k;
            let current = if step + 1 == n {
                full
            } else {
                evaluations += 1;
                value(mask)?
            };
            let delta = current - previous;
            sum[k] += delta;
            sum_sq[k] += delta * delta;
            previous = current;
        }
    }
    let m = permutations as f64;
    let phi: Vec<f64> = sum.iter().map(|s| s / m).collect();
    let std_error = sum
        .iter()
        .zip(&sum_sq)
        .map(|(s, sq)| {
            if permutations < 2 {
                return 0.0;
            }
            let mean = s / m;
            let var = ((sq - m * mean * mean) / (m - 1.0)).max(0.0);
            libm::sqrt(var / m)
        })
        .collect();
    let mut report = ShapleyReport::finish(players, phi, base, full);
    report.std_error = Some(std_error);
    report.evaluations = evaluations;
    report.permutations = Some(permutations);
    Ok(report)
}

/// Fake-class probability with absent statistics set to the training mean
/// (zero after Z-scoring) and an absent semantic player set to the zero
/// vector.
fn masked_value<'a>(trained: &'a TrainedModel, example: &Example) -> Result<impl FnMut(u32) -> Result<f64> + 'a> {
    let input = trained.prepare(example)?;
    let semantic = trained.semantic_embedding(example)?;
    let zero_semantic = vec![0.0; semantic.len()];
    Ok(move |mask: u32| {
        let mut z = StatFeatureVector::default();
        for k in 0..STAT_DIM {
            if mask & (1 << k) != 0 {
                z[k] = input.z[k];
            }
        }
        let s = if mask & (1 << STAT_DIM) != 0 {
            &semantic
        } else {
            &zero_semantic
        };
        Ok(trained.model.predict_proba(&z, SemanticInput::Dense(s))?[1])
    })
}

pub fn exact_shapley(trained: &TrainedModel, example: &Example) -> Result<ShapleyReport> {
    exact_shapley_game(shapley_players(), masked_value(trained, example)?)
}

pub fn sampled_shapley(trained: &TrainedModel, example: &Example, permutations: usize, seed: u64) -> Result<ShapleyReport> {
    sampled_shapley_game(shapley_players(), masked_value(trained, example)?, permutations, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| alloc::format!("p{i}")).collect()
    }

    #[test]
    fn glove_game() {
        // Players 0 and 1 each hold a left glove, player 2 the right one.
        let v = |m: u32| Ok(if m & 4 != 0 && m & 3 != 0 { 1.0 } else { 0.0 });
        let r = exact_shapley_game(names(3), v).unwrap();
        assert!((r.phi[0] - 1.0 / 6.0).abs() < 1e-15);
        assert!((r.phi[1] - 1.0 / 6.0).abs() < 1e-15);
        assert!((r.phi[2] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.evaluations, 8);
    }

    #[test]
    fn too_many_players() {
        let err = exact_shapley_game(names(21), |_| Ok(0.0)).unwrap_err();
        assert!(matches!(err, Error::TooManyPlayers { players: 21, .. }));
    }

    #[test]
    fn weights_sum_to_one_over_coalitions() {
        // An additive game v(S) = Σ_{k∈S} c_k has φ_k = c_k for any n.
        for n in 1..=12 {
            let c: Vec<f64> = (0..n).map(|k| (k as f64 + 1.0) * 0.37).collect();
            let v = |m: u32| Ok((0..n).filter(|k| m & (1 << k) != 0).map(|k| c[k]).sum());
            let r = exact_shapley_game(names(n), v).unwrap();
            for k in 0..n {
                assert!((r.phi[k] - c[k]).abs() < 1e-12, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn single_permutation_telescopes() {
        let v = |m: u32| Ok(libm::sin(m as f64) * 3.0);
        let r = sampled_shapley_game(names(5), v, 1, 9).unwrap();
        assert!(r.residual.abs() <= 1e-12);
        assert_eq!(r.std_error.unwrap(), vec![0.0; 5]);
    }

    #[test]
    fn sampled_is_seed_deterministic() {
        let v = |m: u32| Ok(libm::cos(m as f64));
        let a = sampled_shapley_game(names(6), v, 50, 3).unwrap();
        let b = sampled_shapley_game(names(6), v, 50, 3).unwrap();
        assert_eq!(a, b);
        assert!(sampled_shapley_game(names(6), v, 0, 3).is_err());
    }

    #[test]
    fn ranking_orders_by_magnitude() {
        let r = ShapleyReport::finish(names(3), vec![0.1, -0.5, 0.3], 0.0, -0.1);
        assert_eq!(r.ranking(), vec![1, 2, 0]);
    }
}
