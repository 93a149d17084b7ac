use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::model::Ablation;

/// Binary confusion counts with fake as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    /// From `(actual, predicted)` class-index pairs.
    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Self {
        let mut c = Self::default();
        for (actual, predicted) in pairs {
            c.record(actual, predicted);
        }
        c
    }

    pub fn record(&mut self, actual: usize, predicted: usize) {
        match (actual, predicted) {
            (1, 1) => self.tp += 1,
            (0, 1) => self.fp += 1,
            (1, _) => self.fn_ += 1,
            _ => self.tn += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn scores(&self) -> Scores {
        let precision_undefined = self.tp + self.fp == 0;
        let recall_undefined = self.tp + self.fn_ == 0;
        let precision = if precision_undefined {
            0.0
        } else {
            self.tp as f64 / (self.tp + self.fp) as f64
        };
        let recall = if recall_undefined {
            0.0
        } else {
            self.tp as f64 / (self.tp + self.fn_) as f64
        };
        let accuracy = if self.total() == 0 {
            0.0
        } else {
            (self.tp + self.tn) as f64 / self.total() as f64
        };
        Scores {
            accuracy,
            precision,
            recall,
            f1: f1_score(precision, recall),
            undefined: precision_undefined || recall_undefined || precision + recall == 0.0,
        }
    }
}

/// `2PR / (P + R)`, 0 when `P + R = 0`.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Set when a zero denominator forced a score to 0.
    pub undefined: bool,
}

/// Test-fold outcome of one cross-validation round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub fold: u32,
    pub confusion: ConfusionMatrix,
    pub scores: Scores,
    pub epochs_trained: usize,
    pub best_epoch: usize,
    pub inference_ms_total: f64,
    pub ms_per_sample: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub ablation: Option<Ablation>,
    pub folds: Vec<FoldMetrics>,
    pub mean: Scores,
    /// Sample standard deviation over folds (0 for a single fold).
    pub std: Scores,
    pub mean_ms_per_sample: f64,
}

impl MetricsReport {
    pub fn from_folds(ablation: Option<Ablation>, mut folds: Vec<FoldMetrics>) -> Self {
        folds.sort_by_key(|f| f.fold);
        let n = folds.len() as f64;
        let pick: [fn(&Scores) -> f64; 4] = [|s| s.accuracy, |s| s.precision, |s| s.recall, |s| s.f1];
        let mut mean = [0.0; 4];
        let mut std = [0.0; 4];
        for (i, get) in pick.iter().enumerate() {
            let values: Vec<f64> = folds.iter().map(|f| get(&f.scores)).collect();
            let m = if values.is_empty() { 0.0 } else { values.iter().sum::<f64>() / n };
            mean[i] = m;
            std[i] = if values.len() < 2 {
                0.0
            } else {
                libm::sqrt(values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0))
            };
        }
        let mean_ms_per_sample = if folds.is_empty() {
            0.0
        } else {
            folds.iter().map(|f| f.ms_per_sample).sum::<f64>() / n
        };
        let undefined = folds.iter().any(|f| f.scores.undefined);
        let as_scores = |v: [f64; 4]| Scores {
            accuracy: v[0],
            precision: v[1],
            recall: v[2],
            f1: v[3],
            undefined,
        };
        Self {
            ablation,
            mean: as_scores(mean),
            std: as_scores(std),
            folds,
            mean_ms_per_sample,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_confusion() {
        let c = ConfusionMatrix { tp: 9, fp: 1, fn_: 1, tn: 9 };
        let s = c.scores();
        for v in [s.accuracy, s.precision, s.recall, s.f1] {
            assert!((v - 0.9).abs() < 1e-15);
        }
        assert!(!s.undefined);
    }

    #[test]
    fn reported_precision_recall_pairs() {
        assert!((f1_score(0.943, 0.947) - 0.945).abs() <= 5e-4);
        assert!((f1_score(0.925, 0.935) - 0.930).abs() <= 5e-4);
    }

    #[test]
    fn zero_denominators_flagged_not_nan() {
        let s = ConfusionMatrix { tp: 0, fp: 0, fn_: 0, tn: 5 }.scores();
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
        assert!(s.undefined);
        assert_eq!(s.accuracy, 1.0);
        let s = ConfusionMatrix::default().scores();
        assert!(!s.accuracy.is_nan() && s.undefined);
    }

    #[test]
    fn from_pairs_counts() {
        let c = ConfusionMatrix::from_pairs([(1, 1), (1, 0), (0, 1), (0, 0), (0, 0)]);
        assert_eq!(c, ConfusionMatrix { tp: 1, fp: 1, fn_: 1, tn: 2 });
        assert_eq!(c.total(), 5);
    }

    #[test]
    fn aggregate_is_mean_of_folds() {
        let fold = |i: u32, c: ConfusionMatrix| FoldMetrics {
            fold: i,
            confusion: c,
            scores: c.scores(),
            epochs_trained: 1,
            best_epoch: 1,
            inference_ms_total: 0.0,
            ms_per_sample: 0.0,
        };
        let folds = alloc::vec![
            fold(1, ConfusionMatrix { tp: 3, fp: 1, fn_: 0, tn: 4 }),
            fold(0, ConfusionMatrix { tp: 4, fp: 0, fn_: 1, tn: 3 }),
        ];
        let r = MetricsReport::from_folds(None, folds.clone());
        assert_eq!(r.folds[0].fold, 0);
        let mean_f1 = (folds[0].scores.f1 + folds[1].scores.f1) / 2.0;
        assert!((r.mean.f1 - mean_f1).abs() < 1e-12);
        let d = folds[0].scores.f1 - folds[1].scores.f1;
        assert!((r.std.f1 - libm::fabs(d) / libm::sqrt(2.0)).abs() < 1e-12);
    }
}
