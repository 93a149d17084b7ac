use alloc::vec::Vec;

use super::{train, ConfusionMatrix, FoldMetrics, FoldPlan, MetricsReport, TrainConfig, TrainedModel};
use crate::dataset::Example;
use crate::model::{Ablation, ModelConfig};
use crate::Result;

/// Monotonic millisecond clock used for processing-time measurement.
pub trait Clock {
    fn now_ms(&self) -> f64;
}

/// Clock that never advances; timings come out as zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullClock;

impl Clock for NullClock {
    fn now_ms(&self) -> f64 {
        0.0
    }
}

/// Scores `trained` on the test indices of `fold`, timing inference.
///
/// Fails if the normaliser or vocabulary were not fitted with `fold` held
/// out.
pub fn evaluate_fold(
    trained: &TrainedModel,
    examples: &[Example],
    test: &[usize],
    fold: u32,
    clock: &dyn Clock,
) -> Result<FoldMetrics> {
    trained.normalizer.fitted_on.assert_excludes(fold)?;
    if let Some(v) = &trained.vocab {
        v.fitted_on.assert_excludes(fold)?;
    }
    let mut confusion = ConfusionMatrix::default();
    let start = clock.now_ms();
    for &i in test {
        let predicted = trained.predict_label(&examples[i])?;
        confusion.record(examples[i].label.class_index(), predicted.class_index());
    }
    let elapsed = clock.now_ms() - start;
    Ok(FoldMetrics {
        fold,
        confusion,
        scores: confusion.scores(),
        epochs_trained: 0,
        best_epoch: 0,
        inference_ms_total: elapsed,
        ms_per_sample: if test.is_empty() { 0.0 } else { elapsed / test.len() as f64 },
    })
}

/// Trains on every fold but `fold` and evaluates on `fold`.
pub fn run_fold(
    examples: &[Example],
    plan: &FoldPlan,
    fold: usize,
    model_config: &ModelConfig,
    config: &TrainConfig,
    clock: &dyn Clock,
) -> Result<FoldMetrics> {
    let outcome = train(examples, &plan.train_indices(fold), model_config, config, Some(fold as u32))?;
    let mut metrics = evaluate_fold(&outcome.model, examples, plan.test_indices(fold), fold as u32, clock)?;
    metrics.epochs_trained = outcome.history.len();
    metrics.best_epoch = outcome.best_epoch;
    Ok(metrics)
}

/// k-fold cross-validation, folds run in order.
pub fn cross_validate(
    examples: &[Example],
    plan: &FoldPlan,
    model_config: &ModelConfig,
    config: &TrainConfig,
    clock: &dyn Clock,
) -> Result<MetricsReport> {
    plan.verify_partition(examples.len())?;
    let folds = (0..plan.k)
        .map(|f| run_fold(examples, plan, f, model_config, config, clock))
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricsReport::from_folds(model_config.ablation(), folds))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub ablation: Ablation,
    pub report: MetricsReport,
}

/// Cross-validates each configuration on the same fold plan and seeds.
pub fn run_ablation(
    examples: &[Example],
    plan: &FoldPlan,
    base: &ModelConfig,
    config: &TrainConfig,
    ablations: &[Ablation],
    clock: &dyn Clock,
) -> Result<Vec<AblationRow>> {
    ablations
        .iter()
        .map(|&ablation| {
            let cfg = base.with_ablation(ablation);
            cross_validate(examples, plan, &cfg, config, clock).map(|report| AblationRow { ablation, report })
        })
        .collect()
}
