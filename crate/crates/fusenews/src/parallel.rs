//! Cross-validation with folds spread over worker threads.
//!
//! Folds share nothing mutable and results are collected in fold order, so
//! every thread count gives the same metrics; only timings differ.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use fusenews_core::dataset::Example;
use fusenews_core::model::{Ablation, ModelConfig};
use fusenews_core::train::{run_fold, AblationRow, Clock, FoldMetrics, FoldPlan, MetricsReport, TrainConfig};
use fusenews_core::Result;

pub fn cross_validate_parallel(
    examples: &[Example],
    plan: &FoldPlan,
    model_config: &ModelConfig,
    config: &TrainConfig,
    threads: usize,
    clock: &(dyn Clock + Sync),
) -> Result<MetricsReport> {
    plan.verify_partition(examples.len())?;
    let workers = threads.clamp(1, plan.k);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<FoldMetrics>>>> = Mutex::new((0..plan.k).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let fold = next.fetch_add(1, Ordering::SeqCst);
                if fold >= plan.k {
                    break;
                }
                let r = run_fold(examples, plan, fold, model_config, config, clock);
                results.lock().expect("no worker panicked")[fold] = Some(r);
            });
        }
    });
    let folds = results
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|r| r.expect("every fold ran"))
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricsReport::from_folds(model_config.ablation(), folds))
}

pub fn run_ablation_parallel(
    examples: &[Example],
    plan: &FoldPlan,
    base: &ModelConfig,
    config: &TrainConfig,
    ablations: &[Ablation],
    threads: usize,
    clock: &(dyn Clock + Sync),
) -> Result<Vec<AblationRow>> {
    ablations
        .iter()
        .map(|&ablation| {
            let cfg = base.with_ablation(ablation);
            cross_validate_parallel(examples, plan, &cfg, config, threads, clock)
                .map(|report| AblationRow { ablation, report })
        })
        .collect()
}
