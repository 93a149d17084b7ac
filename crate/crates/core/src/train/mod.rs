//! Training with Adam, stratified k-fold cross-validation, confusion-matrix
//! metrics and the ablation runner.

mod adam;
mod cv;
mod folds;
mod loss;
mod metrics;
mod trainer;

pub use adam::{adam_step, adam_update, AdamState};
pub use cv::{cross_validate, evaluate_fold, run_ablation, run_fold, AblationRow, Clock, NullClock};
pub use folds::{stratified_kfold, FoldPlan};
pub use loss::{cross_entropy, PROB_FLOOR};
pub use metrics::{f1_score, ConfusionMatrix, FoldMetrics, MetricsReport, Scores};
pub use trainer::{train, EpochRecord, PreparedInput, PreparedSemantic, TrainConfig, TrainOutcome, TrainedModel};
