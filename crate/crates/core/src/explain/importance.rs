use alloc::vec::Vec;

use crate::dataset::Example;
use crate::text::STAT_DIM;
use crate::train::{ConfusionMatrix, PreparedInput, TrainedModel};
use crate::{Error, Result, Rng};

pub const MIN_IMPORTANCE_SAMPLES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermutationImportance {
    /// 0..8 are the statistics in feature order, 8 is the semantic input.
    pub feature: usize,
    pub baseline_f1: f64,
    pub shuffled_f1: f64,
    /// `baseline_f1 - shuffled_f1`.
    pub delta_f1: f64,
}

fn f1(trained: &TrainedModel, inputs: &[PreparedInput], examples: &[Example], indices: &[usize]) -> Result<f64> {
    let mut confusion = ConfusionMatrix::default();
    for (input, &i) in inputs.iter().zip(indices) {
        let p = trained.model.predict_proba(&input.z, input.semantic_input())?;
        confusion.record(examples[i].label.class_index(), usize::from(p[1] > p[0]));
    }
    Ok(confusion.scores().f1)
}

/// F1 drop on `indices` after shuffling one input column across them.
pub fn permutation_importance(
    trained: &TrainedModel,
    examples: &[Example],
    indices: &[usize],
    feature: usize,
    seed: u64,
) -> Result<PermutationImportance> {
    if feature > STAT_DIM {
        return Err(Error::InvalidArgument(alloc::format!(
            "feature {feature} out of range 0..={STAT_DIM}"
        )));
    }
    if indices.len() < MIN_IMPORTANCE_SAMPLES {
        return Err(Error::TooFewSamples {
            what: "permutation importance",
            needed: MIN_IMPORTANCE_SAMPLES,
            found: indices.len(),
        });
    }
    let inputs = indices
        .iter()
        .map(|&i| trained.prepare(&examples[i]))
        .collect::<Result<Vec<_>>>()?;
    let baseline_f1 = f1(trained, &inputs, examples, indices)?;

    let mut order: Vec<usize> = (0..inputs.len()).collect();
    Rng::derive(seed, feature as u64).shuffle(&mut order);
    let shuffled: Vec<PreparedInput> = inputs
        .iter()
        .zip(&order)
        .map(|(input, &src)| {
            let mut out = input.clone();
            if feature < STAT_DIM {
                out.z[feature] = inputs[src].z[feature];
            } else {
                out.semantic = inputs[src].semantic.clone();
            }
            out
        })
        .collect();
    let shuffled_f1 = f1(trained, &shuffled, examples, indices)?;
    Ok(PermutationImportance {
        feature,
        baseline_f1,
        shuffled_f1,
        delta_f1: baseline_f1 - shuffled_f1,
    })
}
