pub const PROB_FLOOR: f64 = 1e-12;

/// `−ln p_label` with the probability clamped at [`PROB_FLOOR`].
pub fn cross_entropy(probs: &[f64; 2], label: usize) -> f64 {
    -libm::log(probs[label].max(PROB_FLOOR))
}
