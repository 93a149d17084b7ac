use alloc::vec::Vec;

use crate::{Error, Result};

/// Outcome of comparing an analytic gradient with central differences.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheck {
    /// `max_i |a_i − n_i| / max(1, |a_i|, |n_i|)`.
    pub max_rel_error: f64,
    pub worst_index: usize,
    pub numeric: Vec<f64>,
}

/// Compares `analytic` against the central difference `(f(θ+h) − f(θ−h)) / 2h`
/// coordinate by coordinate.
pub fn grad_check<F>(mut f: F, theta: &[f64], analytic: &[f64], h: f64) -> Result<GradCheck>
where
    F: FnMut(&[f64]) -> f64,
{
    if analytic.len() != theta.len() {
        return Err(Error::Length {
            what: "analytic gradient",
            expected: theta.len(),
            found: analytic.len(),
        });
    }
    if !(1e-7..=1e-3).contains(&h) {
        return Err(Error::InvalidArgument(alloc::format!(
            "finite-difference step {h} outside [1e-7, 1e-3]"
        )));
    }
    let mut point = theta.to_vec();
    let mut numeric = Vec::with_capacity(theta.len());
    let mut max_rel_error = 0.0;
    let mut worst_index = 0;
    for i in 0..theta.len() {
        let orig = point[i];
        point[i] = orig + h;
        let plus = f(&point);
        point[i] = orig - h;
        let minus = f(&point);
        point[i] = orig;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::NonFinite("grad_check objective"));
        }
        let n = (plus - minus) / (2.0 * h);
        let a = analytic[i];
        let rel = libm::fabs(a - n) / 1f64.max(libm::fabs(a)).max(libm::fabs(n));
        if rel > max_rel_error {
            max_rel_error = rel;
            worst_index = i;
        }
        numeric.push(n);
    }
    Ok(GradCheck {
        max_rel_error,
        worst_index,
        numeric,
    })
}
