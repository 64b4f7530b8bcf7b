//! Logit/logistic transforms shared by models, re-rankers and the simulator.
//!
//! Scores arriving from an upstream ranker are probabilities; models consume
//! them in logit space. Inputs exactly at 0 or 1 are clamped to
//! [`PROB_CLAMP`, 1 - `PROB_CLAMP`] so the transform stays finite; anything
//! outside [0, 1] is treated as corrupt data and rejected.

use crate::error::{Error, Result};

/// Clamp width applied to probabilities before the logit transform.
pub const PROB_CLAMP: f64 = 1e-6;

/// Clamp a probability into [PROB_CLAMP, 1 - PROB_CLAMP].
///
/// Values outside [0, 1] (or NaN) are an error: they signal corrupt data
/// rather than boundary saturation.
pub fn clamp_probability(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP))
}

/// log(p / (1 - p)) after clamping.
pub fn logit(p: f64) -> Result<f64> {
    let p = clamp_probability(p)?;
    Ok((p / (1.0 - p)).ln())
}

/// 1 / (1 + e^-x). Rejects non-finite input.
pub fn logistic(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    Ok(sigmoid(x))
}

/// Total sigmoid used on pre-validated paths (dot products of finite
/// weights and features). Numerically stable for large |x|.
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
