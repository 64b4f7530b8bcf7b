//! Action-value label generation: geometric decay over future per-slot
//! rewards, truncated at the end of the list. These labels let a slot-level
//! supervised model stand in for a multi-step objective; the multi-step
//! optimizer itself is out of scope here.

use crate::error::{Error, Result};

/// label_i = sum over k >= 0 of lambda^k * r_{i+k}, truncated at the end of
/// the reward sequence. Computed by a backward recursion
/// (label_i = r_i + lambda * label_{i+1}).
pub fn action_value_labels(rewards: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidConfig(format!(
            "decay lambda must lie in [0, 1], got {lambda}"
        )));
    }
    if rewards.iter().any(|r| !r.is_finite()) {
        return Err(Error::NonFinite(
            rewards
                .iter()
                .copied()
                .find(|r| !r.is_finite())
                .unwrap_or(f64::NAN),
        ));
    }
    let mut labels = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for (i, r) in rewards.iter().enumerate().rev() {
        acc = r + lambda * acc;
        labels[i] = acc;
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_decay_returns_rewards() {
        let rewards = [0.5, 1.0, 0.0, 2.0];
        assert_eq!(
            action_value_labels(&rewards, 0.0).unwrap(),
            rewards.to_vec()
        );
    }

    #[test]
    fn unit_decay_gives_suffix_sums() {
        let labels = action_value_labels(&[1.0, 1.0, 1.0], 1.0).unwrap();
        assert_eq!(labels, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn half_decay_hand_example() {
        let labels = action_value_labels(&[1.0, 0.0, 2.0], 0.5).unwrap();
        assert_eq!(labels, vec![1.5, 1.0, 2.0]);
    }

    #[test]
    fn out_of_range_lambda_rejected() {
        assert!(action_value_labels(&[1.0], -0.1).is_err());
        assert!(action_value_labels(&[1.0], 1.1).is_err());
    }

    #[test]
    fn non_finite_rewards_rejected() {
        assert!(action_value_labels(&[1.0, f64::INFINITY], 0.5).is_err());
    }
}
