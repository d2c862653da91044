//! Loss functions, empirical risk and pseudo residuals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// `(y - f)^2`
    SquaredError,
    /// `(y - ramp(f))^2`, for `±1` labels.
    #[default]
    SquaredRamp,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::SquaredError => "squared_error",
            LossKind::SquaredRamp => "squared_ramp",
        }
    }

    /// The constant minimizing the summed loss over `labels`.
    pub fn optimal_constant(self, labels: &[f64]) -> f64 {
        let mean = labels.iter().sum::<f64>() / labels.len() as f64;
        match self {
            LossKind::SquaredError => mean,
            LossKind::SquaredRamp => ramp(mean),
        }
    }
}

/// Clamp a score to `[-1, 1]`.
#[inline]
pub fn ramp(f: f64) -> f64 {
    f.clamp(-1.0, 1.0)
}

#[inline]
pub fn loss(kind: LossKind, y: f64, f: f64) -> f64 {
    match kind {
        LossKind::SquaredError => (y - f).powi(2),
        LossKind::SquaredRamp => (y - ramp(f)).powi(2),
    }
}

/// Mean loss over paired labels and scores.
pub fn risk(kind: LossKind, labels: &[f64], scores: &[f64]) -> Result<f64> {
    if labels.len() != scores.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: scores.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::param("risk of an empty sample"));
    }
    let total: f64 = labels.iter().zip(scores).map(|(&y, &f)| loss(kind, y, f)).sum();
    Ok(total / labels.len() as f64)
}

/// Negative derivative of the loss with respect to the score.
///
/// The ramp indicator `|F| < 1` is strict, so the residual vanishes at the
/// kinks `|F| = 1`.
#[inline]
pub fn pseudo_residual(kind: LossKind, y: f64, f: f64) -> f64 {
    match kind {
        LossKind::SquaredError => 2.0 * (y - f),
        LossKind::SquaredRamp if f.abs() < 1.0 => 2.0 * (y - f),
        LossKind::SquaredRamp => 0.0,
    }
}

pub fn pseudo_residuals(kind: LossKind, labels: &[f64], memory_scores: &[f64]) -> Result<Vec<f64>> {
    if labels.len() != memory_scores.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: memory_scores.len(),
        });
    }
    Ok(labels
        .iter()
        .zip(memory_scores)
        .map(|(&y, &f)| pseudo_residual(kind, y, f))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ramp_clamps() {
        assert_eq!(ramp(0.5), 0.5);
        assert_eq!(ramp(2.0), 1.0);
        assert_eq!(ramp(-3.0), -1.0);
    }

    #[test]
    fn pointwise_losses() {
        assert_eq!(loss(LossKind::SquaredRamp, 1.0, 2.0), 0.0);
        assert_eq!(loss(LossKind::SquaredRamp, 1.0, 0.0), 1.0);
        assert_eq!(loss(LossKind::SquaredError, -1.0, 0.5), 2.25);
    }

    #[test]
    fn empirical_risk() {
        let r = LossKind::SquaredRamp;
        assert_eq!(risk(r, &[1.0, -1.0], &[1.0, -1.0]).unwrap(), 0.0);
        assert_eq!(risk(r, &[1.0, -1.0], &[0.0, 0.0]).unwrap(), 1.0);
        assert!((risk(r, &[1.0, 1.0, 1.0], &[1.0, 1.0, -1.0]).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!(risk(r, &[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn residual_values() {
        assert_eq!(pseudo_residual(LossKind::SquaredRamp, 1.0, 0.0), 2.0);
        assert_eq!(pseudo_residual(LossKind::SquaredRamp, 1.0, 1.5), 0.0);
        assert_eq!(pseudo_residual(LossKind::SquaredRamp, 1.0, 1.0), 0.0);
        assert_eq!(pseudo_residual(LossKind::SquaredError, -1.0, 0.5), -3.0);
    }

    #[test]
    fn optimal_constants() {
        let labels = [1.0, -1.0, -1.0];
        assert!((LossKind::SquaredRamp.optimal_constant(&labels) + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(LossKind::SquaredError.optimal_constant(&[1.0, 1.0]), 1.0);
        assert_eq!(LossKind::SquaredRamp.optimal_constant(&[1.0, -1.0]), 0.0);
        assert_eq!(LossKind::SquaredRamp.optimal_constant(&[3.0, 5.0]), 1.0);
    }

    proptest! {
        #[test]
        fn residual_matches_central_difference(
            y in prop_oneof![Just(-1.0f64), Just(1.0f64)],
            f in -3.0f64..3.0,
            squared_error in any::<bool>(),
        ) {
            let kind = if squared_error { LossKind::SquaredError } else { LossKind::SquaredRamp };
            prop_assume!(kind == LossKind::SquaredError || (f.abs() - 1.0).abs() > 1e-4);
            let h = 1e-5;
            let fd = -(loss(kind, y, f + h) - loss(kind, y, f - h)) / (2.0 * h);
            prop_assert!((fd - pseudo_residual(kind, y, f)).abs() < 1e-6);
        }

        #[test]
        fn ramp_idempotent_and_risk_nonnegative(f in -1e6f64..1e6, y in prop_oneof![Just(-1.0f64), Just(1.0f64)]) {
            prop_assert_eq!(ramp(ramp(f)), ramp(f));
            prop_assert!(loss(LossKind::SquaredRamp, y, f) >= 0.0);
            // zero loss exactly when the truncated score reproduces the label
            prop_assert_eq!(loss(LossKind::SquaredRamp, y, f) == 0.0, ramp(f) == y);
        }
    }
}
