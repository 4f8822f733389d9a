//! Machine-readable inequality checks shared by the analysis modules.

use serde::{Deserialize, Serialize};

/// One inequality `lhs >= rhs`, evaluated with a relative tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`; nonnegative when the inequality holds exactly.
    pub slack: f64,
    /// Slack may go down to `-tolerance * scale` and still pass.
    pub tolerance: f64,
    pub scale: f64,
    pub passed: bool,
}

impl InequalityCheck {
    /// Check `lhs >= rhs` with tolerance relative to `scale`.
    pub fn at_least(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64, scale: f64) -> Self {
        let slack = lhs - rhs;
        let scale = scale.abs();
        Self {
            name: name.into(),
            lhs,
            rhs,
            slack,
            tolerance,
            scale,
            passed: slack.is_finite() && slack >= -tolerance * scale,
        }
    }

    /// Check `lhs <= rhs`; the slack is reported as `rhs - lhs`.
    pub fn at_most(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64, scale: f64) -> Self {
        let mut c = Self::at_least(name, rhs, lhs, tolerance, scale);
        c.lhs = lhs;
        c.rhs = rhs;
        c
    }

    /// Slack divided by the scale (0 when the scale vanishes).
    pub fn relative_slack(&self) -> f64 {
        if self.scale > 0.0 {
            self.slack / self.scale
        } else {
            self.slack
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_and_tolerance() {
        assert!(InequalityCheck::at_least("a", 1.0, 0.5, 0.0, 1.0).passed);
        assert!(!InequalityCheck::at_least("a", 0.5, 1.0, 0.0, 1.0).passed);
        assert!(InequalityCheck::at_least("a", 1.0 - 1e-13, 1.0, 1e-12, 1.0).passed);
        let c = InequalityCheck::at_most("b", 0.25, 1.0, 0.0, 1.0);
        assert!(c.passed);
        assert_eq!(c.slack, 0.75);
        assert_eq!(c.lhs, 0.25);
        assert!(!InequalityCheck::at_least("nan", f64::NAN, 0.0, 1.0, 1.0).passed);
    }
}
