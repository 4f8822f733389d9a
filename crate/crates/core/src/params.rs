use serde::{Deserialize, Serialize};

use crate::error::{NshError, Result};

/// Coefficients of the stationary equation `(Δ+1)²u − αu − βu² + u³ = 0`.
///
/// Only `α < 0` and `β > 0` are admitted; the sign of `β` can always be
/// normalized by `u -> -u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    alpha: f64,
    beta: f64,
}

impl Params {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha < 0.0) {
            return Err(NshError::InvalidParams(format!(
                "alpha must be negative, got {alpha}"
            )));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(NshError::InvalidParams(format!(
                "beta must be positive, got {beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.alpha, beta)
    }

    /// Diagonal symbol of the quadratic form at Laplacian eigenvalue `mu`.
    #[inline]
    pub fn symbol(&self, mu: f64) -> f64 {
        (mu - 1.0) * (mu - 1.0) - self.alpha
    }

    /// `2 sqrt(1 - α)`: constant solutions exist above this value.
    pub fn constant_threshold(&self) -> f64 {
        2.0 * (1.0 - self.alpha).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_signs() {
        assert!(Params::new(-1.0, 3.0).is_ok());
        assert!(Params::new(0.0, 3.0).is_err());
        assert!(Params::new(0.5, 3.0).is_err());
        assert!(Params::new(-1.0, 0.0).is_err());
        assert!(Params::new(-1.0, f64::NAN).is_err());
    }

    #[test]
    fn symbol_at_zero_and_one() {
        let p = Params::new(-1.0, 1.0).unwrap();
        assert_eq!(p.symbol(0.0), 2.0);
        assert_eq!(p.symbol(1.0), 1.0);
    }
}
