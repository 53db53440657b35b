//! Probability levels and the asymmetric piecewise-linear loss.

use std::fmt;

use crate::error::{Error, Result};

/// A probability level in the open interval (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Tau(f64);

impl Tau {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value < 1.0 {
            Ok(Tau(value))
        } else {
            Err(Error::InvalidTau { tau: value })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The mirrored level 1 - tau.
    pub fn complement(self) -> Tau {
        Tau(1.0 - self.0)
    }

    /// The default grid of 19 equispaced levels 0.05, 0.10, ..., 0.95.
    pub fn default_grid() -> Vec<Tau> {
        (1..=19).map(|i| Tau(i as f64 / 20.0)).collect()
    }

    /// Validates that `taus` is non-empty, strictly increasing, and inside
    /// (0, 1).
    pub fn validate_grid(taus: &[Tau]) -> Result<()> {
        if taus.is_empty() {
            return Err(Error::schema("empty tau grid"));
        }
        for pair in taus.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::schema(format!(
                    "tau grid must be strictly increasing, got {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The quantile loss at level `tau`, scaled so the tau = 0.5 case is the
/// absolute loss |x|:
///
/// ```text
/// L(x) = -2 (1 - tau) x   for x < 0
/// L(x) =  2 tau x         for x >= 0
/// ```
#[inline]
pub fn pinball_loss(x: f64, tau: Tau) -> f64 {
    let t = tau.value();
    if x < 0.0 {
        -2.0 * (1.0 - t) * x
    } else {
        2.0 * t * x
    }
}

/// Sum of the pinball loss over a residual vector.
pub fn pinball_sum<'a, I: IntoIterator<Item = &'a f64>>(residuals: I, tau: Tau) -> f64 {
    residuals
        .into_iter()
        .map(|&r| pinball_loss(r, tau))
        .sum()
}
