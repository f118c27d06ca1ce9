//! Initial densities shared by the solver and the particle sampler.

use serde::{Deserialize, Serialize};

use super::PdeError;
use crate::Side;

/// A density `g: ℝ → [0, 1]`. Site `x` reads `g(x/n)`; `u = 0` belongs to the right half-line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialProfile {
    Constant { a: f64 },
    /// `left` on `u < 0`, `right` on `u ≥ 0`.
    Step { left: f64, right: f64 },
    /// `left` on `[−w, 0)`, `right` on `[0, w)`, `outside` elsewhere.
    WindowStep { left: f64, right: f64, outside: f64, half_width: f64 },
    /// `base + height·exp(1 − 1/(1−r²))`, `r = (u − center)/radius`.
    Bump { base: f64, height: f64, center: f64, radius: f64 },
}

impl InitialProfile {
    pub fn validate(&self) -> Result<(), PdeError> {
        let (lo, hi) = self.range();
        if !(lo >= 0.0 && hi <= 1.0) {
            return Err(PdeError::Domain(format!("profile leaves [0, 1]: range [{lo}, {hi}]")));
        }
        match *self {
            Self::WindowStep { half_width, .. } if !(half_width > 0.0 && half_width.is_finite()) => {
                Err(PdeError::Domain(format!("half width must be positive, got {half_width}")))
            }
            Self::Bump { radius, center, .. } if !(radius > 0.0 && radius.is_finite() && center.is_finite()) => {
                Err(PdeError::Domain(format!("bump needs a positive radius, got {radius}")))
            }
            _ => Ok(()),
        }
    }

    pub fn value(&self, u: f64) -> f64 {
        match *self {
            Self::Constant { a } => a,
            Self::Step { left, right } => {
                if u < 0.0 {
                    left
                } else {
                    right
                }
            }
            Self::WindowStep { left, right, outside, half_width } => {
                if u < -half_width || u >= half_width {
                    outside
                } else if u < 0.0 {
                    left
                } else {
                    right
                }
            }
            Self::Bump { base, height, center, radius } => {
                let r = (u - center) / radius;
                if r.abs() >= 1.0 {
                    base
                } else {
                    base + height * (1.0 - 1.0 / (1.0 - r * r)).exp()
                }
            }
        }
    }

    /// Value far out on `side`.
    pub fn exterior(&self, side: Side) -> f64 {
        match (*self, side) {
            (Self::Constant { a }, _) => a,
            (Self::Step { left, .. }, Side::Left) => left,
            (Self::Step { right, .. }, Side::Right) => right,
            (Self::WindowStep { outside, .. }, _) => outside,
            (Self::Bump { base, .. }, _) => base,
        }
    }

    /// `(inf g, sup g)`.
    pub fn range(&self) -> (f64, f64) {
        match *self {
            Self::Constant { a } => (a, a),
            Self::Step { left, right } => (left.min(right), left.max(right)),
            Self::WindowStep { left, right, outside, .. } => {
                (left.min(right).min(outside), left.max(right).max(outside))
            }
            Self::Bump { base, height, .. } => (base.min(base + height), base.max(base + height)),
        }
    }

    /// Whether `g(0−) ≠ g(0+)`.
    pub fn jumps_at_origin(&self) -> bool {
        match *self {
            Self::Step { left, right } | Self::WindowStep { left, right, .. } => left != right,
            _ => false,
        }
    }
}
