//! Which limit equation the density follows, as a pure function of `(γ, barrier)`.

use serde::{Deserialize, Serialize};

use super::PdeError;
use crate::fracops::TestClass;
use crate::process::{BarrierKind, BarrierSpec};
use crate::KernelLaw;

/// `|β − (γ−1)|` below this counts as the critical line.
pub const CRITICAL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Equation {
    /// `∂ρ = −(−Δ)^{γ/2} ρ` on the line.
    FullLineFractional,
    /// `∂ρ = −κ(−Δ)^{γ/2}ρ − (1−κ)(−Δ)_{ℝ*}^{γ/2}ρ`, `κ = α`.
    MixedKappa,
    /// Regional operator on each half-line, no flux through the origin.
    FractionalNeumann,
    /// Regional operator with the boundary flux `κ[ρ(0+) − ρ(0−)]`.
    FractionalRobin,
    /// Regional operator with continuity at the origin; uniqueness is not known.
    RegionalNoUniq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub equation: Equation,
    pub kappa: f64,
    pub test_class: TestClass,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl RegimeSpec {
    /// Whether the limit keeps the two half-lines apart at the level of the operator.
    pub fn is_regional(&self) -> bool {
        matches!(
            self.equation,
            Equation::FractionalNeumann | Equation::FractionalRobin | Equation::RegionalNoUniq
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("regime serializes")
    }
}

/// Table lookup; `α` and `β` come from the barrier, whose `(1, 0)` case is already canonicalized to no barrier.
pub fn classify_regime(gamma: f64, barrier: &BarrierSpec) -> Result<RegimeSpec, PdeError> {
    if gamma == 2.0 {
        return Err(PdeError::Unsupported("γ = 2 needs a logarithmic time scale".into()));
    }
    if !(gamma > 0.0 && gamma < 2.0) {
        return Err(PdeError::Domain(format!("γ must lie in (0, 2), got {gamma}")));
    }
    let (alpha, beta) = (barrier.alpha(), barrier.beta());
    let spec = |equation, kappa, test_class| RegimeSpec { equation, kappa, test_class, gamma, alpha, beta };
    let above_one = gamma > 1.0;
    match barrier.kind() {
        BarrierKind::None => Ok(spec(Equation::FullLineFractional, 1.0, TestClass::Dif)),
        BarrierKind::Thin { slow, delta } => {
            BarrierSpec::thin(slow.clone(), *delta, alpha, beta, gamma).map_err(|e| PdeError::Domain(e.to_string()))?;
            Ok(spec(Equation::FullLineFractional, 1.0, TestClass::Dif))
        }
        BarrierKind::Thick => {
            if beta == 0.0 {
                let class = if above_one { TestClass::Dif } else { TestClass::Neu };
                return Ok(spec(Equation::MixedKappa, alpha, class));
            }
            if !above_one {
                return Ok(spec(Equation::FractionalNeumann, 0.0, TestClass::Neu));
            }
            let critical = gamma - 1.0;
            if (beta - critical).abs() <= CRITICAL_TOL {
                let m = KernelLaw::new(gamma)?.mean_jump();
                Ok(spec(Equation::FractionalRobin, alpha * m, TestClass::Rob))
            } else if beta > critical {
                Ok(spec(Equation::FractionalNeumann, 0.0, TestClass::Rob))
            } else {
                Ok(spec(Equation::RegionalNoUniq, 0.0, TestClass::Rob0))
            }
        }
    }
}
