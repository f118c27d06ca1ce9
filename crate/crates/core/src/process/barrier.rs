//! Slow-bond sets and their rate factor `α n^{-β}`.

use serde::{Deserialize, Serialize};

use super::ProcessError;
use crate::kernel::zeta::power_tail;
use crate::KernelLaw;

/// Slow bonds of a thin barrier. Every bond joins a negative site to a non-negative one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "set", content = "bonds", rename_all = "snake_case")]
pub enum SlowSet {
    /// All bonds `{x, 0}` with `x < 0`.
    TouchingOrigin,
    /// An explicit finite list of `(x, y)` with `x < 0 ≤ y`.
    Bonds(Vec<(i64, i64)>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BarrierKind {
    None,
    Thin { slow: SlowSet, delta: f64 },
    Thick,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierSpec {
    kind: BarrierKind,
    alpha: f64,
    beta: f64,
}

impl BarrierSpec {
    pub fn none() -> Self {
        Self { kind: BarrierKind::None, alpha: 1.0, beta: 0.0 }
    }

    /// `S = S₀`. `(α, β) = (1, 0)` collapses to [`BarrierSpec::none`].
    pub fn thick(alpha: f64, beta: f64) -> Result<Self, ProcessError> {
        check_params(alpha, beta)?;
        Ok(Self::canonical(BarrierKind::Thick, alpha, beta))
    }

    /// Thin barrier; `Σ_S |y−x|^δ p(y−x) < ∞` is checked for the declared `δ ∈ [0,1] ∩ (γ−1, ∞)`.
    pub fn thin(slow: SlowSet, delta: f64, alpha: f64, beta: f64, gamma: f64) -> Result<Self, ProcessError> {
        check_params(alpha, beta)?;
        let law = KernelLaw::new(gamma).map_err(|e| ProcessError::Barrier(e.to_string()))?;
        if !(0.0..=1.0).contains(&delta) || delta <= gamma - 1.0 {
            return Err(ProcessError::Barrier(format!(
                "thin barrier needs δ ∈ [0,1] ∩ (γ−1, ∞); got δ = {delta}, γ = {gamma}"
            )));
        }
        if let SlowSet::Bonds(list) = &slow {
            let mut seen = std::collections::HashSet::new();
            for &(x, y) in list {
                if !(x < 0 && y >= 0) {
                    return Err(ProcessError::Barrier(format!("bond ({x}, {y}) does not cross the origin")));
                }
                if !seen.insert((x, y)) {
                    return Err(ProcessError::Barrier(format!("bond ({x}, {y}) listed twice")));
                }
            }
        }
        let s = thin_sum(&slow, delta, &law);
        if !s.is_finite() {
            return Err(ProcessError::Barrier(format!(
                "Σ_S |y−x|^δ p(y−x) diverges for δ = {delta}, γ = {gamma}"
            )));
        }
        Ok(Self::canonical(BarrierKind::Thin { slow, delta }, alpha, beta))
    }

    fn canonical(kind: BarrierKind, alpha: f64, beta: f64) -> Self {
        if alpha == 1.0 && beta == 0.0 {
            Self::none()
        } else {
            Self { kind, alpha, beta }
        }
    }

    pub fn kind(&self) -> &BarrierKind {
        &self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_none(&self) -> bool {
        matches!(self.kind, BarrierKind::None)
    }

    pub fn is_thick(&self) -> bool {
        matches!(self.kind, BarrierKind::Thick)
    }

    /// `α n^{-β}`.
    pub fn slow_factor(&self, n: u64) -> f64 {
        if self.is_none() {
            1.0
        } else {
            self.alpha * (n as f64).powf(-self.beta)
        }
    }

    /// Whether `{x, y}` is a slow bond; order of the endpoints is irrelevant.
    #[inline]
    pub fn is_slow(&self, x: i64, y: i64) -> bool {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        match &self.kind {
            BarrierKind::None => false,
            BarrierKind::Thick => a < 0 && b >= 0,
            BarrierKind::Thin { slow: SlowSet::TouchingOrigin, .. } => a < 0 && b == 0,
            BarrierKind::Thin { slow: SlowSet::Bonds(list), .. } => list.contains(&(a, b)),
        }
    }

    /// Bond weight `w_{x,y}`: `α n^{-β}` on slow bonds, 1 otherwise.
    #[inline]
    pub fn weight(&self, x: i64, y: i64, n: u64) -> f64 {
        if self.is_slow(x, y) {
            self.slow_factor(n)
        } else {
            1.0
        }
    }

    /// Slow bonds of a thin barrier inside `[lo, hi)`; `None` for thick or absent barriers.
    pub fn thin_bonds_within(&self, lo: i64, hi: i64) -> Option<Vec<(i64, i64)>> {
        match &self.kind {
            BarrierKind::Thin { slow: SlowSet::TouchingOrigin, .. } => {
                (hi > 0).then(|| (lo..0).map(|x| (x, 0)).collect())
            }
            BarrierKind::Thin { slow: SlowSet::Bonds(list), .. } => Some(
                list.iter()
                    .copied()
                    .filter(|&(x, y)| x >= lo && y < hi)
                    .collect(),
            ),
            _ => None,
        }
    }
}

/// `Σ_{x<0} |x|^δ p(|x|) = c_γ ζ(γ+1−δ)` for the origin set; plain sum for a list.
fn thin_sum(slow: &SlowSet, delta: f64, law: &KernelLaw) -> f64 {
    match slow {
        SlowSet::TouchingOrigin => {
            let s = law.gamma() + 1.0 - delta;
            if s > 1.0 {
                law.c_gamma() * power_tail(s, 1)
            } else {
                f64::INFINITY
            }
        }
        SlowSet::Bonds(list) => list
            .iter()
            .map(|&(x, y)| ((y - x) as f64).powf(delta) * law.p(y - x))
            .sum(),
    }
}

fn check_params(alpha: f64, beta: f64) -> Result<(), ProcessError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(ProcessError::Barrier(format!("α must be positive, got {alpha}")));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(ProcessError::Barrier(format!("β must be non-negative, got {beta}")));
    }
    Ok(())
}
