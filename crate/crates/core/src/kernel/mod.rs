//! Symmetric power-law jump law `p(z) = c_γ |z|^{-γ-1}` on `ℤ \ {0}` and its sampler.

pub mod zeta;

use rand::{Rng, RngExt};
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use thiserror::Error;

use zeta::{euler_maclaurin_tail, power_tail, CompensatedSum};

pub const DEFAULT_TRUNCATION: u64 = 1_000_000;

const NORMALIZATION_REL_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("gamma must lie in (0,2), got {0}")]
    Domain(f64),
    #[error("truncation must be at least 1")]
    ZeroTruncation,
    #[error("truncation too small: Euler-Maclaurin remainder reaches relative {achieved:e}")]
    Accuracy { achieved: f64 },
    #[error("first moment diverges for gamma = {0} (needs gamma > 1)")]
    DivergentMoment(f64),
}

fn check_gamma(gamma: f64) -> Result<(), KernelError> {
    if gamma.is_finite() && gamma > 0.0 && gamma < 2.0 {
        Ok(())
    } else {
        Err(KernelError::Domain(gamma))
    }
}

/// `c_γ = 1 / (2 Σ_{z≥1} z^{-γ-1})`: direct sum up to `L`, Euler–Maclaurin beyond.
pub fn normalization_constant(gamma: f64, truncation: u64) -> Result<f64, KernelError> {
    check_gamma(gamma)?;
    if truncation == 0 {
        return Err(KernelError::ZeroTruncation);
    }
    let s = gamma + 1.0;
    let (tail, omitted) = euler_maclaurin_tail(s, (truncation + 1) as f64);
    let mut acc = CompensatedSum::default();
    acc.add(tail);
    for z in (1..=truncation).rev() {
        acc.add((z as f64).powf(-s));
    }
    let total = acc.value();
    let achieved = omitted / total;
    if achieved > NORMALIZATION_REL_TOL {
        return Err(KernelError::Accuracy { achieved });
    }
    Ok(0.5 / total)
}

/// `m = Σ_{z≥1} z p(z) = c_γ ζ(γ)`, finite only for `γ ∈ (1,2)`.
pub fn mean_jump(gamma: f64) -> Result<f64, KernelError> {
    check_gamma(gamma)?;
    if gamma <= 1.0 {
        return Err(KernelError::DivergentMoment(gamma));
    }
    Ok(KernelLaw::new(gamma)?.mean_jump())
}

/// The exact law without a sampling table; cheap to copy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelLaw {
    gamma: f64,
    c_gamma: f64,
}

impl KernelLaw {
    pub fn new(gamma: f64) -> Result<Self, KernelError> {
        check_gamma(gamma)?;
        let c_gamma = 0.5 / power_tail(gamma + 1.0, 1);
        Ok(Self { gamma, c_gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn c_gamma(&self) -> f64 {
        self.c_gamma
    }

    pub fn p(&self, z: i64) -> f64 {
        if z == 0 {
            0.0
        } else {
            self.c_gamma * (z.unsigned_abs() as f64).powf(-self.gamma - 1.0)
        }
    }

    /// One-sided tail `Σ_{j≥k} p(j)` for `k ≥ 1`.
    pub fn tail_from(&self, k: u64) -> f64 {
        self.c_gamma * power_tail(self.gamma + 1.0, k.max(1))
    }

    /// `Σ_{j≥k} j p(j)`; infinite when `γ ≤ 1`.
    pub fn first_moment_from(&self, k: u64) -> f64 {
        if self.gamma <= 1.0 {
            return f64::INFINITY;
        }
        self.c_gamma * power_tail(self.gamma, k.max(1))
    }

    /// One-sided first moment `m`; infinite when `γ ≤ 1`.
    pub fn mean_jump(&self) -> f64 {
        self.first_moment_from(1)
    }
}

/// Jump law with an alias table over lengths `1..=L` and one bucket for the analytic tail.
#[derive(Debug, Clone)]
pub struct JumpKernel {
    law: KernelLaw,
    truncation: u64,
    tail_mass: f64,
    table: WeightedAliasIndex<f64>,
}

impl JumpKernel {
    pub fn new(gamma: f64, truncation: u64) -> Result<Self, KernelError> {
        let c_gamma = normalization_constant(gamma, truncation)?;
        let s = gamma + 1.0;
        let tail_sum = power_tail(s, truncation + 1);
        let len = usize::try_from(truncation).expect("truncation fits in memory");
        let mut weights = Vec::with_capacity(len + 1);
        weights.extend((1..=truncation).map(|z| (z as f64).powf(-s)));
        weights.push(tail_sum);
        let table = WeightedAliasIndex::new(weights).expect("positive finite weights");
        Ok(Self {
            law: KernelLaw { gamma, c_gamma },
            truncation,
            tail_mass: 2.0 * c_gamma * tail_sum,
            table,
        })
    }

    pub fn with_default_truncation(gamma: f64) -> Result<Self, KernelError> {
        Self::new(gamma, DEFAULT_TRUNCATION)
    }

    pub fn law(&self) -> KernelLaw {
        self.law
    }

    pub fn gamma(&self) -> f64 {
        self.law.gamma
    }

    pub fn c_gamma(&self) -> f64 {
        self.law.c_gamma
    }

    pub fn truncation(&self) -> u64 {
        self.truncation
    }

    /// Mass of `|z| > L`, both signs.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn p(&self, z: i64) -> f64 {
        self.law.p(z)
    }

    /// `|Σ_{0<|z|≤L} p(z) + tail_mass − 1|`.
    pub fn normalization_defect(&self) -> f64 {
        let s = self.gamma() + 1.0;
        let mut acc = CompensatedSum::default();
        for z in (1..=self.truncation).rev() {
            acc.add(2.0 * self.c_gamma() * (z as f64).powf(-s));
        }
        acc.add(self.tail_mass);
        acc.add(-1.0);
        acc.value().abs()
    }

    /// One jump. Lengths beyond `L` come from the continuous envelope `∝ x^{-γ-1}` on
    /// `[L+½, ∞)` rounded to the nearest integer, saturating far beyond any window.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let bucket = self.table.sample(rng) as u64;
        let len = if bucket < self.truncation {
            (bucket + 1) as i64
        } else {
            let u = 1.0 - rng.random::<f64>();
            let x = (self.truncation as f64 + 0.5) * u.powf(-1.0 / self.gamma());
            if x < 4.0e18 {
                ((x + 0.5).floor() as i64).max(self.truncation as i64 + 1)
            } else {
                i64::MAX / 2
            }
        };
        if rng.random::<bool>() {
            len
        } else {
            -len
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gamma_one_constant() {
        let c = normalization_constant(1.0, 1000).unwrap();
        assert!((c - 3.0 / std::f64::consts::PI.powi(2)).abs() < 1e-14);
    }

    #[test]
    fn domain_errors() {
        assert_eq!(normalization_constant(2.0, 10), Err(KernelError::Domain(2.0)));
        assert_eq!(normalization_constant(0.0, 10), Err(KernelError::Domain(0.0)));
        assert!(matches!(normalization_constant(1.5, 1), Err(KernelError::Accuracy { .. })));
        assert_eq!(normalization_constant(1.5, 0), Err(KernelError::ZeroTruncation));
        assert!(matches!(mean_jump(0.8), Err(KernelError::DivergentMoment(_))));
        assert!(matches!(mean_jump(1.0), Err(KernelError::DivergentMoment(_))));
    }

    #[test]
    fn law_and_constant_agree() {
        for &g in &[0.3, 0.8, 1.0, 1.5, 1.95] {
            let a = normalization_constant(g, 5000).unwrap();
            let b = KernelLaw::new(g).unwrap().c_gamma();
            assert!(((a - b) / b).abs() < 1e-13, "gamma {g}");
        }
    }

    #[test]
    fn tail_is_exact_mass_outside_truncation() {
        let k = JumpKernel::new(1.2, 5000).unwrap();
        assert!(k.normalization_defect() < 1e-13);
        let law = k.law();
        assert!((k.tail_mass() - 2.0 * law.tail_from(5001)).abs() < 1e-16);
    }

    #[test]
    fn symmetric_law() {
        let law = KernelLaw::new(0.7).unwrap();
        for z in 1..50 {
            assert_eq!(law.p(z), law.p(-z));
        }
        assert_eq!(law.p(0), 0.0);
    }

    #[test]
    fn tail_draws_exceed_truncation() {
        let k = JumpKernel::new(0.5, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen_tail = 0;
        for _ in 0..20_000 {
            let z = k.sample(&mut rng);
            assert_ne!(z, 0);
            if z.unsigned_abs() > 10 {
                seen_tail += 1;
            }
        }
        let expected = 20_000.0 * k.tail_mass();
        assert!((seen_tail as f64 - expected).abs() < 5.0 * expected.sqrt());
    }
}
