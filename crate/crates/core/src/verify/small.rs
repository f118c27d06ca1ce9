//! Exact finite-state models of the generator on at most twelve sites.

use rand::{Rng, RngExt};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::VerifyError;
use crate::process::BarrierSpec;
use crate::KernelLaw;

pub const MAX_SITES: usize = 12;

/// One unordered bond with directional particle rates.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Bond {
    i: usize,
    j: usize,
    /// Rate for a particle at `i` to move to empty `j`.
    forward: f64,
    backward: f64,
    slow: bool,
}

/// `L_n` restricted to configurations on a finite site list; a state's bit `k` is the occupation of `sites[k]`.
#[derive(Clone, Debug)]
pub struct SmallSystem {
    sites: Vec<i64>,
    bonds: Vec<Bond>,
}

impl SmallSystem {
    /// Swap rate `p(y−x)·ξ_{x,y}` on every pair of listed sites (no `n^γ` time scale).
    pub fn new(sites: &[i64], law: &KernelLaw, barrier: &BarrierSpec, n: u64) -> Result<Self, VerifyError> {
        Self::build(sites, |x, y| law.p(y - x) * barrier.weight(x, y, n), |x, y| barrier.is_slow(x, y))
    }

    /// Directional rates `rate(from, to)` for a particle jump; a fixture for negative controls.
    pub fn with_jump_rates(sites: &[i64], rate: impl Fn(i64, i64) -> f64) -> Result<Self, VerifyError> {
        Self::build(sites, rate, |_, _| false)
    }

    fn build(
        sites: &[i64],
        rate: impl Fn(i64, i64) -> f64,
        slow: impl Fn(i64, i64) -> bool,
    ) -> Result<Self, VerifyError> {
        if sites.is_empty() || sites.len() > MAX_SITES {
            return Err(VerifyError::Domain(format!("need 1 to {MAX_SITES} sites, got {}", sites.len())));
        }
        let mut sorted = sites.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != sites.len() {
            return Err(VerifyError::Domain("sites must be distinct".into()));
        }
        let mut bonds = Vec::new();
        for i in 0..sorted.len() {
            for j in (i + 1)..sorted.len() {
                let (x, y) = (sorted[i], sorted[j]);
                let (forward, backward) = (rate(x, y), rate(y, x));
                if !(forward >= 0.0 && backward >= 0.0 && forward.is_finite() && backward.is_finite()) {
                    return Err(VerifyError::Domain(format!("invalid rate on bond ({x}, {y})")));
                }
                bonds.push(Bond { i, j, forward, backward, slow: slow(x, y) });
            }
        }
        Ok(Self { sites: sorted, bonds })
    }

    pub fn sites(&self) -> &[i64] {
        &self.sites
    }

    pub fn state_count(&self) -> usize {
        1 << self.sites.len()
    }

    pub fn position(&self, x: i64) -> Option<usize> {
        self.sites.binary_search(&x).ok()
    }

    /// `ν_a(η)` restricted to the listed sites.
    pub fn bernoulli(&self, state: usize, a: f64) -> f64 {
        let k = state.count_ones() as i32;
        a.powi(k) * (1.0 - a).powi(self.sites.len() as i32 - k)
    }

    /// Off-diagonal entries `(η', Q(η, η'))` of row `η`.
    pub fn transitions(&self, state: usize) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for b in &self.bonds {
            let (oi, oj) = (state >> b.i & 1, state >> b.j & 1);
            if oi == oj {
                continue;
            }
            let rate = if oi == 1 { b.forward } else { b.backward };
            if rate > 0.0 {
                out.push((state ^ (1 << b.i) ^ (1 << b.j), rate));
            }
        }
        out
    }

    /// Diagonal entry `Q(η, η) = −Σ_{η'≠η} Q(η, η')`, so every row sums to zero.
    pub fn diagonal(&self, state: usize) -> f64 {
        -self.transitions(state).iter().map(|t| t.1).sum::<f64>()
    }

    /// `(L g)(η) = Σ_{η'} Q(η, η') [g(η') − g(η)]`.
    pub fn apply(&self, g: &[f64]) -> Vec<f64> {
        (0..self.state_count())
            .map(|s| self.transitions(s).iter().map(|&(t, r)| r * (g[t] - g[s])).sum())
            .collect()
    }

    /// `I_{x,y}(√f, ν_a) = Σ_η ν_a(η) [√f(η^{x,y}) − √f(η)]²` for listed sites `x`, `y`.
    pub fn exchange_energy(&self, root: &[f64], x: i64, y: i64, a: f64) -> Result<f64, VerifyError> {
        let (i, j) = match (self.position(x), self.position(y)) {
            (Some(i), Some(j)) => (i, j),
            _ => return Err(VerifyError::Domain(format!("sites {x}, {y} are not both in the system"))),
        };
        Ok(self.exchange_energy_at(root, i, j, a))
    }

    fn exchange_energy_at(&self, root: &[f64], i: usize, j: usize, a: f64) -> f64 {
        (0..self.state_count())
            .filter(|s| (s >> i & 1) != (s >> j & 1))
            .map(|s| {
                let t = s ^ (1 << i) ^ (1 << j);
                self.bernoulli(s, a) * (root[t] - root[s]).powi(2)
            })
            .sum()
    }
}

/// `max |ν_a(η)Q(η,η') − ν_a(η')Q(η',η)|` over all state pairs.
pub fn detailed_balance_check(system: &SmallSystem, a: f64) -> Result<f64, VerifyError> {
    check_density_parameter(a)?;
    let mut worst: f64 = 0.0;
    for s in 0..system.state_count() {
        for (t, rate) in system.transitions(s) {
            let back = system.transitions(t).iter().find(|e| e.0 == s).map_or(0.0, |e| e.1);
            worst = worst.max((system.bernoulli(s, a) * rate - system.bernoulli(t, a) * back).abs());
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirichletForm {
    /// `D_n^F`: bonds off the slow set.
    pub fast: f64,
    /// `D_n^S`: slow bonds, including their factor `αn^{-β}`.
    pub slow: f64,
    pub total: f64,
}

fn check_density_parameter(a: f64) -> Result<(), VerifyError> {
    if a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(VerifyError::Domain(format!("density parameter must be in (0, 1), got {a}")))
    }
}

fn check_density(system: &SmallSystem, f: &[f64], a: f64) -> Result<(), VerifyError> {
    check_density_parameter(a)?;
    if f.len() != system.state_count() {
        return Err(VerifyError::Domain(format!("density has {} entries for {} states", f.len(), system.state_count())));
    }
    if f.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(VerifyError::Domain("density must be finite and non-negative".into()));
    }
    let mass: f64 = f.iter().enumerate().map(|(s, v)| v * system.bernoulli(s, a)).sum();
    if (mass - 1.0).abs() > 1e-12 {
        return Err(VerifyError::Domain(format!("Σ f ν_a = {mass}, expected 1")));
    }
    Ok(())
}

/// `D_n(√f, ν_a) = Σ_{x<y} rate_{x,y} I_{x,y}(√f, ν_a)`, split into fast and slow bonds.
pub fn dirichlet_form(system: &SmallSystem, f: &[f64], a: f64) -> Result<DirichletForm, VerifyError> {
    check_density(system, f, a)?;
    if let Some(b) = system.bonds.iter().find(|b| b.forward != b.backward) {
        return Err(VerifyError::Domain(format!(
            "asymmetric bond ({}, {}) has no Dirichlet form",
            system.sites[b.i], system.sites[b.j]
        )));
    }
    let root: Vec<f64> = f.iter().map(|v| v.sqrt()).collect();
    let mut out = DirichletForm { fast: 0.0, slow: 0.0, total: 0.0 };
    for b in &system.bonds {
        let e = b.forward * system.exchange_energy_at(&root, b.i, b.j, a);
        if b.slow {
            out.slow += e;
        } else {
            out.fast += e;
        }
    }
    out.total = out.fast + out.slow;
    Ok(out)
}

/// `⟨L g, g⟩_{ν_a}` from the generator rows.
pub fn generator_quadratic_form(system: &SmallSystem, g: &[f64], a: f64) -> f64 {
    system.apply(g).iter().enumerate().map(|(s, lg)| system.bernoulli(s, a) * lg * g[s]).sum()
}

/// `f = w / Σ w ν_a` with `w = exp(σZ)`, `Z` standard normal per state.
pub fn random_density<R: Rng + ?Sized>(system: &SmallSystem, a: f64, sigma: f64, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..system.state_count()).map(|_| (sigma * rng.sample::<f64, _>(StandardNormal)).exp()).collect();
    let mass: f64 = w.iter().enumerate().map(|(s, v)| v * system.bernoulli(s, a)).sum();
    w.into_iter().map(|v| v / mass).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MovingParticleReport {
    pub ell0: u64,
    pub levels: u32,
    pub samples: usize,
    /// Sample maximum of `Σ_i Σ_y I_{y,y+ℓ_{i−1}}/ℓ_{i−1}^γ ÷ D_n`.
    pub max_ratio: f64,
    /// The same with `D_n^F` in the denominator.
    pub max_ratio_fast: f64,
    /// Samples with `D_n = 0` but a positive numerator; the bound rules these out.
    pub contradictions: usize,
    /// Samples with both sides zero, skipped.
    pub skipped: usize,
}

/// Bonds `{y, y + ℓ_{i−1}}`, `y = 1..ℓ_{i−1}`, `ℓ_i = 2^i ℓ₀`, as state-bit pairs with weight `ℓ_{i−1}^{-γ}`.
fn moving_particle_pairs(system: &SmallSystem, ell0: u64, levels: u32, gamma: f64) -> Result<Vec<(usize, usize, f64)>, VerifyError> {
    if ell0 == 0 || levels == 0 || levels > 20 {
        return Err(VerifyError::Domain("need ℓ₀ ≥ 1 and 1 ≤ M ≤ 20".into()));
    }
    let reach = (1u64 << levels) * ell0;
    if reach >= system.sites.len() as u64 {
        return Err(VerifyError::Domain(format!("2^M·ℓ₀ = {reach} must be below the {} sites", system.sites.len())));
    }
    let mut pairs = Vec::new();
    for i in 1..=levels {
        let ell = ell0 << (i - 1);
        for y in 1..=ell {
            let (x, z) = (y as i64, (y + ell) as i64);
            match (system.position(x), system.position(z)) {
                (Some(p), Some(q)) => pairs.push((p, q, (ell as f64).powf(-gamma))),
                _ => return Err(VerifyError::Domain(format!("sites 1..={reach} must be in the system; {x} or {z} is missing"))),
            }
        }
    }
    Ok(pairs)
}

/// Left side `Σ_i Σ_y I_{y,y+ℓ_{i−1}}(√f)/ℓ_{i−1}^γ` of the moving-particle bound, with `D_n(√f)`.
pub fn moving_particle_terms(
    system: &SmallSystem,
    ell0: u64,
    levels: u32,
    gamma: f64,
    f: &[f64],
    a: f64,
) -> Result<(f64, DirichletForm), VerifyError> {
    let pairs = moving_particle_pairs(system, ell0, levels, gamma)?;
    let d = dirichlet_form(system, f, a)?;
    let root: Vec<f64> = f.iter().map(|v| v.sqrt()).collect();
    let numerator = pairs.iter().map(|&(p, q, w)| w * system.exchange_energy_at(&root, p, q, a)).sum();
    Ok((numerator, d))
}

/// Sample maximum of the moving-particle ratio over `samples` densities from [`random_density`] with `σ = 1`.
pub fn moving_particle_check<R: Rng + ?Sized>(
    ell0: u64,
    levels: u32,
    samples: usize,
    system: &SmallSystem,
    gamma: f64,
    a: f64,
    rng: &mut R,
) -> Result<MovingParticleReport, VerifyError> {
    check_density_parameter(a)?;
    moving_particle_pairs(system, ell0, levels, gamma)?;
    let mut report = MovingParticleReport {
        ell0,
        levels,
        samples,
        max_ratio: 0.0,
        max_ratio_fast: 0.0,
        contradictions: 0,
        skipped: 0,
    };
    for _ in 0..samples {
        let f = random_density(system, a, 1.0, rng);
        let (numerator, d) = moving_particle_terms(system, ell0, levels, gamma, &f, a)?;
        if d.total <= 0.0 {
            if numerator > 0.0 {
                report.contradictions += 1;
            } else {
                report.skipped += 1;
            }
            continue;
        }
        report.max_ratio = report.max_ratio.max(numerator / d.total);
        if d.fast > 0.0 {
            report.max_ratio_fast = report.max_ratio_fast.max(numerator / d.fast);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transitions_flip_two_bits() {
        let law = KernelLaw::new(1.1).unwrap();
        let s = SmallSystem::new(&[-1, 0, 2], &law, &BarrierSpec::none(), 10).unwrap();
        for state in 0..s.state_count() {
            for (t, r) in s.transitions(state) {
                assert_eq!((state ^ t).count_ones(), 2);
                assert_eq!(state.count_ones(), t.count_ones());
                assert!(r > 0.0);
            }
        }
        assert!(SmallSystem::new(&[0; 13], &law, &BarrierSpec::none(), 1).is_err());
        assert!(SmallSystem::new(&[1, 1], &law, &BarrierSpec::none(), 1).is_err());
    }
}
