//! Weak-form functionals evaluated on a lattice solution.
//!
//! Space integrals are the lattice Riemann sums `(1/n) Σ_x`; beyond the window the density is
//! taken equal to the profile's exterior value on each half-line.
//! Time integrals use the trapezoid rule on the stored times.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::solver::{HydroSolution, SolverScalar};
use super::{InitialProfile, PdeError};
use crate::fracops::quad::integrate;
use crate::fracops::{frac_laplacian, regional_star, TestClass, TestFunction};
use crate::{KernelLaw, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeakVariant {
    /// Full-line operator, test class `S_Dif`.
    FrDif,
    /// Regional operator plus the boundary product `κ ∫ [ρ]·[G]`.
    FrRob,
    /// `κ·full + (1−κ)·regional`.
    FrDif2,
}

/// Sites averaged by each boundary trace: `ε = TRACE_SITES / n`.
pub const TRACE_SITES: i64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakResidual {
    /// `⟨ρ_t, G_t⟩`.
    pub final_pairing: f64,
    /// `⟨g, G_0⟩`.
    pub initial_pairing: f64,
    /// `∫_0^t ⟨ρ_s, (L + ∂_s) G_s⟩ ds`.
    pub bulk: f64,
    /// `κ ∫_0^t [ρ(s,0+) − ρ(s,0−)][G(s,0+) − G(s,0−)] ds`, zero unless it applies.
    pub boundary: f64,
    pub value: f64,
}

/// `(ρ(0+), ρ(0−))` from the `ι_ε` averages over `(0, ε]` and `[−ε, 0)`.
pub fn boundary_traces<T: SolverScalar>(sol: &HydroSolution<T>, k: usize) -> Result<(f64, f64), PdeError> {
    let w = sol.window;
    if !(w.contains(-TRACE_SITES) && w.contains(TRACE_SITES)) {
        return Err(PdeError::Domain(format!("window {w:?} does not contain the trace blocks")));
    }
    let avg = |range: std::ops::RangeInclusive<i64>| {
        range.map(|x| sol.density[k][w.index(x)].as_f64()).sum::<f64>() / TRACE_SITES as f64
    };
    Ok((avg(1..=TRACE_SITES), avg(-TRACE_SITES..=-1)))
}

fn check_class(variant: WeakVariant, class: TestClass, gamma: f64) -> Result<(), PdeError> {
    let ok = match variant {
        WeakVariant::FrDif => matches!(class, TestClass::Dif | TestClass::Neu),
        WeakVariant::FrRob => gamma > 1.0 || class == TestClass::Neu,
        WeakVariant::FrDif2 => class == TestClass::Neu || (gamma > 1.0 && class == TestClass::Dif),
    };
    if ok {
        Ok(())
    } else {
        Err(PdeError::Domain(format!("{class:?} test functions are not admissible for {variant:?} at γ = {gamma}")))
    }
}

/// Operator weights `(full, regional)` of a variant.
fn mix(variant: WeakVariant, kappa: f64) -> (f64, f64) {
    match variant {
        WeakVariant::FrDif => (1.0, 0.0),
        WeakVariant::FrRob => (0.0, 1.0),
        WeakVariant::FrDif2 => (kappa, 1.0 - kappa),
    }
}

/// `∫_U^∞ L_full G` for `U > b_G`: `(c/γ) ∫ G(v) (U − v)^{-γ} dv`.
fn full_tail(g: &TestFunction<f64>, end: f64, law: &KernelLaw) -> f64 {
    let gamma = law.gamma();
    let b = g.b_g();
    let value = integrate(|v| g.value(v) * (end - v).powf(-gamma), -b, b, 1e-13, &[0.0]).value;
    law.c_gamma() / gamma * value
}

/// Evaluates the weak functional of `variant` at time `t`, which must be one of the stored times.
pub fn weak_residual<T: SolverScalar>(
    sol: &HydroSolution<T>,
    g: &TestFunction<f64>,
    initial: &InitialProfile,
    kappa: f64,
    t: f64,
    variant: WeakVariant,
) -> Result<WeakResidual, PdeError> {
    let gamma = sol.regime.gamma;
    check_class(variant, g.class(), gamma)?;
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(PdeError::Domain(format!("κ must be non-negative, got {kappa}")));
    }
    let law = KernelLaw::new(gamma)?;
    let n = sol.n_grid as f64;
    let w = sol.window;
    let reach = (g.b_g() * n).ceil() as i64 + 1;
    if !(w.contains(-reach) && w.contains(reach)) {
        return Err(PdeError::Domain(format!("window {w:?} does not cover the support radius {}", g.b_g())));
    }
    if sol.times.first() != Some(&0.0) {
        return Err(PdeError::Domain("solution must start at time 0".into()));
    }
    let last = sol
        .time_index(t)
        .ok_or_else(|| PdeError::Domain(format!("t = {t} is not a stored time")))?;

    let weights = mix(variant, kappa);
    let sites: Vec<f64> = (0..w.len()).map(|i| sol.u(i)).collect();
    let parts: Vec<(f64, f64)> = sites
        .par_iter()
        .map(|&u| {
            let full = if weights.0 != 0.0 { frac_laplacian(g, u, &law)? } else { 0.0 };
            let regional = if weights.1 != 0.0 { regional_star(g, u, &law)? } else { 0.0 };
            Ok((full, regional))
        })
        .collect::<Result<_, crate::fracops::FracOpsError>>()?;
    let op: Vec<f64> = parts.iter().map(|(f, r)| weights.0 * f + weights.1 * r).collect();
    let values: Vec<f64> = sites.iter().map(|&u| g.value(u)).collect();
    // ⟨ρ, LG⟩ = ⟨ρ − e, LG⟩ + ⟨e, LG⟩ with e the exterior value of each half-line. Regional parts
    // integrate to zero on each half-line; the full part gives (e₊ − e₋) ∫_0^∞ L_full G.
    let (e_left, e_right) = (initial.exterior(Side::Left), initial.exterior(Side::Right));
    let exterior: Vec<f64> = sites.iter().map(|&u| if u < 0.0 { e_left } else { e_right }).collect();
    let cross = if weights.0 != 0.0 && e_left != e_right {
        let right_sum: f64 = sites
            .iter()
            .zip(&parts)
            .filter(|(u, _)| **u >= 0.0)
            .map(|(_, (f, _))| f)
            .sum::<f64>()
            / n;
        weights.0 * (e_right - e_left) * (right_sum + full_tail(g, (w.hi() as f64 - 0.5) / n, &law))
    } else {
        0.0
    };
    let op_pair = |k: usize| -> f64 {
        sol.density[k].iter().zip(&exterior).zip(&op).map(|((r, e), v)| (r.as_f64() - e) * v).sum::<f64>() / n + cross
    };
    let pair = |k: usize, f: &[f64]| -> f64 {
        sol.density[k].iter().zip(f).map(|(r, v)| r.as_f64() * v).sum::<f64>() / n
    };
    let boundary_on = variant == WeakVariant::FrRob && kappa > 0.0 && gamma > 1.0 && gamma < 2.0;
    let g_jump = g.jump();
    let mut bulk_rate = Vec::with_capacity(last + 1);
    let mut boundary_rate = Vec::with_capacity(last + 1);
    for k in 0..=last {
        let s = sol.times[k];
        let q = g.time_factor(s);
        let dq = g.time_factor_derivative(s);
        bulk_rate.push(q * op_pair(k) + dq * pair(k, &values));
        boundary_rate.push(if boundary_on {
            let (plus, minus) = boundary_traces(sol, k)?;
            kappa * (plus - minus) * q * g_jump
        } else {
            0.0
        });
    }
    let bulk = trapezoid(&sol.times[..=last], &bulk_rate);
    let boundary = trapezoid(&sol.times[..=last], &boundary_rate);
    let final_pairing = g.time_factor(t) * pair(last, &values);
    let initial_pairing =
        g.time_factor(0.0) * sites.iter().zip(&values).map(|(&u, v)| initial.value(u) * v).sum::<f64>() / n;
    Ok(WeakResidual {
        final_pairing,
        initial_pairing,
        bulk,
        boundary,
        value: final_pairing - initial_pairing - bulk + boundary,
    })
}

pub(crate) fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}
