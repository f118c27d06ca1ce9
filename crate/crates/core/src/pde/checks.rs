//! Diagnostics on lattice solutions: conservation, energy, boundary behaviour at the origin.

use serde::{Deserialize, Serialize};

use super::regime::Equation;
use super::solver::{HydroSolution, SolverScalar};
use super::weak::{boundary_traces, trapezoid};
use super::PdeError;
use crate::fracops::continuum::extrapolate_geometric;
use crate::KernelLaw;

/// `max_k |M(t_k) − M(0)| / (M(0)·max(t_k, 1))`.
pub fn mass_drift<T: SolverScalar>(sol: &HydroSolution<T>) -> f64 {
    let m0 = sol.mass(0);
    (0..sol.times.len())
        .map(|k| (sol.mass(k) - m0).abs() / (m0.abs().max(f64::MIN_POSITIVE) * sol.times[k].max(1.0)))
        .fold(0.0, f64::max)
}

/// Largest relative change of either half-line mass per unit time.
pub fn half_line_leakage<T: SolverScalar>(sol: &HydroSolution<T>) -> f64 {
    let (l0, r0) = sol.half_masses(0);
    let total = (l0 + r0).max(f64::MIN_POSITIVE);
    (1..sol.times.len())
        .map(|k| {
            let (l, _) = sol.half_masses(k);
            (l - l0).abs() / total / sol.times[k].max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

/// Ceiling on [`half_line_leakage`] from the microscopic crossing rate `α m n^{γ−1−β}`, safety factor 2.
///
/// Infinite for `γ ≤ 1`, where `m` diverges.
pub fn leakage_bound<T: SolverScalar>(sol: &HydroSolution<T>) -> Result<f64, PdeError> {
    let r = &sol.regime;
    let m = KernelLaw::new(r.gamma)?.mean_jump();
    let mass = sol.mass(0).max(f64::MIN_POSITIVE);
    Ok(2.0 * r.alpha * m * (sol.n_grid as f64).powf(r.gamma - 1.0 - r.beta) / mass)
}

/// Largest increase of `Σ_x (ρ_x − a)²` between consecutive stored times.
pub fn energy_increase<T: SolverScalar>(sol: &HydroSolution<T>, a: f64) -> f64 {
    let e: Vec<f64> = (0..sol.times.len()).map(|k| sol.energy(k, a)).collect();
    e.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max).max(0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDiagnostics {
    pub time: f64,
    /// `D^γ ρ(t, 0+)`.
    pub derivative_plus: f64,
    /// `D^γ ρ(t, 0−)`.
    pub derivative_minus: f64,
    /// `ρ(t,0+) − ρ(t,0−)` from the trace blocks.
    pub jump: f64,
    /// Whether both one-sided sequences extrapolated; otherwise the values are the finest-scale terms.
    pub extrapolated: bool,
    /// `D^γ ρ(t,0+) / jump`, the quantity proportional to `κ` in the Robin case.
    pub ratio: Option<f64>,
}

/// Sites `2^j` probed for `ρ′(±u) u^{2−γ}`; the smallest is the trace-block size.
const FIRST_PROBE: u32 = 3;
const MIN_EXTRAPOLATION_TERMS: usize = 5;

/// `D^γ ρ(t, 0±)` from centred lattice differences at `u = 2^j/n`.
pub fn boundary_condition_check<T: SolverScalar>(sol: &HydroSolution<T>, t: f64) -> Result<BoundaryDiagnostics, PdeError> {
    let r = &sol.regime;
    if !matches!(r.equation, Equation::FractionalRobin | Equation::FractionalNeumann | Equation::RegionalNoUniq)
        || r.gamma <= 1.0
    {
        return Err(PdeError::Domain(format!("no boundary condition to check for {:?} at γ = {}", r.equation, r.gamma)));
    }
    let k = sol.time_index(t).ok_or_else(|| PdeError::Domain(format!("t = {t} is not a stored time")))?;
    let w = sol.window;
    let reach = (-w.lo()).min(w.hi() - 1);
    let n = sol.n_grid as f64;
    let rho = |x: i64| sol.density[k][w.index(x)].as_f64();
    let probes: Vec<i64> = (FIRST_PROBE..)
        .map(|j| 1i64 << j)
        .take_while(|&m| 2 * m + 1 <= reach && m as f64 / n <= 0.5)
        .collect();
    if probes.len() < 2 {
        return Err(PdeError::Domain(format!("n = {} leaves fewer than two probe scales", sol.n_grid)));
    }
    let scaled = |x: i64, u: f64| 0.5 * n * (rho(x + 1) - rho(x - 1)) * u.powf(2.0 - r.gamma);
    // Coarse to fine, so the limit sits at the end.
    let plus: Vec<f64> = probes.iter().rev().map(|&m| scaled(m, m as f64 / n)).collect();
    let minus: Vec<f64> = probes.iter().rev().map(|&m| scaled(-m, m as f64 / n)).collect();
    let limit = |terms: Vec<f64>| {
        let finest = *terms.last().expect("probes");
        if terms.len() < MIN_EXTRAPOLATION_TERMS {
            return (-finest, false);
        }
        match extrapolate_geometric(terms) {
            Ok((v, _, _)) => (-v, true),
            Err(_) => (-finest, false),
        }
    };
    let (dp, ok_p) = limit(plus);
    let (dm, ok_m) = limit(minus);
    let (tp, tm) = boundary_traces(sol, k)?;
    let jump = tp - tm;
    let ratio = (jump.abs() > 1e-12).then(|| dp / jump);
    Ok(BoundaryDiagnostics {
        time: t,
        derivative_plus: dp,
        derivative_minus: dm,
        jump,
        extrapolated: ok_p && ok_m,
        ratio,
    })
}

/// `sup_t |∫_0^t [ρ(s,0+) − ρ(s,0−)] ds|` over the stored times.
pub fn continuity_at_origin_check<T: SolverScalar>(sol: &HydroSolution<T>) -> Result<f64, PdeError> {
    let jumps: Vec<f64> = (0..sol.times.len())
        .map(|k| boundary_traces(sol, k).map(|(p, m)| p - m))
        .collect::<Result<_, _>>()?;
    let mut sup: f64 = 0.0;
    for k in 1..sol.times.len() {
        sup = sup.max(trapezoid(&sol.times[..=k], &jumps[..=k]).abs());
    }
    Ok(sup)
}
