//! Time-integrated `H^{γ/2}` seminorms of lattice solutions on `ℝ` and on each half-line,
//! judged under grid refinement and against the lattice energy budget.

use serde::{Deserialize, Serialize};

use super::VerifyError;
use crate::fracops::{lattice_seminorm, GridFunction, Interval};
use crate::kernel::KernelLaw;
use crate::pde::{HydroSolution, SolverScalar};

/// Contraction factor of successive refinement increments below which the integrals count as converging.
pub const CONTRACTION: f64 = 0.8;
/// Relative growth in the last increment below which the integrals count as settled.
pub const SETTLED: f64 = 1e-3;
/// Densities live in `[0, 1]`; a snapshot varying less than this is constant up to round-off.
const FLAT: f64 = 1e-12;
/// Allowance for the continuum interpolation and the trapezoid rule against the exact energy drop.
pub const BUDGET_SLACK: f64 = 1.25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormRow {
    pub interval: Interval,
    /// `∫ [ρ_n(t) − a] dt` per grid, in the order given; `None` where the tail is infinite.
    pub integrals: Vec<Option<f64>>,
    /// Energy dissipated over the same times, over `c_γ`, per grid; `None` on `ℝ`.
    pub budgets: Vec<Option<f64>>,
    /// Every integral within [`BUDGET_SLACK`] times its budget.
    pub certified: bool,
    /// Certified, or converging under refinement.
    pub finite: bool,
    /// Finest integral when finite.
    pub value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub gamma: f64,
    pub grids: Vec<u64>,
    pub rows: Vec<SeminormRow>,
}

impl SeminormReport {
    pub fn row(&self, interval: Interval) -> &SeminormRow {
        self.rows.iter().find(|r| r.interval == interval).expect("all intervals are reported")
    }
}

/// `∫ [ρ(t) − a]_{H^{γ/2}(I)} dt` over the positive stored times, at the solution's own spacing.
///
/// Outside the window each snapshot is extended by its edge values, so the reflecting window
/// edges add no artificial jump.
pub fn integrated_lattice_seminorm<T: SolverScalar>(
    sol: &HydroSolution<T>,
    a: f64,
    interval: Interval,
) -> Result<Option<f64>, VerifyError> {
    let first = sol.times.iter().position(|&t| t > 0.0);
    let Some(first) = first.filter(|&k| k + 1 < sol.times.len()) else {
        return Err(VerifyError::Domain("need at least two positive stored times".into()));
    };
    let mut values = Vec::with_capacity(sol.times.len() - first);
    for k in first..sol.times.len() {
        let v: Vec<f64> = sol.density[k].iter().map(|x| x.as_f64() - a).collect();
        if v.iter().all(|x| (x - v[0]).abs() <= FLAT) {
            values.push(0.0);
            continue;
        }
        let edges = (v[0], *v.last().expect("non-empty window"));
        let grid = GridFunction::new(sol.n_grid, sol.window.lo(), v, edges)?;
        match lattice_seminorm(&grid, interval, sol.regime.gamma) {
            Some(s) => values.push(s),
            None => return Ok(None),
        }
    }
    Ok(Some(crate::pde::weak::trapezoid(&sol.times[first..], &values)))
}

/// Seminorm integrals of one problem solved on grids of increasing `n`, one row per interval.
///
/// The time `0` is left out: initial data may have a jump that the equation smooths at once.
///
/// Two tests make a row finite. Slow bonds all cross the origin, so on a half-line the lattice
/// energy identity bounds the seminorm integral by the energy drop over `c_γ`, and the drop is
/// bounded uniformly in `n`; a bound that holds on every grid certifies a finite limit. On `ℝ`
/// the rows extend the density past the reflecting window edges, and pairs straddling the origin
/// beyond the window carry seminorm that the windowed dynamics never dissipates, so there
/// seminorm integrals are non-negative, so a row is finite unless the last
/// refinement increment is a non-negligible growth that fails to contract by
/// [`CONTRACTION`]; a jump that persists makes the integrals grow like `n^{γ−1}`.
pub fn seminorm_finiteness_check<T: SolverScalar>(
    solutions: &[HydroSolution<T>],
    a: f64,
) -> Result<SeminormReport, VerifyError> {
    if solutions.len() < 3 {
        return Err(VerifyError::Domain("need solutions on at least three grids".into()));
    }
    let gamma = solutions[0].regime.gamma;
    for w in solutions.windows(2) {
        if w[1].n_grid <= w[0].n_grid || w[1].regime != w[0].regime || w[1].times != w[0].times {
            return Err(VerifyError::Domain("solutions must share regime and times, with increasing n".into()));
        }
    }
    let c_gamma = KernelLaw::new(gamma)?.c_gamma();
    let mut rows = Vec::with_capacity(3);
    for interval in Interval::all() {
        let integrals: Vec<Option<f64>> =
            solutions.iter().map(|s| integrated_lattice_seminorm(s, a, interval)).collect::<Result<_, _>>()?;
        let budgets: Vec<Option<f64>> = solutions
            .iter()
            .map(|s| {
                let first = s.times.iter().position(|&t| t > 0.0).expect("checked by the integrals");
                let drop = s.energy(first, a) - s.energy(s.times.len() - 1, a);
                (interval != Interval::Line).then(|| drop / (s.n_grid as f64 * c_gamma))
            })
            .collect();
        let certified = integrals
            .iter()
            .zip(&budgets)
            .all(|(v, b)| matches!((v, b), (Some(v), Some(b)) if *v <= BUDGET_SLACK * b + FLAT));
        let converging = match integrals.iter().copied().collect::<Option<Vec<f64>>>() {
            Some(v) => {
                let k = v.len();
                let (d1, d2) = (v[k - 2] - v[k - 3], v[k - 1] - v[k - 2]);
                d2 <= SETTLED * v[k - 1].abs() || d2 <= CONTRACTION * d1.max(0.0)
            }
            None => false,
        };
        let finite = certified || converging;
        let value = if finite { *integrals.last().expect("three grids") } else { None };
        rows.push(SeminormRow { interval, integrals, budgets, certified, finite, value });
    }
    Ok(SeminormReport { gamma, grids: solutions.iter().map(|s| s.n_grid).collect(), rows })
}
