//! Replica ensembles of `⟨π^n_t, G⟩` against `∫ G ρ_t` from the limit equation.
//!
//! Simulation and reference share the macroscopic window `[−H, H)` with jumps leaving it
//! suppressed; the reference is the lattice ODE at a finer grid `n_ref`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{mean_and_ci, VerifyError};
use crate::fracops::TestFunction;
use crate::pde::{classify_regime, solve_hydro, HydroSolution, InitialProfile, RegimeSpec, SolverOptions};
use crate::process::{empirical_pairing, sample_initial, simulate, BarrierSpec, ProcessError, SimOptions, Window};
use crate::streams::{experiment_key, replica_stream};
use crate::JumpKernel;

pub const MIN_REPLICAS: usize = 30;
pub const CSV_SCHEMA: &str = "hydro-comparison/1";

#[derive(Clone, Debug)]
pub struct CompareSetup {
    /// Experiment label; with `seed` it keys the replica streams.
    pub label: String,
    pub gamma: f64,
    pub barrier: BarrierSpec,
    pub profile: InitialProfile,
    pub tests: Vec<TestFunction<f64>>,
    pub n_list: Vec<u64>,
    pub replicas: usize,
    /// Positive observation times; the largest is the horizon.
    pub times: Vec<f64>,
    /// Macroscopic half-width `H`.
    pub half_width: f64,
    pub n_ref: u64,
    /// Barrier of the reference equation when it should differ from the simulated one.
    pub reference_barrier: Option<BarrierSpec>,
    pub seed: u64,
    pub event_budget: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: u64,
    pub test: String,
    pub time: f64,
    pub mean: f64,
    /// Half-width `1.96·s/√R`.
    pub ci: f64,
    pub pde: f64,
    pub discrepancy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub n: u64,
    /// Replicas that finished; fewer than requested when the event budget ran out.
    pub replicas: usize,
    pub sup_discrepancy: f64,
    /// CI half-width of the row attaining the sup.
    pub ci_at_sup: f64,
    pub max_ci: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub label: String,
    pub regime: RegimeSpec,
    pub reference_regime: RegimeSpec,
    pub n_ref: u64,
    pub rows: Vec<ComparisonRow>,
    pub per_n: Vec<ComparisonSummary>,
    /// Some replica hit the event budget; its results are dropped.
    pub partial: bool,
}

impl ComparisonReport {
    /// Sup discrepancy strictly decreasing along `n_list`.
    pub fn decreasing(&self) -> bool {
        self.per_n.windows(2).all(|w| w[1].sup_discrepancy < w[0].sup_discrepancy)
    }

    /// Whether the largest `n` has `sup ≤ tol + k·CI`.
    pub fn within(&self, tol: f64, k: f64) -> bool {
        self.per_n.last().is_some_and(|s| s.sup_discrepancy <= tol + k * s.ci_at_sup)
    }

    /// Whether the largest `n` has `sup > tol + k·CI`.
    pub fn exceeds(&self, tol: f64, k: f64) -> bool {
        self.per_n.last().is_some_and(|s| s.sup_discrepancy > tol + k * s.ci_at_sup)
    }

    pub fn write_csv<W: Write>(&self, out: &mut W, header: &[String]) -> std::io::Result<()> {
        writeln!(out, "# schema={CSV_SCHEMA}")?;
        for line in header {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["label", "n", "test", "time", "mean", "ci", "pde", "discrepancy"])?;
        for r in &self.rows {
            w.write_record(&[
                self.label.clone(),
                r.n.to_string(),
                r.test.clone(),
                format!("{}", r.time),
                format!("{}", r.mean),
                format!("{}", r.ci),
                format!("{}", r.pde),
                format!("{}", r.discrepancy),
            ])?;
        }
        w.flush()
    }
}

fn validate(setup: &CompareSetup, regime: &RegimeSpec) -> Result<(), VerifyError> {
    if setup.replicas < MIN_REPLICAS {
        return Err(VerifyError::Domain(format!("need at least {MIN_REPLICAS} replicas, got {}", setup.replicas)));
    }
    if setup.n_list.is_empty() || setup.n_list.iter().any(|&n| n == 0 || n > setup.n_ref) {
        return Err(VerifyError::Domain(format!("grid sizes must lie in [1, n_ref = {}]", setup.n_ref)));
    }
    if setup.times.is_empty() || setup.times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(VerifyError::Domain("observation times must be positive".into()));
    }
    if setup.times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(VerifyError::Domain("observation times must increase".into()));
    }
    if setup.tests.is_empty() {
        return Err(VerifyError::Domain("no test functions".into()));
    }
    for g in &setup.tests {
        if !regime.test_class.admits(g.class()) {
            return Err(VerifyError::Domain(format!(
                "{} is {:?}, outside the regime's class {:?}",
                g.name(),
                g.class(),
                regime.test_class
            )));
        }
        if g.b_g() >= setup.half_width {
            return Err(VerifyError::Domain(format!("{} reaches beyond the window half-width", g.name())));
        }
    }
    setup.profile.validate()?;
    Ok(())
}

fn macro_window(half_width: f64, n: u64) -> Result<Window, VerifyError> {
    Ok(Window::symmetric((half_width * n as f64).round() as i64)?)
}

/// `∫ G ρ_t` per `(G, t)` from the reference solution.
fn reference_values(setup: &CompareSetup, regime: &RegimeSpec, barrier: &BarrierSpec) -> Result<Vec<Vec<f64>>, VerifyError> {
    let mut times = vec![0.0];
    times.extend_from_slice(&setup.times);
    let window = macro_window(setup.half_width, setup.n_ref)?;
    let sol: HydroSolution<f64> =
        solve_hydro(regime, &setup.profile, barrier, setup.n_ref, window, &times, &SolverOptions::default())?;
    Ok(setup
        .tests
        .iter()
        .map(|g| (1..times.len()).map(|k| sol.pairing(k, |u| g.value(u))).collect())
        .collect())
}

/// One replica: pairings indexed `[test][time]`, or `None` when it ran out of events.
fn replica(
    setup: &CompareSetup,
    kernel: &JumpKernel,
    n: u64,
    window: Window,
    key: u64,
    r: usize,
) -> Result<Option<Vec<Vec<f64>>>, VerifyError> {
    let mut rng = replica_stream(key, r as u64);
    let config = sample_initial(|u| setup.profile.value(u), n, window, &mut rng)?;
    let horizon = *setup.times.last().expect("validated");
    let options = SimOptions { event_budget: setup.event_budget };
    let obs = match simulate(config, &setup.barrier, n, kernel, horizon, &setup.times, &mut rng, options) {
        Ok(o) => o,
        Err(ProcessError::Budget { .. }) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut out = Vec::with_capacity(setup.tests.len());
    for g in &setup.tests {
        out.push(obs.records.iter().map(|c| empirical_pairing(c, g, n)).collect::<Result<Vec<_>, _>>()?);
    }
    Ok(Some(out))
}

/// Runs `replicas` simulations per `n` and pairs their ensemble means with the reference equation.
pub fn hydro_compare(setup: &CompareSetup) -> Result<ComparisonReport, VerifyError> {
    let regime = classify_regime(setup.gamma, &setup.barrier)?;
    validate(setup, &regime)?;
    let ref_barrier = setup.reference_barrier.clone().unwrap_or_else(|| setup.barrier.clone());
    let reference_regime = classify_regime(setup.gamma, &ref_barrier)?;
    let reference = reference_values(setup, &reference_regime, &ref_barrier)?;
    let kernel = JumpKernel::with_default_truncation(setup.gamma)?;

    let mut rows = Vec::new();
    let mut per_n = Vec::new();
    let mut partial = false;
    for &n in &setup.n_list {
        let window = macro_window(setup.half_width, n)?;
        let key = experiment_key(&format!("{}/n={n}", setup.label), setup.seed);
        // Collected in replica order, so the reduction below does not depend on scheduling.
        let results: Vec<Option<Vec<Vec<f64>>>> = (0..setup.replicas)
            .into_par_iter()
            .map(|r| replica(setup, &kernel, n, window, key, r))
            .collect::<Result<_, _>>()?;
        let done: Vec<&Vec<Vec<f64>>> = results.iter().flatten().collect();
        if done.len() < setup.replicas {
            partial = true;
        }
        let mut summary = ComparisonSummary {
            n,
            replicas: done.len(),
            sup_discrepancy: 0.0,
            ci_at_sup: f64::NAN,
            max_ci: 0.0,
        };
        if done.len() < 2 {
            per_n.push(summary);
            continue;
        }
        for (gi, g) in setup.tests.iter().enumerate() {
            for (ti, &t) in setup.times.iter().enumerate() {
                let samples: Vec<f64> = done.iter().map(|rep| rep[gi][ti]).collect();
                let (mean, ci) = mean_and_ci(&samples);
                let pde = reference[gi][ti];
                let discrepancy = (mean - pde).abs();
                if discrepancy >= summary.sup_discrepancy {
                    summary.sup_discrepancy = discrepancy;
                    summary.ci_at_sup = ci;
                }
                summary.max_ci = summary.max_ci.max(ci);
                rows.push(ComparisonRow { n, test: g.name().to_string(), time: t, mean, ci, pde, discrepancy });
            }
        }
        per_n.push(summary);
    }
    Ok(ComparisonReport {
        label: setup.label.clone(),
        regime,
        reference_regime,
        n_ref: setup.n_ref,
        rows,
        per_n,
        partial,
    })
}
