//! Subcommands. Each writes its artifacts under the output directory together with the
//! canonical config copy `config.toml`; every artifact starts with the config hash and seed.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use fracsep::fracops::discrete::{operator_convergence_report, robin_boundary_sum, OperatorVariant};
use fracsep::fracops::{FracOpsError, Interval, TestClass};
use fracsep::pde::{energy_increase, solve_hydro, Equation, HydroSolution, SolverOptions};
use fracsep::process::{sample_initial, simulate, BarrierSpec, SimOptions, Window};
use fracsep::streams::{experiment_key, replica_stream};
use fracsep::verify::{
    detailed_balance_check, dirichlet_form, generator_quadratic_form, hydro_compare, moving_particle_check,
    random_density, seminorm_finiteness_check, CompareSetup, SmallSystem,
};
use fracsep::{JumpKernel, KernelLaw};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::ExperimentConfig;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Pde(#[from] fracsep::pde::PdeError),
    #[error(transparent)]
    Process(#[from] fracsep::process::ProcessError),
    #[error(transparent)]
    Verify(#[from] fracsep::verify::VerifyError),
    #[error(transparent)]
    FracOps(#[from] FracOpsError),
    #[error(transparent)]
    Kernel(#[from] fracsep::kernel::KernelError),
    #[error("{0} check(s) failed")]
    Failed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Classify,
    Simulate,
    Solve,
    Compare,
    Verify,
    Opcheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Simulate => "simulate",
            Command::Solve => "solve",
            Command::Compare => "compare",
            Command::Verify => "verify",
            Command::Opcheck => "opcheck",
        }
    }
}

/// Output context shared by the subcommands.
pub struct Run<'a> {
    pub config: &'a ExperimentConfig,
    pub command: Command,
    pub out: PathBuf,
    hash: String,
}

impl<'a> Run<'a> {
    pub fn new(config: &'a ExperimentConfig, command: Command, out: PathBuf) -> Self {
        Self { config, command, out, hash: config.hash() }
    }

    pub fn header(&self) -> String {
        format!("config_hash={} seed={} command={}", self.hash, self.config.seed, self.command.name())
    }

    fn create(&self, name: &str) -> Result<BufWriter<fs::File>, RunError> {
        Ok(BufWriter::new(fs::File::create(self.out.join(name))?))
    }

    fn write_json<T: Serialize>(&self, name: &str, report: &T) -> Result<(), RunError> {
        let doc = serde_json::json!({
            "config_hash": self.hash,
            "seed": self.config.seed,
            "command": self.command.name(),
            "report": report,
        });
        let mut f = self.create(name)?;
        serde_json::to_writer_pretty(&mut f, &doc).map_err(std::io::Error::from)?;
        writeln!(f)?;
        f.flush()?;
        Ok(())
    }

    fn barrier(&self) -> Result<BarrierSpec, RunError> {
        self.config.barrier_spec().map_err(RunError::Config)
    }

    fn window(&self, n: u64) -> Result<Window, RunError> {
        Ok(Window::symmetric((self.config.compare.half_width * n as f64).round() as i64)?)
    }

    fn solve(&self, n: u64) -> Result<HydroSolution<f64>, RunError> {
        let barrier = self.barrier()?;
        let regime = self.config.regime().map_err(RunError::Config)?;
        let mut times = vec![0.0];
        times.extend_from_slice(&self.config.times);
        Ok(solve_hydro(&regime, &self.config.profile, &barrier, n, self.window(n)?, &times, &SolverOptions::default())?)
    }

    /// Writes `config.toml` and dispatches; returns a one-line summary for the terminal.
    pub fn execute(&self) -> Result<String, RunError> {
        fs::create_dir_all(&self.out)?;
        fs::write(self.out.join("config.toml"), self.config.to_toml())?;
        match self.command {
            Command::Classify => self.classify(),
            Command::Simulate => self.simulate(),
            Command::Solve => self.solve_all(),
            Command::Compare => self.compare(),
            Command::Verify => self.verify(),
            Command::Opcheck => self.opcheck(),
        }
    }

    fn classify(&self) -> Result<String, RunError> {
        let regime = self.config.regime().map_err(RunError::Config)?;
        self.write_json("regime.json", &regime)?;
        let m = if regime.gamma > 1.0 { Some(KernelLaw::new(regime.gamma)?.mean_jump()) } else { None };
        let mut line = format!("{:?} kappa={} test_class={:?}", regime.equation, regime.kappa, regime.test_class);
        if regime.equation == Equation::FractionalRobin {
            if let Some(m) = m {
                line.push_str(&format!(" (alpha*m with m={m})"));
            }
        }
        Ok(line)
    }

    fn simulate(&self) -> Result<String, RunError> {
        let c = self.config;
        let barrier = self.barrier()?;
        let kernel = JumpKernel::with_default_truncation(c.gamma)?;
        let options = SimOptions { event_budget: c.event_budget };
        for &n in &c.n_list {
            let window = self.window(n)?;
            let key = experiment_key(&format!("simulate/n={n}"), c.seed);
            let runs: Vec<_> = (0..c.replicas)
                .into_par_iter()
                .map(|r| -> Result<_, RunError> {
                    let mut rng = replica_stream(key, r as u64);
                    let config = sample_initial(|u| c.profile.value(u), n, window, &mut rng)?;
                    Ok(simulate(config, &barrier, n, &kernel, c.horizon, &c.times, &mut rng, options)?)
                })
                .collect::<Result<_, _>>()?;
            let mut f = self.create(&format!("simulate_n{n}.csv"))?;
            writeln!(f, "# schema=trajectory/1")?;
            writeln!(f, "# {} n={n} window=[{},{})", self.header(), window.lo(), window.hi())?;
            writeln!(f, "replica,time,site")?;
            for (r, obs) in runs.iter().enumerate() {
                for (t, config) in obs.schedule.iter().zip(&obs.records) {
                    for x in config.occupied_sites() {
                        writeln!(f, "{r},{t},{x}")?;
                    }
                }
            }
            f.flush()?;
            let mut s = self.create(&format!("simulate_n{n}_summary.csv"))?;
            writeln!(s, "# schema=trajectory-summary/1")?;
            writeln!(s, "# {} n={n}", self.header())?;
            writeln!(s, "replica,crossing_net,crossing_total,proposals,accepted")?;
            for (r, obs) in runs.iter().enumerate() {
                writeln!(s, "{r},{},{},{},{}", obs.crossing_count, obs.crossing_total, obs.proposals, obs.accepted)?;
            }
            s.flush()?;
        }
        Ok(format!("simulated {} replica(s) at n = {:?}", c.replicas, c.n_list))
    }

    fn solve_all(&self) -> Result<String, RunError> {
        for &n in &self.config.n_list {
            let sol = self.solve(n)?;
            let mut f = self.create(&format!("solve_n{n}.csv"))?;
            sol.write_csv(&mut f, &[format!("{} n={n} dt={}", self.header(), sol.dt)])?;
            f.flush()?;
        }
        Ok(format!("solved at n = {:?}", self.config.n_list))
    }

    pub fn compare_setup(&self) -> Result<CompareSetup, RunError> {
        let c = self.config;
        Ok(CompareSetup {
            label: "compare".into(),
            gamma: c.gamma,
            barrier: self.barrier()?,
            profile: c.profile,
            tests: c.tests().map_err(RunError::Config)?,
            n_list: c.n_list.clone(),
            replicas: c.replicas,
            times: c.times.clone(),
            half_width: c.compare.half_width,
            n_ref: c.n_ref(),
            reference_barrier: c.compare.reference_beta.map(|b| BarrierSpec::thick(c.alpha, b)).transpose()?,
            seed: c.seed,
            event_budget: c.event_budget,
        })
    }

    fn compare(&self) -> Result<String, RunError> {
        let report = hydro_compare(&self.compare_setup()?)?;
        let mut f = self.create("compare.csv")?;
        report.write_csv(&mut f, &[self.header()])?;
        f.flush()?;
        self.write_json("compare.json", &report)?;
        let sups: Vec<String> = report.per_n.iter().map(|s| format!("n={}: {:.4} (CI {:.4})", s.n, s.sup_discrepancy, s.ci_at_sup)).collect();
        Ok(format!("sup discrepancy {}{}", sups.join(", "), if report.partial { " [partial]" } else { "" }))
    }

    fn verify(&self) -> Result<String, RunError> {
        let checks = verify_suite(self)?;
        let mut f = self.create("verify.csv")?;
        writeln!(f, "# schema=verify/1")?;
        writeln!(f, "# {}", self.header())?;
        writeln!(f, "check,value,threshold,pass")?;
        for c in &checks {
            writeln!(f, "{},{},{},{}", c.name, c.value, c.threshold, c.pass)?;
        }
        f.flush()?;
        self.write_json("verify.json", &checks)?;
        let failed = checks.iter().filter(|c| !c.pass).count();
        if failed > 0 {
            return Err(RunError::Failed(failed));
        }
        Ok(format!("{} check(s) passed", checks.len()))
    }

    fn opcheck(&self) -> Result<String, RunError> {
        let c = self.config;
        let law = KernelLaw::new(c.gamma)?;
        let tests = c.tests().map_err(RunError::Config)?;
        let mut rows = Vec::new();
        for g in &tests {
            for variant in [OperatorVariant::Full, OperatorVariant::Regional, OperatorVariant::Slow] {
                match operator_convergence_report(g, &c.n_list, variant, &law, c.beta, c.horizon) {
                    Ok(r) => rows.extend(r.rows.iter().map(|row| OpRow {
                        check: format!("{variant:?}").to_lowercase(),
                        test: g.name().to_string(),
                        n: row.n,
                        error: row.error,
                    })),
                    Err(FracOpsError::Domain(_)) => {}
                    Err(e) => return Err(e.into()),
                }
            }
            if c.gamma > 1.0 && g.class() != TestClass::Neu {
                for &n in &c.n_list {
                    let s = robin_boundary_sum(g, n, &law)?;
                    rows.push(OpRow { check: "robin_boundary".into(), test: g.name().to_string(), n, error: s.residual });
                }
            }
        }
        let mut f = self.create("opcheck.csv")?;
        writeln!(f, "# schema=opcheck/1")?;
        writeln!(f, "# {}", self.header())?;
        writeln!(f, "check,test,n,error")?;
        for r in &rows {
            writeln!(f, "{},{},{},{}", r.check, r.test, r.n, r.error)?;
        }
        f.flush()?;
        self.write_json("opcheck.json", &rows)?;
        Ok(format!("{} operator error(s) written", rows.len()))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OpRow {
    pub check: String,
    pub test: String,
    pub n: u64,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn at_most(name: &str, value: f64, threshold: f64) -> Check {
    Check { name: name.into(), value, threshold, pass: value <= threshold }
}

fn at_least(name: &str, value: f64, threshold: f64) -> Check {
    Check { name: name.into(), value, threshold, pass: value > threshold }
}

fn flag(name: &str, ok: bool) -> Check {
    Check { name: name.into(), value: if ok { 1.0 } else { 0.0 }, threshold: 1.0, pass: ok }
}

/// Small-system, energy and seminorm checks for the configured model.
fn verify_suite(run: &Run) -> Result<Vec<Check>, RunError> {
    let c = run.config;
    let barrier = run.barrier()?;
    let law = KernelLaw::new(c.gamma)?;
    let n0 = c.n_list[0];
    let mut out = Vec::new();
    let six = SmallSystem::new(&[-3, -2, -1, 0, 1, 2], &law, &barrier, n0)?;
    let eight = SmallSystem::new(&[-3, -2, -1, 0, 1, 2, 3, 4], &law, &barrier, n0)?;
    let mut rng = replica_stream(experiment_key("verify", c.seed), 0);

    let a = 0.5;
    out.push(at_most("detailed_balance", detailed_balance_check(&six, a)?, 1e-14));
    let drift = SmallSystem::with_jump_rates(&[0, 1, 2, 3], |x, y| law.p(y - x) * if y > x { 1.3 } else { 0.7 })?;
    out.push(at_least("asymmetric_control_violation", detailed_balance_check(&drift, a)?, 1e-14));

    let mut worst: f64 = 0.0;
    for _ in 0..c.verify.densities {
        let f = random_density(&six, a, 1.0, &mut rng);
        let root: Vec<f64> = f.iter().map(|v| v.sqrt()).collect();
        let d = dirichlet_form(&six, &f, a)?;
        worst = worst.max((d.total + 2.0 * generator_quadratic_form(&six, &root, a)).abs());
    }
    out.push(at_most("dirichlet_identity", worst, 1e-12));

    let mut r1 = replica_stream(experiment_key("verify/mpl", c.seed), 0);
    let once = moving_particle_check(1, 1, c.verify.samples, &eight, c.gamma, a, &mut r1)?;
    let mut r2 = replica_stream(experiment_key("verify/mpl", c.seed), 0);
    let twice = moving_particle_check(1, 1, 2 * c.verify.samples, &eight, c.gamma, a, &mut r2)?;
    out.push(at_most("moving_particle_growth", twice.max_ratio / once.max_ratio - 1.0, 0.05));
    out.push(at_most("moving_particle_contradictions", (once.contradictions + twice.contradictions) as f64, 0.0));
    out.push(flag("moving_particle_fast_dominates", twice.max_ratio_fast >= twice.max_ratio));

    let sols: Vec<HydroSolution<f64>> = c.n_list.iter().take(3).map(|&n| run.solve(n)).collect::<Result<_, _>>()?;
    let worst_energy = sols
        .iter()
        .map(|s| energy_increase(s, a) / s.energy(0, a).max(1.0))
        .fold(0.0, f64::max);
    out.push(at_most("energy_increase", worst_energy, 1e-12));
    if sols.len() == 3 {
        let report = seminorm_finiteness_check(&sols, a)?;
        for side in [Interval::Left, Interval::Right] {
            out.push(flag(&format!("seminorm_finite_{side:?}").to_lowercase(), report.row(side).finite));
        }
        let line = report.row(Interval::Line).finite;
        let regime = &sols[0].regime;
        let continuous = matches!(regime.equation, Equation::FullLineFractional | Equation::MixedKappa);
        // For γ ≤ 1 a jump has finite seminorm, while different limits at ±∞ do not; neither
        // says anything about the barrier.
        let judged = regime.gamma > 1.0;
        if judged && continuous {
            out.push(flag("seminorm_finite_line", line));
        } else if judged && c.profile.jumps_at_origin() {
            out.push(flag("seminorm_divergent_line", !line));
        }
    }
    Ok(out)
}

/// `--out`, then the environment variable, then the config, then `fracsep-out`.
pub fn output_dir(flag: Option<&Path>, env: Option<String>, config: &ExperimentConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| env.filter(|s| !s.is_empty()).map(PathBuf::from))
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("fracsep-out"))
}
