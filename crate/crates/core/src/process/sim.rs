//! Thinning simulation of the generator `n^γ L_n` on a finite window.

use rand::{Rng, RngExt};
use rand_distr::{Distribution, Exp1};

use super::{BarrierSpec, Configuration, ProcessError};
use crate::{JumpKernel, KernelLaw};

/// Generator coefficient of the ordered pair `(x, y)`: `½ p(x−y) ξ^n_{x,y}(η)`.
///
/// The swap `η → η^{x,y}` collects both orders, so it fires at rate `p(x−y) w_{x,y}` before the
/// `n^γ` time change.
pub fn transition_rate(config: &Configuration, x: i64, y: i64, barrier: &BarrierSpec, n: u64, law: &KernelLaw) -> f64 {
    if x == y || config.occupied(x) == config.occupied(y) {
        return 0.0;
    }
    0.5 * law.p(x - y) * barrier.weight(x, y, n)
}

/// One proposal of the thinning engine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Proposal {
    pub time: f64,
    pub from: i64,
    pub to: i64,
    pub accepted: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimOptions {
    /// Maximum number of proposals, accepted or not.
    pub event_budget: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { event_budget: 20_000_000_000 }
    }
}

/// Particle-picking engine. Each particle proposes jumps at rate `n^γ E` with
/// `E = max(1, α n^{-β})`; a proposal to an empty site `y` inside the window is accepted with
/// probability `w_{x,y} / E`. Proposals leaving the window are rejected.
pub struct Simulator<'k> {
    kernel: &'k JumpKernel,
    barrier: BarrierSpec,
    config: Configuration,
    positions: Vec<i64>,
    time: f64,
    rate_per_particle: f64,
    fast_accept: f64,
    slow_accept: f64,
    crossing_net: i64,
    crossing_total: u64,
    proposals: u64,
    accepted: u64,
}

impl<'k> Simulator<'k> {
    pub fn new(config: Configuration, barrier: BarrierSpec, n: u64, kernel: &'k JumpKernel) -> Self {
        let positions: Vec<i64> = config.occupied_sites().collect();
        let slow = barrier.slow_factor(n);
        let envelope = if barrier.is_none() { 1.0 } else { slow.max(1.0) };
        Self {
            kernel,
            config,
            positions,
            time: 0.0,
            rate_per_particle: (n as f64).powf(kernel.gamma()) * envelope,
            fast_accept: 1.0 / envelope,
            slow_accept: if barrier.is_none() { 1.0 } else { slow / envelope },
            barrier,
            crossing_net: 0,
            crossing_total: 0,
            proposals: 0,
            accepted: 0,
        }
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn into_config(self) -> Configuration {
        self.config
    }

    /// Macroscopic time of the last proposal.
    pub fn time(&self) -> f64 {
        self.time
    }

    /// Accepted jumps from `x < 0` to `y ≥ 0` minus the reverse.
    pub fn crossing_net(&self) -> i64 {
        self.crossing_net
    }

    /// Accepted jumps across the origin in either direction.
    pub fn crossing_total(&self) -> u64 {
        self.crossing_total
    }

    pub fn proposals(&self) -> u64 {
        self.proposals
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    /// Total proposal rate in macroscopic time.
    pub fn total_rate(&self) -> f64 {
        self.rate_per_particle * self.positions.len() as f64
    }

    /// Waiting time to the next proposal; `+∞` when the window is empty.
    pub fn draw_wait<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let r = self.total_rate();
        if r == 0.0 {
            f64::INFINITY
        } else {
            let e: f64 = Exp1.sample(rng);
            e / r
        }
    }

    /// Performs one proposal at time `at`.
    pub fn propose<R: Rng + ?Sized>(&mut self, at: f64, rng: &mut R) -> Proposal {
        self.time = at;
        self.proposals += 1;
        let k = rng.random_range(0..self.positions.len());
        let x = self.positions[k];
        let y = x.saturating_add(self.kernel.sample(rng));
        let w = self.config.window();
        let mut accepted = w.contains(y) && !self.config.occupied(y);
        if accepted {
            let crosses = (x < 0) != (y < 0);
            let prob = if crosses && self.barrier.is_slow(x, y) { self.slow_accept } else { self.fast_accept };
            if prob < 1.0 {
                accepted = rng.random::<f64>() < prob;
            }
            if accepted {
                self.config.set(x, false);
                self.config.set(y, true);
                self.positions[k] = y;
                self.accepted += 1;
                if crosses {
                    self.crossing_total += 1;
                    self.crossing_net += if x < 0 { 1 } else { -1 };
                }
            }
        }
        Proposal { time: at, from: x, to: y, accepted }
    }
}

/// Recorded trajectory. `records[i]` is the state at `schedule[i]`.
#[derive(Clone, Debug)]
pub struct TrajectoryObservation {
    pub schedule: Vec<f64>,
    pub records: Vec<Configuration>,
    pub crossing_count: i64,
    pub crossing_total: u64,
    pub proposals: u64,
    pub accepted: u64,
}

/// Runs the chain up to macroscopic time `horizon`, recording the state at each `schedule` time.
pub fn simulate<R: Rng + ?Sized>(
    config: Configuration,
    barrier: &BarrierSpec,
    n: u64,
    kernel: &JumpKernel,
    horizon: f64,
    schedule: &[f64],
    rng: &mut R,
    options: SimOptions,
) -> Result<TrajectoryObservation, ProcessError> {
    check_schedule(schedule, horizon)?;
    let mut sim = Simulator::new(config, barrier.clone(), n, kernel);
    let mut records = Vec::with_capacity(schedule.len());
    let mut next = 0;
    let mut t = 0.0;
    loop {
        let t_new = t + sim.draw_wait(rng);
        while next < schedule.len() && schedule[next] < t_new {
            if !sim.config().count_is_consistent() {
                return Err(ProcessError::Invariant(format!("particle count drifted at t = {}", schedule[next])));
            }
            records.push(sim.config().clone());
            next += 1;
        }
        if t_new > horizon {
            break;
        }
        if sim.proposals() >= options.event_budget {
            return Err(ProcessError::Budget { last_time: t, records: records.len() });
        }
        sim.propose(t_new, rng);
        t = t_new;
    }
    Ok(TrajectoryObservation {
        schedule: schedule.to_vec(),
        records,
        crossing_count: sim.crossing_net(),
        crossing_total: sim.crossing_total(),
        proposals: sim.proposals(),
        accepted: sim.accepted(),
    })
}

pub(crate) fn check_schedule(schedule: &[f64], horizon: f64) -> Result<(), ProcessError> {
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(ProcessError::Schedule(format!("horizon must be finite and non-negative, got {horizon}")));
    }
    for (i, &s) in schedule.iter().enumerate() {
        if !(0.0..=horizon).contains(&s) {
            return Err(ProcessError::Schedule(format!("time {s} outside [0, {horizon}]")));
        }
        if i > 0 && s <= schedule[i - 1] {
            return Err(ProcessError::Schedule("schedule must be strictly increasing".into()));
        }
    }
    Ok(())
}

/// Bound on `|E⟨π_t,G⟩|` lost to the window: `T‖G‖∞·2b_G·(2c_γ/γ)(W/n − b_G)^{-γ}`.
pub fn window_truncation_bound(law: &KernelLaw, n: u64, half_width: i64, b_g: f64, horizon: f64, g_sup: f64) -> f64 {
    let gap = half_width as f64 / n as f64 - b_g;
    if gap <= 0.0 {
        return f64::INFINITY;
    }
    horizon * g_sup * 2.0 * b_g * (2.0 * law.c_gamma() / law.gamma()) * gap.powf(-law.gamma())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::Window;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rate_examples() {
        let law = KernelLaw::new(1.5).unwrap();
        let w = Window::symmetric(10).unwrap();
        let c = Configuration::from_sites(w, [-1, 3]).unwrap();
        let thick = BarrierSpec::thick(2.0, 1.0).unwrap();
        assert!((transition_rate(&c, -1, 0, &thick, 100, &law) - law.p(1) / 100.0).abs() < 1e-16);
        assert_eq!(transition_rate(&c, 3, 5, &BarrierSpec::none(), 100, &law), 0.5 * law.p(2));
        let full = Configuration::full(w);
        assert_eq!(transition_rate(&full, 1, 2, &thick, 100, &law), 0.0);
    }

    #[test]
    fn schedule_checks() {
        assert!(check_schedule(&[0.0, 0.5, 1.0], 1.0).is_ok());
        assert!(check_schedule(&[0.5, 0.5], 1.0).is_err());
        assert!(check_schedule(&[1.5], 1.0).is_err());
    }

    #[test]
    fn budget_error_carries_time() {
        let k = JumpKernel::new(1.5, 1000).unwrap();
        let w = Window::symmetric(50).unwrap();
        let c = Configuration::from_sites(w, -5..5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = simulate(c, &BarrierSpec::none(), 16, &k, 10.0, &[10.0], &mut rng, SimOptions { event_budget: 100 });
        match r {
            Err(ProcessError::Budget { last_time, .. }) => assert!(last_time > 0.0 && last_time < 10.0),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn mass_is_conserved() {
        let k = JumpKernel::new(0.8, 1000).unwrap();
        let w = Window::symmetric(40).unwrap();
        let c = Configuration::from_sites(w, (-40..40).step_by(3)).unwrap();
        let n0 = c.particle_count();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = BarrierSpec::thick(3.0, 0.5).unwrap();
        let obs = simulate(c, &b, 8, &k, 1.0, &[0.0, 0.25, 0.5, 1.0], &mut rng, SimOptions::default()).unwrap();
        assert_eq!(obs.records.len(), 4);
        assert!(obs.records.iter().all(|r| r.particle_count() == n0 && r.count_is_consistent()));
        assert!(obs.accepted > 0);
    }
}
