mod common;

use std::collections::HashMap;
use std::sync::Arc;

use common::expm;
use fracsep::fracops::{Bump, Profile, TestFunction};
use fracsep::process::{
    block_average, empirical_pairing, sample_initial, simulate, transition_rate, BarrierSpec, Configuration,
    SimOptions, Simulator, Window,
};
use fracsep::{JumpKernel, KernelLaw, Side};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn single_particle_displacement_is_symmetric() {
    let k = JumpKernel::new(1.5, 4096).unwrap();
    let w = Window::symmetric(64).unwrap();
    let mut r = rng(10);
    let reps = 10_000;
    let mut xs = Vec::with_capacity(reps);
    for _ in 0..reps {
        let c = Configuration::from_sites(w, [0]).unwrap();
        let obs = simulate(c, &BarrierSpec::none(), 8, &k, 0.1, &[0.1], &mut r, SimOptions::default()).unwrap();
        xs.push(obs.records[0].occupied_sites().next().unwrap() as f64);
    }
    let mean = xs.iter().sum::<f64>() / reps as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
    assert!(var > 0.0);
    assert!(mean.abs() < 3.0 * (var / reps as f64).sqrt(), "mean {mean}, sd {}", var.sqrt());
}

#[test]
fn two_site_occupation_matches_matrix_exponential() {
    // Only sites 0 and 1 exist, so only the unit jump is ever accepted.
    let gamma = 1.2;
    let n = 4;
    let k = JumpKernel::new(gamma, 4096).unwrap();
    let lambda = (n as f64).powf(gamma) * k.p(1);
    let t = 0.3;
    let q = vec![vec![-lambda * t, lambda * t], vec![lambda * t, -lambda * t]];
    let exact = expm(&q)[0][0];
    let w = Window::new(0, 2).unwrap();
    let mut r = rng(11);
    let reps = 10_000;
    let mut hits = 0;
    for _ in 0..reps {
        let c = Configuration::from_sites(w, [0]).unwrap();
        let obs = simulate(c, &BarrierSpec::none(), n, &k, t, &[t], &mut r, SimOptions::default()).unwrap();
        hits += obs.records[0].occupied(0) as usize;
    }
    let f = hits as f64 / reps as f64;
    let sd = (exact * (1.0 - exact) / reps as f64).sqrt();
    assert!((f - exact).abs() < 3.0 * sd, "freq {f}, exact {exact}");
    assert!((exact - 0.5 * (1.0 + (-2.0 * lambda * t).exp())).abs() < 1e-12);
}

/// Occupancy bits of `[-2, 2)` as a state index.
fn state(c: &Configuration) -> u8 {
    (-2..2).enumerate().fold(0, |s, (i, x)| s | ((c.occupied(x) as u8) << i))
}

#[test]
fn embedded_chain_matches_jump_matrix() {
    // Slow factor 3·4^{-1/2} = 1.5 exceeds 1, so the envelope is scaled.
    let n = 4;
    let k = JumpKernel::new(1.3, 4096).unwrap();
    let law = k.law();
    let barrier = BarrierSpec::thick(3.0, 0.5).unwrap();
    let w = Window::new(-2, 2).unwrap();
    let mut counts: HashMap<(u8, u8), u64> = HashMap::new();
    let mut r = rng(12);
    for start in [vec![-2], vec![-1, 1], vec![-2, 0, 1]] {
        let mut sim = Simulator::new(Configuration::from_sites(w, start).unwrap(), barrier.clone(), n, &k);
        let mut t = 0.0;
        let mut accepted = 0;
        while accepted < 35_000 {
            let before = state(sim.config());
            t += sim.draw_wait(&mut r);
            if sim.propose(t, &mut r).accepted {
                accepted += 1;
                *counts.entry((before, state(sim.config()))).or_default() += 1;
            }
        }
    }
    let mut chi2 = 0.0;
    let mut df = 0usize;
    for from in 0u8..16 {
        let c = Configuration::from_sites(w, (0..4).filter(|i| from >> i & 1 == 1).map(|i| i - 2)).unwrap();
        let mut targets: Vec<(u8, f64)> = Vec::new();
        for x in -2..2 {
            for y in (x + 1)..2 {
                let rate = transition_rate(&c, x, y, &barrier, n, &law) * 2.0;
                if rate > 0.0 {
                    let mut d = c.clone();
                    d.exchange(x, y);
                    targets.push((state(&d), rate));
                }
            }
        }
        let total_obs: u64 = targets.iter().map(|(s, _)| counts.get(&(from, *s)).copied().unwrap_or(0)).sum();
        let seen: u64 = counts.iter().filter(|((f, _), _)| *f == from).map(|(_, v)| *v).sum();
        assert_eq!(seen, total_obs, "impossible transition from state {from}");
        if targets.len() < 2 || total_obs == 0 {
            continue;
        }
        let total_rate: f64 = targets.iter().map(|t| t.1).sum();
        for (to, rate) in &targets {
            let e = total_obs as f64 * rate / total_rate;
            let o = counts.get(&(from, *to)).copied().unwrap_or(0) as f64;
            chi2 += (o - e).powi(2) / e;
        }
        df += targets.len() - 1;
    }
    let crit = ChiSquared::new(df as f64).unwrap().inverse_cdf(0.99);
    assert!(chi2 < crit, "chi2 {chi2} with {df} dof exceeds {crit}");
}

#[test]
fn thick_barrier_with_huge_beta_never_crossed() {
    let k = JumpKernel::new(1.5, 4096).unwrap();
    let w = Window::symmetric(64).unwrap();
    let mut r = rng(13);
    let c = sample_initial(|u| if u < 0.0 { 0.5 } else { 0.3 }, 16, w, &mut r).unwrap();
    let b = BarrierSpec::thick(1.0, 1e6).unwrap();
    let obs = simulate(c, &b, 16, &k, 1.0, &[1.0], &mut r, SimOptions::default()).unwrap();
    assert_eq!(obs.crossing_total, 0);
    assert!(obs.accepted > 200);
}

#[test]
fn equilibrium_crossing_rate_matches_bond_count() {
    // Gross rate 2a(1−a)·α n^{γ−β}·Σ_{x<0≤y in window} p(y−x).
    let (gamma, alpha, beta, a, n, t) = (1.5, 2.0, 0.5, 0.4, 16u64, 1.0);
    let k = JumpKernel::new(gamma, 4096).unwrap();
    let law = k.law();
    let half = 4 * n as i64;
    let w = Window::symmetric(half).unwrap();
    let bonds: f64 = (-half..0).map(|x| (0..half).map(|y| law.p(y - x)).sum::<f64>()).sum();
    let rate = 2.0 * a * (1.0 - a) * alpha * (n as f64).powf(gamma - beta) * bonds;
    let b = BarrierSpec::thick(alpha, beta).unwrap();
    let mut r = rng(14);
    let reps = 40;
    let mut total = 0u64;
    for _ in 0..reps {
        let c = sample_initial(|_| a, n, w, &mut r).unwrap();
        total += simulate(c, &b, n, &k, t, &[t], &mut r, SimOptions::default()).unwrap().crossing_total;
    }
    let expected = rate * t * reps as f64;
    // Counts are over-dispersed relative to Poisson through the random initial state; 5σ.
    assert!((total as f64 - expected).abs() < 5.0 * expected.sqrt(), "{total} vs {expected}");
}

#[test]
fn initial_profile_concentrates() {
    let n = 256;
    let w = Window::for_support(0.25, n).unwrap();
    let c = sample_initial(|u| if u < 0.0 { 0.3 } else { 0.7 }, n, w, &mut rng(15)).unwrap();
    let half = w.hi() as f64;
    let left = c.count_in(w.lo(), -1) as f64 / half;
    let right = c.count_in(0, w.hi() - 1) as f64 / half;
    assert!((left - 0.3).abs() < 3.0 * (0.21 / half).sqrt());
    assert!((right - 0.7).abs() < 3.0 * (0.21 / half).sqrt());
}

#[test]
fn block_average_concentrates() {
    let a = 0.35;
    let w = Window::symmetric(20_000).unwrap();
    let c = sample_initial(|_| a, 1, w, &mut rng(16)).unwrap();
    let sd = (a * (1.0 - a) / 1e4).sqrt();
    for side in [Side::Left, Side::Right] {
        assert!((block_average(&c, 10_000, side).unwrap() - a).abs() < 3.0 * sd);
    }
}

#[test]
fn full_configuration_pairs_to_the_integral() {
    let part: Arc<dyn Profile<f64>> = Arc::new(Bump { center: 0.0, radius: 1.0, height: 1.0 });
    let g = TestFunction::smooth("bump", part, 1.0).unwrap();
    let integral = common::graded_integral(|u| common::bump(u, 0.0, 1.0), -1.0, 1.0, 12);
    let (_, d1, _) = g.sup_norms();
    for n in [16u64, 64, 256] {
        let c = Configuration::full(Window::for_support(1.0, n).unwrap());
        let v = empirical_pairing(&c, &g, n).unwrap();
        assert!((v - integral).abs() <= d1 * 2.0 / n as f64);
    }
}

#[test]
fn absent_and_neutral_barriers_share_rates() {
    let law = KernelLaw::new(0.7).unwrap();
    let w = Window::symmetric(6).unwrap();
    let c = Configuration::from_sites(w, [-6, -3, 0, 1, 4]).unwrap();
    let none = BarrierSpec::none();
    let neutral = BarrierSpec::thick(1.0, 0.0).unwrap();
    for x in w.sites() {
        for y in w.sites() {
            assert_eq!(transition_rate(&c, x, y, &none, 50, &law), transition_rate(&c, x, y, &neutral, 50, &law));
        }
    }
}

#[test]
fn same_seed_same_trajectory() {
    let k = JumpKernel::new(0.9, 4096).unwrap();
    let w = Window::symmetric(64).unwrap();
    let b = BarrierSpec::thick(2.0, 0.3).unwrap();
    let run = |seed| {
        let mut r = rng(seed);
        let c = sample_initial(|u| if u < 0.0 { 0.8 } else { 0.2 }, 16, w, &mut r).unwrap();
        let o = simulate(c, &b, 16, &k, 0.5, &[0.1, 0.5], &mut r, SimOptions::default()).unwrap();
        (o.records, o.crossing_count, o.proposals)
    };
    assert_eq!(run(5), run(5));
    assert_ne!(run(5).0, run(6).0);
}
