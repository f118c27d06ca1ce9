mod common;

use std::time::Instant;

use common::zeta_borwein;
use fracsep::kernel::{mean_jump, normalization_constant, JumpKernel, KernelLaw};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

// ζ values at 30 digits, used to pin the Borwein oracle itself.
const ZETA_1_5: f64 = 2.612_375_348_685_488_343_348_567_567_92;
const ZETA_2_5: f64 = 1.341_487_257_250_917_179_756_769_693_35;

#[test]
fn borwein_oracle_is_pinned() {
    assert!((zeta_borwein(1.5) - ZETA_1_5).abs() < 1e-13);
    assert!((zeta_borwein(2.5) - ZETA_2_5).abs() < 1e-13);
    let pi = std::f64::consts::PI;
    assert!((zeta_borwein(2.0) - pi * pi / 6.0).abs() < 1e-13);
}

#[test]
fn constants_against_zeta_oracle() {
    let start = Instant::now();
    let c1 = normalization_constant(1.0, 1_000_000).unwrap();
    assert!((c1 - 3.0 / std::f64::consts::PI.powi(2)).abs() < 1e-10);
    let c15 = normalization_constant(1.5, 1_000_000).unwrap();
    let oracle_c = 1.0 / (2.0 * zeta_borwein(2.5));
    assert!(((c15 - oracle_c) / oracle_c).abs() < 1e-10);
    let m = mean_jump(1.5).unwrap();
    let oracle_m = zeta_borwein(1.5) / (2.0 * zeta_borwein(2.5));
    assert!(((m - oracle_m) / oracle_m).abs() < 1e-10);
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn mean_jump_near_two_is_finite_and_continuous() {
    let a = mean_jump(1.999).unwrap();
    let b = mean_jump(1.9999).unwrap();
    let oracle = zeta_borwein(1.9999) / (2.0 * zeta_borwein(2.9999));
    assert!(a.is_finite() && b.is_finite());
    assert!((b - oracle).abs() / oracle < 1e-10);
    assert!((a - b).abs() < 1e-3);
}

#[test]
fn unit_mass_at_default_truncation() {
    for &g in &[0.5, 1.0, 1.5] {
        let k = JumpKernel::with_default_truncation(g).unwrap();
        assert!(k.normalization_defect() < 1e-12, "gamma {g}");
    }
}

#[test]
fn tail_mass_bounds() {
    for &g in &[0.4, 1.0, 1.7] {
        for &l in &[10u64, 1000, 100_000] {
            let k = JumpKernel::new(g, l).unwrap();
            let c = k.c_gamma();
            let upper = 2.0 * c * (l as f64).powf(-g) / g;
            let lower = 2.0 * c * ((l + 1) as f64).powf(-g) / g;
            assert!(k.tail_mass() <= upper && k.tail_mass() >= lower, "gamma {g} L {l}");
        }
    }
}

#[test]
fn doubling_truncation_moves_constant_less_than_tail_bound() {
    let g = 0.9;
    let a = normalization_constant(g, 50_000).unwrap();
    let b = normalization_constant(g, 100_000).unwrap();
    let bound = 2.0 * a * 50_000f64.powf(-g) / g;
    assert!((a - b).abs() < bound);
}

fn draws(gamma: f64, n: usize, seed: u64) -> (JumpKernel, Vec<i64>) {
    let k = JumpKernel::with_default_truncation(gamma).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..n).map(|_| k.sample(&mut rng)).collect();
    (k, v)
}

#[test]
fn sign_and_unit_jump_frequencies() {
    let n = 1_000_000;
    let (k, v) = draws(1.5, n, 11);
    let signs: f64 = v.iter().map(|z| z.signum() as f64).sum::<f64>() / n as f64;
    assert!(signs.abs() < 3.0 / (n as f64).sqrt());
    // p(+1) = c_γ: the law puts c_γ on each of ±1.
    let p1 = k.c_gamma();
    let f1 = v.iter().filter(|&&z| z == 1).count() as f64 / n as f64;
    let sigma = (p1 * (1.0 - p1) / n as f64).sqrt();
    assert!((f1 - p1).abs() < 3.0 * sigma);
}

#[test]
fn chi_squared_goodness_of_fit() {
    for &(g, seed) in &[(0.8, 3u64), (1.5, 4)] {
        let n = 1_000_000usize;
        let (k, v) = draws(g, n, seed);
        let mut counts = vec![0usize; 101];
        for z in v {
            if z.unsigned_abs() <= 50 {
                let idx = if z > 0 { z as usize - 1 } else { 50 + (-z) as usize - 1 };
                counts[idx] += 1;
            } else {
                counts[100] += 1;
            }
        }
        let mut expected: Vec<f64> = (1..=50).map(|z| k.p(z) * n as f64).collect();
        expected.extend((1..=50).map(|z| k.p(-z) * n as f64));
        let inside: f64 = expected.iter().sum();
        expected.push(n as f64 - inside);
        let stat: f64 = counts
            .iter()
            .zip(&expected)
            .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
            .sum();
        let crit = ChiSquared::new(100.0).unwrap().inverse_cdf(0.99);
        assert!(stat < crit, "gamma {g}: chi2 {stat} >= {crit}");
    }
}

#[test]
fn hill_tail_index() {
    for &(g, seed) in &[(0.8, 21u64), (1.5, 22)] {
        let (_, v) = draws(g, 1_000_000, seed);
        let mut a: Vec<f64> = v.iter().map(|z| z.unsigned_abs() as f64).collect();
        a.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let k = 2000;
        let xk = a[k];
        let mean_log = a[..k].iter().map(|x| (x / xk).ln()).sum::<f64>() / k as f64;
        let hill = 1.0 / mean_log;
        assert!((hill - g).abs() < 0.1, "gamma {g}: hill {hill}");
    }
}

#[test]
fn identical_seed_identical_draws() {
    let k = JumpKernel::new(1.2, 10_000).unwrap();
    let mut a = ChaCha8Rng::seed_from_u64(99);
    let mut b = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10_000 {
        assert_eq!(k.sample(&mut a), k.sample(&mut b));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn normalized_for_any_gamma(g in 0.05f64..1.95, l in 20u64..3000) {
        let k = JumpKernel::new(g, l).unwrap();
        prop_assert!(k.normalization_defect() < 1e-12);
        let law = KernelLaw::new(g).unwrap();
        prop_assert!(((law.c_gamma() - k.c_gamma()) / k.c_gamma()).abs() < 1e-12);
    }

    #[test]
    fn tails_are_monotone_and_consistent(g in 0.05f64..1.95, j in 1u64..500) {
        let law = KernelLaw::new(g).unwrap();
        let diff = law.tail_from(j) - law.tail_from(j + 1);
        prop_assert!((diff - law.p(j as i64)).abs() <= 1e-14 * law.tail_from(1));
        prop_assert!(law.tail_from(j) > law.tail_from(j + 1));
    }
}
