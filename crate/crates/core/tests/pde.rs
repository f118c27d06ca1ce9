mod common;

use std::sync::Arc;

use fracsep::fracops::{Bump, Profile, TestFunction};
use fracsep::pde::*;
use fracsep::process::{BarrierSpec, SlowSet, Window};
use fracsep::KernelLaw;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bump(c: f64, r: f64, h: f64) -> Arc<dyn Profile<f64>> {
    Arc::new(Bump { center: c, radius: r, height: h })
}

fn solve(gamma: f64, barrier: &BarrierSpec, g: &InitialProfile, n: u64, half: i64, times: &[f64]) -> HydroSolution<f64> {
    let regime = classify_regime(gamma, barrier).unwrap();
    solve_hydro(&regime, g, barrier, n, Window::symmetric(half).unwrap(), times, &SolverOptions::default()).unwrap()
}

fn step() -> InitialProfile {
    InitialProfile::WindowStep { left: 0.8, right: 0.2, outside: 0.5, half_width: 1.0 }
}

fn barriers(gamma: f64) -> Vec<BarrierSpec> {
    let mut out = vec![
        BarrierSpec::none(),
        BarrierSpec::thick(2.0, 0.0).unwrap(),
        BarrierSpec::thick(2.0, 0.5).unwrap(),
        BarrierSpec::thick(0.5, 1.0).unwrap(),
    ];
    if gamma < 1.0 {
        out.push(BarrierSpec::thin(SlowSet::TouchingOrigin, 0.5, 3.0, 0.2, gamma).unwrap());
    } else {
        out.push(BarrierSpec::thin(SlowSet::TouchingOrigin, 0.9, 3.0, 0.2, gamma).unwrap());
    }
    out
}

#[test]
fn constants_are_stationary_in_every_regime() {
    for gamma in [0.8, 1.5] {
        for b in barriers(gamma) {
            let s = solve(gamma, &b, &InitialProfile::Constant { a: 0.37 }, 16, 48, &[0.1, 0.3]);
            let (lo, hi) = s.extremes();
            assert!((lo - 0.37).abs() < 1e-13 && (hi - 0.37).abs() < 1e-13, "{b:?}: [{lo}, {hi}]");
        }
    }
}

#[test]
fn small_windows_match_matrix_exponential() {
    // A fine step makes RK4 truncation negligible against the dense exponential.
    let law = KernelLaw::new(1.2).unwrap();
    let n = 4;
    let g = InitialProfile::Step { left: 0.0, right: 0.9 };
    let cases = [
        (Window::new(-1, 1).unwrap(), BarrierSpec::none()),
        (Window::new(-2, 2).unwrap(), BarrierSpec::thick(3.0, 0.5).unwrap()),
        (Window::new(-3, 2).unwrap(), BarrierSpec::thin(SlowSet::TouchingOrigin, 0.5, 0.1, 0.0, 1.2).unwrap()),
    ];
    for (w, b) in cases {
        let t = 0.3;
        let regime = classify_regime(1.2, &b).unwrap();
        let rate = (n as f64).powf(1.2);
        let opts = SolverOptions { dt: Some(1e-3 / rate), ..SolverOptions::default() };
        let sol: HydroSolution<f64> = solve_hydro(&regime, &g, &b, n, w, &[t], &opts).unwrap();
        let sites: Vec<i64> = w.sites().collect();
        let mut a = vec![vec![0.0; sites.len()]; sites.len()];
        for (i, &x) in sites.iter().enumerate() {
            for (j, &y) in sites.iter().enumerate() {
                if i != j {
                    let r = rate * law.p(y - x) * b.weight(x, y, n) * t;
                    a[i][j] += r;
                    a[i][i] -= r;
                }
            }
        }
        let e = common::expm(&a);
        let g0: Vec<f64> = sites.iter().map(|&x| g.value(x as f64 / n as f64)).collect();
        for i in 0..sites.len() {
            let exact: f64 = (0..sites.len()).map(|j| e[i][j] * g0[j]).sum();
            assert!((sol.density[0][i] - exact).abs() < 1e-9, "{b:?} site {}: {} vs {exact}", sites[i], sol.density[0][i]);
        }
    }
}

#[test]
fn periodic_window_matches_spectral_oracle() {
    for gamma in [0.8, 1.5] {
        let law = KernelLaw::new(gamma).unwrap();
        let n = 64u64;
        let w = Window::symmetric(128).unwrap();
        let g = InitialProfile::Bump { base: 0.2, height: 0.6, center: 0.1, radius: 0.8 };
        let times = [0.05, 0.25];
        let regime = classify_regime(gamma, &BarrierSpec::none()).unwrap();
        let opts = SolverOptions { dt: None, boundary: Boundary::Periodic };
        let sol: HydroSolution<f64> = solve_hydro(&regime, &g, &BarrierSpec::none(), n, w, &times, &opts).unwrap();
        let len = w.len();
        let kernel: Vec<f64> = (0..len)
            .map(|d| if d == 0 { 0.0 } else { common::periodized_by_summation(|z| law.p(z), law.c_gamma(), gamma, len, d) })
            .collect();
        let ours = periodic_kernel(&law, len);
        for d in 1..len {
            assert!((ours[d] - kernel[d]).abs() < 1e-11 * kernel[d], "p_N({d}): {} vs {}", ours[d], kernel[d]);
        }
        let g0: Vec<f64> = w.sites().map(|x| g.value(x as f64 / n as f64)).collect();
        for (k, &t) in times.iter().enumerate() {
            let exact = common::spectral_solution(&g0, &kernel, (n as f64).powf(gamma), t);
            let err = sol.density[k].iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-6, "γ = {gamma}, t = {t}: sup error {err}");
        }
    }
}

#[test]
fn mass_is_conserved_and_values_stay_in_range() {
    for gamma in [0.8, 1.5] {
        for b in barriers(gamma) {
            let s = solve(gamma, &b, &step(), 32, 128, &uniform_times(0.5, 5));
            assert!(mass_drift(&s) < 1e-8, "{b:?}: {}", mass_drift(&s));
            let (lo, hi) = s.extremes();
            assert!(lo >= 0.2 - 1e-12 && hi <= 0.8 + 1e-12, "{b:?}: [{lo}, {hi}]");
            assert!(energy_increase(&s, 0.5) <= 1e-12 * s.energy(0, 0.5));
        }
    }
}

#[test]
fn neumann_leakage_respects_crossing_bound() {
    for (gamma, beta) in [(1.5, 1.0), (1.2, 0.5)] {
        let b = BarrierSpec::thick(2.0, beta).unwrap();
        for n in [32u64, 64, 128] {
            let s = solve(gamma, &b, &step(), n, 3 * n as i64, &uniform_times(0.4, 4));
            assert_eq!(s.regime.equation, Equation::FractionalNeumann);
            let (leak, bound) = (half_line_leakage(&s), leakage_bound(&s).unwrap());
            assert!(leak < bound, "γ {gamma} n {n}: {leak} ≥ {bound}");
        }
    }
}

#[test]
fn refusal_above_monotone_step() {
    let b = BarrierSpec::thick(4.0, 0.0).unwrap();
    let regime = classify_regime(1.5, &b).unwrap();
    let w = Window::symmetric(32).unwrap();
    let opts = SolverOptions { dt: Some(0.01), boundary: Boundary::Reflecting };
    match solve_hydro::<f64>(&regime, &step(), &b, 16, w, &[0.1], &opts) {
        Err(PdeError::Cfl { suggested, .. }) => {
            let ok = SolverOptions { dt: Some(suggested), ..opts };
            assert!(solve_hydro::<f64>(&regime, &step(), &b, 16, w, &[0.1], &ok).is_ok());
        }
        other => panic!("expected a step refusal, got {other:?}"),
    }
    let wrong = classify_regime(1.5, &BarrierSpec::none()).unwrap();
    assert!(matches!(solve_hydro::<f64>(&wrong, &step(), &b, 16, w, &[0.1], &SolverOptions::default()), Err(PdeError::Regime(_))));
}

#[test]
fn single_precision_tracks_double() {
    let b = BarrierSpec::thick(2.0, 0.5).unwrap();
    let regime = classify_regime(1.5, &b).unwrap();
    let w = Window::symmetric(96).unwrap();
    let opts = SolverOptions::default();
    let a: HydroSolution<f64> = solve_hydro(&regime, &step(), &b, 32, w, &[0.2], &opts).unwrap();
    let s: HydroSolution<f32> = solve_hydro(&regime, &step(), &b, 32, w, &[0.2], &opts).unwrap();
    let err = a.density[0].iter().zip(&s.density[0]).map(|(x, y)| (x - *y as f64).abs()).fold(0.0, f64::max);
    assert!(err < 1e-4, "{err}");
}

#[test]
fn csv_export_has_schema_and_rows() {
    let s = solve(1.5, &BarrierSpec::none(), &step(), 8, 16, &[0.0, 0.1]);
    let mut buf = Vec::new();
    s.write_csv(&mut buf, &["seed=1".to_string()]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# schema="));
    assert_eq!(lines[1], "# seed=1");
    assert_eq!(lines[2], "time,site,u,rho");
    assert_eq!(lines.len(), 3 + 2 * 32);
    assert!(lines[3].starts_with("0,-16,-2,"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn comparison_principle(
        base in 0.0..0.3f64,
        lift in 0.0..0.3f64,
        height in 0.0..0.4f64,
        center in -1.0..1.0f64,
        beta in 0.0..1.5f64,
        gamma in 0.3..1.9f64,
    ) {
        let b = BarrierSpec::thick(1.7, beta).unwrap();
        let g1 = InitialProfile::Bump { base, height, center, radius: 0.7 };
        let g2 = InitialProfile::Step { left: base + height + lift, right: base + height };
        let s1 = solve(gamma, &b, &g1, 8, 24, &[0.05, 0.2]);
        let s2 = solve(gamma, &b, &g2, 8, 24, &[0.05, 0.2]);
        for k in 0..2 {
            for (x, y) in s1.density[k].iter().zip(&s2.density[k]) {
                prop_assert!(*x <= *y + 1e-12);
            }
        }
    }

    #[test]
    fn energy_never_grows(a in 0.0..1.0f64, gamma in 0.3..1.9f64, beta in 0.0..1.5f64, alpha in 0.2..4.0f64) {
        let b = BarrierSpec::thick(alpha, beta).unwrap();
        let s = solve(gamma, &b, &step(), 8, 32, &uniform_times(0.3, 6));
        prop_assert!(energy_increase(&s, a) <= 1e-12 * s.energy(0, a).max(1.0));
    }
}

fn robin_test_function(rng: &mut ChaCha8Rng, i: usize) -> TestFunction<f64> {
    let left = bump(-rng.random_range(0.1..0.5), rng.random_range(0.3..0.5), rng.random_range(-1.0..1.0));
    let right = bump(rng.random_range(0.1..0.5), rng.random_range(0.3..0.5), rng.random_range(-1.0..1.0));
    TestFunction::robin(&format!("random-{i}"), left, right, 1.0)
        .unwrap()
        .with_time(vec![1.0, rng.random_range(-1.0..1.0)])
}

#[test]
fn weak_residual_vanishes_at_time_zero_and_on_constants() {
    let smooth = TestFunction::smooth("b", bump(0.1, 0.6, 1.0), 1.0).unwrap();
    let robin = TestFunction::robin("r", bump(-0.3, 0.4, 1.0), bump(0.2, 0.5, -0.5), 1.0).unwrap();
    let a = InitialProfile::Constant { a: 0.3 };
    for (gamma, b, g, variant, kappa) in [
        (0.8, BarrierSpec::none(), &smooth, WeakVariant::FrDif, 1.0),
        (1.5, BarrierSpec::thick(2.0, 0.0).unwrap(), &smooth, WeakVariant::FrDif2, 2.0),
        (1.5, BarrierSpec::thick(2.0, 0.5).unwrap(), &robin, WeakVariant::FrRob, 1.9),
    ] {
        let s = solve(gamma, &b, &a, 32, 96, &uniform_times(0.2, 4));
        let r = weak_residual(&s, g, &a, kappa, 0.2, variant).unwrap();
        assert!(r.value.abs() < 1e-8, "{variant:?}: {r:?}");
        let s = solve(gamma, &b, &step(), 32, 96, &uniform_times(0.2, 4));
        assert_eq!(weak_residual(&s, g, &step(), kappa, 0.0, variant).unwrap().value, 0.0);
    }
}

#[test]
fn weak_residual_rejects_wrong_class() {
    let robin = TestFunction::robin("r", bump(-0.3, 0.4, 1.0), bump(0.2, 0.5, -0.5), 1.0).unwrap();
    let s = solve(1.5, &BarrierSpec::none(), &step(), 16, 48, &[0.0, 0.1]);
    assert!(matches!(weak_residual(&s, &robin, &step(), 1.0, 0.1, WeakVariant::FrDif), Err(PdeError::Domain(_))));
    let s = solve(0.8, &BarrierSpec::none(), &step(), 16, 48, &[0.0, 0.1]);
    assert!(weak_residual(&s, &robin, &step(), 1.0, 0.1, WeakVariant::FrRob).is_err());
}

#[test]
fn robin_weak_residual_decays_with_the_grid() {
    let b = BarrierSpec::thick(2.0, 0.5).unwrap();
    let times = uniform_times(0.4, 40);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let tests: Vec<_> = (0..3).map(|i| robin_test_function(&mut rng, i)).collect();
    let ns = [128u64, 256, 512];
    let mut residuals = vec![Vec::new(); tests.len()];
    for n in ns {
        let s = solve(1.5, &b, &step(), n, 3 * n as i64, &times);
        let kappa = s.regime.kappa;
        for (r, g) in residuals.iter_mut().zip(&tests) {
            r.push(weak_residual(&s, g, &step(), kappa, 0.4, WeakVariant::FrRob).unwrap().value.abs());
        }
    }
    for (g, r) in tests.iter().zip(&residuals) {
        let c = r[0] * (ns[0] as f64).powf(0.3);
        for (n, v) in ns.iter().zip(r).skip(1) {
            assert!(*v <= c * (*n as f64).powf(-0.3), "{}: residuals {r:?}", g.name());
        }
    }
}

#[test]
fn full_line_weak_residual_decays_with_the_grid() {
    let g = InitialProfile::Bump { base: 0.3, height: 0.5, center: 0.2, radius: 0.6 };
    let tf = TestFunction::smooth("b", bump(-0.2, 0.7, 1.0), 1.0).unwrap().with_time(vec![1.0, 1.0]);
    let times = uniform_times(0.3, 30);
    let r: Vec<f64> = [32u64, 64, 128]
        .iter()
        .map(|&n| {
            let s = solve(0.8, &BarrierSpec::none(), &g, n, 3 * n as i64, &times);
            weak_residual(&s, &tf, &g, 1.0, 0.3, WeakVariant::FrDif).unwrap().value.abs()
        })
        .collect();
    assert!(r[1] < r[0] && r[2] < r[1], "{r:?}");
}

#[test]
fn boundary_diagnostics() {
    let n = 256;
    let c = solve(1.5, &BarrierSpec::thick(2.0, 0.5).unwrap(), &InitialProfile::Constant { a: 0.4 }, n, 3 * n as i64, &[0.0, 0.1]);
    let d = boundary_condition_check(&c, 0.1).unwrap();
    assert!(d.derivative_plus.abs() < 1e-10 && d.derivative_minus.abs() < 1e-10 && d.jump.abs() < 1e-12);

    // Robin: the derivative-to-jump ratio is a constant of the equation.
    let horizon = 0.4;
    let s = solve(1.5, &BarrierSpec::thick(2.0, 0.5).unwrap(), &step(), n, 3 * n as i64, &uniform_times(horizon, 20));
    let diags: Vec<_> = [0.2, 0.4, 0.8].iter().map(|f| boundary_condition_check(&s, f * horizon).unwrap()).collect();
    let ratios: Vec<f64> = diags.iter().map(|d| d.ratio.unwrap()).collect();
    let mean = ratios.iter().sum::<f64>() / 3.0;
    for d in &diags {
        assert!((d.ratio.unwrap() - mean).abs() < 0.1 * mean.abs(), "{ratios:?}");
        assert!((d.derivative_plus - d.derivative_minus).abs() < 0.1 * d.derivative_plus.abs(), "{d:?}");
    }

    // Neumann: the jump persists while the boundary derivatives shrink under refinement.
    let b = BarrierSpec::thick(2.0, 1.0).unwrap();
    let mut last = f64::INFINITY;
    for n in [64u64, 128, 256] {
        let s = solve(1.5, &b, &step(), n, 3 * n as i64, &[0.0, 0.2]);
        let d = boundary_condition_check(&s, 0.2).unwrap();
        let size = d.derivative_plus.abs().max(d.derivative_minus.abs());
        assert!(size < last, "n {n}: {d:?}");
        assert!(d.jump < -0.3, "n {n}: {d:?}");
        last = size;
    }
    let full = solve(1.5, &BarrierSpec::none(), &step(), 32, 96, &[0.0, 0.1]);
    assert!(boundary_condition_check(&full, 0.1).is_err());
}

#[test]
fn continuity_at_origin() {
    let b = BarrierSpec::thick(2.0, 0.2).unwrap();
    let times = uniform_times(0.3, 30);
    let c = solve(1.5, &b, &InitialProfile::Constant { a: 0.6 }, 64, 192, &times);
    assert!(continuity_at_origin_check(&c).unwrap() < 1e-12);
    let g = InitialProfile::Bump { base: 0.2, height: 0.6, center: 0.3, radius: 0.6 };
    let mut last = f64::INFINITY;
    for n in [64u64, 128, 256] {
        let s = solve(1.5, &b, &g, n, 3 * n as i64, &times);
        let v = continuity_at_origin_check(&s).unwrap();
        assert!(v < last && v < 0.05, "n {n}: {v}");
        last = v;
    }
    let s = solve(1.5, &b, &step(), 128, 384, &times);
    let (p0, m0) = boundary_traces(&s, 0).unwrap();
    let (p1, m1) = boundary_traces(&s, times.len() - 1).unwrap();
    assert!((p1 - m1).abs() < 0.5 * (p0 - m0).abs());
}
