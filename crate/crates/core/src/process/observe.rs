//! Initial product measures and the microscopic observables.

use rand::{Rng, RngExt};

use super::{Configuration, ProcessError, Window};
use crate::fracops::TestFunction;
use crate::Side;

/// Product measure with `P(η(x) = 1) = profile(x/n)`.
pub fn sample_initial<R: Rng + ?Sized>(
    profile: impl Fn(f64) -> f64,
    n: u64,
    window: Window,
    rng: &mut R,
) -> Result<Configuration, ProcessError> {
    if n == 0 {
        return Err(ProcessError::Domain("n must be at least 1".into()));
    }
    let mut c = Configuration::empty(window);
    for x in window.sites() {
        let u = x as f64 / n as f64;
        let a = profile(u);
        if !(0.0..=1.0).contains(&a) {
            return Err(ProcessError::Domain(format!("profile({u}) = {a} outside [0,1]")));
        }
        let hit = if a >= 1.0 { true } else if a <= 0.0 { false } else { rng.random::<f64>() < a };
        if hit {
            c.set(x, true);
        }
    }
    Ok(c)
}

/// `⟨π^n, G⟩ = (1/n) Σ_x η(x) G(x/n)`.
pub fn empirical_pairing(config: &Configuration, g: &TestFunction<f64>, n: u64) -> Result<f64, ProcessError> {
    let w = config.window();
    let reach = (g.b_g() * n as f64).ceil() as i64;
    if -reach < w.lo() || reach >= w.hi() {
        return Err(ProcessError::Truncation { support: reach, lo: w.lo(), hi: w.hi() });
    }
    let nf = n as f64;
    let mut acc = 0.0;
    for x in config.occupied_sites() {
        if x.abs() <= reach {
            acc += g.value(x as f64 / nf);
        }
    }
    Ok(acc / nf)
}

/// Mean occupation of `1..=ℓ` (right) or `-ℓ..=-1` (left).
pub fn block_average(config: &Configuration, ell: u64, side: Side) -> Result<f64, ProcessError> {
    if ell == 0 {
        return Err(ProcessError::Domain("block length must be at least 1".into()));
    }
    let l = ell as i64;
    let count = match side {
        Side::Right => config.count_in(1, l),
        Side::Left => config.count_in(-l, -1),
    };
    Ok(count as f64 / ell as f64)
}
