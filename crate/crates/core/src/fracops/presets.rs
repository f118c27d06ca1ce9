//! Named test functions and grid densities shared by the tests, the acceptance suite and the CLI.

use std::sync::Arc;

use super::{Affine, Bump, FracOpsError, GridFunction, Interval, Plateau, Product, Profile, Sum, TestFunction, Zero};

type P = Arc<dyn Profile<f64>>;

fn bump(center: f64, radius: f64, height: f64) -> P {
    Arc::new(Bump { center, radius, height })
}

fn times(a: P, b: P) -> P {
    Arc::new(Product(a, b))
}

fn affine(a: f64, b: f64) -> P {
    Arc::new(Affine { a, b })
}

fn scaled(k: f64, p: P) -> P {
    Arc::new(Sum(vec![(k, p)]))
}

/// Three globally smooth functions.
pub fn smooth_family() -> Result<Vec<TestFunction<f64>>, FracOpsError> {
    Ok(vec![
        TestFunction::smooth("bump", bump(0.0, 1.0, 1.0), 1.0)?,
        TestFunction::smooth("tilted-bump", times(bump(0.2, 0.7, 1.0), affine(1.0, 1.5)), 1.0)?,
        TestFunction::smooth("plateau", Arc::new(Plateau { a: -0.4, b: 0.5, ramp: 0.3 }), 0.8)?,
    ])
}

/// Three functions with independent smooth parts and a jump at the origin. The parts are flat
/// at the origin, which keeps the lattice boundary sums in their asymptotic regime at small `n`.
pub fn robin_family() -> Result<Vec<TestFunction<f64>>, FracOpsError> {
    let plateau = |a, b, ramp| -> P { Arc::new(Plateau { a, b, ramp }) };
    let layered: P = Arc::new(Sum(vec![(1.0, bump(0.0, 0.9, 1.0)), (0.5, bump(0.5, 0.45, 1.0))]));
    Ok(vec![
        TestFunction::robin("offset-plateaus", scaled(0.5, plateau(-0.5, 0.1, 0.3)), plateau(-0.1, 0.4, 0.4), 1.0)?,
        TestFunction::robin("centred-bumps", bump(0.0, 1.0, 0.5), bump(0.0, 0.9, 1.0), 1.0)?,
        TestFunction::robin("one-sided", Arc::new(Zero), layered, 1.0)?,
    ])
}

/// Robin-class functions with a non-zero slope at the origin on at least one side.
pub fn sloped_robin_family() -> Result<Vec<TestFunction<f64>>, FracOpsError> {
    Ok(vec![
        TestFunction::robin("offset-bumps", bump(-0.3, 0.5, 0.5), bump(0.2, 0.6, 1.0), 1.0)?,
        TestFunction::robin("right-ramp", Arc::new(Zero), times(bump(0.0, 0.9, 1.0), affine(1.0, 1.0)), 1.0)?,
        TestFunction::robin("plateau-bump", Arc::new(Plateau { a: -0.6, b: 0.1, ramp: 0.3 }), bump(0.4, 0.5, 2.0), 1.0)?,
    ])
}

/// Three functions continuous at the origin with a kink there.
pub fn robin0_family() -> Result<Vec<TestFunction<f64>>, FracOpsError> {
    let at_origin = Bump { center: -0.1, radius: 0.9, height: 1.0 }.value(0.0);
    Ok(vec![
        TestFunction::robin0("kinked-bump", times(bump(0.0, 1.0, 1.0), affine(1.0, -1.0)), bump(0.0, 0.7, 1.0), 1.0)?,
        TestFunction::robin0("rescaled", scaled(1.0 / at_origin, bump(-0.1, 0.9, 1.0)), times(bump(0.0, 1.0, 1.0), affine(1.0, 2.0)), 1.0)?,
        TestFunction::robin0("one-sided", Arc::new(Zero), times(bump(0.4, 0.4, 1.0), affine(0.0, 1.0)), 1.0)?,
    ])
}

/// Three smooth functions vanishing near the origin.
pub fn neumann_family() -> Result<Vec<TestFunction<f64>>, FracOpsError> {
    let pair: P = Arc::new(Sum(vec![(1.0, bump(0.6, 0.35, 1.0)), (-0.5, bump(-0.55, 0.3, 1.0))]));
    Ok(vec![
        TestFunction::neumann("right-bump", bump(0.6, 0.4, 1.0), 1.0, 0.2)?,
        TestFunction::neumann("two-bumps", pair, 1.0, 0.2)?,
        TestFunction::neumann("left-bump", bump(-0.5, 0.3, 1.5), 0.9, 0.2)?,
    ])
}

/// A density, a test function and an interval for the integration-by-parts identity.
pub struct IbpCase {
    pub name: &'static str,
    pub gamma: f64,
    pub interval: Interval,
    pub rho: GridFunction<f64>,
    pub g: TestFunction<f64>,
}

/// Density equal to the test function; a smooth density with different limits at ±∞; a
/// density with a jump at the origin, seen only from the right half-line.
pub fn ibp_cases(n: u64) -> Result<Vec<IbpCase>, FracOpsError> {
    let ni = n as i64;
    let g1 = TestFunction::smooth("bump", bump(0.0, 1.0, 1.0), 1.0)?;
    let rho1 = GridFunction::sample(n, -3 * ni / 2, 3 * ni / 2, |u| g1.value(u), (0.0, 0.0))?.with_label("rho=G");
    let g2 = TestFunction::smooth("shifted-bump", bump(0.2, 0.8, 1.0), 1.0)?;
    let smooth = |u: f64| 0.5 + 0.3 * u.tanh();
    let rho2 = GridFunction::sample(n, -2 * ni, 2 * ni, smooth, (smooth(-2.0 - 1.0 / n as f64), smooth(2.0)))?
        .with_label("tanh");
    let g3 = TestFunction::neumann("right-bump", bump(0.6, 0.4, 1.0), 1.0, 0.2)?;
    let jump = |u: f64| if u < 0.0 { 0.2 } else { 0.7 + 0.1 * (-u * u).exp() };
    let rho3 = GridFunction::sample(n, -ni, 2 * ni, jump, (0.2, jump(2.0)))?.with_label("jump");
    Ok(vec![
        IbpCase { name: "rho-equals-G", gamma: 1.5, interval: Interval::Line, rho: rho1, g: g1 },
        IbpCase { name: "smooth-front", gamma: 1.2, interval: Interval::Line, rho: rho2, g: g2 },
        IbpCase { name: "jump-right-half-line", gamma: 0.8, interval: Interval::Right, rho: rho3, g: g3 },
    ])
}
