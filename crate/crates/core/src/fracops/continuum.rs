//! Singular-integral operators on the line and on half-lines.
//!
//! Near the diagonal the second difference `θ_u(w) = G(u−w) + G(u+w) − 2G(u)` is replaced by its
//! integral Taylor form `∫_0^w (w−s)[G″(u+s) + G″(u−s)] ds`, so no cancellation is evaluated
//! at small `w`.

use super::quad::{gauss_legendre10, integrate};
use super::{FracOpsError, Jet, TestClass, TestFunction};
use crate::{KernelLaw, Scalar, Side};

/// Absolute tolerance of the 1-D operator quadratures.
pub const OPERATOR_TOL: f64 = 1e-10;

fn gamma_of<T: Scalar>(law: &KernelLaw) -> (T, T) {
    (T::of(law.gamma()), T::of(law.c_gamma()))
}

/// `∫_0^{w1} θ_u(w) w^{-1-γ} dw` for a `C²` profile, `w1 ≤` distance to any kink.
fn near_diagonal<T: Scalar>(jet: &dyn Fn(T) -> Jet<T>, u: T, w1: T, gamma: T) -> T {
    let two = T::of(2.0);
    let g2u = jet(u).d2;
    let k1 = |w: T| {
        if w <= T::zero() {
            return T::zero();
        }
        let inner = gauss_legendre10(|s: T| (w - s) * (jet(u + s).d2 + jet(u - s).d2 - two * g2u), T::zero(), w);
        inner * w.powf(-T::one() - gamma)
    };
    let corr = integrate(k1, T::zero(), w1, T::of(OPERATOR_TOL) * T::of(0.1), &[]).value;
    corr + g2u * w1.powf(two - gamma) / (two - gamma)
}

/// `∫ (G(v) − G(u)) |u−v|^{-1-γ} dv` over the line, without `c_γ`. `G = 0` outside `[-b, b]`.
fn full_line<T: Scalar>(jet: &dyn Fn(T) -> Jet<T>, u: T, b: T, gamma: T) -> T {
    let r = u.abs() + b;
    let w1 = b / T::of(16.0);
    let gu = jet(u).v;
    let two = T::of(2.0);
    let near = near_diagonal(jet, u, w1, gamma);
    let theta = |w: T| (jet(u - w).v + jet(u + w).v - two * gu) * w.powf(-T::one() - gamma);
    let mid = integrate(theta, w1, r, T::of(OPERATOR_TOL), &[(b - u).abs(), (b + u).abs()]).value;
    near + mid - two * gu * r.powf(-gamma) / gamma
}

/// `∫_0^∞ (q(v) − q(u)) |u−v|^{-1-γ} dv` for `u ≥ 0`, without `c_γ`. `q = 0` beyond `b`.
fn half_line<T: Scalar>(q: &dyn Fn(T) -> Jet<T>, u: T, b: T, gamma: T) -> Result<T, FracOpsError> {
    let two = T::of(2.0);
    let qu = q(u).v;
    let tol = T::of(OPERATOR_TOL);
    let mut acc = T::zero();
    if u > T::zero() {
        let w1 = (b / T::of(16.0)).min(u);
        acc += near_diagonal(q, u, w1, gamma);
        let theta = |w: T| (q(u - w).v + q(u + w).v - two * qu) * w.powf(-T::one() - gamma);
        acc += integrate(theta, w1, u, tol, &[(b - u).abs()]).value;
    }
    let r2 = u.max(b);
    let one_sided = |w: T| (q(u + w).v - qu) * w.powf(-T::one() - gamma);
    let tail = integrate(one_sided, u, r2, tol, &[b - u]);
    if !tail.converged || !tail.value.is_finite() {
        return Err(FracOpsError::Domain(format!(
            "regional operator at u = {u} does not converge (needs G′(0±) = 0 when u = 0 and γ ≥ 1)"
        )));
    }
    Ok(acc + tail.value - qu * r2.powf(-gamma) / gamma)
}

/// `[-(-Δ)^{γ/2} G](u)` for a globally smooth `G` (classes `S_Dif`, `S_Neu`).
pub fn frac_laplacian<T: Scalar>(g: &TestFunction<T>, u: T, law: &KernelLaw) -> Result<T, FracOpsError> {
    if !matches!(g.class(), TestClass::Dif | TestClass::Neu) {
        return Err(FracOpsError::Class(format!("{}: full-line operator needs a C² function", g.name())));
    }
    let (gamma, c) = gamma_of::<T>(law);
    let part = g.part(Side::Right).clone();
    Ok(c * full_line(&|v| part.jet(v), u, g.b_g(), gamma))
}

/// `[-(-Δ)_I^{γ/2} G](u)` for `I = (-∞,0)` (`Left`, `u < 0`) or `I = (0,∞)` (`Right`, `u ≥ 0`).
///
/// At `u = 0` this is the one-sided limit, finite only when `G` is flat enough at the origin.
pub fn regional_frac_laplacian<T: Scalar>(
    g: &TestFunction<T>,
    u: T,
    side: Side,
    law: &KernelLaw,
) -> Result<T, FracOpsError> {
    let (gamma, c) = gamma_of::<T>(law);
    if law.gamma() <= 1.0 && g.class() != TestClass::Neu {
        return Err(FracOpsError::Domain(format!(
            "regional operator with γ = {} ≤ 1 needs an S_Neu function, got {:?}",
            law.gamma(),
            g.class()
        )));
    }
    let part = g.part(side).clone();
    let v = match side {
        Side::Right => {
            if u < T::zero() {
                return Err(FracOpsError::Domain(format!("u = {u} is not on the right half-line")));
            }
            half_line(&|v| part.jet(v), u, g.b_g(), gamma)?
        }
        Side::Left => {
            if u > T::zero() {
                return Err(FracOpsError::Domain(format!("u = {u} is not on the left half-line")));
            }
            let mirrored = |v: T| {
                let j = part.jet(-v);
                Jet { v: j.v, d1: -j.d1, d2: j.d2 }
            };
            half_line(&mirrored, -u, g.b_g(), gamma)?
        }
    };
    Ok(c * v)
}

/// `[-(-Δ)_{ℝ*}^{γ/2} G](u)`: the right operator for `u > 0`, the left one for `u < 0`, 0 at the origin.
pub fn regional_star<T: Scalar>(g: &TestFunction<T>, u: T, law: &KernelLaw) -> Result<T, FracOpsError> {
    if u > T::zero() {
        regional_frac_laplacian(g, u, Side::Right, law)
    } else if u < T::zero() {
        regional_frac_laplacian(g, u, Side::Left, law)
    } else {
        Ok(T::zero())
    }
}

/// `c_γ ∫_{|u−v|≥ε} (G(v) − G(u)) |u−v|^{-1-γ} dv`; cross-check for [`frac_laplacian`].
pub fn frac_laplacian_truncated<T: Scalar>(g: &TestFunction<T>, u: T, eps: T, law: &KernelLaw) -> T {
    let (gamma, c) = gamma_of::<T>(law);
    let b = g.b_g();
    let r = (u.abs() + b).max(eps);
    let gu = g.value(u);
    let two = T::of(2.0);
    let theta = |w: T| (g.value(u - w) + g.value(u + w) - two * gu) * w.powf(-T::one() - gamma);
    let mid = integrate(theta, eps, r, T::of(OPERATOR_TOL), &[(b - u).abs(), (b + u).abs()]).value;
    c * (mid - two * gu * r.powf(-gamma) / gamma)
}

/// Dominating function `H(u)` for the right-half-line operator, `u > 0`.
///
/// The case `γ ≤ 1, u ≤ b̄/2` carries `‖G″‖∞`, the norm its derivation actually produces.
pub fn regional_dominating_bound<T: Scalar>(g: &TestFunction<T>, u: T, law: &KernelLaw) -> T {
    let (gamma, c) = gamma_of::<T>(law);
    let (g0, g1, g2) = g.sup_norms();
    let b = g.b_g();
    let two = T::of(2.0);
    let one = T::one();
    if u > two * b {
        return c * g0 / gamma * ((u - b).powf(-gamma) - u.powf(-gamma));
    }
    let near = g2 / (two - gamma) * (two * b).powf(two - gamma);
    if gamma > one {
        c * (near + g1 / (gamma - one) * u.powf(one - gamma))
    } else if u > g.b_bar() / two {
        c * (near + two * g0 / gamma * u.powf(-gamma))
    } else {
        c * (near + g0 / gamma * (two / g.b_bar()).powf(gamma))
    }
}

/// Diagnostic from the extrapolation of `a_k = f′(±2^{-k}) 2^{-k(2−γ)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FracDerivative<T> {
    /// `D^γ f(0±) = −lim a_k`.
    pub value: T,
    /// Observed contraction ratio of successive differences (0 when the sequence is flat).
    pub ratio: T,
    pub terms: Vec<T>,
}

pub const DERIVATIVE_LEVELS: std::ops::RangeInclusive<i32> = 4..=20;

/// `D^γ f(0+) = −lim f′(u) u^{2−γ}` (`Right`) or `D^γ f(0−) = −lim f′(−u) u^{2−γ}` (`Left`), `u ↓ 0`.
///
/// `derivative` is `f′` on the chosen side, in the original coordinate.
pub fn frac_derivative_at_origin<T: Scalar>(
    derivative: impl Fn(T) -> T,
    side: Side,
    gamma: T,
) -> Result<FracDerivative<T>, FracOpsError> {
    let two = T::of(2.0);
    let terms: Vec<T> = DERIVATIVE_LEVELS
        .map(|k| {
            let h = two.powi(-k);
            let x = match side {
                Side::Right => h,
                Side::Left => -h,
            };
            derivative(x) * h.powf(two - gamma)
        })
        .collect();
    extrapolate_geometric(terms).map(|(limit, ratio, terms)| FracDerivative { value: -limit, ratio, terms })
}

/// Limit of a sequence whose differences shrink geometrically.
pub fn extrapolate_geometric<T: Scalar>(terms: Vec<T>) -> Result<(T, T, Vec<T>), FracOpsError> {
    if terms.iter().any(|t| !t.is_finite()) {
        return Err(FracOpsError::NoLimit("non-finite terms".into()));
    }
    let n = terms.len();
    let last = terms[n - 1];
    let scale = T::one().max(last.abs());
    let diffs: Vec<T> = terms.windows(2).map(|w| w[1] - w[0]).collect();
    let flat = T::of(1e-11) * scale;
    if diffs.iter().rev().take(4).all(|d| d.abs() <= flat) {
        return Ok((last, T::zero(), terms));
    }
    let ratios: Vec<T> = diffs.windows(2).rev().take(5).map(|w| w[1] / w[0]).collect();
    let mean = ratios.iter().copied().sum::<T>() / T::of(ratios.len() as f64);
    let spread = ratios.iter().fold(T::zero(), |m, r| m.max((*r - mean).abs()));
    if !(mean.abs() < T::one()) || spread > T::of(0.05) {
        return Err(FracOpsError::NoLimit(format!("difference ratios {ratios:?} are not a contracting geometric sequence")));
    }
    let d = diffs[diffs.len() - 1];
    Ok((last + d * mean / (T::one() - mean), mean, terms))
}
