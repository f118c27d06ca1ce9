//! Test functions `G` with a left part on `(-∞,0)` and a right part on `[0,∞)`.

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::jet::Jet;
use super::FracOpsError;
use crate::{Scalar, Side};

/// A `C²` profile on the line, evaluated with its first two derivatives.
pub trait Profile<T: Scalar>: Send + Sync + Debug {
    fn jet(&self, u: T) -> Jet<T>;

    fn value(&self, u: T) -> T {
        self.jet(u).v
    }
}

/// `height · exp(1 − 1/(1−r²))`, `r = (u − center)/radius`; `C^∞`, peak `height`.
#[derive(Clone, Copy, Debug)]
pub struct Bump<T> {
    pub center: T,
    pub radius: T,
    pub height: T,
}

impl<T: Scalar> Profile<T> for Bump<T> {
    fn jet(&self, u: T) -> Jet<T> {
        let r = (Jet::var(u) - Jet::constant(self.center)).scale(self.radius.recip());
        if r.v.abs() >= T::one() {
            return Jet::zero();
        }
        let s = Jet::constant(T::one()) - r * r;
        (Jet::constant(T::one()) - s.recip()).exp().scale(self.height)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Gaussian<T> {
    pub center: T,
    pub width: T,
}

impl<T: Scalar> Profile<T> for Gaussian<T> {
    fn jet(&self, u: T) -> Jet<T> {
        let r = (Jet::var(u) - Jet::constant(self.center)).scale(self.width.recip());
        (-(r * r)).exp()
    }
}

/// `a + b·u`.
#[derive(Clone, Copy, Debug)]
pub struct Affine<T> {
    pub a: T,
    pub b: T,
}

impl<T: Scalar> Profile<T> for Affine<T> {
    fn jet(&self, u: T) -> Jet<T> {
        Jet { v: self.a + self.b * u, d1: self.b, d2: T::zero() }
    }
}

/// Equal to 1 on `[a, b]`, smooth ramps of width `ramp` on either side, 0 beyond.
#[derive(Clone, Copy, Debug)]
pub struct Plateau<T> {
    pub a: T,
    pub b: T,
    pub ramp: T,
}

fn smooth_step<T: Scalar>(t: Jet<T>) -> Jet<T> {
    if t.v <= T::zero() {
        return Jet::zero();
    }
    if t.v >= T::one() {
        return Jet::constant(T::one());
    }
    let psi = |x: Jet<T>| (-x.recip()).exp();
    let p = psi(t);
    let q = psi(Jet::constant(T::one()) - t);
    p / (p + q)
}

impl<T: Scalar> Profile<T> for Plateau<T> {
    fn jet(&self, u: T) -> Jet<T> {
        let x = Jet::var(u);
        let rise = smooth_step((x - Jet::constant(self.a - self.ramp)).scale(self.ramp.recip()));
        let fall = smooth_step((Jet::constant(self.b + self.ramp) - x).scale(self.ramp.recip()));
        rise * fall
    }
}

#[derive(Clone, Debug)]
pub struct Product<T>(pub Arc<dyn Profile<T>>, pub Arc<dyn Profile<T>>);

impl<T: Scalar> Profile<T> for Product<T> {
    fn jet(&self, u: T) -> Jet<T> {
        self.0.jet(u) * self.1.jet(u)
    }
}

#[derive(Clone, Debug)]
pub struct Sum<T>(pub Vec<(T, Arc<dyn Profile<T>>)>);

impl<T: Scalar> Profile<T> for Sum<T> {
    fn jet(&self, u: T) -> Jet<T> {
        self.0
            .iter()
            .fold(Jet::zero(), |acc, (k, p)| acc + p.jet(u).scale(*k))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Zero;

impl<T: Scalar> Profile<T> for Zero {
    fn jet(&self, _u: T) -> Jet<T> {
        Jet::zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestClass {
    #[serde(rename = "S_Dif")]
    Dif,
    #[serde(rename = "S_Rob")]
    Rob,
    #[serde(rename = "S_Rob0")]
    Rob0,
    #[serde(rename = "S_Neu")]
    Neu,
}

impl TestClass {
    /// `S_Neu ⊂ S_Dif ⊂ S_Rob0 ⊂ S_Rob`.
    fn rank(self) -> u8 {
        match self {
            TestClass::Neu => 0,
            TestClass::Dif => 1,
            TestClass::Rob0 => 2,
            TestClass::Rob => 3,
        }
    }

    /// Whether every function of `other` belongs to this class.
    pub fn admits(self, other: TestClass) -> bool {
        other.rank() <= self.rank()
    }
}

/// `G(s,u) = q(s)·G₀(u)` with `G₀ = G₋` on `u < 0` and `G₊` on `u ≥ 0`.
#[derive(Clone, Debug)]
pub struct TestFunction<T: Scalar> {
    name: String,
    class: TestClass,
    left: Arc<dyn Profile<T>>,
    right: Arc<dyn Profile<T>>,
    b_g: T,
    b_bar: T,
    time_poly: Vec<T>,
}

const VANISH_TOL: f64 = 1e-14;

impl<T: Scalar> TestFunction<T> {
    /// Class `S_Dif`: one smooth part on the whole line.
    pub fn smooth(name: &str, part: Arc<dyn Profile<T>>, b_g: T) -> Result<Self, FracOpsError> {
        Self::build(name, TestClass::Dif, part.clone(), part, b_g, T::zero())
    }

    /// Class `S_Rob`: independent parts, possibly discontinuous at 0.
    pub fn robin(
        name: &str,
        left: Arc<dyn Profile<T>>,
        right: Arc<dyn Profile<T>>,
        b_g: T,
    ) -> Result<Self, FracOpsError> {
        Self::build(name, TestClass::Rob, left, right, b_g, T::zero())
    }

    /// Class `S_Rob0`: parts that agree at 0.
    pub fn robin0(
        name: &str,
        left: Arc<dyn Profile<T>>,
        right: Arc<dyn Profile<T>>,
        b_g: T,
    ) -> Result<Self, FracOpsError> {
        let (l, r) = (left.value(T::zero()), right.value(T::zero()));
        let scale = T::one().max(l.abs()).max(r.abs());
        if (l - r).abs() > T::of(1e-12) * scale {
            return Err(FracOpsError::Class(format!(
                "S_Rob0 requires G-(0) = G+(0), got {l} and {r}"
            )));
        }
        Self::build(name, TestClass::Rob0, left, right, b_g, T::zero())
    }

    /// Class `S_Neu`: smooth, vanishing on `[-b̄, b̄]`.
    pub fn neumann(
        name: &str,
        part: Arc<dyn Profile<T>>,
        b_g: T,
        b_bar: T,
    ) -> Result<Self, FracOpsError> {
        if !(b_bar > T::zero() && b_bar < b_g) {
            return Err(FracOpsError::Class(format!("S_Neu needs 0 < b̄ < b_G, got b̄ = {b_bar}")));
        }
        let f = Self::build(name, TestClass::Neu, part.clone(), part, b_g, b_bar)?;
        let k = 400;
        for i in 0..=k {
            let u = -b_bar + T::of(2.0 * i as f64 / k as f64) * b_bar;
            if f.value(u).abs() > T::of(VANISH_TOL) {
                return Err(FracOpsError::Class(format!("S_Neu function nonzero at {u} inside the gap")));
            }
        }
        Ok(f)
    }

    fn build(
        name: &str,
        class: TestClass,
        left: Arc<dyn Profile<T>>,
        right: Arc<dyn Profile<T>>,
        b_g: T,
        b_bar: T,
    ) -> Result<Self, FracOpsError> {
        if !(b_g > T::zero()) || !b_g.is_finite() {
            return Err(FracOpsError::Class(format!("support radius must be positive, got {b_g}")));
        }
        let f = Self { name: name.to_string(), class, left, right, b_g, b_bar, time_poly: vec![T::one()] };
        let k = 400;
        for i in 0..=k {
            let u = b_g + T::of(i as f64 / k as f64) * (b_g + T::one());
            for x in [u, -u] {
                if f.value(x).abs() > T::of(VANISH_TOL) {
                    return Err(FracOpsError::Class(format!(
                        "{name}: G({x}) != 0 outside the declared support radius {b_g}"
                    )));
                }
            }
        }
        Ok(f)
    }

    /// Polynomial time factor `q(s) = Σ_k a_k s^k`.
    pub fn with_time(mut self, coefficients: Vec<T>) -> Self {
        self.time_poly = if coefficients.is_empty() { vec![T::one()] } else { coefficients };
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn class(&self) -> TestClass {
        self.class
    }

    pub fn b_g(&self) -> T {
        self.b_g
    }

    pub fn b_bar(&self) -> T {
        self.b_bar
    }

    pub fn part(&self, side: Side) -> &Arc<dyn Profile<T>> {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn jet(&self, u: T) -> Jet<T> {
        if u < T::zero() {
            self.left.jet(u)
        } else {
            self.right.jet(u)
        }
    }

    pub fn value(&self, u: T) -> T {
        self.jet(u).v
    }

    /// The part of `side` evaluated at `u`, also across the origin.
    pub fn side_value(&self, side: Side, u: T) -> T {
        self.part(side).value(u)
    }

    /// `G(0⁺) − G(0⁻)`.
    pub fn jump(&self) -> T {
        self.right.value(T::zero()) - self.left.value(T::zero())
    }

    pub fn time_factor(&self, s: T) -> T {
        self.time_poly.iter().rev().fold(T::zero(), |acc, &a| acc * s + a)
    }

    pub fn time_factor_derivative(&self, s: T) -> T {
        self.time_poly
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(T::zero(), |acc, (k, &a)| acc * s + a * T::of(k as f64))
    }

    pub fn max_time_factor(&self, horizon: T) -> T {
        let k = 256;
        (0..=k)
            .map(|i| self.time_factor(horizon * T::of(i as f64 / k as f64)).abs())
            .fold(T::zero(), T::max)
    }

    /// Sampled `(‖G‖∞, ‖G′‖∞, ‖G″‖∞)` over both parts on their own sides.
    pub fn sup_norms(&self) -> (T, T, T) {
        let k = 4000;
        let mut out = (T::zero(), T::zero(), T::zero());
        for i in 0..=k {
            let u = self.b_g * T::of(i as f64 / k as f64);
            for j in [self.right.jet(u), self.left.jet(-u)] {
                out.0 = out.0.max(j.v.abs());
                out.1 = out.1.max(j.d1.abs());
                out.2 = out.2.max(j.d2.abs());
            }
        }
        out
    }
}
