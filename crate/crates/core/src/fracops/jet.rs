//! Second-order forward-mode derivatives: `(f, f', f'')`.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<T> {
    pub v: T,
    pub d1: T,
    pub d2: T,
}

impl<T: Scalar> Jet<T> {
    pub fn var(u: T) -> Self {
        Self { v: u, d1: T::one(), d2: T::zero() }
    }

    pub fn constant(c: T) -> Self {
        Self { v: c, d1: T::zero(), d2: T::zero() }
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        Self { v: e, d1: e * self.d1, d2: e * (self.d2 + self.d1 * self.d1) }
    }

    pub fn recip(self) -> Self {
        let r = self.v.recip();
        let r2 = r * r;
        let two = T::of(2.0);
        Self { v: r, d1: -self.d1 * r2, d2: (two * self.d1 * self.d1 * r - self.d2) * r2 }
    }

    pub fn scale(self, k: T) -> Self {
        Self { v: self.v * k, d1: self.d1 * k, d2: self.d2 * k }
    }
}

impl<T: Scalar> Add for Jet<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }
}

impl<T: Scalar> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { v: self.v - o.v, d1: self.d1 - o.d1, d2: self.d2 - o.d2 }
    }
}

impl<T: Scalar> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { v: -self.v, d1: -self.d1, d2: -self.d2 }
    }
}

impl<T: Scalar> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = T::of(2.0);
        Self {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + two * self.d1 * o.d1 + self.v * o.d2,
        }
    }
}

impl<T: Scalar> Div for Jet<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}
