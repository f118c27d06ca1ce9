//! Occupancy states on a finite window of `ℤ`.

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use super::ProcessError;

/// Half-open site range `[lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    lo: i64,
    hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self, ProcessError> {
        if lo >= hi {
            return Err(ProcessError::Window(format!("empty window [{lo}, {hi})")));
        }
        if (hi - lo) as u64 > u32::MAX as u64 {
            return Err(ProcessError::Window(format!("window [{lo}, {hi}) too large")));
        }
        Ok(Self { lo, hi })
    }

    /// `[-w, w)`.
    pub fn symmetric(w: i64) -> Result<Self, ProcessError> {
        Self::new(-w, w)
    }

    /// `[-W, W)` with `W = max(⌈8·b_G·n⌉, 4n)`.
    pub fn for_support(b_g: f64, n: u64) -> Result<Self, ProcessError> {
        let w = ((8.0 * b_g * n as f64).ceil() as i64).max(4 * n as i64);
        Self::symmetric(w)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: i64) -> bool {
        x >= self.lo && x < self.hi
    }

    /// Storage index of `x`; caller guarantees `contains(x)`.
    #[inline]
    pub fn index(&self, x: i64) -> usize {
        (x - self.lo) as usize
    }

    #[inline]
    pub fn site(&self, i: usize) -> i64 {
        self.lo + i as i64
    }

    pub fn sites(&self) -> std::ops::Range<i64> {
        self.lo..self.hi
    }
}

/// `η ∈ {0,1}^{[lo,hi)}` with a cached particle count.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    window: Window,
    occupancy: BitVec<u64, Lsb0>,
    particle_count: usize,
}

impl Configuration {
    pub fn empty(window: Window) -> Self {
        Self { window, occupancy: bitvec![u64, Lsb0; 0; window.len()], particle_count: 0 }
    }

    pub fn full(window: Window) -> Self {
        Self { window, occupancy: bitvec![u64, Lsb0; 1; window.len()], particle_count: window.len() }
    }

    pub fn from_sites(window: Window, sites: impl IntoIterator<Item = i64>) -> Result<Self, ProcessError> {
        let mut c = Self::empty(window);
        for x in sites {
            if !window.contains(x) {
                return Err(ProcessError::Window(format!("site {x} outside [{}, {})", window.lo, window.hi)));
            }
            c.set(x, true);
        }
        Ok(c)
    }

    pub(crate) fn from_bits(window: Window, occupancy: BitVec<u64, Lsb0>) -> Self {
        let particle_count = occupancy.count_ones();
        Self { window, occupancy, particle_count }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn particle_count(&self) -> usize {
        self.particle_count
    }

    /// `η(x)`; sites outside the window read as empty.
    #[inline]
    pub fn occupied(&self, x: i64) -> bool {
        self.window.contains(x) && self.occupancy[self.window.index(x)]
    }

    /// Sets `η(x)`. Panics outside the window.
    pub fn set(&mut self, x: i64, value: bool) {
        assert!(self.window.contains(x), "site {x} outside window");
        let i = self.window.index(x);
        let old = self.occupancy.replace(i, value);
        match (old, value) {
            (false, true) => self.particle_count += 1,
            (true, false) => self.particle_count -= 1,
            _ => {}
        }
    }

    /// `η ↦ η^{x,y}`.
    pub fn exchange(&mut self, x: i64, y: i64) {
        let (a, b) = (self.occupied(x), self.occupied(y));
        if a != b {
            self.set(x, b);
            self.set(y, a);
        }
    }

    /// Whether the cached count equals the popcount.
    pub fn count_is_consistent(&self) -> bool {
        self.occupancy.count_ones() == self.particle_count
    }

    pub fn occupied_sites(&self) -> impl Iterator<Item = i64> + '_ {
        let lo = self.window.lo;
        self.occupancy.iter_ones().map(move |i| lo + i as i64)
    }

    pub fn bits(&self) -> &BitSlice<u64, Lsb0> {
        &self.occupancy
    }

    pub(crate) fn words(&self) -> &[u64] {
        self.occupancy.as_raw_slice()
    }

    /// Occupied sites in `[a, b]`.
    pub fn count_in(&self, a: i64, b: i64) -> usize {
        let a = a.max(self.window.lo);
        let b = b.min(self.window.hi - 1);
        if a > b {
            return 0;
        }
        self.occupancy[self.window.index(a)..=self.window.index(b)].count_ones()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn window_for_support() {
        let w = Window::for_support(1.0, 64).unwrap();
        assert_eq!((w.lo(), w.hi()), (-512, 512));
        let w = Window::for_support(0.25, 64).unwrap();
        assert_eq!((w.lo(), w.hi()), (-256, 256));
        assert!(Window::new(3, 3).is_err());
    }

    #[test]
    fn outside_reads_empty() {
        let c = Configuration::full(Window::new(0, 4).unwrap());
        assert!(c.occupied(3) && !c.occupied(4) && !c.occupied(-1));
        assert_eq!(c.count_in(-10, 10), 4);
    }

    proptest! {
        #[test]
        fn exchange_is_an_involution(bits in proptest::collection::vec(any::<bool>(), 20), x in -10i64..10, y in -10i64..10) {
            let w = Window::symmetric(10).unwrap();
            let c0 = Configuration::from_sites(w, w.sites().zip(&bits).filter(|p| *p.1).map(|p| p.0)).unwrap();
            let mut c = c0.clone();
            c.exchange(x, y);
            prop_assert_eq!(c.particle_count(), c0.particle_count());
            prop_assert!(c.count_is_consistent());
            c.exchange(x, y);
            prop_assert_eq!(c, c0);
        }
    }
}
