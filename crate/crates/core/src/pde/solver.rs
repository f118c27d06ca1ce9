//! Mean-field lattice ODE `dρ_x/dt = n^γ Σ_y p(y−x) w_{x,y} (ρ_y − ρ_x)` and its RK4 integration.
//!
//! The operator is applied as an FFT convolution. With a thick barrier the two half-lines are
//! packed into the real and imaginary parts of one complex transform; thin barriers add sparse
//! per-bond corrections.

use std::io::Write;
use std::sync::Arc;

use num_traits::Zero;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftNum, FftPlanner};
use serde::{Deserialize, Serialize};

use super::regime::{classify_regime, RegimeSpec};
use super::{InitialProfile, PdeError};
use crate::kernel::zeta::hurwitz_zeta;
use crate::process::{BarrierSpec, Window};
use crate::{KernelLaw, Scalar};

/// Scalars the solver runs on.
pub trait SolverScalar: Scalar + FftNum {}
impl<T: Scalar + FftNum> SolverScalar for T {}

/// How jumps that would leave the window are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Suppressed, as in the windowed simulator.
    Reflecting,
    /// The window is a torus; the kernel is periodized. Only without a barrier.
    Periodic,
}

/// RK4 on `dρ/dt = Aρ` keeps `min ρ ≤ ρ ≤ max ρ` when `Δt·max_x |A_xx| ≤ 1`.
pub const MONOTONE_LIMIT: f64 = 1.0;
/// Default `Δt·max_x |A_xx|`.
pub const DEFAULT_COURANT: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Largest step; `None` picks `0.2 / (n^γ max(1, αn^{-β}))`.
    pub dt: Option<f64>,
    pub boundary: Boundary,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { dt: None, boundary: Boundary::Reflecting }
    }
}

#[derive(Clone, Debug)]
pub struct HydroSolution<T> {
    pub n_grid: u64,
    pub window: Window,
    pub times: Vec<f64>,
    /// `density[k][i]` is `ρ` at `times[k]`, site `window.site(i)`.
    pub density: Vec<Vec<T>>,
    pub regime: RegimeSpec,
    pub boundary: Boundary,
    pub profile: InitialProfile,
    pub dt: f64,
    pub steps: u64,
}

pub const CSV_SCHEMA: &str = "hydro-solution/1";

impl<T: SolverScalar> HydroSolution<T> {
    pub fn u(&self, i: usize) -> f64 {
        self.window.site(i) as f64 / self.n_grid as f64
    }

    pub fn mass(&self, k: usize) -> f64 {
        self.density[k].iter().map(|v| v.as_f64()).sum::<f64>() / self.n_grid as f64
    }

    /// Mass on `(−∞, 0)` and `[0, ∞)` inside the window.
    pub fn half_masses(&self, k: usize) -> (f64, f64) {
        let mut out = (0.0, 0.0);
        for (i, v) in self.density[k].iter().enumerate() {
            if self.window.site(i) < 0 {
                out.0 += v.as_f64();
            } else {
                out.1 += v.as_f64();
            }
        }
        (out.0 / self.n_grid as f64, out.1 / self.n_grid as f64)
    }

    /// `Σ_x (ρ_x(t_k) − a)²`.
    pub fn energy(&self, k: usize, a: f64) -> f64 {
        self.density[k].iter().map(|v| (v.as_f64() - a).powi(2)).sum()
    }

    /// `(min, max)` over all stored values.
    pub fn extremes(&self) -> (f64, f64) {
        self.density.iter().flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v.as_f64()), hi.max(v.as_f64()))
        })
    }

    /// `(1/n) Σ_x ρ_x(t_k) f(x/n)`.
    pub fn pairing(&self, k: usize, f: impl Fn(f64) -> f64) -> f64 {
        self.density[k].iter().enumerate().map(|(i, v)| v.as_f64() * f(self.u(i))).sum::<f64>() / self.n_grid as f64
    }

    /// Index of the stored time equal to `t` up to `1e-12`.
    pub fn time_index(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|&s| (s - t).abs() <= 1e-12 * t.abs().max(1.0))
    }

    /// Rows `time,site,u,rho` after `#` comment lines.
    pub fn write_csv<W: Write>(&self, out: &mut W, header: &[String]) -> std::io::Result<()> {
        writeln!(out, "# schema={CSV_SCHEMA}")?;
        for line in header {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time", "site", "u", "rho"])?;
        for (k, t) in self.times.iter().enumerate() {
            for (i, v) in self.density[k].iter().enumerate() {
                w.write_record(&[
                    format!("{t}"),
                    self.window.site(i).to_string(),
                    format!("{}", self.u(i)),
                    format!("{}", v.as_f64()),
                ])?;
            }
        }
        w.flush()
    }
}

/// The linear right-hand side `ρ ↦ Aρ`.
pub struct LatticeOperator<T: SolverScalar> {
    len: usize,
    rate: T,
    slow: T,
    split: Option<usize>,
    row_same: Vec<T>,
    row_other: Vec<T>,
    thin: Vec<(usize, usize, T)>,
    spectrum: Vec<T>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    buffer: Vec<Complex<T>>,
    scratch: Vec<Complex<T>>,
}

impl<T: SolverScalar> LatticeOperator<T> {
    pub fn new(
        law: &KernelLaw,
        barrier: &BarrierSpec,
        n: u64,
        window: Window,
        boundary: Boundary,
    ) -> Result<Self, PdeError> {
        let len = window.len();
        if len < 2 {
            return Err(PdeError::Domain("window needs at least two sites".into()));
        }
        if boundary == Boundary::Periodic && !barrier.is_none() {
            return Err(PdeError::Domain("periodic windows are only supported without a barrier".into()));
        }
        let rate = (n as f64).powf(law.gamma());
        let slow = barrier.slow_factor(n);
        let mut planner = FftPlanner::new();
        let (kernel, m) = match boundary {
            Boundary::Reflecting => {
                let m = (2 * len).next_power_of_two();
                let mut k = vec![0.0; m];
                for d in 1..len {
                    k[d] = law.p(d as i64);
                    k[m - d] = k[d];
                }
                (k, m)
            }
            Boundary::Periodic => (periodic_kernel(law, len), len),
        };
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let mut spec: Vec<Complex<T>> = kernel.iter().map(|&v| Complex::new(T::of(v), T::zero())).collect();
        let mut scratch = vec![Complex::zero(); forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len())];
        forward.process_with_scratch(&mut spec, &mut scratch);
        // Even kernel: the transform is real. The inverse is unnormalized, so fold in 1/m here.
        let inv_m = T::of(1.0 / m as f64);
        let spectrum = spec.iter().map(|c| c.re * inv_m).collect();

        let split = barrier.is_thick().then(|| window.lo().clamp(i64::MIN, 0).unsigned_abs().min(len as u64) as usize);
        let (row_same, row_other) = match boundary {
            Boundary::Periodic => {
                let total: f64 = kernel[1..].iter().sum();
                (vec![T::of(total); len], vec![T::zero(); len])
            }
            Boundary::Reflecting => row_sums(law, len, split),
        };
        let thin = match barrier.thin_bonds_within(window.lo(), window.hi()) {
            Some(bonds) => bonds
                .into_iter()
                .map(|(x, y)| (window.index(x), window.index(y), T::of((slow - 1.0) * law.p(y - x))))
                .collect(),
            None => Vec::new(),
        };
        Ok(Self {
            len,
            rate: T::of(rate),
            slow: T::of(if split.is_some() { slow } else { 1.0 }),
            split,
            row_same,
            row_other,
            thin,
            spectrum,
            forward,
            inverse,
            buffer: vec![Complex::zero(); m],
            scratch,
        })
    }

    /// `max_x |A_xx|`.
    pub fn diagonal_bound(&self) -> f64 {
        let rate = self.rate.as_f64();
        let slow = self.slow.as_f64();
        let mut diag: Vec<f64> = (0..self.len)
            .map(|i| rate * (self.row_same[i].as_f64() + slow * self.row_other[i].as_f64()))
            .collect();
        for &(i, j, extra) in &self.thin {
            diag[i] += rate * extra.as_f64();
            diag[j] += rate * extra.as_f64();
        }
        diag.into_iter().fold(0.0, f64::max)
    }

    pub fn apply(&mut self, rho: &[T], out: &mut [T]) {
        let len = self.len;
        for c in self.buffer.iter_mut() {
            *c = Complex::zero();
        }
        match self.split {
            Some(o) => {
                for i in 0..len {
                    self.buffer[i] = if i < o {
                        Complex::new(rho[i], T::zero())
                    } else {
                        Complex::new(T::zero(), rho[i])
                    };
                }
            }
            None => {
                for i in 0..len {
                    self.buffer[i] = Complex::new(rho[i], T::zero());
                }
            }
        }
        self.forward.process_with_scratch(&mut self.buffer, &mut self.scratch);
        for (c, &k) in self.buffer.iter_mut().zip(&self.spectrum) {
            *c = *c * k;
        }
        self.inverse.process_with_scratch(&mut self.buffer, &mut self.scratch);
        for i in 0..len {
            let c = self.buffer[i];
            let (same, other) = match self.split {
                Some(o) if i < o => (c.re, c.im),
                Some(_) => (c.im, c.re),
                None => (c.re, T::zero()),
            };
            let gain = same + self.slow * other;
            let loss = rho[i] * (self.row_same[i] + self.slow * self.row_other[i]);
            out[i] = self.rate * (gain - loss);
        }
        for &(i, j, extra) in &self.thin {
            let flow = self.rate * extra * (rho[j] - rho[i]);
            out[i] += flow;
            out[j] -= flow;
        }
    }
}

/// `Σ_{y≠x} p(y−x)` over the window, split into same-side and other-side parts when `split` is set.
fn row_sums<T: Scalar>(law: &KernelLaw, len: usize, split: Option<usize>) -> (Vec<T>, Vec<T>) {
    let mut prefix = vec![0.0; len];
    for d in 1..len {
        prefix[d] = prefix[d - 1] + law.p(d as i64);
    }
    let s = |k: i64| if k <= 0 { 0.0 } else { prefix[k as usize] };
    let n = len as i64;
    let mut same = Vec::with_capacity(len);
    let mut other = Vec::with_capacity(len);
    for i in 0..n {
        let all = s(i) + s(n - 1 - i);
        let cross = match split {
            None => 0.0,
            Some(o) => {
                let o = o as i64;
                if i < o {
                    s(n - 1 - i) - s(o - i - 1)
                } else {
                    s(i) - s(i - o)
                }
            }
        };
        same.push(T::of(all - cross));
        other.push(T::of(cross));
    }
    (same, other)
}

/// `p_N(d) = Σ_k p(d + kN)` for `d = 1..N−1`, from Hurwitz sums; `p_N(0)` is dropped since those jumps are no-ops.
pub fn periodic_kernel(law: &KernelLaw, len: usize) -> Vec<f64> {
    let s = 1.0 + law.gamma();
    let nn = len as f64;
    let scale = law.c_gamma() * nn.powf(-s);
    let mut k = vec![0.0; len];
    for (d, v) in k.iter_mut().enumerate().skip(1) {
        let q = d as f64 / nn;
        *v = scale * (hurwitz_zeta(s, q) + hurwitz_zeta(s, 1.0 - q));
    }
    k
}

/// Integrates the lattice ODE from `ρ_x(0) = g(x/n)` and records `ρ` at `times`.
pub fn solve_hydro<T: SolverScalar>(
    regime: &RegimeSpec,
    g: &InitialProfile,
    barrier: &BarrierSpec,
    n_grid: u64,
    window: Window,
    times: &[f64],
    options: &SolverOptions,
) -> Result<HydroSolution<T>, PdeError> {
    let expected = classify_regime(regime.gamma, barrier)?;
    if expected != *regime {
        return Err(PdeError::Regime(format!(
            "barrier implies {:?}, solver was given {:?}",
            expected.equation, regime.equation
        )));
    }
    g.validate()?;
    if n_grid == 0 {
        return Err(PdeError::Domain("n_grid must be positive".into()));
    }
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PdeError::Domain("output times must be non-negative and strictly increasing".into()));
    }
    let law = KernelLaw::new(regime.gamma)?;
    let mut op = LatticeOperator::<T>::new(&law, barrier, n_grid, window, options.boundary)?;
    let lambda = op.diagonal_bound();
    let suggested = DEFAULT_COURANT / ((n_grid as f64).powf(law.gamma()) * barrier.slow_factor(n_grid).max(1.0));
    let dt = options.dt.unwrap_or(suggested);
    if !(dt > 0.0) || dt * lambda > MONOTONE_LIMIT {
        return Err(PdeError::Cfl { dt, suggested });
    }

    let len = window.len();
    let mut rho: Vec<T> = window.sites().map(|x| T::of(g.value(x as f64 / n_grid as f64))).collect();
    let mut stages: [Vec<T>; 4] = std::array::from_fn(|_| vec![T::zero(); len]);
    let mut tmp = vec![T::zero(); len];
    let mut density = Vec::with_capacity(times.len());
    let mut now = 0.0;
    let mut steps = 0u64;
    let (two, six) = (T::of(2.0), T::of(6.0));
    for &t in times {
        let span = t - now;
        let count = (span / dt).ceil().max(if span > 0.0 { 1.0 } else { 0.0 }) as u64;
        if count > 0 {
            let h = T::of(span / count as f64);
            let half = h / two;
            for _ in 0..count {
                op.apply(&rho, &mut stages[0]);
                axpy(&mut tmp, &rho, half, &stages[0]);
                op.apply(&tmp, &mut stages[1]);
                axpy(&mut tmp, &rho, half, &stages[1]);
                op.apply(&tmp, &mut stages[2]);
                axpy(&mut tmp, &rho, h, &stages[2]);
                op.apply(&tmp, &mut stages[3]);
                for i in 0..len {
                    let incr = stages[0][i] + two * (stages[1][i] + stages[2][i]) + stages[3][i];
                    rho[i] += h * incr / six;
                }
            }
            steps += count;
        }
        now = t;
        density.push(rho.clone());
    }
    Ok(HydroSolution {
        n_grid,
        window,
        times: times.to_vec(),
        density,
        regime: regime.clone(),
        boundary: options.boundary,
        profile: *g,
        dt,
        steps,
    })
}

fn axpy<T: Scalar>(out: &mut [T], x: &[T], a: T, y: &[T]) {
    for ((o, &xi), &yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + a * yi;
    }
}

/// Uniform times `0, T/k, …, T`.
pub fn uniform_times(horizon: f64, intervals: usize) -> Vec<f64> {
    (0..=intervals).map(|i| horizon * i as f64 / intervals as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_annihilates_constants_and_conserves_mass() {
        let law = KernelLaw::new(1.3).unwrap();
        let w = Window::symmetric(40).unwrap();
        for barrier in [BarrierSpec::none(), BarrierSpec::thick(3.0, 0.4).unwrap()] {
            let mut op = LatticeOperator::<f64>::new(&law, &barrier, 16, w, Boundary::Reflecting).unwrap();
            let mut out = vec![0.0; w.len()];
            op.apply(&vec![0.4; w.len()], &mut out);
            assert!(out.iter().all(|v| v.abs() < 1e-11), "{out:?}");
            let rho: Vec<f64> = (0..w.len()).map(|i| ((i * 7919) % 13) as f64 / 13.0).collect();
            op.apply(&rho, &mut out);
            assert!(out.iter().sum::<f64>().abs() < 1e-10);
        }
    }

    #[test]
    fn matches_direct_sum() {
        let law = KernelLaw::new(0.9).unwrap();
        let w = Window::new(-7, 5).unwrap();
        let n = 3;
        let thin = BarrierSpec::thin(crate::process::SlowSet::TouchingOrigin, 0.5, 2.5, 0.5, 0.9).unwrap();
        let listed = crate::process::SlowSet::Bonds(vec![(-1, 0), (-3, 2), (-7, 4)]);
        let listed = BarrierSpec::thin(listed, 0.5, 0.2, 0.0, 0.9).unwrap();
        for barrier in [BarrierSpec::thick(2.5, 0.5).unwrap(), thin, listed] {
        let mut op = LatticeOperator::<f64>::new(&law, &barrier, n, w, Boundary::Reflecting).unwrap();
        let rho: Vec<f64> = (0..w.len()).map(|i| (i as f64 * 0.37).sin().abs()).collect();
        let mut out = vec![0.0; w.len()];
        op.apply(&rho, &mut out);
        let rate = (n as f64).powf(0.9);
        for (i, x) in w.sites().enumerate() {
            let direct: f64 = w
                .sites()
                .enumerate()
                .filter(|&(_, y)| y != x)
                .map(|(j, y)| law.p(y - x) * barrier.weight(x, y, n) * (rho[j] - rho[i]))
                .sum();
            assert!((out[i] - rate * direct).abs() < 1e-12, "site {x}");
        }
        }
    }

    #[test]
    fn periodic_kernel_sums_to_one() {
        let law = KernelLaw::new(1.5).unwrap();
        let k = periodic_kernel(&law, 64);
        let self_jumps = 2.0 * law.c_gamma() * 64f64.powf(-2.5) * crate::kernel::zeta::zeta(2.5);
        assert!((k.iter().sum::<f64>() + self_jumps - 1.0).abs() < 1e-13);
    }
}
