//! Lattice counterparts of the continuum operators and the error sums whose vanishing the
//! operator-convergence statements assert.
//!
//! Sums run over the sites `y` where `G(y/n)` can be non-zero, `|y| ≤ ⌈b_G n⌉`. The jumps
//! landing beyond that range only contribute `−G(x/n)` times a one-sided tail, which is
//! evaluated analytically, so no kernel truncation enters.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::continuum::{frac_laplacian, regional_star};
use super::{FracOpsError, TestClass, TestFunction};
use crate::KernelLaw;

/// Sampled `G` with the tables a lattice sum needs.
struct Lattice<'a> {
    law: &'a KernelLaw,
    n: u64,
    ymax: i64,
    g: Vec<f64>,
    p: Vec<f64>,
}

impl<'a> Lattice<'a> {
    fn new(g: &TestFunction<f64>, n: u64, law: &'a KernelLaw, reach: i64) -> Self {
        let ymax = (g.b_g() * n as f64).ceil() as i64;
        let vals = (-ymax..=ymax).map(|y| g.value(y as f64 / n as f64)).collect();
        let p = (0..=(reach + ymax)).map(|z| law.p(z)).collect();
        Self { law, n, ymax, g: vals, p }
    }

    fn g(&self, y: i64) -> f64 {
        if y.abs() > self.ymax {
            0.0
        } else {
            self.g[(y + self.ymax) as usize]
        }
    }

    fn p(&self, z: i64) -> f64 {
        self.p.get(z.unsigned_abs() as usize).copied().unwrap_or_else(|| self.law.p(z))
    }

    fn scale(&self) -> f64 {
        (self.n as f64).powf(self.law.gamma())
    }

    /// `Σ_{y ∈ [lo, hi], y ≠ x} (G_y − G_x) p(y−x)`, plus `−G_x` times the mass beyond `hi`
    /// (when `open_right`) and below `lo` (when `open_left`).
    fn partial(&self, x: i64, lo: i64, hi: i64, open_left: bool, open_right: bool) -> f64 {
        let gx = self.g(x);
        let mut acc = 0.0;
        for y in lo..=hi {
            if y != x {
                acc += (self.g(y) - gx) * self.p(y - x);
            }
        }
        if gx != 0.0 {
            if open_right {
                acc -= gx * self.law.tail_from((hi - x + 1).max(1) as u64);
            }
            if open_left {
                acc -= gx * self.law.tail_from((x - lo + 1).max(1) as u64);
            }
        }
        acc
    }

    /// `n^γ Σ_y (G_y − G_x) p(y−x)` over all `y`.
    fn full(&self, x: i64) -> f64 {
        self.scale() * self.partial(x, -self.ymax, self.ymax, true, true)
    }

    /// Same-side sum: `y ≥ 0` when `x ≥ 0`, `y < 0` when `x < 0`.
    fn regional(&self, x: i64) -> f64 {
        let v = if x >= 0 {
            self.partial(x, 0, self.ymax, false, true)
        } else {
            self.partial(x, -self.ymax, -1, true, false)
        };
        self.scale() * v
    }

    /// Other-side sum `n^γ Σ_{y: xy < 0 or x,y straddle 0} (G_y − G_x) p(y−x)`.
    fn cross(&self, x: i64) -> f64 {
        let v = if x >= 0 {
            self.partial(x, -self.ymax, -1, true, false)
        } else {
            self.partial(x, 0, self.ymax, false, true)
        };
        self.scale() * v
    }
}

/// `n^γ K_n G(x/n) = n^γ Σ_z [G((x+z)/n) − G(x/n)] p(z)`.
pub fn discrete_generator_apply(g: &TestFunction<f64>, x: i64, n: u64, law: &KernelLaw) -> f64 {
    Lattice::new(g, n, law, x.abs()).full(x)
}

/// `n^γ Σ_{y on the side of x} [G(y/n) − G(x/n)] p(y−x)`, the generator without the barrier bonds.
pub fn discrete_regional_apply(g: &TestFunction<f64>, x: i64, n: u64, law: &KernelLaw) -> f64 {
    Lattice::new(g, n, law, x.abs()).regional(x)
}

/// `n^γ Σ_{y across the origin from x} [G(y/n) − G(x/n)] p(y−x)`.
pub fn discrete_cross_apply(g: &TestFunction<f64>, x: i64, n: u64, law: &KernelLaw) -> f64 {
    Lattice::new(g, n, law, x.abs()).cross(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorVariant {
    /// Whole generator against the fractional Laplacian.
    Full,
    /// Same-side generator against the regional operator on `ℝ*`.
    Regional,
    /// Barrier bonds, damped by `n^{-β}`, against `1{β=0}(full − regional)`.
    Slow,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: u64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub variant: OperatorVariant,
    pub test_function: String,
    pub gamma: f64,
    pub beta: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].error < w[0].error)
    }

    /// Last error over the first.
    pub fn reduction(&self) -> f64 {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) if a.error > 0.0 => b.error / a.error,
            _ => 0.0,
        }
    }
}

fn check_variant(g: &TestFunction<f64>, variant: OperatorVariant, gamma: f64, beta: f64) -> Result<(), FracOpsError> {
    let class = g.class();
    let ok = match variant {
        OperatorVariant::Full => matches!(class, TestClass::Dif | TestClass::Neu),
        OperatorVariant::Regional => {
            if gamma > 1.0 {
                class != TestClass::Dif || g.jump() == 0.0
            } else {
                class == TestClass::Neu
            }
        }
        OperatorVariant::Slow => {
            if gamma <= 1.0 {
                class == TestClass::Neu
            } else if beta == 0.0 {
                matches!(class, TestClass::Dif | TestClass::Neu)
            } else {
                matches!(class, TestClass::Rob0 | TestClass::Dif | TestClass::Neu)
            }
        }
    };
    if ok {
        Ok(())
    } else {
        Err(FracOpsError::Domain(format!("{variant:?} check with γ = {gamma}, β = {beta} does not accept a {class:?} function")))
    }
}

/// `(1/n) Σ_x sup_s |discrete − continuum|` for each `n`, over `|x| ≤ 4 b_G n`, with the time
/// factor of `G` maximized over `[0, horizon]`.
pub fn operator_convergence_report(
    g: &TestFunction<f64>,
    n_list: &[u64],
    variant: OperatorVariant,
    law: &KernelLaw,
    beta: f64,
    horizon: f64,
) -> Result<ConvergenceReport, FracOpsError> {
    let gamma = law.gamma();
    check_variant(g, variant, gamma, beta)?;
    let q = g.max_time_factor(horizon);
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let reach = (4.0 * g.b_g() * n as f64).ceil() as i64;
        let lat = Lattice::new(g, n, law, 2 * reach);
        let damp = (n as f64).powf(-beta);
        let terms: Vec<f64> = (-reach..=reach)
            .into_par_iter()
            .map(|x| -> Result<f64, FracOpsError> {
                let u = x as f64 / n as f64;
                let d = match variant {
                    OperatorVariant::Full => lat.full(x) - frac_laplacian(g, u, law)?,
                    OperatorVariant::Regional => lat.regional(x) - regional_star(g, u, law)?,
                    OperatorVariant::Slow => {
                        let limit = if beta == 0.0 { frac_laplacian(g, u, law)? - regional_star(g, u, law)? } else { 0.0 };
                        damp * lat.cross(x) - limit
                    }
                };
                Ok(d.abs())
            })
            .collect::<Result<_, _>>()?;
        rows.push(ConvergenceRow { n, error: q * terms.iter().sum::<f64>() / n as f64 });
    }
    Ok(ConvergenceReport { variant, test_function: g.name().to_string(), gamma, beta, rows })
}

/// Boundary double sum for `γ ∈ (1,2)` and an `S_Rob` function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobinBoundarySum {
    pub n: u64,
    /// `Σ_{z≥0} Σ_{x<0} p(z−x) [G(z/n) − G(x/n)]`.
    pub raw: f64,
    /// `m [G(0+) − G(0−)]`, the limit of `raw`.
    pub limit: f64,
    pub residual: f64,
}

pub fn robin_boundary_sum(g: &TestFunction<f64>, n: u64, law: &KernelLaw) -> Result<RobinBoundarySum, FracOpsError> {
    if !(law.gamma() > 1.0 && law.gamma() < 2.0) {
        return Err(FracOpsError::Domain(format!("the boundary sum needs γ ∈ (1,2), got {}", law.gamma())));
    }
    if g.class() == TestClass::Neu {
        return Err(FracOpsError::Class(format!("{}: the boundary sum needs parts that are C¹ up to 0", g.name())));
    }
    let ymax = (g.b_g() * n as f64).ceil() as i64;
    let nn = n as f64;
    let mut raw = 0.0;
    // Σ_{x<0} p(z−x) = tail(z+1) and Σ_{z≥0} p(z−x) = tail(−x).
    for z in 0..=ymax {
        raw += g.value(z as f64 / nn) * law.tail_from(z as u64 + 1);
    }
    for x in 1..=ymax {
        raw -= g.value(-(x as f64) / nn) * law.tail_from(x as u64);
    }
    let limit = law.mean_jump() * g.jump();
    Ok(RobinBoundarySum { n, raw, limit, residual: (raw - limit).abs() })
}

/// `n^{γ−2} Σ_{x,y} (G_y − G_x)² p(y−x)`, the quadratic-variation sum of the Dynkin martingale.
pub fn tightness_aux_sum(g: &TestFunction<f64>, n: u64, law: &KernelLaw) -> f64 {
    let lat = Lattice::new(g, n, law, 0);
    let y = lat.ymax;
    let mut acc = 0.0;
    for x in -y..=y {
        let gx = lat.g(x);
        for z in -y..=y {
            if z != x {
                acc += (lat.g(z) - gx).powi(2) * lat.p(z - x);
            }
        }
        acc += 2.0 * gx * gx * (law.tail_from((y - x + 1) as u64) + law.tail_from((x + y + 1) as u64));
    }
    (n as f64).powf(law.gamma() - 2.0) * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::{Bump, Plateau, Profile};
    use std::sync::Arc;

    #[test]
    fn antisymmetric_function_vanishes_at_origin() {
        let law = KernelLaw::new(1.1).unwrap();
        let part: Arc<dyn Profile<f64>> = Arc::new(crate::fracops::Sum(vec![
            (1.0, Arc::new(Bump { center: 0.4, radius: 0.5, height: 1.0 }) as Arc<dyn Profile<f64>>),
            (-1.0, Arc::new(Bump { center: -0.4, radius: 0.5, height: 1.0 })),
        ]));
        let g = TestFunction::smooth("odd", part, 1.0).unwrap();
        assert!(discrete_generator_apply(&g, 0, 64, &law).abs() < 1e-12);
    }

    #[test]
    fn flat_region_is_annihilated_up_to_far_mass() {
        let law = KernelLaw::new(0.6).unwrap();
        let part: Arc<dyn Profile<f64>> = Arc::new(Plateau { a: -4.0, b: 4.0, ramp: 0.5 });
        let g = TestFunction::smooth("plateau", part, 4.5).unwrap();
        let near = discrete_generator_apply(&g, 0, 4, &law);
        let wider = TestFunction::smooth("wide", Arc::new(Plateau { a: -16.0, b: 16.0, ramp: 0.5 }) as Arc<dyn Profile<f64>>, 16.5).unwrap();
        let far = discrete_generator_apply(&wider, 0, 4, &law);
        assert!(far.abs() < near.abs());
    }

    #[test]
    fn split_is_exact() {
        let law = KernelLaw::new(1.4).unwrap();
        let g = TestFunction::robin(
            "r",
            Arc::new(Bump { center: -0.5, radius: 0.5, height: 1.0 }) as Arc<dyn Profile<f64>>,
            Arc::new(Bump { center: 0.3, radius: 0.7, height: 2.0 }),
            1.0,
        )
        .unwrap();
        for x in [-20, -1, 0, 3, 50] {
            let (f, r, c) = (
                discrete_generator_apply(&g, x, 32, &law),
                discrete_regional_apply(&g, x, 32, &law),
                discrete_cross_apply(&g, x, 32, &law),
            );
            assert!((f - r - c).abs() < 1e-9 * f.abs().max(1.0), "x={x}: {f} vs {r} + {c}");
        }
    }
}
