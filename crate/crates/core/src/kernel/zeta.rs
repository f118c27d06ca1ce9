//! Power sums `Σ_{j≥k} j^{-s}` for `s > 1`.

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

// B_{2r}/(2r)! for r = 1..5.
const BERNOULLI_RATIOS: [f64; 5] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
];

/// Euler–Maclaurin value of `Σ_{j≥k} j^{-s}` with four correction terms.
/// Returns `(value, bound)` where `bound` is the size of the first omitted term.
pub fn euler_maclaurin_tail(s: f64, k: f64) -> (f64, f64) {
    debug_assert!(s > 1.0 && k >= 1.0);
    let ks = k.powf(-s);
    let mut acc = CompensatedSum::default();
    acc.add(k * ks / (s - 1.0));
    acc.add(0.5 * ks);
    // rising = s (s+1) ... (s+2r-2), power = k^{-s-2r+1}
    let mut rising = s;
    let mut power = ks / k;
    let mut omitted = 0.0;
    for (r, coeff) in BERNOULLI_RATIOS.iter().enumerate() {
        let term = coeff * rising * power;
        if r + 1 == BERNOULLI_RATIOS.len() {
            omitted = term.abs();
        } else {
            acc.add(term);
        }
        let m = 2.0 * r as f64 + 1.0;
        rising *= (s + m) * (s + m + 1.0);
        power /= k * k;
    }
    (acc.value(), omitted)
}

const DIRECT_BELOW: u64 = 32;

/// `Σ_{j≥k} j^{-s}` to near machine precision (`s > 1`, `k ≥ 1`).
pub fn power_tail(s: f64, k: u64) -> f64 {
    assert!(s > 1.0, "power tail needs s > 1, got {s}");
    let k = k.max(1);
    if k >= DIRECT_BELOW {
        return euler_maclaurin_tail(s, k as f64).0;
    }
    let mut acc = CompensatedSum::default();
    acc.add(euler_maclaurin_tail(s, DIRECT_BELOW as f64).0);
    for j in (k..DIRECT_BELOW).rev() {
        acc.add((j as f64).powf(-s));
    }
    acc.value()
}

/// Hurwitz zeta `ζ(s, q) = Σ_{j≥0} (q+j)^{-s}` for `s > 1`, `q > 0`.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    assert!(s > 1.0 && q > 0.0, "Hurwitz zeta needs s > 1 and q > 0, got s = {s}, q = {q}");
    let mut acc = CompensatedSum::default();
    acc.add(euler_maclaurin_tail(s, q + DIRECT_BELOW as f64).0);
    for j in (0..DIRECT_BELOW).rev() {
        acc.add((q + j as f64).powf(-s));
    }
    acc.value()
}

/// Riemann zeta for `s > 1`.
pub fn zeta(s: f64) -> f64 {
    power_tail(s, 1)
}
