//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

/// ζ(s) for s > 1 from Borwein's alternating-series acceleration of the eta function.
pub fn zeta_borwein(s: f64) -> f64 {
    let n = 30usize;
    // d_k = n Σ_{i≤k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    let mut d = vec![0.0f64; n + 1];
    let mut term = 1.0 / n as f64; // i = 0: (n-1)!/n! = 1/n
    let mut acc = 0.0;
    for i in 0..=n {
        if i > 0 {
            let i_f = i as f64;
            let n_f = n as f64;
            term *= (n_f + i_f - 1.0) * 4.0 * (n_f - i_f + 1.0) / ((2.0 * i_f - 1.0) * (2.0 * i_f));
        }
        acc += term;
        d[i] = n as f64 * acc;
    }
    let mut eta = 0.0;
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        eta += sign * (d[k] - d[n]) / ((k + 1) as f64).powf(s);
    }
    eta = -eta / d[n];
    eta / (1.0 - 2f64.powf(1.0 - s))
}

/// Dense matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let norm = a
        .iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let scaled: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|x| x * scale).collect()).collect();
    let mut result = identity(n);
    let mut power = identity(n);
    for k in 1..=20 {
        power = matmul(&power, &scaled);
        for i in 0..n {
            for j in 0..n {
                power[i][j] /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                result[i][j] += power[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

pub fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let m = b[0].len();
    let mut c = vec![vec![0.0; m]; n];
    for i in 0..n {
        for k in 0..b.len() {
            let aik = a[i][k];
            if aik != 0.0 {
                for j in 0..m {
                    c[i][j] += aik * b[k][j];
                }
            }
        }
    }
    c
}

/// Composite Gauss–Legendre (10 points) on `panels` equal sub-intervals.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [
        0.148_874_338_981_631_2,
        0.433_395_394_129_247_2,
        0.679_409_568_299_024_4,
        0.865_063_366_688_984_5,
        0.973_906_528_517_171_7,
    ];
    const W: [f64; 5] = [
        0.295_524_224_714_752_9,
        0.269_266_719_309_996_4,
        0.219_086_362_515_982_04,
        0.149_451_349_150_580_6,
        0.066_671_344_308_688_14,
    ];
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for i in 0..5 {
            s += W[i] * (f(mid - half * X[i]) + f(mid + half * X[i]));
        }
        total += s * half;
    }
    total
}

/// `∫_a^b f` on a geometric mesh clustered at `a`, for integrable algebraic endpoint singularities.
pub fn graded_integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, levels: usize) -> f64 {
    let mut total = 0.0;
    let mut hi = b;
    for _ in 0..levels {
        let lo = a + (hi - a) * 0.5;
        total += gauss_legendre(&f, lo, hi, 4);
        hi = lo;
    }
    total
}

/// Smooth bump with unit height: `exp(1 - 1/(1-r²))`, `r = (u-c)/R`.
pub fn bump(u: f64, center: f64, radius: f64) -> f64 {
    let r = (u - center) / radius;
    if r.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

/// `Σ_k p(d + kN)` by direct summation over `|k| ≤ K` plus midpoint-rule integral tails.
pub fn periodized_by_summation(p: impl Fn(i64) -> f64, c: f64, gamma: f64, len: usize, d: usize) -> f64 {
    let n = len as i64;
    let k_max = 4000i64;
    let mut s = 0.0;
    for k in -k_max..=k_max {
        let z = d as i64 + k * n;
        if z != 0 {
            s += p(z);
        }
    }
    // Σ_{k>K} c (kN ± d)^{-1-γ} ≈ ∫_{K+1/2}^∞ c (xN ± d)^{-1-γ} dx.
    let x0 = k_max as f64 + 0.5;
    let nf = n as f64;
    for shift in [d as f64, -(d as f64)] {
        s += c / (gamma * nf) * (x0 * nf + shift).powf(-gamma);
    }
    s
}

/// `ρ(t) = F⁻¹[e^{−tψ} F g]` with `ψ_j = rate Σ_d p_N(d)(1 − cos 2πjd/N)`, by dense DFTs.
pub fn spectral_solution(g: &[f64], kernel: &[f64], rate: f64, t: f64) -> Vec<f64> {
    use std::f64::consts::PI;
    let len = g.len();
    let nf = len as f64;
    let mut out = vec![0.0; len];
    for j in 0..len {
        let w = 2.0 * PI * j as f64 / nf;
        let psi: f64 = rate * (1..len).map(|d| kernel[d] * (1.0 - (w * d as f64).cos())).sum::<f64>();
        let (mut re, mut im) = (0.0, 0.0);
        for (x, v) in g.iter().enumerate() {
            re += v * (w * x as f64).cos();
            im -= v * (w * x as f64).sin();
        }
        let decay = (-t * psi).exp();
        for (x, o) in out.iter_mut().enumerate() {
            *o += decay * (re * (w * x as f64).cos() - im * (w * x as f64).sin()) / nf;
        }
    }
    out
}
