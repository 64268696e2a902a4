//! Special functions and distribution kernels used by every test.
//!
//! Everything here is self-contained: the complementary error function,
//! the regularized incomplete gamma pair, the limiting Kolmogorov law, the
//! χ² CDFs with one and two degrees of freedom, and the KS statistic.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

/// Lanczos coefficients for g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `a > 0`.
pub fn ln_gamma(a: f64) -> f64 {
    if a < 0.5 {
        // reflection keeps the Lanczos sum in its accurate range
        return (PI / (PI * a).sin()).ln() - ln_gamma(1.0 - a);
    }
    let a = a - 1.0;
    let mut sum = LANCZOS[0];
    for (i, &coef) in LANCZOS.iter().enumerate().skip(1) {
        sum += coef / (a + i as f64);
    }
    let t = a + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (a + 0.5) * t.ln() - t + sum.ln()
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.5 {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        -erf(-x)
    } else if x < 2.5 {
        erf_series(x)
    } else {
        1.0 - erfc_continued_fraction(x)
    }
}

/// erf(x) = (2/√π) e^{-x²} Σ 2ⁿ x^{2n+1} / (1·3·…·(2n+1)); all terms positive.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..MAX_ITER {
        term *= 2.0 * x2 / (2 * n + 1) as f64;
        sum += term;
        if term < sum * EPS {
            break;
        }
    }
    2.0 / PI.sqrt() * (-x2).exp() * sum
}

/// erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …)))), modified Lentz.
fn erfc_continued_fraction(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = x;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..MAX_ITER {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        d = 1.0 / d;
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    (-x * x).exp() / PI.sqrt() / f
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

fn check_gamma_args(a: f64, x: f64) -> Result<()> {
    if a.is_nan() || a <= 0.0 || !a.is_finite() {
        return Err(Error::Domain(format!("incomplete gamma needs a > 0, got {a}")));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("incomplete gamma needs x >= 0, got {x}")));
    }
    Ok(())
}

/// e^{-x} x^a / Γ(a)
fn gamma_prefactor(a: f64, x: f64) -> f64 {
    (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * gamma_prefactor(a, x)
}

fn gamma_continued_fraction(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    gamma_prefactor(a, x) * h
}

/// Regularized lower incomplete gamma P(a, x).
pub fn igam(a: f64, x: f64) -> Result<f64> {
    check_gamma_args(a, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        Ok(gamma_series(a, x))
    } else {
        Ok(1.0 - gamma_continued_fraction(a, x))
    }
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
pub fn igamc(a: f64, x: f64) -> Result<f64> {
    check_gamma_args(a, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        Ok(1.0 - gamma_series(a, x))
    } else {
        Ok(gamma_continued_fraction(a, x))
    }
}

/// Below this argument the Jacobi-theta form of the Kolmogorov CDF is used.
const KOLMOGOROV_SWITCH: f64 = 1.0;

/// K(y) = √(2π)/y · Σ_{i≥1} exp(-(2i-1)²π²/(8y²)), accurate for small y.
fn kolmogorov_cdf_theta(y: f64) -> f64 {
    let w = PI * PI / (8.0 * y * y);
    let mut sum = 0.0;
    for i in 1..MAX_ITER {
        let odd = (2 * i - 1) as f64;
        let term = (-odd * odd * w).exp();
        sum += term;
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * PI).sqrt() / y * sum
}

/// 2 Σ_{i≥1} (-1)^{i-1} exp(-2i²y²), the upper tail for moderate and large y.
fn kolmogorov_sf_alternating(y: f64) -> f64 {
    let mut sum = 0.0;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        let term = (-2.0 * fi * fi * y * y).exp();
        if i % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
        if term < 1e-17 {
            break;
        }
    }
    2.0 * sum
}

/// Limiting Kolmogorov distribution of the √m-scaled KS statistic:
/// K(y) = 1 - 2 Σ_{i≥1} (-1)^{i-1} exp(-2i²y²).
pub fn kolmogorov_cdf(y: f64) -> f64 {
    if y.is_nan() || y <= 0.0 {
        return 0.0;
    }
    let k = if y < KOLMOGOROV_SWITCH {
        kolmogorov_cdf_theta(y)
    } else {
        1.0 - kolmogorov_sf_alternating(y)
    };
    k.clamp(0.0, 1.0)
}

/// 1 - K(y), evaluated without cancellation in the upper tail.
pub fn kolmogorov_sf(y: f64) -> f64 {
    if y.is_nan() || y <= 0.0 {
        return 1.0;
    }
    let q = if y < KOLMOGOROV_SWITCH {
        1.0 - kolmogorov_cdf_theta(y)
    } else {
        kolmogorov_sf_alternating(y)
    };
    q.clamp(0.0, 1.0)
}

/// χ² CDF with two degrees of freedom: 1 - e^{-y/2}.
pub fn chi2_2_cdf(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else {
        -(-0.5 * y).exp_m1()
    }
}

/// χ² CDF with one degree of freedom, 2Φ(√y) - 1.
pub fn chi2_1_cdf(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else {
        (2.0 * normal_cdf(y.sqrt()) - 1.0).clamp(0.0, 1.0)
    }
}

/// Empirical CDF F_m(y) = #{samples ≤ y} / m.
#[derive(Clone, Debug)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= y) as f64 / self.sorted.len() as f64
    }
}

/// KS statistic of already sorted samples:
/// D = √m · max_i max(i/m - F(y_(i)), F(y_(i)) - (i-1)/m).
pub fn ks_statistic_sorted<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptySample);
    }
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
    let m = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &y) in sorted.iter().enumerate() {
        let f = cdf(y);
        let above = (i + 1) as f64 / m - f;
        let below = f - i as f64 / m;
        sup = sup.max(above).max(below);
    }
    Ok(m.sqrt() * sup)
}

/// Two-sided √m-scaled KS statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    ks_statistic_sorted(&sorted, cdf)
}

/// Asymptotic KS p-value 1 - K(D).
pub fn ks_pvalue(d: f64) -> f64 {
    kolmogorov_sf(d)
}
