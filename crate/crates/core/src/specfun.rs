//! Special functions and log-domain arithmetic.
//!
//! Transmission probabilities at high barriers sit far below the smallest
//! positive `f64` (e^-700 and beyond), so magnitudes are carried as natural
//! logarithms and every sum goes through [`log_sum_exp`].

use std::f64::consts::{LN_10, PI};
use std::fmt;
use std::ops::{Div, Mul};

use crate::error::{domain, Result};

/// A strictly positive magnitude stored as its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogMagnitude(f64);

impl LogMagnitude {
    pub const ONE: LogMagnitude = LogMagnitude(0.0);

    pub fn from_ln(ln_value: f64) -> Result<Self> {
        if ln_value.is_finite() {
            Ok(LogMagnitude(ln_value))
        } else {
            Err(domain(format!("log-magnitude must be finite, got {ln_value}")))
        }
    }

    pub fn from_value(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(LogMagnitude(value.ln()))
        } else {
            Err(domain(format!("magnitude must be positive and finite, got {value}")))
        }
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn log10(self) -> f64 {
        self.0 / LN_10
    }

    /// The plain value. Underflows to zero below ~e^-745; use only for display.
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn powf(self, exponent: f64) -> Self {
        LogMagnitude(self.0 * exponent)
    }

    /// Clamp to at most one, for quantities bounded as probabilities.
    pub fn min_one(self) -> Self {
        LogMagnitude(self.0.min(0.0))
    }
}

impl Mul for LogMagnitude {
    type Output = LogMagnitude;
    fn mul(self, rhs: LogMagnitude) -> LogMagnitude {
        LogMagnitude(self.0 + rhs.0)
    }
}

impl Div for LogMagnitude {
    type Output = LogMagnitude;
    fn div(self, rhs: LogMagnitude) -> LogMagnitude {
        LogMagnitude(self.0 - rhs.0)
    }
}

impl fmt::Display for LogMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({})", self.0)
    }
}

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of the Gamma function for positive arguments.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("log_gamma requires a finite positive argument, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum away from its pole region.
        return ln_gamma_pos(x + 1.0) - x.ln();
    }
    let z = x - 1.0;
    let mut series = LANCZOS_COEFFS[0];
    for (k, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + series.ln()
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Argument below which the power series is used.
pub const K1_SERIES_MAX: f64 = 2.0;
/// Argument above which the asymptotic expansion is used; in between, the
/// Steed continued fraction.
pub const K1_ASYMPTOTIC_MIN: f64 = 25.0;

/// Natural logarithm of the Macdonald function K₁(z), z > 0.
///
/// Never forms `exp(-z)`, so arguments in the thousands are fine.
pub fn log_bessel_k1(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain(format!("log_bessel_k1 requires a finite positive argument, got {z}")));
    }
    Ok(if z <= K1_SERIES_MAX {
        k1_series(z).ln()
    } else if z < K1_ASYMPTOTIC_MIN {
        ln_k1_continued_fraction(z)
    } else {
        ln_k1_asymptotic(z)
    })
}

/// K₁(z) = 1/z + (z/2) Σ t_k [ln(z/2) − (ψ(k+1) + ψ(k+2))/2],
/// t_k = (z²/4)^k / (k!(k+1)!).
fn k1_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let ln_half = (0.5 * z).ln();
    let mut t = 1.0;
    // ψ(1) = -γ, ψ(2) = 1 - γ
    let mut psi_k1 = -EULER_GAMMA;
    let mut psi_k2 = 1.0 - EULER_GAMMA;
    let mut sum = 0.0;
    for k in 0..60 {
        let term = t * (ln_half - 0.5 * (psi_k1 + psi_k2));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > 1 {
            break;
        }
        let kf = k as f64;
        t *= q / ((kf + 1.0) * (kf + 2.0));
        psi_k1 += 1.0 / (kf + 1.0);
        psi_k2 += 1.0 / (kf + 2.0);
    }
    1.0 / z + 0.5 * z * sum
}

/// Steed's evaluation of the second continued fraction (Temme) for K₀ and K₁,
/// kept in log form.
fn ln_k1_continued_fraction(x: f64) -> f64 {
    const EPS: f64 = 1e-16;
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    // K₀ = sqrt(π/2x) e^{-x} / s, K₁ = K₀ (x + 1/2 - h) / x
    0.5 * (PI / (2.0 * x)).ln() - x - s.ln() + ((x + 0.5 - h) / x).ln()
}

/// K₁(z) ~ sqrt(π/2z) e^{-z} [1 + 3/(8z) − 15/(128z²) + …], summed to the
/// smallest term.
fn ln_k1_asymptotic(z: f64) -> f64 {
    let mu = 4.0;
    let mut term = 1.0_f64;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * z);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum {
            break;
        }
    }
    0.5 * (PI / (2.0 * z)).ln() - z + sum.ln()
}

/// ln Σ wᵢ·exp(termᵢ), shifted by the largest term.
///
/// Terms equal to `-inf` contribute nothing; if every term is `-inf` the
/// result is `-inf`.
pub fn log_sum_exp(terms: &[f64], weights: &[f64]) -> Result<f64> {
    if terms.is_empty() {
        return Err(domain("log_sum_exp of an empty list"));
    }
    if terms.len() != weights.len() {
        return Err(domain(format!(
            "log_sum_exp: {} terms but {} weights",
            terms.len(),
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return Err(domain(format!("log_sum_exp weights must be positive, got {w}")));
    }
    if terms.iter().any(|t| t.is_nan() || *t == f64::INFINITY) {
        return Err(domain("log_sum_exp terms must be finite or -inf"));
    }
    Ok(lse_unchecked(terms.iter().copied().zip(weights.iter().copied())))
}

/// [`log_sum_exp`] over (term, weight) pairs without validation.
pub(crate) fn lse_unchecked<I>(pairs: I) -> f64
where
    I: Iterator<Item = (f64, f64)> + Clone,
{
    let (imax, max) = pairs
        .clone()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, (t, _))| if t > acc.1 { (i, t) } else { acc });
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    // The leading term contributes its weight exactly; ln_1p keeps the rest.
    let mut lead_weight = 0.0;
    let mut rest = 0.0;
    for (i, (t, w)) in pairs.enumerate() {
        if i == imax {
            lead_weight = w;
        } else {
            rest += w * (t - max).exp();
        }
    }
    max + ((lead_weight - 1.0) + rest).ln_1p()
}
