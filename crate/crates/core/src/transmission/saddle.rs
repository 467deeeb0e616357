//! Stationary points of the integrand exponent
//! h(y) = −A/y − β(|y−1|²/B)^{γ/2}.
//!
//! For y > 1, h′(y) has the sign of G/y² − (y−1)^{γ−1}; the roots are found
//! from the log form g(u) = ln G − 2 ln(1+u) − (γ−1) ln u, u = y − 1, which
//! is strictly decreasing for γ ≥ 1 and unimodal (peak at u = (1−γ)/(1+γ))
//! for γ < 1.

use crate::error::{domain, Error, Result};

/// Largest y − 1 searched for a root.
pub const BRACKET_MAX_OFFSET: f64 = 1e6;

/// The y > 1 roots of G/y² = (y−1)^{γ−1}.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SaddleRoots {
    /// Root where h changes from increasing to decreasing (a local maximum).
    pub maximum: Option<f64>,
    /// Inner root where h has a local minimum; only for γ < 1.
    pub minimum: Option<f64>,
}

fn check(g: f64, gamma: f64) -> Result<()> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(domain(format!("G must be positive and finite, got {g}")));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(domain(format!("γ must be positive and finite, got {gamma}")));
    }
    Ok(())
}

fn ln_gap(ln_g: f64, gamma: f64, s: f64) -> f64 {
    // g at u = e^s
    let u = s.exp();
    ln_g - 2.0 * u.ln_1p() - (gamma - 1.0) * s
}

fn ln_gap_slope(gamma: f64, s: f64) -> f64 {
    let u = s.exp();
    -2.0 * u / (1.0 + u) - (gamma - 1.0)
}

/// Safeguarded Newton on a bracket [lo, hi] with f(lo) > 0 > f(hi) in s = ln u.
fn solve_decreasing<F, D>(f: F, df: D, mut lo: f64, mut hi: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut s = 0.5 * (lo + hi);
    for _ in 0..300 {
        let fs = f(s);
        if fs == 0.0 {
            return s;
        }
        if fs > 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let slope = df(s);
        let newton = s - fs / slope;
        let next = if slope < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - s).abs() <= 4.0 * f64::EPSILON * s.abs().max(1.0) || hi - lo <= f64::EPSILON * s.abs().max(1.0) {
            return next;
        }
        s = next;
    }
    s
}

/// Both stationary points on (1, 1 + 10⁶).
pub fn saddle_roots(g: f64, gamma: f64) -> Result<SaddleRoots> {
    check(g, gamma)?;
    if gamma == 1.0 {
        return Ok(SaddleRoots {
            maximum: (g > 1.0).then(|| g.sqrt()),
            minimum: None,
        });
    }
    let ln_g = g.ln();
    let f = |s: f64| ln_gap(ln_g, gamma, s);
    let df = |s: f64| ln_gap_slope(gamma, s);
    let s_top = BRACKET_MAX_OFFSET.ln();
    if gamma > 1.0 {
        if f(s_top) > 0.0 {
            return Ok(SaddleRoots::default());
        }
        // g → +∞ as u → 0⁺; walk down until the sign flips.
        let mut lo = s_top;
        while f(lo) <= 0.0 {
            lo -= 8.0;
            if lo < f64::MIN_POSITIVE.ln() {
                return Ok(SaddleRoots::default());
            }
        }
        let s = solve_decreasing(f, df, lo, s_top);
        return Ok(SaddleRoots {
            maximum: Some(1.0 + s.exp()),
            minimum: None,
        });
    }
    // γ < 1: g rises to its peak at u_c and then falls.
    let s_peak = ((1.0 - gamma) / (1.0 + gamma)).ln();
    if f(s_peak) <= 0.0 || f(s_top) > 0.0 {
        return Ok(SaddleRoots::default());
    }
    let outer = solve_decreasing(f, df, s_peak, s_top);
    let mut lo = s_peak;
    while f(lo) >= 0.0 {
        lo -= 8.0;
        if lo < f64::MIN_POSITIVE.ln() {
            break;
        }
    }
    let inner = if f(lo) < 0.0 {
        let neg = |s: f64| -f(s);
        let dneg = |s: f64| -df(s);
        Some(1.0 + solve_decreasing(neg, dneg, lo, s_peak).exp())
    } else {
        None
    };
    Ok(SaddleRoots {
        maximum: Some(1.0 + outer.exp()),
        minimum: inner,
    })
}

/// The root y* > 1 of G/y² = (y−1)^{γ−1} at which the integrand peaks.
///
/// For γ = 1 this is √G exactly.
pub fn saddle_point_numeric(g: f64, gamma: f64) -> Result<f64> {
    saddle_roots(g, gamma)?.maximum.ok_or_else(|| Error::Convergence {
        message: format!("no sign change of G/y² − (y−1)^(γ−1) on (1, 1+1e6) for G = {g}, γ = {gamma}"),
        best_ln: None,
        error_ln: None,
    })
}

/// y* ≈ G^{1/(γ+1)} + (γ−1)/(γ+1), the large-G approximation.
pub fn saddle_point_approx(g: f64, gamma: f64) -> Result<f64> {
    check(g, gamma)?;
    Ok(g.powf(1.0 / (gamma + 1.0)) + (gamma - 1.0) / (gamma + 1.0))
}

/// |G/y² − (y−1)^{γ−1}|.
pub fn saddle_residual(g: f64, gamma: f64, y: f64) -> f64 {
    (g / (y * y) - (y - 1.0).powf(gamma - 1.0)).abs()
}
