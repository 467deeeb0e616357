use std::f64::consts::{LN_2, PI};

use crate::error::{domain, Error, Result};
use crate::packet::PacketShape;
use crate::specfun::{log_bessel_k1, LogMagnitude};

use super::saddle::{saddle_point_approx, saddle_point_numeric};
use super::{g_param, planewave_validity, BarrierQuery, Evaluator, TransmissionResult, LOW_CONFIDENCE_ROOT};

/// The γ = 1 closed form drops |y−1| in favour of y−1; below this A the
/// error from y < 1 is no longer suppressed.
pub const BESSEL_MIN_A: f64 = 10.0;

/// Steepest-descent estimate
///
/// ```text
/// T* ≈ 𝒩 √(2π/(γ+1)) (γβ)^{−3/(2(γ+1))} (B/A²)^{(γ−2)/(4(γ+1))}
///      × exp[−(γβ)^{1/(γ+1)} (A²/B)^{γ/(2(γ+1))} ((γ+1)/γ − G^{−1/(γ+1)})]
/// ```
///
/// Always evaluable; `low_confidence` is set when G^{1/(γ+1)} < 5.
pub fn ln_t_steepest(query: &BarrierQuery) -> Result<TransmissionResult> {
    query.validate()?;
    let (a, b, gamma) = (query.a, query.b, query.gamma);
    let shape = PacketShape::new(gamma, b)?;
    let g = g_param(a, b, gamma)?;
    let gb = gamma * shape.beta();
    let gp1 = gamma + 1.0;
    let ln_a2_over_b = 2.0 * a.ln() - b.ln();

    let ln_prefactor = shape.log_n() + 0.5 * (2.0 * PI / gp1).ln() - 1.5 / gp1 * gb.ln()
        - (gamma - 2.0) / (4.0 * gp1) * ln_a2_over_b;
    let exponent = gb.powf(1.0 / gp1)
        * (gamma / (2.0 * gp1) * ln_a2_over_b).exp()
        * (gp1 / gamma - g.powf(-1.0 / gp1));
    let ln_t = ln_prefactor - exponent;

    let (pw_value, pw_ok) = planewave_validity(a, b);
    Ok(TransmissionResult {
        transmission: LogMagnitude::from_ln(ln_t)?.min_one(),
        g: Some(g),
        y_star_numeric: saddle_point_numeric(g, gamma).ok(),
        y_star_approx: saddle_point_approx(g, gamma).ok(),
        quad_error_ln: None,
        planewave_value: pw_value,
        planewave_ok: pw_ok,
        low_confidence: g.powf(1.0 / gp1) < LOW_CONFIDENCE_ROOT,
        ln_t_asymptotic: None,
        method_used: Evaluator::SteepestDescent,
    })
}

/// Exact γ = 1 transmission with |y−1| replaced by y−1:
///
/// ```text
/// ∫₀^∞ exp(−ξ/y − ηy) dy = 2√(ξ/η) K₁(2√(ξη)),   ξ = A, η = √(2/B)
/// ln T₁ = ln(𝒩/√B) + η + ln 2 + ½ ln(ξ/η) + ln K₁(2√(ξη))
/// ```
///
/// The large-argument form of K₁ is reported as `ln_t_asymptotic`.
/// Requires A ≥ 10 and G > 1 (a saddle beyond y = 1); otherwise the y < 1
/// part of the integrand is not negligible and a regime error is returned.
pub fn ln_t_bessel_gamma1(a: f64, b: f64) -> Result<TransmissionResult> {
    for (name, v) in [("A", a), ("B", b)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(domain(format!("{name} must be positive and finite, got {v}")));
        }
    }
    if a < BESSEL_MIN_A {
        return Err(Error::Regime(format!(
            "γ = 1 closed form needs A ≥ {BESSEL_MIN_A}, got A = {a}"
        )));
    }
    let shape = PacketShape::new(1.0, b)?;
    let g = g_param(a, b, 1.0)?;
    if g <= 1.0 {
        return Err(Error::Regime(format!(
            "γ = 1 closed form needs G > 1 (saddle beyond y = 1), got G = {g}"
        )));
    }
    let xi = a;
    let eta = (2.0 / b).sqrt();
    let z = 2.0 * (xi * eta).sqrt();
    let ln_norm = shape.log_n() - 0.5 * b.ln();
    let ln_t = ln_norm + eta + LN_2 + 0.5 * (xi / eta).ln() + log_bessel_k1(z)?;

    let ln_asym = shape.log_n() + 0.5 * PI.ln() + 0.125 * (a * a / (8.0 * b)).ln()
        - 2.0 * (2.0 * a * a / b).powf(0.25)
        + eta;

    let (pw_value, pw_ok) = planewave_validity(a, b);
    Ok(TransmissionResult {
        transmission: LogMagnitude::from_ln(ln_t)?.min_one(),
        g: Some(g),
        y_star_numeric: Some(g.sqrt()),
        y_star_approx: saddle_point_approx(g, 1.0).ok(),
        quad_error_ln: None,
        planewave_value: pw_value,
        planewave_ok: pw_ok,
        low_confidence: false,
        ln_t_asymptotic: Some(ln_asym),
        method_used: Evaluator::BesselGamma1,
    })
}
