//! Reference evaluation of
//!
//! ```text
//! T(A,B) = (𝒩/√B) ∫₀^∞ exp[−A/y − β(|y−1|²/B)^{γ/2}] dy
//! ```
//!
//! The integral is taken in x = ln y, where both tails decay doubly
//! exponentially and the peak keeps its relative width. Knots are placed at
//! y = 1 (a cusp for γ < 2), at every stationary point of the exponent, and on
//! geometric ladders around the peaks, so the adaptive rule starts from
//! panels that already resolve the integrand.

use crate::error::{Error, Result};
use crate::packet::PacketShape;
use crate::quad::{geometric_knots, integrate_ln, AdaptiveOptions};
use crate::specfun::LogMagnitude;

use super::saddle::{saddle_point_approx, saddle_roots};
use super::{g_param, planewave_validity, BarrierQuery, Evaluator, TransmissionResult};

/// Required bound on the estimated absolute error of ln T.
pub const QUAD_TOLERANCE_LN: f64 = 1e-6;
/// Below this B the packet is treated as a plane wave: ln T = −A.
pub const DEGENERATE_B: f64 = 1e-14;

const INTERNAL_TOL: f64 = 1e-10;
const MAX_HALVINGS: u32 = 20;
// The integrand is cut where it falls this many e-folds below its peak.
const TAIL_DROP: f64 = 60.0;

struct Exponent {
    a: f64,
    shape: PacketShape,
}

impl Exponent {
    #[inline]
    fn h(&self, y: f64) -> f64 {
        -self.a / y - self.shape.exponent(y)
    }

    /// The integrand exponent in x = ln y, Jacobian included.
    #[inline]
    fn phi(&self, x: f64) -> f64 {
        let y = x.exp();
        if y == 0.0 || y.is_infinite() {
            return f64::NEG_INFINITY;
        }
        self.h(y) + x
    }

    /// h″(y) for y > 1.
    fn h2(&self, y: f64) -> f64 {
        let (g, beta, b) = (self.shape.gamma(), self.shape.beta(), self.shape.b());
        -2.0 * self.a / (y * y * y) - g * (g - 1.0) * beta * (y - 1.0).powf(g - 2.0) * b.powf(-0.5 * g)
    }
}

/// Move outward from `x0` in `direction` until φ drops `TAIL_DROP` below `peak`.
fn tail_cut(e: &Exponent, x0: f64, direction: f64, start: f64, peak: f64) -> f64 {
    let mut d = start;
    while e.phi(x0 + direction * d) > peak - TAIL_DROP && d < 1e3 {
        d *= 2.0;
    }
    x0 + direction * d
}

pub fn ln_t_quadrature(query: &BarrierQuery) -> Result<TransmissionResult> {
    query.validate()?;
    let (a, b, gamma) = (query.a, query.b, query.gamma);
    let shape = PacketShape::new(gamma, b)?;
    let g = g_param(a, b, gamma)?;
    let (pw_value, pw_ok) = planewave_validity(a, b);
    let roots = saddle_roots(g, gamma)?;
    let y_star_approx = saddle_point_approx(g, gamma).ok();

    let mut result = TransmissionResult {
        transmission: LogMagnitude::ONE,
        g: Some(g),
        y_star_numeric: roots.maximum,
        y_star_approx,
        quad_error_ln: None,
        planewave_value: pw_value,
        planewave_ok: pw_ok,
        low_confidence: false,
        ln_t_asymptotic: None,
        method_used: Evaluator::Quadrature,
    };

    if b < DEGENERATE_B {
        result.transmission = LogMagnitude::from_ln(-a)?;
        result.quad_error_ln = Some(2.0 * a * a * b);
        result.planewave_ok = true;
        return Ok(result);
    }

    let e = Exponent { a, shape };

    // Local maxima of h: the saddle beyond y = 1 and, when h′(1⁺) ≤ 0, the
    // point y = 1 itself.
    let cusp_is_peak = gamma < 1.0 || (gamma == 1.0 && g <= 1.0) || roots.maximum.is_none();
    let mut peaks: Vec<f64> = roots.maximum.into_iter().collect();
    if cusp_is_peak {
        peaks.push(1.0);
    }
    peaks.sort_by(f64::total_cmp);

    // Natural widths in x: the packet scale near y = 1 and the Gaussian width
    // of each smooth peak.
    let mut scale = b.sqrt() * shape.beta().powf(-1.0 / gamma);
    if let Some(ys) = roots.maximum {
        let curv = -e.h2(ys);
        if curv > 0.0 && curv.is_finite() {
            scale = scale.min(1.0 / (curv.sqrt() * ys));
        }
    }
    let base = (0.05 * scale).min(0.05);

    let x_peaks: Vec<f64> = peaks.iter().map(|y| y.ln()).collect();
    let phi_max = x_peaks.iter().map(|&x| e.phi(x)).fold(f64::NEG_INFINITY, f64::max);
    let x_lo = tail_cut(&e, x_peaks[0], -1.0, base, phi_max);
    let x_hi = tail_cut(&e, *x_peaks.last().unwrap(), 1.0, base, phi_max);

    let mut centers = x_peaks.clone();
    centers.push(0.0);
    if let Some(ymin) = roots.minimum {
        centers.push(ymin.ln());
    }
    let knots = geometric_knots(x_lo, x_hi, &centers, base, 4.0);

    let opts = AdaptiveOptions {
        rel_tol: INTERNAL_TOL,
        max_depth: MAX_HALVINGS,
        ..Default::default()
    };
    let integral = integrate_ln(|x| e.phi(x), &knots, &opts);
    let err = integral.rel_error();
    let ln_t = shape.log_n() - 0.5 * b.ln() + integral.ln_value;

    if !ln_t.is_finite() || (!integral.converged && err > QUAD_TOLERANCE_LN) {
        return Err(Error::Convergence {
            message: format!(
                "quadrature for A = {a}, B = {b}, γ = {gamma} stopped at estimated error {err:e} in ln T"
            ),
            best_ln: Some(ln_t),
            error_ln: Some(err),
        });
    }
    result.transmission = LogMagnitude::from_ln(ln_t)?.min_one();
    result.quad_error_ln = Some(err);
    Ok(result)
}
