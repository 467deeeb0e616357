//! Transmission probability of a momentum packet through the Coulomb barrier
//! D(y) = exp(−A/y), in reduced momentum y = p/p₀.
//!
//! Four evaluators share one result type:
//!
//! * [`ln_t_quadrature`]: adaptive quadrature of the packet average, the reference value;
//! * [`ln_t_steepest`]: closed-form steepest-descent estimate T*;
//! * [`ln_t_bessel_gamma1`]: exact K₁ closed form for γ = 1 packets;
//! * [`ln_t_from_table`]: trapezoid average over a tabulated density.

mod closed_form;
mod quadrature;
pub mod saddle;
mod table;

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::packet::{shape_constants, PacketShape};
use crate::specfun::LogMagnitude;

pub use closed_form::{ln_t_bessel_gamma1, ln_t_steepest, BESSEL_MIN_A};
pub use quadrature::{ln_t_quadrature, DEGENERATE_B, QUAD_TOLERANCE_LN};
pub use saddle::{saddle_point_approx, saddle_point_numeric, SaddleRoots};
pub use table::ln_t_from_table;

/// A√B below this counts as the plane-wave regime.
pub const PLANEWAVE_THRESHOLD: f64 = 0.1;
/// Steepest descent is flagged when G^{1/(γ+1)} falls below this.
pub const LOW_CONFIDENCE_ROOT: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Quadrature,
    SteepestDescent,
    BesselGamma1,
    Auto,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::SteepestDescent => "steepest_descent",
            Method::BesselGamma1 => "bessel_gamma1",
            Method::Auto => "auto",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quad" | "quadrature" => Ok(Method::Quadrature),
            "saddle" | "steepest" | "steepest_descent" => Ok(Method::SteepestDescent),
            "bessel" | "bessel_gamma1" => Ok(Method::BesselGamma1),
            "auto" => Ok(Method::Auto),
            other => Err(domain(format!("unknown method `{other}`"))),
        }
    }
}

/// The evaluator that actually produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Evaluator {
    Quadrature,
    SteepestDescent,
    BesselGamma1,
    DensityTable,
}

impl Evaluator {
    pub fn as_str(self) -> &'static str {
        match self {
            Evaluator::Quadrature => "quadrature",
            Evaluator::SteepestDescent => "steepest_descent",
            Evaluator::BesselGamma1 => "bessel_gamma1",
            Evaluator::DensityTable => "density_table",
        }
    }
}

impl fmt::Display for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Evaluation request in reduced parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierQuery {
    /// Barrier strength A = a/p₀.
    pub a: f64,
    /// Momentum variance B = σ_p/p₀².
    pub b: f64,
    pub gamma: f64,
    pub method: Method,
}

impl BarrierQuery {
    pub fn new(a: f64, b: f64, gamma: f64, method: Method) -> Result<Self> {
        let q = BarrierQuery { a, b, gamma, method };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("A", self.a), ("B", self.b), ("gamma", self.gamma)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        // range check on γ
        PacketShape::new(self.gamma, self.b)?;
        if self.method == Method::BesselGamma1 && self.gamma != 1.0 {
            return Err(domain(format!("bessel_gamma1 requires gamma = 1, got {}", self.gamma)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionResult {
    pub transmission: LogMagnitude,
    /// G = A B^{γ/2}/(γβ); absent for tabulated densities.
    pub g: Option<f64>,
    pub y_star_numeric: Option<f64>,
    pub y_star_approx: Option<f64>,
    /// Estimated absolute error of ln T (quadrature only).
    pub quad_error_ln: Option<f64>,
    /// A√B, the plane-wave validity measure.
    pub planewave_value: f64,
    pub planewave_ok: bool,
    /// Steepest descent outside its regime (G^{1/(γ+1)} < 5).
    pub low_confidence: bool,
    /// The large-argument K₁ form of the γ = 1 closed form, for comparison.
    pub ln_t_asymptotic: Option<f64>,
    pub method_used: Evaluator,
}

impl TransmissionResult {
    pub fn ln_t(&self) -> f64 {
        self.transmission.ln()
    }

    pub fn log10_t(&self) -> f64 {
        self.transmission.log10()
    }
}

/// ln D = −A/y for a right-moving plane wave.
pub fn plane_wave_log_d(a: f64, y: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain(format!("A must be positive and finite, got {a}")));
    }
    if !(y > 0.0) || y.is_nan() {
        return Err(domain(format!("barrier kernel is defined for y > 0, got {y}")));
    }
    Ok(-a / y)
}

/// (A√B, A√B < 0.1).
pub fn planewave_validity(a: f64, b: f64) -> (f64, bool) {
    let value = a * b.sqrt();
    (value, value < PLANEWAVE_THRESHOLD)
}

/// G = A B^{γ/2}/(γβ).
pub fn g_param(a: f64, b: f64, gamma: f64) -> Result<f64> {
    for (name, v) in [("A", a), ("B", b)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(domain(format!("{name} must be positive and finite, got {v}")));
        }
    }
    let (beta, _) = shape_constants(gamma)?;
    Ok(a * b.powf(0.5 * gamma) / (gamma * beta))
}

/// Which evaluator `Method::Auto` picks: the K₁ closed form when γ = 1,
/// A ≥ 10 and G > 1, quadrature otherwise.
pub fn resolve_auto(q: &BarrierQuery) -> Result<Method> {
    if q.gamma == 1.0 && q.a >= BESSEL_MIN_A && g_param(q.a, q.b, 1.0)? > 1.0 {
        Ok(Method::BesselGamma1)
    } else {
        Ok(Method::Quadrature)
    }
}

/// Dispatch on `query.method`.
pub fn evaluate(query: &BarrierQuery) -> Result<TransmissionResult> {
    query.validate()?;
    let method = match query.method {
        Method::Auto => resolve_auto(query)?,
        m => m,
    };
    match method {
        Method::Quadrature => ln_t_quadrature(query),
        Method::SteepestDescent => ln_t_steepest(query),
        Method::BesselGamma1 => ln_t_bessel_gamma1(query.a, query.b),
        Method::Auto => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        assert_eq!(plane_wave_log_d(700.0, 1.0).unwrap(), -700.0);
        assert_eq!(plane_wave_log_d(10.0, 2.0).unwrap(), -5.0);
        let far = plane_wave_log_d(700.0, 1e300).unwrap();
        assert!(far < 0.0 && far > -1e-290);
        assert!(plane_wave_log_d(1.0, 0.0).is_err());
        assert!(plane_wave_log_d(1.0, -1.0).is_err());
    }

    #[test]
    fn validity_examples() {
        let (v, ok) = planewave_validity(10.0, 1e-6);
        assert!((v - 0.01).abs() < 1e-15 && ok);
        let (v, ok) = planewave_validity(700.0, 1e-3);
        assert!((v - 22.135943621178654).abs() < 1e-10 && !ok);
        let (v, ok) = planewave_validity(700.0, 1e-8);
        assert!((v - 0.07).abs() < 1e-14 && ok);
    }

    #[test]
    fn g_examples() {
        assert!((g_param(700.0, 0.1, 2.0).unwrap() - 70.0).abs() < 1e-12);
        assert!((g_param(1.0, 1.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        let g = g_param(700.0, 1e-4, 1.0).unwrap();
        assert!((g - 7.0 / std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!((g - 4.9497).abs() < 1e-4);
    }

    #[test]
    fn query_validation() {
        assert!(BarrierQuery::new(0.0, 1.0, 2.0, Method::Quadrature).is_err());
        assert!(BarrierQuery::new(1.0, f64::NAN, 2.0, Method::Quadrature).is_err());
        assert!(BarrierQuery::new(1.0, 1.0, 2.0, Method::BesselGamma1).is_err());
        assert!(BarrierQuery::new(1.0, 1.0, 11.0, Method::Quadrature).is_err());
        assert!(BarrierQuery::new(1.0, 1.0, 1.0, Method::BesselGamma1).is_ok());
    }

    #[test]
    fn auto_dispatch() {
        let q = BarrierQuery::new(700.0, 1e-4, 1.0, Method::Auto).unwrap();
        assert_eq!(evaluate(&q).unwrap().method_used, Evaluator::BesselGamma1);
        let q = BarrierQuery::new(700.0, 1e-4, 2.0, Method::Auto).unwrap();
        assert_eq!(evaluate(&q).unwrap().method_used, Evaluator::Quadrature);
        let q = BarrierQuery::new(5.0, 1e-2, 1.0, Method::Auto).unwrap();
        assert_eq!(evaluate(&q).unwrap().method_used, Evaluator::Quadrature);
        // γ = 1 with G < 1: no saddle beyond y = 1, the closed form does not apply
        let q = BarrierQuery::new(10.0, 1e-8, 1.0, Method::Auto).unwrap();
        assert_eq!(evaluate(&q).unwrap().method_used, Evaluator::Quadrature);
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Quadrature, Method::SteepestDescent, Method::BesselGamma1, Method::Auto] {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert_eq!("quad".parse::<Method>().unwrap(), Method::Quadrature);
        assert_eq!("saddle".parse::<Method>().unwrap(), Method::SteepestDescent);
        assert!("simpson".parse::<Method>().is_err());
    }
}
