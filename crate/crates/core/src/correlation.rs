//! Correlated Gaussian packets.
//!
//! At fixed coordinate variance, a coordinate–momentum correlation r inflates
//! the momentum variance to σ_p = σ_p0/(1−r²). The leading steepest-descent
//! exponent of a Gaussian packet, −(3/2)(a²/σ_p)^{1/3}, therefore scales as
//! (1−r²)^{1/3}, whereas an effective Planck constant ħ/√(1−r²) would give
//! (1−r²)^{1/2}.

use crate::error::{domain, Result};
use crate::transmission::{ln_t_steepest, BarrierQuery, Method};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatedPacket {
    /// Correlation coefficient σ_xp/√(σ_x σ_p), in [0, 1).
    pub r: f64,
    /// Momentum variance of the uncorrelated packet.
    pub sigma_p0: f64,
    /// a²/σ_p0 (A²/B in reduced units).
    pub a_squared_over_sigma: f64,
}

fn check_r(r: f64) -> Result<()> {
    if !(0.0..1.0).contains(&r) {
        return Err(domain(format!("correlation coefficient must lie in [0, 1), got {r}")));
    }
    Ok(())
}

impl CorrelatedPacket {
    pub fn new(r: f64, sigma_p0: f64, a_squared_over_sigma: f64) -> Result<Self> {
        check_r(r)?;
        for (name, v) in [("sigma_p0", sigma_p0), ("a²/σ", a_squared_over_sigma)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(CorrelatedPacket { r, sigma_p0, a_squared_over_sigma })
    }

    /// a²/σ_p at the packet's correlation.
    pub fn effective_a_squared_over_sigma(&self) -> f64 {
        self.a_squared_over_sigma * (1.0 - self.r * self.r)
    }

    /// Leading exponent of T* for this packet.
    pub fn leading_exponent(&self) -> Result<f64> {
        leading_exponent_gamma2(self.effective_a_squared_over_sigma())
    }
}

/// σ_p = σ_p0/(1−r²).
pub fn sigma_p_of_r(pkt: &CorrelatedPacket) -> Result<f64> {
    check_r(pkt.r)?;
    Ok(pkt.sigma_p0 / (1.0 - pkt.r * pkt.r))
}

/// −(3/2)(a²/σ_p)^{1/3}, the leading exponent of T* for γ = 2.
pub fn leading_exponent_gamma2(a2_over_sigma: f64) -> Result<f64> {
    if !(a2_over_sigma > 0.0) || !a2_over_sigma.is_finite() {
        return Err(domain(format!("a²/σ must be positive and finite, got {a2_over_sigma}")));
    }
    Ok(-1.5 * a2_over_sigma.cbrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingComparison {
    /// (1−r²)^{1/3}: exponent scaling implied by the γ = 2 asymptotics.
    pub cube_root: f64,
    /// (1−r²)^{1/2}: exponent scaling of the effective-Planck-constant rule.
    pub square_root: f64,
    /// ħ_ef/ħ = 1/√(1−r²).
    pub hbar_ratio: f64,
}

pub fn scaling_compare(r: f64) -> Result<ScalingComparison> {
    check_r(r)?;
    let q = 1.0 - r * r;
    Ok(ScalingComparison {
        cube_root: q.cbrt(),
        square_root: q.sqrt(),
        hbar_ratio: 1.0 / q.sqrt(),
    })
}

/// ln T*(A, B/(1−r²), γ=2) / ln T*(A, B, γ=2), which tends to (1−r²)^{1/3}
/// as A²/B grows.
pub fn steepest_exponent_ratio(a: f64, b: f64, r: f64) -> Result<f64> {
    check_r(r)?;
    let q = 1.0 - r * r;
    let correlated = ln_t_steepest(&BarrierQuery::new(a, b / q, 2.0, Method::SteepestDescent)?)?;
    let plain = ln_t_steepest(&BarrierQuery::new(a, b, 2.0, Method::SteepestDescent)?)?;
    Ok(correlated.ln_t() / plain.ln_t())
}
