//! Generalized-Gaussian momentum packets in reduced units y = p/p₀.
//!
//! The density is
//!
//! ```text
//! ρ(y) = (𝒩/√B) exp[−β (|y−1|²/B)^{γ/2}]
//! 𝒩 = γ Γ(3/γ)^{1/2} / (2 Γ(1/γ)^{3/2}),   β = [Γ(3/γ)/Γ(1/γ)]^{γ/2}
//! ```
//!
//! normalized over the whole real line with variance B.

use std::io::Read;

use crate::error::{domain, Error, Result};
use crate::quad::{integrate_ln, AdaptiveOptions};
use crate::specfun::log_gamma;

/// Supported shape exponents, `(GAMMA_MIN, GAMMA_MAX]`.
pub const GAMMA_MIN: f64 = 0.1;
pub const GAMMA_MAX: f64 = 10.0;

/// β and ln 𝒩 for a shape exponent γ > 0.
pub fn shape_constants(gamma: f64) -> Result<(f64, f64)> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(domain(format!("shape exponent must be positive and finite, got {gamma}")));
    }
    let lg1 = log_gamma(1.0 / gamma)?;
    let lg3 = log_gamma(3.0 / gamma)?;
    let beta = (0.5 * gamma * (lg3 - lg1)).exp();
    let log_n = gamma.ln() + 0.5 * lg3 - std::f64::consts::LN_2 - 1.5 * lg1;
    Ok((beta, log_n))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketShape {
    gamma: f64,
    b: f64,
    beta: f64,
    log_n: f64,
}

impl PacketShape {
    /// `gamma` in (0.1, 10], `b` (the reduced variance σ_p/p₀²) positive.
    pub fn new(gamma: f64, b: f64) -> Result<Self> {
        if !(gamma > GAMMA_MIN && gamma <= GAMMA_MAX) {
            return Err(domain(format!(
                "shape exponent {gamma} outside the supported range ({GAMMA_MIN}, {GAMMA_MAX}]"
            )));
        }
        if !(b > 0.0) || !b.is_finite() {
            return Err(domain(format!("variance B must be positive and finite, got {b}")));
        }
        let (beta, log_n) = shape_constants(gamma)?;
        Ok(PacketShape { gamma, b, beta, log_n })
    }

    /// A copy with β scaled by `factor`, leaving 𝒩 alone. The result is no
    /// longer a normalized member of the family; used to check that the
    /// moment identities are sensitive to the constants.
    pub fn with_beta_scaled(self, factor: f64) -> Self {
        PacketShape {
            beta: self.beta * factor,
            ..self
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn log_n(&self) -> f64 {
        self.log_n
    }

    /// β (|y−1|²/B)^{γ/2}, the packet's contribution to the integrand exponent.
    #[inline]
    pub fn exponent(&self, y: f64) -> f64 {
        self.beta * ((y - 1.0).abs() / self.b.sqrt()).powf(self.gamma)
    }

    /// ln ρ(y) for any real y.
    pub fn log_density(&self, y: f64) -> f64 {
        self.log_n - 0.5 * self.b.ln() - self.exponent(y)
    }

    /// Central moment ⟨(y−1)^k⟩ of the density over the real line, by
    /// adaptive quadrature on each half-line. `k` must be 0, 1, 2 or 4.
    pub fn central_moment(&self, k: u32) -> Result<f64> {
        if !matches!(k, 0 | 1 | 2 | 4) {
            return Err(domain(format!("central moment of order {k} is not supported")));
        }
        let right = self.half_line_moment(k, 1.0)?;
        let left = self.half_line_moment(k, -1.0)?;
        Ok(if k % 2 == 0 { right + left } else { right - left })
    }

    /// ∫₀^∞ u^k ρ(1 ± u) du, with u = √B·s.
    fn half_line_moment(&self, k: u32, side: f64) -> Result<f64> {
        let kf = k as f64;
        let (g, beta) = (self.gamma, self.beta);
        let sqrt_b = self.b.sqrt();
        let opts = AdaptiveOptions {
            rel_tol: 1e-12,
            max_depth: 60,
            ..Default::default()
        };
        // Integrate out to where the packet exponent reaches 800.
        let r = if g >= 1.0 {
            let s_max = (800.0 / beta).powf(1.0 / g);
            let ln_f = |s: f64| kf * s.ln() + self.log_density(1.0 + side * sqrt_b * s);
            integrate_ln(ln_f, &halving_knots(s_max), &opts)
        } else {
            // t = s^γ turns the stretched tail into a plain exponential.
            let t_max = 800.0 / beta;
            let ln_f = |t: f64| {
                let s = t.powf(1.0 / g);
                ((kf + 1.0) / g - 1.0) * t.ln() - g.ln() + self.log_density(1.0 + side * sqrt_b * s)
            };
            integrate_ln(ln_f, &halving_knots(t_max), &opts)
        };
        if !r.converged {
            return Err(Error::Convergence {
                message: format!("moment quadrature (k = {k}, γ = {g}) did not converge"),
                best_ln: Some(r.ln_value),
                error_ln: Some(r.rel_error()),
            });
        }
        Ok((0.5 * (kf + 1.0) * self.b.ln() + r.ln_value).exp())
    }
}

fn halving_knots(top: f64) -> Vec<f64> {
    let mut knots: Vec<f64> = (0..40).map(|j| top * 0.5f64.powi(j)).collect();
    knots.push(0.0);
    knots.reverse();
    knots
}

/// Tabulated momentum density in reduced units.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    points: Vec<(f64, f64)>,
}

/// Allowed excess of the trapezoid mass over one.
pub const TABLE_MASS_SLACK: f64 = 1e-6;

impl DensityTable {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Format(format!(
                "density table needs at least two points, got {}",
                points.len()
            )));
        }
        for (i, &(y, d)) in points.iter().enumerate() {
            if !y.is_finite() || y < 0.0 {
                return Err(Error::Format(format!("point {i}: y = {y} must be finite and ≥ 0")));
            }
            if !d.is_finite() || d < 0.0 {
                return Err(Error::Format(format!("point {i}: density = {d} must be finite and ≥ 0")));
            }
        }
        if let Some(i) = points.windows(2).position(|w| w[1].0 <= w[0].0) {
            return Err(Error::Format(format!(
                "y must be strictly increasing (point {} has y = {} after {})",
                i + 1,
                points[i + 1].0,
                points[i].0
            )));
        }
        let table = DensityTable { points };
        let mass = table.mass();
        if mass > 1.0 + TABLE_MASS_SLACK {
            return Err(Error::Format(format!("trapezoid mass {mass} exceeds one")));
        }
        Ok(table)
    }

    /// Parse the `y,density` CSV format. `#` lines are comments.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .has_headers(false)
            .flexible(true)
            .from_reader(reader);
        let mut records = rdr.records();
        let header = match records.next() {
            Some(rec) => rec.map_err(|e| Error::Format(format!("line 1: {e}")))?,
            None => return Err(Error::Format("line 1: empty file, expected header `y,density`".into())),
        };
        if header.len() != 2 || &header[0] != "y" || &header[1] != "density" {
            let line = header.position().map_or(1, |p| p.line());
            return Err(Error::Format(format!(
                "line {line}: expected header `y,density`, found `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut points = Vec::new();
        for rec in records {
            let rec = rec.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                Error::Format(format!("line {line}: {e}"))
            })?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            if rec.len() != 2 {
                return Err(Error::Format(format!("line {line}: expected 2 fields, found {}", rec.len())));
            }
            let parse = |s: &str, what: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Format(format!("line {line}: cannot parse {what} `{s}`")))
            };
            let y = parse(&rec[0], "y")?;
            let d = parse(&rec[1], "density")?;
            if let Some(&(prev, _)) = points.last() {
                if y <= prev {
                    return Err(Error::Format(format!(
                        "line {line}: y = {y} is not greater than the previous {prev}"
                    )));
                }
            }
            points.push((y, d));
        }
        DensityTable::new(points)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Trapezoid weights of the nodes.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.points[i].0 - self.points[i - 1].0 } else { 0.0 };
                let right = if i + 1 < n { self.points[i + 1].0 - self.points[i].0 } else { 0.0 };
                0.5 * (left + right)
            })
            .collect()
    }

    pub fn mass(&self) -> f64 {
        self.trapezoid_weights()
            .iter()
            .zip(&self.points)
            .map(|(w, (_, d))| w * d)
            .sum()
    }

    /// Trapezoid mean and variance of y under the normalized table.
    pub fn mean_variance(&self) -> (f64, f64) {
        let w = self.trapezoid_weights();
        let mass = self.mass();
        if mass <= 0.0 {
            return (f64::NAN, f64::NAN);
        }
        let mean = w.iter().zip(&self.points).map(|(w, (y, d))| w * d * y).sum::<f64>() / mass;
        let var = w
            .iter()
            .zip(&self.points)
            .map(|(w, (y, d))| w * d * (y - mean).powi(2))
            .sum::<f64>()
            / mass;
        (mean, var)
    }
}
