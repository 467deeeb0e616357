use crate::error::{domain, Result};
use crate::packet::DensityTable;
use crate::specfun::{lse_unchecked, LogMagnitude};

use super::{planewave_validity, Evaluator, TransmissionResult};

/// T = ∫₀^∞ D(y) ρ(y) dy by the trapezoid rule over the table, in log form.
///
/// Nodes at y = 0 or with zero density contribute nothing.
pub fn ln_t_from_table(table: &DensityTable, a: f64) -> Result<TransmissionResult> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain(format!("A must be positive and finite, got {a}")));
    }
    let weights = table.trapezoid_weights();
    let terms = table.points().iter().zip(&weights).filter_map(|(&(y, d), &w)| {
        (y > 0.0 && d > 0.0 && w > 0.0).then(|| (d.ln() - a / y, w))
    });
    let ln_t = lse_unchecked(terms);
    if ln_t == f64::NEG_INFINITY {
        return Err(domain("density table carries no mass on y > 0"));
    }
    let (_, var) = table.mean_variance();
    let (pw_value, pw_ok) = planewave_validity(a, var);
    Ok(TransmissionResult {
        transmission: LogMagnitude::from_ln(ln_t)?.min_one(),
        g: None,
        y_star_numeric: None,
        y_star_approx: None,
        quad_error_ln: None,
        planewave_value: pw_value,
        planewave_ok: pw_ok,
        low_confidence: false,
        ln_t_asymptotic: None,
        method_used: Evaluator::DensityTable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn narrow_triangle() {
        let w = 1e-6;
        let t = DensityTable::new(vec![(1.0 - w / 2.0, 0.0), (1.0, 2.0 / w), (1.0 + w / 2.0, 0.0)]).unwrap();
        let r = ln_t_from_table(&t, 10.0).unwrap();
        assert!((r.ln_t() + 10.0).abs() < 1e-4);
        assert!(r.planewave_ok);
    }

    #[test]
    fn transparent_limit_returns_mass() {
        let t = DensityTable::new(vec![(0.5, 0.5), (1.5, 0.5)]).unwrap();
        let r = ln_t_from_table(&t, 1e-12).unwrap();
        assert!((r.ln_t() - 0.5f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn zero_mass_is_an_error() {
        let t = DensityTable::new(vec![(0.0, 1.0), (1.0, 0.0)]).unwrap();
        assert!(ln_t_from_table(&t, 1.0).is_err());
        let t = DensityTable::new(vec![(0.5, 1.0), (1.0, 1.0)]).unwrap();
        assert!(ln_t_from_table(&t, 0.0).is_err());
    }
}
