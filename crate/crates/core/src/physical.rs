//! Map a particle and a Coulomb barrier Ze²/x onto the reduced barrier
//! strength A = a/p₀ = 2πZα c/v₀, with a = 2πZα m c.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

/// CODATA 2018 values.
pub mod constants {
    /// Fine-structure constant.
    pub const ALPHA: f64 = 7.297_352_569_3e-3;
    /// Speed of light, m/s.
    pub const C: f64 = 299_792_458.0;
    /// Atomic mass constant energy equivalent, eV.
    pub const AMU_EV: f64 = 931.494_102_42e6;
    /// Atomic mass constant, kg.
    pub const AMU_KG: f64 = 1.660_539_066_60e-27;
    /// Deuteron mass in u.
    pub const DEUTERON_AMU: f64 = 2.013_553_212_745;
    /// Electron mass in u.
    pub const ELECTRON_AMU: f64 = 5.485_799_090_65e-4;
}

/// Speeds above this fraction of c are rejected as relativistic.
pub const MAX_V_OVER_C: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleSpec {
    /// Product of the charge numbers.
    pub z: f64,
    /// Particle mass, u.
    pub mass_amu: f64,
    /// Kinetic energy, eV.
    pub kinetic_energy_ev: f64,
    /// When set, the reduced mass with this partner (u) replaces `mass_amu`.
    pub reduced_with_amu: Option<f64>,
}

impl ParticleSpec {
    pub fn new(z: f64, mass_amu: f64, kinetic_energy_ev: f64) -> Result<Self> {
        let spec = ParticleSpec {
            z,
            mass_amu,
            kinetic_energy_ev,
            reduced_with_amu: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_reduced_mass(mut self, partner_amu: f64) -> Result<Self> {
        self.reduced_with_amu = Some(partner_amu);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let mut fields = vec![
            ("Z", self.z),
            ("mass", self.mass_amu),
            ("kinetic energy", self.kinetic_energy_ev),
        ];
        if let Some(m) = self.reduced_with_amu {
            fields.push(("partner mass", m));
        }
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Mass entering the kinematics, u.
    pub fn effective_mass_amu(&self) -> f64 {
        match self.reduced_with_amu {
            Some(m2) => self.mass_amu * m2 / (self.mass_amu + m2),
            None => self.mass_amu,
        }
    }
}

/// Everything derived from a [`ParticleSpec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    /// v₀/c = √(2E/mc²).
    pub v0_over_c: f64,
    /// Reduced barrier strength A.
    pub big_a: f64,
    /// a/(mc) = 2πZα.
    pub a_over_mc: f64,
    /// a in kg·m/s.
    pub a_si: f64,
    /// p₀ = m v₀ in kg·m/s.
    pub p0_si: f64,
    pub relativistic: bool,
}

/// Kinematics without the relativistic guard.
pub fn kinematics(spec: &ParticleSpec) -> Result<Kinematics> {
    spec.validate()?;
    use constants::*;
    let m = spec.effective_mass_amu();
    let v0_over_c = (2.0 * spec.kinetic_energy_ev / (m * AMU_EV)).sqrt();
    let a_over_mc = 2.0 * PI * spec.z * ALPHA;
    let mc = m * AMU_KG * C;
    Ok(Kinematics {
        v0_over_c,
        big_a: a_over_mc / v0_over_c,
        a_over_mc,
        a_si: a_over_mc * mc,
        p0_si: mc * v0_over_c,
        relativistic: v0_over_c > MAX_V_OVER_C,
    })
}

fn guarded(spec: &ParticleSpec) -> Result<Kinematics> {
    let k = kinematics(spec)?;
    if k.relativistic {
        return Err(Error::Regime(format!(
            "v0/c = {:.4} exceeds {MAX_V_OVER_C}; non-relativistic kinematics do not apply",
            k.v0_over_c
        )));
    }
    Ok(k)
}

/// A = 2πZα/(v₀/c).
pub fn big_a(spec: &ParticleSpec) -> Result<f64> {
    Ok(guarded(spec)?.big_a)
}

/// a = 2πZα·mc, returned as (a/(mc), a in kg·m/s).
pub fn little_a(spec: &ParticleSpec) -> Result<(f64, f64)> {
    let k = guarded(spec)?;
    Ok((k.a_over_mc, k.a_si))
}

#[cfg(test)]
mod tests {
    use super::constants::*;
    use super::*;

    fn deuteron(e: f64) -> ParticleSpec {
        ParticleSpec::new(1.0, DEUTERON_AMU, e).unwrap()
    }

    #[test]
    fn deuteron_examples() {
        // v₀/c = √(2·10⁴ / 1.87561e9), A = 2πα/(v₀/c)
        let v = (2.0e4 / (DEUTERON_AMU * AMU_EV)).sqrt();
        let a = 2.0 * PI * ALPHA / v;
        assert!((big_a(&deuteron(1e4)).unwrap() - a).abs() < 1e-12 * a);
        assert!((a - 14.04).abs() < 0.01, "{a}");
        let a1 = big_a(&deuteron(1.0)).unwrap();
        assert!((a1 - 1404.0).abs() < 1.0, "{a1}");
    }

    #[test]
    fn scaling_laws() {
        let a = big_a(&deuteron(400.0)).unwrap();
        assert!((big_a(&deuteron(100.0)).unwrap() / a - 2.0).abs() < 1e-12);
        let z2 = ParticleSpec::new(2.0, DEUTERON_AMU, 400.0).unwrap();
        assert!((big_a(&z2).unwrap() / a - 2.0).abs() < 1e-12);
        let m4 = ParticleSpec::new(1.0, 4.0 * DEUTERON_AMU, 400.0).unwrap();
        assert!((big_a(&m4).unwrap() / a - 2.0).abs() < 1e-12);
    }

    #[test]
    fn little_a_identities() {
        let spec = deuteron(1e4);
        let (a_mc, a_si) = little_a(&spec).unwrap();
        assert!((a_mc - 2.0 * PI * ALPHA).abs() < 1e-15);
        assert!((a_mc - 0.04585).abs() < 1e-5);
        let k = kinematics(&spec).unwrap();
        assert!((a_si / k.p0_si / k.big_a - 1.0).abs() < 1e-12);
        let z2 = ParticleSpec::new(2.0, DEUTERON_AMU, 1e4).unwrap();
        assert_eq!(little_a(&z2).unwrap().1, 2.0 * a_si);
    }

    #[test]
    fn relativistic_guard() {
        let e = ParticleSpec::new(1.0, ELECTRON_AMU, 1e6).unwrap();
        assert!(matches!(big_a(&e), Err(Error::Regime(_))));
        assert!(kinematics(&e).unwrap().relativistic);
        assert!(ParticleSpec::new(0.0, 1.0, 1.0).is_err());
        assert!(ParticleSpec::new(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn reduced_mass_toggle() {
        let bare = deuteron(10.0);
        let reduced = bare.with_reduced_mass(DEUTERON_AMU).unwrap();
        assert!((reduced.effective_mass_amu() - DEUTERON_AMU / 2.0).abs() < 1e-15);
        let ratio = big_a(&reduced).unwrap() / big_a(&bare).unwrap();
        assert!((ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }
}
