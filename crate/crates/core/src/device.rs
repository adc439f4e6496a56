//! Physical device parameters: mirror geometry and material in SI units,
//! mapped to the dimensionless rates used by the node model.
//!
//! Everything here is computed in SI; [`KappaUnits`] converts at the boundary.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Reduced Planck constant [J·s] (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant [J/K] (exact).
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum [m/s] (exact).
pub const C_LIGHT: f64 = 2.997_924_58e8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MirrorGeometry {
    /// Mirror radius r [m].
    pub radius: f64,
    /// Mirror thickness t [m].
    pub thickness: f64,
    /// Cavity length L [m].
    pub cavity_length: f64,
    /// Optical wavelength λ [m].
    pub wavelength: f64,
    pub finesse: f64,
}

impl MirrorGeometry {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("radius", self.radius),
            ("thickness", self.thickness),
            ("cavity_length", self.cavity_length),
            ("wavelength", self.wavelength),
            ("finesse", self.finesse),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be positive and finite, got {v}")));
            }
        }
        if self.wavelength >= self.cavity_length {
            return Err(Error::param("wavelength", "must be shorter than the cavity length"));
        }
        Ok(())
    }

    /// Optical angular frequency ω_λ = 2πc/λ [rad/s].
    pub fn optical_frequency(&self) -> f64 {
        2.0 * PI * C_LIGHT / self.wavelength
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaterialProps {
    /// Mass density [kg/m³].
    pub density: f64,
    /// Longitudinal sound velocity [m/s].
    pub sound_speed: f64,
}

impl MaterialProps {
    pub fn validate(&self) -> Result<()> {
        if !(self.density > 0.0 && self.density.is_finite()) {
            return Err(Error::param("density", format!("must be positive, got {}", self.density)));
        }
        if !(self.sound_speed > 0.0 && self.sound_speed.is_finite()) {
            return Err(Error::param("sound_speed", format!("must be positive, got {}", self.sound_speed)));
        }
        Ok(())
    }
}

/// Operating point needed for the thermal occupation and drive power.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    /// Bath temperature [K].
    pub temperature: f64,
    /// Total cavity decay κ [rad/s] used by the dynamics.
    pub kappa: f64,
    /// Target linearized coupling G [rad/s].
    pub g: f64,
    /// Effective cavity detuning Δ_c [rad/s].
    pub delta_c: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedDeviceParams {
    /// [kg]
    pub m_eff: f64,
    /// [Hz]
    pub nu_m: f64,
    /// [rad/s]
    pub omega_m: f64,
    /// [m]
    pub x_zp: f64,
    /// [rad/s]
    pub g0: f64,
    pub nbar_th: f64,
    /// FWHM [rad/s]
    pub kappa_fwhm_from_finesse: f64,
    /// Input power for the operating point, using the derived `g0` [W].
    pub p_in: f64,
}

/// m_eff = πr²tρ/3.
pub fn effective_mass(g: &MirrorGeometry, m: &MaterialProps) -> f64 {
    PI * g.radius * g.radius * g.thickness * m.density / 3.0
}

/// Fundamental thickness mode ν_m = v_L/(2t) [Hz].
pub fn baw_frequency(g: &MirrorGeometry, m: &MaterialProps) -> f64 {
    m.sound_speed / (2.0 * g.thickness)
}

/// x_zp = √(ħ/(2 m ω_m)) [m].
pub fn zero_point_motion(m_eff: f64, omega_m: f64) -> f64 {
    (HBAR / (2.0 * m_eff * omega_m)).sqrt()
}

/// g0 = ω_λ x_zp / L [rad/s].
pub fn bare_optomech_coupling(g: &MirrorGeometry, x_zp: f64) -> f64 {
    g.optical_frequency() * x_zp / g.cavity_length
}

/// Bose–Einstein occupation at angular frequency `omega_m` and temperature `t` [K].
pub fn thermal_occupation(omega_m: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega_m / (K_B * t)).exp_m1()
}

/// P = (G/g0)²(Δ_c² + κ²) ħω_λ / (2κ) [W]; all rates in rad/s, `wavelength` in m.
pub fn required_drive_power(g: f64, g0: f64, delta_c: f64, kappa: f64, wavelength: f64) -> Result<f64> {
    if !(g0 > 0.0) {
        return Err(Error::param("g0", "must be positive"));
    }
    if !(kappa > 0.0) {
        return Err(Error::param("kappa", "must be positive"));
    }
    let omega_l = 2.0 * PI * C_LIGHT / wavelength;
    Ok((g / g0).powi(2) * (delta_c * delta_c + kappa * kappa) * HBAR * omega_l / (2.0 * kappa))
}

/// FWHM linewidth 2π·FSR/F with FSR = c/2L [rad/s].
pub fn cavity_linewidth_from_finesse(g: &MirrorGeometry) -> f64 {
    2.0 * PI * (C_LIGHT / (2.0 * g.cavity_length)) / g.finesse
}

/// All derived quantities for one device and operating point.
pub fn derive(g: &MirrorGeometry, m: &MaterialProps, op: &OperatingPoint) -> Result<DerivedDeviceParams> {
    g.validate()?;
    m.validate()?;
    if !(op.temperature >= 0.0) {
        return Err(Error::param("temperature", "must be non-negative"));
    }
    let m_eff = effective_mass(g, m);
    let nu_m = baw_frequency(g, m);
    let omega_m = 2.0 * PI * nu_m;
    let x_zp = zero_point_motion(m_eff, omega_m);
    let g0 = bare_optomech_coupling(g, x_zp);
    Ok(DerivedDeviceParams {
        m_eff,
        nu_m,
        omega_m,
        x_zp,
        g0,
        nbar_th: thermal_occupation(omega_m, op.temperature),
        kappa_fwhm_from_finesse: cavity_linewidth_from_finesse(g),
        p_in: required_drive_power(op.g, g0, op.delta_c, op.kappa, g.wavelength)?,
    })
}

/// Conversion between SI angular rates and multiples of κ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KappaUnits {
    /// κ [rad/s].
    pub kappa: f64,
}

impl KappaUnits {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::param("kappa", "must be positive"));
        }
        Ok(Self { kappa })
    }

    pub fn from_linewidth_hz(kappa_over_2pi: f64) -> Result<Self> {
        Self::new(2.0 * PI * kappa_over_2pi)
    }

    /// Rate [rad/s] → κ-units.
    pub fn to_kappa(&self, rate: f64) -> f64 {
        rate / self.kappa
    }

    /// κ-units → rate [rad/s].
    pub fn to_si(&self, x: f64) -> f64 {
        x * self.kappa
    }

    /// Time [s] → 1/κ units.
    pub fn time_to_kappa(&self, t: f64) -> f64 {
        t * self.kappa
    }
}
