//! Specular reflection at an air/material interface.
//!
//! Amplitude coefficients for TE and TM polarization, the Rayleigh roughness
//! factor, and the single-bounce reflection loss derived from the mean of the
//! two power coefficients.

use num_complex::Complex64;

use crate::error::{ensure_positive, Error, Result};
use crate::materials::{relative_permittivity, ComplexPermittivity, MaterialParams};
use crate::scene::SPEED_OF_LIGHT;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionCoefficients {
    pub r_te: Complex64,
    pub r_tm: Complex64,
}

impl ReflectionCoefficients {
    pub fn scaled(self, rho: f64) -> Self {
        Self {
            r_te: self.r_te * rho,
            r_tm: self.r_tm * rho,
        }
    }

    /// `(|r_te|^2, |r_tm|^2)`
    pub fn power(&self) -> (f64, f64) {
        (self.r_te.norm_sqr(), self.r_tm.norm_sqr())
    }

    /// Mean of the TE and TM power coefficients.
    pub fn effective_power(&self) -> f64 {
        let (te, tm) = self.power();
        0.5 * (te + tm)
    }
}

fn check_incidence(theta_deg: f64) -> Result<()> {
    if (0.0..90.0).contains(&theta_deg) {
        Ok(())
    } else {
        Err(Error::AngleOutOfRange(theta_deg))
    }
}

pub fn wavelength_m(freq_ghz: f64) -> Result<f64> {
    ensure_positive("frequency", freq_ghz)?;
    Ok(SPEED_OF_LIGHT / (freq_ghz * 1e9))
}

pub fn reflection_coefficients(
    eta: ComplexPermittivity,
    theta_deg: f64,
) -> Result<ReflectionCoefficients> {
    check_incidence(theta_deg)?;
    let theta = theta_deg.to_radians();
    let (sin_t, cos_t) = theta.sin_cos();
    let eta = eta.to_complex();
    let root = (eta - sin_t * sin_t).sqrt();
    let r_te = (cos_t - root) / (cos_t + root);
    let r_tm = (eta * cos_t - root) / (eta * cos_t + root);
    Ok(ReflectionCoefficients { r_te, r_tm })
}

/// Rayleigh roughness factor `exp(-g/2)` with `g = (4*pi*sigma*cos(theta)/lambda)^2`.
pub fn roughness_factor(sigma_r_m: f64, theta_deg: f64, lambda_m: f64) -> Result<f64> {
    ensure_positive("wavelength", lambda_m)?;
    if !(sigma_r_m >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "roughness must be non-negative, got {sigma_r_m}"
        )));
    }
    check_incidence(theta_deg)?;
    let g = (4.0 * std::f64::consts::PI * sigma_r_m * theta_deg.to_radians().cos() / lambda_m)
        .powi(2);
    Ok((-g / 2.0).exp())
}

/// Roughness-corrected coefficients for a material at the given frequency.
pub fn surface_coefficients(
    material: &MaterialParams,
    theta_deg: f64,
    freq_ghz: f64,
) -> Result<ReflectionCoefficients> {
    let eta = relative_permittivity(material, freq_ghz)?;
    let smooth = reflection_coefficients(eta, theta_deg)?;
    let rho = roughness_factor(material.roughness_sigma, theta_deg, wavelength_m(freq_ghz)?)?;
    Ok(smooth.scaled(rho))
}

/// Single-bounce reflection loss in dB.
pub fn reflection_loss(material: &MaterialParams, theta_deg: f64, freq_ghz: f64) -> Result<f64> {
    let coeffs = surface_coefficients(material, theta_deg, freq_ghz)?;
    Ok(-10.0 * coeffs.effective_power().log10())
}
