//! Interaction strength κ from atomic and optical constants, and the
//! conversion of fictitious-field pulse widths into rotation angles.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{PhysicalParams, RotationPulse};

/// Signed Faraday coupling
///
/// ```text
/// κ = Γσ₀√(SJ)/(3πw₀²) · [ δ/(δ² + (Γ/2)²) − (δ+δ₀)/((δ+δ₀)² + (Γ/2)²) ]
/// ```
///
/// with `S = N_L/2` and `J = N_A/2`. The two dispersive terms come from the
/// F′=1/2 and F′=3/2 excited states; κ vanishes when they coincide (δ₀ = 0)
/// and is largest in magnitude with the probe halfway between them.
pub fn kappa_from_physics(p: &PhysicalParams) -> Result<f64> {
    p.validate()?;
    let half_width_sq = (p.gamma / 2.0).powi(2);
    let near = p.delta;
    let far = p.delta + p.delta0;
    let near_den = near * near + half_width_sq;
    let far_den = far * far + half_width_sq;
    if near_den == 0.0 || far_den == 0.0 {
        return Err(Error::InvalidInput("Lorentzian denominator vanishes".into()));
    }
    let prefactor =
        p.gamma * p.sigma0 * (p.stokes_length() * p.spin_length()).sqrt() / (3.0 * PI * p.w0 * p.w0);
    Ok(prefactor * (near / near_den - far / far_den))
}

/// Rotation angle produced by a fictitious-field pulse (linear in width).
pub fn rotation_angle(pulse: &RotationPulse) -> f64 {
    pulse.angle()
}

/// Pulse width needed to reach `phi` at `rate` rad/s.
pub fn width_for_angle(phi: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0) {
        return Err(Error::InvalidInput("rate must be > 0".into()));
    }
    Ok(phi / rate)
}
