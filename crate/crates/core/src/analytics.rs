//! Closed-form readout variances of the lossless two-pulse protocol.
//!
//! All quantities are in units of the normalized Stokes variance; the
//! shot-noise floor is 1/2. Only κ² enters, so the sign of κ is irrelevant.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Variance of the first readout, `(1 + κ²)/2`.
pub fn v1(kappa: f64) -> f64 {
    (1.0 + kappa * kappa) / 2.0
}

/// Variance of the second readout, `(1 + κ² + κ⁴ sin²φ)/2`. The `κ⁴` term is
/// the first pulse's back-action rotated into the measured quadrature.
pub fn v2(kappa: f64, phi: f64) -> f64 {
    let k2 = kappa * kappa;
    (1.0 + k2 + k2 * k2 * phi.sin().powi(2)) / 2.0
}

/// Variance of `(S̃₁ ± S̃₂)/√2`: `(2 + κ²(2 ± 2cos φ) + κ⁴ sin²φ)/4`.
pub fn v_pm(kappa: f64, phi: f64, branch: Branch) -> f64 {
    let k2 = kappa * kappa;
    (2.0 + k2 * (2.0 + branch.sign() * 2.0 * phi.cos()) + k2 * k2 * phi.sin().powi(2)) / 4.0
}

/// Gain minimizing `V(S̃₂ − g·S̃₁·cos φ)`, `κ²/(1+κ²)`, independent of φ.
pub fn g_opt(kappa: f64) -> f64 {
    let k2 = kappa * kappa;
    k2 / (1.0 + k2)
}

/// Conditional variance `min_g V(S̃₂ − g·S̃₁·cos φ)`.
pub fn v_cond(kappa: f64, phi: f64) -> f64 {
    let k2 = kappa * kappa;
    let (s, c) = phi.sin_cos();
    (1.0 + k2 + k2 * k2 * s * s - k2 * k2 / (1.0 + k2) * c * c) / 2.0
}

/// Second-readout variance of the coherent spin state (no first pulse).
pub fn v_coh(kappa: f64) -> f64 {
    (1.0 + kappa * kappa) / 2.0
}

/// Atomic noise reduction in dB relative to the coherent spin state:
/// `−10·log₁₀[(V_cond − 1/2)/(V_coh − 1/2)]`. Positive values are squeezing.
///
/// With `loss_epsilon > 0` both variances come from the Gaussian engine with
/// one loss pass per probe pulse.
pub fn squeezing_db(kappa: f64, phi: f64, loss_epsilon: f64) -> Result<f64> {
    if kappa == 0.0 {
        return Err(Error::Undefined(
            "squeezing is 0/0 without coupling (κ = 0)".into(),
        ));
    }
    if !(0.0..1.0).contains(&loss_epsilon) {
        return Err(Error::InvalidInput("loss_epsilon out of [0,1)".into()));
    }
    let (cond, coh) = if loss_epsilon == 0.0 {
        (v_cond(kappa, phi), v_coh(kappa))
    } else {
        let v = gaussian::protocol_variances(kappa, phi, loss_epsilon)?;
        (v.v_cond, v.v_coh)
    };
    Ok(-10.0 * ((cond - 0.5) / (coh - 0.5)).log10())
}

/// One row of the theory curves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub phi: f64,
    pub v1: f64,
    pub v2: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub v_cond: f64,
    pub v_coh: f64,
}

/// All six variances at `phi`; closed forms when lossless, engine otherwise.
pub fn curve_row(kappa: f64, phi: f64, loss_epsilon: f64) -> Result<CurveRow> {
    if loss_epsilon == 0.0 {
        return Ok(CurveRow {
            phi,
            v1: v1(kappa),
            v2: v2(kappa, phi),
            v_plus: v_pm(kappa, phi, Branch::Plus),
            v_minus: v_pm(kappa, phi, Branch::Minus),
            v_cond: v_cond(kappa, phi),
            v_coh: v_coh(kappa),
        });
    }
    let v = gaussian::protocol_variances(kappa, phi, loss_epsilon)?;
    Ok(CurveRow {
        phi,
        v1: v.v1,
        v2: v.v2,
        v_plus: v.v_plus,
        v_minus: v.v_minus,
        v_cond: v.v_cond,
        v_coh: v.v_coh,
    })
}
