//! Linearized Gaussian engine.
//!
//! Every map acts on the six quadratures of [`GaussianState`] as
//! `mean → M·mean`, `cov → M·cov·Mᵀ + N` and returns a new state, so
//! trajectories can branch from a shared prefix.

use nalgebra::{Matrix6, Vector6};

use crate::error::{Error, Result};
use crate::model::{Coord, GaussianState, Protocol};

/// Below this variance a coordinate cannot be conditioned on.
pub const MIN_CONDITIONING_VARIANCE: f64 = 1e-14;

/// Which probe pulse interacts with the spin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Probe {
    First,
    Second,
}

impl Probe {
    /// The (S̃_y, S̃_z) coordinates of this pulse.
    pub fn stokes(self) -> (Coord, Coord) {
        match self {
            Probe::First => (Coord::S1Y, Coord::S1Z),
            Probe::Second => (Coord::S2Y, Coord::S2Z),
        }
    }
}

impl GaussianState {
    fn transform(&self, map: &Matrix6<f64>, noise: Option<&Matrix6<f64>>) -> GaussianState {
        let mut cov = map * self.cov * map.transpose();
        if let Some(n) = noise {
            cov += n;
        }
        // keep exact symmetry against rounding in the triple product
        cov = (cov + cov.transpose()) * 0.5;
        GaussianState {
            mean: map * self.mean,
            cov,
        }
    }

    /// Faraday interaction with one probe pulse:
    /// `S̃_y += κ·J̃_z` and `J̃_y += κ·S̃_z`. J̃_z is untouched (QND).
    pub fn apply_faraday(&self, probe: Probe, kappa: f64) -> GaussianState {
        let (sy, sz) = probe.stokes();
        let mut map = Matrix6::identity();
        map[(sy.index(), Coord::JZ.index())] = kappa;
        map[(Coord::JY.index(), sz.index())] = kappa;
        self.transform(&map, None)
    }

    /// Rotation of the spin about `x` by `phi`:
    /// `J̃_y' = J̃_y cos φ − J̃_z sin φ`, `J̃_z' = J̃_z cos φ + J̃_y sin φ`.
    pub fn apply_rotation(&self, phi: f64) -> GaussianState {
        let (s, c) = phi.sin_cos();
        let (y, z) = (Coord::JY.index(), Coord::JZ.index());
        let mut map = Matrix6::identity();
        map[(y, y)] = c;
        map[(y, z)] = -s;
        map[(z, y)] = s;
        map[(z, z)] = c;
        self.transform(&map, None)
    }

    /// Attenuation of the spin toward the vacuum noise 1/2 with transmission
    /// `1 − epsilon`; the spin block becomes `(1−ε)·block + (ε/2)·I`.
    pub fn apply_loss(&self, epsilon: f64) -> GaussianState {
        let t = (1.0 - epsilon).sqrt();
        let (y, z) = (Coord::JY.index(), Coord::JZ.index());
        let mut map = Matrix6::identity();
        map[(y, y)] = t;
        map[(z, z)] = t;
        let mut noise = Matrix6::zeros();
        noise[(y, y)] = epsilon / 2.0;
        noise[(z, z)] = epsilon / 2.0;
        self.transform(&map, Some(&noise))
    }

    /// Gaussian conditioning on the outcome of measuring `coord`.
    ///
    /// The measured coordinate is consumed: its variance becomes 0, its mean
    /// the outcome, and its cross covariances vanish.
    pub fn condition_on(&self, coord: Coord, outcome: f64) -> Result<GaussianState> {
        let c = coord.index();
        let var = self.cov[(c, c)];
        if !(var > MIN_CONDITIONING_VARIANCE) {
            return Err(Error::DegenerateConditioning {
                coord: coord.name(),
                variance: var,
            });
        }
        let gain = self.cov.column(c) / var;
        let mean = self.mean + gain * (outcome - self.mean[c]);
        let mut cov = self.cov - gain * self.cov.row(c);
        cov = (cov + cov.transpose()) * 0.5;
        for i in 0..6 {
            cov[(c, i)] = 0.0;
            cov[(i, c)] = 0.0;
        }
        let mut mean = mean;
        mean[c] = outcome;
        Ok(GaussianState { mean, cov })
    }

    pub fn marginal_variance(&self, coord: Coord) -> f64 {
        let c = coord.index();
        self.cov[(c, c)]
    }

    pub fn marginal_mean(&self, coord: Coord) -> f64 {
        self.mean[coord.index()]
    }

    pub fn covariance(&self, a: Coord, b: Coord) -> f64 {
        self.cov[(a.index(), b.index())]
    }

    /// Variance of `wᵀx`.
    pub fn linear_combination_variance(&self, weights: &Vector6<f64>) -> f64 {
        (weights.transpose() * self.cov * weights)[(0, 0)]
    }
}

/// Unit weights for a linear combination of coordinates.
pub fn weights(terms: &[(Coord, f64)]) -> Vector6<f64> {
    let mut w = Vector6::zeros();
    for &(c, x) in terms {
        w[c.index()] += x;
    }
    w
}

/// Joint state of both readouts before either is measured: first pulse
/// (skipped for the coherent control), loss, rotation by `phi`, loss, second
/// pulse. `loss_epsilon = 0` disables both loss passes.
pub fn protocol_state(kappa: f64, phi: f64, loss_epsilon: f64, protocol: Protocol) -> GaussianState {
    let mut state = GaussianState::fresh();
    if protocol == Protocol::Squeezed {
        state = state.apply_faraday(Probe::First, kappa);
    }
    if loss_epsilon > 0.0 {
        state = state.apply_loss(loss_epsilon);
    }
    state = state.apply_rotation(phi);
    if loss_epsilon > 0.0 {
        state = state.apply_loss(loss_epsilon);
    }
    state.apply_faraday(Probe::Second, kappa)
}

/// Readout variances computed by the engine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolVariances {
    pub v1: f64,
    pub v2: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    /// Variance of the second readout given the first.
    pub v_cond: f64,
    /// Second readout variance of the coherent-state control.
    pub v_coh: f64,
    /// Gain `g` minimizing `V(S̃₂ − g·S̃₁·cos φ)`, `None` when `cos φ = 0`
    /// or the readouts are uncorrelated.
    pub g_opt: Option<f64>,
}

pub fn protocol_variances(kappa: f64, phi: f64, loss_epsilon: f64) -> Result<ProtocolVariances> {
    let joint = protocol_state(kappa, phi, loss_epsilon, Protocol::Squeezed);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let v1 = joint.marginal_variance(Coord::S1Y);
    let v2 = joint.marginal_variance(Coord::S2Y);
    let v_plus = joint.linear_combination_variance(&weights(&[(Coord::S1Y, r), (Coord::S2Y, r)]));
    let v_minus = joint.linear_combination_variance(&weights(&[(Coord::S1Y, r), (Coord::S2Y, -r)]));
    let v_cond = joint.condition_on(Coord::S1Y, 0.0)?.marginal_variance(Coord::S2Y);
    let cross = joint.covariance(Coord::S1Y, Coord::S2Y);
    let cos = phi.cos();
    let g_opt = (cos.abs() > 1e-12 && cross != 0.0).then(|| cross / (cos * v1));
    let v_coh = protocol_state(kappa, phi, loss_epsilon, Protocol::Coherent).marginal_variance(Coord::S2Y);
    Ok(ProtocolVariances {
        v1,
        v2,
        v_plus,
        v_minus,
        v_cond,
        v_coh,
        g_opt,
    })
}
