//! Domain types shared across the crate.

use std::f64::consts::PI;

use nalgebra::{Matrix6, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Converts a frequency given as `2π × f` with `f` in MHz to rad/s.
pub fn two_pi_mhz(f_mhz: f64) -> f64 {
    2.0 * PI * f_mhz * 1e6
}

/// Converts a frequency given as `2π × f` with `f` in kHz to rad/s.
pub fn two_pi_khz(f_khz: f64) -> f64 {
    2.0 * PI * f_khz * 1e3
}

/// Rotation rate of the fictitious-field pulse observed in the ¹⁷¹Yb setup,
/// in rad/s (0.4 rad/µs).
pub const YB171_ROTATION_RATE: f64 = 0.4e6;

/// Linewidth of the ¹S₀ ↔ ³P₁ line used for the fictitious field (rad/s).
/// Informational only; nothing is derived from it.
pub const YB171_FM_LINEWIDTH: f64 = 2.0 * PI * 182e3;

/// Hyperfine splitting of the ³P₁ level (rad/s). Informational only.
pub const YB171_FM_HYPERFINE: f64 = 2.0 * PI * 5.9e9;

/// Atomic and optical constants that determine the coupling κ.
///
/// All angular frequencies are in rad/s; use [`two_pi_mhz`] to enter values
/// quoted as `2π × MHz`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    /// Natural full linewidth Γ.
    pub gamma: f64,
    /// Photon absorption cross section σ₀ (m²).
    pub sigma0: f64,
    /// Probe beam waist w₀ (m).
    pub w0: f64,
    /// Probe detuning δ, may be negative.
    pub delta: f64,
    /// Excited-state hyperfine splitting δ₀.
    pub delta0: f64,
    /// Number of atoms N_A.
    pub n_atoms: f64,
    /// Mean photon number per probe pulse N_L.
    pub n_photons: f64,
    /// Atomic loss parameter ε_A = rt/2.
    pub epsilon_a: f64,
}

impl PhysicalParams {
    /// The ¹⁷¹Yb parameter set: 1.0×10⁶ atoms, 2.6×10⁶ photons per pulse,
    /// probe detuned by −2π×160 MHz from the F′=1/2 line.
    pub fn yb171() -> Self {
        Self {
            gamma: two_pi_mhz(29.0),
            sigma0: 7.6e-14,
            w0: 61e-6,
            delta: two_pi_mhz(-160.0),
            delta0: two_pi_mhz(320.0),
            n_atoms: 1.0e6,
            n_photons: 2.6e6,
            epsilon_a: 6.7e-2,
        }
    }

    /// Collective spin length J = N_A / 2.
    pub fn spin_length(&self) -> f64 {
        self.n_atoms / 2.0
    }

    /// Stokes vector length S = N_L / 2.
    pub fn stokes_length(&self) -> f64 {
        self.n_photons / 2.0
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let fields = [
            ("gamma", self.gamma),
            ("sigma0", self.sigma0),
            ("w0", self.w0),
            ("delta", self.delta),
            ("delta0", self.delta0),
            ("n_atoms", self.n_atoms),
            ("n_photons", self.n_photons),
            ("epsilon_a", self.epsilon_a),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                out.push(format!("{name} must be finite"));
            }
        }
        if !(self.gamma > 0.0) {
            out.push("gamma must be > 0".into());
        }
        if !(self.sigma0 > 0.0) {
            out.push("sigma0 must be > 0".into());
        }
        if !(self.w0 > 0.0) {
            out.push("w0 must be > 0".into());
        }
        if !(self.n_atoms >= 1.0) {
            out.push("n_atoms must be ≥ 1".into());
        }
        if !(self.n_photons >= 1.0) {
            out.push("n_photons must be ≥ 1".into());
        }
        if !(0.0..0.5).contains(&self.epsilon_a) {
            out.push("epsilon_a out of [0,1/2)".into());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        into_result(self.violations())
    }
}

/// A fictitious-magnetic-field pulse rotating the spin about `x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationPulse {
    /// Rotation rate in rad/s.
    pub rate: f64,
    /// Pulse duration in s.
    pub width: f64,
}

impl RotationPulse {
    pub fn new(rate: f64, width: f64) -> Result<Self> {
        let pulse = Self { rate, width };
        into_result(pulse.violations())?;
        Ok(pulse)
    }

    /// A pulse of `width_us` microseconds at `rate_per_us` rad/µs.
    pub fn from_micros(rate_per_us: f64, width_us: f64) -> Result<Self> {
        Self::new(rate_per_us * 1e6, width_us * 1e-6)
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.rate >= 0.0 && self.rate.is_finite()) {
            out.push("rate must be finite and ≥ 0".into());
        }
        if !(self.width >= 0.0 && self.width.is_finite()) {
            out.push("width must be finite and ≥ 0".into());
        }
        out
    }

    /// Rotation angle φ = rate × width.
    pub fn angle(&self) -> f64 {
        self.rate * self.width
    }
}

/// Index of a quadrature in a [`GaussianState`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coord {
    /// Normalized atomic spin J̃_y.
    JY = 0,
    /// Normalized atomic spin J̃_z, the QND variable.
    JZ = 1,
    /// First probe Stokes S̃₁_y (the readout quadrature).
    S1Y = 2,
    /// First probe Stokes S̃₁_z.
    S1Z = 3,
    /// Second probe Stokes S̃₂_y.
    S2Y = 4,
    /// Second probe Stokes S̃₂_z.
    S2Z = 5,
}

impl Coord {
    pub const ALL: [Coord; 6] = [
        Coord::JY,
        Coord::JZ,
        Coord::S1Y,
        Coord::S1Z,
        Coord::S2Y,
        Coord::S2Z,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Coord> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Coord::JY => "J_y",
            Coord::JZ => "J_z",
            Coord::S1Y => "S1_y",
            Coord::S1Z => "S1_z",
            Coord::S2Y => "S2_y",
            Coord::S2Z => "S2_z",
        }
    }
}

/// First and second moments of the six normalized quadratures, ordered as
/// [`Coord::ALL`]. `J̃_x ≃ √J` and `S̃_x ≃ √S` are treated as classical and
/// enter only through κ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianState {
    pub mean: Vector6<f64>,
    pub cov: Matrix6<f64>,
}

impl GaussianState {
    /// Coherent spin state and two coherent probe pulses: zero mean, every
    /// quadrature at the shot-noise variance 1/2.
    pub fn fresh() -> Self {
        Self {
            mean: Vector6::zeros(),
            cov: Matrix6::identity() * 0.5,
        }
    }

    pub fn from_parts(mean: Vector6<f64>, cov: Matrix6<f64>) -> Result<Self> {
        let state = Self { mean, cov };
        state.check()?;
        Ok(state)
    }

    /// Checks symmetry (1e-12) and positive semidefiniteness (−1e-10).
    pub fn check(&self) -> Result<()> {
        if self.mean.iter().chain(self.cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Invariant("state has non-finite entries".into()));
        }
        let asym = (self.cov - self.cov.transpose()).amax();
        if asym > 1e-12 {
            return Err(Error::Invariant(format!("covariance asymmetric by {asym:e}")));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -1e-10 {
            return Err(Error::Invariant(format!(
                "covariance has negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let sym = (self.cov + self.cov.transpose()) * 0.5;
        sym.symmetric_eigenvalues().min()
    }
}

/// Which probe sequence a shot runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// QND pulse, rotation, verification pulse.
    Squeezed,
    /// Coherent-state control: the first pulse does not interact.
    Coherent,
}

/// Inputs of one simulated experiment. Serialized as JSON with exactly these
/// field names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Signed interaction strength κ.
    pub kappa: f64,
    /// Rotation angles φ in rad.
    pub angles: Vec<f64>,
    /// Shots per angle N_m.
    pub shots: usize,
    /// Spin attenuation per probe pass.
    #[serde(default)]
    pub loss_epsilon: f64,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Every invariant violation; empty iff the config is valid.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.kappa.is_finite() {
            out.push("kappa must be finite".into());
        }
        if self.angles.is_empty() {
            out.push("angles must be nonempty".into());
        }
        if self.angles.iter().any(|a| !a.is_finite()) {
            out.push("angles must be finite".into());
        }
        if self.shots < 2 {
            out.push("shots must be ≥ 2".into());
        }
        if !(0.0..1.0).contains(&self.loss_epsilon) {
            out.push("loss_epsilon out of [0,1)".into());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        into_result(self.violations())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Free-function form of [`ExperimentConfig::violations`].
pub fn validate(config: &ExperimentConfig) -> Vec<String> {
    config.violations()
}

/// One shot: the normalized readouts of both probe pulses at angle φ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub phi: f64,
    pub s1: f64,
    pub s2: f64,
}

/// Estimated variances at one angle with their statistical errors.
///
/// `v_cond`, `g_used` and `dv_cond` are `None` for the coherent-state control,
/// where no first measurement conditions the spin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub protocol: Protocol,
    pub phi: f64,
    pub v1: f64,
    pub v2: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub v_cond: Option<f64>,
    pub g_used: Option<f64>,
    pub dv1: f64,
    pub dv2: f64,
    pub dv_plus: f64,
    pub dv_minus: f64,
    pub dv_cond: Option<f64>,
    pub shots: usize,
}

fn into_result(violations: Vec<String>) -> Result<()> {
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidInput(violations.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference_config() -> ExperimentConfig {
        ExperimentConfig {
            kappa: 0.63,
            angles: vec![0.0],
            shots: 1300,
            loss_epsilon: 0.0,
            seed: 7,
        }
    }

    #[test]
    fn reference_config_is_valid() {
        assert!(validate(&reference_config()).is_empty());
    }

    #[test]
    fn too_few_shots() {
        let cfg = ExperimentConfig {
            shots: 0,
            ..reference_config()
        };
        assert_eq!(validate(&cfg), vec!["shots must be ≥ 2".to_string()]);
    }

    #[test]
    fn loss_out_of_range() {
        let cfg = ExperimentConfig {
            loss_epsilon: 1.5,
            ..reference_config()
        };
        assert_eq!(validate(&cfg), vec!["loss_epsilon out of [0,1)".to_string()]);
    }

    #[test]
    fn all_violations_are_reported() {
        let cfg = ExperimentConfig {
            kappa: f64::NAN,
            angles: vec![],
            shots: 1,
            loss_epsilon: -0.1,
            seed: 0,
        };
        assert_eq!(validate(&cfg).len(), 4);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{"kappa":0.63,"angles":[0],"shots":10,"seed":1,"extra":true}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
    }

    #[test]
    fn loss_defaults_to_zero() {
        let text = r#"{"kappa":0.63,"angles":[0,1.5],"shots":10,"seed":1}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.loss_epsilon, 0.0);
    }

    #[test]
    fn fresh_state_is_exact_vacuum() {
        let s = GaussianState::fresh();
        assert_eq!(s.mean, Vector6::zeros());
        assert_eq!(s.cov, Matrix6::identity() * 0.5);
        s.check().unwrap();
    }

    #[test]
    fn non_psd_state_rejected() {
        let mut cov = Matrix6::identity() * 0.5;
        cov[(0, 0)] = -0.1;
        assert!(GaussianState::from_parts(Vector6::zeros(), cov).is_err());
    }

    #[test]
    fn yb171_derived_lengths() {
        let p = PhysicalParams::yb171();
        assert_eq!(p.spin_length(), 5.0e5);
        assert_eq!(p.stokes_length(), 1.3e6);
        p.validate().unwrap();
    }

    #[test]
    fn physical_params_violations() {
        let p = PhysicalParams {
            gamma: 0.0,
            epsilon_a: 0.5,
            ..PhysicalParams::yb171()
        };
        let v = p.violations();
        assert!(v.contains(&"gamma must be > 0".to_string()));
        assert!(v.contains(&"epsilon_a out of [0,1/2)".to_string()));
    }

    #[test]
    fn rotation_angle_is_rate_times_width() {
        let p = RotationPulse::from_micros(0.4, 2.5).unwrap();
        assert!((p.angle() - 1.0).abs() < 1e-12);
        assert!(RotationPulse::new(-1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn config_json_round_trip(
            kappa in -3.0f64..3.0,
            angles in proptest::collection::vec(-10.0f64..10.0, 1..12),
            shots in 2usize..100_000,
            loss in 0.0f64..0.999,
            seed in any::<u64>(),
        ) {
            let cfg = ExperimentConfig { kappa, angles, shots, loss_epsilon: loss, seed };
            prop_assert!(cfg.violations().is_empty());
            let back = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
