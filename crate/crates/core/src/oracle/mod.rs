//! Exact simulation of the two-pulse protocol for small ensembles.
//!
//! The atoms live in the symmetric Dicke manifold of spin `J = N_A/2`. Each
//! probe pulse holds exactly `N_L` photons shared between the σ± modes, which
//! makes it a Schwinger spin `S = N_L/2` indexed by `m_S = (n₊ − n₋)/2`. The
//! joint state is a dense tensor over `(m_J, m_S₁, m_S₂)`.
//!
//! The Faraday Hamiltonian `α S_z J_z` is diagonal in this basis. `S_y` is
//! measured projectively in the eigenbasis `|m⟩_y = exp(+iπS_x/2)|m⟩_z`,
//! which satisfies `S_y|m⟩_y = m|m⟩_y` with `S_y = (S₊ − S₋)/(2i)`.
//! A measured pulse is consumed: its tensor axis collapses to length 1.

pub mod wigner;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytics;
use crate::error::{Error, Result};
use crate::gaussian::Probe;

/// Amplitude budget of an [`ExactSystem`].
pub const MAX_AMPLITUDES: u64 = 10_000_000;

/// Sizes and coupling of an exact simulation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExactSystem {
    pub n_atoms: usize,
    pub n_photons: usize,
    /// `αt`, chosen so that `αt·√(JS)` equals `kappa_target`.
    pub alpha_t: f64,
    pub kappa_target: f64,
}

impl ExactSystem {
    pub fn new(n_atoms: usize, n_photons: usize, kappa_target: f64) -> Result<Self> {
        if n_atoms < 1 || n_photons < 1 {
            return Err(Error::InvalidInput("n_atoms and n_photons must be ≥ 1".into()));
        }
        if !kappa_target.is_finite() {
            return Err(Error::InvalidInput("kappa must be finite".into()));
        }
        let amplitudes = (n_atoms as u128 + 1) * (n_photons as u128 + 1).pow(2);
        if amplitudes > MAX_AMPLITUDES as u128 {
            return Err(Error::StateTooLarge {
                amplitudes,
                limit: MAX_AMPLITUDES,
            });
        }
        let j = n_atoms as f64 / 2.0;
        let s = n_photons as f64 / 2.0;
        Ok(Self {
            n_atoms,
            n_photons,
            alpha_t: kappa_target / (j * s).sqrt(),
            kappa_target,
        })
    }

    pub fn spin_length(&self) -> f64 {
        self.n_atoms as f64 / 2.0
    }

    pub fn stokes_length(&self) -> f64 {
        self.n_photons as f64 / 2.0
    }

    fn spin_dim(&self) -> usize {
        self.n_atoms + 1
    }

    fn light_dim(&self) -> usize {
        self.n_photons + 1
    }
}

/// Dense state over `(m_J, m_S₁, m_S₂)` in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    /// Axis lengths; a consumed pulse has length 1.
    pub dims: [usize; 3],
    pub amps: Vec<Complex64>,
}

impl JointState {
    fn index(&self, a: usize, p1: usize, p2: usize) -> usize {
        (a * self.dims[1] + p1) * self.dims[2] + p2
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨J_zᵏ⟩` for `k = 1, 2`.
    pub fn jz_moments(&self, system: &ExactSystem) -> (f64, f64) {
        let j = system.spin_length();
        let per_axis = self.dims[1] * self.dims[2];
        let (mut m1, mut m2) = (0.0, 0.0);
        for (a, block) in self.amps.chunks(per_axis).enumerate() {
            let p: f64 = block.iter().map(|z| z.norm_sqr()).sum();
            let m = a as f64 - j;
            m1 += p * m;
            m2 += p * m * m;
        }
        (m1, m2)
    }

    fn pulse_axis(probe: Probe) -> usize {
        match probe {
            Probe::First => 1,
            Probe::Second => 2,
        }
    }

    fn require_pulse(&self, system: &ExactSystem, probe: Probe) -> Result<usize> {
        let axis = Self::pulse_axis(probe);
        if self.dims[axis] != system.light_dim() {
            return Err(Error::InvalidInput(format!(
                "{probe:?} pulse has already been measured"
            )));
        }
        Ok(axis)
    }
}

fn binomial_amplitudes(n: usize) -> Vec<f64> {
    // √C(n,k)/2^{n/2}, built by the ratio C(n,k+1)/C(n,k) = (n−k)/(k+1)
    let mut out = Vec::with_capacity(n + 1);
    let mut ln = -(n as f64) * std::f64::consts::LN_2 / 2.0;
    for k in 0..=n {
        out.push(ln.exp());
        if k < n {
            ln += 0.5 * ((n - k) as f64 / (k + 1) as f64).ln();
        }
    }
    out
}

/// Coherent spin state along `+x` and two `x`-polarized pulses.
pub fn prepare_x_polarized(system: &ExactSystem) -> JointState {
    let spin = binomial_amplitudes(system.n_atoms);
    let light = binomial_amplitudes(system.n_photons);
    let dims = [system.spin_dim(), system.light_dim(), system.light_dim()];
    let mut amps = Vec::with_capacity(dims.iter().product());
    for &a in &spin {
        for &p1 in &light {
            for &p2 in &light {
                amps.push(Complex64::new(a * p1 * p2, 0.0));
            }
        }
    }
    JointState { dims, amps }
}

/// `exp(−iαt·S_z J_z)` for one pulse: a phase `exp(−iαt·m_S·m_J)` per
/// basis state.
pub fn evolve_faraday(state: &JointState, system: &ExactSystem, probe: Probe) -> Result<JointState> {
    let axis = state.require_pulse(system, probe)?;
    let (j, s) = (system.spin_length(), system.stokes_length());
    let dims = state.dims;
    let mut out = state.clone();
    out.amps
        .par_chunks_mut(dims[1] * dims[2])
        .enumerate()
        .for_each(|(a, block)| {
            let mj = a as f64 - j;
            for (i, z) in block.iter_mut().enumerate() {
                let p = if axis == 1 { i / dims[2] } else { i % dims[2] };
                let ms = p as f64 - s;
                *z *= Complex64::from_polar(1.0, -system.alpha_t * ms * mj);
            }
        });
    Ok(out)
}

/// `exp(−iφJ_x)` on the spin axis.
pub fn rotate_spin(state: &JointState, system: &ExactSystem, phi: f64) -> Result<JointState> {
    let rot = wigner::rotation_x(system.n_atoms, phi)?;
    let ds = state.dims[0];
    let block = state.dims[1] * state.dims[2];
    let mut amps = vec![Complex64::new(0.0, 0.0); state.amps.len()];
    amps.par_chunks_mut(block).enumerate().for_each(|(row, out)| {
        for col in 0..ds {
            let r = rot[(row, col)];
            if r == Complex64::new(0.0, 0.0) {
                continue;
            }
            let src = &state.amps[col * block..(col + 1) * block];
            for (o, x) in out.iter_mut().zip(src) {
                *o += r * x;
            }
        }
    });
    Ok(JointState {
        dims: state.dims,
        amps,
    })
}

/// Columns are the `S_y` eigenvectors `|m⟩_y` in the `S_z` basis, ascending `m`.
pub fn sy_eigenbasis(system: &ExactSystem) -> Result<DMatrix<Complex64>> {
    wigner::rotation_x(system.n_photons, -std::f64::consts::FRAC_PI_2)
}

/// Outcome distribution of a projective `S_y` measurement on one pulse.
#[derive(Clone, Debug)]
pub struct SyMeasurement {
    /// Eigenvalues `m` of `S_y`, ascending.
    pub outcomes: Vec<f64>,
    pub probabilities: Vec<f64>,
    /// Normalized post-measurement state per outcome with the pulse consumed;
    /// `None` for outcomes of zero probability.
    pub post_states: Vec<Option<JointState>>,
}

/// Amplitudes of `state` with the pulse axis expressed in the `S_y` basis.
fn to_sy_basis(state: &JointState, axis: usize, basis: &DMatrix<Complex64>) -> JointState {
    let dims = state.dims;
    let dl = dims[axis];
    let mut out = vec![Complex64::new(0.0, 0.0); state.amps.len()];
    for a in 0..dims[0] {
        for fixed in 0..dims[3 - axis] {
            for my in 0..dl {
                let mut acc = Complex64::new(0.0, 0.0);
                for p in 0..dl {
                    let (p1, p2) = if axis == 1 { (p, fixed) } else { (fixed, p) };
                    acc += basis[(p, my)].conj() * state.amps[state.index(a, p1, p2)];
                }
                let (p1, p2) = if axis == 1 { (my, fixed) } else { (fixed, my) };
                out[state.index(a, p1, p2)] = acc;
            }
        }
    }
    JointState { dims, amps: out }
}

/// Slice of a `S_y`-basis state at outcome `my`, with the pulse axis removed.
fn branch(y_state: &JointState, axis: usize, my: usize) -> JointState {
    let mut dims = y_state.dims;
    dims[axis] = 1;
    let other = y_state.dims[3 - axis];
    let mut amps = Vec::with_capacity(dims[0] * other);
    for a in 0..dims[0] {
        for fixed in 0..other {
            let (p1, p2) = if axis == 1 { (my, fixed) } else { (fixed, my) };
            amps.push(y_state.amps[y_state.index(a, p1, p2)]);
        }
    }
    JointState { dims, amps }
}

pub fn measure_sy_distribution(
    state: &JointState,
    system: &ExactSystem,
    probe: Probe,
) -> Result<SyMeasurement> {
    let axis = state.require_pulse(system, probe)?;
    let basis = sy_eigenbasis(system)?;
    let y_state = to_sy_basis(state, axis, &basis);
    let total = state.norm_sqr();
    let dl = system.light_dim();
    let mut probabilities = Vec::with_capacity(dl);
    let mut post_states = Vec::with_capacity(dl);
    for my in 0..dl {
        let mut b = branch(&y_state, axis, my);
        let p = b.norm_sqr() / total;
        probabilities.push(p);
        if p > 0.0 {
            let scale = 1.0 / b.norm_sqr().sqrt();
            b.amps.iter_mut().for_each(|z| *z *= scale);
            post_states.push(Some(b));
        } else {
            post_states.push(None);
        }
    }
    Ok(SyMeasurement {
        outcomes: (0..dl).map(|k| wigner::m_value(system.n_photons, k)).collect(),
        probabilities,
        post_states,
    })
}

/// Exact joint distribution of the two normalized readouts
/// `(S₁_y/√S, S₂_y/√S)`.
#[derive(Clone, Debug)]
pub struct JointDistribution {
    /// Normalized outcome values, shared by both pulses.
    pub outcomes: Vec<f64>,
    /// `probs[(first, second)]`.
    pub probs: DMatrix<f64>,
}

/// Runs the protocol at angle `phi`, enumerating every outcome of the first
/// measurement and the conditional distribution of the second.
pub fn exact_joint_distribution(system: &ExactSystem, phi: f64) -> Result<JointDistribution> {
    let state = evolve_faraday(&prepare_x_polarized(system), system, Probe::First)?;
    let first = measure_sy_distribution(&state, system, Probe::First)?;
    let rows = first
        .post_states
        .into_par_iter()
        .zip(first.probabilities.par_iter())
        .map(|(post, &p1)| -> Result<Vec<f64>> {
            let Some(post) = post else {
                return Ok(vec![0.0; system.light_dim()]);
            };
            let rotated = rotate_spin(&post, system, phi)?;
            let probed = evolve_faraday(&rotated, system, Probe::Second)?;
            let second = measure_sy_distribution(&probed, system, Probe::Second)?;
            Ok(second.probabilities.iter().map(|p2| p1 * p2).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let dl = system.light_dim();
    let probs = DMatrix::from_fn(dl, dl, |a, b| rows[a][b]);
    let norm = (system.stokes_length()).sqrt();
    Ok(JointDistribution {
        outcomes: (0..dl)
            .map(|k| wigner::m_value(system.n_photons, k) / norm)
            .collect(),
        probs,
    })
}

/// Readout variances of the protocol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProtocolStats {
    pub v1: f64,
    pub v2: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub v_cond: f64,
}

impl ProtocolStats {
    /// Closed forms of the linearized model.
    pub fn gaussian(kappa: f64, phi: f64) -> Self {
        Self {
            v1: analytics::v1(kappa),
            v2: analytics::v2(kappa, phi),
            v_plus: analytics::v_pm(kappa, phi, analytics::Branch::Plus),
            v_minus: analytics::v_pm(kappa, phi, analytics::Branch::Minus),
            v_cond: analytics::v_cond(kappa, phi),
        }
    }
}

impl JointDistribution {
    pub fn stats(&self, phi: f64) -> ProtocolStats {
        let n = self.outcomes.len();
        let (mut e1, mut e2, mut e11, mut e22, mut e12) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                let p = self.probs[(a, b)];
                let (x, y) = (self.outcomes[a], self.outcomes[b]);
                e1 += p * x;
                e2 += p * y;
                e11 += p * x * x;
                e22 += p * y * y;
                e12 += p * x * y;
            }
        }
        let v1 = e11 - e1 * e1;
        let v2 = e22 - e2 * e2;
        let c12 = e12 - e1 * e2;
        // min over g of V(s2 − g·s1·cos φ); any g is optimal when cos φ = 0
        let v_cond = if phi.cos().abs() > 1e-12 {
            v2 - c12 * c12 / v1
        } else {
            v2
        };
        ProtocolStats {
            v1,
            v2,
            v_plus: (v1 + v2 + 2.0 * c12) / 2.0,
            v_minus: (v1 + v2 - 2.0 * c12) / 2.0,
            v_cond,
        }
    }
}

pub fn exact_protocol_stats(system: &ExactSystem, phi: f64) -> Result<ProtocolStats> {
    Ok(exact_joint_distribution(system, phi)?.stats(phi))
}

/// Relative deviations `|exact − gaussian| / gaussian`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Deviations {
    pub v1: f64,
    pub v2: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub v_cond: f64,
    /// Largest of the `v1`, `v2`, `v_plus`, `v_minus` deviations.
    pub max_relative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub n_atoms: usize,
    pub n_photons: usize,
    pub kappa_target: f64,
    pub phi: f64,
    pub exact: ProtocolStats,
    pub gaussian: ProtocolStats,
    pub deviations: Deviations,
}

pub fn compare(system: &ExactSystem, phi: f64) -> Result<OracleReport> {
    let exact = exact_protocol_stats(system, phi)?;
    let gaussian = ProtocolStats::gaussian(system.kappa_target, phi);
    let rel = |e: f64, g: f64| (e - g).abs() / g;
    let (v1, v2, vp, vm) = (
        rel(exact.v1, gaussian.v1),
        rel(exact.v2, gaussian.v2),
        rel(exact.v_plus, gaussian.v_plus),
        rel(exact.v_minus, gaussian.v_minus),
    );
    Ok(OracleReport {
        n_atoms: system.n_atoms,
        n_photons: system.n_photons,
        kappa_target: system.kappa_target,
        phi,
        exact,
        gaussian,
        deviations: Deviations {
            v1,
            v2,
            v_plus: vp,
            v_minus: vm,
            v_cond: rel(exact.v_cond, gaussian.v_cond),
            max_relative: v1.max(v2).max(vp).max(vm),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn expect_spin(state: &JointState, op: &DMatrix<Complex64>) -> Complex64 {
        let [ds, d1, d2] = state.dims;
        let block = d1 * d2;
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..ds {
            for c in 0..ds {
                for k in 0..block {
                    acc += state.amps[r * block + k].conj() * op[(r, c)] * state.amps[c * block + k];
                }
            }
        }
        acc
    }

    fn random_state(system: &ExactSystem, seed: u64) -> JointState {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut s = prepare_x_polarized(system);
        for z in &mut s.amps {
            *z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
        let n = s.norm_sqr().sqrt();
        s.amps.iter_mut().for_each(|z| *z /= n);
        s
    }

    #[test]
    fn two_atom_coherent_amplitudes() {
        let sys = ExactSystem::new(2, 1, 0.3).unwrap();
        let s = prepare_x_polarized(&sys);
        let spin: Vec<f64> = (0..3)
            .map(|a| {
                let block = &s.amps[a * 4..(a + 1) * 4];
                block.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
            })
            .collect();
        for (got, want) in spin.iter().zip([0.5, FRAC_1_SQRT_2, 0.5]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn coherent_state_moments() {
        for n in [1usize, 2, 5, 8] {
            let sys = ExactSystem::new(n, 2, 0.3).unwrap();
            let s = prepare_x_polarized(&sys);
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            let [jx, jy, jz] = wigner::spin_matrices(n);
            assert!((expect_spin(&s, &jx).re - n as f64 / 2.0).abs() < 1e-12);
            assert!(expect_spin(&s, &jy).norm() < 1e-12);
            assert!(expect_spin(&s, &jz).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_coupling_faraday_is_identity() {
        let sys = ExactSystem::new(3, 3, 0.0).unwrap();
        let s = random_state(&sys, 1);
        assert_eq!(evolve_faraday(&s, &sys, Probe::First).unwrap(), s);
    }

    #[test]
    fn faraday_is_unitary_and_qnd() {
        let sys = ExactSystem::new(5, 4, 0.8).unwrap();
        for seed in 0..5 {
            let s = random_state(&sys, seed);
            let before = s.jz_moments(&sys);
            for probe in [Probe::First, Probe::Second] {
                let out = evolve_faraday(&s, &sys, probe).unwrap();
                assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
                let after = out.jz_moments(&sys);
                assert!((after.0 - before.0).abs() < 1e-12);
                assert!((after.1 - before.1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rotation_properties() {
        let int_sys = ExactSystem::new(4, 2, 0.3).unwrap();
        let half_sys = ExactSystem::new(3, 2, 0.3).unwrap();
        let s = random_state(&int_sys, 9);
        let turned = rotate_spin(&s, &int_sys, 2.0 * PI).unwrap();
        for (a, b) in turned.amps.iter().zip(&s.amps) {
            assert!((a - b).norm() < 1e-12);
        }
        let h = random_state(&half_sys, 9);
        let turned = rotate_spin(&h, &half_sys, 2.0 * PI).unwrap();
        for (a, b) in turned.amps.iter().zip(&h.amps) {
            assert!((a + b).norm() < 1e-12);
        }
        assert!((rotate_spin(&h, &half_sys, 1.3).unwrap().norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pi_rotation_flips_jz() {
        let sys = ExactSystem::new(4, 1, 0.3).unwrap();
        let block = sys.light_dim() * sys.light_dim();
        for a in 0..sys.spin_dim() {
            let mut s = prepare_x_polarized(&sys);
            s.amps.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            s.amps[a * block] = Complex64::new(1.0, 0.0);
            let m = a as f64 - 2.0;
            let r = rotate_spin(&s, &sys, PI).unwrap();
            assert!((r.jz_moments(&sys).0 + m).abs() < 1e-12);
        }
    }

    #[test]
    fn sy_eigenbasis_diagonalizes_sy() {
        let sys = ExactSystem::new(1, 7, 0.3).unwrap();
        let w = sy_eigenbasis(&sys).unwrap();
        let [_, sy, _] = wigner::spin_matrices(7);
        let diag = w.adjoint() * sy * &w;
        for r in 0..8 {
            for c in 0..8 {
                let want = if r == c { wigner::m_value(7, r) } else { 0.0 };
                assert!((diag[(r, c)] - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn uncoupled_pulse_is_shot_noise() {
        let sys = ExactSystem::new(2, 10, 0.3).unwrap();
        let s = prepare_x_polarized(&sys);
        let m = measure_sy_distribution(&s, &sys, Probe::First).unwrap();
        assert!(m.probabilities.iter().all(|&p| p >= 0.0));
        assert!((m.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let norm = sys.stokes_length();
        let mean: f64 = m.outcomes.iter().zip(&m.probabilities).map(|(x, p)| x * p).sum();
        let second: f64 = m
            .outcomes
            .iter()
            .zip(&m.probabilities)
            .map(|(x, p)| x * x * p)
            .sum();
        assert!(mean.abs() < 1e-12);
        assert!(((second - mean * mean) / norm - 0.5).abs() < 1e-12);
        for post in m.post_states.iter().flatten() {
            assert_eq!(post.dims, [3, 1, 11]);
            assert!((post.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn measured_pulse_cannot_be_reused() {
        let sys = ExactSystem::new(2, 2, 0.3).unwrap();
        let s = prepare_x_polarized(&sys);
        let m = measure_sy_distribution(&s, &sys, Probe::First).unwrap();
        let post = m.post_states.into_iter().flatten().next().unwrap();
        assert!(evolve_faraday(&post, &sys, Probe::First).is_err());
        assert!(measure_sy_distribution(&post, &sys, Probe::First).is_err());
    }

    #[test]
    fn no_coupling_gives_product_distribution() {
        let sys = ExactSystem::new(4, 6, 0.0).unwrap();
        let d = exact_joint_distribution(&sys, 0.9).unwrap();
        let row: Vec<f64> = (0..7).map(|a| d.probs.row(a).sum()).collect();
        let col: Vec<f64> = (0..7).map(|b| d.probs.column(b).sum()).collect();
        for (a, pa) in row.iter().enumerate() {
            for (b, pb) in col.iter().enumerate() {
                assert!((d.probs[(a, b)] - pa * pb).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn small_system_close_to_linearized() {
        let sys = ExactSystem::new(8, 8, 0.3).unwrap();
        let exact = exact_protocol_stats(&sys, 0.0).unwrap();
        let gauss = analytics::v1(0.3);
        assert!((exact.v1 - gauss).abs() / gauss < 0.10, "{exact:?}");
    }

    #[test]
    fn linearization_error_shrinks() {
        let dev = |n| {
            let sys = ExactSystem::new(n, n, 0.3).unwrap();
            (exact_protocol_stats(&sys, 0.0).unwrap().v1 - analytics::v1(0.3)).abs()
        };
        assert!(dev(32) < dev(8));
    }

    #[test]
    fn full_turn_periodicity() {
        for n in [8usize, 7] {
            let sys = ExactSystem::new(n, 8, 0.3).unwrap();
            let a = exact_protocol_stats(&sys, 0.0).unwrap();
            let b = exact_protocol_stats(&sys, 2.0 * PI).unwrap();
            for (x, y) in [
                (a.v1, b.v1),
                (a.v2, b.v2),
                (a.v_plus, b.v_plus),
                (a.v_minus, b.v_minus),
                (a.v_cond, b.v_cond),
            ] {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn guard_rejects_large_systems() {
        assert!(matches!(
            ExactSystem::new(1_000_000, 8, 0.3),
            Err(Error::StateTooLarge { .. })
        ));
        assert!(ExactSystem::new(0, 8, 0.3).is_err());
        let sys = ExactSystem::new(16, 16, 0.3).unwrap();
        assert!((sys.alpha_t * (sys.spin_length() * sys.stokes_length()).sqrt() - 0.3).abs() < 1e-15);
    }
}
