//! Shot-by-shot sampling of the two-pulse protocol and variance estimation.
//!
//! Each shot draws from its own ChaCha8 stream keyed by the config seed and
//! a stream id built from `(protocol, angle index, shot index)`, so the
//! record sequence does not depend on how shots are scheduled across
//! threads.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::Probe;
use crate::model::{Coord, ExperimentConfig, GaussianState, MeasurementRecord, Protocol, VarianceReport};
use crate::optimize::golden_section_min;

/// Search interval and tolerance for the global gain fit.
pub const GAIN_SEARCH: (f64, f64) = (-1.0, 2.0);
pub const GAIN_TOL: f64 = 1e-6;

/// Random stream of one shot.
pub fn shot_rng(seed: u64, protocol: Protocol, angle_index: usize, shot_index: usize) -> ChaCha8Rng {
    assert!(angle_index < 1 << 31 && shot_index <= u32::MAX as usize);
    let tag = match protocol {
        Protocol::Squeezed => 0u64,
        Protocol::Coherent => 1u64 << 63,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag | (angle_index as u64) << 32 | shot_index as u64);
    rng
}

fn sample<R: Rng + ?Sized>(state: &GaussianState, coord: Coord, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    state.marginal_mean(coord) + state.marginal_variance(coord).max(0.0).sqrt() * z
}

/// Runs one shot at angle `phi`.
///
/// The squeezed protocol samples the first readout, conditions the spin on
/// it, then applies loss, the rotation, loss and the second pulse. The
/// coherent control skips the first interaction and the conditioning, so
/// `s1` is bare shot noise.
pub fn run_shot<R: Rng + ?Sized>(
    config: &ExperimentConfig,
    phi: f64,
    protocol: Protocol,
    rng: &mut R,
) -> MeasurementRecord {
    let eps = config.loss_epsilon;
    let mut state = GaussianState::fresh();
    if protocol == Protocol::Squeezed {
        state = state.apply_faraday(Probe::First, config.kappa);
    }
    let s1 = sample(&state, Coord::S1Y, rng);
    if protocol == Protocol::Squeezed {
        state = state
            .condition_on(Coord::S1Y, s1)
            .expect("first readout has shot-noise variance");
    }
    if eps > 0.0 {
        state = state.apply_loss(eps);
    }
    state = state.apply_rotation(phi);
    if eps > 0.0 {
        state = state.apply_loss(eps);
    }
    state = state.apply_faraday(Probe::Second, config.kappa);
    let s2 = sample(&state, Coord::S2Y, rng);
    MeasurementRecord { phi, s1, s2 }
}

/// All shots of `config.angles[angle_index]`, in shot order.
pub fn simulate_angle(
    config: &ExperimentConfig,
    angle_index: usize,
    protocol: Protocol,
) -> Result<Vec<MeasurementRecord>> {
    config.validate()?;
    let phi = *config
        .angles
        .get(angle_index)
        .ok_or_else(|| Error::InvalidInput(format!("no angle at index {angle_index}")))?;
    Ok((0..config.shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = shot_rng(config.seed, protocol, angle_index, shot);
            run_shot(config, phi, protocol, &mut rng)
        })
        .collect())
}

/// Welford accumulator for mean and unbiased variance.
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn variance(&self) -> f64 {
        self.m2 / (self.n - 1) as f64
    }

    fn of(xs: impl Iterator<Item = f64>) -> Self {
        let mut m = Self::default();
        xs.for_each(|x| m.push(x));
        m
    }
}

/// Statistical error of a sample variance from `n` Gaussian shots.
pub fn variance_error(v: f64, n: usize) -> f64 {
    (2.0 / n as f64).sqrt() * v
}

fn common_phi(records: &[MeasurementRecord]) -> Result<f64> {
    if records.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 records, got {}",
            records.len()
        )));
    }
    let phi = records[0].phi;
    if records.iter().any(|r| r.phi.to_bits() != phi.to_bits()) {
        return Err(Error::InvalidInput("records mix rotation angles".into()));
    }
    Ok(phi)
}

/// Unbiased sample variances of `s1`, `s2`, `(s1 ± s2)/√2` and, when a gain
/// is given, `s2 − g·s1·cos φ`. Passing `g = None` marks the records as the
/// coherent control, for which the conditional variance does not apply.
/// Error bars are `√(2/N_m)·V`.
pub fn estimate(records: &[MeasurementRecord], g: Option<f64>) -> Result<VarianceReport> {
    let phi = common_phi(records)?;
    let n = records.len();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let v1 = Moments::of(records.iter().map(|x| x.s1)).variance();
    let v2 = Moments::of(records.iter().map(|x| x.s2)).variance();
    let v_plus = Moments::of(records.iter().map(|x| r * (x.s1 + x.s2))).variance();
    let v_minus = Moments::of(records.iter().map(|x| r * (x.s1 - x.s2))).variance();
    let cos = phi.cos();
    let v_cond = g.map(|g| Moments::of(records.iter().map(|x| x.s2 - g * x.s1 * cos)).variance());
    Ok(VarianceReport {
        protocol: if g.is_some() {
            Protocol::Squeezed
        } else {
            Protocol::Coherent
        },
        phi,
        v1,
        v2,
        v_plus,
        v_minus,
        v_cond,
        g_used: g,
        dv1: variance_error(v1, n),
        dv2: variance_error(v2, n),
        dv_plus: variance_error(v_plus, n),
        dv_minus: variance_error(v_minus, n),
        dv_cond: v_cond.map(|v| variance_error(v, n)),
        shots: n,
    })
}

/// Sufficient statistics of one angle for the gain objective.
struct GainTerms {
    cos: f64,
    var1: f64,
    var2: f64,
    cov12: f64,
}

impl GainTerms {
    fn objective(&self, g: f64) -> f64 {
        let c = g * self.cos;
        self.var2 - 2.0 * c * self.cov12 + c * c * self.var1
    }
}

fn group_by_phi(records: &[MeasurementRecord]) -> Vec<Vec<MeasurementRecord>> {
    let mut groups: Vec<Vec<MeasurementRecord>> = Vec::new();
    for rec in records {
        match groups
            .iter_mut()
            .find(|g| g[0].phi.to_bits() == rec.phi.to_bits())
        {
            Some(g) => g.push(*rec),
            None => groups.push(vec![*rec]),
        }
    }
    groups
}

/// The single gain `g` minimizing `Σ_φ V(s2 − g·s1·cos φ)` over all angles,
/// found by golden-section search on [`GAIN_SEARCH`].
///
/// Fails when no angle has `cos φ ≠ 0`, where the objective is flat.
pub fn fit_global_g(records: &[MeasurementRecord]) -> Result<f64> {
    let groups = group_by_phi(records);
    if groups.is_empty() {
        return Err(Error::InvalidInput("no records to fit".into()));
    }
    let mut terms = Vec::with_capacity(groups.len());
    for group in &groups {
        common_phi(group)?;
        let n = group.len() as f64;
        let m1 = group.iter().map(|r| r.s1).sum::<f64>() / n;
        let m2 = group.iter().map(|r| r.s2).sum::<f64>() / n;
        let (mut var1, mut var2, mut cov12) = (0.0, 0.0, 0.0);
        for r in group {
            let (a, b) = (r.s1 - m1, r.s2 - m2);
            var1 += a * a;
            var2 += b * b;
            cov12 += a * b;
        }
        let d = n - 1.0;
        terms.push(GainTerms {
            cos: group[0].phi.cos(),
            var1: var1 / d,
            var2: var2 / d,
            cov12: cov12 / d,
        });
    }
    let curvature: f64 = terms.iter().map(|t| t.cos * t.cos * t.var1).sum();
    if !(curvature > 1e-12) {
        return Err(Error::Undefined(
            "gain objective is flat: every angle has cos φ = 0".into(),
        ));
    }
    let objective = |g: f64| terms.iter().map(|t| t.objective(g)).sum::<f64>();
    Ok(golden_section_min(
        objective,
        GAIN_SEARCH.0,
        GAIN_SEARCH.1,
        GAIN_TOL,
    ))
}

/// Records and estimates at one angle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleRun {
    pub records: Vec<MeasurementRecord>,
    pub report: VarianceReport,
}

/// A full angle sweep: the squeezed protocol with a fitted global gain and
/// the coherent-state control.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sweep {
    pub global_g: f64,
    pub squeezed: Vec<AngleRun>,
    pub coherent: Vec<AngleRun>,
}

impl Sweep {
    pub fn reports(&self) -> Vec<VarianceReport> {
        self.squeezed
            .iter()
            .chain(&self.coherent)
            .map(|run| run.report.clone())
            .collect()
    }

    pub fn squeezed_records(&self) -> Vec<MeasurementRecord> {
        self.squeezed
            .iter()
            .flat_map(|r| r.records.iter().copied())
            .collect()
    }

    pub fn coherent_records(&self) -> Vec<MeasurementRecord> {
        self.coherent
            .iter()
            .flat_map(|r| r.records.iter().copied())
            .collect()
    }
}

/// Coherent-state control at every configured angle.
pub fn coherent_control(config: &ExperimentConfig) -> Result<Vec<AngleRun>> {
    config.validate()?;
    (0..config.angles.len())
        .map(|i| {
            let records = simulate_angle(config, i, Protocol::Coherent)?;
            let report = estimate(&records, None)?;
            Ok(AngleRun { records, report })
        })
        .collect()
}

/// Squeezed protocol at every angle, estimated with the fitted global gain,
/// plus the coherent control.
pub fn sweep(config: &ExperimentConfig) -> Result<Sweep> {
    config.validate()?;
    let per_angle = (0..config.angles.len())
        .map(|i| simulate_angle(config, i, Protocol::Squeezed))
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<MeasurementRecord> = per_angle.iter().flatten().copied().collect();
    let global_g = match fit_global_g(&all) {
        Ok(g) => g,
        // flat objective: every gain is a minimizer
        Err(Error::Undefined(_)) => 0.0,
        Err(e) => return Err(e),
    };
    let squeezed = per_angle
        .into_iter()
        .map(|records| {
            let report = estimate(&records, Some(global_g))?;
            Ok(AngleRun { records, report })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep {
        global_g,
        squeezed,
        coherent: coherent_control(config)?,
    })
}

/// Records as CSV with header `phi,s1,s2` and shortest round-trip floats.
pub fn records_csv(records: &[MeasurementRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 48 + 16);
    out.push_str("phi,s1,s2\n");
    for r in records {
        let _ = writeln!(out, "{},{},{}", r.phi, r.s1, r.s2);
    }
    out
}

/// Parses the output of [`records_csv`].
pub fn parse_records_csv(text: &str) -> Result<Vec<MeasurementRecord>> {
    let mut lines = text.lines();
    if lines.next() != Some("phi,s1,s2") {
        return Err(Error::InvalidInput("missing `phi,s1,s2` header".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::InvalidInput(format!("bad value {s:?}: {e}")))
            };
            match fields.as_slice() {
                [a, b, c] => Ok(MeasurementRecord {
                    phi: parse(a)?,
                    s1: parse(b)?,
                    s2: parse(c)?,
                }),
                _ => Err(Error::InvalidInput(format!("expected 3 fields in {line:?}"))),
            }
        })
        .collect()
}

/// Reports as a JSON array.
pub fn reports_json(reports: &[VarianceReport]) -> Result<String> {
    Ok(serde_json::to_string_pretty(reports)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn config(kappa: f64, angles: Vec<f64>, shots: usize) -> ExperimentConfig {
        ExperimentConfig {
            kappa,
            angles,
            shots,
            loss_epsilon: 0.0,
            seed: 20_090_512,
        }
    }

    fn correlation(records: &[MeasurementRecord]) -> f64 {
        let n = records.len() as f64;
        let m1 = records.iter().map(|r| r.s1).sum::<f64>() / n;
        let m2 = records.iter().map(|r| r.s2).sum::<f64>() / n;
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for r in records {
            a += (r.s1 - m1).powi(2);
            b += (r.s2 - m2).powi(2);
            c += (r.s1 - m1) * (r.s2 - m2);
        }
        c / (a * b).sqrt()
    }

    #[test]
    fn uncoupled_readouts_are_independent_shot_noise() {
        for phi in [0.0, 1.0, PI] {
            let cfg = config(0.0, vec![phi], 1300);
            let recs = simulate_angle(&cfg, 0, Protocol::Squeezed).unwrap();
            assert!(correlation(&recs).abs() < 0.1);
            let rep = estimate(&recs, Some(0.0)).unwrap();
            assert!((rep.v1 - 0.5).abs() < 5.0 * rep.dv1);
            assert!((rep.v2 - 0.5).abs() < 5.0 * rep.dv2);
        }
    }

    #[test]
    fn coupled_readouts_correlate_at_zero_angle() {
        let k = 0.63;
        let cfg = config(k, vec![0.0], 1300);
        let recs = simulate_angle(&cfg, 0, Protocol::Squeezed).unwrap();
        // Cov = κ²/2 by propagation through the chained maps.
        let joint = crate::gaussian::protocol_state(k, 0.0, 0.0, Protocol::Squeezed);
        assert!((joint.covariance(Coord::S1Y, Coord::S2Y) - k * k / 2.0).abs() < 1e-15);
        let rho = correlation(&recs);
        // 3σ with σ ≈ 1/√N under the null
        assert!(rho > 3.0 / (1300f64).sqrt(), "ρ = {rho}");
    }

    #[test]
    fn same_seed_same_records() {
        let cfg = config(0.63, vec![0.0, 1.0], 500);
        let a = simulate_angle(&cfg, 1, Protocol::Squeezed).unwrap();
        let b = simulate_angle(&cfg, 1, Protocol::Squeezed).unwrap();
        assert_eq!(a, b);
        let serial: Vec<_> = (0..cfg.shots)
            .map(|i| {
                run_shot(
                    &cfg,
                    1.0,
                    Protocol::Squeezed,
                    &mut shot_rng(cfg.seed, Protocol::Squeezed, 1, i),
                )
            })
            .collect();
        assert_eq!(a, serial);
        let other = simulate_angle(&ExperimentConfig { seed: 1, ..cfg }, 1, Protocol::Squeezed).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn error_bar_at_1300_shots() {
        assert!((variance_error(0.5, 1300) - 0.01961).abs() < 1e-5);
    }

    #[test]
    fn identical_records_have_zero_variance() {
        let recs = vec![
            MeasurementRecord {
                phi: 0.3,
                s1: 0.123,
                s2: -4.5
            };
            50
        ];
        let rep = estimate(&recs, Some(0.24)).unwrap();
        for v in [rep.v1, rep.v2, rep.v_plus, rep.v_minus, rep.v_cond.unwrap()] {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn estimate_rejects_bad_input() {
        let one = [MeasurementRecord {
            phi: 0.0,
            s1: 0.0,
            s2: 0.0,
        }];
        assert!(estimate(&one, None).is_err());
        let mixed = [
            MeasurementRecord {
                phi: 0.0,
                s1: 0.0,
                s2: 0.0,
            },
            MeasurementRecord {
                phi: 1.0,
                s1: 0.0,
                s2: 0.0,
            },
        ];
        assert!(estimate(&mixed, None).is_err());
    }

    #[test]
    fn sum_readout_matches_analytic_at_large_n() {
        let k = 0.63;
        let cfg = config(k, vec![0.0], 100_000);
        let recs = simulate_angle(&cfg, 0, Protocol::Squeezed).unwrap();
        let rep = estimate(&recs, Some(analytics::g_opt(k))).unwrap();
        let target = 0.89690;
        assert!((rep.v_plus - target).abs() < 3.0 * variance_error(target, cfg.shots));
    }

    #[test]
    fn single_angle_fit_approaches_optimum() {
        let k = 0.63;
        let cfg = config(k, vec![0.0], 50_000);
        let recs = simulate_angle(&cfg, 0, Protocol::Squeezed).unwrap();
        let g = fit_global_g(&recs).unwrap();
        assert!((g - analytics::g_opt(k)).abs() < 0.02, "g = {g}");
    }

    #[test]
    fn quarter_turn_only_is_flat() {
        let cfg = config(0.63, vec![PI / 2.0, -PI / 2.0], 200);
        let recs: Vec<_> = (0..2)
            .flat_map(|i| simulate_angle(&cfg, i, Protocol::Squeezed).unwrap())
            .collect();
        assert!(matches!(fit_global_g(&recs), Err(Error::Undefined(_))));
    }

    #[test]
    fn loss_lowers_the_global_gain() {
        let k = 0.63;
        let angles: Vec<f64> = (0..11).map(|i| PI * i as f64 / 10.0).collect();
        let cfg = ExperimentConfig {
            loss_epsilon: 0.067,
            ..config(k, angles, 10_000)
        };
        let s = sweep(&cfg).unwrap();
        assert!(s.global_g < analytics::g_opt(k), "g* = {}", s.global_g);
        // (1 − ε)κ²/(1 + κ²) from propagating the loss through the maps
        assert!((s.global_g - 0.933 * analytics::g_opt(k)).abs() < 0.02);
    }

    #[test]
    fn coherent_reports_have_no_conditional_variance() {
        let cfg = config(0.63, vec![0.0, 2.0], 300);
        let runs = coherent_control(&cfg).unwrap();
        for run in runs {
            assert_eq!(run.report.protocol, Protocol::Coherent);
            assert!(run.report.v_cond.is_none() && run.report.g_used.is_none());
        }
    }

    #[test]
    fn csv_layout() {
        let recs = [MeasurementRecord {
            phi: 0.5,
            s1: 0.1,
            s2: -2e-7,
        }];
        assert_eq!(records_csv(&recs), "phi,s1,s2\n0.5,0.1,-0.0000002\n");
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(rows in proptest::collection::vec((-10.0f64..10.0, -1e3f64..1e3, -1e-300f64..1e-300), 0..40)) {
            let recs: Vec<_> = rows.into_iter().map(|(phi, s1, s2)| MeasurementRecord { phi, s1, s2 }).collect();
            let back = parse_records_csv(&records_csv(&recs)).unwrap();
            prop_assert_eq!(back, recs);
        }
    }
}
