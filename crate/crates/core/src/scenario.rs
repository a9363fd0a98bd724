//! Scenario model: array steering, interference covariance, target support
//! hypotheses, per-trial data synthesis, and the pulse-to-range-gate occupancy
//! rule for a target with constant radial velocity.

use std::ops::RangeInclusive;

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, HermitianPd};
use crate::scalar::Real;

/// Physical and statistical parameters of a simulated scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_antennas: usize,
    pub n_pulses: usize,
    pub n_training: usize,
    /// Spatial frequency of the steering vector, cycles per element, in `[-0.5, 0.5)`.
    pub spatial_frequency: f64,
    pub noise_power: f64,
    /// Clutter-to-noise ratio in dB.
    pub cnr_db: f64,
    /// One-lag clutter correlation coefficient, in `[0, 1)`.
    pub clutter_corr: f64,
    /// GIC tuning parameter of the selector built on the AMF statistics.
    pub gic_rho_two_step: f64,
    /// GIC tuning parameter of the selector built on the joint `(Z, R)` likelihood.
    pub gic_rho_joint: f64,
    pub amplitude: AmplitudePolicy,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_antennas: 8,
            n_pulses: 16,
            n_training: 16,
            spatial_frequency: 0.0,
            noise_power: 1.0,
            cnr_db: 20.0,
            clutter_corr: 0.95,
            gic_rho_two_step: 11.0,
            gic_rho_joint: 5.0,
            amplitude: AmplitudePolicy::default(),
        }
    }
}

impl ScenarioConfig {
    /// Checks every invariant. A training set smaller than the array is reported
    /// as [`Error::InsufficientTraining`], everything else as [`Error::InvalidConfig`].
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_antennas == 0 || self.n_pulses == 0 || self.n_training == 0 {
            return bad("n_antennas, n_pulses and n_training must be positive".into());
        }
        if !(self.spatial_frequency >= -0.5 && self.spatial_frequency < 0.5) {
            return bad(format!(
                "spatial_frequency {} outside [-0.5, 0.5)",
                self.spatial_frequency
            ));
        }
        if !(self.noise_power > 0.0 && self.noise_power.is_finite()) {
            return bad(format!(
                "noise_power {} must be positive and finite",
                self.noise_power
            ));
        }
        if self.cnr_db.is_nan() || self.cnr_db == f64::INFINITY {
            return bad(format!(
                "cnr_db {} must be a number below +inf",
                self.cnr_db
            ));
        }
        if !(self.clutter_corr >= 0.0 && self.clutter_corr < 1.0) {
            return bad(format!("clutter_corr {} outside [0, 1)", self.clutter_corr));
        }
        for (name, rho) in [
            ("gic_rho_two_step", self.gic_rho_two_step),
            ("gic_rho_joint", self.gic_rho_joint),
        ] {
            if !(rho > 1.0 && rho.is_finite()) {
                return bad(format!("{name} = {rho} must be finite and > 1"));
            }
        }
        if let AmplitudePolicy::Fixed { phase } = self.amplitude {
            if !phase.is_finite() {
                return bad("amplitude phase must be finite".into());
            }
        }
        if self.n_training < self.n_antennas {
            return Err(Error::InsufficientTraining {
                n_training: self.n_training,
                n_antennas: self.n_antennas,
            });
        }
        Ok(())
    }

    /// Clutter power `p_c = σ_n² · 10^(CNR/10)`.
    pub fn clutter_power(&self) -> f64 {
        self.noise_power * 10f64.powf(self.cnr_db / 10.0)
    }

    pub fn candidate_count(&self) -> usize {
        self.n_pulses * (self.n_pulses + 1) / 2
    }
}

/// How the in-support target amplitudes `α_i` are generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum AmplitudePolicy {
    /// One common amplitude `|α| e^{jφ}` on every occupied pulse.
    Fixed {
        #[serde(default)]
        phase: f64,
    },
    /// Common modulus, independent uniform phase per occupied pulse.
    RandomPhase,
}

impl Default for AmplitudePolicy {
    fn default() -> Self {
        AmplitudePolicy::Fixed { phase: 0.0 }
    }
}

/// Target support `(l, h)`: pulses `l, …, l+h` (1-based) contain the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SupportHypothesis {
    l: usize,
    h: usize,
}

impl SupportHypothesis {
    pub fn new(l: usize, h: usize, n_pulses: usize) -> Result<Self> {
        if l == 0 || l + h > n_pulses {
            return Err(Error::InvalidData(format!(
                "support (l={l}, h={h}) invalid for {n_pulses} pulses"
            )));
        }
        Ok(Self { l, h })
    }

    /// Support covering every pulse, `(1, N_p − 1)`.
    pub fn full(n_pulses: usize) -> Self {
        assert!(n_pulses >= 1);
        Self {
            l: 1,
            h: n_pulses - 1,
        }
    }

    #[inline]
    pub fn l(&self) -> usize {
        self.l
    }

    #[inline]
    pub fn h(&self) -> usize {
        self.h
    }

    /// Number of occupied pulses, `h + 1`.
    #[inline]
    pub fn len(&self) -> usize {
        self.h + 1
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// 0-based pulse indices covered by the support.
    #[inline]
    pub fn indices(&self) -> RangeInclusive<usize> {
        self.l - 1..=self.l - 1 + self.h
    }

    #[inline]
    pub fn contains_index(&self, i: usize) -> bool {
        self.indices().contains(&i)
    }

    /// All `N_p (N_p + 1) / 2` candidates in lexicographic order (`l`, then `h`).
    pub fn candidates(n_pulses: usize) -> impl Iterator<Item = SupportHypothesis> {
        (1..=n_pulses)
            .flat_map(move |l| (0..=n_pulses - l).map(move |h| SupportHypothesis { l, h }))
    }

    /// Draws `h` uniformly on `{0, …, N_p−1}`, then `l` uniformly on `{1, …, N_p−h}`.
    pub fn draw<R: Rng + ?Sized>(n_pulses: usize, rng: &mut R) -> Self {
        let h = rng.random_range(0..n_pulses);
        let l = rng.random_range(1..=n_pulses - h);
        Self { l, h }
    }
}

impl std::fmt::Display for SupportHypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.l, self.h)
    }
}

/// Either target absent or a target on the given support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    Null,
    Target(SupportHypothesis),
}

impl Hypothesis {
    pub fn support(&self) -> Option<SupportHypothesis> {
        match self {
            Hypothesis::Null => None,
            Hypothesis::Target(s) => Some(*s),
        }
    }
}

/// Uniform-linear-array steering vector, entry `m` equal to `exp(j 2π m ν_s)`.
pub fn steering_vector<T: Real>(n_antennas: usize, spatial_frequency: T) -> ComplexVector<T> {
    let two_pi = T::TAU();
    ComplexVector::from_fn(n_antennas, |m| {
        Complex::from_polar(T::one(), two_pi * T::from_count(m) * spatial_frequency)
    })
}

/// `M = σ_n² I + p_c M_c` with `M_c(i, j) = ρ_c^|i−j|`.
pub fn interference_covariance<T: Real>(config: &ScenarioConfig) -> Result<HermitianPd<T>> {
    let n = config.n_antennas;
    let sigma2 = T::lit(config.noise_power);
    let pc = T::lit(config.clutter_power());
    let rho = T::lit(config.clutter_corr);
    let m = ComplexMatrix::from_fn(n, n, |i, j| {
        let lag = i.abs_diff(j);
        let clutter = pc * rho.powi(lag as i32);
        let noise = if i == j { sigma2 } else { T::zero() };
        Complex::new(noise + clutter, T::zero())
    });
    HermitianPd::new(m)
}

/// Amplitude giving `|α|² v† M⁻¹ v` equal to the requested SINR; `-inf` dB maps to zero.
pub fn alpha_from_sinr<T: Real>(
    sinr_db: T,
    m: &HermitianPd<T>,
    v: &ComplexVector<T>,
    phase: T,
) -> Result<Complex<T>> {
    let gain = m.inv_norm_sqr(v)?;
    if !(gain > T::zero()) {
        return Err(Error::InvalidData("steering vector must be nonzero".into()));
    }
    let sinr = T::lit(10.0).powf(sinr_db / T::lit(10.0));
    Ok(Complex::from_polar((sinr / gain).sqrt(), phase))
}

/// Precomputed per-scenario quantities shared by all trials.
#[derive(Debug, Clone)]
pub struct TrialModel<T> {
    pub n_pulses: usize,
    pub n_training: usize,
    pub covariance: HermitianPd<T>,
    pub steering: ComplexVector<T>,
    pub amplitude: AmplitudePolicy,
}

impl<T: Real> TrialModel<T> {
    pub fn from_config(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            n_pulses: config.n_pulses,
            n_training: config.n_training,
            covariance: interference_covariance(config)?,
            steering: steering_vector(config.n_antennas, T::lit(config.spatial_frequency)),
            amplitude: config.amplitude,
        })
    }

    #[inline]
    pub fn n_antennas(&self) -> usize {
        self.steering.dim()
    }

    /// Amplitude for the given SINR under this model's phase policy.
    pub fn alpha(&self, sinr_db: T) -> Result<Complex<T>> {
        let phase = match self.amplitude {
            AmplitudePolicy::Fixed { phase } => T::lit(phase),
            AmplitudePolicy::RandomPhase => T::zero(),
        };
        alpha_from_sinr(sinr_db, &self.covariance, &self.steering, phase)
    }
}

/// One realization of the cell-under-test snapshots and the training data.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialData<T> {
    /// `N_a × N_p` snapshots of the cell under test.
    pub z: ComplexMatrix<T>,
    /// `N_a × K` target-free training snapshots.
    pub r: ComplexMatrix<T>,
    pub truth: Hypothesis,
    pub alpha: Complex<T>,
}

/// Draws `R` (all columns `CN(0, M)`), then `Z` (columns `CN(0, M)` plus
/// `α_i v` on the occupied pulses). Under [`AmplitudePolicy::RandomPhase`] the
/// per-pulse phases are drawn after the noise.
pub fn synthesize_trial<T: Real, R: Rng + ?Sized>(
    model: &TrialModel<T>,
    hypothesis: Hypothesis,
    alpha: Complex<T>,
    rng: &mut R,
) -> TrialData<T>
where
    StandardNormal: Distribution<T>,
{
    let n_a = model.n_antennas();
    let mut r = ComplexMatrix::zeros(n_a, model.n_training);
    for k in 0..model.n_training {
        r.set_column(k, &model.covariance.sample_cn(rng));
    }
    let mut z = ComplexMatrix::zeros(n_a, model.n_pulses);
    for i in 0..model.n_pulses {
        z.set_column(i, &model.covariance.sample_cn(rng));
    }
    if let Hypothesis::Target(support) = hypothesis {
        for i in support.indices() {
            let a = match model.amplitude {
                AmplitudePolicy::Fixed { .. } => alpha,
                AmplitudePolicy::RandomPhase => {
                    let u = T::lit(rng.random::<f64>());
                    Complex::from_polar(alpha.norm(), T::TAU() * u)
                }
            };
            for m in 0..n_a {
                z[(m, i)] += a * model.steering[m];
            }
        }
    }
    TrialData {
        z,
        r,
        truth: hypothesis,
        alpha,
    }
}

/// Timing of a pulse train observing a target with constant radial velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseTiming {
    /// Pulse repetition time `T`, seconds.
    pub prt: f64,
    /// Pulse width `T_p`, seconds.
    pub pulse_width: f64,
    /// Radial velocity, m/s, positive when approaching.
    pub radial_velocity: f64,
    pub light_speed: f64,
    pub n_pulses: usize,
}

/// Rounded propagation speed, m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

impl PulseTiming {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if !(self.prt > 0.0 && self.prt.is_finite()) {
            return bad("pulse repetition time must be positive and finite");
        }
        if !(self.pulse_width > 0.0 && self.pulse_width < self.prt) {
            return bad("pulse width must be positive and shorter than the pulse repetition time");
        }
        if !(self.light_speed > 0.0 && self.light_speed.is_finite()) {
            return bad("propagation speed must be positive and finite");
        }
        if !(self.radial_velocity.abs() < self.light_speed) {
            return bad("radial velocity must be below the propagation speed");
        }
        if self.n_pulses == 0 {
            return bad("at least one pulse is required");
        }
        Ok(())
    }

    /// Range gate `k` holding the echo of pulse `n` (0-based): the integer nearest
    /// to `−n T (2v/c) / T_p`, with exact half-way ties going to the smaller `|k|`.
    pub fn gate_of_pulse(&self, n: usize) -> i64 {
        let walk = n as f64 * self.prt * (2.0 * self.radial_velocity / self.light_speed)
            / self.pulse_width;
        let x = -walk;
        let lo = x.floor();
        let frac = x - lo;
        // The gate intervals are closed; values within rounding of an edge count as on it.
        let tol = 1e-9 * x.abs().max(1.0);
        let k = if (frac - 0.5).abs() <= tol {
            if lo.abs() <= (lo + 1.0).abs() {
                lo
            } else {
                lo + 1.0
            }
        } else if frac < 0.5 {
            lo
        } else {
            lo + 1.0
        };
        k as i64
    }
}

/// Pulses of one range gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GateOccupancy {
    pub gate: i64,
    pub support: SupportHypothesis,
}

/// Support of range gate `gate`, or `None` when no pulse falls in it.
pub fn range_gate_occupancy(timing: &PulseTiming, gate: i64) -> Option<SupportHypothesis> {
    let pulses: Vec<usize> = (0..timing.n_pulses)
        .filter(|&n| timing.gate_of_pulse(n) == gate)
        .collect();
    let first = *pulses.first()?;
    let last = *pulses.last()?;
    debug_assert_eq!(
        last - first + 1,
        pulses.len(),
        "gate occupancy must be contiguous"
    );
    Some(SupportHypothesis {
        l: first + 1,
        h: last - first,
    })
}

/// Every occupied gate, ordered by first pulse.
pub fn occupancy_table(timing: &PulseTiming) -> Vec<GateOccupancy> {
    let mut out: Vec<GateOccupancy> = Vec::new();
    for n in 0..timing.n_pulses {
        let gate = timing.gate_of_pulse(n);
        match out.last_mut() {
            Some(last) if last.gate == gate => last.support.h += 1,
            _ => out.push(GateOccupancy {
                gate,
                support: SupportHypothesis { l: n + 1, h: 0 },
            }),
        }
    }
    out
}

/// Ambiguity function of a unit rectangular pulse on `[0, T_p]`,
/// `(1/T_p) ∫ p(u) p(u − τ) e^{j2π f_d u} du`, normalized to 1 at the origin.
pub fn rect_ambiguity<T: Real>(tau: T, doppler: T, pulse_width: T) -> Complex<T> {
    assert!(pulse_width > T::zero(), "pulse width must be positive");
    if tau.abs() >= pulse_width {
        return Complex::new(T::zero(), T::zero());
    }
    let a = tau.max(T::zero());
    let b = pulse_width.min(pulse_width + tau);
    let len = b - a;
    let x = T::PI() * doppler * len;
    let sinc = if x.abs() < T::lit(1e-8) {
        T::one()
    } else {
        x.sin() / x
    };
    let mid = T::PI() * doppler * (a + b);
    Complex::from_polar(len / pulse_width * sinc, mid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn steering_examples() {
        let v = steering_vector::<f64>(8, 0.0);
        assert!(v.as_slice().iter().all(|c| *c == Complex::new(1.0, 0.0)));
        let v = steering_vector::<f64>(2, 0.25);
        assert!((v[1] - Complex::new(0.0, 1.0)).norm() < 1e-15);
        let v = steering_vector::<f64>(4, 0.1);
        for m in 0..4 {
            let expect = Complex::new(
                (0.2 * std::f64::consts::PI * m as f64).cos(),
                (0.2 * std::f64::consts::PI * m as f64).sin(),
            );
            assert!((v[m] - expect).norm() < 1e-15);
            assert!((v[m].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn default_covariance_entries() {
        let m = interference_covariance::<f64>(&ScenarioConfig::default()).unwrap();
        assert!((m.matrix()[(0, 0)].re - 101.0).abs() < 1e-12);
        assert!((m.matrix()[(0, 1)].re - 95.0).abs() < 1e-12);
        assert!((m.matrix()[(0, 2)].re - 90.25).abs() < 1e-12);
    }

    #[test]
    fn covariance_limits() {
        let no_clutter = ScenarioConfig {
            cnr_db: f64::NEG_INFINITY,
            noise_power: 2.0,
            ..Default::default()
        };
        let m = interference_covariance::<f64>(&no_clutter).unwrap();
        assert_eq!(m.matrix(), &ComplexMatrix::from_diag(&[2.0; 8]));

        let white = ScenarioConfig {
            clutter_corr: 0.0,
            ..Default::default()
        };
        let m = interference_covariance::<f64>(&white).unwrap();
        let expect = ComplexMatrix::from_diag(&[101.0; 8]);
        assert!(m.matrix().sub(&expect).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn covariance_pd_over_correlation_sweep() {
        for i in 0..100 {
            let cfg = ScenarioConfig {
                clutter_corr: i as f64 / 100.0,
                ..Default::default()
            };
            let m = interference_covariance::<f64>(&cfg).unwrap();
            assert!(m.reconstruction_error() <= 1e-10);
        }
    }

    #[test]
    fn alpha_examples() {
        let id = HermitianPd::new(ComplexMatrix::<f64>::identity(8)).unwrap();
        let v = steering_vector::<f64>(8, 0.0);
        let a = alpha_from_sinr(10.0 * 8f64.log10(), &id, &v, 0.0).unwrap();
        assert!((a.norm() - 1.0).abs() < 1e-12);
        let a = alpha_from_sinr(f64::NEG_INFINITY, &id, &v, 0.0).unwrap();
        assert_eq!(a.norm(), 0.0);
        let a = alpha_from_sinr(3.0, &id, &v, 1.0).unwrap();
        assert!((a.arg() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(ScenarioConfig::default().validate().is_ok());
        let k_small = ScenarioConfig {
            n_training: 4,
            ..Default::default()
        };
        assert_eq!(
            k_small.validate().unwrap_err(),
            Error::InsufficientTraining {
                n_training: 4,
                n_antennas: 8
            }
        );
        let rho = ScenarioConfig {
            gic_rho_joint: 1.0,
            ..Default::default()
        };
        assert!(matches!(rho.validate(), Err(Error::InvalidConfig(_))));
        let nu = ScenarioConfig {
            spatial_frequency: 0.5,
            ..Default::default()
        };
        assert!(matches!(nu.validate(), Err(Error::InvalidConfig(_))));
        let corr = ScenarioConfig {
            clutter_corr: 1.0,
            ..Default::default()
        };
        assert!(matches!(corr.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn support_candidates_and_bounds() {
        let all: Vec<_> = SupportHypothesis::candidates(16).collect();
        assert_eq!(all.len(), 136);
        assert_eq!(all[0], SupportHypothesis::new(1, 0, 16).unwrap());
        assert_eq!(
            *all.last().unwrap(),
            SupportHypothesis::new(16, 0, 16).unwrap()
        );
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(SupportHypothesis::new(0, 0, 4).is_err());
        assert!(SupportHypothesis::new(3, 2, 4).is_err());
        assert_eq!(SupportHypothesis::new(3, 1, 4).unwrap().indices(), 2..=3);
    }

    #[test]
    fn drawn_supports_follow_the_two_step_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n_p = 4;
        let mut counts = std::collections::HashMap::new();
        let n = 200_000;
        for _ in 0..n {
            *counts
                .entry(SupportHypothesis::draw(n_p, &mut rng))
                .or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 10);
        for (s, c) in counts {
            // P(h) = 1/N_p, P(l | h) = 1/(N_p − h)
            let p = 1.0 / n_p as f64 / (n_p - s.h()) as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((c as f64 / n as f64 - p).abs() < 5.0 * se, "{s}: {c}");
        }
    }

    #[test]
    fn synthesize_is_deterministic() {
        let model = TrialModel::<f64>::from_config(&ScenarioConfig::default()).unwrap();
        let hyp = Hypothesis::Target(SupportHypothesis::new(3, 4, 16).unwrap());
        let a = synthesize_trial(
            &model,
            hyp,
            Complex::new(2.0, 0.0),
            &mut ChaCha8Rng::seed_from_u64(1),
        );
        let b = synthesize_trial(
            &model,
            hyp,
            Complex::new(2.0, 0.0),
            &mut ChaCha8Rng::seed_from_u64(1),
        );
        assert_eq!(a, b);
        assert_eq!(
            (a.z.rows(), a.z.cols(), a.r.rows(), a.r.cols()),
            (8, 16, 8, 16)
        );
    }

    #[test]
    fn synthesize_strong_target_moments() {
        let cfg = ScenarioConfig {
            amplitude: AmplitudePolicy::Fixed { phase: 0.3 },
            ..Default::default()
        };
        let model = TrialModel::<f64>::from_config(&cfg).unwrap();
        let support = SupportHypothesis::new(5, 3, 16).unwrap();
        let alpha = model.alpha(60.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 2000;
        let mut mean = ComplexMatrix::<f64>::zeros(8, 16);
        for _ in 0..n {
            let t = synthesize_trial(&model, Hypothesis::Target(support), alpha, &mut rng);
            for i in 0..8 {
                for j in 0..16 {
                    mean[(i, j)] += t.z[(i, j)] / n as f64;
                }
            }
        }
        // noise std of a mean entry is sqrt(101 / n) ≈ 0.22 against |α| in the hundreds
        for j in 0..16 {
            for i in 0..8 {
                let expect = if support.contains_index(j) {
                    alpha * model.steering[i]
                } else {
                    Complex::new(0.0, 0.0)
                };
                assert!((mean[(i, j)] - expect).norm() < 1.5, "({i},{j})");
            }
        }
        assert!(alpha.norm() > 100.0);
    }

    #[test]
    fn random_phase_policy_keeps_modulus() {
        let cfg = ScenarioConfig {
            amplitude: AmplitudePolicy::RandomPhase,
            cnr_db: f64::NEG_INFINITY,
            noise_power: 1e-12,
            ..Default::default()
        };
        let model = TrialModel::<f64>::from_config(&cfg).unwrap();
        let support = SupportHypothesis::full(16);
        let t = synthesize_trial(
            &model,
            Hypothesis::Target(support),
            Complex::new(3.0, 0.0),
            &mut ChaCha8Rng::seed_from_u64(2),
        );
        let phases: Vec<f64> = (0..16).map(|j| t.z[(0, j)].arg()).collect();
        for j in 0..16 {
            assert!((t.z[(0, j)].norm() - 3.0).abs() < 1e-4);
        }
        assert!(phases.windows(2).any(|w| (w[0] - w[1]).abs() > 1e-3));
    }

    fn timing(v: f64) -> PulseTiming {
        PulseTiming {
            prt: 1e-3,
            pulse_width: 1e-6,
            radial_velocity: v,
            light_speed: 3e8,
            n_pulses: 16,
        }
    }

    #[test]
    fn occupancy_without_motion() {
        let t = timing(0.0);
        assert_eq!(
            range_gate_occupancy(&t, 0),
            Some(SupportHypothesis::full(16))
        );
        assert_eq!(range_gate_occupancy(&t, 1), None);
        assert_eq!(range_gate_occupancy(&t, -1), None);
        assert_eq!(occupancy_table(&t).len(), 1);
    }

    #[test]
    fn occupancy_worked_example() {
        // walk per pulse is 0.05 T_p; pulse 10 sits exactly on the 0/−1 edge
        let t = timing(7500.0);
        assert_eq!(
            range_gate_occupancy(&t, 0),
            Some(SupportHypothesis::new(1, 10, 16).unwrap())
        );
        assert_eq!(
            range_gate_occupancy(&t, -1),
            Some(SupportHypothesis::new(12, 4, 16).unwrap())
        );
        assert_eq!(range_gate_occupancy(&t, 1), None);
    }

    #[test]
    fn occupancy_receding_mirrors() {
        let t = timing(-7500.0);
        assert_eq!(
            range_gate_occupancy(&t, 0),
            Some(SupportHypothesis::new(1, 10, 16).unwrap())
        );
        assert_eq!(
            range_gate_occupancy(&t, 1),
            Some(SupportHypothesis::new(12, 4, 16).unwrap())
        );
        assert!(occupancy_table(&t).iter().all(|g| g.gate >= 0));
    }

    #[test]
    fn timing_validation() {
        assert!(timing(10.0).validate().is_ok());
        assert!(PulseTiming {
            pulse_width: 2e-3,
            ..timing(0.0)
        }
        .validate()
        .is_err());
        assert!(PulseTiming {
            radial_velocity: 4e8,
            ..timing(0.0)
        }
        .validate()
        .is_err());
        assert!(PulseTiming {
            n_pulses: 0,
            ..timing(0.0)
        }
        .validate()
        .is_err());
    }

    #[test]
    fn ambiguity_examples() {
        let tp = 1e-6;
        assert!((rect_ambiguity(0.0, 0.0, tp) - Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(rect_ambiguity(tp, 12345.0, tp), Complex::new(0.0, 0.0));
        assert_eq!(rect_ambiguity(-tp, 0.0, tp), Complex::new(0.0, 0.0));
        assert!((rect_ambiguity(tp / 2.0, 0.0, tp) - Complex::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn ambiguity_matches_quadrature() {
        // midpoint rule on the overlap of p(u) and p(u − τ)
        let tp = 2.0;
        for &(tau, fd) in &[
            (0.3, 0.7),
            (-1.1, 0.2),
            (0.0, 1.3),
            (1.9, -0.4),
            (-0.5, 0.0),
        ] {
            let steps = 200_000;
            let du = tp / steps as f64;
            let mut acc = Complex::new(0.0, 0.0);
            for s in 0..steps {
                let u = (s as f64 + 0.5) * du;
                if u - tau >= 0.0 && u - tau <= tp {
                    acc += Complex::from_polar(du, std::f64::consts::TAU * fd * u);
                }
            }
            let expect = acc / tp;
            let got = rect_ambiguity(tau, fd, tp);
            assert!(
                (got - expect).norm() < 1e-4,
                "tau={tau} fd={fd}: {got} vs {expect}"
            );
        }
    }
}
