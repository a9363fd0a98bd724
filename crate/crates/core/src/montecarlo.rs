//! Monte Carlo trial engine: threshold calibration, detection-probability and
//! support-RMSE sweeps.
//!
//! Trial `i` of a phase always draws from substream `(master seed, phase, i)`,
//! and results are gathered in trial order before any floating-point
//! reduction, so every output is independent of the worker count.

use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{scenario_hash, ExperimentConfig};
use crate::detectors::{
    amf_cell_statistics, clairvoyant, gamf, gic_two_step_select, one_stage_gic_amf,
    two_stage_detect, CellStatistics, JointGic, SelectionResult,
};
use crate::error::{Error, Result};
use crate::rng::{Phase, StreamFamily};
use crate::scenario::{
    synthesize_trial, Hypothesis, ScenarioConfig, SupportHypothesis, TrialData, TrialModel,
};

/// The detectors compared in the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorId {
    /// Two-step GIC selection followed by the AMF sum on the selected support.
    TwoStageTwoStep,
    /// Joint-likelihood GIC selection followed by the AMF sum on the selected support.
    TwoStageJoint,
    /// One-stage detector maximizing the penalized AMF sum.
    OneStageTwoStep,
    /// One-stage detector built on the joint-likelihood GIC.
    OneStageJoint,
    Gamf,
    /// Known covariance and known support.
    Clairvoyant,
}

impl DetectorId {
    pub const ALL: [DetectorId; 6] = [
        DetectorId::TwoStageTwoStep,
        DetectorId::TwoStageJoint,
        DetectorId::OneStageTwoStep,
        DetectorId::OneStageJoint,
        DetectorId::Gamf,
        DetectorId::Clairvoyant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DetectorId::TwoStageTwoStep => "two_stage_two_step",
            DetectorId::TwoStageJoint => "two_stage_joint",
            DetectorId::OneStageTwoStep => "one_stage_two_step",
            DetectorId::OneStageJoint => "one_stage_joint",
            DetectorId::Gamf => "gamf",
            DetectorId::Clairvoyant => "clairvoyant",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    fn needs_joint(self) -> bool {
        matches!(self, DetectorId::TwoStageJoint | DetectorId::OneStageJoint)
    }
}

impl std::fmt::Display for DetectorId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DetectorId::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown detector '{s}'")))
    }
}

/// Support estimators scored by the RMSE sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectorId {
    TwoStep,
    Joint,
}

impl SelectorId {
    pub const ALL: [SelectorId; 2] = [SelectorId::TwoStep, SelectorId::Joint];

    pub fn name(self) -> &'static str {
        match self {
            SelectorId::TwoStep => "two_step",
            SelectorId::Joint => "joint",
        }
    }
}

impl std::fmt::Display for SelectorId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SelectorId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SelectorId::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown selector '{s}'")))
    }
}

/// Statistics and support estimates of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialEvaluation {
    statistics: [f64; 6],
    pub two_step_support: SupportHypothesis,
    pub joint_support: Option<SupportHypothesis>,
}

impl TrialEvaluation {
    /// Statistic of `id`; NaN when the detector was not evaluated.
    pub fn statistic(&self, id: DetectorId) -> f64 {
        self.statistics[id.index()]
    }
}

/// Scenario-level state needed to evaluate every detector on a trial.
#[derive(Debug, Clone)]
pub struct DetectorBank {
    pub model: TrialModel<f64>,
    pub rho_two_step: f64,
    pub rho_joint: f64,
}

impl DetectorBank {
    pub fn new(scenario: &ScenarioConfig) -> Result<Self> {
        Ok(Self {
            model: TrialModel::from_config(scenario)?,
            rho_two_step: scenario.gic_rho_two_step,
            rho_joint: scenario.gic_rho_joint,
        })
    }

    /// Evaluates the requested detectors. `known_support` is what the clairvoyant
    /// detector is told; for target-free trials the caller supplies one.
    pub fn evaluate(
        &self,
        trial: &TrialData<f64>,
        known_support: SupportHypothesis,
        detectors: &[DetectorId],
        with_joint: bool,
    ) -> Result<TrialEvaluation> {
        let v = &self.model.steering;
        let k = self.model.n_training;
        let stats: CellStatistics<f64> = amf_cell_statistics(&trial.z, &trial.r, v)?;
        let two_step = gic_two_step_select(&stats, k, self.rho_two_step);
        let joint = if with_joint || detectors.iter().any(|d| d.needs_joint()) {
            Some(JointGic::new(&trial.z, &trial.r, v)?.log_dets()?)
        } else {
            None
        };
        let joint_sel: Option<SelectionResult<f64>> =
            joint.as_ref().map(|j| j.select(self.rho_joint, false));

        let mut out = [f64::NAN; 6];
        for &d in detectors {
            out[d.index()] = match d {
                DetectorId::TwoStageTwoStep => two_stage_detect(&stats, &two_step).statistic,
                DetectorId::TwoStageJoint => {
                    two_stage_detect(&stats, joint_sel.as_ref().expect("joint table")).statistic
                }
                DetectorId::OneStageTwoStep => {
                    one_stage_gic_amf(&stats, k, self.rho_two_step).statistic
                }
                DetectorId::OneStageJoint => {
                    joint
                        .as_ref()
                        .expect("joint table")
                        .one_stage(self.rho_joint)
                        .statistic
                }
                DetectorId::Gamf => gamf(&stats).statistic,
                DetectorId::Clairvoyant => {
                    let s =
                        clairvoyant(&trial.z, &self.model.covariance, v, known_support)?.statistic;
                    gamma_log_survival(known_support.len(), s)
                }
            };
        }
        Ok(TrialEvaluation {
            statistics: out,
            two_step_support: two_step.support,
            joint_support: joint_sel.map(|s| s.support),
        })
    }
}

/// Threshold of one detector for a target false-alarm probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub detector: DetectorId,
    pub threshold: f64,
    pub target_pfa: f64,
    pub n_trials: usize,
    pub empirical_pfa_at_threshold: f64,
    pub seed: u64,
    pub config_hash: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdPoint {
    pub sinr_db: f64,
    pub pd: f64,
    pub stderr: f64,
    pub n_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdCurve {
    pub detector: DetectorId,
    pub threshold: f64,
    pub config_hash: String,
    pub points: Vec<PdPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmsePoint {
    pub sinr_db: f64,
    pub rmse_l: f64,
    pub rmse_h: f64,
    pub rmse_joint: f64,
    pub n_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmseCurve {
    pub selector: SelectorId,
    pub points: Vec<RmsePoint>,
}

/// Re-measured false-alarm rate of a calibrated threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalseAlarmCheck {
    pub detector: DetectorId,
    pub threshold: f64,
    pub n_trials: usize,
    pub exceedances: usize,
    pub empirical_pfa: f64,
}

/// `−ln Q(n, s)` for the regularized upper incomplete gamma function with integer
/// shape `n ≥ 1`, i.e. `s − ln Σ_{k<n} s^k/k!`.
///
/// With known `M` the clairvoyant sum over `n` cells is Gamma(n, 1) under H0, so this
/// map is Exp(1) for every support length and one threshold fixes the false-alarm
/// rate conditionally on the support the detector is told.
pub fn gamma_log_survival(n: usize, s: f64) -> f64 {
    assert!(n >= 1, "shape must be positive");
    if s <= 0.0 {
        return 0.0;
    }
    let ln_s = s.ln();
    let mut terms = Vec::with_capacity(n);
    let mut ln_fact = 0.0;
    for k in 0..n {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        terms.push(k as f64 * ln_s - ln_fact);
    }
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    s - (max + sum.ln())
}

/// Binomial standard error `√(p(1−p)/n)`.
pub fn binomial_stderr(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Number of statistics allowed above the threshold: `⌊n · P_fa⌋`.
pub fn allowed_exceedances(n_trials: usize, target_pfa: f64) -> usize {
    // guard against products such as 1e5 · 1e-3 landing just below an integer
    let x = n_trials as f64 * target_pfa;
    (x * (1.0 + 1e-12)).floor() as usize
}

/// Order-statistic threshold: with `m = ⌊n · P_fa⌋`, the `(m+1)`-th largest
/// statistic. Returns the threshold and the fraction of statistics strictly above it.
pub fn threshold_from_statistics(statistics: &mut [f64], target_pfa: f64) -> Result<(f64, f64)> {
    let n = statistics.len();
    if !(target_pfa > 0.0 && target_pfa < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "target P_fa {target_pfa} outside (0, 1)"
        )));
    }
    if (n as f64) * target_pfa < 10.0 - 1e-9 {
        return Err(Error::InsufficientTrials {
            n_trials: n,
            target_pfa,
        });
    }
    if statistics.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidData("NaN detector statistic".into()));
    }
    statistics.sort_unstable_by(|a, b| b.total_cmp(a));
    let m = allowed_exceedances(n, target_pfa);
    let threshold = statistics[m];
    let above = statistics.iter().take_while(|&&x| x > threshold).count();
    Ok((threshold, above as f64 / n as f64))
}

/// Trial engine bound to one scenario and a worker pool.
pub struct Engine {
    bank: DetectorBank,
    config_hash: String,
    pool: rayon::ThreadPool,
}

impl Engine {
    /// `workers = None` uses rayon's default thread count.
    pub fn new(scenario: &ScenarioConfig, workers: Option<usize>) -> Result<Self> {
        let bank = DetectorBank::new(scenario)?;
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(w) = workers {
            builder = builder.num_threads(w.max(1));
        }
        let pool = builder
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        Ok(Self {
            bank,
            config_hash: scenario_hash(scenario),
            pool,
        })
    }

    pub fn bank(&self) -> &DetectorBank {
        &self.bank
    }

    pub fn config_hash(&self) -> &str {
        &self.config_hash
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    fn par_map<R: Send>(
        &self,
        n: usize,
        f: impl Fn(usize) -> Result<R> + Sync + Send,
    ) -> Result<Vec<R>> {
        self.pool
            .install(|| (0..n).into_par_iter().map(f).collect())
    }

    /// Target-free trial `index` of `family`. The clairvoyant detector's support is
    /// drawn first, with the same law as the target supports of the detection sweep.
    fn null_trial(
        &self,
        family: &StreamFamily,
        index: usize,
    ) -> (TrialData<f64>, SupportHypothesis) {
        let mut rng = family.stream(index as u64);
        let support = SupportHypothesis::draw(self.bank.model.n_pulses, &mut rng);
        let trial = synthesize_trial(
            &self.bank.model,
            Hypothesis::Null,
            Complex::new(0.0, 0.0),
            &mut rng,
        );
        (trial, support)
    }

    fn target_trial(
        &self,
        family: &StreamFamily,
        index: usize,
        alpha: Complex<f64>,
    ) -> (TrialData<f64>, SupportHypothesis) {
        let mut rng = family.stream(index as u64);
        let support = SupportHypothesis::draw(self.bank.model.n_pulses, &mut rng);
        let trial = synthesize_trial(
            &self.bank.model,
            Hypothesis::Target(support),
            alpha,
            &mut rng,
        );
        (trial, support)
    }

    /// Statistics of `detectors` on `n_trials` target-free trials of `phase`,
    /// one vector per detector, in trial order.
    pub fn null_statistics(
        &self,
        detectors: &[DetectorId],
        n_trials: usize,
        seed: u64,
        phase: Phase,
    ) -> Result<Vec<Vec<f64>>> {
        let family = StreamFamily::new(seed, phase);
        let rows = self.par_map(n_trials, |i| {
            let (trial, support) = self.null_trial(&family, i);
            self.bank.evaluate(&trial, support, detectors, false)
        })?;
        Ok(detectors
            .iter()
            .map(|&d| rows.iter().map(|r| r.statistic(d)).collect())
            .collect())
    }

    /// Calibrates every detector in `detectors` on one shared batch of
    /// target-free trials. Two-stage detectors run their selection stage on the
    /// same data, so the whole pipeline is calibrated.
    pub fn calibrate(
        &self,
        detectors: &[DetectorId],
        target_pfa: f64,
        n_trials: usize,
        seed: u64,
    ) -> Result<Vec<CalibrationResult>> {
        if !(target_pfa > 0.0 && target_pfa < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "target P_fa {target_pfa} outside (0, 1)"
            )));
        }
        if (n_trials as f64) * target_pfa < 10.0 - 1e-9 {
            return Err(Error::InsufficientTrials {
                n_trials,
                target_pfa,
            });
        }
        if (n_trials as f64) * target_pfa < 100.0 - 1e-9 {
            log::warn!("{n_trials} calibration trials give fewer than 100 expected exceedances at P_fa={target_pfa:e}");
        }
        let columns = self.null_statistics(detectors, n_trials, seed, Phase::Calibration)?;
        detectors
            .iter()
            .zip(columns)
            .map(|(&detector, mut stats)| {
                let (threshold, empirical) = threshold_from_statistics(&mut stats, target_pfa)?;
                Ok(CalibrationResult {
                    detector,
                    threshold,
                    target_pfa,
                    n_trials,
                    empirical_pfa_at_threshold: empirical,
                    seed,
                    config_hash: self.config_hash.clone(),
                })
            })
            .collect()
    }

    pub fn calibrate_threshold(
        &self,
        detector: DetectorId,
        target_pfa: f64,
        n_trials: usize,
        seed: u64,
    ) -> Result<CalibrationResult> {
        Ok(self
            .calibrate(&[detector], target_pfa, n_trials, seed)?
            .remove(0))
    }

    fn check_hash(&self, calibrations: &[CalibrationResult]) -> Result<()> {
        for c in calibrations {
            if c.config_hash != self.config_hash {
                return Err(Error::ConfigMismatch {
                    expected: self.config_hash.clone(),
                    found: c.config_hash.clone(),
                });
            }
        }
        Ok(())
    }

    /// Counts exceedances of calibrated thresholds on a fresh target-free batch.
    pub fn false_alarm_check(
        &self,
        calibrations: &[CalibrationResult],
        n_trials: usize,
        seed: u64,
    ) -> Result<Vec<FalseAlarmCheck>> {
        self.check_hash(calibrations)?;
        let detectors: Vec<DetectorId> = calibrations.iter().map(|c| c.detector).collect();
        let family = StreamFamily::new(seed, Phase::FalseAlarmCheck);
        let counts = self.pool.install(|| {
            (0..n_trials)
                .into_par_iter()
                .map(|i| {
                    let (trial, support) = self.null_trial(&family, i);
                    let e = self.bank.evaluate(&trial, support, &detectors, false)?;
                    Ok(calibrations
                        .iter()
                        .map(|c| usize::from(e.statistic(c.detector) > c.threshold))
                        .collect::<Vec<_>>())
                })
                .try_reduce(
                    || vec![0; calibrations.len()],
                    |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect()),
                )
        })?;
        Ok(calibrations
            .iter()
            .zip(counts)
            .map(|(c, exceedances)| FalseAlarmCheck {
                detector: c.detector,
                threshold: c.threshold,
                n_trials,
                exceedances,
                empirical_pfa: exceedances as f64 / n_trials as f64,
            })
            .collect())
    }

    /// Detection probability against SINR. Each trial draws `h` then `l`, and
    /// trial `i` reuses the same random numbers at every grid point.
    pub fn estimate_pd(
        &self,
        calibrations: &[CalibrationResult],
        sinr_grid_db: &[f64],
        n_trials: usize,
        seed: u64,
    ) -> Result<Vec<PdCurve>> {
        self.check_hash(calibrations)?;
        let detectors: Vec<DetectorId> = calibrations.iter().map(|c| c.detector).collect();
        let family = StreamFamily::new(seed, Phase::Detection);
        let mut curves: Vec<PdCurve> = calibrations
            .iter()
            .map(|c| PdCurve {
                detector: c.detector,
                threshold: c.threshold,
                config_hash: c.config_hash.clone(),
                points: Vec::new(),
            })
            .collect();
        for &sinr_db in sinr_grid_db {
            let alpha = self.bank.model.alpha(sinr_db)?;
            let hits = self.par_map(n_trials, |i| {
                let (trial, support) = self.target_trial(&family, i, alpha);
                let e = self.bank.evaluate(&trial, support, &detectors, false)?;
                Ok(calibrations
                    .iter()
                    .map(|c| e.statistic(c.detector) > c.threshold)
                    .collect::<Vec<bool>>())
            })?;
            for (j, curve) in curves.iter_mut().enumerate() {
                let count = hits.iter().filter(|h| h[j]).count();
                let pd = count as f64 / n_trials as f64;
                curve.points.push(PdPoint {
                    sinr_db,
                    pd,
                    stderr: binomial_stderr(pd, n_trials),
                    n_trials,
                });
            }
        }
        Ok(curves)
    }

    /// Support-estimation RMSE of the built-in selectors.
    pub fn estimate_rmse(
        &self,
        selectors: &[SelectorId],
        sinr_grid_db: &[f64],
        n_trials: usize,
        seed: u64,
    ) -> Result<Vec<RmseCurve>> {
        let with_joint = selectors.contains(&SelectorId::Joint);
        let results = self.rmse_sweep(
            sinr_grid_db,
            n_trials,
            seed,
            |trial, _| {
                let e = self.bank.evaluate(
                    trial,
                    trial.truth.support().expect("target trial"),
                    &[],
                    with_joint,
                )?;
                Ok(selectors
                    .iter()
                    .map(|s| match s {
                        SelectorId::TwoStep => e.two_step_support,
                        SelectorId::Joint => e.joint_support.expect("joint evaluated"),
                    })
                    .collect())
            },
            selectors.len(),
        )?;
        Ok(selectors
            .iter()
            .zip(results)
            .map(|(&selector, points)| RmseCurve { selector, points })
            .collect())
    }

    /// RMSE of an arbitrary support estimator, on the same trials as [`Engine::estimate_rmse`].
    pub fn estimate_rmse_with<F>(
        &self,
        sinr_grid_db: &[f64],
        n_trials: usize,
        seed: u64,
        estimator: F,
    ) -> Result<Vec<RmsePoint>>
    where
        F: Fn(&TrialData<f64>, &DetectorBank) -> Result<SupportHypothesis> + Sync + Send,
    {
        let mut out = self.rmse_sweep(
            sinr_grid_db,
            n_trials,
            seed,
            |t, b| Ok(vec![estimator(t, b)?]),
            1,
        )?;
        Ok(out.remove(0))
    }

    fn rmse_sweep<F>(
        &self,
        sinr_grid_db: &[f64],
        n_trials: usize,
        seed: u64,
        estimate: F,
        n_out: usize,
    ) -> Result<Vec<Vec<RmsePoint>>>
    where
        F: Fn(&TrialData<f64>, &DetectorBank) -> Result<Vec<SupportHypothesis>> + Sync + Send,
    {
        let family = StreamFamily::new(seed, Phase::Estimation);
        let mut curves = vec![Vec::with_capacity(sinr_grid_db.len()); n_out];
        for &sinr_db in sinr_grid_db {
            let alpha = self.bank.model.alpha(sinr_db)?;
            let rows = self.par_map(n_trials, |i| {
                let (trial, truth) = self.target_trial(&family, i, alpha);
                Ok((truth, estimate(&trial, &self.bank)?))
            })?;
            for (j, curve) in curves.iter_mut().enumerate() {
                let (mut sl, mut sh) = (0.0, 0.0);
                for (truth, est) in &rows {
                    let dl = est[j].l() as f64 - truth.l() as f64;
                    let dh = est[j].h() as f64 - truth.h() as f64;
                    sl += dl * dl;
                    sh += dh * dh;
                }
                let n = n_trials as f64;
                curve.push(RmsePoint {
                    sinr_db,
                    rmse_l: (sl / n).sqrt(),
                    rmse_h: (sh / n).sqrt(),
                    rmse_joint: ((sl + sh) / n).sqrt(),
                    n_trials,
                });
            }
        }
        Ok(curves)
    }
}

/// Deterministic part of an experiment report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportPayload {
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub calibration: Vec<CalibrationResult>,
    pub pd_curves: Vec<PdCurve>,
    pub rmse_curves: Vec<RmseCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingMetrics {
    pub workers: usize,
    pub wall_seconds: f64,
    pub trials: usize,
    pub trials_per_second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    #[serde(flatten)]
    pub payload: ReportPayload,
    pub timing: TimingMetrics,
}

impl ExperimentReport {
    /// JSON of everything except timing.
    pub fn payload_json(&self) -> String {
        serde_json::to_string_pretty(&self.payload).expect("report serializes")
    }
}

/// Calibration for every enabled detector, then the detection and RMSE sweeps.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let mc = &config.montecarlo;
    let engine = Engine::new(&config.scenario, mc.workers)?;
    let calibration = engine.calibrate(
        &config.detectors.enabled,
        mc.pfa,
        mc.calibration_trials,
        mc.seed,
    )?;
    let pd_curves = engine.estimate_pd(&calibration, &mc.sinr_grid_db, mc.pd_trials, mc.seed)?;
    let rmse_curves = engine.estimate_rmse(
        &config.detectors.selectors,
        &mc.sinr_grid_db,
        mc.rmse_trials,
        mc.seed,
    )?;
    let wall = start.elapsed().as_secs_f64();
    let trials = mc.calibration_trials + mc.sinr_grid_db.len() * (mc.pd_trials + mc.rmse_trials);
    Ok(ExperimentReport {
        payload: ReportPayload {
            config_hash: engine.config_hash().to_string(),
            seed: mc.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            calibration,
            pd_curves,
            rmse_curves,
        },
        timing: TimingMetrics {
            workers: engine.workers(),
            wall_seconds: wall,
            trials,
            trials_per_second: trials as f64 / wall.max(1e-12),
        },
    })
}
