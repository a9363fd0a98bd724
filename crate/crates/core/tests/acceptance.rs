//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! The process exits with status 0 after reporting, so known failures do not
//! hide the rest of the test suite; set `MIGDET_STRICT_ACCEPTANCE=1` to turn
//! any FAIL into a non-zero exit status.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::*;
use migdet::config::ExperimentConfig;
use migdet::detectors::*;
use migdet::linalg::HermitianPd;
use migdet::montecarlo::*;
use migdet::scenario::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn desk_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.montecarlo.pfa = 1e-3;
    cfg.montecarlo.calibration_trials = 100_000;
    cfg.montecarlo.pd_trials = 1000;
    cfg.montecarlo.rmse_trials = 1000;
    cfg.montecarlo.sinr_grid_db = (0..=24).map(f64::from).collect();
    cfg
}

/// First SINR where the curve reaches `level`, by linear interpolation.
fn crossing(curve: &PdCurve, level: f64) -> Option<f64> {
    let p = &curve.points;
    if p.first()?.pd >= level {
        return Some(p[0].sinr_db);
    }
    p.windows(2)
        .find(|w| w[0].pd < level && w[1].pd >= level)
        .map(|w| {
            let f = (level - w[0].pd) / (w[1].pd - w[0].pd);
            w[0].sinr_db + f * (w[1].sinr_db - w[0].sinr_db)
        })
}

fn curve(curves: &[PdCurve], id: DetectorId) -> &PdCurve {
    curves
        .iter()
        .find(|c| c.detector == id)
        .expect("detector enabled")
}

fn ac1(curves: &[PdCurve]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for joint in [DetectorId::TwoStageJoint, DetectorId::OneStageJoint] {
        for reference in [DetectorId::Gamf, DetectorId::TwoStageTwoStep] {
            let (Some(a), Some(b)) = (
                crossing(curve(curves, joint), 0.9),
                crossing(curve(curves, reference), 0.9),
            ) else {
                return outcome(
                    false,
                    format!("{joint} or {reference} never reaches P_d = 0.9"),
                );
            };
            let gap = b - a;
            pass &= (1.5..=4.5).contains(&gap);
            parts.push(format!("{reference}-{joint} {gap:.2} dB"));
        }
    }
    outcome(
        pass,
        format!("P_d=0.9 gaps (band 3 ± 1.5 dB): {}", parts.join(", ")),
    )
}

fn ac2(curves: &[PdCurve]) -> Outcome {
    let bound = curve(curves, DetectorId::Clairvoyant);
    let mut worst = f64::INFINITY;
    let mut at = String::new();
    for c in curves
        .iter()
        .filter(|c| c.detector != DetectorId::Clairvoyant)
    {
        for (b, p) in bound.points.iter().zip(&c.points) {
            let margin = b.pd - p.pd + 2.0 * (b.stderr.powi(2) + p.stderr.powi(2)).sqrt();
            if margin < worst {
                worst = margin;
                at = format!("{} at {} dB", c.detector, p.sinr_db);
            }
        }
    }
    outcome(worst >= 0.0, format!("smallest margin {worst:.4} ({at})"))
}

fn ac3(engine: &Engine, cfg: &ExperimentConfig) -> Outcome {
    let mc = &cfg.montecarlo;
    let curves = engine
        .estimate_rmse(&SelectorId::ALL, &[12.0, 15.0], mc.rmse_trials, mc.seed)
        .unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for c in &curves {
        let (r12, r15) = (c.points[0].rmse_joint, c.points[1].rmse_joint);
        pass &= r15 < 1.0 && r12 < 1.5;
        parts.push(format!("{} {r15:.3} @15 dB, {r12:.3} @12 dB", c.selector));
    }
    outcome(
        pass,
        format!("joint RMSE (limits 1.0 and 1.5): {}", parts.join("; ")),
    )
}

fn ac4(engine: &Engine, calibration: &[CalibrationResult], cfg: &ExperimentConfig) -> Outcome {
    let mc = &cfg.montecarlo;
    let n_fresh = 10 * mc.calibration_trials;
    let checks = engine
        .false_alarm_check(calibration, n_fresh, mc.seed)
        .unwrap();
    let p = mc.pfa;
    // the threshold is itself an estimate from the calibration batch, so the
    // realized rate and its re-measurement both contribute binomial spread
    let se = (p * (1.0 - p) * (1.0 / mc.calibration_trials as f64 + 1.0 / n_fresh as f64)).sqrt();
    let mut pass = true;
    let mut parts = Vec::new();
    for c in &checks {
        let z = (c.empirical_pfa - p) / se;
        pass &= z.abs() <= 3.0;
        parts.push(format!(
            "{} {:.3e} ({z:+.2} se)",
            c.detector, c.empirical_pfa
        ));
    }
    outcome(
        pass,
        format!("{n_fresh} fresh trials, se {se:.2e}: {}", parts.join(", ")),
    )
}

fn ac5() -> Outcome {
    let n = 1008;
    let (mut argmin_ok, mut objective_ok, mut reduced_ok) = (0, 0, 0);
    let mut worst = 0.0f64;
    for inst in instances(500, n) {
        let (n_a, n_p, k) = (inst.v.dim(), inst.z.cols(), inst.r.cols());
        let t = amf_oracle(&inst);
        let (want, obj) = brute_argmin(n_p, |s| {
            -(k as f64) * s.indices().map(|i| t[i]).sum::<f64>() + 12.0 * (s.h() + 1) as f64
        });
        let stats = amf_cell_statistics(&inst.z, &inst.r, &inst.v).unwrap();
        let got = gic_two_step_select(&stats, k, 11.0);

        let table = JointGic::new(&inst.z, &inst.r, &inst.v)
            .unwrap()
            .log_dets()
            .unwrap();
        let constant = 2.0 * (n_a * (n_p + k)) as f64 * (1.0 + PI.ln());
        let mut all_close = true;
        for s in SupportHypothesis::candidates(n_p) {
            let direct = penalized_likelihood(&inst, s, 5.0);
            let reduced = table.objective(s, 5.0) + constant;
            worst = worst.max((reduced - direct).abs() / direct.abs().max(1.0));
            all_close &= close(reduced, direct, 1e-9);
        }
        let (want_j, obj_j) = brute_argmin(n_p, |s| penalized_likelihood(&inst, s, 5.0));
        let got_j = table.select(5.0, false);

        argmin_ok += usize::from(got.support == want && got_j.support == want_j);
        objective_ok += usize::from(
            close(got.objective, obj, 1e-9) && close(got_j.objective + constant, obj_j, 1e-9),
        );
        reduced_ok += usize::from(all_close);
    }
    outcome(
        argmin_ok == n && objective_ok == n && reduced_ok == n,
        format!("{n} instances: argmin {argmin_ok}, objective {objective_ok}, per-candidate likelihood {reduced_ok}; worst relative gap {worst:.1e}"),
    )
}

fn ac6() -> Outcome {
    let n = 1008;
    let mut bad = 0;
    for inst in instances(600, n) {
        let k = inst.r.cols();
        let eval = |c: f64| {
            let (z, r) = (inst.z.scaled(c), inst.r.scaled(c));
            let stats = amf_cell_statistics(&z, &r, &inst.v).unwrap();
            let table = JointGic::new(&z, &r, &inst.v).unwrap().log_dets().unwrap();
            let joint = table.select(5.0, false);
            let mut values = stats.values().to_vec();
            values.push(gamf(&stats).statistic);
            values.push(two_stage_detect(&stats, &gic_two_step_select(&stats, k, 11.0)).statistic);
            values.push(two_stage_detect(&stats, &joint).statistic);
            values.push(one_stage_gic_amf(&stats, k, 11.0).statistic);
            values.push(table.one_stage(5.0).statistic);
            (values, joint.support)
        };
        let (base, support) = eval(1.0);
        for c in [1e-3, 1e3] {
            let (other, s) = eval(c);
            if s != support || base.iter().zip(&other).any(|(a, b)| !close(*a, *b, 1e-9)) {
                bad += 1;
            }
        }
    }
    outcome(
        bad == 0,
        format!("{n} instances × scales 1e-3, 1e3: {bad} violations"),
    )
}

fn ac7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(700);
    let n = 1000;
    let (mut recon, mut rank_one, mut eigen) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..n {
        let a = random_hpd(&mut rng, 8);
        let pd = HermitianPd::new(a.clone()).unwrap();
        recon = recon.max(pd.reconstruction_error());
        let x = random_matrix(&mut rng, 8, 1).column(0);
        let mut b = a.clone();
        b.add_outer(x.as_slice(), 1.0);
        let refactored = HermitianPd::new(b).unwrap().logdet();
        rank_one = rank_one.max(
            (pd.rank_one_logdet_update(&x).unwrap() - refactored).abs() / refactored.abs().max(1.0),
        );
        let e = ln_det_eigen(&to_na(&a));
        eigen = eigen.max((pd.logdet() - e).abs() / e.abs().max(1.0));
    }
    outcome(
        recon <= 1e-10 && rank_one <= 1e-10 && eigen <= 1e-9,
        format!("{n} instances, worst: reconstruction {recon:.1e}, rank-one {rank_one:.1e}, eigenvalue {eigen:.1e}"),
    )
}

fn ac8() -> Outcome {
    let mut cfg = ExperimentConfig::default();
    cfg.montecarlo.calibration_trials = 10_000;
    cfg.montecarlo.pd_trials = 300;
    cfg.montecarlo.rmse_trials = 300;
    cfg.montecarlo.sinr_grid_db = vec![0.0, 6.0, 12.0, 18.0, 24.0];
    let payloads: Vec<String> = [1, 4, 8]
        .iter()
        .map(|&w| {
            cfg.montecarlo.workers = Some(w);
            run_experiment(&cfg).unwrap().payload_json()
        })
        .collect();
    let same = payloads.windows(2).all(|w| w[0] == w[1]);
    outcome(
        same,
        format!(
            "payloads for 1, 4, 8 workers {}",
            if same { "identical" } else { "differ" }
        ),
    )
}

fn ac9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(900);
    let mut bad = 0;
    for _ in 0..1000 {
        let timing = PulseTiming {
            prt: 10f64.powf(rng.random_range(-5.0..-2.0)),
            pulse_width: 10f64.powf(rng.random_range(-7.0..-5.0)),
            radial_velocity: rng.random_range(-3.0e4..3.0e4),
            light_speed: SPEED_OF_LIGHT,
            n_pulses: 16,
        };
        let mut seen = [0usize; 16];
        for g in occupancy_table(&timing) {
            for i in g.support.indices() {
                seen[i] += 1;
            }
        }
        bad += usize::from(seen.iter().any(|&c| c != 1));
    }
    let example = PulseTiming {
        prt: 1e-3,
        pulse_width: 1e-6,
        radial_velocity: 7500.0,
        light_speed: SPEED_OF_LIGHT,
        n_pulses: 16,
    };
    let g0 = range_gate_occupancy(&example, 0);
    let g1 = range_gate_occupancy(&example, -1);
    let example_ok = g0 == SupportHypothesis::new(1, 10, 16).ok()
        && g1 == SupportHypothesis::new(12, 4, 16).ok();
    let show = |g: Option<SupportHypothesis>| g.map_or("none".to_string(), |s| s.to_string());
    outcome(
        bad == 0 && example_ok,
        format!(
            "1000 timing triples: {bad} non-partitions; worked example gate 0 {}, gate -1 {}",
            show(g0),
            show(g1)
        ),
    )
}

fn main() {
    let start = Instant::now();
    let cfg = desk_config();
    let mc = &cfg.montecarlo;
    let engine = Engine::new(&cfg.scenario, mc.workers).unwrap();
    let calibration = engine
        .calibrate(
            &cfg.detectors.enabled,
            mc.pfa,
            mc.calibration_trials,
            mc.seed,
        )
        .unwrap();
    let pd = engine
        .estimate_pd(&calibration, &mc.sinr_grid_db, mc.pd_trials, mc.seed)
        .unwrap();

    let results = [
        ("AC1 performance ordering", ac1(&pd)),
        ("AC2 clairvoyant bound", ac2(&pd)),
        ("AC3 support RMSE", ac3(&engine, &cfg)),
        ("AC4 false-alarm control", ac4(&engine, &calibration, &cfg)),
        ("AC5 oracle equivalence", ac5()),
        ("AC6 scale invariance", ac6()),
        ("AC7 numerical kernels", ac7()),
        ("AC8 determinism", ac8()),
        ("AC9 occupancy model", ac9()),
    ];
    let mut passed = 0;
    for (name, o) in &results {
        println!(
            "{} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        passed += usize::from(o.pass);
    }
    println!(
        "acceptance: {passed}/{} criteria passed in {:.0} s",
        results.len(),
        start.elapsed().as_secs_f64()
    );
    let strict = std::env::var("MIGDET_STRICT_ACCEPTANCE").is_ok_and(|v| v == "1");
    if strict && passed < results.len() {
        std::process::exit(1);
    }
}
