//! Desk-scale run of the default experiment, printing P_d and RMSE tables.
//!
//! `cargo run --release -p migdet-core --example desk_run [calibration_trials] [grid_step_db] [pfa]`

use migdet::config::ExperimentConfig;
use migdet::montecarlo::run_experiment;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let mut cfg = ExperimentConfig::default();
    if let Some(n) = args.next() {
        cfg.montecarlo.calibration_trials = n.parse()?;
    }
    if let Some(step) = args.next() {
        let step: f64 = step.parse()?;
        let n = (24.0 / step).round() as usize;
        cfg.montecarlo.sinr_grid_db = (0..=n).map(|i| i as f64 * step).collect();
    }
    if let Some(pfa) = args.next() {
        cfg.montecarlo.pfa = pfa.parse()?;
    }
    let report = run_experiment(&cfg)?;
    let p = &report.payload;
    for c in &p.calibration {
        println!(
            "{:<20} eta={:.6e} emp_pfa={:.2e}",
            c.detector, c.threshold, c.empirical_pfa_at_threshold
        );
    }
    print!("{:>6}", "sinr");
    for c in &p.pd_curves {
        print!(
            " {:>10}",
            &c.detector.name()[..10.min(c.detector.name().len())]
        );
    }
    println!();
    for (i, s) in cfg.montecarlo.sinr_grid_db.iter().enumerate() {
        print!("{s:>6.1}");
        for c in &p.pd_curves {
            print!(" {:>10.3}", c.points[i].pd);
        }
        for r in &p.rmse_curves {
            print!(" | {}: {:.2}", r.selector, r.points[i].rmse_joint);
        }
        println!();
    }
    println!(
        "wall {:.1}s, {:.0} trials/s",
        report.timing.wall_seconds, report.timing.trials_per_second
    );
    Ok(())
}
