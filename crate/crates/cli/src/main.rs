//! `migdet`: calibration, detection and estimation sweeps from a JSON config.

mod args;
mod artifacts;
mod error;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use migdet::config::{scenario_hash, ExperimentConfig};
use migdet::montecarlo::{run_experiment, Engine};
use migdet::scenario::{occupancy_table, range_gate_occupancy, PulseTiming, SPEED_OF_LIGHT};

use args::{parse_gate_range, parse_grid, parse_trials, SinrGrid};
use artifacts::*;
use error::{CliError, CliResult};

const DEFAULT_OUT_DIR: &str = "migdet-out";

#[derive(Parser)]
#[command(
    name = "migdet",
    version,
    about = "Detectors for range-migrating targets: thresholds, P_d and RMSE sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Calibrate detection thresholds on target-free trials; writes thresholds.csv.
    Calibrate(RunArgs),
    /// Detection probability against SINR for calibrated thresholds; writes pd_curves.csv.
    Pd {
        #[command(flatten)]
        run: RunArgs,
        /// Thresholds file (default: thresholds.csv in the output directory).
        #[arg(long)]
        thresholds: Option<PathBuf>,
    },
    /// Support-estimation RMSE against SINR; writes rmse_curves.csv.
    Rmse(RunArgs),
    /// Print which pulses fall in which range gate for a moving target.
    Occupancy(OccupancyArgs),
    /// Calibration, P_d and RMSE sweeps plus a JSON report.
    RunAll(RunArgs),
    /// Check artifacts in the output directory against their manifests and headers.
    Verify {
        /// Configuration whose scenario hash the artifacts must carry.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory holding the artifacts [default: migdet-out].
        #[arg(long, env = "MIGDET_OUT_DIR")]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory [default: config output.dir, else migdet-out].
    #[arg(long, env = "MIGDET_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Target false-alarm probability.
    #[arg(long)]
    pfa: Option<f64>,
    /// Trial count of the command (all three counts for run-all); accepts 1e5.
    #[arg(long, value_parser = parse_trials)]
    trials: Option<usize>,
    /// SINR grid in dB: start:stop:step or a comma-separated list.
    #[arg(long, value_parser = parse_grid)]
    sinr_grid: Option<SinrGrid>,
}

#[derive(Args)]
struct OccupancyArgs {
    /// Pulse repetition time T, seconds.
    #[arg(long)]
    prt: f64,
    /// Pulse width T_p, seconds.
    #[arg(long)]
    pulse_width: f64,
    /// Radial velocity, m/s (positive when approaching).
    #[arg(long, allow_hyphen_values = true)]
    velocity: f64,
    /// Number of pulses (default: scenario n_pulses of --config, else 16).
    #[arg(long)]
    n_pulses: Option<usize>,
    /// Propagation speed, m/s.
    #[arg(long, default_value_t = SPEED_OF_LIGHT)]
    light_speed: f64,
    /// Gate range first:last to print, including empty gates.
    #[arg(long, value_parser = parse_gate_range, allow_hyphen_values = true)]
    gates: Option<(i64, i64)>,
    /// Configuration supplying the pulse count.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq)]
enum Which {
    Calibrate,
    Pd,
    Rmse,
    All,
}

/// Configuration after overrides, plus where it came from.
struct Loaded {
    config: ExperimentConfig,
    path: Option<PathBuf>,
    sha256: Option<String>,
    out_dir: PathBuf,
}

fn load_config(path: Option<&Path>) -> CliResult<(ExperimentConfig, Option<String>)> {
    match path {
        None => Ok((ExperimentConfig::default(), None)),
        Some(p) => {
            let bytes = fs::read(p).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", p.display()))
            })?;
            let text = String::from_utf8(bytes.clone())
                .map_err(|_| CliError::Config(format!("config {} is not UTF-8", p.display())))?;
            Ok((
                ExperimentConfig::from_json(&text)?,
                Some(sha256_hex(&bytes)),
            ))
        }
    }
}

fn load(run: &RunArgs, which: Which) -> CliResult<Loaded> {
    let (mut config, sha256) = load_config(run.config.as_deref())?;
    let mc = &mut config.montecarlo;
    if let Some(s) = run.seed {
        mc.seed = s;
    }
    if let Some(w) = run.workers {
        mc.workers = Some(w);
    }
    if let Some(p) = run.pfa {
        mc.pfa = p;
    }
    if let Some(n) = run.trials {
        match which {
            Which::Calibrate => mc.calibration_trials = n,
            Which::Pd => mc.pd_trials = n,
            Which::Rmse => mc.rmse_trials = n,
            Which::All => (mc.calibration_trials, mc.pd_trials, mc.rmse_trials) = (n, n, n),
        }
    }
    if let Some(g) = &run.sinr_grid {
        mc.sinr_grid_db = g.0.clone();
    }
    config.validate()?;
    let out_dir = run
        .out_dir
        .clone()
        .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    Ok(Loaded {
        config,
        path: run.config.clone(),
        sha256,
        out_dir,
    })
}

fn finish(
    command: &str,
    loaded: &Loaded,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
) -> CliResult<()> {
    let manifest = RunManifest {
        command: command.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_path: loaded.path.as_ref().map(|p| p.display().to_string()),
        config_sha256: loaded.sha256.clone(),
        config_hash: loaded.config.config_hash(),
        seed: loaded.config.montecarlo.seed,
        out_dir: loaded.out_dir.display().to_string(),
        effective_config: loaded.config.clone(),
        inputs,
        outputs,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write_artifact(&loaded.out_dir, &RunManifest::file_name(command), &text)?;
    for f in &manifest.outputs {
        println!("wrote {}", f.path);
    }
    Ok(())
}

fn header(loaded: &Loaded) -> CsvHeader {
    CsvHeader {
        config_hash: loaded.config.config_hash(),
        seed: loaded.config.montecarlo.seed,
    }
}

fn cmd_calibrate(run: &RunArgs) -> CliResult<()> {
    let loaded = load(run, Which::Calibrate)?;
    let cfg = &loaded.config;
    let mc = &cfg.montecarlo;
    let engine = Engine::new(&cfg.scenario, mc.workers)?;
    let calibration = engine.calibrate(
        &cfg.detectors.enabled,
        mc.pfa,
        mc.calibration_trials,
        mc.seed,
    )?;
    ensure_dir(&loaded.out_dir)?;
    let out = write_artifact(
        &loaded.out_dir,
        THRESHOLDS_FILE,
        &thresholds_csv(&header(&loaded), &calibration),
    )?;
    finish("calibrate", &loaded, vec![], vec![out])
}

fn cmd_pd(run: &RunArgs, thresholds: Option<&Path>) -> CliResult<()> {
    let loaded = load(run, Which::Pd)?;
    let cfg = &loaded.config;
    let mc = &cfg.montecarlo;
    let path = thresholds
        .map(Path::to_path_buf)
        .unwrap_or_else(|| loaded.out_dir.join(THRESHOLDS_FILE));
    let (file_header, table) = read_thresholds(&path)?;
    let expected = cfg.config_hash();
    if file_header.config_hash != expected {
        return Err(migdet::Error::ConfigMismatch {
            expected,
            found: file_header.config_hash,
        }
        .into());
    }
    let calibration = cfg
        .detectors
        .enabled
        .iter()
        .map(|d| {
            table
                .iter()
                .find(|c| c.detector == *d)
                .cloned()
                .ok_or_else(|| {
                    CliError::Artifact(format!("{} has no threshold for {d}", path.display()))
                })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let engine = Engine::new(&cfg.scenario, mc.workers)?;
    let curves = engine.estimate_pd(&calibration, &mc.sinr_grid_db, mc.pd_trials, mc.seed)?;
    ensure_dir(&loaded.out_dir)?;
    let input = FileDigest::of(&path)?;
    let out = write_artifact(&loaded.out_dir, PD_FILE, &pd_csv(&header(&loaded), &curves))?;
    finish("pd", &loaded, vec![input], vec![out])
}

fn cmd_rmse(run: &RunArgs) -> CliResult<()> {
    let loaded = load(run, Which::Rmse)?;
    let cfg = &loaded.config;
    let mc = &cfg.montecarlo;
    let engine = Engine::new(&cfg.scenario, mc.workers)?;
    let curves = engine.estimate_rmse(
        &cfg.detectors.selectors,
        &mc.sinr_grid_db,
        mc.rmse_trials,
        mc.seed,
    )?;
    ensure_dir(&loaded.out_dir)?;
    let out = write_artifact(
        &loaded.out_dir,
        RMSE_FILE,
        &rmse_csv(&header(&loaded), &curves),
    )?;
    finish("rmse", &loaded, vec![], vec![out])
}

fn cmd_run_all(run: &RunArgs) -> CliResult<()> {
    let loaded = load(run, Which::All)?;
    let report = run_experiment(&loaded.config)?;
    let p = &report.payload;
    let h = header(&loaded);
    ensure_dir(&loaded.out_dir)?;
    let report_json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    let outputs = vec![
        write_artifact(
            &loaded.out_dir,
            THRESHOLDS_FILE,
            &thresholds_csv(&h, &p.calibration),
        )?,
        write_artifact(&loaded.out_dir, PD_FILE, &pd_csv(&h, &p.pd_curves))?,
        write_artifact(&loaded.out_dir, RMSE_FILE, &rmse_csv(&h, &p.rmse_curves))?,
        write_artifact(&loaded.out_dir, REPORT_FILE, &report_json)?,
    ];
    log::info!(
        "{} trials in {:.1} s",
        report.timing.trials,
        report.timing.wall_seconds
    );
    finish("run-all", &loaded, vec![], outputs)
}

fn cmd_occupancy(a: &OccupancyArgs) -> CliResult<()> {
    let n_pulses = match (a.n_pulses, &a.config) {
        (Some(n), _) => n,
        (None, Some(p)) => load_config(Some(p))?.0.scenario.n_pulses,
        (None, None) => 16,
    };
    let timing = PulseTiming {
        prt: a.prt,
        pulse_width: a.pulse_width,
        radial_velocity: a.velocity,
        light_speed: a.light_speed,
        n_pulses,
    };
    timing.validate()?;
    println!("gate,first_pulse,last_pulse,l,h");
    let row = |gate: i64, s: Option<migdet::scenario::SupportHypothesis>| match s {
        Some(s) => println!(
            "{gate},{},{},{},{}",
            s.l() - 1,
            s.l() - 1 + s.h(),
            s.l(),
            s.h()
        ),
        None => println!("{gate},,,,"),
    };
    match a.gates {
        Some((first, last)) => {
            (first..=last).for_each(|g| row(g, range_gate_occupancy(&timing, g)))
        }
        None => occupancy_table(&timing)
            .iter()
            .for_each(|g| row(g.gate, Some(g.support))),
    }
    Ok(())
}

fn cmd_verify(config: Option<&Path>, out_dir: Option<&Path>) -> CliResult<()> {
    let dir = out_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let expected_hash = config
        .map(|p| load_config(Some(p)).map(|(c, _)| scenario_hash(&c.scenario)))
        .transpose()?;
    let mut manifests: Vec<PathBuf> = fs::read_dir(&dir)
        .map_err(|e| CliError::Artifact(format!("cannot list {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("manifest_") && n.ends_with(".json"))
        })
        .collect();
    manifests.sort();
    if manifests.is_empty() {
        return Err(CliError::Artifact(format!(
            "no manifests in {}",
            dir.display()
        )));
    }
    let mut problems = Vec::new();
    for mpath in &manifests {
        let text = fs::read_to_string(mpath).map_err(|e| CliError::io(mpath, e))?;
        let m: RunManifest = serde_json::from_str(&text)
            .map_err(|e| CliError::Artifact(format!("{}: {e}", mpath.display())))?;
        let mut complain = |msg: String| problems.push(format!("{}: {msg}", mpath.display()));
        if let Some(h) = &expected_hash {
            if *h != m.config_hash {
                complain(format!(
                    "config hash {} differs from --config ({h})",
                    m.config_hash
                ));
            }
        }
        if m.effective_config.config_hash() != m.config_hash {
            complain("recorded config does not hash to the recorded config hash".into());
        }
        if let (Some(p), Some(want)) = (&m.config_path, &m.config_sha256) {
            match fs::read(p) {
                Ok(bytes) if sha256_hex(&bytes) == *want => {}
                Ok(_) => complain(format!("config file {p} changed since the run")),
                Err(e) => complain(format!("config file {p}: {e}")),
            }
        }
        for f in m.inputs.iter().chain(&m.outputs) {
            let path = Path::new(&f.path);
            let Ok(bytes) = fs::read(path) else {
                complain(format!("{} is missing", f.path));
                continue;
            };
            if sha256_hex(&bytes) != f.sha256 {
                complain(format!("{} does not match its recorded digest", f.path));
            }
            if f.path.ends_with(".csv") {
                match read_header(&String::from_utf8_lossy(&bytes), path) {
                    Ok(h)
                        if h.config_hash == m.config_hash
                            && (h.seed == m.seed || m.inputs.contains(f)) => {}
                    Ok(h) => complain(format!(
                        "{} header (hash {}, seed {}) disagrees with the manifest",
                        f.path, h.config_hash, h.seed
                    )),
                    Err(e) => complain(e.to_string()),
                }
            }
        }
        println!("checked {}", mpath.display());
    }
    if problems.is_empty() {
        println!("ok: {} manifest(s) verified", manifests.len());
        Ok(())
    } else {
        Err(CliError::Artifact(problems.join("\n")))
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Calibrate(r) => cmd_calibrate(r),
        Command::Pd { run, thresholds } => cmd_pd(run, thresholds.as_deref()),
        Command::Rmse(r) => cmd_rmse(r),
        Command::Occupancy(a) => cmd_occupancy(a),
        Command::RunAll(r) => cmd_run_all(r),
        Command::Verify { config, out_dir } => cmd_verify(config.as_deref(), out_dir.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
