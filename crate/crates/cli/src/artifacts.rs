//! CSV artifacts and run manifests.
//!
//! Every CSV starts with `#` comment lines carrying the tool version, the
//! scenario hash and the master seed, followed by a fixed column header.
//! Floats are printed with 17 significant digits so reruns compare byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use migdet::config::ExperimentConfig;
use migdet::montecarlo::{CalibrationResult, DetectorId, PdCurve, RmseCurve};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const THRESHOLDS_FILE: &str = "thresholds.csv";
pub const PD_FILE: &str = "pd_curves.csv";
pub const RMSE_FILE: &str = "rmse_curves.csv";
pub const REPORT_FILE: &str = "report.json";

pub const THRESHOLDS_COLUMNS: [&str; 5] = ["detector", "pfa", "trials", "threshold", "seed"];
pub const PD_COLUMNS: [&str; 5] = ["detector", "sinr_db", "pd", "stderr", "trials"];
pub const RMSE_COLUMNS: [&str; 6] = [
    "selector",
    "sinr_db",
    "rmse_l",
    "rmse_h",
    "rmse_joint",
    "trials",
];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Values of the `# key=value` lines at the top of a CSV artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvHeader {
    pub config_hash: String,
    pub seed: u64,
}

fn csv_text<const N: usize>(
    header: &CsvHeader,
    columns: [&str; N],
    rows: &[[String; N]],
) -> String {
    let mut out = format!(
        "# tool=migdet {}\n# config_hash={}\n# seed={}\n",
        env!("CARGO_PKG_VERSION"),
        header.config_hash,
        header.seed
    )
    .into_bytes();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut out);
        w.write_record(columns).expect("in-memory write");
        for row in rows {
            w.write_record(row).expect("in-memory write");
        }
        w.flush().expect("in-memory write");
    }
    String::from_utf8(out).expect("ASCII output")
}

pub fn thresholds_csv(header: &CsvHeader, calibration: &[CalibrationResult]) -> String {
    let rows: Vec<[String; 5]> = calibration
        .iter()
        .map(|c| {
            [
                c.detector.name().into(),
                fmt_f64(c.target_pfa),
                c.n_trials.to_string(),
                fmt_f64(c.threshold),
                c.seed.to_string(),
            ]
        })
        .collect();
    csv_text(header, THRESHOLDS_COLUMNS, &rows)
}

pub fn pd_csv(header: &CsvHeader, curves: &[PdCurve]) -> String {
    let rows: Vec<[String; 5]> = curves
        .iter()
        .flat_map(|c| {
            c.points.iter().map(move |p| {
                [
                    c.detector.name().into(),
                    fmt_f64(p.sinr_db),
                    fmt_f64(p.pd),
                    fmt_f64(p.stderr),
                    p.n_trials.to_string(),
                ]
            })
        })
        .collect();
    csv_text(header, PD_COLUMNS, &rows)
}

pub fn rmse_csv(header: &CsvHeader, curves: &[RmseCurve]) -> String {
    let rows: Vec<[String; 6]> = curves
        .iter()
        .flat_map(|c| {
            c.points.iter().map(move |p| {
                [
                    c.selector.name().into(),
                    fmt_f64(p.sinr_db),
                    fmt_f64(p.rmse_l),
                    fmt_f64(p.rmse_h),
                    fmt_f64(p.rmse_joint),
                    p.n_trials.to_string(),
                ]
            })
        })
        .collect();
    csv_text(header, RMSE_COLUMNS, &rows)
}

/// Parses the comment header of a CSV artifact.
pub fn read_header(text: &str, path: &Path) -> CliResult<CsvHeader> {
    let mut fields = BTreeMap::new();
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        if let Some((k, v)) = line.trim_start_matches('#').trim().split_once('=') {
            fields.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    let bad = |what: &str| CliError::Artifact(format!("{}: {what}", path.display()));
    let config_hash = fields
        .get("config_hash")
        .ok_or_else(|| bad("missing config_hash header"))?
        .clone();
    let seed = fields
        .get("seed")
        .ok_or_else(|| bad("missing seed header"))?
        .parse()
        .map_err(|_| bad("bad seed header"))?;
    Ok(CsvHeader { config_hash, seed })
}

/// Reads a thresholds file written by `calibrate`.
pub fn read_thresholds(path: &Path) -> CliResult<(CsvHeader, Vec<CalibrationResult>)> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Artifact(format!("cannot read {}: {e}", path.display())))?;
    let header = read_header(&text, path)?;
    let bad = |what: String| CliError::Artifact(format!("{}: {what}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let columns = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if columns.iter().ne(THRESHOLDS_COLUMNS) {
        return Err(bad(format!(
            "unexpected columns {:?}",
            columns.iter().collect::<Vec<_>>()
        )));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let r = record.map_err(|e| bad(e.to_string()))?;
        let detector: DetectorId = r[0]
            .parse()
            .map_err(|e: migdet::Error| bad(e.to_string()))?;
        let num = |i: usize| {
            r[i].parse::<f64>()
                .map_err(|_| bad(format!("bad number {:?}", &r[i])))
        };
        out.push(CalibrationResult {
            detector,
            target_pfa: num(1)?,
            n_trials: r[2]
                .parse()
                .map_err(|_| bad(format!("bad trial count {:?}", &r[2])))?,
            threshold: num(3)?,
            empirical_pfa_at_threshold: f64::NAN,
            seed: r[4]
                .parse()
                .map_err(|_| bad(format!("bad seed {:?}", &r[4])))?,
            config_hash: header.config_hash.clone(),
        });
    }
    Ok((header, out))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> CliResult<Self> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        Ok(Self {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        })
    }
}

/// Record of one command invocation, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub config_path: Option<String>,
    /// SHA-256 of the configuration file as read.
    pub config_sha256: Option<String>,
    /// Scenario hash that thresholds and curves are tied to.
    pub config_hash: String,
    pub seed: u64,
    pub out_dir: String,
    /// Configuration after command-line overrides.
    pub effective_config: ExperimentConfig,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

impl RunManifest {
    pub fn file_name(command: &str) -> String {
        format!("manifest_{command}.json")
    }
}

/// Writes `text` to `dir/name` and returns its digest.
pub fn write_artifact(dir: &Path, name: &str, text: &str) -> CliResult<FileDigest> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: sha256_hex(text.as_bytes()),
    })
}

pub fn ensure_dir(dir: &Path) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    Ok(dir.to_path_buf())
}
