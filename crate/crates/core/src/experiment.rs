//! Configurable power sweeps and verification suites.
//!
//! An experiment is described by a TOML document:
//!
//! ```toml
//! seed = 42
//! m = 2
//! output = "results/dc21"          # writes results/dc21.csv and .json
//! power_grid = { log10_min = 4, log10_max = 10, points = 7 }
//!
//! [model]
//! kind = "different_coherence"     # or "offset" with t / delta
//! t_r = 2
//! t_e = 1
//!
//! [budget]
//! n_random = 200
//! ```
//!
//! A suite file holds an optional `output` stem and any number of
//! `[[experiment]]` tables with the same keys plus a `name`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::FadingModel;
use crate::dof::{verify_model, Verification, VerdictRecord, VerifyOptions, DEFAULT_FIT_FRACTION, DEFAULT_TOLERANCE};
use crate::error::param;
use crate::precoding::SchemeKind;
use crate::rate::SearchBudget;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "power,rate_bits,worstcase_kind";

/// Linear transmit powers, either listed or log-spaced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PowerGridSpec", into = "PowerGridSpec")]
pub struct PowerGrid(Vec<f64>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum PowerGridSpec {
    List(Vec<f64>),
    Decades { log10_min: f64, log10_max: f64, points: usize },
}

impl TryFrom<PowerGridSpec> for PowerGrid {
    type Error = String;

    fn try_from(spec: PowerGridSpec) -> std::result::Result<Self, String> {
        let powers = match spec {
            PowerGridSpec::List(p) => p,
            PowerGridSpec::Decades { log10_min, log10_max, points } => {
                if points < 4 {
                    return Err("power grid needs at least 4 points".into());
                }
                let step = (log10_max - log10_min) / (points - 1) as f64;
                (0..points).map(|i| 10f64.powf(log10_min + step * i as f64)).collect()
            }
        };
        PowerGrid::new(powers).map_err(|e| e.to_string())
    }
}

impl From<PowerGrid> for PowerGridSpec {
    fn from(grid: PowerGrid) -> Self {
        PowerGridSpec::List(grid.0)
    }
}

impl PowerGrid {
    pub fn new(powers: Vec<f64>) -> Result<Self> {
        if powers.len() < 4 {
            return Err(param(format!("power grid needs at least 4 points, got {}", powers.len())));
        }
        if powers.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(param("power grid entries must be positive and finite"));
        }
        if powers.windows(2).any(|w| w[1] <= w[0]) {
            return Err(param("power grid must be strictly increasing"));
        }
        Ok(Self(powers))
    }

    /// `points` powers log-spaced from `10^log10_min` to `10^log10_max`.
    pub fn decades(log10_min: f64, log10_max: f64, points: usize) -> Result<Self> {
        PowerGridSpec::Decades { log10_min, log10_max, points }.try_into().map_err(Error::Parameter)
    }

    pub fn powers(&self) -> &[f64] {
        &self.0
    }
}

fn default_fit_fraction() -> f64 {
    DEFAULT_FIT_FRACTION
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub model: FadingModel,
    pub m: usize,
    pub power_grid: PowerGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeKind>,
    #[serde(default)]
    pub budget: SearchBudget,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default = "default_fit_fraction")]
    pub fit_fraction: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

/// Command-line overrides applied on top of a parsed configuration.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output: Option<String>,
    pub budget_random: Option<usize>,
    pub fit_fraction: Option<f64>,
}

impl ExperimentConfig {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(out) = &o.output {
            self.output = Some(out.clone());
        }
        if let Some(n) = o.budget_random {
            self.budget.n_random = n;
        }
        if let Some(f) = o.fit_fraction {
            self.fit_fraction = f;
        }
    }

    fn options(&self) -> VerifyOptions {
        VerifyOptions {
            budget: self.budget,
            fit_fraction: self.fit_fraction,
            tolerance: self.tolerance,
            scheme: self.scheme,
            ..VerifyOptions::default()
        }
    }
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

fn parse_toml<T: serde::de::DeserializeOwned>(src: &str) -> Result<T> {
    toml::from_str(src).map_err(|e| Error::Parse {
        line: e.span().map_or(0, |s| line_of(src, s.start)),
        message: e.message().to_string(),
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn write(path: &Path, contents: &str) -> Result<()> {
    let io = |source| Error::Io { path: path.display().to_string(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, contents).map_err(io)
}

pub fn parse_config(src: &str) -> Result<ExperimentConfig> {
    parse_toml(src)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    parse_config(&read(path)?)
}

/// CSV body for a verification run.
pub fn render_csv(v: &Verification) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in &v.curve {
        let _ = writeln!(out, "{},{},{}", p.power, p.rate, p.kind);
    }
    out
}

pub fn render_verdict(v: &VerdictRecord) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("verdict serializes");
    s.push('\n');
    s
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub verification: Verification,
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
}

fn run_config(config: &ExperimentConfig) -> Result<Verification> {
    verify_model(config.model, config.m, config.power_grid.powers(), config.seed, &config.options())
}

/// Run one sweep and write `<output>.csv` and `<output>.json`.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepOutcome> {
    let stem = PathBuf::from(config.output.clone().unwrap_or_else(|| "sweep".into()));
    let verification = run_config(config)?;
    let csv_path = stem.with_extension("csv");
    let json_path = stem.with_extension("json");
    write(&csv_path, &render_csv(&verification))?;
    write(&json_path, &render_verdict(&verification.verdict))?;
    Ok(SweepOutcome { verification, csv_path, json_path })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    #[serde(default)]
    output: Option<String>,
    #[serde(default)]
    experiment: Vec<ExperimentConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RowStatus {
    Pass { verdict: VerdictRecord },
    Fail { verdict: VerdictRecord },
    Skipped { reason: String },
    Error { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRow {
    pub name: String,
    pub model: String,
    pub m: usize,
    #[serde(flatten)]
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub rows: Vec<SuiteRow>,
    pub all_pass: bool,
    #[serde(skip)]
    pub aggregate_path: PathBuf,
}

impl SuiteReport {
    /// 0 when every non-skipped row passes, 2 on a failed verdict, 1 when a
    /// row errored.
    pub fn exit_code(&self) -> i32 {
        if self.rows.iter().any(|r| matches!(r.status, RowStatus::Error { .. })) {
            1
        } else if self.rows.iter().any(|r| matches!(r.status, RowStatus::Fail { .. })) {
            2
        } else {
            0
        }
    }

    pub fn table(&self) -> String {
        let header = ["name", "model", "M", "theory", "converse", "empirical", "pass"];
        let mut cells: Vec<[String; 7]> = vec![header.map(String::from)];
        for r in &self.rows {
            let (theory, converse, empirical, pass) = match &r.status {
                RowStatus::Pass { verdict } | RowStatus::Fail { verdict } => (
                    format!("{:.4}", verdict.theory),
                    format!("{:.4}", verdict.converse),
                    format!("{:.4}", verdict.empirical_slope),
                    if verdict.pass { "PASS" } else { "FAIL" }.to_string(),
                ),
                RowStatus::Skipped { .. } => ("-".into(), "-".into(), "-".into(), "SKIPPED(out-of-scope)".into()),
                RowStatus::Error { .. } => ("-".into(), "-".into(), "-".into(), "ERROR".into()),
            };
            cells.push([r.name.clone(), r.model.clone(), r.m.to_string(), theory, converse, empirical, pass]);
        }
        let widths: Vec<usize> = (0..7).map(|c| cells.iter().map(|row| row[c].len()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for row in &cells {
            let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }
}

pub fn parse_suite(src: &str) -> Result<(Option<String>, Vec<ExperimentConfig>)> {
    let suite: SuiteFile = parse_toml(src)?;
    Ok((suite.output, suite.experiment))
}

/// Run every experiment of a suite file in order, writing per-experiment
/// CSV/JSON under `<output>/` and the aggregate report to `<output>.json`.
pub fn run_suite(path: &Path, overrides: &Overrides) -> Result<SuiteReport> {
    let (output, experiments) = parse_suite(&read(path)?)?;
    let stem = PathBuf::from(overrides.output.clone().or(output).unwrap_or_else(|| "suite".into()));
    let mut rows = Vec::with_capacity(experiments.len());
    for (i, mut config) in experiments.into_iter().enumerate() {
        let name = config.name.clone().unwrap_or_else(|| format!("experiment{i}"));
        config.apply(&Overrides { output: None, ..overrides.clone() });
        config.output = Some(stem.join(&name).display().to_string());
        let status = match config.model.validate() {
            Err(Error::OutOfScope(reason)) => RowStatus::Skipped { reason },
            Err(e) => RowStatus::Error { message: e.to_string() },
            Ok(()) => match run_sweep(&config) {
                Ok(out) if out.verification.verdict.pass => RowStatus::Pass { verdict: out.verification.verdict },
                Ok(out) => RowStatus::Fail { verdict: out.verification.verdict },
                Err(e @ Error::Io { .. }) => return Err(e),
                Err(e) => RowStatus::Error { message: e.to_string() },
            },
        };
        rows.push(SuiteRow { name, model: config.model.to_string(), m: config.m, status });
    }
    let all_pass = rows.iter().all(|r| matches!(r.status, RowStatus::Pass { .. } | RowStatus::Skipped { .. }));
    let aggregate_path = stem.with_extension("json");
    let report = SuiteReport { rows, all_pass, aggregate_path };
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    write(&report.aggregate_path, &json)?;
    Ok(report)
}
