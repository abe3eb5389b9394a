//! Config parsing and the experiment runner behind the `mirror-born` binary.
//!
//! Configs are JSON documents; unknown keys are rejected and every
//! validation error names the offending key path. Complex numbers are
//! `[re, im]` pairs. Each run writes its CSV data files plus `summary.json`
//! into the output directory.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analogy::{run_two_ball, two_ball_csv, TwoBallConfig, TwoBallResult};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, WaveFunction, MIN_POINTS};
use crate::io::{csv_line, fmt_real, write_file};
use crate::mirror::{born_compare, mirror_csv, MirrorReport, DEFAULT_TOLERANCE};
use crate::spectral::{
    born_table, chi_square_test, coefficients, eigendecompose, expectation_grid, expectation_matrix,
    expectation_spectral, sample_outcomes, ChiSquareTest, GridObservable, HermitianOperator,
};
use crate::states::{gaussian_packet, plane_wave_phase, PacketSpec};
use crate::suite::{run_suite, SuiteReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_GRID_POINTS: usize = 1024;
pub const DEFAULT_X_MIN: f64 = -20.0;
pub const DEFAULT_X_MAX: f64 = 20.0;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;
/// Quantile of the chi-square law used to judge sampled counts.
pub const CHI_SQUARE_QUANTILE: f64 = 0.999;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Packet,
    MirrorCheck,
    Born,
    Measure,
    TwoBall,
    Suite,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Packet,
        Command::MirrorCheck,
        Command::Born,
        Command::Measure,
        Command::TwoBall,
        Command::Suite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Packet => "packet",
            Command::MirrorCheck => "mirror-check",
            Command::Born => "born",
            Command::Measure => "measure",
            Command::TwoBall => "two-ball",
            Command::Suite => "suite",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| config_err("command", format!("unknown command `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_x_min")]
    pub x_min: f64,
    #[serde(default = "default_x_max")]
    pub x_max: f64,
}

fn default_n() -> usize {
    DEFAULT_GRID_POINTS
}
fn default_x_min() -> f64 {
    DEFAULT_X_MIN
}
fn default_x_max() -> f64 {
    DEFAULT_X_MAX
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            n: DEFAULT_GRID_POINTS,
            x_min: DEFAULT_X_MIN,
            x_max: DEFAULT_X_MAX,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoBallParams {
    pub bins: usize,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub n: u64,
}

/// The document as written, before defaults and validation.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Option<String>,
    grid: Option<GridParams>,
    packet: Option<PacketSpec>,
    operator: Option<Vec<Vec<[f64; 2]>>>,
    state: Option<Vec<[f64; 2]>>,
    two_ball: Option<TwoBallParams>,
    n_samples: Option<u64>,
    seed: Option<u64>,
    tolerance: Option<f64>,
}

/// A validated run configuration with defaults filled in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub grid: GridParams,
    pub packet: Option<PacketSpec>,
    pub operator: Option<Vec<Vec<[f64; 2]>>>,
    /// Normalized on load.
    pub state: Option<Vec<[f64; 2]>>,
    pub two_ball: Option<TwoBallParams>,
    pub n_samples: u64,
    pub seed: u64,
    pub tolerance: f64,
}

/// Command-line values that take precedence over the config document.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
}

fn config_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, Overrides::default())
}

pub fn parse_config_with(text: &str, overrides: Overrides) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        config_err(if path == "." { String::new() } else { path }, e.into_inner().to_string())
    })?;

    let command = match (raw.command.as_deref(), overrides.command) {
        (Some(s), Some(cli)) => {
            let declared: Command = s.parse()?;
            if declared != cli {
                return Err(config_err(
                    "command",
                    format!("config declares `{declared}` but `{cli}` was requested"),
                ));
            }
            cli
        }
        (Some(s), None) => s.parse()?,
        (None, Some(cli)) => cli,
        (None, None) => return Err(config_err("command", "missing")),
    };

    let cfg = RunConfig {
        command,
        grid: raw.grid.unwrap_or_default(),
        packet: raw.packet,
        operator: raw.operator,
        state: raw.state,
        two_ball: raw.two_ball,
        n_samples: raw.n_samples.unwrap_or(DEFAULT_SAMPLES),
        seed: overrides.seed.or(raw.seed).unwrap_or(DEFAULT_SEED),
        tolerance: overrides.tolerance.or(raw.tolerance).unwrap_or(DEFAULT_TOLERANCE),
    };
    cfg.validate()
}

impl RunConfig {
    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid.n, self.grid.x_min, self.grid.x_max)
    }

    /// Checks every supplied section against the preconditions of the module
    /// that consumes it, and normalizes `state`.
    fn validate(mut self) -> Result<Self> {
        let g = &self.grid;
        if g.n < MIN_POINTS || !g.n.is_multiple_of(2) {
            return Err(config_err("grid.n", format!("must be even and ≥ {MIN_POINTS}, got {}", g.n)));
        }
        if !g.x_min.is_finite() {
            return Err(config_err("grid.x_min", "must be finite"));
        }
        if !(g.x_max.is_finite() && g.x_max > g.x_min) {
            return Err(config_err("grid.x_max", format!("must exceed x_min = {}", g.x_min)));
        }
        let grid = self.grid_spec()?;

        if let Some(p) = &self.packet {
            let fields = [("x0", p.x0), ("p0", p.p0), ("t", p.t)];
            if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
                return Err(config_err(format!("packet.{name}"), "must be finite"));
            }
            if !(p.sigma_x > 0.0 && p.sigma_x.is_finite()) {
                return Err(config_err("packet.sigma_x", format!("must be positive, got {}", p.sigma_x)));
            }
            if !(p.m > 0.0 && p.m.is_finite()) {
                return Err(config_err("packet.m", format!("must be positive, got {}", p.m)));
            }
            p.validate_for(&grid).map_err(|e| config_err("packet", e.to_string()))?;
        }

        if let Some(rows) = &self.operator {
            let k = rows.len();
            if k == 0 {
                return Err(config_err("operator", "must be a non-empty square matrix"));
            }
            if let Some(i) = rows.iter().position(|r| r.len() != k) {
                return Err(config_err(format!("operator[{i}]"), format!("expected {k} entries")));
            }
            self.operator_matrix().expect("present").map_err(|e| config_err("operator", e.to_string()))?;
        }

        if let Some(state) = &self.state {
            if let Some(rows) = &self.operator {
                if state.len() != rows.len() {
                    return Err(config_err(
                        "state",
                        format!("has {} entries but operator is {}×{}", state.len(), rows.len(), rows.len()),
                    ));
                }
            }
            if state.iter().flatten().any(|v| !v.is_finite()) {
                return Err(config_err("state", "entries must be finite"));
            }
            let norm = state.iter().map(|[re, im]| re * re + im * im).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(config_err("state", "zero vector cannot be normalized"));
            }
            self.state = Some(state.iter().map(|[re, im]| [re / norm, im / norm]).collect());
        }

        if let Some(tb) = &self.two_ball {
            if tb.bins < 2 {
                return Err(config_err("two_ball.bins", format!("must be ≥ 2, got {}", tb.bins)));
            }
            if tb.n == 0 {
                return Err(config_err("two_ball.n", "must be ≥ 1"));
            }
            for (name, p) in [("p1", &tb.p1), ("p2", &tb.p2)] {
                if p.len() != tb.bins {
                    return Err(config_err(
                        format!("two_ball.{name}"),
                        format!("has {} entries for {} bins", p.len(), tb.bins),
                    ));
                }
            }
            self.two_ball_config()
                .expect("present")
                .validate()
                .map_err(|e| config_err("two_ball", e.to_string()))?;
        }

        if self.n_samples == 0 {
            return Err(config_err("n_samples", "must be ≥ 1"));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(config_err("tolerance", format!("must be finite and ≥ 0, got {}", self.tolerance)));
        }

        let required: &[&str] = match self.command {
            Command::Packet | Command::MirrorCheck => &["packet"],
            Command::Born | Command::Measure => &["operator", "state"],
            Command::TwoBall => &["two_ball"],
            Command::Suite => &[],
        };
        for key in required {
            let present = match *key {
                "packet" => self.packet.is_some(),
                "operator" => self.operator.is_some(),
                "state" => self.state.is_some(),
                _ => self.two_ball.is_some(),
            };
            if !present {
                return Err(config_err(*key, format!("required by command `{}`", self.command)));
            }
        }
        Ok(self)
    }

    fn operator_matrix(&self) -> Option<Result<HermitianOperator>> {
        self.operator.as_ref().map(|rows| {
            HermitianOperator::from_rows(
                rows.iter()
                    .map(|r| r.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
                    .collect(),
            )
        })
    }

    fn state_vector(&self) -> Option<Vec<Complex64>> {
        self.state
            .as_ref()
            .map(|s| s.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
    }

    pub fn two_ball_config(&self) -> Option<TwoBallConfig> {
        self.two_ball.as_ref().map(|tb| TwoBallConfig {
            bins: tb.bins,
            p1: tb.p1.clone(),
            p2: tb.p2.clone(),
            n: tb.n,
            seed: self.seed,
        })
    }
}

fn pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PacketMetrics {
    pub norm: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub kinetic: f64,
    pub sigma_x: f64,
    pub sigma_p: f64,
    pub uncertainty_product: f64,
}

/// Plane-wave phase `E t - p x` at `±p0`: the kinetic part is even in `p`,
/// the `p x` part odd, so `phi_plus + phi_minus = 2 E t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseCheck {
    pub phi_plus: f64,
    pub phi_minus: f64,
    pub phase_sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BornMetrics {
    pub eigenvalues: Vec<f64>,
    pub coefficients: Vec<[f64; 2]>,
    pub probabilities: Vec<f64>,
    pub expectation_matrix: f64,
    pub expectation_spectral: f64,
    pub path_difference: f64,
    pub gram_defect: f64,
    pub reconstruction_defect: f64,
    pub sweeps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingMetrics {
    pub n: u64,
    pub seed: u64,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    /// `4 sqrt(P(1-P)/n)` per outcome.
    pub four_sigma: Vec<f64>,
    pub within_four_sigma: bool,
    pub chi_square: ChiSquareTest,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Metrics {
    Packet {
        packet: PacketMetrics,
        phase: PhaseCheck,
    },
    MirrorCheck {
        mirror: MirrorReport,
        phase: PhaseCheck,
    },
    Born(BornMetrics),
    Measure {
        born: BornMetrics,
        sampling: SamplingMetrics,
    },
    TwoBall(TwoBallResult),
    Suite(SuiteReport),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSummary {
    pub command: Command,
    pub version: String,
    pub config: RunConfig,
    pub metrics: Metrics,
    pub wall_time_s: f64,
    /// File names relative to the output directory.
    pub artifacts: Vec<String>,
}

impl RunSummary {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Whether every verdict-type finding in the summary is favourable. Only
    /// `suite` turns this into a process exit status.
    pub fn suite_passed(&self) -> Option<bool> {
        match &self.metrics {
            Metrics::Suite(r) => Some(r.all_passed),
            _ => None,
        }
    }
}

fn moments(psi: &WaveFunction) -> (f64, f64) {
    let mean: f64 = psi.nodes().iter().zip(psi.density()).map(|(q, d)| q * d).sum::<f64>() * psi.step();
    let second: f64 = psi.nodes().iter().zip(psi.density()).map(|(q, d)| q * q * d).sum::<f64>() * psi.step();
    (mean, (second - mean * mean).max(0.0).sqrt())
}

fn field_csv(header: &str, psi: &WaveFunction) -> String {
    let mut out = format!("{header},re,im,density\n");
    for (q, a) in psi.nodes().into_iter().zip(psi.amplitudes()) {
        out.push_str(&csv_line(&[q, a.re, a.im, a.norm_sqr()]));
    }
    out
}

fn phase_check(p: &PacketSpec) -> Result<PhaseCheck> {
    let phi_plus = plane_wave_phase(p.p0, p.x0, p.t, p.m)?;
    let phi_minus = plane_wave_phase(-p.p0, p.x0, p.t, p.m)?;
    Ok(PhaseCheck {
        phi_plus,
        phi_minus,
        phase_sum: phi_plus + phi_minus,
    })
}

fn born_metrics(h: &HermitianOperator, state: &[Complex64]) -> Result<BornMetrics> {
    let d = eigendecompose(h)?;
    let c = coefficients(&d, state)?;
    let table = born_table(&c, d.eigenvalues())?;
    let by_matrix = expectation_matrix(h, state)?;
    let by_spectrum = expectation_spectral(&table);
    Ok(BornMetrics {
        eigenvalues: d.eigenvalues().to_vec(),
        coefficients: pairs(&c),
        probabilities: table.probs().to_vec(),
        expectation_matrix: by_matrix,
        expectation_spectral: by_spectrum,
        path_difference: (by_matrix - by_spectrum).abs(),
        gram_defect: d.gram_defect(),
        reconstruction_defect: d.reconstruction_defect(h),
        sweeps: d.sweeps(),
    })
}

fn born_csv(m: &BornMetrics, sampling: Option<&SamplingMetrics>) -> String {
    let mut out = String::from("outcome,eigenvalue,probability");
    if sampling.is_some() {
        out.push_str(",count,frequency");
    }
    out.push('\n');
    for (k, (l, p)) in m.eigenvalues.iter().zip(&m.probabilities).enumerate() {
        out.push_str(&format!("{k},{},{}", fmt_real(*l), fmt_real(*p)));
        if let Some(s) = sampling {
            out.push_str(&format!(",{},{}", s.counts[k], fmt_real(s.frequencies[k])));
        }
        out.push('\n');
    }
    out
}

/// Executes `cfg`, writing artifacts and `summary.json` into `out_dir`.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    let start = Instant::now();
    let mut files: Vec<(String, String)> = Vec::new();

    let metrics = match cfg.command {
        Command::Packet => {
            let spec = cfg.packet.expect("validated");
            let grid = cfg.grid_spec()?;
            let psi = gaussian_packet(&spec, &grid)?;
            let mom = psi.to_momentum()?;
            let (mean_x, sigma_x) = moments(&psi);
            let (mean_p, sigma_p) = moments(&mom);
            files.push(("packet_position.csv".into(), field_csv("x", &psi)));
            files.push(("packet_momentum.csv".into(), field_csv("p", &mom)));
            Metrics::Packet {
                packet: PacketMetrics {
                    norm: psi.norm(),
                    mean_x,
                    mean_p,
                    kinetic: expectation_grid(&mom, GridObservable::Kinetic { mass: spec.m })?,
                    sigma_x,
                    sigma_p,
                    uncertainty_product: sigma_x * sigma_p,
                },
                phase: phase_check(&spec)?,
            }
        }
        Command::MirrorCheck => {
            let spec = cfg.packet.expect("validated");
            let mom = gaussian_packet(&spec, &cfg.grid_spec()?)?.to_momentum()?;
            let cmp = born_compare(&mom, cfg.tolerance)?;
            files.push(("mirror.csv".into(), mirror_csv(&cmp.rows)));
            Metrics::MirrorCheck {
                mirror: cmp.report,
                phase: phase_check(&spec)?,
            }
        }
        Command::Born | Command::Measure => {
            let h = cfg.operator_matrix().expect("validated")?;
            let state = cfg.state_vector().expect("validated");
            let born = born_metrics(&h, &state)?;
            if cfg.command == Command::Born {
                files.push(("born.csv".into(), born_csv(&born, None)));
                Metrics::Born(born)
            } else {
                let table = born_table(&coefficients(&eigendecompose(&h)?, &state)?, &born.eigenvalues)?;
                let counts = sample_outcomes(&table, cfg.n_samples, cfg.seed)?;
                let n = cfg.n_samples as f64;
                let frequencies: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
                let four_sigma: Vec<f64> = table.probs().iter().map(|p| 4.0 * (p * (1.0 - p) / n).sqrt()).collect();
                let within = frequencies
                    .iter()
                    .zip(table.probs())
                    .zip(&four_sigma)
                    .all(|((f, p), s)| (f - p).abs() <= *s);
                let sampling = SamplingMetrics {
                    n: cfg.n_samples,
                    seed: cfg.seed,
                    chi_square: chi_square_test(&counts, &table, CHI_SQUARE_QUANTILE)?,
                    counts,
                    frequencies,
                    four_sigma,
                    within_four_sigma: within,
                };
                files.push(("measure.csv".into(), born_csv(&born, Some(&sampling))));
                Metrics::Measure { born, sampling }
            }
        }
        Command::TwoBall => {
            let result = run_two_ball(&cfg.two_ball_config().expect("validated"))?;
            files.push(("two_ball.csv".into(), two_ball_csv(&result)));
            Metrics::TwoBall(result)
        }
        Command::Suite => {
            let outcome = run_suite(cfg.seed)?;
            files.extend(outcome.files);
            Metrics::Suite(outcome.report)
        }
    };

    for (name, text) in &files {
        write_file(&out_dir.join(name), text)?;
    }
    let mut artifacts: Vec<String> = files.into_iter().map(|(name, _)| name).collect();
    artifacts.push("summary.json".into());
    let summary = RunSummary {
        command: cfg.command,
        version: VERSION.to_string(),
        config: cfg.clone(),
        metrics,
        wall_time_s: start.elapsed().as_secs_f64(),
        artifacts,
    };
    write_file(&out_dir.join("summary.json"), &summary.to_json()?)?;
    Ok(summary)
}

pub fn load_config(path: &Path, overrides: Overrides) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        context: format!("reading config {}", path.display()),
        source,
    })?;
    parse_config_with(&text, overrides)
}

pub fn default_out_dir() -> PathBuf {
    PathBuf::from("mirror-born-out")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_of(err: Error) -> String {
        match err {
            Error::Config { path, .. } => path,
            other => panic!("expected config error, got {other}"),
        }
    }

    #[test]
    fn minimal_mirror_check_gets_defaults() {
        let cfg = parse_config(r#"{"command":"mirror-check","packet":{"x0":0,"p0":0,"sigma_x":1}}"#).unwrap();
        assert_eq!(cfg.command, Command::MirrorCheck);
        assert_eq!(cfg.grid, GridParams::default());
        assert_eq!(cfg.grid.n, 1024);
        assert_eq!(cfg.tolerance, 1e-8);
        assert_eq!(cfg.seed, 1);
        let p = cfg.packet.unwrap();
        assert_eq!((p.m, p.t), (1.0, 0.0));
    }

    #[test]
    fn negative_sigma_names_key() {
        let err = parse_config(r#"{"command":"mirror-check","packet":{"x0":0,"p0":0,"sigma_x":-1}}"#).unwrap_err();
        assert_eq!(path_of(err), "packet.sigma_x");
    }

    #[test]
    fn unknown_keys_rejected_with_path() {
        let err = parse_config(r#"{"command":"mirror-check","packet":{"x0":0,"p0":0,"sigma":1}}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("sigma"), "{msg}");
        assert_eq!(path_of(err), "packet.sigma");
        let err = parse_config(r#"{"command":"suite","colour":1}"#).unwrap_err();
        assert!(err.to_string().contains("colour"));
    }

    #[test]
    fn type_errors_carry_path() {
        let err = parse_config(r#"{"command":"suite","grid":{"n":"big"}}"#).unwrap_err();
        assert_eq!(path_of(err), "grid.n");
    }

    #[test]
    fn command_resolution() {
        assert!(parse_config(r#"{"packet":{"x0":0,"p0":0,"sigma_x":1}}"#).is_err());
        let ov = Overrides {
            command: Some(Command::Packet),
            ..Default::default()
        };
        let cfg = parse_config_with(r#"{"packet":{"x0":0,"p0":0,"sigma_x":1}}"#, ov).unwrap();
        assert_eq!(cfg.command, Command::Packet);
        let err = parse_config_with(r#"{"command":"suite"}"#, ov).unwrap_err();
        assert_eq!(path_of(err), "command");
        assert_eq!(path_of(parse_config(r#"{"command":"dance"}"#).unwrap_err()), "command");
    }

    #[test]
    fn required_sections() {
        assert_eq!(path_of(parse_config(r#"{"command":"mirror-check"}"#).unwrap_err()), "packet");
        assert_eq!(path_of(parse_config(r#"{"command":"born","state":[[1,0]]}"#).unwrap_err()), "operator");
        assert_eq!(path_of(parse_config(r#"{"command":"two-ball"}"#).unwrap_err()), "two_ball");
        assert!(parse_config(r#"{"command":"suite"}"#).is_ok());
    }

    #[test]
    fn numeric_preconditions() {
        let cases = [
            (r#"{"command":"suite","grid":{"n":7}}"#, "grid.n"),
            (r#"{"command":"suite","grid":{"x_min":1,"x_max":0}}"#, "grid.x_max"),
            (r#"{"command":"mirror-check","packet":{"x0":0,"p0":0,"sigma_x":1,"m":0}}"#, "packet.m"),
            (r#"{"command":"mirror-check","packet":{"x0":19,"p0":0,"sigma_x":1}}"#, "packet"),
            (r#"{"command":"born","operator":[[[0,0],[1,0]],[[2,0],[0,0]]],"state":[[1,0],[0,0]]}"#, "operator"),
            (r#"{"command":"born","operator":[[[0,0],[1,0]],[[1,0]]],"state":[[1,0],[0,0]]}"#, "operator[1]"),
            (r#"{"command":"born","operator":[[[1,0]]],"state":[[0,0]]}"#, "state"),
            (r#"{"command":"born","operator":[[[1,0]]],"state":[[1,0],[0,0]]}"#, "state"),
            (r#"{"command":"two-ball","two_ball":{"bins":1,"p1":[1],"p2":[1],"n":5}}"#, "two_ball.bins"),
            (r#"{"command":"two-ball","two_ball":{"bins":2,"p1":[1],"p2":[0.5,0.5],"n":5}}"#, "two_ball.p1"),
            (r#"{"command":"two-ball","two_ball":{"bins":2,"p1":[0.7,0.7],"p2":[0.5,0.5],"n":5}}"#, "two_ball"),
            (r#"{"command":"two-ball","two_ball":{"bins":2,"p1":[0.5,0.5],"p2":[0.5,0.5],"n":0}}"#, "two_ball.n"),
            (r#"{"command":"suite","n_samples":0}"#, "n_samples"),
            (r#"{"command":"suite","tolerance":-1}"#, "tolerance"),
        ];
        for (text, path) in cases {
            assert_eq!(path_of(parse_config(text).unwrap_err()), path, "{text}");
        }
    }

    #[test]
    fn state_is_normalized_on_load() {
        let cfg = parse_config(r#"{"command":"born","operator":[[[1,0],[0,0]],[[0,0],[2,0]]],"state":[[3,0],[0,4]]}"#).unwrap();
        assert_eq!(cfg.state.unwrap(), vec![[0.6, 0.0], [0.0, 0.8]]);
    }

    #[test]
    fn overrides_win() {
        let ov = Overrides {
            seed: Some(9),
            tolerance: Some(0.5),
            ..Default::default()
        };
        let cfg = parse_config_with(r#"{"command":"suite","seed":3,"tolerance":1e-3}"#, ov).unwrap();
        assert_eq!((cfg.seed, cfg.tolerance), (9, 0.5));
    }

    #[test]
    fn born_metrics_on_diagonal() {
        let h = HermitianOperator::diagonal(&[1.0, 2.0]).unwrap();
        let m = born_metrics(&h, &[Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]).unwrap();
        assert!((m.expectation_matrix - 1.64).abs() < 1e-15);
        assert!(m.path_difference < 1e-15);
        assert!(born_csv(&m, None).starts_with("outcome,eigenvalue,probability\n0,"));
    }
}
