//! Command-line flags and JSON config files.
//!
//! A config file is a JSON object with the same keys as the long flags
//! (dashes become underscores) plus `"command"`. Flags given on the command
//! line take precedence over the file.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "homlab", version, about = "Photon-number statistics at a beam splitter")]
pub struct Cli {
    /// JSON file with settings; command-line flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Joint output distribution P(m_a, m_b).
    Dist(DistArgs),
    /// Joint distribution seen through lossy number-resolving detectors.
    Lossy(LossyArgs),
    /// Exhaustive integer zeros of the g-polynomial.
    Zeros(ZerosArgs),
    /// Search for polynomial families of zeros.
    Parametric(ParametricArgs),
    /// Heralding statistics of a two-mode squeezed source.
    Herald(HeraldArgs),
    /// Central-channel probability of rotated collective atomic states.
    Dicke(DickeArgs),
    /// Certify polynomial families of zeros.
    Verify(VerifyArgs),
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistArgs {
    /// State in mode a, e.g. fock:1 or oddcat:alpha=2.
    #[arg(long, value_name = "STATE")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    /// State in mode b, e.g. coherent:beta=3 or thermal:nbar=9.
    #[arg(long, value_name = "STATE")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    /// Transmittance as a fraction (exact) or theta=<radians> [default: 1/2].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bs: Option<String>,
    /// Largest m_a, m_b in the output [default: sum of the input cutoffs].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_max: Option<usize>,
    /// Output file; standard output if absent.
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossyArgs {
    #[arg(long, value_name = "STATE")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[arg(long, value_name = "STATE")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bs: Option<String>,
    /// Largest detected m_a, m_b in the output [default: source-max].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_max: Option<usize>,
    /// Efficiency of both detectors.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Efficiency of the a detector [default: eta].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_a: Option<f64>,
    /// Efficiency of the b detector [default: eta].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_b: Option<f64>,
    /// Largest photon number reaching the detectors [default: sum of the input cutoffs].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_max: Option<usize>,
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZerosArgs {
    /// Photon number in mode a.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// Exact transmittance, e.g. 3/4.
    #[arg(long = "T", value_name = "T")]
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    /// Scan 0 <= m_a, m_b <= max.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<u64>,
    /// Keep only zeros with m_a + m_b >= n.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub physical_only: Option<bool>,
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParametricArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[arg(long = "T", value_name = "T")]
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    /// Polynomial degree in k, 1 to 3 [default: 2].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    /// Smallest coefficient value.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lo: Option<i64>,
    /// Largest coefficient value.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hi: Option<i64>,
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeraldArgs {
    /// Detected photon number.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    /// Detector efficiency.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Squeezing parameter.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Largest heralded photon number listed [default: t + 10].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Source cutoff [default: tail below 1e-10].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomState {
    /// Equal weights on every |J, M⟩ with J + M odd.
    #[default]
    Odd,
    /// |J, 1 - J⟩, a single excitation.
    Single,
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DickeArgs {
    /// Smallest J [default: 1].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_min: Option<u32>,
    /// Largest J [default: 10].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_max: Option<u32>,
    /// Also list the half-integer J, which have no M' = 0 channel.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_integers: Option<bool>,
    /// Rotation angle [default: pi/2].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<AtomState>,
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    /// Built-in set of families: appendix-c.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tables: Option<String>,
    /// One family as "a0,a1,a2;b0,b1,b2" (coefficients lowest power first).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    /// Photon number for --family.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// Exact transmittance for --family.
    #[arg(long = "T", value_name = "T")]
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Dist(_) => "dist",
            Command::Lossy(_) => "lossy",
            Command::Zeros(_) => "zeros",
            Command::Parametric(_) => "parametric",
            Command::Herald(_) => "herald",
            Command::Dicke(_) => "dicke",
            Command::Verify(_) => "verify",
        }
    }

    pub fn output(&self) -> (Option<&Path>, Format) {
        let (path, format) = match self {
            Command::Dist(a) => (&a.output, a.format),
            Command::Lossy(a) => (&a.output, a.format),
            Command::Zeros(a) => (&a.output, a.format),
            Command::Parametric(a) => (&a.output, a.format),
            Command::Herald(a) => (&a.output, a.format),
            Command::Dicke(a) => (&a.output, a.format),
            Command::Verify(a) => (&a.output, a.format),
        };
        (path.as_deref(), format.unwrap_or_default())
    }
}

fn read_config(path: &Path) -> CliResult<serde_json::Map<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::usage(format!("--config: {} must hold a JSON object", path.display()))),
        Err(e) => Err(CliError::usage(format!("--config: {}: {e}", path.display()))),
    }
}

/// The command to run: flags layered over the config file, if any.
pub fn resolve(cli: Cli) -> CliResult<Command> {
    let Some(path) = cli.config else {
        return cli
            .command
            .ok_or_else(|| CliError::usage("no command given; run with --help for the list"));
    };
    let mut merged = read_config(&path)?;
    if let Some(cmd) = cli.command {
        let Value::Object(flags) = serde_json::to_value(&cmd).expect("flags serialize") else {
            unreachable!("commands serialize to objects")
        };
        if merged.get("command").and_then(Value::as_str).is_some_and(|c| c != cmd.name()) {
            // settings for another command do not carry over
            merged.clear();
        }
        merged.extend(flags);
    }
    if !merged.contains_key("command") {
        return Err(CliError::usage(format!(
            "--config: {} names no command and none was given",
            path.display()
        )));
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::usage(format!("--config: {}: {e}", path.display())))
}
