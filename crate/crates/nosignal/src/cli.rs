//! Command-line front end. Exit codes: 0 when every verdict passes, 1 when a
//! verdict fails, 2 on usage or input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use nosignal_core::channel::validate_channel;
use nosignal_core::nosig::fuzz_no_signaling;
use nosignal_core::scenario::{run_epr_bohm, run_erasure, run_greenberger, run_stern_gerlach};
use nosignal_core::state::spin_projectors;
use nosignal_core::{ComplexMatrix, DimensionSpec};

use crate::format::{ChannelJson, FormatError};
use crate::report::{
    classify_table, fuzz_table, scenario_table, to_json, ClassifyDoc, ClassifyParams, FuzzDoc, FuzzParams,
    ScenarioDoc,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Largest total dimension accepted by `fuzz`.
const MAX_FUZZ_DIM: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "nosignal", version, about = "Run no-signaling scenarios and classify channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn projectors(self) -> Vec<ComplexMatrix> {
        let d = match self {
            Self::X => [1.0, 0.0, 0.0],
            Self::Y => [0.0, 1.0, 0.0],
            Self::Z => [0.0, 0.0, 1.0],
        };
        spin_projectors(d).to_vec()
    }
}

fn angle(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err("angle must be finite".into())
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err("tolerance must be a positive number".into())
    }
}

/// `"2x3"` → factors `X` (2) and `Y` (3).
pub fn parse_dims(s: &str) -> Result<DimensionSpec, String> {
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    let [a, b] = parts.as_slice() else {
        return Err(format!("expected two factors like 2x3, got `{s}`"));
    };
    let dx: usize = a.trim().parse().map_err(|_| format!("bad dimension `{a}`"))?;
    let dy: usize = b.trim().parse().map_err(|_| format!("bad dimension `{b}`"))?;
    if dx.saturating_mul(dy) > MAX_FUZZ_DIM {
        return Err(format!("total dimension {dx}x{dy} exceeds {MAX_FUZZ_DIM}"));
    }
    DimensionSpec::from_pairs(&[("X", dx), ("Y", dy)]).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-photon interferometer with a phase shifter and the map T(γ).
    Greenberger {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, value_parser = angle)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, value_parser = angle)]
        beta: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, value_parser = angle)]
        gamma: f64,
    },
    /// Singlet with the spin map applied to particle 2.
    Epr {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, value_parser = angle)]
        gamma: f64,
    },
    /// Stern-Gerlach split of particle 2 followed by an upper-path rotation.
    SternGerlach {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, value_parser = angle)]
        gamma: f64,
    },
    /// Projective measurement of particle 2 of the singlet.
    Erasure {
        #[arg(long, value_enum, default_value_t = Axis::Z)]
        basis: Axis,
        /// Keep only this outcome (selective measurement).
        #[arg(long)]
        outcome: Option<usize>,
    },
    /// Random states and random local channels; reports the worst marginal shift.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value = "2x2")]
        dims: String,
        #[arg(long, default_value_t = 1e-9, value_parser = positive)]
        tolerance: f64,
    },
    /// Validate a channel file against the condition of its declared kind.
    Classify {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] nosignal_core::Error),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

/// Rendered report and whether it passed.
pub struct Output {
    pub text: String,
    pub pass: bool,
}

fn scenario(report: nosignal_core::Result<nosignal_core::ScenarioReport>, format: Format) -> Result<Output, CliError> {
    let doc = ScenarioDoc::from(&report?);
    let text = match format {
        Format::Json => to_json(&doc),
        Format::Table => scenario_table(&doc),
    };
    Ok(Output { text, pass: doc.pass })
}

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let format = cli.format;
    match &cli.command {
        Command::Greenberger { alpha, beta, gamma } => scenario(run_greenberger(*alpha, *beta, *gamma), format),
        Command::Epr { gamma } => scenario(run_epr_bohm(*gamma), format),
        Command::SternGerlach { gamma } => scenario(run_stern_gerlach(*gamma), format),
        Command::Erasure { basis, outcome } => scenario(run_erasure(&basis.projectors(), *outcome), format),
        Command::Fuzz {
            seed,
            trials,
            dims,
            tolerance,
        } => {
            let spec = parse_dims(dims).map_err(CliError::Usage)?;
            let trials = *trials as usize;
            let worst = fuzz_no_signaling(*seed, trials, &spec)?;
            let doc = FuzzDoc {
                scenario: "fuzz",
                params: FuzzParams {
                    seed: *seed,
                    trials,
                    dims: dims.clone(),
                    tolerance: *tolerance,
                },
                worst_distance: worst,
                pass: worst <= *tolerance,
            };
            let text = match format {
                Format::Json => to_json(&doc),
                Format::Table => fuzz_table(&doc),
            };
            Ok(Output { text, pass: doc.pass })
        }
        Command::Classify { input } => {
            let raw = std::fs::read_to_string(input).map_err(|source| CliError::Io {
                path: input.clone(),
                source,
            })?;
            let file: ChannelJson = serde_json::from_str(&raw).map_err(FormatError::from)?;
            let ch = file.to_raw_channel()?;
            let params = ClassifyParams {
                input: input.display().to_string(),
                kind: file.kind,
                input_dim: ch.input_dim(),
                output_dim: ch.output_dim(),
                operators: ch.operators().len(),
            };
            let doc = ClassifyDoc::new(params, &validate_channel(&ch));
            let text = match format {
                Format::Json => to_json(&doc),
                Format::Table => classify_table(&doc),
            };
            Ok(Output { text, pass: doc.pass })
        }
    }
}

/// Parses `args` (program name first), writes the report to `out` and
/// diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            if out.write_all(o.text.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
            if o.pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
