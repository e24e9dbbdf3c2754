//! Command-line flags, the optional TOML defaults file, and SNR grid syntax.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "ldpcwb",
    version,
    about = "LDPC decoding workbench: decode, sweep error rates, estimate energy and rate, pick algorithms per SNR",
    after_help = "Units: SNR is Eb/N0 in dB, energy in joules (J), frequency in hertz (Hz), \
                  rates in bit/s. Every run echoes its resolved configuration to stderr."
)]
pub struct Cli {
    /// TOML file with default values for flags not given on the command line
    #[arg(long, global = true, env = "LDPCWB_CONFIG", value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decode one frame from an LLR file or from synthesized AWGN noise
    Decode(DecodeArgs),
    /// Monte-Carlo error-rate sweep over algorithms and an SNR grid
    Sweep(SweepArgs),
    /// Decoding-rate table (bit/s) from sweep results and a cost model
    Rate(RateArgs),
    /// Energy per frame (J) from sweep results and a cost model
    Energy(EnergyArgs),
    /// Build, query or negotiate SNR-indexed algorithm policies
    #[command(subcommand)]
    Policy(PolicyCommand),
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Parity-check matrix in alist format, or builtin:tanner155
    #[arg(long, value_name = "FILE")]
    pub code: Option<String>,
    /// Decoder: sp, logsp, ms, mms, wbf, mwbf, rrwbf, irrwbf
    #[arg(long, value_name = "NAME")]
    pub algo: Option<String>,
    /// MMS check scale or MWBF reliability weight (dimensionless)
    #[arg(long)]
    pub delta: Option<f64>,
    /// RRWBF normalization factor (dimensionless, > 0)
    #[arg(long)]
    pub beta: Option<f64>,
    /// Iteration cap
    #[arg(long, value_name = "N")]
    pub max_iters: Option<usize>,
    /// Whitespace-separated channel LLRs (positive favours bit 0)
    #[arg(long, value_name = "FILE", conflicts_with = "snr_db")]
    pub llr: Option<PathBuf>,
    /// Eb/N0 in dB for a synthesized all-zero frame
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    /// Noise seed for the synthesized frame
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also print operation counts per phase
    #[arg(long)]
    pub ops: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Parity-check matrix in alist format, or builtin:tanner155
    #[arg(long, value_name = "FILE")]
    pub code: Option<String>,
    /// Comma-separated decoders, each optionally NAME@DELTA (e.g. mms@0.75)
    #[arg(long, value_name = "LIST")]
    pub algos: Option<String>,
    /// Eb/N0 grid in dB as start:step:stop (inclusive) or a single value
    #[arg(long, value_name = "DB_GRID", allow_hyphen_values = true)]
    pub snr: Option<String>,
    /// Base seed of every noise stream
    #[arg(long)]
    pub seed: Option<u64>,
    /// Exactly this many frames per point (otherwise stop on frame-error target)
    #[arg(long, value_name = "N")]
    pub trials: Option<u64>,
    /// Frame errors to collect per point before stopping [default: 100]
    #[arg(long, value_name = "N")]
    pub target_errors: Option<u64>,
    /// Minimum frames per point under the error target [default: 1]
    #[arg(long, value_name = "N")]
    pub min_trials: Option<u64>,
    /// Frame cap per point under the error target [default: 100000]
    #[arg(long, value_name = "N")]
    pub max_trials: Option<u64>,
    /// Iteration cap for every decoder [default: 100]
    #[arg(long, value_name = "N")]
    pub max_iters: Option<usize>,
    /// RRWBF normalization factor (dimensionless, > 0)
    #[arg(long)]
    pub beta: Option<f64>,
    /// Feed every algorithm identical noise
    #[arg(long)]
    pub paired: bool,
    /// Record operation counters
    #[arg(long)]
    pub instrument: bool,
    /// Worker threads (0 = one per core); results do not depend on it
    #[arg(long, value_name = "K")]
    pub workers: Option<usize>,
    /// JSON results file (stdout if absent)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Also write a CSV summary
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    /// Sweep results JSON
    #[arg(long, value_name = "FILE")]
    pub results: PathBuf,
    /// Cost model file (algo=... energy_per_iter_j=... cycles_per_iter=...)
    #[arg(long, value_name = "FILE")]
    pub cost: Option<PathBuf>,
    /// Processor clock in Hz
    #[arg(long, value_name = "HZ")]
    pub freq_hz: Option<f64>,
    /// Information bits per frame [default: code dimension]
    #[arg(long, value_name = "BITS")]
    pub bit_length: Option<u64>,
    /// Write rate curves JSON here
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    /// Sweep results JSON
    #[arg(long, value_name = "FILE")]
    pub results: PathBuf,
    /// Cost model file (algo=... energy_per_iter_j=... cycles_per_iter=...)
    #[arg(long, value_name = "FILE")]
    pub cost: Option<PathBuf>,
    /// Write energy curves JSON here
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum PolicyCommand {
    /// Best algorithm per SNR interval from metric curves
    Build {
        /// Energy (J) or rate (bit/s) curves JSON
        #[arg(long, value_name = "FILE")]
        curves: PathBuf,
        /// Write the policy table JSON here
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Algorithm for one SNR
    Select {
        /// Policy table JSON
        #[arg(long, value_name = "FILE", required_unless_present = "curves")]
        policy: Option<PathBuf>,
        /// Curves JSON to build the policy from
        #[arg(long, value_name = "FILE", conflicts_with = "policy")]
        curves: Option<PathBuf>,
        /// Eb/N0 in dB
        #[arg(long, value_name = "DB", allow_negative_numbers = true)]
        snr_db: f64,
    },
    /// Lowest SNR whose cheapest decoder meets an energy budget
    Joint {
        /// Energy curves JSON
        #[arg(long, value_name = "FILE")]
        curves: PathBuf,
        /// Receiver energy budget per frame in joules
        #[arg(long, value_name = "J")]
        budget_j: f64,
    },
}

/// Defaults read from `--config` / `LDPCWB_CONFIG`.
#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub code: Option<String>,
    pub algo: Option<String>,
    pub algos: Option<String>,
    pub snr: Option<String>,
    pub seed: Option<u64>,
    pub delta: Option<f64>,
    pub beta: Option<f64>,
    pub max_iters: Option<usize>,
    pub trials: Option<u64>,
    pub target_errors: Option<u64>,
    pub min_trials: Option<u64>,
    pub max_trials: Option<u64>,
    pub workers: Option<usize>,
    pub cost: Option<PathBuf>,
    pub freq_hz: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::new("config", format!("{}: {}", path.display(), e.message())))
    }
}

/// Parses `start:step:stop` (inclusive) or a single value.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::new("usage", format!("bad SNR grid {s:?}: {why}"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad("expected numbers"))?;
    if parts.iter().any(|v| !v.is_finite()) {
        return Err(bad("values must be finite"));
    }
    match parts[..] {
        [v] => Ok(vec![v]),
        [start, step, stop] => {
            if !(step > 0.0) || stop < start {
                return Err(bad("need step > 0 and stop >= start"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if count > 10_000 {
                return Err(bad("more than 10000 points"));
            }
            // round away accumulated binary error so 1:0.1:2 yields 1.3, not 1.3000000000000003
            Ok((0..count)
                .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
                .collect())
        }
        _ => Err(bad("expected start:step:stop")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_syntax() {
        assert_eq!(parse_grid("1:0.5:4.5").unwrap(), vec![1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5]);
        assert_eq!(parse_grid("3").unwrap(), vec![3.0]);
        assert_eq!(parse_grid("-1:1:1").unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(parse_grid("1:0.1:1.35").unwrap(), vec![1.0, 1.1, 1.2, 1.3]);
        assert_eq!(parse_grid("1:0.1:2").unwrap().len(), 11);
        assert_eq!(parse_grid("1:0.1:2").unwrap()[3], 1.3);
        for bad in ["", "a", "1:2", "1:0:2", "2:1:1", "1:-1:0", "1:1:inf"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(toml::from_str::<FileConfig>("seed = 3\ncode = \"x\"").is_ok());
        assert!(toml::from_str::<FileConfig>("sed = 3").is_err());
    }

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
