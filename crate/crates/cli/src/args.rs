use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ofdm_snm::Scheme;

/// Enhanced OFDM-SNM link simulator and analytics.
///
/// SNR quantities are in dB; every other numeric flag is linear.
#[derive(Debug, Parser)]
#[command(name = "ofdm-snm", version, args_override_self = true)]
pub struct Cli {
    /// key=value file of default flags; command-line flags take precedence
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the codebook (mapping table) for given channel gains
    Codebook(CodebookArgs),
    /// Monte Carlo average outage sweep
    Outage(SweepArgs),
    /// Monte Carlo average BLER sweep with ML detection
    Bler(SweepArgs),
    /// Monte Carlo average throughput (goodput) sweep
    Throughput(SweepArgs),
    /// Rate comparison tables against OFDM-IM and plain OFDM
    Rates(RatesArgs),
    /// Regenerate the data series of a figure preset
    Figure(FigureArgs),
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse()
}

/// Comma-separated list taken as a single flag value, so a repeated flag
/// replaces the earlier list instead of extending it.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|item| {
                item.trim()
                    .parse()
                    .map_err(|e| format!("invalid list item `{item}`: {e}"))
            })
            .collect::<Result<Vec<T>, String>>()
            .map(List)
    }
}

impl<T: fmt::Display> fmt::Display for List<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&items.join(","))
    }
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct CodebookArgs {
    /// Channel power gains |h(n)|^2, comma separated (linear)
    #[arg(long, allow_hyphen_values = true)]
    pub gains: List<f64>,
    /// Number of subcarriers N
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// PSK order M
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Subcarrier placement: enhanced, original or halved
    #[arg(long, default_value = "enhanced", value_parser = parse_scheme)]
    pub scheme: Scheme,
    /// Output file (standard output when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    /// Single user
    None,
    /// Secondary users always fill idle subcarriers
    Unregulated,
    /// Secondary users transmit only below the --phi interference threshold
    Regulated,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct SweepArgs {
    /// Number of subcarriers N
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// PSK order M
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Subcarrier placement: enhanced, original or halved
    #[arg(long, default_value = "enhanced", value_parser = parse_scheme)]
    pub scheme: Scheme,
    /// Trials per SNR point (default 1e6 for outage, 1e5 otherwise)
    #[arg(long)]
    pub trials: Option<u64>,
    /// Keep doubling trials per point up to this cap until the 95% CI
    /// half-width is below 10% of the estimate
    #[arg(long)]
    pub max_trials: Option<u64>,
    /// Master seed (64-bit)
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// First P_t/N_0 point (dB)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub snr_start: f64,
    /// Last P_t/N_0 point (dB, inclusive)
    #[arg(long, default_value_t = 40.0, allow_hyphen_values = true)]
    pub snr_stop: f64,
    /// P_t/N_0 step (dB)
    #[arg(long, default_value_t = 5.0)]
    pub snr_step: f64,
    /// Outage threshold xi (linear)
    #[arg(long, default_value_t = 1.0)]
    pub xi: f64,
    /// Average channel power gain mu (linear)
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Secondary-user protocol
    #[arg(long, value_enum, default_value_t = ProtocolArg::None)]
    pub protocol: ProtocolArg,
    /// Interference threshold phi for the regulated protocol (linear,
    /// in units of N_0)
    #[arg(long)]
    pub phi: Option<f64>,
    /// Number of worker threads
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output file (standard output when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Omit the leading metadata comment line
    #[arg(long)]
    pub no_metadata: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RatesMode {
    /// OFDM-SNM vs OFDM-IM: smallest M per (N, T)
    Im,
    /// OFDM-SNM vs plain OFDM: admissible M per N
    Ofdm,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct RatesArgs {
    #[arg(long, value_enum)]
    pub mode: RatesMode,
    /// Numbers of subcarriers, comma separated
    #[arg(long, default_value = "2,4,8")]
    pub n: List<usize>,
    /// Emit rate curves (rate vs M for im, rate vs N for ofdm) instead of
    /// the table
    #[arg(long)]
    pub curves: bool,
    /// Largest log2(M) for im curves, largest log2(N) for ofdm curves
    #[arg(long, default_value_t = 8)]
    pub max_log2: u32,
    /// Output file (standard output when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Omit the leading metadata comment line
    #[arg(long)]
    pub no_metadata: bool,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct FigureArgs {
    /// Figure preset: 2, 3, 4a, 4b, 5a, 5b, 5c or 6
    #[arg(long)]
    pub id: String,
    /// Number of subcarriers (preset default: 4 and 8; 4 for figure 6)
    #[arg(long)]
    pub n: Option<usize>,
    /// PSK order (preset default)
    #[arg(long)]
    pub m: Option<usize>,
    /// Trials per SNR point (default 1e6 for outage, 1e5 otherwise)
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed (64-bit)
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// First P_t/N_0 point (dB)
    #[arg(long, allow_hyphen_values = true)]
    pub snr_start: Option<f64>,
    /// Last P_t/N_0 point (dB, inclusive)
    #[arg(long, allow_hyphen_values = true)]
    pub snr_stop: Option<f64>,
    /// P_t/N_0 step (dB)
    #[arg(long)]
    pub snr_step: Option<f64>,
    /// Regulated-protocol threshold for figure 6 (linear, units of N_0);
    /// replaces the preset list
    #[arg(long)]
    pub phi: Option<f64>,
    /// Number of worker threads
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory, one CSV per series
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Omit the leading metadata comment line
    #[arg(long)]
    pub no_metadata: bool,
}
