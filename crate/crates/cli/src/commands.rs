use std::fs;
use std::path::Path;
use std::str::FromStr;

use ofdm_snm::analytics::{
    average_asymptotic_outage, average_bler, average_outage, min_psk_vs_im,
    psk_set_vs_ofdm, psk_vs_ofdm_bound, rate_im,
};
use ofdm_snm::modulation::{average_rate, build_codebook};
use ofdm_snm::sim::{run_sweep, ExperimentSpec, Metric, SweepResult};
use ofdm_snm::{ChannelRealization, MultiUserScenario, Protocol, Scheme, SystemConfig};

use crate::args::{
    CodebookArgs, Command, FigureArgs, ProtocolArg, RatesArgs, RatesMode, SweepArgs,
};
use crate::output::{emit, metadata_line, Series, SeriesRow, SWEEP_HEADER};
use crate::{Cli, CliError, Result};

/// Default trials per point for outage sweeps.
pub const OUTAGE_TRIALS: u64 = 1_000_000;
/// Default trials per point for BLER and throughput sweeps.
pub const LINK_TRIALS: u64 = 100_000;

/// Regulated-protocol thresholds drawn in the figure 6 preset.
pub const FIG6_THRESHOLDS: [f64; 3] = [1e-3, 10.0, 1e3];

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Codebook(a) => cmd_codebook(&a),
        Command::Outage(a) => cmd_sweep(Metric::Outage, &a),
        Command::Bler(a) => cmd_sweep(Metric::Bler, &a),
        Command::Throughput(a) => cmd_sweep(Metric::Throughput, &a),
        Command::Rates(a) => cmd_rates(&a),
        Command::Figure(a) => cmd_figure(&a),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn with_workers<T>(workers: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T>
where
    T: Send,
{
    match workers {
        None => f(),
        Some(0) => Err(usage("--workers must be at least 1")),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| usage(format!("cannot start {w} workers: {e}")))?
            .install(f),
    }
}

/// Inclusive grid `start, start + step, ..., <= stop`, rounded to 1e-9 dB.
pub fn snr_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(usage("SNR grid bounds must be finite"));
    }
    if step <= 0.0 {
        return Err(usage("--snr-step must be positive"));
    }
    if stop < start {
        return Err(usage("--snr-stop is below --snr-start"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

// ---------------------------------------------------------------- codebook

pub const CODEBOOK_HEADER: [&str; 6] = ["k", "p", "heading", "subsequent", "sap", "x"];

fn format_symbol(s: num_complex::Complex64) -> String {
    if s.re == 0.0 && s.im == 0.0 {
        "0".to_string()
    } else if s.im == 0.0 {
        format!("{:+}", s.re)
    } else if s.re == 0.0 {
        format!("{:+}i", s.im)
    } else {
        format!("{:+.6}{:+.6}i", s.re, s.im)
    }
}

/// Codebook rows in canonical order.
pub fn codebook_rows(gains: &[f64], n: usize, m: usize, scheme: Scheme) -> Result<Vec<Vec<String>>> {
    let config = SystemConfig::new(n, m)?;
    if gains.len() != n {
        return Err(ofdm_snm::Error::Dimension {
            expected: n,
            actual: gains.len(),
        }
        .into());
    }
    let channel = ChannelRealization::from_gains(gains)?;
    let codebook = build_codebook(&channel, &config, scheme)?;
    Ok(codebook
        .entries()
        .map(|e| {
            let x: Vec<String> = e.block.symbols.iter().map(|&s| format_symbol(s)).collect();
            vec![
                e.index.to_string(),
                e.bit_len().to_string(),
                e.heading.to_string(),
                e.subsequent.to_string(),
                e.block.sap.to_string(),
                format!("[{}]", x.join(",")),
            ]
        })
        .collect())
}

fn cmd_codebook(a: &CodebookArgs) -> Result<()> {
    let rows = codebook_rows(&a.gains.0, a.n, a.m, a.scheme)?;
    emit(a.out.as_deref(), None, &CODEBOOK_HEADER, &rows)
}

// ------------------------------------------------------------------ sweeps

fn scenario(protocol: ProtocolArg, phi: Option<f64>, noise_power: f64) -> Result<Option<MultiUserScenario>> {
    match (protocol, phi) {
        (ProtocolArg::None, None) => Ok(None),
        (ProtocolArg::Unregulated, None) => Ok(Some(MultiUserScenario::with_defaults(
            noise_power,
            Protocol::Unregulated,
        ))),
        (ProtocolArg::Regulated, Some(phi)) => Ok(Some(MultiUserScenario::with_defaults(
            noise_power,
            Protocol::Regulated {
                threshold: phi * noise_power,
            },
        ))),
        (ProtocolArg::Regulated, None) => Err(usage("--protocol regulated needs --phi")),
        (_, Some(_)) => Err(usage("--phi only applies to --protocol regulated")),
    }
}

fn series_name(scheme: Scheme, protocol: ProtocolArg, phi: Option<f64>) -> String {
    match (protocol, phi) {
        (ProtocolArg::Unregulated, _) => format!("sim_{scheme}_unregulated"),
        (ProtocolArg::Regulated, Some(phi)) => format!("sim_{scheme}_regulated_phi_{phi}"),
        _ => format!("sim_{scheme}"),
    }
}

fn default_trials(metric: Metric) -> u64 {
    match metric {
        Metric::Outage => OUTAGE_TRIALS,
        Metric::Bler | Metric::Throughput => LINK_TRIALS,
    }
}

/// Builds and validates the experiment described by sweep flags.
pub fn sweep_spec(metric: Metric, a: &SweepArgs) -> Result<ExperimentSpec> {
    let grid = snr_grid(a.snr_start, a.snr_stop, a.snr_step)?;
    let mut config = SystemConfig::new(a.n, a.m)?;
    config.outage_threshold = a.xi;
    config.avg_channel_gain = a.mu;
    let mut spec = ExperimentSpec::new(config, metric, a.scheme)
        .with_grid(grid)
        .with_trials(a.trials.unwrap_or_else(|| default_trials(metric)))
        .with_seed(a.seed);
    spec.max_trials = a.max_trials;
    if let Some(s) = scenario(a.protocol, a.phi, config.noise_power)? {
        if metric == Metric::Outage {
            return Err(usage("--protocol does not apply to outage sweeps"));
        }
        spec = spec.with_multiuser(s);
    }
    spec.validate()?;
    Ok(spec)
}

fn to_series(name: String, result: &SweepResult) -> Series {
    Series {
        name,
        rows: result
            .points
            .iter()
            .map(|p| SeriesRow {
                snr_db: p.snr_db,
                value: p.estimate,
                ci: Some((p.ci_low, p.ci_high)),
                trials: Some(p.trials),
            })
            .collect(),
    }
}

fn cmd_sweep(metric: Metric, a: &SweepArgs) -> Result<()> {
    let spec = sweep_spec(metric, a)?;
    let result = with_workers(a.workers, || Ok(run_sweep(&spec)?))?;
    let series = to_series(series_name(a.scheme, a.protocol, a.phi), &result);
    let meta = (!a.no_metadata).then(|| {
        let mut params = vec![
            ("n", a.n.to_string()),
            ("m", a.m.to_string()),
            ("scheme", a.scheme.to_string()),
            ("seed", a.seed.to_string()),
            ("trials", spec.trials_per_point.to_string()),
        ];
        if let Some(phi) = a.phi {
            params.push(("phi", phi.to_string()));
        }
        metadata_line(&metric.to_string(), &params)
    });
    emit(a.out.as_deref(), meta.as_deref(), &SWEEP_HEADER, &series.records())
}

// ------------------------------------------------------------------- rates

pub const EMPTY_SET: &str = "\u{2205}";

/// Table of the smallest PSK order beating OFDM-IM, one row per `T` and one
/// column per `N`.
pub fn im_table(ns: &[usize]) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let max_n = ns.iter().copied().max().ok_or_else(|| usage("--n is empty"))?;
    let mut header = vec!["T".to_string()];
    header.extend(ns.iter().map(|n| format!("N={n}")));
    let mut rows = Vec::new();
    for t in 1..max_n {
        let mut row = vec![t.to_string()];
        for &n in ns {
            let cell = if t >= n {
                "N/A".to_string()
            } else {
                match min_psk_vs_im(n, t)? {
                    Some(m) => format!("M>={m}"),
                    None => EMPTY_SET.to_string(),
                }
            };
            row.push(cell);
        }
        rows.push(row);
    }
    Ok((header, rows))
}

fn format_set(set: &[usize]) -> String {
    if set.is_empty() {
        EMPTY_SET.to_string()
    } else {
        let items: Vec<String> = set.iter().map(|m| m.to_string()).collect();
        format!("{{{}}}", items.join(","))
    }
}

fn format_bound(b: f64) -> String {
    if (b - b.round()).abs() < 1e-12 {
        format!("{}", b.round())
    } else {
        format!("{b:.3}")
    }
}

/// Admissible PSK orders against plain OFDM, one row per `N`.
pub fn ofdm_table(ns: &[usize]) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let header = ["N", "bound", "set"].map(String::from).to_vec();
    let rows = ns
        .iter()
        .map(|&n| {
            Ok(vec![
                n.to_string(),
                format_bound(psk_vs_ofdm_bound(n)?),
                format_set(&psk_set_vs_ofdm(n)?),
            ])
        })
        .collect::<Result<_>>()?;
    Ok((header, rows))
}

fn im_curves(ns: &[usize], max_log2: u32) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let header = ["n", "t", "m", "rate_snm", "rate_im"].map(String::from).to_vec();
    let mut rows = Vec::new();
    for &n in ns {
        for t in 1..n {
            for bits in 1..=max_log2 {
                let m = 1usize << bits;
                rows.push(vec![
                    n.to_string(),
                    t.to_string(),
                    m.to_string(),
                    average_rate(n, m)?.to_string(),
                    rate_im(n, t, m)?.to_string(),
                ]);
            }
        }
    }
    Ok((header, rows))
}

/// PSK orders plotted in the rate-vs-N curves.
const OFDM_CURVE_ORDERS: [usize; 4] = [2, 4, 8, 16];

fn ofdm_curves(max_log2: u32) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let header = ["n", "m", "rate_snm", "rate_ofdm"].map(String::from).to_vec();
    let mut rows = Vec::new();
    for m in OFDM_CURVE_ORDERS {
        for bits in 1..=max_log2 {
            let n = 1usize << bits;
            rows.push(vec![
                n.to_string(),
                m.to_string(),
                average_rate(n, m)?.to_string(),
                ofdm_snm::analytics::rate_ofdm(n, m)?.to_string(),
            ]);
        }
    }
    Ok((header, rows))
}

fn cmd_rates(a: &RatesArgs) -> Result<()> {
    let ns = &a.n.0;
    if a.max_log2 == 0 || a.max_log2 > 16 {
        return Err(usage("--max-log2 must be in 1..=16"));
    }
    let (header, rows) = match (a.mode, a.curves) {
        (RatesMode::Im, false) => im_table(ns)?,
        (RatesMode::Ofdm, false) => ofdm_table(ns)?,
        (RatesMode::Im, true) => im_curves(ns, a.max_log2)?,
        (RatesMode::Ofdm, true) => ofdm_curves(a.max_log2)?,
    };
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mode = match a.mode {
        RatesMode::Im => "im",
        RatesMode::Ofdm => "ofdm",
    };
    let meta = (!a.no_metadata).then(|| metadata_line("rates", &[("mode", mode.to_string())]));
    emit(a.out.as_deref(), meta.as_deref(), &header, &rows)
}

// ----------------------------------------------------------------- figures

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Outage: analytic, asymptotic and simulated, enhanced vs original.
    Outage,
    /// BLER: union bound and simulated.
    Bler,
    /// Throughput with BPSK.
    ThroughputBpsk,
    /// Throughput with QPSK.
    ThroughputQpsk,
    /// Outage with and without halving.
    HalvedOutage,
    /// BLER with and without halving.
    HalvedBler,
    /// Throughput with and without halving.
    HalvedThroughput,
    /// Single-user vs multi-user BLER.
    MultiUser,
}

impl FromStr for FigureId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "2" => FigureId::Outage,
            "3" => FigureId::Bler,
            "4a" => FigureId::ThroughputBpsk,
            "4b" => FigureId::ThroughputQpsk,
            "5a" => FigureId::HalvedOutage,
            "5b" => FigureId::HalvedBler,
            "5c" => FigureId::HalvedThroughput,
            "6" => FigureId::MultiUser,
            _ => {
                return Err(usage(format!(
                    "unknown figure `{s}` (expected 2, 3, 4a, 4b, 5a, 5b, 5c or 6)"
                )))
            }
        })
    }
}

impl FigureId {
    pub fn label(self) -> &'static str {
        match self {
            FigureId::Outage => "2",
            FigureId::Bler => "3",
            FigureId::ThroughputBpsk => "4a",
            FigureId::ThroughputQpsk => "4b",
            FigureId::HalvedOutage => "5a",
            FigureId::HalvedBler => "5b",
            FigureId::HalvedThroughput => "5c",
            FigureId::MultiUser => "6",
        }
    }

    pub fn metric(self) -> Metric {
        match self {
            FigureId::Outage | FigureId::HalvedOutage => Metric::Outage,
            FigureId::Bler | FigureId::HalvedBler | FigureId::MultiUser => Metric::Bler,
            FigureId::ThroughputBpsk | FigureId::ThroughputQpsk | FigureId::HalvedThroughput => {
                Metric::Throughput
            }
        }
    }

    fn default_ns(self) -> Vec<usize> {
        match self {
            FigureId::MultiUser => vec![4],
            _ => vec![4, 8],
        }
    }

    fn default_m(self) -> usize {
        match self {
            FigureId::ThroughputQpsk => 4,
            _ => 2,
        }
    }

    /// `(start, stop, step)` in dB.
    fn default_grid(self) -> (f64, f64, f64) {
        match self {
            FigureId::Outage => (0.0, 60.0, 5.0),
            FigureId::MultiUser => (0.0, 50.0, 5.0),
            _ => (0.0, 40.0, 5.0),
        }
    }

    fn schemes(self) -> [Scheme; 2] {
        match self {
            FigureId::HalvedOutage | FigureId::HalvedBler | FigureId::HalvedThroughput => {
                [Scheme::Enhanced, Scheme::Halved]
            }
            _ => [Scheme::Enhanced, Scheme::Original],
        }
    }
}

/// One CSV file of a figure preset.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureSeries {
    pub file_name: String,
    pub series: Series,
}

fn analytic_series(name: &str, grid: &[f64], f: impl Fn(f64) -> Result<f64>) -> Result<Series> {
    let rows = grid
        .iter()
        .map(|&snr_db| {
            Ok(SeriesRow {
                snr_db,
                value: f(snr_db)?,
                ci: None,
                trials: None,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Series {
        name: name.to_string(),
        rows,
    })
}

/// Computes every series of a figure preset.
pub fn figure_series(a: &FigureArgs) -> Result<Vec<FigureSeries>> {
    let id: FigureId = a.id.parse()?;
    let (start, stop, step) = id.default_grid();
    let grid = snr_grid(
        a.snr_start.unwrap_or(start),
        a.snr_stop.unwrap_or(stop),
        a.snr_step.unwrap_or(step),
    )?;
    let ns = a.n.map(|n| vec![n]).unwrap_or_else(|| id.default_ns());
    let m = a.m.unwrap_or_else(|| id.default_m());
    let metric = id.metric();
    let trials = a.trials.unwrap_or_else(|| default_trials(metric));
    if a.phi.is_some() && id != FigureId::MultiUser {
        return Err(usage("--phi only applies to figure 6"));
    }

    let mut out = Vec::new();
    for n in ns {
        let config = SystemConfig::new(n, m)?;
        let base = ExperimentSpec::new(config, metric, Scheme::Enhanced)
            .with_grid(grid.iter().copied())
            .with_trials(trials)
            .with_seed(a.seed);
        let mut series = Vec::new();
        match id {
            FigureId::Outage => {
                series.push(analytic_series("analytic", &grid, |s| {
                    Ok(average_outage(&config.with_snr_db(s))?)
                })?);
                series.push(analytic_series("asymptotic", &grid, |s| {
                    Ok(average_asymptotic_outage(&config.with_snr_db(s))?)
                })?);
            }
            FigureId::Bler => {
                series.push(analytic_series("approx", &grid, |s| {
                    Ok(average_bler(&config.with_snr_db(s))?.union_bound)
                })?);
            }
            _ => {}
        }
        if id == FigureId::MultiUser {
            let mut cases = vec![
                ("single_user".to_string(), None),
                (
                    "unregulated".to_string(),
                    Some(MultiUserScenario::with_defaults(
                        config.noise_power,
                        Protocol::Unregulated,
                    )),
                ),
            ];
            let thresholds = a.phi.map(|p| vec![p]).unwrap_or_else(|| FIG6_THRESHOLDS.to_vec());
            for phi in thresholds {
                cases.push((
                    format!("regulated_phi_{phi}"),
                    Some(MultiUserScenario::with_defaults(
                        config.noise_power,
                        Protocol::Regulated {
                            threshold: phi * config.noise_power,
                        },
                    )),
                ));
            }
            for (name, scenario) in cases {
                let mut spec = base.clone();
                spec.multiuser = scenario;
                let result = with_workers(a.workers, || Ok(run_sweep(&spec)?))?;
                series.push(to_series(name, &result));
            }
        } else {
            for scheme in id.schemes() {
                let mut spec = base.clone();
                spec.scheme = scheme;
                let result = with_workers(a.workers, || Ok(run_sweep(&spec)?))?;
                series.push(to_series(format!("sim_{scheme}"), &result));
                if metric == Metric::Throughput {
                    let rate = average_rate(scheme.effective_subcarriers(n), m)?;
                    let name = if id == FigureId::HalvedThroughput {
                        format!("rate_{scheme}")
                    } else {
                        "rate".to_string()
                    };
                    if !series.iter().any(|s: &Series| s.name == name) {
                        series.push(analytic_series(&name, &grid, |_| Ok(rate))?);
                    }
                }
            }
        }
        out.extend(series.into_iter().map(|s| FigureSeries {
            file_name: format!("fig{}_n{n}_{}.csv", id.label(), s.name),
            series: s,
        }));
    }
    Ok(out)
}

fn write_figure(dir: &Path, a: &FigureArgs, figures: &[FigureSeries]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for f in figures {
        let meta = (!a.no_metadata).then(|| {
            metadata_line(
                "figure",
                &[
                    ("id", a.id.clone()),
                    ("series", f.series.name.clone()),
                    ("seed", a.seed.to_string()),
                ],
            )
        });
        emit(
            Some(&dir.join(&f.file_name)),
            meta.as_deref(),
            &SWEEP_HEADER,
            &f.series.records(),
        )?;
    }
    Ok(())
}

fn cmd_figure(a: &FigureArgs) -> Result<()> {
    let figures = figure_series(a)?;
    write_figure(&a.out, a, &figures)?;
    for f in &figures {
        eprintln!("wrote {}", a.out.join(&f.file_name).display());
    }
    Ok(())
}
