//! Monte Carlo sweeps over `P_t / N_0`.
//!
//! Every trial owns a counter-based RNG stream derived from
//! `(master_seed, point index, trial index)` and the per-point reduction
//! only adds integers, so a sweep is bit-identical for any thread count.
//!
//! Each point sets `P_t = N_0 * 10^(snr_db/10)` with `N_0` taken from the
//! configuration. A configuration with `N_0 = 0` is noiseless and keeps its
//! transmit power at every point.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{amplitude, noise, sample_channel, ReceivedBlock, RngStream};
use crate::detector::{add_secondary_interference_in_place, ml_search, MultiUserScenario};
use crate::modulation::{build_codebook, gain_ranking, Scheme, SystemConfig};
use crate::{Error, Result};

/// Two-sided 95% standard normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

/// Quantity estimated by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Outage,
    Bler,
    /// Correctly decoded information bits per block, in bpcu.
    Throughput,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Outage => "outage",
            Metric::Bler => "bler",
            Metric::Throughput => "throughput",
        })
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "outage" => Ok(Metric::Outage),
            "bler" => Ok(Metric::Bler),
            "throughput" => Ok(Metric::Throughput),
            _ => Err(format!("unknown metric `{s}`")),
        }
    }
}

/// Full description of one Monte Carlo sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub config: SystemConfig,
    /// Strictly increasing `P_t / N_0` values in dB.
    pub snr_db_grid: Vec<f64>,
    pub trials_per_point: u64,
    pub master_seed: u64,
    pub scheme: Scheme,
    pub metric: Metric,
    pub multiuser: Option<MultiUserScenario>,
    /// When set, a point keeps doubling its trial count until the 95%
    /// half-width drops below 10% of the estimate or this cap is reached.
    pub max_trials: Option<u64>,
}

impl ExperimentSpec {
    pub fn new(config: SystemConfig, metric: Metric, scheme: Scheme) -> Self {
        ExperimentSpec {
            config,
            snr_db_grid: Vec::new(),
            trials_per_point: 100_000,
            master_seed: 0,
            scheme,
            metric,
            multiuser: None,
            max_trials: None,
        }
    }

    pub fn with_grid(mut self, grid: impl IntoIterator<Item = f64>) -> Self {
        self.snr_db_grid = grid.into_iter().collect();
        self
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials_per_point = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_multiuser(mut self, scenario: MultiUserScenario) -> Self {
        self.multiuser = Some(scenario);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        self.scheme.check(self.config.n_subcarriers)?;
        if self.trials_per_point == 0 {
            return Err(invalid("trials_per_point must be at least 1"));
        }
        if self.snr_db_grid.is_empty() {
            return Err(invalid("SNR grid is empty"));
        }
        if self.snr_db_grid.iter().any(|s| s.is_nan()) {
            return Err(invalid("SNR grid contains NaN"));
        }
        if self.snr_db_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("SNR grid must be strictly increasing"));
        }
        if let Some(cap) = self.max_trials {
            if cap < self.trials_per_point {
                return Err(invalid("max_trials is below trials_per_point"));
            }
        }
        if let Some(scenario) = &self.multiuser {
            scenario.validate()?;
            if self.metric == Metric::Outage {
                return Err(invalid("outage sweeps do not model secondary users"));
            }
        }
        Ok(())
    }
}

fn invalid(msg: &str) -> Error {
    Error::InvalidExperiment(msg.to_string())
}

/// One point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    /// Number of outage or block-error events (zero for throughput).
    pub events: u64,
}

impl SweepPoint {
    /// Binomial standard error of the estimate.
    pub fn std_error(&self) -> f64 {
        (self.estimate * (1.0 - self.estimate) / self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub spec: ExperimentSpec,
    pub elapsed: Duration,
}

/// Sufficient statistics of a batch of trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    trials: u64,
    events: u64,
    bits: u64,
    bits_sq: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            trials: self.trials + o.trials,
            events: self.events + o.events,
            bits: self.bits + o.bits,
            bits_sq: self.bits_sq + o.bits_sq,
        }
    }
}

/// Wilson score interval for `events` out of `trials` at 95% confidence.
pub fn wilson_interval(events: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = events as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

/// Outage event for one channel draw: any active subcarrier below `xi`.
pub fn outage_trial<R: Rng + ?Sized>(
    config: &SystemConfig,
    scheme: Scheme,
    rng: &mut R,
) -> Result<bool> {
    let n = config.n_subcarriers;
    let channel = sample_channel(rng, n, config.avg_channel_gain)?;
    let t = rng.random_range(1..=scheme.effective_subcarriers(n));
    let gains = channel.gains();
    let weakest = match scheme {
        Scheme::Original => gains[..t].iter().copied().fold(f64::INFINITY, f64::min),
        Scheme::Enhanced | Scheme::Halved => gains[gain_ranking(gains)[t - 1]],
    };
    let snr = config.transmit_power * weakest / (t as f64 * config.noise_power);
    Ok(snr < config.outage_threshold)
}

/// Outcome of one transmitted block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkOutcome {
    pub block_error: bool,
    /// Bits `p(k)` carried by the transmitted block.
    pub bits: u64,
}

/// Draws a channel and uniform source bits, sends the block, optionally
/// adds secondary-user interference and runs ML detection.
pub fn link_trial<R: Rng + ?Sized>(
    config: &SystemConfig,
    scheme: Scheme,
    multiuser: Option<&MultiUserScenario>,
    rng: &mut R,
) -> Result<LinkOutcome> {
    let n = config.n_subcarriers;
    let channel = sample_channel(rng, n, config.avg_channel_gain)?;
    let codebook = build_codebook(&channel, config, scheme)?;

    // uniform bits: the heading picks t, the payload is t log2(M) fair bits
    let t = rng.random_range(1..=codebook.max_active());
    let payload_bits = t * codebook.bits_per_symbol();
    let value = rng.random::<u64>() & ((1u64 << payload_bits) - 1);
    let truth = codebook.offset(t) + value as usize;

    let amp = amplitude(config, t);
    let h = channel.coefficients();
    let mut samples = Vec::with_capacity(n);
    let mut active = vec![false; n];
    let pattern = codebook.pattern(t);
    let mut slot = 0;
    for (sc, busy) in active.iter_mut().enumerate() {
        let mut y = noise(rng, config.noise_power);
        if slot < t && pattern[slot] == sc {
            y += amp * h[sc] * codebook.slot_symbol(t, value, slot);
            *busy = true;
            slot += 1;
        }
        samples.push(y);
    }
    let mut received = ReceivedBlock { samples };
    if let Some(scenario) = multiuser {
        add_secondary_interference_in_place(&mut received, &active, scenario, rng)?;
    }
    let (decided, _) = ml_search(&received, &channel, &codebook, config)?;
    Ok(LinkOutcome {
        block_error: decided != truth,
        bits: (codebook.heading_len() + payload_bits) as u64,
    })
}

fn run_batch(
    spec: &ExperimentSpec,
    config: &SystemConfig,
    point: usize,
    trials: std::ops::Range<u64>,
) -> Result<Tally> {
    let multiuser = spec.multiuser.as_ref();
    trials
        .into_par_iter()
        .map(|trial| {
            let mut rng = RngStream::for_trial(spec.master_seed, point as u64, trial).rng();
            let tally = match spec.metric {
                Metric::Outage => {
                    let out = outage_trial(config, spec.scheme, &mut rng)?;
                    Tally {
                        trials: 1,
                        events: out as u64,
                        ..Tally::default()
                    }
                }
                Metric::Bler | Metric::Throughput => {
                    let o = link_trial(config, spec.scheme, multiuser, &mut rng)?;
                    let good = if o.block_error { 0 } else { o.bits };
                    Tally {
                        trials: 1,
                        events: o.block_error as u64,
                        bits: good,
                        bits_sq: good * good,
                    }
                }
            };
            Ok(tally)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
}

fn summarize(metric: Metric, snr_db: f64, tally: Tally) -> SweepPoint {
    let n = tally.trials as f64;
    let (estimate, ci_low, ci_high) = match metric {
        Metric::Outage | Metric::Bler => {
            let (lo, hi) = wilson_interval(tally.events, tally.trials);
            (tally.events as f64 / n, lo, hi)
        }
        Metric::Throughput => {
            let mean = tally.bits as f64 / n;
            let var = if tally.trials > 1 {
                ((tally.bits_sq as f64 - n * mean * mean) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            let half = Z_95 * (var / n).sqrt();
            (mean, mean - half, mean + half)
        }
    };
    SweepPoint {
        snr_db,
        estimate,
        ci_low,
        ci_high,
        trials: tally.trials,
        events: tally.events,
    }
}

fn precise_enough(p: &SweepPoint) -> bool {
    p.estimate > 0.0 && (p.ci_high - p.ci_low) / 2.0 < 0.1 * p.estimate
}

/// Runs any sweep, dispatching on `spec.metric`.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepResult> {
    spec.validate()?;
    let start = Instant::now();
    let mut points = Vec::with_capacity(spec.snr_db_grid.len());
    for (index, &snr_db) in spec.snr_db_grid.iter().enumerate() {
        let config = spec.config.with_snr_db(snr_db);
        let mut tally = run_batch(spec, &config, index, 0..spec.trials_per_point)?;
        let mut point = summarize(spec.metric, snr_db, tally);
        if let Some(cap) = spec.max_trials {
            while !precise_enough(&point) && tally.trials < cap {
                let more = tally.trials.min(cap - tally.trials);
                let extra = run_batch(spec, &config, index, tally.trials..tally.trials + more)?;
                tally = tally.merge(extra);
                point = summarize(spec.metric, snr_db, tally);
            }
        }
        points.push(point);
    }
    Ok(SweepResult {
        points,
        spec: spec.clone(),
        elapsed: start.elapsed(),
    })
}

fn require_metric(spec: &ExperimentSpec, metric: Metric) -> Result<()> {
    if spec.metric == metric {
        Ok(())
    } else {
        Err(Error::InvalidExperiment(format!(
            "expected a {metric} experiment, got {}",
            spec.metric
        )))
    }
}

/// Average outage: per trial a channel and a uniform active count are drawn
/// and the block is in outage if any active subcarrier is below `xi`.
pub fn run_outage_sweep(spec: &ExperimentSpec) -> Result<SweepResult> {
    require_metric(spec, Metric::Outage)?;
    run_sweep(spec)
}

/// Average BLER of ML detection, single-user unless the spec carries a
/// multi-user scenario.
pub fn run_bler_sweep(spec: &ExperimentSpec) -> Result<SweepResult> {
    require_metric(spec, Metric::Bler)?;
    run_sweep(spec)
}

/// Average goodput in bits per channel use.
pub fn run_throughput_sweep(spec: &ExperimentSpec) -> Result<SweepResult> {
    require_metric(spec, Metric::Throughput)?;
    run_sweep(spec)
}

/// BLER of the primary user with secondary users on its idle subcarriers.
pub fn run_multiuser_bler_sweep(spec: &ExperimentSpec) -> Result<SweepResult> {
    if spec.multiuser.is_none() {
        return Err(invalid("multi-user sweep needs a scenario"));
    }
    run_bler_sweep(spec)
}

/// Least-squares slope of `-log10(estimate)` against `snr_db / 10` over the
/// points whose SNR lies in `window_db` (inclusive).
pub fn estimate_diversity_order(result: &SweepResult, window_db: (f64, f64)) -> Result<f64> {
    let pts: Vec<(f64, f64)> = result
        .points
        .iter()
        .filter(|p| p.snr_db >= window_db.0 && p.snr_db <= window_db.1)
        .map(|p| (p.snr_db, p.estimate))
        .collect();
    diversity_slope(&pts)
}

/// Same fit over raw `(snr_db, value)` pairs.
pub fn diversity_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(invalid("need at least two points inside the window"));
    }
    if points.iter().any(|&(_, v)| !(v > 0.0)) {
        return Err(invalid("non-positive estimate inside the window"));
    }
    let xs: Vec<f64> = points.iter().map(|&(s, _)| s / 10.0).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, v)| -v.log10()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// SNR (dB) at which a decreasing curve crosses `level`, by linear
/// interpolation of `log10(value)` between the bracketing points.
pub fn snr_at_level(points: &[(f64, f64)], level: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let ((s0, v0), (s1, v1)) = (w[0], w[1]);
        if v0 >= level && v1 <= level && v0 > 0.0 && v1 > 0.0 {
            let (l0, l1, lt) = (v0.log10(), v1.log10(), level.log10());
            if l0 == l1 {
                Some(s0)
            } else {
                Some(s0 + (s1 - s0) * (l0 - lt) / (l0 - l1))
            }
        } else {
            None
        }
    })
}

impl SweepResult {
    /// `(snr_db, estimate)` pairs.
    pub fn series(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.snr_db, p.estimate)).collect()
    }
}
