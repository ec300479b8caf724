//! Outage probability of the enhanced scheme.
//!
//! A block is in outage when any active subcarrier's received SNR falls
//! below `xi`. With `T < N` the active set is the top-`T` gains, so the
//! event is governed by the `(N - T + 1)`-th smallest gain; with `T = N`
//! every subcarrier counts.

use super::special::{binomial, hyp2f1_terminating};
use crate::modulation::SystemConfig;
use crate::{Error, Result};

/// Exact and asymptotic average outage at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutagePoint {
    pub snr_db: f64,
    pub exact: f64,
    pub asymptotic: f64,
}

/// CDF of an exponential power gain with mean `mu`, `1 - exp(-nu/mu)`.
pub fn rayleigh_cdf(nu: f64, mu: f64) -> Result<f64> {
    if !(nu >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "nu",
            requirement: "non-negative",
            value: nu,
        });
    }
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter {
            name: "mu",
            requirement: "strictly positive",
            value: mu,
        });
    }
    Ok(-(-nu / mu).exp_m1())
}

fn check_t(t: usize, n: usize) -> Result<()> {
    if (1..=n).contains(&t) {
        Ok(())
    } else {
        Err(Error::ActiveCountOutOfRange { t, max: n })
    }
}

/// Per-subcarrier gain below which an active subcarrier is in outage when
/// `t` subcarriers share the power.
fn gain_threshold(t: usize, config: &SystemConfig) -> f64 {
    t as f64 * config.noise_power * config.outage_threshold / config.transmit_power
}

/// Outage probability given `t` active subcarriers.
pub fn outage_given_t(t: usize, config: &SystemConfig) -> Result<f64> {
    config.validate()?;
    let n = config.n_subcarriers;
    check_t(t, n)?;
    let f = rayleigh_cdf(gain_threshold(t, config), config.avg_channel_gain)?;
    if t == n {
        // 1 - (1 - F)^N without cancellation for small F
        return Ok(-(n as f64 * (-f).ln_1p()).exp_m1());
    }
    // at least N - t + 1 of the N gains fall below the threshold
    Ok((n - t + 1..=n)
        .map(|k| binomial(n, k) * f.powi(k as i32) * (1.0 - f).powi((n - k) as i32))
        .sum())
}

/// Average outage over equiprobable active counts `1..=N`.
pub fn average_outage(config: &SystemConfig) -> Result<f64> {
    let n = config.n_subcarriers;
    let mut sum = 0.0;
    for t in 1..=n {
        sum += outage_given_t(t, config)?;
    }
    Ok(sum / n as f64)
}

/// High-SNR expansion of [`outage_given_t`].
///
/// For `t < N` this is
/// `x^(N-t+1) C(N, N-t+1) 2F1(1, 1-t, N-t+2; -x)` with
/// `x = t N_0 xi / (P_t mu)`; for `t = N` it is `N^2 N_0 xi / (P_t mu)`.
pub fn asymptotic_outage_given_t(t: usize, config: &SystemConfig) -> Result<f64> {
    config.validate()?;
    let n = config.n_subcarriers;
    check_t(t, n)?;
    let x = gain_threshold(t, config) / config.avg_channel_gain;
    if t == n {
        return Ok(n as f64 * x);
    }
    let order = n - t + 1;
    Ok(x.powi(order as i32)
        * binomial(n, order)
        * hyp2f1_terminating(1.0, t - 1, (order + 1) as f64, -x))
}

/// Average of [`asymptotic_outage_given_t`] over `t = 1..=N`.
pub fn average_asymptotic_outage(config: &SystemConfig) -> Result<f64> {
    let n = config.n_subcarriers;
    let mut sum = 0.0;
    for t in 1..=n {
        sum += asymptotic_outage_given_t(t, config)?;
    }
    Ok(sum / n as f64)
}

/// Exact and asymptotic average outage with `P_t / N_0` set to `snr_db`.
pub fn outage_point(config: &SystemConfig, snr_db: f64) -> Result<OutagePoint> {
    let c = config.with_snr_db(snr_db);
    Ok(OutagePoint {
        snr_db,
        exact: average_outage(&c)?,
        asymptotic: average_asymptotic_outage(&c)?,
    })
}
