//! Rayleigh parallel channels, AWGN transmission and per-subcarrier SNR.
//!
//! Complex Gaussian quantities (fading coefficients and noise) use variance
//! `sigma^2 / 2` per real dimension, so `E|h|^2 = mu` and `E|w|^2 = N_0`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::modulation::{OfdmBlock, Sap, SystemConfig};
use crate::{Error, Result};

/// One draw of the `N` subcarrier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    coefficients: Vec<Complex64>,
    gains: Vec<f64>,
}

impl ChannelRealization {
    pub fn from_coefficients(coefficients: Vec<Complex64>) -> Self {
        let gains = coefficients.iter().map(|h| h.norm_sqr()).collect();
        ChannelRealization {
            coefficients,
            gains,
        }
    }

    /// Real, non-negative coefficients `sqrt(g)` reproducing the given gains.
    pub fn from_gains(gains: &[f64]) -> Result<Self> {
        if let Some(&bad) = gains.iter().find(|g| !(**g >= 0.0 && g.is_finite())) {
            return Err(Error::InvalidParameter {
                name: "gain",
                requirement: "finite and non-negative",
                value: bad,
            });
        }
        Ok(ChannelRealization {
            coefficients: gains.iter().map(|g| Complex64::new(g.sqrt(), 0.0)).collect(),
            gains: gains.to_vec(),
        })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Channel power gains `|h(n)|^2`.
    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

/// Received frequency-domain samples `y(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedBlock {
    pub samples: Vec<Complex64>,
}

/// Identifies one reproducible random sequence.
///
/// The pair selects a ChaCha8 key (from `master_seed`) and stream
/// (`stream_index`), so distinct pairs give independent sequences and the
/// same pair always gives the same one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

/// Bits of the stream index reserved for the trial counter.
const TRIAL_BITS: u32 = 40;

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        RngStream {
            master_seed,
            stream_index,
        }
    }

    /// Stream of trial `trial` at sweep point `point`.
    ///
    /// # Panics
    ///
    /// Panics if `trial >= 2^40` or `point >= 2^24`.
    pub fn for_trial(master_seed: u64, point: u64, trial: u64) -> Self {
        assert!(trial < 1 << TRIAL_BITS, "trial index {trial} too large");
        assert!(point < 1 << (64 - TRIAL_BITS), "point index {point} too large");
        RngStream::new(master_seed, (point << TRIAL_BITS) | trial)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Draws a circularly symmetric complex Gaussian sample with `E|z|^2 = power`.
#[inline]
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, power: f64) -> Complex64 {
    let sigma = (power / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sigma * re, sigma * im)
}

/// Draws `n` i.i.d. Rayleigh coefficients with mean power gain `mu`.
pub fn sample_channel<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    mu: f64,
) -> Result<ChannelRealization> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "mu",
            requirement: "finite and strictly positive",
            value: mu,
        });
    }
    let coefficients = (0..n).map(|_| complex_gaussian(rng, mu)).collect();
    Ok(ChannelRealization::from_coefficients(coefficients))
}

/// Per-subcarrier amplitude `sqrt(P_t / T)` for a block with `t` actives.
#[inline]
pub fn amplitude(config: &SystemConfig, t: usize) -> f64 {
    (config.transmit_power / t as f64).sqrt()
}

/// Sends a block over the channel: `y = sqrt(P_t/T) H x + w`.
pub fn transmit<R: Rng + ?Sized>(
    block: &OfdmBlock,
    channel: &ChannelRealization,
    config: &SystemConfig,
    rng: &mut R,
) -> Result<ReceivedBlock> {
    check_len(config.n_subcarriers, block.symbols.len())?;
    check_len(config.n_subcarriers, channel.len())?;
    let scale = amplitude(config, block.sap.t());
    let samples = block
        .symbols
        .iter()
        .zip(channel.coefficients())
        .map(|(x, h)| scale * h * x + noise(rng, config.noise_power))
        .collect();
    Ok(ReceivedBlock { samples })
}

#[inline]
pub(crate) fn noise<R: Rng + ?Sized>(rng: &mut R, noise_power: f64) -> Complex64 {
    if noise_power > 0.0 {
        complex_gaussian(rng, noise_power)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Received SNR per subcarrier, `P_t |h(n)|^2 / (T N_0)` when active and
/// zero otherwise.
pub fn subcarrier_snr(
    channel: &ChannelRealization,
    sap: &Sap,
    config: &SystemConfig,
) -> Result<Vec<f64>> {
    check_len(config.n_subcarriers, channel.len())?;
    check_len(config.n_subcarriers, sap.n_subcarriers())?;
    let t = sap.t() as f64;
    Ok(channel
        .gains()
        .iter()
        .zip(sap.active())
        .map(|(&g, &a)| {
            if a {
                config.transmit_power * g / (t * config.noise_power)
            } else {
                0.0
            }
        })
        .collect())
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Dimension { expected, actual })
    }
}
