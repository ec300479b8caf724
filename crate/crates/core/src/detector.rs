//! Maximum-likelihood block detection and secondary-user interference.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{amplitude, complex_gaussian, ChannelRealization, ReceivedBlock};
use crate::modulation::{Codebook, CodebookEntry, Sap, SystemConfig};
use crate::{Error, Result};

/// Outcome of an ML search.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    /// Decided codebook entry.
    pub entry: CodebookEntry,
    /// Euclidean distance between `y` and the decided noiseless block.
    pub metric: f64,
}

impl DetectionResult {
    pub fn is_block_error(&self, truth: &CodebookEntry) -> bool {
        self.entry.index != truth.index
    }
}

/// Exhaustive ML detection over every legitimate block of `codebook`.
///
/// Minimizes `|| y - sqrt(P_t/T) H x ||` over all entries. On equal metrics
/// the earlier entry in canonical order wins.
pub fn ml_detect(
    received: &ReceivedBlock,
    channel: &ChannelRealization,
    codebook: &Codebook,
    config: &SystemConfig,
) -> Result<DetectionResult> {
    let (position, metric_sq) = ml_search(received, channel, codebook, config)?;
    Ok(DetectionResult {
        entry: codebook.entry(position),
        metric: metric_sq.sqrt(),
    })
}

/// Allocation-light ML search returning the zero-based position of the
/// winner and its squared distance.
pub fn ml_search(
    received: &ReceivedBlock,
    channel: &ChannelRealization,
    codebook: &Codebook,
    config: &SystemConfig,
) -> Result<(usize, f64)> {
    let n = codebook.n_subcarriers();
    if received.samples.len() != n || channel.len() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: received.samples.len().min(channel.len()),
        });
    }
    if codebook.is_empty() {
        return Err(Error::EmptyCodebook);
    }
    let y = &received.samples;
    let h = channel.coefficients();
    let alphabet = codebook.constellation();
    let m = alphabet.len();
    let energy: f64 = y.iter().map(|s| s.norm_sqr()).sum();

    let t_max = codebook.max_active();
    let mut best = (0usize, f64::INFINITY);
    // dist[slot * m + label] = |y_n - a h_n c_label|^2 for the slot's subcarrier
    let mut dist = vec![0.0; t_max * m];
    // prefix[k] = base + dist of slots 0..k under the current labels
    let mut prefix = vec![0.0; t_max + 1];
    let mut labels = vec![0usize; t_max];
    for t in 1..=t_max {
        let pattern = codebook.pattern(t);
        let a = amplitude(config, t);
        let mut base = energy;
        for (slot, &sc) in pattern.iter().enumerate() {
            let hs = a * h[sc];
            base -= y[sc].norm_sqr();
            for (label, c) in alphabet.iter().enumerate() {
                dist[slot * m + label] = (y[sc] - hs * c).norm_sqr();
            }
        }

        // Visit payloads in ascending value: slot 0 is the most significant
        // symbol, the last slot varies fastest. Each metric is accumulated
        // slot by slot from `base`, reusing the shared prefix.
        let mut position = codebook.offset(t);
        labels[..t].fill(0);
        prefix[0] = base;
        for k in 0..t - 1 {
            prefix[k + 1] = prefix[k] + dist[k * m];
        }
        let last = &dist[(t - 1) * m..t * m];
        loop {
            let p = prefix[t - 1];
            for (label, d) in last.iter().enumerate() {
                let metric = p + d;
                if metric < best.1 {
                    best = (position + label, metric);
                }
            }
            position += m;
            let mut k = t - 1;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                labels[k] += 1;
                if labels[k] < m {
                    break;
                }
                labels[k] = 0;
            }
            if k == 0 && labels[0] == 0 {
                break;
            }
            for j in k..t - 1 {
                prefix[j + 1] = prefix[j] + dist[j * m + labels[j]];
            }
        }
    }
    // cancellation in `energy - |y|^2` can leave a tiny negative residue
    Ok((best.0, best.1.max(0.0)))
}

/// Secondary-user access rule for subcarriers left idle by the primary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Protocol {
    /// The least-interfering secondary always transmits.
    Unregulated,
    /// The least-interfering secondary transmits only if its interference
    /// power at the primary receiver is below `threshold`.
    Regulated { threshold: f64 },
}

/// Secondary users sharing the primary's idle subcarriers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiUserScenario {
    /// Number of secondary users `L`.
    pub n_secondary: usize,
    /// Transmit power `P_s` of every secondary user.
    pub secondary_power: f64,
    /// Mean gain `theta` of the secondary-to-primary interference channels.
    pub interference_gain: f64,
    /// Mean gain of the secondary users' own links. It does not affect the
    /// primary receiver.
    pub transmission_gain: f64,
    pub protocol: Protocol,
}

impl MultiUserScenario {
    /// One secondary user, `theta = 0.2`, unit transmission gain and
    /// `P_s = 100 N_0` (20 dB above the noise).
    pub fn with_defaults(noise_power: f64, protocol: Protocol) -> Self {
        MultiUserScenario {
            n_secondary: 1,
            secondary_power: 100.0 * noise_power,
            interference_gain: 0.2,
            transmission_gain: 1.0,
            protocol,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_secondary == 0 {
            return Err(Error::InvalidParameter {
                name: "n_secondary",
                requirement: "at least 1",
                value: 0.0,
            });
        }
        for (name, value) in [
            ("secondary_power", self.secondary_power),
            ("interference_gain", self.interference_gain),
            ("transmission_gain", self.transmission_gain),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    requirement: "finite and strictly positive",
                    value,
                });
            }
        }
        if let Protocol::Regulated { threshold } = self.protocol {
            // an infinite threshold is allowed and behaves as unregulated
            if !(threshold > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "threshold",
                    requirement: "strictly positive",
                    value: threshold,
                });
            }
        }
        Ok(())
    }
}

/// Adds secondary-user transmissions on the subcarriers idle under
/// `primary_sap`.
///
/// On every idle subcarrier the `L` interference channels are drawn and the
/// secondary with the weakest one is picked; it adds `sqrt(P_s) h_I s` with
/// a unit-modulus symbol of uniform phase, subject to the protocol. The same
/// random draws are consumed whether or not a secondary transmits, so a
/// given stream yields matched realizations across protocols.
pub fn add_secondary_interference<R: Rng + ?Sized>(
    received: &ReceivedBlock,
    primary_sap: &Sap,
    scenario: &MultiUserScenario,
    rng: &mut R,
) -> Result<ReceivedBlock> {
    let mut out = received.clone();
    add_secondary_interference_in_place(&mut out, primary_sap.active(), scenario, rng)?;
    Ok(out)
}

pub(crate) fn add_secondary_interference_in_place<R: Rng + ?Sized>(
    received: &mut ReceivedBlock,
    active: &[bool],
    scenario: &MultiUserScenario,
    rng: &mut R,
) -> Result<()> {
    scenario.validate()?;
    if received.samples.len() != active.len() {
        return Err(Error::Dimension {
            expected: active.len(),
            actual: received.samples.len(),
        });
    }
    let amp = scenario.secondary_power.sqrt();
    for (sample, &busy) in received.samples.iter_mut().zip(active) {
        if busy {
            continue;
        }
        let mut weakest = complex_gaussian(rng, scenario.interference_gain);
        for _ in 1..scenario.n_secondary {
            let h = complex_gaussian(rng, scenario.interference_gain);
            if h.norm_sqr() < weakest.norm_sqr() {
                weakest = h;
            }
        }
        let phase: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        let transmits = match scenario.protocol {
            Protocol::Unregulated => true,
            Protocol::Regulated { threshold } => {
                scenario.secondary_power * weakest.norm_sqr() < threshold
            }
        };
        if transmits {
            *sample += amp * weakest * Complex64::from_polar(1.0, phase);
        }
    }
    Ok(())
}
