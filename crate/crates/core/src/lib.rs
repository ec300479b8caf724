//! Enhanced OFDM with subcarrier number modulation (OFDM-SNM).
//!
//! The number of active subcarriers in a block carries the heading bits,
//! and PSK symbols on the active subcarriers carry the rest. The enhanced
//! scheme places the active subcarriers on the strongest instantaneous
//! channel gains, which buys a coding gain over the original scheme that
//! ignores CSI.
//!
//! The crate is split into:
//!
//! - [`modulation`]: bit words, subcarrier activation patterns, PSK mapping,
//!   CSI-based assignment and the codebook.
//! - [`channel`]: Rayleigh channel draws, AWGN transmission and per-subcarrier
//!   SNR, plus reproducible counter-based RNG streams.
//! - [`detector`]: exhaustive ML block detection and secondary-user
//!   interference.
//! - [`analytics`]: closed-form outage, union-bound BLER and rate comparisons.
//! - [`sim`]: Monte Carlo sweeps with confidence intervals.

pub mod analytics;
pub mod channel;
pub mod detector;
mod error;
pub mod modulation;
pub mod sim;

pub use error::{Error, Result};

pub use channel::{ChannelRealization, ReceivedBlock, RngStream};
pub use detector::{DetectionResult, MultiUserScenario, Protocol};
pub use modulation::{BitWord, Codebook, CodebookEntry, OfdmBlock, Sap, Scheme, SystemConfig};

/// Converts a value in decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to decibels.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
