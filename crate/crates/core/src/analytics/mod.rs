//! Closed-form performance evaluators.
//!
//! - [`outage`]: exact and high-SNR outage probability from order statistics.
//! - [`bler`]: union-bound block error rate with an exponential Q-function
//!   approximation.
//! - [`rates`]: transmission-rate comparisons against OFDM-IM and plain OFDM.
//! - [`special`]: the Gamma-ratio and terminating hypergeometric kernels.

pub mod bler;
pub mod outage;
pub mod rates;
pub mod special;

pub use bler::{average_bler, pair_deltas, pep_full, pep_ordered, BlerPoint, PairDelta};
pub use outage::{
    asymptotic_outage_given_t, average_asymptotic_outage, average_outage, outage_given_t,
    outage_point, rayleigh_cdf, OutagePoint,
};
pub use rates::{
    min_psk_vs_im, min_psk_vs_im_exact, psk_set_vs_ofdm, psk_vs_ofdm_bound, rate_im, rate_ofdm,
};
