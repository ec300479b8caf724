//! Union-bound average block error rate.
//!
//! The conditional pairwise error probability is approximated by
//! `Q(x) ~ sum_i rho_i exp(-eta_i x^2)` with `x^2 = P_t/N_0 sum_n G(n) Delta(n)`
//! and then averaged over the channel: over the order statistics of the
//! gains when the transmitted block uses `T < N` assigned subcarriers, and
//! over i.i.d. gains when `T = N`.

use rayon::prelude::*;

use super::special::order_statistic_factor;
use crate::channel::ChannelRealization;
use crate::modulation::{build_codebook, CodebookEntry, Scheme, SystemConfig};
use crate::Result;

/// Weights `rho_i` of the exponential Q-function approximation.
pub const Q_APPROX_WEIGHTS: [f64; 2] = [1.0 / 12.0, 1.0 / 4.0];
/// Exponents `eta_i` of the exponential Q-function approximation.
pub const Q_APPROX_EXPONENTS: [f64; 2] = [1.0 / 2.0, 2.0 / 3.0];

/// Coordinate system of a [`PairDelta`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinates {
    /// Position `v` (zero-based) is the `(v+1)`-th smallest channel gain.
    Ordered,
    /// Position `n` is subcarrier `n`.
    Indexed,
}

/// Per-position squared distances `|x/sqrt(T) - x_hat/sqrt(T_hat)|^2`
/// between a transmitted and a candidate block.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDelta {
    pub deltas: Vec<f64>,
    pub coordinates: Coordinates,
}

/// Average BLER union bound at one operating point. May exceed one at low
/// SNR; it is not clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlerPoint {
    pub snr_db: f64,
    pub union_bound: f64,
}

/// Distances between `tx` and `rx` over `n` positions.
///
/// When `tx` activates fewer than `n` subcarriers both blocks are written
/// in order-statistic coordinates: the `T` active symbols of each block, in
/// ascending subcarrier order, occupy the top `T` positions. When `tx`
/// activates all subcarriers the blocks are compared index by index.
pub fn pair_deltas(tx: &CodebookEntry, rx: &CodebookEntry, n: usize) -> PairDelta {
    let tx_norm = 1.0 / (tx.t() as f64).sqrt();
    let rx_norm = 1.0 / (rx.t() as f64).sqrt();
    if tx.t() == n {
        let deltas = tx
            .block
            .symbols
            .iter()
            .zip(&rx.block.symbols)
            .map(|(x, y)| (x * tx_norm - y * rx_norm).norm_sqr())
            .collect();
        return PairDelta {
            deltas,
            coordinates: Coordinates::Indexed,
        };
    }
    let tx_top = top_positions(tx, n);
    let rx_top = top_positions(rx, n);
    let deltas = tx_top
        .iter()
        .zip(&rx_top)
        .map(|(x, y)| (x * tx_norm - y * rx_norm).norm_sqr())
        .collect();
    PairDelta {
        deltas,
        coordinates: Coordinates::Ordered,
    }
}

fn top_positions(entry: &CodebookEntry, n: usize) -> Vec<num_complex::Complex64> {
    let mut out = vec![num_complex::Complex64::new(0.0, 0.0); n];
    let active = entry.block.sap.indices();
    let start = n - active.len();
    for (slot, &sc) in active.iter().enumerate() {
        out[start + slot] = entry.block.symbols[sc];
    }
    out
}

/// Channel-averaged PEP when the transmitted block sits on the top-`T`
/// order statistics (`T < N`):
/// `sum_i rho_i prod_v N! Gamma(N-v+1+a_iv) / ((N-v)! Gamma(N+1+a_iv))`
/// with `a_iv = eta_i P_t mu Delta(v) / N_0`.
pub fn pep_ordered(delta: &PairDelta, config: &SystemConfig) -> f64 {
    let n = delta.deltas.len();
    let scale = config.transmit_power * config.avg_channel_gain / config.noise_power;
    Q_APPROX_WEIGHTS
        .iter()
        .zip(Q_APPROX_EXPONENTS)
        .map(|(rho, eta)| {
            rho * delta
                .deltas
                .iter()
                .enumerate()
                .filter(|(_, d)| **d > 0.0)
                .map(|(pos, d)| order_statistic_factor(n, pos + 1, eta * scale * d))
                .product::<f64>()
        })
        .sum()
}

/// Channel-averaged PEP over i.i.d. gains (`T = N`):
/// `sum_i rho_i prod_n (1 + eta_i P_t mu Delta(n) / N_0)^-1`.
pub fn pep_full(delta: &PairDelta, config: &SystemConfig) -> f64 {
    let scale = config.transmit_power * config.avg_channel_gain / config.noise_power;
    Q_APPROX_WEIGHTS
        .iter()
        .zip(Q_APPROX_EXPONENTS)
        .map(|(rho, eta)| {
            rho * delta
                .deltas
                .iter()
                .map(|d| 1.0 / (1.0 + eta * scale * d))
                .product::<f64>()
        })
        .sum()
}

/// Probability `1 / (N M^T)` that a given block with `t` actives is sent.
pub fn block_weight(t: usize, n: usize, m: usize) -> f64 {
    1.0 / (n as f64 * (m as f64).powi(t as i32))
}

/// Canonical grammar entries: a codebook whose actives always occupy the
/// highest indices, so index and order-statistic coordinates coincide.
fn canonical_entries(config: &SystemConfig) -> Result<Vec<CodebookEntry>> {
    let n = config.n_subcarriers;
    let gains: Vec<f64> = (1..=n).map(|g| g as f64).collect();
    let channel = ChannelRealization::from_gains(&gains)?;
    let codebook = build_codebook(&channel, config, Scheme::Enhanced)?;
    Ok(codebook.entries().collect())
}

/// Union bound on the average BLER,
/// `sum_x Omega(x) sum_{x_hat != x} PEP(x -> x_hat)`.
///
/// Runs over all `|X|^2` ordered pairs; per-block sums are reduced in a
/// fixed order so the result does not depend on the thread count.
pub fn average_bler(config: &SystemConfig) -> Result<BlerPoint> {
    config.validate()?;
    let n = config.n_subcarriers;
    let m = config.psk_order;
    let entries = canonical_entries(config)?;
    let per_block: Vec<f64> = entries
        .par_iter()
        .map(|tx| {
            let pep = if tx.t() < n { pep_ordered } else { pep_full };
            let sum: f64 = entries
                .iter()
                .filter(|rx| rx.index != tx.index)
                .map(|rx| pep(&pair_deltas(tx, rx, n), config))
                .sum();
            block_weight(tx.t(), n, m) * sum
        })
        .collect();
    Ok(BlerPoint {
        snr_db: crate::linear_to_db(config.snr()),
        union_bound: per_block.iter().sum(),
    })
}
