//! Transmission-rate comparisons with OFDM-IM and plain OFDM.

use super::special::binomial;
use crate::modulation::average_rate;
use crate::{Error, Result};

fn check_power_of_two(n: usize) -> Result<()> {
    if n >= 2 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::InvalidSubcarrierCount(n))
    }
}

fn check_im_t(n: usize, t: usize) -> Result<()> {
    if t >= 1 && t < n {
        Ok(())
    } else {
        Err(Error::ActiveCountOutOfRange {
            t,
            max: n.saturating_sub(1),
        })
    }
}

/// Exact `C(n, k)` for the small arguments used here.
fn binomial_u64(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    (0..k as u64).fold(1, |acc, i| acc * (n as u64 - i) / (i + 1))
}

/// OFDM-IM rate `floor(log2 C(n, t)) + t log2(m)` with `t` fixed actives.
pub fn rate_im(n: usize, t: usize, m: usize) -> Result<f64> {
    check_im_t(n, t)?;
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::InvalidPskOrder(m));
    }
    let index_bits = binomial_u64(n, t).ilog2() as f64;
    Ok(index_bits + t as f64 * (m as f64).log2())
}

/// Plain OFDM rate `n log2(m)`.
pub fn rate_ofdm(n: usize, m: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidSubcarrierCount(n));
    }
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::InvalidPskOrder(m));
    }
    Ok(n as f64 * (m as f64).log2())
}

/// Smallest power-of-two `M >= 2` satisfying the relaxed rate condition
/// `M >= (n / C(n, t))^(1 / (t - (n+1)/2))`, or `None` when
/// `t > (n+1)/2` makes the condition unsatisfiable.
///
/// The relaxation drops the floor in the OFDM-IM rate, so the answer can be
/// larger than the one given by [`min_psk_vs_im_exact`].
pub fn min_psk_vs_im(n: usize, t: usize) -> Result<Option<usize>> {
    check_power_of_two(n)?;
    check_im_t(n, t)?;
    if 2 * t > n + 1 {
        return Ok(None);
    }
    let exponent = 1.0 / (t as f64 - (n as f64 + 1.0) / 2.0);
    let bound = (n as f64 / binomial(n, t)).powf(exponent);
    let mut m = 2usize;
    // tolerate rounding when the bound lands exactly on a power of two
    while (m as f64) < bound * (1.0 - 1e-12) {
        m *= 2;
    }
    Ok(Some(m))
}

/// Smallest power-of-two `M` for which the exact floored rates satisfy
/// `average_rate(n, M) >= rate_im(n, t, M)`, searched up to `2^max_log2`.
pub fn min_psk_vs_im_exact(n: usize, t: usize, max_log2: u32) -> Result<Option<usize>> {
    check_power_of_two(n)?;
    check_im_t(n, t)?;
    for bits in 1..=max_log2 {
        let m = 1usize << bits;
        if average_rate(n, m)? >= rate_im(n, t, m)? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Upper bound `n^(2/(n-1))` on `M` for OFDM-SNM to match plain OFDM.
pub fn psk_vs_ofdm_bound(n: usize) -> Result<f64> {
    check_power_of_two(n)?;
    Ok((n as f64).powf(2.0 / (n as f64 - 1.0)))
}

/// All powers of two `M` with `2 <= M <= n^(2/(n-1))`.
pub fn psk_set_vs_ofdm(n: usize) -> Result<Vec<usize>> {
    check_power_of_two(n)?;
    // M = 2^a, n = 2^b: M <= n^(2/(n-1))  <=>  a (n - 1) <= 2 b
    let b = n.ilog2() as usize;
    Ok((1..)
        .take_while(|a| a * (n - 1) <= 2 * b)
        .map(|a| 1usize << a)
        .collect())
}
