//! Bit stream to OFDM block mapping.
//!
//! A block starts with a fixed-length heading of `log2(N)` bits whose
//! unsigned value plus one is the number of active subcarriers `T`. The
//! heading is followed by `T * log2(M)` payload bits, consumed by the active
//! subcarriers in ascending subcarrier index, most significant bits first.
//!
//! Which subcarriers are active for a given `T` depends on the [`Scheme`]:
//! the enhanced scheme takes the `T` largest instantaneous channel gains,
//! the original scheme always takes subcarriers `1..=T`, and the halved
//! scheme first keeps the best `N/2` subcarriers and then runs the enhanced
//! scheme over those.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::channel::ChannelRealization;
use crate::{Error, Result};

/// Largest number of subcarriers in one group. ML detection enumerates
/// `M(M^N - 1)/(M - 1)` candidates, so groups are kept small.
pub const MAX_SUBCARRIERS: usize = 16;

/// Static parameters of one operating point. All powers are linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Number of subcarriers `N` in the group.
    pub n_subcarriers: usize,
    /// PSK order `M`.
    pub psk_order: usize,
    /// Total transmit power `P_t`, split evenly over the active subcarriers.
    pub transmit_power: f64,
    /// Noise power `N_0` per subcarrier. Zero gives a noiseless channel.
    pub noise_power: f64,
    /// Outage threshold `xi` on the per-subcarrier received SNR.
    pub outage_threshold: f64,
    /// Average channel power gain `mu`.
    pub avg_channel_gain: f64,
}

impl SystemConfig {
    /// Creates a configuration with unit powers, threshold and channel gain.
    pub fn new(n_subcarriers: usize, psk_order: usize) -> Result<Self> {
        let config = SystemConfig {
            n_subcarriers,
            psk_order,
            transmit_power: 1.0,
            noise_power: 1.0,
            outage_threshold: 1.0,
            avg_channel_gain: 1.0,
        };
        config.validate()?;
        Ok(config)
    }

    /// Sets `P_t` so that `P_t / N_0` equals `snr_db`.
    ///
    /// A noiseless configuration keeps its transmit power unchanged.
    pub fn with_snr_db(mut self, snr_db: f64) -> Self {
        if self.noise_power > 0.0 {
            self.transmit_power = self.noise_power * crate::db_to_linear(snr_db);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_subcarriers;
        if !(2..=MAX_SUBCARRIERS).contains(&n) || !n.is_power_of_two() {
            return Err(Error::InvalidSubcarrierCount(n));
        }
        let m = self.psk_order;
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::InvalidPskOrder(m));
        }
        // payload values must fit in a u64
        if n * m.ilog2() as usize > 63 {
            return Err(Error::InvalidPskOrder(m));
        }
        positive("transmit_power", self.transmit_power)?;
        positive("outage_threshold", self.outage_threshold)?;
        positive("avg_channel_gain", self.avg_channel_gain)?;
        if !(self.noise_power >= 0.0 && self.noise_power.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "noise_power",
                requirement: "finite and non-negative",
                value: self.noise_power,
            });
        }
        Ok(())
    }

    /// Ratio `P_t / N_0` (infinite for a noiseless configuration).
    pub fn snr(&self) -> f64 {
        self.transmit_power / self.noise_power
    }

    pub fn heading_len(&self) -> usize {
        self.n_subcarriers.ilog2() as usize
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.psk_order.ilog2() as usize
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            requirement: "finite and strictly positive",
            value,
        })
    }
}

/// An ordered bit sequence. The leftmost bit is the most significant one.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BitWord {
    bits: Vec<bool>,
}

impl BitWord {
    pub fn new(bits: Vec<bool>) -> Self {
        BitWord { bits }
    }

    /// The `len` low bits of `value`, most significant first.
    pub fn from_value(value: u64, len: usize) -> Self {
        assert!(len <= 64, "bit word longer than 64 bits");
        let bits = (0..len).rev().map(|i| (value >> i) & 1 == 1).collect();
        BitWord { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Unsigned value of the word. Words longer than 64 bits are rejected.
    pub fn value(&self) -> Result<u64> {
        if self.bits.len() > 64 {
            return Err(Error::BitLength {
                expected: 64,
                actual: self.bits.len(),
            });
        }
        Ok(self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as u64))
    }

    /// Splits the word after the first `at` bits.
    pub fn split_at(&self, at: usize) -> (BitWord, BitWord) {
        let (head, tail) = self.bits.split_at(at);
        (BitWord::new(head.to_vec()), BitWord::new(tail.to_vec()))
    }

    pub fn concat(&self, other: &BitWord) -> BitWord {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitWord { bits }
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidParameter {
                    name: "bit word",
                    requirement: "made of '0' and '1' only",
                    value: f64::NAN,
                }),
            })
            .collect::<Result<_>>()?;
        Ok(BitWord { bits })
    }
}

/// Subcarrier activation pattern: which of the `N` subcarriers carry a symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sap {
    active: Vec<bool>,
    t: usize,
}

impl Sap {
    /// Pattern over `n` subcarriers with the given zero-based indices active.
    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut active = vec![false; n];
        for &i in indices {
            if i >= n {
                return Err(Error::Dimension {
                    expected: n,
                    actual: i + 1,
                });
            }
            active[i] = true;
        }
        Sap::new(active)
    }

    pub fn new(active: Vec<bool>) -> Result<Self> {
        let t = active.iter().filter(|&&a| a).count();
        if t == 0 {
            return Err(Error::ActiveCountOutOfRange {
                t,
                max: active.len(),
            });
        }
        Ok(Sap { active, t })
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    /// Number of active subcarriers `T`.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n_subcarriers(&self) -> usize {
        self.active.len()
    }

    pub fn is_active(&self, n: usize) -> bool {
        self.active[n]
    }

    /// Zero-based indices of the active subcarriers in ascending order.
    pub fn indices(&self) -> Vec<usize> {
        self.active
            .iter()
            .enumerate()
            .filter_map(|(i, &a)| a.then_some(i))
            .collect()
    }
}

impl fmt::Display for Sap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, &a) in self.active.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(if a { "1" } else { "0" })?;
        }
        f.write_str("]")
    }
}

/// Frequency-domain OFDM block: unit-modulus symbols on the active
/// subcarriers and exact zeros elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmBlock {
    pub symbols: Vec<Complex64>,
    pub sap: Sap,
}

/// One legitimate (bits, block) pair of a codebook.
#[derive(Debug, Clone, PartialEq)]
pub struct CodebookEntry {
    /// One-based position `k` in canonical order.
    pub index: usize,
    pub heading: BitWord,
    pub subsequent: BitWord,
    pub block: OfdmBlock,
}

impl CodebookEntry {
    /// Number of active subcarriers `T(k)`.
    pub fn t(&self) -> usize {
        self.block.sap.t()
    }

    /// Total number of bits `p(k)` carried by the block.
    pub fn bit_len(&self) -> usize {
        self.heading.len() + self.subsequent.len()
    }
}

/// How active subcarriers are placed for a given count `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Top-`T` instantaneous channel gains.
    Enhanced,
    /// Subcarriers `1..=T` regardless of CSI.
    Original,
    /// Keep the `N/2` strongest subcarriers, then run [`Scheme::Enhanced`]
    /// over them.
    Halved,
}

impl Scheme {
    /// Number of subcarriers the SNM mapper works on.
    pub fn effective_subcarriers(self, n_subcarriers: usize) -> usize {
        match self {
            Scheme::Halved => n_subcarriers / 2,
            Scheme::Enhanced | Scheme::Original => n_subcarriers,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Enhanced => "enhanced",
            Scheme::Original => "original",
            Scheme::Halved => "halved",
        }
    }

    /// Checks that the scheme can run over `n_subcarriers`.
    pub fn check(self, n_subcarriers: usize) -> Result<()> {
        if self == Scheme::Halved && n_subcarriers < 4 {
            return Err(Error::InvalidSubcarrierCount(n_subcarriers));
        }
        Ok(())
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "enhanced" => Ok(Scheme::Enhanced),
            "original" => Ok(Scheme::Original),
            "halved" => Ok(Scheme::Halved),
            _ => Err(format!(
                "unknown scheme `{s}` (expected enhanced, original or halved)"
            )),
        }
    }
}

/// Heading length `p_H = floor(log2 N)`.
pub fn heading_length(n_subcarriers: usize) -> Result<usize> {
    if n_subcarriers < 2 {
        return Err(Error::InvalidSubcarrierCount(n_subcarriers));
    }
    Ok(n_subcarriers.ilog2() as usize)
}

/// Number of active subcarriers signalled by a heading: its value plus one.
pub fn active_count_from_heading(heading: &BitWord, n_subcarriers: usize) -> Result<usize> {
    let expected = heading_length(n_subcarriers)?;
    if heading.len() != expected {
        return Err(Error::BitLength {
            expected,
            actual: heading.len(),
        });
    }
    Ok(heading.value()? as usize + 1)
}

/// Inverse of [`active_count_from_heading`].
pub fn heading_from_active_count(t: usize, n_subcarriers: usize) -> Result<BitWord> {
    let len = heading_length(n_subcarriers)?;
    let max = 1usize << len;
    if t == 0 || t > max {
        return Err(Error::ActiveCountOutOfRange { t, max });
    }
    Ok(BitWord::from_value((t - 1) as u64, len))
}

/// Average transmission rate in bits per channel use,
/// `log2(N) + (N + 1)/2 * log2(M)`.
pub fn average_rate(n_subcarriers: usize, psk_order: usize) -> Result<f64> {
    if n_subcarriers < 2 || !n_subcarriers.is_power_of_two() {
        return Err(Error::InvalidSubcarrierCount(n_subcarriers));
    }
    if psk_order < 2 || !psk_order.is_power_of_two() {
        return Err(Error::InvalidPskOrder(psk_order));
    }
    let n = n_subcarriers as f64;
    Ok(n.log2() + (n + 1.0) / 2.0 * (psk_order as f64).log2())
}

/// The `M`-PSK alphabet indexed by natural binary label `v`:
/// `-exp(i 2 pi v / M)`, so that BPSK maps 0 to -1 and 1 to +1.
pub fn psk_constellation(psk_order: usize) -> Result<Vec<Complex64>> {
    if psk_order < 2 || !psk_order.is_power_of_two() {
        return Err(Error::InvalidPskOrder(psk_order));
    }
    let m = psk_order as f64;
    Ok((0..psk_order)
        .map(|v| {
            // exact values on the axes keep BPSK/QPSK symbols free of rounding
            if (4 * v) % psk_order == 0 {
                match (4 * v) / psk_order {
                    0 => Complex64::new(-1.0, 0.0),
                    1 => Complex64::new(0.0, -1.0),
                    2 => Complex64::new(1.0, 0.0),
                    _ => Complex64::new(0.0, 1.0),
                }
            } else {
                -Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * v as f64 / m)
            }
        })
        .collect())
}

/// Maps a `log2(M)`-bit word to its unit-modulus PSK symbol.
pub fn psk_symbol(word: &BitWord, psk_order: usize) -> Result<Complex64> {
    let alphabet = psk_constellation(psk_order)?;
    let expected = psk_order.ilog2() as usize;
    if word.len() != expected {
        return Err(Error::BitLength {
            expected,
            actual: word.len(),
        });
    }
    Ok(alphabet[word.value()? as usize])
}

/// Indices of the `t` largest gains, returned in ascending index order.
///
/// This is the subset maximizing the sum of gains. Equal gains prefer the
/// lower index.
pub fn assign_subcarriers(gains: &[f64], t: usize) -> Result<Vec<usize>> {
    let n = gains.len();
    if t == 0 || t > n {
        return Err(Error::ActiveCountOutOfRange { t, max: n });
    }
    let mut chosen = gain_ranking(gains);
    chosen.truncate(t);
    chosen.sort_unstable();
    Ok(chosen)
}

/// Subcarrier indices sorted by decreasing gain, ties toward lower index.
pub(crate) fn gain_ranking(gains: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..gains.len()).collect();
    order.sort_by(|&a, &b| gains[b].total_cmp(&gains[a]).then(a.cmp(&b)));
    order
}

/// The CSI-dependent set of legitimate blocks.
///
/// Entries are not stored; they are generated on demand from the per-`T`
/// activation patterns, so building a codebook per channel draw is cheap.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    scheme: Scheme,
    n_subcarriers: usize,
    psk_order: usize,
    heading_len: usize,
    bits_per_symbol: usize,
    /// Active indices for `t = 1, 2, ...` concatenated; pattern `t` starts
    /// at `t(t-1)/2`.
    patterns: Vec<usize>,
    /// `offsets[t-1]` is the zero-based position of the first entry with
    /// `t` active subcarriers; the last element is the codebook size.
    offsets: Vec<usize>,
    constellation: Vec<Complex64>,
    channel: ChannelRealization,
}

/// Builds the codebook for one channel realization.
///
/// Entries are in canonical order: ascending heading value, then ascending
/// payload value.
pub fn build_codebook(
    channel: &ChannelRealization,
    config: &SystemConfig,
    scheme: Scheme,
) -> Result<Codebook> {
    config.validate()?;
    let n = config.n_subcarriers;
    if channel.len() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: channel.len(),
        });
    }
    scheme.check(n)?;
    let gains = channel.gains();
    let n_eff = scheme.effective_subcarriers(n);

    let mut patterns = Vec::with_capacity(n_eff * (n_eff + 1) / 2);
    match scheme {
        Scheme::Original => {
            for t in 1..=n_eff {
                patterns.extend(0..t);
            }
        }
        Scheme::Enhanced | Scheme::Halved => {
            // top-t of a single ranking; for the halved scheme the first N/2
            // ranks are exactly the pre-selected subcarriers
            let ranking = gain_ranking(gains);
            for t in 1..=n_eff {
                let start = patterns.len();
                patterns.extend_from_slice(&ranking[..t]);
                patterns[start..].sort_unstable();
            }
        }
    }

    let m = config.psk_order;
    let mut offsets = Vec::with_capacity(n_eff + 1);
    let mut total = 0usize;
    for t in 1..=n_eff {
        offsets.push(total);
        total += m.pow(t as u32);
    }
    offsets.push(total);

    Ok(Codebook {
        scheme,
        n_subcarriers: n,
        psk_order: m,
        heading_len: n_eff.ilog2() as usize,
        bits_per_symbol: config.bits_per_symbol(),
        patterns,
        offsets,
        constellation: psk_constellation(m)?,
        channel: channel.clone(),
    })
}

/// Number of legitimate blocks, `M(M^N - 1)/(M - 1)`.
pub fn codebook_size(n_subcarriers: usize, psk_order: usize) -> u64 {
    let m = psk_order as u64;
    m * (m.pow(n_subcarriers as u32) - 1) / (m - 1)
}

impl Codebook {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    pub fn psk_order(&self) -> usize {
        self.psk_order
    }

    pub fn heading_len(&self) -> usize {
        self.heading_len
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// Channel realization the codebook was built from.
    pub fn channel(&self) -> &ChannelRealization {
        &self.channel
    }

    /// Largest number of active subcarriers (`N`, or `N/2` when halved).
    pub fn max_active(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().expect("offsets are never empty")
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn constellation(&self) -> &[Complex64] {
        &self.constellation
    }

    /// Active subcarrier indices (ascending) used when `t` are active.
    pub fn pattern(&self, t: usize) -> &[usize] {
        assert!(
            (1..=self.max_active()).contains(&t),
            "active count {t} out of range"
        );
        let start = t * (t - 1) / 2;
        &self.patterns[start..start + t]
    }

    /// Zero-based position of the first entry with `t` active subcarriers.
    pub fn offset(&self, t: usize) -> usize {
        self.offsets[t - 1]
    }

    /// Splits a zero-based position into `(t, payload value)`.
    pub fn locate(&self, position: usize) -> (usize, u64) {
        assert!(position < self.len(), "position {position} out of range");
        let t = self.offsets.partition_point(|&o| o <= position);
        (t, (position - self.offsets[t - 1]) as u64)
    }

    /// PSK symbol carried by the `slot`-th active subcarrier (ascending
    /// index) of the block with `t` active subcarriers and payload `value`.
    #[inline]
    pub fn slot_symbol(&self, t: usize, value: u64, slot: usize) -> Complex64 {
        let shift = self.bits_per_symbol * (t - 1 - slot);
        let label = (value >> shift) as usize & (self.psk_order - 1);
        self.constellation[label]
    }

    /// Materializes the entry at a zero-based position.
    pub fn entry(&self, position: usize) -> CodebookEntry {
        let (t, value) = self.locate(position);
        let pattern = self.pattern(t);
        let mut symbols = vec![Complex64::new(0.0, 0.0); self.n_subcarriers];
        for (slot, &n) in pattern.iter().enumerate() {
            symbols[n] = self.slot_symbol(t, value, slot);
        }
        let sap = Sap::from_indices(self.n_subcarriers, pattern)
            .expect("codebook patterns are valid");
        CodebookEntry {
            index: position + 1,
            heading: BitWord::from_value((t - 1) as u64, self.heading_len),
            subsequent: BitWord::from_value(value, t * self.bits_per_symbol),
            block: OfdmBlock { symbols, sap },
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = CodebookEntry> + '_ {
        (0..self.len()).map(move |i| self.entry(i))
    }

    /// Zero-based position of the entry whose bits equal `bits`.
    pub fn position_of(&self, bits: &BitWord) -> Result<usize> {
        if bits.len() < self.heading_len {
            return Err(Error::BitLength {
                expected: self.heading_len,
                actual: bits.len(),
            });
        }
        let (heading, payload) = bits.split_at(self.heading_len);
        let t = heading.value()? as usize + 1;
        let expected = self.heading_len + t * self.bits_per_symbol;
        if bits.len() != expected {
            return Err(Error::BitLength {
                expected,
                actual: bits.len(),
            });
        }
        Ok(self.offset(t) + payload.value()? as usize)
    }
}

/// Looks up the codebook entry carrying exactly `bits`.
pub fn encode(bits: &BitWord, codebook: &Codebook) -> Result<CodebookEntry> {
    codebook.position_of(bits).map(|p| codebook.entry(p))
}

/// Bits carried by an entry: heading followed by payload.
pub fn decode(entry: &CodebookEntry) -> BitWord {
    entry.heading.concat(&entry.subsequent)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_channel() -> ChannelRealization {
        ChannelRealization::from_gains(&[1.6583, 0.3361, 3.1437, 0.8722]).unwrap()
    }

    fn bits(s: &str) -> BitWord {
        s.parse().unwrap()
    }

    #[test]
    fn heading_lengths() {
        assert_eq!(heading_length(4).unwrap(), 2);
        assert_eq!(heading_length(2).unwrap(), 1);
        assert_eq!(heading_length(8).unwrap(), 3);
        assert!(heading_length(1).is_err());
        assert!(heading_length(0).is_err());
    }

    #[test]
    fn active_count_round_trip() {
        assert_eq!(active_count_from_heading(&bits("00"), 4).unwrap(), 1);
        assert_eq!(active_count_from_heading(&bits("10"), 4).unwrap(), 3);
        assert_eq!(active_count_from_heading(&bits("11"), 4).unwrap(), 4);
        assert!(active_count_from_heading(&bits("1"), 4).is_err());
        for t in 1..=8 {
            let h = heading_from_active_count(t, 8).unwrap();
            assert_eq!(active_count_from_heading(&h, 8).unwrap(), t);
        }
        assert!(heading_from_active_count(0, 4).is_err());
        assert!(heading_from_active_count(5, 4).is_err());
    }

    #[test]
    fn average_rates() {
        assert_eq!(average_rate(4, 2).unwrap(), 4.5);
        assert_eq!(average_rate(2, 2).unwrap(), 2.5);
        assert_eq!(average_rate(8, 2).unwrap(), 7.5);
        assert_eq!(average_rate(8, 4).unwrap(), 12.0);
        // mean of p(k) over the four equiprobable headings of Table II
        assert_eq!((3.0 + 4.0 + 5.0 + 6.0) / 4.0, average_rate(4, 2).unwrap());
        assert!(average_rate(6, 2).is_err());
        assert!(average_rate(4, 3).is_err());
    }

    #[test]
    fn bpsk_mapping() {
        assert_eq!(psk_symbol(&bits("0"), 2).unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(psk_symbol(&bits("1"), 2).unwrap(), Complex64::new(1.0, 0.0));
        assert!(psk_symbol(&bits("01"), 2).is_err());
    }

    #[test]
    fn psk_symbols_are_unit_modulus_and_distinct() {
        for m in [2, 4, 8, 16, 64] {
            let alphabet = psk_constellation(m).unwrap();
            for (i, a) in alphabet.iter().enumerate() {
                assert!((a.norm() - 1.0).abs() < 1e-15);
                for b in &alphabet[i + 1..] {
                    assert!((a - b).norm() > 1e-6);
                }
            }
        }
    }

    #[test]
    fn assignment_worked_example() {
        let g = [1.6583, 0.3361, 3.1437, 0.8722];
        assert_eq!(assign_subcarriers(&g, 1).unwrap(), vec![2]);
        assert_eq!(assign_subcarriers(&g, 2).unwrap(), vec![0, 2]);
        assert_eq!(assign_subcarriers(&g, 3).unwrap(), vec![0, 2, 3]);
        assert_eq!(assign_subcarriers(&g, 4).unwrap(), vec![0, 1, 2, 3]);
        assert!(assign_subcarriers(&g, 0).is_err());
        assert!(assign_subcarriers(&g, 5).is_err());
    }

    #[test]
    fn assignment_ties_prefer_lower_index() {
        let g = [1.0, 2.0, 2.0, 1.0];
        assert_eq!(assign_subcarriers(&g, 1).unwrap(), vec![1]);
        assert_eq!(assign_subcarriers(&g, 3).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn table_two_spot_checks() {
        let config = SystemConfig::new(4, 2).unwrap();
        let cb = build_codebook(&paper_channel(), &config, Scheme::Enhanced).unwrap();
        assert_eq!(cb.len(), 30);
        let k7 = encode(&bits("10000"), &cb).unwrap();
        assert_eq!(k7.index, 7);
        assert_eq!(k7.block.sap.to_string(), "[1,0,1,1]");
        let re: Vec<f64> = k7.block.symbols.iter().map(|s| s.re).collect();
        assert_eq!(re, vec![-1.0, 0.0, -1.0, -1.0]);
        assert_eq!(encode(&bits("000"), &cb).unwrap().index, 1);
        assert_eq!(decode(&cb.entry(14)).to_string(), "110000");
        assert_eq!(decode(&cb.entry(1)).to_string(), "001");
    }

    #[test]
    fn original_scheme_ignores_csi() {
        let config = SystemConfig::new(4, 2).unwrap();
        let cb = build_codebook(&paper_channel(), &config, Scheme::Original).unwrap();
        for t in 1..=4 {
            assert_eq!(cb.pattern(t), (0..t).collect::<Vec<_>>().as_slice());
        }
    }

    #[test]
    fn halved_scheme_uses_best_half() {
        let config = SystemConfig::new(4, 2).unwrap();
        let cb = build_codebook(&paper_channel(), &config, Scheme::Halved).unwrap();
        assert_eq!(cb.len(), 6);
        assert_eq!(cb.heading_len(), 1);
        assert_eq!(cb.pattern(1), &[2]);
        assert_eq!(cb.pattern(2), &[0, 2]);
        let e = cb.entry(5);
        assert_eq!(decode(&e).to_string(), "111");
        assert_eq!(e.block.symbols[1], Complex64::new(0.0, 0.0));

        let two = SystemConfig::new(2, 2).unwrap();
        let ch = ChannelRealization::from_gains(&[1.0, 2.0]).unwrap();
        assert!(build_codebook(&ch, &two, Scheme::Halved).is_err());
    }

    #[test]
    fn small_cardinalities() {
        let config = SystemConfig::new(2, 2).unwrap();
        let ch = ChannelRealization::from_gains(&[0.5, 2.0]).unwrap();
        let cb = build_codebook(&ch, &config, Scheme::Enhanced).unwrap();
        assert_eq!(cb.len(), 6);
        assert_eq!(codebook_size(2, 2), 6);
        assert_eq!(codebook_size(4, 2), 30);
        assert_eq!(codebook_size(8, 2), 510);
        assert_eq!(codebook_size(4, 4), 340);
    }

    #[test]
    fn encode_rejects_bad_lengths() {
        let config = SystemConfig::new(4, 2).unwrap();
        let cb = build_codebook(&paper_channel(), &config, Scheme::Enhanced).unwrap();
        assert_eq!(
            encode(&bits("1000"), &cb).unwrap_err(),
            Error::BitLength {
                expected: 5,
                actual: 4
            }
        );
        assert!(encode(&bits("1"), &cb).is_err());
        assert!(encode(&bits("0011"), &cb).is_err());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let config = SystemConfig::new(8, 2).unwrap();
        assert!(build_codebook(&paper_channel(), &config, Scheme::Enhanced).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SystemConfig::new(4, 2).is_ok());
        assert!(SystemConfig::new(6, 2).is_err());
        assert!(SystemConfig::new(32, 2).is_err());
        assert!(SystemConfig::new(4, 1).is_err());
        assert!(SystemConfig::new(4, 6).is_err());
        let mut c = SystemConfig::new(4, 2).unwrap();
        c.transmit_power = 0.0;
        assert!(c.validate().is_err());
        c.transmit_power = 1.0;
        c.noise_power = 0.0;
        assert!(c.validate().is_ok());
        c.noise_power = -1.0;
        assert!(c.validate().is_err());
        let c = SystemConfig::new(4, 2).unwrap().with_snr_db(20.0);
        assert!((c.snr() - 100.0).abs() < 1e-9);
    }
}
