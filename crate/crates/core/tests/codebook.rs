use num_complex::Complex64;
use ofdm_snm::modulation::{
    assign_subcarriers, build_codebook, codebook_size, decode, encode, heading_from_active_count,
};
use ofdm_snm::{BitWord, ChannelRealization, Scheme, SystemConfig};
use proptest::prelude::*;

const GAINS: [f64; 4] = [1.6583, 0.3361, 3.1437, 0.8722];

/// (k, p, heading, payload, SAP, signs). Row 30 is the all-ones payload and
/// therefore carries four positive symbols.
const TABLE: [(usize, usize, &str, &str, [u8; 4], [i8; 4]); 30] = [
    (1, 3, "00", "0", [0, 0, 1, 0], [0, 0, -1, 0]),
    (2, 3, "00", "1", [0, 0, 1, 0], [0, 0, 1, 0]),
    (3, 4, "01", "00", [1, 0, 1, 0], [-1, 0, -1, 0]),
    (4, 4, "01", "01", [1, 0, 1, 0], [-1, 0, 1, 0]),
    (5, 4, "01", "10", [1, 0, 1, 0], [1, 0, -1, 0]),
    (6, 4, "01", "11", [1, 0, 1, 0], [1, 0, 1, 0]),
    (7, 5, "10", "000", [1, 0, 1, 1], [-1, 0, -1, -1]),
    (8, 5, "10", "001", [1, 0, 1, 1], [-1, 0, -1, 1]),
    (9, 5, "10", "010", [1, 0, 1, 1], [-1, 0, 1, -1]),
    (10, 5, "10", "011", [1, 0, 1, 1], [-1, 0, 1, 1]),
    (11, 5, "10", "100", [1, 0, 1, 1], [1, 0, -1, -1]),
    (12, 5, "10", "101", [1, 0, 1, 1], [1, 0, -1, 1]),
    (13, 5, "10", "110", [1, 0, 1, 1], [1, 0, 1, -1]),
    (14, 5, "10", "111", [1, 0, 1, 1], [1, 0, 1, 1]),
    (15, 6, "11", "0000", [1, 1, 1, 1], [-1, -1, -1, -1]),
    (16, 6, "11", "0001", [1, 1, 1, 1], [-1, -1, -1, 1]),
    (17, 6, "11", "0010", [1, 1, 1, 1], [-1, -1, 1, -1]),
    (18, 6, "11", "0011", [1, 1, 1, 1], [-1, -1, 1, 1]),
    (19, 6, "11", "0100", [1, 1, 1, 1], [-1, 1, -1, -1]),
    (20, 6, "11", "0101", [1, 1, 1, 1], [-1, 1, -1, 1]),
    (21, 6, "11", "0110", [1, 1, 1, 1], [-1, 1, 1, -1]),
    (22, 6, "11", "0111", [1, 1, 1, 1], [-1, 1, 1, 1]),
    (23, 6, "11", "1000", [1, 1, 1, 1], [1, -1, -1, -1]),
    (24, 6, "11", "1001", [1, 1, 1, 1], [1, -1, -1, 1]),
    (25, 6, "11", "1010", [1, 1, 1, 1], [1, -1, 1, -1]),
    (26, 6, "11", "1011", [1, 1, 1, 1], [1, -1, 1, 1]),
    (27, 6, "11", "1100", [1, 1, 1, 1], [1, 1, -1, -1]),
    (28, 6, "11", "1101", [1, 1, 1, 1], [1, 1, -1, 1]),
    (29, 6, "11", "1110", [1, 1, 1, 1], [1, 1, 1, -1]),
    (30, 6, "11", "1111", [1, 1, 1, 1], [1, 1, 1, 1]),
];

#[test]
fn mapping_table_for_example_gains() {
    let config = SystemConfig::new(4, 2).unwrap();
    let channel = ChannelRealization::from_gains(&GAINS).unwrap();
    let cb = build_codebook(&channel, &config, Scheme::Enhanced).unwrap();
    let entries: Vec<_> = cb.entries().collect();
    assert_eq!(entries.len(), TABLE.len());
    for (e, row) in entries.iter().zip(TABLE) {
        let (k, p, heading, payload, sap, signs) = row;
        assert_eq!(e.index, k);
        assert_eq!(e.bit_len(), p, "k={k}");
        assert_eq!(e.heading.to_string(), heading, "k={k}");
        assert_eq!(e.subsequent.to_string(), payload, "k={k}");
        let active: Vec<u8> = e.block.sap.active().iter().map(|&a| a as u8).collect();
        assert_eq!(active, sap, "k={k}");
        let expected: Vec<Complex64> = signs.iter().map(|&s| Complex64::new(s as f64, 0.0)).collect();
        assert_eq!(e.block.symbols, expected, "k={k}");
    }
}

#[test]
fn cardinality_formula_matches_enumeration() {
    for (n, m, expected) in [(4, 2, 30), (8, 2, 510), (4, 4, 340), (2, 2, 6), (16, 2, 131070)] {
        assert_eq!(codebook_size(n, m), expected);
        let config = SystemConfig::new(n, m).unwrap();
        let gains: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let ch = ChannelRealization::from_gains(&gains).unwrap();
        let cb = build_codebook(&ch, &config, Scheme::Enhanced).unwrap();
        assert_eq!(cb.len() as u64, expected);
        if n <= 8 {
            assert_eq!(cb.entries().count() as u64, expected);
        }
    }
}

#[test]
fn full_activation_rows_ignore_scheme() {
    let config = SystemConfig::new(4, 4).unwrap();
    let ch = ChannelRealization::from_gains(&GAINS).unwrap();
    let enhanced = build_codebook(&ch, &config, Scheme::Enhanced).unwrap();
    let original = build_codebook(&ch, &config, Scheme::Original).unwrap();
    let start = enhanced.offset(4);
    for pos in start..enhanced.len() {
        assert_eq!(enhanced.entry(pos), original.entry(pos));
    }
}

#[test]
fn original_scheme_uses_leading_subcarriers() {
    let config = SystemConfig::new(8, 2).unwrap();
    let ch = ChannelRealization::from_gains(&[0.1, 5.0, 0.2, 4.0, 0.3, 3.0, 0.4, 2.0]).unwrap();
    let cb = build_codebook(&ch, &config, Scheme::Original).unwrap();
    for t in 1..=8 {
        assert_eq!(cb.pattern(t), (0..t).collect::<Vec<_>>().as_slice());
    }
}

fn brute_force_best(gains: &[f64], t: usize) -> Vec<usize> {
    // largest gain sum over all t-subsets; the first mask reaching it wins
    let n = gains.len();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != t {
            continue;
        }
        let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let sum: f64 = set.iter().map(|&i| gains[i]).sum();
        match &best {
            Some((s, _)) if sum <= *s => {}
            _ => best = Some((sum, set)),
        }
    }
    best.unwrap().1
}

fn gain_vec(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::sample::select(vec![2usize, 4, 8, 16])
        .prop_filter("size", move |n| *n <= max_n)
        .prop_flat_map(|n| prop::collection::vec(0.001f64..20.0, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn assignment_matches_subset_search(gains in gain_vec(8), pick in 0usize..16) {
        let t = pick % gains.len() + 1;
        prop_assert_eq!(assign_subcarriers(&gains, t).unwrap(), brute_force_best(&gains, t));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn active_sets_are_nested(gains in gain_vec(16)) {
        let n = gains.len();
        for t in 1..n {
            let small = assign_subcarriers(&gains, t).unwrap();
            let big = assign_subcarriers(&gains, t + 1).unwrap();
            prop_assert!(small.iter().all(|i| big.contains(i)));
            let min_in: f64 = small.iter().map(|&i| gains[i]).fold(f64::INFINITY, f64::min);
            let max_out: f64 = (0..n).filter(|i| !small.contains(i)).map(|i| gains[i]).fold(0.0, f64::max);
            prop_assert!(min_in >= max_out);
        }
    }

    #[test]
    fn encode_decode_round_trip(
        gains in gain_vec(8),
        log2m in 1usize..=3,
        scheme_pick in 0usize..3,
        seed_bits in any::<u64>(),
        t_pick in any::<usize>(),
    ) {
        let n = gains.len();
        let m = 1 << log2m;
        let scheme = [Scheme::Enhanced, Scheme::Original, Scheme::Halved][scheme_pick];
        prop_assume!(scheme != Scheme::Halved || n >= 4);
        let config = SystemConfig::new(n, m).unwrap();
        let ch = ChannelRealization::from_gains(&gains).unwrap();
        let cb = build_codebook(&ch, &config, scheme).unwrap();
        let n_eff = scheme.effective_subcarriers(n);
        let t = t_pick % n_eff + 1;
        let heading = heading_from_active_count(t, n_eff).unwrap();
        let payload_len = t * log2m;
        let payload = BitWord::from_value(seed_bits & ((1u64 << payload_len) - 1), payload_len);
        let bits = heading.concat(&payload);
        let entry = encode(&bits, &cb).unwrap();
        prop_assert_eq!(decode(&entry), bits);
        prop_assert_eq!(entry.t(), t);
        prop_assert_eq!(entry.block.sap.t(), t);
        // active symbols have unit modulus, idle ones are zero
        for (i, s) in entry.block.symbols.iter().enumerate() {
            if entry.block.sap.is_active(i) {
                prop_assert!((s.norm() - 1.0).abs() < 1e-12);
            } else {
                prop_assert_eq!(*s, Complex64::new(0.0, 0.0));
            }
        }
    }
}
