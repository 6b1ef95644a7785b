use proptest::prelude::*;
use rssp_core::cost::{list_exponents, list_exponents_recurrence, CostParams, GammaReading};
use rssp_core::em::{choose_targets, join_level, two_phase_join, Keyed};
use rssp_core::exact::{brute_force, meet_in_middle};
use rssp_core::rng::seeded_rng;
use rssp_core::{BinVector, RsspInstance};

fn keyed(n: usize) -> impl Strategy<Value = Keyed> {
    let mask = (1u64 << n) - 1;
    (any::<u64>(), any::<u64>()).prop_map(move |(k, b)| (k & mask, BinVector::from_bits(b & mask, n).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fused_join_matches_two_phase(
        left in prop::collection::vec(keyed(10), 0..40),
        right in prop::collection::vec(keyed(10), 0..40),
        bits in 0u32..4,
        residue in any::<u64>(),
    ) {
        let residue = residue & ((1 << bits) - 1);
        let mut a = join_level(&left, &right, bits, residue, 10).unwrap().merged;
        let mut b = two_phase_join(&left, &right, bits, residue, 10);
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn mitm_agrees_with_brute_force(n in (1usize..=6).prop_map(|k| 2 * k), seed in any::<u64>(), s in any::<u64>()) {
        let mask = (1u64 << n) - 1;
        let mut x = seed;
        let a: Vec<u64> = (0..n).map(|_| { x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (x >> 11) & mask }).collect();
        let inst = RsspInstance::new(a, s & mask).unwrap();
        let all = brute_force(&inst, false).unwrap();
        let m = meet_in_middle(&inst).unwrap();
        prop_assert_eq!(m, all.first().copied());
    }

    #[test]
    fn targets_are_consistent(s in any::<u64>(), l1 in 0usize..6, l2 in 0usize..6, l3 in 0usize..6, seed in any::<u64>()) {
        let n = 24;
        let t = choose_targets(s, n, &[l1, l2, l3], 4, &mut seeded_rng(seed)).unwrap();
        prop_assert!(t.check(s & ((1 << n) - 1)));
    }

    #[test]
    fn bitstrings_round_trip(bits in any::<u64>(), len in 1usize..=64) {
        let v = BinVector::from_bits(bits & (u64::MAX >> (64 - len)), len).unwrap();
        let back: BinVector = v.to_string().parse().unwrap();
        prop_assert_eq!(back, v);
    }

    #[test]
    fn closed_form_matches_recurrence(
        alpha in 0.02f64..0.3,
        beta in 0.5f64..=1.0,
        l in prop::collection::vec(0.0f64..0.3, 3),
    ) {
        let p = CostParams::quantum(alpha, beta, l);
        for reading in [GammaReading::Exponential, GammaReading::Literal] {
            let a = list_exponents(&p, reading).unwrap();
            let b = list_exponents_recurrence(&p, reading).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
