use proptest::prelude::*;
use strata_core::fuzz::{self, FuzzCaps};
use strata_core::stratum::{defining_sequence, depth_of_index, index_of_depth, DepthMode, FiltDepth};
use strata_core::translate::{roundtrip_check, secherre_to_yu, yu_to_secherre, Skeleton};
use strata_core::{Rational, TameElement};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn both_round_trips_are_identities(seed in any::<u64>(), count in 1usize..11) {
        let st = fuzz::strata_corpus(seed, count, &FuzzCaps::default()).unwrap().pop().unwrap();
        let there = roundtrip_check(Skeleton::Secherre(&st)).unwrap();
        prop_assert!(there.equal(), "{:?}", there.failures());
        let yu = secherre_to_yu(&st).unwrap();
        let back = roundtrip_check(Skeleton::Yu(&yu)).unwrap();
        prop_assert!(back.equal(), "{:?}", back.failures());
        let reports = yu.validate().unwrap();
        prop_assert!(reports.iter().all(|g| g.verdict && g.minimal));
    }

    #[test]
    fn integer_jumps_match_datum_depths(seed in any::<u64>()) {
        let st = fuzz::strata_corpus(seed, 1, &FuzzCaps::default()).unwrap().remove(0);
        let yu = secherre_to_yu(&st).unwrap();
        let seq = defining_sequence(&st).unwrap();
        let e_a = st.order.e_a;
        for i in 1..seq.len() {
            let depth = depth_of_index(seq[i].r, e_a, DepthMode::Plain);
            prop_assert_eq!(depth.value, yu.depths[i - 1]);
            prop_assert_eq!(index_of_depth(FiltDepth::at(yu.depths[i - 1]), e_a, DepthMode::Plain).unwrap(), seq[i].r);
        }
        let s = yu.s.unwrap();
        prop_assert_eq!(Rational::from(st.n), yu.depths[s] * Rational::from(e_a as i64));
        let back = yu_to_secherre(&yu).unwrap();
        prop_assert_eq!(back.n, st.n);
    }

    #[test]
    fn realizer_genericity_survives_units(seed in any::<u64>(), w in 1i64..4, j in 0i64..30) {
        let st = fuzz::strata_corpus(seed, 1, &FuzzCaps::default()).unwrap().remove(0);
        let yu = secherre_to_yu(&st).unwrap();
        for i in 0..yu.realizers.len() {
            let e = &yu.fields[i];
            let c = yu.realizers[i].coerce(&yu.ambient).unwrap();
            let k = yu.ambient.residue();
            let step = e.uniformizer().unwrap().pow(w).unwrap().scale(k.pow(e.residue_generator(), j));
            let u = TameElement::one(&yu.ambient, c.prec()).add(&step).unwrap();
            let mut moved = yu.clone();
            moved.realizers[i] = c.mul(&u).unwrap();
            prop_assert!(moved.validate().is_ok());
        }
    }
}
