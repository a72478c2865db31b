use proptest::prelude::*;
use strata_core::fuzz::{self, FuzzCaps};
use strata_core::minimal::check_factorization;
use strata_core::stratum::{
    compare_presentations, defining_sequence, depth_of_index, index_of_depth, k0, presentation_secherre,
    presentation_yu, DepthMode, OrderSkeleton, StratumKind, StratumSkeleton,
};
use strata_core::translate::secherre_to_yu;
use strata_core::{base_field, Subfield, TameElement};

fn stratum(seed: u64) -> StratumSkeleton {
    fuzz::strata_corpus(seed, 1, &FuzzCaps::default()).unwrap().remove(0)
}

fn depth_zero() -> StratumSkeleton {
    let f = base_field(5).unwrap();
    let order = OrderSkeleton::attached(&Subfield::base(&f).unwrap(), 1).unwrap();
    StratumSkeleton::new(order, 0, &TameElement::constant(&f, 3, 64)).unwrap()
}

fn mode() -> impl Strategy<Value = DepthMode> {
    proptest::sample::select(DepthMode::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn depth_index_round_trip(n in -50i64..200, e_a in 1u32..13, m in mode()) {
        let d = depth_of_index(n, e_a, m);
        prop_assert_eq!(index_of_depth(d, e_a, m).unwrap(), n);
        prop_assert_eq!(d.lattice_exponent(e_a), m.exponent(n));
    }

    #[test]
    fn half_modes_match_whole_modes(n in -50i64..200) {
        let ceil_half = num_integer::Integer::div_ceil(&n, &2);
        let floor_half = num_integer::Integer::div_floor(&n, &2);
        prop_assert_eq!(DepthMode::HalfCeil.exponent(n), DepthMode::Plain.exponent(ceil_half));
        prop_assert_eq!(DepthMode::HalfPlusOne.exponent(n), DepthMode::Plus.exponent(floor_half));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn defining_sequences_are_sound(seed in any::<u64>()) {
        let st = stratum(seed);
        let seq = defining_sequence(&st).unwrap();
        for w in seq.windows(2) {
            prop_assert!(w[0].r < w[1].r);
        }
        for s in &seq {
            prop_assert_eq!(s.kind, StratumKind::Simple);
            prop_assert!(s.r < st.n);
            prop_assert!(check_factorization(&s.fac).unwrap().valid());
        }
    }

    #[test]
    fn k0_scales_with_the_order(seed in any::<u64>(), k in 1u32..4) {
        let st = stratum(seed);
        let e = st.order.pure_over.clone();
        let small = OrderSkeleton::attached(&e, st.order.n_dim()).unwrap();
        let big = OrderSkeleton::new(st.order.n_dim() * k, 1, e.e_abs() * k, e.clone(), k == 1).unwrap();
        let a = k0(&st.beta, &small).unwrap();
        let b = k0(&st.beta, &big).unwrap();
        prop_assert_eq!(b, a.map(|x| x * k as i64));
    }

    #[test]
    fn presentations_agree_on_fuzzed_strata(seed in any::<u64>()) {
        let st = stratum(seed);
        let yu = secherre_to_yu(&st).unwrap();
        let sp = presentation_secherre(&st).unwrap();
        let yp = presentation_yu(&yu).unwrap();
        for (a, b) in [(&sp.h1, &yp.k_plus), (&sp.j, &yp.k_circ), (&sp.jhat, &yp.k)] {
            let cmp = compare_presentations(a, b).unwrap();
            prop_assert!(cmp.equal, "{}", cmp.diffs.join("; "));
        }
    }
}

#[test]
fn depth_zero_stratum_is_simple() {
    let st = depth_zero();
    assert!(st.is_depth_zero());
    assert_eq!(st.kind, StratumKind::Simple);
    let seq = defining_sequence(&st).unwrap();
    assert_eq!(seq.len(), 1);
    let yu = secherre_to_yu(&st).unwrap();
    assert!(yu.depths.is_empty());
}

#[test]
fn mismatched_depth_kind_is_rejected() {
    let d = depth_of_index(3, 2, DepthMode::Plus);
    assert!(index_of_depth(d, 2, DepthMode::Plain).is_err());
}
