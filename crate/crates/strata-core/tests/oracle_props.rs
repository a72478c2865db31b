use proptest::prelude::*;
use strata_core::fuzz::{self, FuzzCaps};
use strata_core::oracle::{chain_from_field, eval_psi_c, lattice_index, Frame, Mat};
use strata_core::{base_field, extend, Subfield, TameElement, TameField};

fn small(seed: u64) -> (rand_chacha::ChaCha8Rng, TameField, TameElement, TameElement) {
    let caps = FuzzCaps::default().with_max_degree(4);
    let mut r = fuzz::rng(seed);
    let top = fuzz::random_tower(&mut r, &caps).unwrap();
    let x = fuzz::random_element(&mut r, &top, &caps, false).unwrap();
    let y = fuzz::random_element(&mut r, &top, &caps, false).unwrap();
    (r, top, x, y)
}

fn same(a: &Mat, b: &Mat) -> bool {
    a.entries.iter().zip(&b.entries).all(|(x, y)| x.eq_to_prec(y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn regular_rep_is_a_ring_map(seed in any::<u64>()) {
        let (_, top, x, y) = small(seed);
        let chain = chain_from_field(&top).unwrap();
        let (rx, ry) = (chain.regular_rep(&x).unwrap(), chain.regular_rep(&y).unwrap());
        prop_assert!(same(&chain.regular_rep(&x.mul(&y).unwrap()).unwrap(), &rx.mul(&ry).unwrap()));
        prop_assert!(same(&chain.regular_rep(&x.add(&y).unwrap()).unwrap(), &rx.add(&ry).unwrap()));
    }

    #[test]
    fn direct_valuation_matches_field_valuation(seed in any::<u64>()) {
        let (_, top, x, y) = small(seed);
        let chain = chain_from_field(&top).unwrap();
        let base = Subfield::base(&top).unwrap();
        let e = base.with_generator(&x).unwrap();
        let va = chain.v_a_direct(&chain.regular_rep(&x).unwrap()).unwrap();
        prop_assert_eq!(va * e.e_abs() as i64, top.e_abs() as i64 * e.valuation_of(&x).unwrap());
        let vy = chain.v_a_direct(&chain.regular_rep(&y).unwrap()).unwrap();
        let vxy = chain.v_a_direct(&chain.regular_rep(&x.mul(&y).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(vxy, va + vy);
    }

    #[test]
    fn psi_is_additive_in_y(seed in any::<u64>()) {
        let (mut r, top, c, y1) = small(seed);
        let y2 = fuzz::random_element(&mut r, &top, &FuzzCaps::default(), false).unwrap();
        let chain = chain_from_field(&top).unwrap();
        let m = |x: &TameElement| chain.regular_rep(x).unwrap();
        let (mc, m1, m2) = (m(&c), m(&y1), m(&y2));
        let p = top.p();
        let a = eval_psi_c(&mc, &m1).unwrap();
        let b = eval_psi_c(&mc, &m2).unwrap();
        prop_assert_eq!(eval_psi_c(&mc, &m1.add(&m2).unwrap()).unwrap(), (a + b) % p);
    }
}

#[test]
fn chain_steps_have_the_expected_index() {
    let f3 = base_field(3).unwrap();
    let f5 = base_field(5).unwrap();
    for top in [extend(&f3, 2, 1, 3).unwrap(), extend(&f3, 1, 2, 1).unwrap(), extend(&f5, 1, 4, 2).unwrap()] {
        let chain = chain_from_field(&top).unwrap();
        let n = chain.n() as i64;
        let e = chain.period() as i64;
        let frame = Frame::for_valuations(-2, 8);
        let kf = chain.kf().clone();
        for i in -1..=e {
            let li = chain.lattice(i, frame).unwrap();
            let next = chain.lattice(i + 1, frame).unwrap();
            assert_eq!(lattice_index(&li, &next, &kf).unwrap(), n / e);
            assert!(!next.contains(&li, &kf).unwrap());
            assert_eq!(lattice_index(&li, &chain.lattice(i + e, frame).unwrap(), &kf).unwrap(), n);
            assert_eq!(lattice_index(&li, &li, &kf).unwrap(), 0);
        }
    }
}

#[test]
fn regular_rep_of_t_is_scalar() {
    let f = base_field(5).unwrap();
    let top = extend(&f, 1, 2, 2).unwrap();
    let chain = chain_from_field(&top).unwrap();
    let t = TameElement::t_power(&f, 1, 32).coerce(&top).unwrap();
    let m = chain.regular_rep(&t).unwrap();
    let mut want = Mat::zero(&f, chain.n(), 32);
    for i in 0..chain.n() {
        want.set(i, i, TameElement::t_power(&f, 1, 32));
    }
    assert!(same(&m, &want));
}

#[test]
fn unramified_quadratic_has_period_one() {
    let f = base_field(3).unwrap();
    let chain = chain_from_field(&extend(&f, 2, 1, 1).unwrap()).unwrap();
    assert_eq!(chain.period(), 1);
    let frame = Frame::for_valuations(0, 4);
    let kf = chain.kf().clone();
    assert_eq!(lattice_index(&chain.lattice(0, frame).unwrap(), &chain.lattice(1, frame).unwrap(), &kf).unwrap(), 2);
}

#[test]
fn psi_vanishes_on_zero() {
    let f = base_field(3).unwrap();
    let top = extend(&f, 1, 2, 1).unwrap();
    let chain = chain_from_field(&top).unwrap();
    let c = chain.regular_rep(&TameElement::pi_power(&top, -1, 32)).unwrap();
    assert_eq!(eval_psi_c(&c, &Mat::zero(&f, chain.n(), 32)).unwrap(), 0);
}
