use proptest::prelude::*;
use rand::Rng;
use strata_core::fuzz::{self, FuzzCaps};
use strata_core::minimal::{check_factorization, howe_factorize, is_generic, minimality_report};
use strata_core::{Rational, Subfield, TameElement, TameField};

fn setup(seed: u64) -> (rand_chacha::ChaCha8Rng, TameField, Subfield, TameElement) {
    let caps = FuzzCaps::default();
    let mut r = fuzz::rng(seed);
    let top = fuzz::random_tower(&mut r, &caps).unwrap();
    let chain = top.chain();
    let node = &chain[r.gen_range(0..chain.len() - 1)];
    let base = Subfield::of_node(node, &top).unwrap();
    let c = fuzz::random_element(&mut r, &top, &caps, true).unwrap();
    (r, top, base, c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn criteria_agree(seed in any::<u64>()) {
        let (_, _, base, c) = setup(seed);
        let rep = minimality_report(&c, &base).unwrap();
        prop_assert!(rep.agree(), "{:?}", rep);
    }

    #[test]
    fn minimality_survives_unit_perturbation(seed in any::<u64>(), w in 1i64..4, j in 0i64..20) {
        let (_, _, base, c) = setup(seed);
        let c = c.sr().unwrap();
        let rep = minimality_report(&c, &base).unwrap();
        prop_assume!(rep.verdict() && !rep.in_base);
        let e = base.with_generator(&c).unwrap();
        let k = c.field().residue();
        let g = k.pow(e.residue_generator(), j);
        let step = e.uniformizer().unwrap().pow(w).unwrap().scale(g);
        let u = TameElement::one(c.field(), c.prec()).add(&step).unwrap();
        let moved = c.mul(&u).unwrap();
        let after = minimality_report(&moved, &base).unwrap();
        prop_assert!(after.agree());
        prop_assert!(after.verdict());
    }

    #[test]
    fn high_order_tail_keeps_tower_and_jumps(seed in any::<u64>(), extra in 0i64..3, a in 1u32..100) {
        let (_, top, _, beta) = setup(seed);
        let f = Subfield::base(&top).unwrap();
        let fac = howe_factorize(&beta, &f).unwrap();
        prop_assert!(check_factorization(&fac).unwrap().valid());
        let e0 = &fac.chunks[0].field;
        let e = e0.e_abs() as i64;
        let ord0 = fac.chunks[0].ord;
        let k = (ord0 * Rational::from(e)).floor().to_integer() + 1 + extra;
        let scalar = e0.residue_generator();
        let kf = top.residue();
        let z = e0.uniformizer().unwrap().pow(k).unwrap().scale(kf.pow(scalar, a as i64));
        prop_assert!(z.ord().unwrap() > ord0);
        let moved = beta.add(&z).unwrap();
        let fac2 = howe_factorize(&moved, &f).unwrap();
        prop_assert!(check_factorization(&fac2).unwrap().valid());
        let shape = |fc: &strata_core::minimal::Factorization| -> Vec<(u32, Rational)> {
            fc.chunks.iter().map(|c| (c.field_degree, c.ord)).collect()
        };
        prop_assert_eq!(fac.degenerate, fac2.degenerate);
        prop_assert_eq!(shape(&fac), shape(&fac2));
    }

    #[test]
    fn genericity_matches_minimality(seed in any::<u64>()) {
        let (_, _, base, c) = setup(seed);
        let upper = base.with_generator(&c).unwrap();
        prop_assume!(upper.degree() > base.degree());
        let g = is_generic(&c, &upper, &base).unwrap();
        let m = minimality_report(&c, &base).unwrap();
        prop_assert_eq!(g.verdict, m.verdict());
        prop_assert_eq!(g.minimal, m.verdict());
    }
}

#[test]
fn running_example_has_two_chunks() {
    let f = strata_core::base_field(3).unwrap();
    let e = strata_core::extend(&f, 1, 2, 1).unwrap();
    let beta = TameElement::new(&e, [(-4, 1), (-1, 1)], 64);
    let fac = howe_factorize(&beta, &Subfield::base(&e).unwrap()).unwrap();
    assert_eq!(fac.chunks.len(), 2);
    assert!(check_factorization(&fac).unwrap().valid());
}
