use proptest::prelude::*;
use rand::Rng;
use strata_core::fuzz::{self, FuzzCaps};
use strata_core::{Subfield, TameElement, TameField};

fn instance(seed: u64) -> (TameField, TameElement) {
    let caps = FuzzCaps::default();
    let mut r = fuzz::rng(seed);
    let top = fuzz::random_tower(&mut r, &caps).unwrap();
    let x = fuzz::random_element(&mut r, &top, &caps, false).unwrap();
    (top, x)
}

fn one_plus_p(x: &TameElement) -> bool {
    let one = TameElement::one(x.field(), x.prec());
    match x.sub(&one).unwrap().valuation() {
        Some(v) => v > 0,
        None => true,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sr_is_the_unique_close_monomial(seed in any::<u64>()) {
        let (top, c) = instance(seed);
        let s = c.sr().unwrap();
        prop_assert!(s.is_monomial());
        prop_assert!(one_plus_p(&c.div(&s).unwrap()));
        let (v, a) = s.lead().unwrap();
        prop_assert_eq!(c.valuation(), Some(v));
        if let Some(w) = c.sub(&s).unwrap().valuation() {
            prop_assert!(w > v);
        }
        let k = top.residue();
        for b in 1..k.size().min(12) {
            if b == a {
                continue;
            }
            let other = TameElement::monomial(&top, b, v, c.prec());
            prop_assert!(!one_plus_p(&c.div(&other).unwrap()));
            prop_assert_eq!(c.sub(&other).unwrap().valuation(), Some(v));
        }
    }

    #[test]
    fn embedding_differences_keep_ord(seed in any::<u64>()) {
        let (top, c) = instance(seed);
        let s = c.sr().unwrap();
        let embs = top.embeddings().unwrap();
        let imgs: Vec<TameElement> = embs.iter().map(|e| e.apply(&s).unwrap()).collect();
        for i in 0..imgs.len() {
            for j in i + 1..imgs.len() {
                let d = imgs[i].sub(&imgs[j]).unwrap();
                if d.valuation().is_some() {
                    prop_assert_eq!(d.ord().unwrap(), s.ord().unwrap());
                }
            }
        }
    }

    #[test]
    fn coerce_keeps_ord(seed in any::<u64>()) {
        let caps = FuzzCaps::default();
        let mut r = fuzz::rng(seed);
        let top = fuzz::random_tower(&mut r, &caps).unwrap();
        let chain = top.chain();
        let node = &chain[r.gen_range(0..chain.len())];
        let x = fuzz::random_element(&mut r, node, &caps, false).unwrap();
        let y = x.coerce(&top).unwrap();
        prop_assert_eq!(x.ord().unwrap(), y.ord().unwrap());
        prop_assert_eq!(x.num_digits(), y.num_digits());
    }

    #[test]
    fn truncated_arithmetic_agrees_with_full(seed in any::<u64>(), cut in 8i64..40) {
        let caps = FuzzCaps::default();
        let mut r = fuzz::rng(seed);
        let top = fuzz::random_tower(&mut r, &caps).unwrap();
        let x = fuzz::random_element(&mut r, &top, &caps, false).unwrap();
        let y = fuzz::random_element(&mut r, &top, &caps, false).unwrap();
        let (xs, ys) = (x.with_prec(cut), y.with_prec(cut));
        prop_assert!(xs.add(&ys).unwrap().eq_to_prec(&x.add(&y).unwrap()));
        let low = xs.mul(&ys).unwrap();
        let high = x.mul(&y).unwrap();
        prop_assert!(low.prec() <= high.prec());
        prop_assert!(low.eq_to_prec(&high));
        prop_assert!(xs.inv().unwrap().eq_to_prec(&x.inv().unwrap()));
    }

    #[test]
    fn embeddings_are_degree_many_and_distinct(seed in any::<u64>()) {
        let (top, _) = instance(seed);
        let embs = top.embeddings().unwrap();
        prop_assert_eq!(embs.len() as u32, top.degree());
        let prec = 16;
        let pi = TameElement::pi_power(&top, 1, prec);
        let g = Subfield::of_node(&top, &top).unwrap().residue_generator();
        let zeta = TameElement::constant(&top, g, prec);
        let images: Vec<(TameElement, TameElement)> = embs
            .iter()
            .map(|e| (e.apply(&pi).unwrap(), e.apply(&zeta).unwrap()))
            .collect();
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                prop_assert!(!(images[i].0.eq_to_prec(&images[j].0) && images[i].1.eq_to_prec(&images[j].1)));
            }
        }
    }
}

#[test]
fn sr_of_two_over_t_plus_one() {
    let f = strata_core::base_field(3).unwrap();
    let c = TameElement::new(&f, [(-1, 2), (0, 1)], 64);
    let s = c.sr().unwrap();
    assert_eq!(s.digits().iter().map(|(&v, &a)| (v, a)).collect::<Vec<_>>(), vec![(-1, 2)]);
}

#[test]
fn uniformizer_relation_down_the_tower() {
    let f = strata_core::base_field(3).unwrap();
    let e = strata_core::extend(&f, 2, 2, 3).unwrap();
    let pi = TameElement::pi_power(&e, 1, 32);
    let twist = TameElement::constant(&e, e.twist(), 32);
    let t = TameElement::t_power(&f, 1, 32).coerce(&e).unwrap();
    assert!(pi.pow(2).unwrap().mul(&twist).unwrap().eq_to_prec(&t));
}
