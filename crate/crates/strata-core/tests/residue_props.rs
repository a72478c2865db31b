use proptest::prelude::*;
use strata_core::residue::FqEmbedding;
use strata_core::make_field;

const FIELDS: [(u32, u32); 7] = [(2, 1), (2, 4), (3, 1), (3, 2), (3, 4), (5, 2), (7, 3)];

fn field_and_triple() -> impl Strategy<Value = ((u32, u32), u32, u32, u32)> {
    proptest::sample::select(FIELDS.to_vec()).prop_flat_map(|(p, f)| {
        let size = p.pow(f);
        (Just((p, f)), 0..size, 0..size, 0..size)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn field_axioms(((p, f), a, b, c) in field_and_triple()) {
        let k = make_field(p, f).unwrap();
        prop_assert_eq!(k.add(k.add(a, b), c), k.add(a, k.add(b, c)));
        prop_assert_eq!(k.mul(k.mul(a, b), c), k.mul(a, k.mul(b, c)));
        prop_assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
        prop_assert_eq!(k.add(a, b), k.add(b, a));
        prop_assert_eq!(k.mul(a, b), k.mul(b, a));
        prop_assert_eq!(k.add(a, k.neg(a)), 0);
        prop_assert_eq!(k.sub(k.add(a, b), b), a);
        match k.inv(a) {
            Some(ai) => prop_assert_eq!(k.mul(a, ai), 1),
            None => prop_assert_eq!(a, 0),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn frobenius_is_a_ring_map(((p, f), a, b, _c) in field_and_triple(), k in 0i64..8) {
        let fld = make_field(p, f).unwrap();
        prop_assert_eq!(fld.frob(fld.add(a, b), k), fld.add(fld.frob(a, k), fld.frob(b, k)));
        prop_assert_eq!(fld.frob(fld.mul(a, b), k), fld.mul(fld.frob(a, k), fld.frob(b, k)));
        prop_assert_eq!(fld.frob(a, 1), fld.pow(a, p as i64));
        prop_assert_eq!(fld.frob(a, f as i64), a);
    }

    #[test]
    fn embedding_commutes_with_source_frobenius(
        (p, fo, mult) in proptest::sample::select(vec![(2u32, 1u32, 4u32), (2, 2, 2), (3, 1, 2), (3, 2, 2), (3, 1, 4), (5, 1, 2)]),
        seed in any::<u32>(),
    ) {
        let src = make_field(p, fo).unwrap();
        let tgt = make_field(p, fo * mult).unwrap();
        let emb = FqEmbedding::new(&src, &tgt).unwrap();
        let x = seed % src.size();
        let y = (seed / src.size()) % src.size();
        let ex = emb.apply(x);
        prop_assert_eq!(tgt.frob(ex, fo as i64), emb.apply(src.frob(x, fo as i64)));
        prop_assert_eq!(tgt.frob(ex, fo as i64), ex);
        prop_assert_eq!(emb.apply(src.mul(x, y)), tgt.mul(ex, emb.apply(y)));
        prop_assert_eq!(emb.apply(src.add(x, y)), tgt.add(ex, emb.apply(y)));
    }
}

#[test]
fn frobenius_has_order_f() {
    for (p, f) in FIELDS {
        let k = make_field(p, f).unwrap();
        let g = k.generator_idx();
        let first_fixed = (1..=f).find(|&j| k.frob(g, j as i64) == g).unwrap();
        assert_eq!(first_fixed, f, "p = {p}, f = {f}");
    }
}

#[test]
fn generator_order_by_exhaustive_powers() {
    for (p, f) in [(2, 1), (2, 8), (3, 1), (3, 2), (3, 8), (5, 4), (7, 4), (11, 3), (13, 2)] {
        let k = make_field(p, f).unwrap();
        let g = k.generator_idx();
        let mut x = g;
        let mut n = 1u32;
        while x != 1 {
            x = k.mul(x, g);
            n += 1;
        }
        assert_eq!(n, k.size() - 1, "p = {p}, f = {f}");
    }
}
