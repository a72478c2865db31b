//! Differential suites shared by `verify` and the acceptance tests.

use std::collections::BTreeMap;

use rand::Rng;
use serde_json::{json, Value};

use strata_core::fuzz::{self, FuzzCaps};
use strata_core::minimal::{check_factorization, howe_factorize, minimality_report, Chunk, Factorization};
use strata_core::oracle::{chain_from_field, eval_psi_c, lattice_index, Chain, Frame, Mat, MatrixLattice};
use strata_core::stratum::{
    depth_of_index, index_card, index_of_depth, k0, k_f, levels_of, presentation_secherre, presentation_yu,
    yu_jump_indices, compare_presentations, DepthMode, ExponentRule, GroupPresentation, OrderSkeleton,
    StratumSkeleton,
};
use strata_core::translate::{roundtrip_check, secherre_to_yu, Skeleton};
use strata_core::{base_field, extend, Error, Rational, Result, Subfield, TameElement, TameField};

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
    pub counts: BTreeMap<String, usize>,
}

impl SuiteReport {
    pub fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cases > 0
    }

    fn fail(&mut self, msg: impl Into<String>) {
        if self.failures.len() < 50 {
            self.failures.push(msg.into());
        } else {
            *self.counts.entry("failures_suppressed".into()).or_default() += 1;
        }
    }

    fn bump(&mut self, key: &str) {
        *self.counts.entry(key.to_string()).or_default() += 1;
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.fail(msg());
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.name,
            "cases": self.cases,
            "passed": self.passed(),
            "failures": self.failures,
            "counts": self.counts,
        })
    }

    pub fn merge(mut self, other: SuiteReport) -> Self {
        self.cases += other.cases;
        for f in other.failures {
            self.fail(format!("{}: {f}", other.name));
        }
        for (k, v) in other.counts {
            *self.counts.entry(format!("{}.{k}", other.name)).or_default() += v;
        }
        self
    }
}

/// Towers used for the exhaustive standard-representative corpus.
pub fn sr_towers() -> Result<Vec<TameField>> {
    let f3 = base_field(3)?;
    let f5 = base_field(5)?;
    let f9 = base_field(9)?;
    let u3 = extend(&f3, 2, 1, 3)?;
    let u5 = extend(&f5, 2, 1, 2)?;
    Ok(vec![
        extend(&f3, 1, 2, 1)?,
        extend(&f3, 2, 2, 3)?,
        extend(&u3, 2, 2, 5)?,
        extend(&f5, 1, 4, 2)?,
        extend(&u5, 1, 3, 7)?,
        extend(&f9, 1, 2, 4)?,
        extend(&f9, 2, 2, 10)?,
    ])
}

/// Residues used at each digit position: all units of small fields, a spread
/// of eight powers of the generator otherwise.
fn residue_sample(top: &TameField) -> Vec<u32> {
    let k = top.residue();
    let ord = k.order();
    if ord <= 8 {
        return (0..ord).map(|j| k.exp(j as i64)).collect();
    }
    (0..8u32).map(|j| k.exp((j * (ord / 8) + j) as i64)).collect()
}

/// All elements with one to three digits at positions `[lo, lo + 4)`.
pub fn sr_corpus(top: &TameField, lo: i64, prec: i64) -> Vec<TameElement> {
    let res = residue_sample(top);
    let pos: Vec<i64> = (lo..lo + 4).collect();
    let mut out = Vec::new();
    for mask in 1u32..16 {
        let chosen: Vec<i64> = pos.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
        if chosen.len() > 3 {
            continue;
        }
        let total = res.len().pow(chosen.len() as u32);
        for code in 0..total {
            let mut c = code;
            let digits: Vec<(i64, u32)> = chosen
                .iter()
                .map(|&v| {
                    let a = res[c % res.len()];
                    c /= res.len();
                    (v, a)
                })
                .collect();
            out.push(TameElement::new(top, digits, prec));
        }
    }
    out
}

/// Criterion 1: the standard representative exists, is unique, and embedding
/// differences of a representative keep its order.
pub fn suite_sr(prec: i64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("sr");
    for top in sr_towers()? {
        let embs = top.embeddings()?;
        let k = top.residue();
        let all_units: Vec<u32> = (0..k.order()).map(|j| k.exp(j as i64)).collect();
        let alts: Vec<u32> = if all_units.len() <= 16 {
            all_units
        } else {
            residue_sample(&top)
        };
        for c in sr_corpus(&top, -3, prec) {
            let s = c.sr()?;
            let ord_c = c.ord()?;
            let (v, a) = c.lead().unwrap();
            let unit = c.div(&s)?.sub(&TameElement::one(&top, prec))?;
            let in_one_plus_p = unit.valuation().is_none_or(|w| w > 0);
            let close = c.sub(&s)?.ord().map(|o| o > ord_c).unwrap_or(true);
            rep.check(s.is_monomial() && in_one_plus_p && close, || format!("sr({c:?}) = {s:?}"));
            for &b in &alts {
                for w in [v - 1, v, v + 1] {
                    if b == a && w == v {
                        continue;
                    }
                    let m = TameElement::monomial(&top, b, w, prec);
                    let far = c.sub(&m)?.ord().map(|o| o <= ord_c).unwrap_or(false);
                    rep.check(far, || format!("{m:?} also approximates {c:?}"));
                }
            }
            let imgs: Vec<TameElement> = embs.iter().map(|e| e.apply(&s)).collect::<Result<_>>()?;
            for i in 0..imgs.len() {
                for j in i + 1..imgs.len() {
                    if imgs[i].eq_to_prec(&imgs[j]) {
                        continue;
                    }
                    let d = imgs[i].sub(&imgs[j])?.ord()?;
                    rep.check(d == s.ord()?, || format!("ord(s_{i} - s_{j}) = {d} for {s:?}"));
                }
            }
            rep.bump("elements");
        }
    }
    Ok(rep)
}

/// Criterion 2: the three minimality criteria agree, and minimality survives
/// `1 + p` perturbations on a sample of minimal elements.
pub fn suite_minimal(prec: i64, seed: u64, per_tower: usize, perturbations: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("minimal");
    let mut rng = fuzz::rng(seed);
    for top in sr_towers()? {
        let base = Subfield::base(&top)?;
        let mut minimal = Vec::new();
        for c in sr_corpus(&top, -3, prec) {
            let r = minimality_report(&c, &base)?;
            rep.check(r.agree(), || {
                format!(
                    "criteria disagree on {c:?}: {} {} {}",
                    r.crit1_classical, r.crit2_sr_generates, r.crit3_embedding_ord
                )
            });
            if r.verdict() && !r.in_base {
                minimal.push(c);
                rep.bump("minimal");
            }
        }
        let k = top.residue().clone();
        let stride = (minimal.len() / per_tower.max(1)).max(1);
        for c in minimal.iter().step_by(stride).take(per_tower) {
            let e = base.with_generator(c)?;
            let pi = e.uniformizer()?.with_prec(prec);
            let g = e.residue_generator();
            let units = k.mult_order(g) as i64;
            for _ in 0..perturbations {
                let mut u = TameElement::one(&top, prec);
                for w in 1..=3 {
                    if rng.gen_bool(0.25) {
                        continue;
                    }
                    let a = TameElement::constant(&top, k.pow(g, rng.gen_range(0..units)), prec);
                    u = u.add(&a.mul(&pi.pow(w)?)?)?;
                }
                let c2 = c.mul(&u)?;
                let r = minimality_report(&c2, &base)?;
                rep.check(r.agree() && r.verdict(), || format!("perturbation {c2:?} of {c:?} is not minimal"));
                rep.bump("perturbations");
            }
        }
    }
    Ok(rep)
}

/// The ten mutation classes and the clause each must trip.
pub const MUTATIONS: [(&str, &str); 10] = [
    ("high_digit", "sum"),
    ("reverse", "ord_decrease"),
    ("merge", "chunk_minimal"),
    ("ord_plus_one", "declared_ord"),
    ("zero_chunk", "nonzero_chunk"),
    ("relabel", "ambient"),
    ("foreign_digit", "field_generation"),
    ("collapse_field", "field_growth"),
    ("flip_degenerate", "degenerate"),
    ("degree_plus_one", "declared_degree"),
];

pub fn mutate(fac: &Factorization, kind: &str) -> Result<Option<Factorization>> {
    let mut m = fac.clone();
    let amb = fac.base.ambient().clone();
    let two = fac.chunks.len() >= 2;
    match kind {
        "high_digit" => {
            let p = m.chunks[0].c.prec();
            let extra = TameElement::monomial(&amb, 1, p - 2, p);
            m.chunks[0].c = m.chunks[0].c.add(&extra)?;
        }
        "reverse" if two => m.chunks.reverse(),
        "merge" if two => {
            let c1 = m.chunks.remove(1);
            let field = m.chunks[0].field.clone();
            m.chunks[0] = Chunk::new(m.chunks[0].c.add(&c1.c)?, field)?;
        }
        "ord_plus_one" => m.chunks[0].ord += Rational::from(1),
        "zero_chunk" => {
            let z = TameElement::zero(&amb, fac.beta.prec());
            let field = m.chunks[0].field.clone();
            m.chunks.insert(0, Chunk {
                c: z,
                field_degree: field.degree(),
                field,
                ord: Rational::from(0),
            });
        }
        "relabel" => {
            let other = amb.base();
            m.chunks[0].c = TameElement::one(&other, fac.beta.prec());
        }
        "foreign_digit" if two => {
            let (v, a) = m.chunks[0].c.lead().unwrap();
            let shift = 5 * amb.e_abs() as i64;
            let x = TameElement::monomial(&amb, a, v + shift, fac.beta.prec());
            if m.chunks[1].field.contains(&x)? {
                return Ok(None);
            }
            m.chunks[0].c = m.chunks[0].c.sub(&x)?;
            m.chunks[1].c = m.chunks[1].c.add(&x)?;
        }
        "collapse_field" if two => {
            m.chunks[0].field = m.chunks[1].field.clone();
            m.chunks[0].field_degree = m.chunks[1].field_degree;
        }
        "flip_degenerate" => m.degenerate = !m.degenerate,
        "degree_plus_one" => m.chunks[0].field_degree += 1,
        _ => return Ok(None),
    }
    Ok(Some(m))
}

/// Criterion 3: fuzzed factorizations certify, and every mutation is rejected
/// with its own clause.
pub fn suite_factorize(seed: u64, count: usize, mutation_cap: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("factorize");
    let caps = FuzzCaps::default();
    let mut mutated = 0;
    for inst in fuzz::corpus(seed, count, &caps)? {
        let base = Subfield::base(&inst.tower)?;
        let fac = howe_factorize(&inst.beta, &base)?;
        let v = check_factorization(&fac)?;
        rep.check(v.valid(), || format!("{}: {:?}", inst.to_json(), v.clause));
        rep.bump(&format!("chunks_{}", fac.chunks.len()));
        if fac.chunks.len() < 2 || mutated >= mutation_cap {
            continue;
        }
        mutated += 1;
        for (kind, want) in MUTATIONS {
            let Some(m) = mutate(&fac, kind)? else {
                rep.bump("mutation_skipped");
                continue;
            };
            let got = check_factorization(&m)?;
            rep.check(got.clause.as_deref() == Some(want), || {
                format!("{kind} on {} gave {:?}", inst.to_json(), got.clause)
            });
            rep.bump(&format!("mutation.{kind}"));
        }
    }
    Ok(rep)
}

/// Criterion 4: `v_A` and `k_0` against explicit matrices for `[E:F] <= 4`.
pub fn suite_valuation(seed: u64, count: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("valuation");
    let caps = FuzzCaps::default();
    let mut rng = fuzz::rng(seed ^ 0x5eed);
    for inst in fuzz::corpus(seed, count, &caps)? {
        let top = &inst.tower;
        if top.degree() > 4 {
            continue;
        }
        let beta = &inst.beta;
        if beta.is_zero() {
            continue;
        }
        let chain = chain_from_field(top)?;
        let base = Subfield::base(top)?;
        let e_top = top.e_abs() as i64;
        let field = base.with_generator(beta)?;
        let va = chain.v_a_direct(&chain.regular_rep(beta)?)?;
        let ve = field.valuation_of(beta)?;
        rep.check(va * field.e_abs() as i64 == e_top * ve, || {
            format!("valval: v_A = {va}, v_E = {ve} on {}", inst.to_json())
        });
        let order = OrderSkeleton::new(top.degree(), 1, top.e_abs(), field.clone(), top.e_abs() == field.e_abs())?;
        let fac = howe_factorize(beta, &base)?;
        match k0(beta, &order)? {
            None => rep.bump("beta_in_base"),
            Some(k) => {
                let direct = chain.v_a_direct(&chain.regular_rep(&fac.chunks[0].c)?)?;
                let kf = k_f(beta)?.unwrap();
                let scaled = Rational::new(e_top * kf, fac.chunks[0].field.e_abs() as i64);
                rep.check(k == direct && scaled == Rational::from(k), || {
                    format!("k0 = {k}, direct {direct}, scaled {scaled} on {}", inst.to_json())
                });
            }
        }
        let other = fuzz::random_element(&mut rng, top, &caps, false)?;
        let lhs = chain.regular_rep(&beta.mul(&other)?)?;
        let rhs = chain.regular_rep(beta)?.mul(&chain.regular_rep(&other)?)?;
        let same = lhs.entries.iter().zip(&rhs.entries).all(|(a, b)| a.eq_to_prec(b));
        rep.check(same, || format!("regular_rep is not multiplicative on {}", inst.to_json()));
        rep.bump("instances");
    }
    Ok(rep)
}

/// The three chain shapes `e_A = 1, 2, 4`.
pub fn chain_shapes() -> Result<Vec<TameField>> {
    let f3 = base_field(3)?;
    let f5 = base_field(5)?;
    Ok(vec![extend(&f3, 2, 1, 3)?, extend(&f3, 1, 2, 1)?, extend(&f5, 1, 4, 2)?])
}

/// Lattice equality, re-run at doubled precision near the truncation.
fn lattices_equal(frame: Frame, build: &dyn Fn(Frame) -> Result<(MatrixLattice, MatrixLattice)>) -> Result<bool> {
    let (a, b) = build(frame)?;
    if a.near_boundary() || b.near_boundary() {
        let (a, b) = build(frame.doubled())?;
        return Ok(a == b);
    }
    Ok(a == b)
}

/// Subfields of degree at most 2 of a node.
fn small_subfields(top: &TameField) -> Result<Vec<Subfield>> {
    let mut out = vec![Subfield::base(top)?];
    let prec = 32;
    let cands = [
        TameElement::pi_power(top, 1, prec),
        TameElement::pi_power(top, 2, prec),
        TameElement::constant(top, top.residue().generator_idx(), prec),
    ];
    for c in cands {
        let k = Subfield::generated(&[c], top)?;
        if k.degree() <= 2 && !out.contains(&k) {
            out.push(k);
        }
    }
    Ok(out)
}

/// Criterion 5: filtration windows against direct lattices.
pub fn suite_filtration(max_n: i64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("filtration");
    for top in chain_shapes()? {
        let chain = chain_from_field(&top)?;
        let e = chain.period() as u32;
        let nn = chain.n() as i64;
        let frame = Frame::for_valuations(0, max_n + 2);
        for n in 0..=max_n {
            for mode in DepthMode::ALL {
                let d = depth_of_index(n, e, mode);
                let k = mode.exponent(n);
                let ok = lattices_equal(frame, &|fr| {
                    Ok((chain.filt_lattice(k, fr)?, chain.depth_lattice(d, fr)?))
                })?;
                rep.check(ok, || format!("e_A = {e}, n = {n}, mode {}", mode.name()));
                let back = index_of_depth(d, e, mode)?;
                rep.check(back == n, || format!("index_of_depth({d}) = {back}, want {n}"));
            }
        }
        for sub in small_subfields(&top)? {
            let i0 = chain.intersect_with_centralizer(&sub, 0, frame)?;
            let step = nn * nn / (sub.degree() as i64 * e as i64);
            for n in 0..=max_n {
                let depth = depth_of_index(n, e, DepthMode::Plain);
                let ok = lattices_equal(frame, &|fr| {
                    Ok((chain.intersect_with_centralizer(&sub, n, fr)?, chain.centralizer_depth_lattice(&sub, depth, fr)?))
                })?;
                rep.check(ok, || format!("centralizer of degree {} at n = {n}, e_A = {e}", sub.degree()));
                let plus = depth_of_index(n, e, DepthMode::Plus);
                let ok = lattices_equal(frame, &|fr| {
                    Ok((chain.intersect_with_centralizer(&sub, n + 1, fr)?, chain.centralizer_depth_lattice(&sub, plus, fr)?))
                })?;
                rep.check(ok, || format!("centralizer of degree {} at depth {plus}, e_A = {e}", sub.degree()));
                let i_n = chain.intersect_with_centralizer(&sub, n, frame)?;
                let idx = lattice_index(&i0, &i_n, chain.kf())?;
                rep.check(idx == n * step, || {
                    format!("[B P^0 : B P^{n}] = {idx}, want {} (degree {}, e_A {e})", n * step, sub.degree())
                });
                if sub.degree() as i64 == nn {
                    let pi = chain.graded_rep(&TameElement::pi_power(&top, n, 64))?;
                    let shifted = chain.left_multiply(&pi, &i0)?;
                    rep.check(shifted == i_n, || format!("B P^{n} is not pi^{n} B at e_A = {e}"));
                }
            }
        }
    }
    Ok(rep)
}

fn rule_lattice(chain: &Chain, field: &Subfield, rule: ExponentRule, frame: Frame) -> Result<MatrixLattice> {
    let exp = |k: i64| chain.intersect_with_centralizer(field, k, frame);
    match rule {
        ExponentRule::U0 | ExponentRule::KFrak => exp(0),
        ExponentRule::Power(n) => exp(n),
        ExponentRule::FloorHalfPlusOne(r) => exp(num_integer::Integer::div_floor(&r, &2) + 1),
        ExponentRule::FloorHalfCeil(r) => exp(num_integer::Integer::div_floor(&(r + 1), &2)),
        ExponentRule::Depth(d) => chain.centralizer_depth_lattice(field, d, frame),
    }
}

/// The Lie lattice of a presentation: the sum of its factor lattices.
pub fn lie_lattice(chain: &Chain, pres: &GroupPresentation, fields: &[Subfield], frame: Frame) -> Result<MatrixLattice> {
    let mut acc: Option<MatrixLattice> = None;
    for f in &pres.factors {
        let l = rule_lattice(chain, &fields[f.level], f.rule, frame)?;
        acc = Some(match acc {
            None => l,
            Some(a) => a.sum(&l, chain.kf())?,
        });
    }
    acc.ok_or_else(|| Error::Internal("empty presentation".into()))
}

fn lie_frame(st: &StratumSkeleton) -> Frame {
    Frame::for_valuations(0, st.n + 2)
}

/// Criteria 6 and 8: symbolic presentation equality, Lie lattice equality and
/// the index identity on every instance small enough for the oracle.
pub fn suite_presentations(seed: u64, count: usize, oracle_cap: u32) -> Result<(SuiteReport, SuiteReport)> {
    let mut rep = SuiteReport::new("presentations");
    let mut idx = SuiteReport::new("index");
    for st in fuzz::strata_corpus(seed, count, &FuzzCaps::default())? {
        let yu = secherre_to_yu(&st)?;
        let sp = presentation_secherre(&st)?;
        let yp = presentation_yu(&yu)?;
        for (a, b) in [(&sp.h1, &yp.k_plus), (&sp.j, &yp.k_circ), (&sp.jhat, &yp.k)] {
            let d = compare_presentations(a, b)?;
            rep.check(d.equal, || format!("{} vs {}: {:?}", a.name, b.name, d.diffs));
        }
        let n_dim = st.order.n_dim();
        let jumps: i64 = yu_jump_indices(&yu)?.iter().sum();
        let card = index_card(&sp.j1, &sp.h1)?;
        idx.check(card == jumps, || format!("index_card {card} vs jumps {jumps}"));
        if n_dim > oracle_cap {
            continue;
        }
        rep.bump("oracle_instances");
        let amb = st.order.pure_over.ambient().clone();
        let chain = chain_from_field(&amb)?;
        let sf = levels_of(&st.fac);
        let mut frame = lie_frame(&st);
        for attempt in 0..2 {
            let lat = |p: &GroupPresentation, fields: &[Subfield]| lie_lattice(&chain, p, fields, frame);
            let h1 = lat(&sp.h1, &sf)?;
            let kp = lat(&yp.k_plus, &yu.fields)?;
            let j = lat(&sp.j, &sf)?;
            let kc = lat(&yp.k_circ, &yu.fields)?;
            let j1 = lat(&sp.j1, &sf)?;
            let near = [&h1, &kp, &j, &kc, &j1].iter().any(|l| l.near_boundary());
            if near && attempt == 0 {
                frame = frame.doubled();
                continue;
            }
            rep.check(h1 == kp, || format!("Lie H1 != K+ for beta {:?}", st.beta));
            rep.check(j == kc, || format!("Lie J != K0 for beta {:?}", st.beta));
            let li = lattice_index(&j1, &h1, chain.kf())?;
            idx.check(li == jumps, || format!("lattice index {li} vs jumps {jumps} for beta {:?}", st.beta));
            break;
        }
    }
    Ok((rep, idx))
}

/// Criterion 7: both round trips and the two genericity certificates.
pub fn suite_roundtrip(seed: u64, count: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("roundtrip");
    for st in fuzz::strata_corpus(seed, count, &FuzzCaps::default())? {
        if st.is_depth_zero() {
            rep.bump("depth_zero");
        }
        let r = roundtrip_check(Skeleton::Secherre(&st))?;
        rep.check(r.equal(), || format!("stratum round trip: {:?}", r.failures()));
        let yu = secherre_to_yu(&st)?;
        let r = roundtrip_check(Skeleton::Yu(&yu))?;
        rep.check(r.equal(), || format!("datum round trip: {:?}", r.failures()));
        for g in yu.validate()? {
            rep.check(g.verdict && g.minimal, || {
                format!("realizer {:?}: generic {}, minimal {}", g.element, g.verdict, g.minimal)
            });
        }
    }
    Ok(rep)
}

fn random_mat(rng: &mut impl Rng, chain: &Chain, pat: &[i64], prec: i64) -> Mat {
    let base = chain.base().clone();
    let size = base.residue().size();
    let n = chain.n();
    let entries = (0..n * n)
        .map(|i| {
            let digits: Vec<(i64, u32)> = (0..3).map(|k| (pat[i] + k, rng.gen_range(0..size))).collect();
            TameElement::new(&base, digits.into_iter().filter(|(v, _)| *v < prec), prec)
        })
        .collect();
    Mat { n, entries }
}

/// Criterion 9: the character criterion for `psi_c`.
pub fn suite_psi(seed: u64, triples: usize, samples: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("psi");
    let mut rng = fuzz::rng(seed);
    let chains: Vec<Chain> = chain_shapes()?.iter().map(chain_from_field).collect::<Result<_>>()?;
    let prec = 24;
    for t in 0..triples {
        let chain = &chains[t % chains.len()];
        let i = rng.gen_range(0..4i64);
        let c = random_mat(&mut rng, chain, &chain.pattern(|j| j - 6), prec);
        let x_pat = chain.pattern(|j| j + i + 1);
        let d = random_mat(&mut rng, chain, &chain.pattern(|j| j - i), prec);
        let c2 = c.add(&d)?;
        let mut agree = true;
        for _ in 0..samples {
            let y = random_mat(&mut rng, chain, &x_pat, prec);
            if eval_psi_c(&c, &y)? != eval_psi_c(&c2, &y)? {
                agree = false;
            }
        }
        rep.check(agree, || format!("psi_c differs although c - c' lies in P^-{i}"));
        let far = loop {
            let d = random_mat(&mut rng, chain, &chain.pattern(|j| j - i - 1), prec);
            if chain.v_a_direct(&d)? == -i - 1 {
                break d;
            }
        };
        let c3 = c.add(&far)?;
        let mut found = false;
        let n = chain.n();
        let kf = chain.kf().clone();
        'search: for pos in 0..n * n {
            for lam in 1..kf.size() {
                let mut y = Mat::zero(chain.base(), n, prec);
                y.entries[pos] = TameElement::monomial(chain.base(), lam, x_pat[pos], prec);
                if eval_psi_c(&c, &y)? != eval_psi_c(&c3, &y)? {
                    found = true;
                    break 'search;
                }
            }
        }
        rep.check(found, || format!("psi_c agrees on U^{} although c - c' is outside P^-{i}", i + 1));
    }
    Ok(rep)
}
