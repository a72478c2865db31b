//! Seeded random towers, elements and strata.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::Result;
use crate::json::{element_to_json, tower_to_json};
use crate::residue::FIELD_CAP;
use crate::stratum::{OrderSkeleton, StratumSkeleton};
use crate::tower::{base_field, extend, Subfield, TameElement, TameField};

#[derive(Clone, Debug)]
pub struct FuzzCaps {
    pub qs: Vec<u64>,
    pub max_degree: u32,
    pub max_levels: usize,
    pub max_digits: usize,
    pub prec: i64,
}

impl Default for FuzzCaps {
    fn default() -> Self {
        FuzzCaps {
            qs: vec![3, 5, 9],
            max_degree: 8,
            max_levels: 3,
            max_digits: 6,
            prec: 64,
        }
    }
}

impl FuzzCaps {
    pub fn with_max_degree(mut self, d: u32) -> Self {
        self.max_degree = d;
        self
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random tower with at least one proper level.
pub fn random_tower(rng: &mut impl Rng, caps: &FuzzCaps) -> Result<TameField> {
    loop {
        let q = *caps.qs.choose(rng).unwrap();
        let mut node = base_field(q)?;
        let levels = rng.gen_range(1..=caps.max_levels);
        for _ in 0..levels {
            let room = caps.max_degree / node.degree();
            let p = node.p();
            let opts: Vec<(u32, u32)> = (1..=room)
                .flat_map(|f| (1..=room / f).map(move |e| (f, e)))
                .filter(|&(f, e)| f * e >= 2 && e % p != 0)
                .filter(|&(f, _)| (q as u128).pow(node.f_abs() * f) <= FIELD_CAP as u128)
                .collect();
            let Some(&(f, e)) = opts.choose(rng) else {
                break;
            };
            let size = (q as u32).pow(node.f_abs() * f);
            let twist = rng.gen_range(1..size);
            node = extend(&node, f, e, twist)?;
        }
        if !node.is_base() && node.splitting().is_ok() {
            return Ok(node);
        }
    }
}

/// `1..=max_digits` monomials drawn from random nodes of the tower, all of
/// negative valuation when `negative` is set.
pub fn random_element(rng: &mut impl Rng, top: &TameField, caps: &FuzzCaps, negative: bool) -> Result<TameElement> {
    let chain = top.chain();
    let et = top.e_abs() as i64;
    let ndig = rng.gen_range(1..=caps.max_digits);
    let mut acc = TameElement::zero(top, caps.prec);
    for _ in 0..ndig {
        let node = &chain[rng.gen_range(0..chain.len())];
        let scale = et / node.e_abs() as i64;
        let lo = -3 * node.e_abs() as i64;
        let hi = if negative { -1 } else { 1 };
        let w = rng.gen_range(lo..=hi);
        let a = rng.gen_range(1..node.residue().size());
        if w * scale >= caps.prec {
            continue;
        }
        let m = TameElement::monomial(node, a, w, caps.prec / scale).coerce(top)?;
        acc = acc.add(&m)?.with_prec(caps.prec);
    }
    if acc.is_zero() {
        return Ok(TameElement::pi_power(top, -1, caps.prec));
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct FuzzInstance {
    pub tower: TameField,
    pub beta: TameElement,
}

impl FuzzInstance {
    pub fn to_json(&self) -> Value {
        json!({"tower": tower_to_json(&self.tower), "beta": element_to_json(&self.beta)})
    }
}

/// Random `(tower, beta)` pairs.
pub fn corpus(seed: u64, count: usize, caps: &FuzzCaps) -> Result<Vec<FuzzInstance>> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let tower = random_tower(&mut r, caps)?;
        let beta = random_element(&mut r, &tower, caps, false)?;
        out.push(FuzzInstance { tower, beta });
    }
    Ok(out)
}

/// Simple strata `[A, n, 0, beta]` with `A` attached to `F[beta]`, which is the
/// top node; roughly one in ten is the depth-zero stratum.
pub fn strata_corpus(seed: u64, count: usize, caps: &FuzzCaps) -> Result<Vec<StratumSkeleton>> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if out.len() % 10 == 9 {
            let f = base_field(*caps.qs.choose(&mut r).unwrap())?;
            let a = r.gen_range(1..f.residue().size());
            let base = Subfield::base(&f)?;
            let order = OrderSkeleton::attached(&base, 1)?;
            out.push(StratumSkeleton::new(order, 0, &TameElement::constant(&f, a, caps.prec))?);
            continue;
        }
        let tower = random_tower(&mut r, caps)?;
        for _ in 0..40 {
            let beta = random_element(&mut r, &tower, caps, true)?;
            let Ok(gen) = Subfield::generated(std::slice::from_ref(&beta), &tower) else {
                continue;
            };
            if gen.degree() != tower.degree() {
                continue;
            }
            let order = OrderSkeleton::attached(&gen, gen.degree())?;
            if let Ok(st) = StratumSkeleton::new(order, 0, &beta) {
                out.push(st);
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_corpus() {
        let caps = FuzzCaps::default();
        let a: Vec<Value> = corpus(7, 5, &caps).unwrap().iter().map(|i| i.to_json()).collect();
        let b: Vec<Value> = corpus(7, 5, &caps).unwrap().iter().map(|i| i.to_json()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn strata_are_simple() {
        for st in strata_corpus(1, 12, &FuzzCaps::default()).unwrap() {
            assert_eq!(st.kind, crate::stratum::StratumKind::Simple);
        }
    }
}
