//! Finite fields `F_{p^f}` in a polynomial basis.
//!
//! Elements are stored as an index `sum c_i p^i` over their coordinate vector
//! `[c_0, .., c_{f-1}]`. Multiplication goes through discrete-log tables built
//! once per field; addition is coordinate-wise.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field size.
pub const FIELD_CAP: u64 = 1 << 16;

pub type FieldRef = Arc<FqField>;

pub struct FqField {
    p: u32,
    f: u32,
    size: u32,
    modulus: Vec<u32>,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.p, self.f)
    }
}

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.f == other.f
    }
}
impl Eq for FqField {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub f: u32,
    pub modulus: Vec<u32>,
    pub generator: Vec<u32>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over F_p, low degree first, no trailing zeros.

fn ptrim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn psub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let n = a.len().max(b.len());
    let mut out: Vec<u32> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    ptrim(&mut out);
    out
}

fn pmul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let mut out: Vec<u32> = out.into_iter().map(|v| v as u32).collect();
    ptrim(&mut out);
    out
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn prem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    ptrim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = (*r.last().unwrap() as u64 * lead_inv as u64 % p as u64) as u32;
        for (i, &mi) in m.iter().enumerate() {
            let t = (c as u64 * mi as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        ptrim(&mut r);
    }
    r
}

fn pgcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    ptrim(&mut a);
    ptrim(&mut b);
    while !b.is_empty() {
        let r = prem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn ppowmod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut result = vec![1];
    let mut b = prem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = prem(&pmul(&result, &b, p), m, p);
        }
        b = prem(&pmul(&b, &b, p), m, p);
        e >>= 1;
    }
    result
}

fn is_irreducible(m: &[u32], p: u32) -> bool {
    let f = m.len() - 1;
    let x = vec![0, 1];
    let mut xp = x.clone();
    for _ in 1..=f / 2 {
        xp = ppowmod(&xp, p as u64, m, p);
        let g = pgcd(m, &psub(&xp, &x, p), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Coordinate vectors of length `len` in lexicographic order, `c_0` most significant.
fn lex_vectors(p: u32, len: u32) -> impl Iterator<Item = Vec<u32>> {
    let total = (p as u64).pow(len);
    (0..total).map(move |mut k| {
        let mut v = vec![0u32; len as usize];
        for slot in v.iter_mut().rev() {
            *slot = (k % p as u64) as u32;
            k /= p as u64;
        }
        v
    })
}

impl FqField {
    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn f(&self) -> u32 {
        self.f
    }
    pub fn size(&self) -> u32 {
        self.size
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    pub fn generator_idx(&self) -> u32 {
        self.generator
    }
    pub fn order(&self) -> u32 {
        self.size - 1
    }

    pub fn encode(&self, coords: &[u32]) -> u32 {
        coords
            .iter()
            .rev()
            .fold(0u32, |acc, &c| acc * self.p + c % self.p)
    }

    pub fn decode(&self, mut idx: u32) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.f as usize);
        for _ in 0..self.f {
            v.push(idx % self.p);
            idx /= self.p;
        }
        v
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.f == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.f {
            out += ((a % self.p + b % self.p) % self.p) * scale;
            a /= self.p;
            b /= self.p;
            scale *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        let mut a = a;
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.f {
            out += ((self.p - a % self.p) % self.p) * scale;
            a /= self.p;
            scale *= self.p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] as u64 + self.log[b as usize] as u64;
        self.exp[(s % self.order() as u64) as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let l = self.log[a as usize];
        Some(self.exp[((self.order() - l) % self.order()) as usize])
    }

    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// `a^e` for any signed exponent; `0^e` is 0 for `e != 0`.
    pub fn pow(&self, a: u32, e: i64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let m = self.order() as i64;
        let l = (self.log[a as usize] as i64 * (e % m)).rem_euclid(m);
        self.exp[l as usize]
    }

    /// Discrete log to the field generator.
    pub fn log(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    pub fn exp(&self, k: i64) -> u32 {
        self.exp[k.rem_euclid(self.order() as i64) as usize]
    }

    /// `a^{p^k}`.
    pub fn frob(&self, a: u32, k: i64) -> u32 {
        if a == 0 {
            return 0;
        }
        let m = self.order() as u64;
        let kk = k.rem_euclid(self.f as i64) as u32;
        let mut e = 1u64;
        for _ in 0..kk {
            e = e * self.p as u64 % m.max(1);
        }
        self.exp[((self.log[a as usize] as u64 * e) % m) as usize]
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: u32) -> u32 {
        let l = self.log[a as usize];
        self.order() / num_integer::gcd(l, self.order())
    }

    pub fn is_prime_subfield(&self, a: u32) -> bool {
        a < self.p
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p,
            f: self.f,
            modulus: self.modulus.clone(),
            generator: self.decode(self.generator),
        }
    }

    pub fn elem(self: &Arc<Self>, idx: u32) -> FqElem {
        FqElem {
            field: Arc::clone(self),
            idx: idx % self.size,
        }
    }

    pub fn from_coords(self: &Arc<Self>, coords: &[u32]) -> Result<FqElem> {
        if coords.len() != self.f as usize {
            return Err(Error::domain(
                "coords_length",
                format!("expected {} coordinates, got {}", self.f, coords.len()),
            ));
        }
        Ok(self.elem(self.encode(coords)))
    }

    pub fn generator(self: &Arc<Self>) -> FqElem {
        self.elem(self.generator)
    }
}

/// The field of size `p^f` with lex-least monic irreducible modulus and
/// lex-least primitive element.
pub fn make_field(p: u32, f: u32) -> Result<FieldRef> {
    if !is_prime(p as u64) {
        return Err(Error::domain("prime", format!("{p} is not prime")));
    }
    if f < 1 {
        return Err(Error::domain("degree", "f must be at least 1"));
    }
    let size = (p as u64).checked_pow(f).unwrap_or(u64::MAX);
    if size > FIELD_CAP {
        return Err(Error::domain(
            "size_cap",
            format!("{p}^{f} exceeds the field size cap {FIELD_CAP}"),
        ));
    }
    let size = size as u32;
    let modulus = lex_vectors(p, f)
        .map(|mut c| {
            c.push(1);
            c
        })
        .find(|m| is_irreducible(m, p))
        .expect("an irreducible polynomial exists in every degree");
    let order = size as u64 - 1;
    let factors = prime_factors(order);
    let primitive = |g: &[u32]| -> bool {
        let mut g = g.to_vec();
        ptrim(&mut g);
        if g.is_empty() {
            return false;
        }
        factors
            .iter()
            .all(|&r| ppowmod(&g, order / r, &modulus, p) != vec![1])
    };
    let gen_coords = lex_vectors(p, f)
        .find(|c| primitive(c))
        .expect("the multiplicative group is cyclic");
    let encode = |c: &[u32]| c.iter().rev().fold(0u32, |acc, &x| acc * p + x);
    let mut exp = vec![0u32; order as usize];
    let mut log = vec![0u32; size as usize];
    let mut cur = vec![1u32];
    let mut g = gen_coords.clone();
    ptrim(&mut g);
    for i in 0..order as usize {
        let mut padded = cur.clone();
        padded.resize(f as usize, 0);
        let idx = encode(&padded);
        exp[i] = idx;
        log[idx as usize] = i as u32;
        cur = prem(&pmul(&cur, &g, p), &modulus, p);
    }
    if order == 0 {
        exp.push(1);
    }
    Ok(Arc::new(FqField {
        p,
        f,
        size,
        modulus,
        generator: encode(&gen_coords),
        exp,
        log,
    }))
}

/// A field element bound to its field.
#[derive(Clone)]
pub struct FqElem {
    field: FieldRef,
    idx: u32,
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl PartialEq for FqElem {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.idx == other.idx
    }
}
impl Eq for FqElem {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FqOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FqElem {
    pub fn field(&self) -> &FieldRef {
        &self.field
    }
    pub fn idx(&self) -> u32 {
        self.idx
    }
    pub fn coords(&self) -> Vec<u32> {
        self.field.decode(self.idx)
    }
    pub fn is_zero(&self) -> bool {
        self.idx == 0
    }

    pub fn arith(&self, other: &FqElem, op: FqOp) -> Result<FqElem> {
        if self.field != other.field {
            return Err(Error::domain("owner", "operands live in different fields"));
        }
        let k = &self.field;
        let idx = match op {
            FqOp::Add => k.add(self.idx, other.idx),
            FqOp::Sub => k.sub(self.idx, other.idx),
            FqOp::Mul => k.mul(self.idx, other.idx),
            FqOp::Div => k
                .div(self.idx, other.idx)
                .ok_or_else(|| Error::domain("division_by_zero", "division by zero"))?,
        };
        Ok(k.elem(idx))
    }

    pub fn pow(&self, e: i64) -> FqElem {
        self.field.elem(self.field.pow(self.idx, e))
    }

    pub fn frobenius(&self, k: i64) -> FqElem {
        self.field.elem(self.field.frob(self.idx, k))
    }

    pub fn embed(&self, target: &FieldRef) -> Result<FqElem> {
        let emb = FqEmbedding::new(&self.field, target)?;
        Ok(target.elem(emb.apply(self.idx)))
    }
}

pub fn frobenius(a: &FqElem, k: i64) -> FqElem {
    a.frobenius(k)
}

pub fn embed(a: &FqElem, target: &FieldRef) -> Result<FqElem> {
    a.embed(target)
}

/// A fixed ring embedding `F_{p^a} -> F_{p^b}`.
///
/// The image of the source generator is `h^j` with `h = g^((p^b-1)/(p^a-1))`
/// and `j` the least exponent for which the assignment is additive.
#[derive(Clone, Debug)]
pub struct FqEmbedding {
    source: FieldRef,
    target: FieldRef,
    basis_images: Vec<u32>,
}

impl FqEmbedding {
    pub fn new(source: &FieldRef, target: &FieldRef) -> Result<Self> {
        if source.p != target.p || target.f % source.f != 0 {
            return Err(Error::domain(
                "embed_degree",
                format!("cannot embed {:?} into {:?}", source, target),
            ));
        }
        if source.f == 1 {
            return Ok(FqEmbedding {
                source: Arc::clone(source),
                target: Arc::clone(target),
                basis_images: vec![1],
            });
        }
        if Arc::ptr_eq(source, target) || **source == **target {
            let basis_images = (0..source.f).map(|i| source.encode(&unit_vec(source.f, i))).collect();
            return Ok(FqEmbedding {
                source: Arc::clone(source),
                target: Arc::clone(target),
                basis_images,
            });
        }
        let n = (target.order() / source.order()) as i64;
        let eval = |poly: &[u32], x: u32| -> u32 {
            poly.iter()
                .rev()
                .fold(0u32, |acc, &c| target.add(target.mul(acc, x), c % target.p))
        };
        let mut best: Option<(u32, u32)> = None;
        for j in 0..source.order() {
            let cand = target.exp(n * j as i64);
            if eval(&source.modulus, cand) != 0 {
                continue;
            }
            let gimg = eval(&source.decode(source.generator), cand);
            let lj = target.log(gimg).unwrap() / n as u32;
            if best.map_or(true, |(b, _)| lj < b) {
                best = Some((lj, cand));
            }
        }
        let (_, root) = best.expect("a subfield contains every root of the modulus");
        let basis_images = (0..source.f as i64).map(|i| target.pow(root, i)).collect();
        Ok(FqEmbedding {
            source: Arc::clone(source),
            target: Arc::clone(target),
            basis_images,
        })
    }

    pub fn source(&self) -> &FieldRef {
        &self.source
    }
    pub fn target(&self) -> &FieldRef {
        &self.target
    }

    pub fn apply(&self, a: u32) -> u32 {
        let coords = self.source.decode(a);
        let t = &self.target;
        coords
            .iter()
            .zip(&self.basis_images)
            .fold(0u32, |acc, (&c, &b)| {
                let mut term = 0;
                for _ in 0..c {
                    term = t.add(term, b);
                }
                t.add(acc, term)
            })
    }

    /// Full lookup table `source idx -> target idx`.
    pub fn table(&self) -> Vec<u32> {
        (0..self.source.size).map(|a| self.apply(a)).collect()
    }
}

fn unit_vec(f: u32, i: u32) -> Vec<u32> {
    let mut v = vec![0; f as usize];
    v[i as usize] = 1;
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_three() {
        let k = make_field(3, 1).unwrap();
        assert_eq!(k.modulus(), &[0, 1]);
        assert_eq!(k.decode(k.generator_idx()), vec![2]);
        assert_eq!(k.add(2, 2), 1);
        assert_eq!(k.mul(2, 2), 1);
    }

    #[test]
    fn f4_generator_order() {
        let k = make_field(2, 2).unwrap();
        assert_eq!(k.mult_order(k.generator_idx()), 3);
    }

    #[test]
    fn f9_generator_cycle() {
        let k = make_field(3, 2).unwrap();
        let g = k.generator_idx();
        let g8 = k.pow(g, 8);
        assert_eq!(k.mul(g, g8), g);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(make_field(4, 1).is_err());
        assert!(make_field(3, 0).is_err());
        assert!(make_field(2, 17).is_err());
    }

    #[test]
    fn f4_frobenius_squares() {
        let k = make_field(2, 2).unwrap();
        let g = k.generator_idx();
        assert_eq!(k.frob(g, 1), k.mul(g, g));
    }
}
