//! Towers of tame extensions of `F = F_q((t))`.
//!
//! A node `E` is `k_E((pi_E))` with `pi_E^{e_rel} * twist = pi_parent`, so every
//! element is a Laurent series in `pi_E` with constant digits in `k_E`, and
//! `t = u_E * pi_E^{e_abs}` for a constant `u_E`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::residue::{make_field, FieldRef, FqElem, FqEmbedding, FIELD_CAP};
use crate::Rational;

pub const DEFAULT_PREC: i64 = 64;
pub const PREC_ENV: &str = "STRATA_KIT_PREC";

/// Working precision: `STRATA_KIT_PREC` if set and sane, else 64.
pub fn default_prec() -> i64 {
    std::env::var(PREC_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .filter(|&p| p >= 8)
        .unwrap_or(DEFAULT_PREC)
}

struct Node {
    parent: Option<TameField>,
    level: usize,
    p: u32,
    f0: u32,
    f_rel: u32,
    e_rel: u32,
    twist: u32,
    f_abs: u32,
    e_abs: u32,
    residue: FieldRef,
    from_parent: Vec<u32>,
    unit: u32,
    path: Vec<(u32, u32, u32)>,
    split: OnceLock<std::result::Result<Arc<Splitting>, Error>>,
}

#[derive(Clone)]
pub struct TameField(Arc<Node>);

impl PartialEq for TameField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.f0 == other.0.f0 && self.0.path == other.0.path)
    }
}
impl Eq for TameField {}

impl fmt::Debug for TameField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TameField(q={}, levels={:?})", self.q(), self.0.path)
    }
}

/// The base node `F_q((t))`.
pub fn base_field(q: u64) -> Result<TameField> {
    let (p, f0) = prime_power(q)
        .ok_or_else(|| Error::domain("prime_power", format!("{q} is not a prime power")))?;
    let residue = make_field(p, f0)?;
    Ok(TameField(Arc::new(Node {
        parent: None,
        level: 0,
        p,
        f0,
        f_rel: 1,
        e_rel: 1,
        twist: 1,
        f_abs: 1,
        e_abs: 1,
        residue,
        from_parent: Vec::new(),
        unit: 1,
        path: Vec::new(),
        split: OnceLock::new(),
    })))
}

pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 || q > FIELD_CAP {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut r = q;
    let mut f = 0;
    while r % p == 0 {
        r /= p;
        f += 1;
    }
    (r == 1).then_some((p as u32, f))
}

/// Adjoin a tame layer with `pi^{e_rel} * twist = pi_parent`.
pub fn extend(parent: &TameField, f_rel: u32, e_rel: u32, twist: u32) -> Result<TameField> {
    if f_rel < 1 || e_rel < 1 {
        return Err(Error::domain("degree", "f and e must be positive"));
    }
    let par = &parent.0;
    if e_rel % par.p == 0 {
        return Err(Error::domain(
            "wild_ramification",
            format!("p = {} divides e = {}", par.p, e_rel),
        ));
    }
    let f_abs = par.f_abs * f_rel;
    let residue = make_field(par.p, par.f0 * f_abs)?;
    if twist == 0 || twist >= residue.size() {
        return Err(Error::domain(
            "twist",
            "twist must be a nonzero element of the new residue field",
        ));
    }
    let from_parent = FqEmbedding::new(&par.residue, &residue)?.table();
    let unit = residue.mul(
        from_parent[par.unit as usize],
        residue.pow(twist, par.e_abs as i64),
    );
    let mut path = par.path.clone();
    path.push((f_rel, e_rel, twist));
    Ok(TameField(Arc::new(Node {
        parent: Some(parent.clone()),
        level: par.level + 1,
        p: par.p,
        f0: par.f0,
        f_rel,
        e_rel,
        twist,
        f_abs,
        e_abs: par.e_abs * e_rel,
        residue,
        from_parent,
        unit,
        path,
        split: OnceLock::new(),
    })))
}

impl TameField {
    pub fn p(&self) -> u32 {
        self.0.p
    }
    pub fn q(&self) -> u64 {
        (self.0.p as u64).pow(self.0.f0)
    }
    pub fn f0(&self) -> u32 {
        self.0.f0
    }
    pub fn level(&self) -> usize {
        self.0.level
    }
    pub fn f_rel(&self) -> u32 {
        self.0.f_rel
    }
    pub fn e_rel(&self) -> u32 {
        self.0.e_rel
    }
    pub fn twist(&self) -> u32 {
        self.0.twist
    }
    pub fn f_abs(&self) -> u32 {
        self.0.f_abs
    }
    pub fn e_abs(&self) -> u32 {
        self.0.e_abs
    }
    pub fn degree(&self) -> u32 {
        self.0.f_abs * self.0.e_abs
    }
    pub fn residue(&self) -> &FieldRef {
        &self.0.residue
    }
    pub fn parent(&self) -> Option<&TameField> {
        self.0.parent.as_ref()
    }
    pub fn is_base(&self) -> bool {
        self.0.parent.is_none()
    }
    /// The constant `u` with `t = u * pi^{e_abs}`.
    pub fn unit(&self) -> u32 {
        self.0.unit
    }
    pub fn path(&self) -> &[(u32, u32, u32)] {
        &self.0.path
    }

    pub fn base(&self) -> TameField {
        let mut cur = self.clone();
        while let Some(p) = cur.parent().cloned() {
            cur = p;
        }
        cur
    }

    /// Nodes from the base up to and including `self`.
    pub fn chain(&self) -> Vec<TameField> {
        let mut out = vec![self.clone()];
        while let Some(p) = out.last().unwrap().parent().cloned() {
            out.push(p);
        }
        out.reverse();
        out
    }

    pub fn is_ancestor_of(&self, other: &TameField) -> bool {
        let mut cur = Some(other.clone());
        while let Some(c) = cur {
            if c == *self {
                return true;
            }
            cur = c.parent().cloned();
        }
        false
    }

    /// Residue embedding `k_self -> k_desc` along the tower, as a lookup table.
    pub fn residue_table_to(&self, desc: &TameField) -> Result<Vec<u32>> {
        let path = self.steps_to(desc)?;
        let mut table: Vec<u32> = (0..self.residue().size()).collect();
        for node in path {
            for v in table.iter_mut() {
                *v = node.0.from_parent[*v as usize];
            }
        }
        Ok(table)
    }

    fn steps_to(&self, desc: &TameField) -> Result<Vec<TameField>> {
        let mut steps = Vec::new();
        let mut cur = desc.clone();
        while cur != *self {
            steps.push(cur.clone());
            cur = cur.parent().cloned().ok_or_else(|| {
                Error::domain("not_descendant", "target field does not lie above the source")
            })?;
        }
        steps.reverse();
        Ok(steps)
    }

    pub fn splitting(&self) -> Result<Arc<Splitting>> {
        self.0
            .split
            .get_or_init(|| Splitting::compute(self).map(Arc::new))
            .clone()
    }

    pub fn splitting_field(&self) -> Result<TameField> {
        Ok(self.splitting()?.field.clone())
    }

    pub fn embeddings(&self) -> Result<Vec<Embedding>> {
        Ok(self.splitting()?.embeddings.clone())
    }
}

/// Galois-closure data: the splitting node and all `F`-embeddings into it.
pub struct Splitting {
    pub field: TameField,
    pub embeddings: Vec<Embedding>,
    table: Vec<u32>,
}

impl Splitting {
    fn compute(e_field: &TameField) -> Result<Splitting> {
        let e = e_field.e_abs() as u64;
        let f = e_field.f_abs();
        let q = e_field.q();
        let p = e_field.p();
        let mut m = 1u32;
        let (field, table) = loop {
            let size = q.checked_pow(f * m).unwrap_or(u64::MAX);
            if size > FIELD_CAP {
                return Err(Error::domain(
                    "size_cap",
                    "splitting field residue exceeds the size cap",
                ));
            }
            if (size - 1) % e == 0 {
                let k_l = make_field(p, e_field.f0() * f * m)?;
                let table = FqEmbedding::new(e_field.residue(), &k_l)?.table();
                let order = k_l.order() as i64;
                let u_log = k_l.log(table[e_field.unit() as usize]).unwrap() as i64;
                let ok = (0..f).all(|k| {
                    let qk = pow_mod(q as i64, k as i64, order);
                    let w = (u_log * (1 - qk)).rem_euclid(order);
                    w % e as i64 == 0
                });
                if ok {
                    let field = if m == 1 {
                        e_field.clone()
                    } else {
                        extend(e_field, m, 1, 1)?
                    };
                    break (field, table);
                }
            }
            m += 1;
        };
        let k_l = field.residue().clone();
        let order = k_l.order() as i64;
        let u_log = k_l.log(table[e_field.unit() as usize]).unwrap() as i64;
        let step = order / e as i64;
        let chain: Vec<TameField> = e_field.chain().into_iter().skip(1).collect();
        let mut level_data = Vec::new();
        for node in &chain {
            let pi = TameElement::pi_power(node, 1, 2).coerce(e_field)?;
            let (mexp, w) = pi.lead().unwrap();
            level_data.push((mexp, table[w as usize]));
        }
        let mut embeddings = Vec::new();
        for k in 0..f {
            let qk = pow_mod(q as i64, k as i64, order);
            let w = (u_log * (1 - qk)).rem_euclid(order);
            let j1 = w / e as i64;
            let mut roots: Vec<i64> = (0..e as i64).map(|i| (j1 + i * step) % order).collect();
            roots.sort_unstable();
            for j in roots {
                let xi = k_l.exp(j);
                let root_choice = level_data
                    .iter()
                    .map(|&(mexp, w)| {
                        let wk = k_l.frob(w, (e_field.f0() * k) as i64);
                        k_l.mul(k_l.div(wk, w).unwrap(), k_l.pow(xi, mexp))
                    })
                    .collect();
                embeddings.push(Embedding {
                    source: e_field.clone(),
                    target: field.clone(),
                    index: embeddings.len(),
                    frob_exp: k,
                    xi_log: j as u32,
                    xi,
                    root_choice,
                });
            }
        }
        debug_assert_eq!(embeddings.len() as u32, e_field.degree());
        Ok(Splitting {
            field,
            embeddings,
            table,
        })
    }
}

/// An `F`-embedding of a node into its splitting node.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub source: TameField,
    pub target: TameField,
    pub index: usize,
    /// Residue action `a -> a^{q^k}`.
    pub frob_exp: u32,
    /// `sigma(pi_E) = xi * pi_E`, `xi = g_L^{xi_log}`.
    pub xi_log: u32,
    pub xi: u32,
    /// `sigma(pi_i) = root_choice[i] * pi_i` for each non-base level `i`.
    pub root_choice: Vec<u32>,
}

impl Embedding {
    pub fn is_identity(&self) -> bool {
        self.frob_exp == 0 && self.xi == 1
    }

    pub fn apply(&self, x: &TameElement) -> Result<TameElement> {
        let x = x.coerce(&self.source)?;
        let split = self.source.splitting()?;
        let k_l = self.target.residue();
        let fk = (self.source.f0() * self.frob_exp) as i64;
        let digits = x
            .digits
            .iter()
            .map(|(&v, &a)| {
                let img = k_l.frob(split.table[a as usize], fk);
                (v, k_l.mul(img, k_l.pow(self.xi, v)))
            })
            .collect();
        Ok(TameElement {
            field: self.target.clone(),
            digits,
            prec: x.prec,
        })
    }
}

pub fn apply_embedding(sigma: &Embedding, x: &TameElement) -> Result<TameElement> {
    sigma.apply(x)
}

/// A finite-precision Laurent expansion `sum a_v pi^v`, `v < prec`.
#[derive(Clone)]
pub struct TameElement {
    field: TameField,
    digits: BTreeMap<i64, u32>,
    prec: i64,
}

impl PartialEq for TameElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.prec == other.prec && self.digits == other.digits
    }
}
impl Eq for TameElement {}

impl fmt::Debug for TameElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.field.residue();
        let terms: Vec<String> = self
            .digits
            .iter()
            .map(|(v, a)| format!("{:?}*pi^{}", k.decode(*a), v))
            .collect();
        write!(f, "[{}] + O(pi^{})", terms.join(" + "), self.prec)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

impl TameElement {
    pub fn new(field: &TameField, digits: impl IntoIterator<Item = (i64, u32)>, prec: i64) -> Self {
        let k = field.residue();
        let mut map = BTreeMap::new();
        for (v, a) in digits {
            if v >= prec {
                continue;
            }
            let slot = map.entry(v).or_insert(0);
            *slot = k.add(*slot, a % k.size());
        }
        map.retain(|_, a| *a != 0);
        TameElement {
            field: field.clone(),
            digits: map,
            prec,
        }
    }

    pub fn zero(field: &TameField, prec: i64) -> Self {
        Self::new(field, [], prec)
    }
    pub fn one(field: &TameField, prec: i64) -> Self {
        Self::new(field, [(0, 1)], prec)
    }
    pub fn constant(field: &TameField, a: u32, prec: i64) -> Self {
        Self::new(field, [(0, a)], prec)
    }
    pub fn monomial(field: &TameField, a: u32, v: i64, prec: i64) -> Self {
        Self::new(field, [(v, a)], prec)
    }
    pub fn pi_power(field: &TameField, k: i64, prec: i64) -> Self {
        Self::monomial(field, 1, k, prec)
    }
    /// `t^k = u^k pi^{k e_abs}`.
    pub fn t_power(field: &TameField, k: i64, prec: i64) -> Self {
        let u = field.residue().pow(field.unit(), k);
        Self::monomial(field, u, k * field.e_abs() as i64, prec)
    }

    pub fn field(&self) -> &TameField {
        &self.field
    }
    pub fn prec(&self) -> i64 {
        self.prec
    }
    pub fn digits(&self) -> &BTreeMap<i64, u32> {
        &self.digits
    }
    pub fn digit(&self, v: i64) -> u32 {
        self.digits.get(&v).copied().unwrap_or(0)
    }
    pub fn num_digits(&self) -> usize {
        self.digits.len()
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn valuation(&self) -> Option<i64> {
        self.digits.keys().next().copied()
    }

    fn val_or_prec(&self) -> i64 {
        self.valuation().unwrap_or(self.prec)
    }

    pub fn lead(&self) -> Option<(i64, u32)> {
        self.digits.iter().next().map(|(&v, &a)| (v, a))
    }

    /// Normalized order, `ord(t) = 1`.
    pub fn ord(&self) -> Result<Rational> {
        let v = self
            .valuation()
            .ok_or_else(|| Error::precision("ord of an element that is zero to precision"))?;
        Ok(Rational::new(v, self.field.e_abs() as i64))
    }

    pub fn with_prec(&self, prec: i64) -> Self {
        Self::new(&self.field, self.digits.iter().map(|(&v, &a)| (v, a)), prec.min(self.prec))
    }

    /// Agreement on every digit below the smaller precision.
    pub fn eq_to_prec(&self, other: &Self) -> bool {
        if self.field != other.field {
            return false;
        }
        let p = self.prec.min(other.prec);
        let a = self.digits.range(..p);
        let b = other.digits.range(..p);
        a.eq(b)
    }

    fn same_owner(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::domain("owner", "operands have different owners; coerce first"));
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        let k = self.field.residue();
        TameElement {
            field: self.field.clone(),
            digits: self.digits.iter().map(|(&v, &a)| (v, k.neg(a))).collect(),
            prec: self.prec,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_owner(other)?;
        let prec = self.prec.min(other.prec);
        let digits = self
            .digits
            .iter()
            .chain(other.digits.iter())
            .map(|(&v, &a)| (v, a));
        Ok(Self::new(&self.field, digits, prec))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_owner(other)?;
        let prec = (self.prec + other.val_or_prec()).min(other.prec + self.val_or_prec());
        let k = self.field.residue();
        let mut acc: BTreeMap<i64, u32> = BTreeMap::new();
        for (&v1, &a1) in &self.digits {
            for (&v2, &a2) in &other.digits {
                if v1 + v2 >= prec {
                    break;
                }
                let slot = acc.entry(v1 + v2).or_insert(0);
                *slot = k.add(*slot, k.mul(a1, a2));
            }
        }
        acc.retain(|_, a| *a != 0);
        Ok(TameElement {
            field: self.field.clone(),
            digits: acc,
            prec,
        })
    }

    pub fn inv(&self) -> Result<Self> {
        let (v, _) = self
            .lead()
            .ok_or_else(|| Error::domain("division_by_zero", "inverse of an element zero to precision"))?;
        let rel = self.prec - v;
        let k = self.field.residue();
        let n = rel.max(0) as usize;
        let a: Vec<u32> = (0..n).map(|i| self.digit(v + i as i64)).collect();
        let a0_inv = k.inv(a[0]).unwrap();
        let mut b = vec![0u32; n];
        b[0] = a0_inv;
        for i in 1..n {
            let mut s = 0;
            for j in 1..=i {
                if a[j] != 0 && b[i - j] != 0 {
                    s = k.add(s, k.mul(a[j], b[i - j]));
                }
            }
            b[i] = k.neg(k.mul(a0_inv, s));
        }
        Ok(Self::new(
            &self.field,
            b.into_iter().enumerate().map(|(i, c)| (i as i64 - v, c)),
            rel - v,
        ))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_owner(other)?;
        self.mul(&other.inv()?)
    }

    pub fn arith(&self, other: &Self, op: Op) -> Result<Self> {
        match op {
            Op::Add => self.add(other),
            Op::Sub => self.sub(other),
            Op::Mul => self.mul(other),
            Op::Div => self.div(other),
        }
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        if n == 0 {
            return Ok(Self::one(&self.field, self.prec - self.val_or_prec()));
        }
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut e = n;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.mul(&base)?,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base)?;
        }
        Ok(result.unwrap())
    }

    /// Multiply by a constant of the owner's residue field.
    pub fn scale(&self, c: u32) -> Self {
        let k = self.field.residue();
        Self::new(
            &self.field,
            self.digits.iter().map(|(&v, &a)| (v, k.mul(a, c))),
            self.prec,
        )
    }

    /// Image in a node above the owner.
    pub fn coerce(&self, target: &TameField) -> Result<Self> {
        if self.field == *target {
            return Ok(self.clone());
        }
        let steps = self.field.steps_to(target)?;
        let mut cur = self.clone();
        for node in steps {
            let k = node.residue();
            let e_rel = node.e_rel() as i64;
            let digits: Vec<(i64, u32)> = cur
                .digits
                .iter()
                .map(|(&v, &a)| {
                    let c = k.mul(node.0.from_parent[a as usize], k.pow(node.twist(), v));
                    (v * e_rel, c)
                })
                .collect();
            cur = TameElement {
                field: node.clone(),
                digits: digits.into_iter().collect(),
                prec: cur.prec.saturating_mul(e_rel),
            };
        }
        Ok(cur)
    }

    /// Standard representative: the leading term.
    pub fn sr(&self) -> Result<Self> {
        let (v, a) = self
            .lead()
            .ok_or_else(|| Error::domain("zero_input", "sr of an element zero to precision"))?;
        Ok(Self::monomial(&self.field, a, v, self.prec))
    }

    /// Whether this is a single-digit element, i.e. lies in `C_E`.
    pub fn is_monomial(&self) -> bool {
        self.digits.len() == 1
    }
}

pub fn sr(c: &TameElement) -> Result<TameElement> {
    c.sr()
}

pub fn coerce(x: &TameElement, target: &TameField) -> Result<TameElement> {
    x.coerce(target)
}

/// Bring two elements to the larger of their owners.
pub fn lift_pair(x: &TameElement, y: &TameElement) -> Result<(TameElement, TameElement)> {
    if x.field().is_ancestor_of(y.field()) {
        Ok((x.coerce(y.field())?, y.clone()))
    } else if y.field().is_ancestor_of(x.field()) {
        Ok((x.clone(), y.coerce(x.field())?))
    } else {
        Err(Error::domain("owner", "elements live in unrelated fields"))
    }
}

/// The subfield `F[S]` of a node, resolved through its embeddings.
#[derive(Clone, Debug)]
pub struct Subfield {
    ambient: TameField,
    generators: Vec<TameElement>,
    degree: u32,
    stabilizer: Vec<usize>,
    f_abs: u32,
    e_abs: u32,
}

impl PartialEq for Subfield {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.stabilizer == other.stabilizer
    }
}
impl Eq for Subfield {}

pub fn subfield_generated(gens: &[TameElement], ambient: &TameField) -> Result<Subfield> {
    Subfield::generated(gens, ambient)
}

pub fn contains(k: &Subfield, x: &TameElement) -> Result<bool> {
    k.contains(x)
}

impl Subfield {
    pub fn generated(gens: &[TameElement], ambient: &TameField) -> Result<Subfield> {
        let gens: Vec<TameElement> = gens
            .iter()
            .map(|g| g.coerce(ambient))
            .collect::<Result<_>>()?;
        if gens.iter().any(|g| g.is_zero()) {
            return Err(Error::precision(
                "generator is zero to precision; the field it generates is undetermined",
            ));
        }
        let embs = ambient.embeddings()?;
        let images: Vec<Vec<TameElement>> = embs
            .iter()
            .map(|s| gens.iter().map(|g| s.apply(g)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let mut distinct: Vec<&Vec<TameElement>> = Vec::new();
        for im in &images {
            if !distinct.iter().any(|d| tuples_equal(d, im)) {
                distinct.push(im);
            }
        }
        let stabilizer: Vec<usize> = (0..embs.len())
            .filter(|&i| tuples_equal(&images[i], &images[0]))
            .collect();
        let degree = distinct.len() as u32;
        if degree as usize * stabilizer.len() != embs.len() {
            return Err(Error::Internal(format!(
                "orbit count {} and stabilizer size {} do not multiply to {}",
                degree,
                stabilizer.len(),
                embs.len()
            )));
        }
        let f_amb = ambient.f_abs();
        let g = stabilizer
            .iter()
            .fold(f_amb, |acc, &i| num_integer::gcd(acc, embs[i].frob_exp));
        let f_rel_top = f_amb / g;
        let f_abs = f_amb / f_rel_top;
        if degree % f_abs != 0 {
            return Err(Error::Internal("residue degree does not divide field degree".into()));
        }
        Ok(Subfield {
            ambient: ambient.clone(),
            generators: gens,
            degree,
            stabilizer,
            f_abs,
            e_abs: degree / f_abs,
        })
    }

    /// The base `F` inside `ambient`.
    pub fn base(ambient: &TameField) -> Result<Subfield> {
        Self::generated(&[], ambient)
    }

    /// A tower node viewed as a subfield of a node above it.
    pub fn of_node(node: &TameField, ambient: &TameField) -> Result<Subfield> {
        let prec = 4;
        let pi = TameElement::pi_power(node, 1, prec);
        let zeta = TameElement::constant(node, node.residue().generator_idx(), prec);
        Self::generated(&[pi, zeta], ambient)
    }

    pub fn ambient(&self) -> &TameField {
        &self.ambient
    }
    pub fn generators(&self) -> &[TameElement] {
        &self.generators
    }
    pub fn degree(&self) -> u32 {
        self.degree
    }
    pub fn stabilizer(&self) -> &[usize] {
        &self.stabilizer
    }
    /// `f(K/F)`.
    pub fn f_abs(&self) -> u32 {
        self.f_abs
    }
    /// `e(K/F)`.
    pub fn e_abs(&self) -> u32 {
        self.e_abs
    }
    pub fn is_base(&self) -> bool {
        self.degree == 1
    }

    pub fn with_generator(&self, x: &TameElement) -> Result<Subfield> {
        let mut gens = self.generators.clone();
        gens.push(x.clone());
        Self::generated(&gens, &self.ambient)
    }

    pub fn contains(&self, x: &TameElement) -> Result<bool> {
        let x = x.coerce(&self.ambient)?;
        let embs = self.ambient.embeddings()?;
        let id = embs[0].apply(&x)?;
        for &i in &self.stabilizer {
            if !embs[i].apply(&x)?.eq_to_prec(&id) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn contains_field(&self, other: &Subfield) -> bool {
        self.stabilizer.iter().all(|i| other.stabilizer.contains(i))
    }

    /// Valuation normalized to this subfield, `v_K(x) = e(K/F) ord(x)`.
    pub fn valuation_of(&self, x: &TameElement) -> Result<i64> {
        let o = x.ord()? * Rational::from(self.e_abs as i64);
        if !o.is_integer() {
            return Err(Error::domain(
                "valuation",
                "element does not lie in the subfield (fractional valuation)",
            ));
        }
        Ok(o.to_integer())
    }

    /// A constant `b` with `b * pi^m` fixed by the stabilizer, if one exists.
    pub fn fixed_digit(&self, m: i64) -> Result<Option<u32>> {
        let split = self.ambient.splitting()?;
        let embs = &split.embeddings;
        let k_n = self.ambient.residue();
        let k_l = split.field.residue();
        let ml = k_l.order() as i64;
        let mn = k_n.order() as i64;
        let lambda = k_l.log(split.table[k_n.generator_idx() as usize]).unwrap() as i64;
        let q = self.ambient.q() as i64;
        let mut eqs = Vec::new();
        for &i in &self.stabilizer {
            let s = &embs[i];
            let qk = pow_mod(q, s.frob_exp as i64, ml);
            let a = (lambda * (qk - 1)).rem_euclid(ml);
            let b = (-(m % ml) * s.xi_log as i64).rem_euclid(ml);
            eqs.push((a, b));
        }
        Ok(solve_congruences(&eqs, ml).map(|j| k_n.exp(j.rem_euclid(mn))))
    }

    /// A single-digit uniformizer of the subfield.
    pub fn uniformizer(&self) -> Result<TameElement> {
        let m = (self.ambient.e_abs() / self.e_abs) as i64;
        let b = self.fixed_digit(m)?.ok_or_else(|| {
            Error::Internal("no single-digit uniformizer found in subfield".into())
        })?;
        Ok(TameElement::monomial(&self.ambient, b, m, default_prec()))
    }

    /// Size exponent of the residue field of the subfield over `F_q`.
    pub fn residue_generator(&self) -> u32 {
        let k = self.ambient.residue();
        let sub_order = (self.ambient.q() as u64).pow(self.f_abs) - 1;
        k.exp((k.order() as u64 / sub_order) as i64)
    }
}

fn tuples_equal(a: &[TameElement], b: &[TameElement]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.eq_to_prec(y))
}

pub(crate) fn pow_mod(b: i64, e: i64, m: i64) -> i64 {
    let mut r: i128 = 1 % m as i128;
    let mut b = (b as i128).rem_euclid(m as i128);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m as i128;
        }
        b = b * b % m as i128;
        e >>= 1;
    }
    r as i64
}

/// Least `j` in `[0, m)` with `a_i j = b_i (mod m)` for all `i`.
pub(crate) fn solve_congruences(eqs: &[(i64, i64)], m: i64) -> Option<i64> {
    let (mut j0, mut step): (i128, i128) = (0, 1);
    let m128 = m as i128;
    for &(a, b) in eqs {
        let a = (a as i128).rem_euclid(m128);
        let big_a = (a * step).rem_euclid(m128);
        let big_b = (b as i128 - a * j0).rem_euclid(m128);
        let g = big_a.gcd(&m128);
        if big_b % g != 0 {
            return None;
        }
        let mg = m128 / g;
        let x0 = if mg == 1 {
            0
        } else {
            let inv = mod_inverse((big_a / g).rem_euclid(mg), mg)?;
            ((big_b / g) * inv).rem_euclid(mg)
        };
        j0 = (j0 + step * x0).rem_euclid(m128);
        step = (step * mg).gcd(&m128);
        j0 = j0.rem_euclid(step);
    }
    Some(j0 as i64)
}

fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let e = a.extended_gcd(&m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m))
}

/// Constant as an `FqElem` of a node's residue field.
pub fn digit_elem(field: &TameField, a: u32) -> FqElem {
    field.residue().elem(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramified_quadratic() -> TameField {
        extend(&base_field(3).unwrap(), 1, 2, 1).unwrap()
    }

    #[test]
    fn uniformizer_relation() {
        let e = ramified_quadratic();
        let t = TameElement::t_power(&base_field(3).unwrap(), 1, 10);
        let te = t.coerce(&e).unwrap();
        let pi2 = TameElement::pi_power(&e, 2, 20);
        assert!(te.eq_to_prec(&pi2));
    }

    #[test]
    fn quartic_twist_relation() {
        let f = base_field(5).unwrap();
        let g = f.residue().generator_idx();
        let e = extend(&f, 1, 4, g).unwrap();
        let pi = TameElement::pi_power(&e, 1, 40);
        let lhs = pi.pow(4).unwrap().scale(g);
        let t = TameElement::t_power(&f, 1, 10).coerce(&e).unwrap();
        assert!(lhs.eq_to_prec(&t));
    }

    #[test]
    fn wild_is_rejected() {
        let f = base_field(3).unwrap();
        assert!(matches!(
            extend(&f, 1, 3, 1),
            Err(Error::Domain { clause, .. }) if clause == "wild_ramification"
        ));
    }

    #[test]
    fn two_embeddings_of_ramified_quadratic() {
        let e = ramified_quadratic();
        let embs = e.embeddings().unwrap();
        assert_eq!(embs.len(), 2);
        assert!(embs[0].is_identity());
        let pi = TameElement::pi_power(&e, -1, 10);
        let img = embs[1].apply(&pi).unwrap();
        assert!(img.eq_to_prec(&pi.neg()));
    }

    #[test]
    fn splitting_needs_cube_roots() {
        let f = base_field(5).unwrap();
        let e = extend(&f, 1, 3, 1).unwrap();
        assert_eq!(e.splitting_field().unwrap().f_abs(), 2);
    }

    #[test]
    fn congruence_solver() {
        assert_eq!(solve_congruences(&[(2, 4)], 10), Some(2));
        assert_eq!(solve_congruences(&[(2, 3)], 10), None);
        assert_eq!(solve_congruences(&[(0, 0), (3, 6)], 9), Some(2));
    }
}
