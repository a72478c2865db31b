//! Explicit matrices and lattices over `F = F_q((t))`, split case.
//!
//! A node `E` acts on itself through the `F`-basis `zeta^a pi^b` (`a < f`,
//! `b < e`), indexed `b f + a`, with `zeta` the generator of `k_E`. The chain
//! `L_i = p_E^i` is diagonal in this basis: `L_i` has `o_F`-basis
//! `t^{ceil((i - b)/e)} zeta^a pi^b`.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::residue::FieldRef;
use crate::stratum::FiltDepth;
use crate::tower::{Subfield, TameElement, TameField};

pub const DEFAULT_CAP: usize = 6;

/// `n x n` matrix with entries in the base field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    pub n: usize,
    pub entries: Vec<TameElement>,
}

impl Mat {
    pub fn zero(base: &TameField, n: usize, prec: i64) -> Self {
        Mat {
            n,
            entries: vec![TameElement::zero(base, prec); n * n],
        }
    }

    pub fn identity(base: &TameField, n: usize, prec: i64) -> Self {
        let mut m = Self::zero(base, n, prec);
        for i in 0..n {
            m.entries[i * n + i] = TameElement::one(base, prec);
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &TameElement {
        &self.entries[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: TameElement) {
        self.entries[r * self.n + c] = x;
    }

    pub fn prec(&self) -> i64 {
        self.entries.iter().map(|x| x.prec()).min().unwrap_or(0)
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(Mat { n: self.n, entries })
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()?;
        Ok(Mat { n: self.n, entries })
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        let n = self.n;
        let base = self.entries[0].field().clone();
        let prec = self.prec().max(other.prec()) + self.min_val().abs() + other.min_val().abs();
        let mut out = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = TameElement::zero(&base, prec);
                for k in 0..n {
                    acc = acc.add(&self.get(r, k).mul(other.get(k, c))?)?;
                }
                out.push(acc);
            }
        }
        Ok(Mat { n, entries: out })
    }

    pub fn trace(&self) -> Result<TameElement> {
        let base = self.entries[0].field().clone();
        let mut acc = TameElement::zero(&base, i64::MAX / 4);
        for i in 0..self.n {
            acc = acc.add(self.get(i, i))?;
        }
        Ok(acc)
    }

    /// Smallest entry valuation, or 0 for the zero matrix.
    pub fn min_val(&self) -> i64 {
        self.entries.iter().filter_map(|x| x.valuation()).min().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }
}

/// The chain `(p_E^i)` of a node together with its coordinate tables.
pub struct Chain {
    field: TameField,
    base: TameField,
    e: usize,
    f: usize,
    kf: FieldRef,
    /// `k_E` index to coordinates over `k_F`.
    to_coords: Vec<Vec<u32>>,
    zeta_pows: Vec<u32>,
}

impl Chain {
    pub fn field(&self) -> &TameField {
        &self.field
    }
    pub fn base(&self) -> &TameField {
        &self.base
    }
    pub fn n(&self) -> usize {
        self.e * self.f
    }
    /// Period `e(A|o_F)`.
    pub fn period(&self) -> usize {
        self.e
    }
    pub fn residue_degree(&self) -> usize {
        self.f
    }
    pub fn kf(&self) -> &FieldRef {
        &self.kf
    }

    /// `b` for basis vector `b f + a`.
    pub fn deg(&self, idx: usize) -> i64 {
        (idx / self.f) as i64
    }

    /// `t`-exponent of basis vector `idx` in `L_i`.
    pub fn lattice_exp(&self, i: i64, idx: usize) -> i64 {
        let e = self.e as i64;
        num_integer::Integer::div_ceil(&(i - self.deg(idx)), &e)
    }

    /// `L_i` as a column lattice.
    pub fn lattice(&self, i: i64, frame: Frame) -> Result<MatrixLattice> {
        let n = self.n();
        let gens: Vec<SparseVec> = (0..n)
            .map(|idx| vec![(idx, self.lattice_exp(i, idx), 1u32)])
            .collect();
        MatrixLattice::from_sparse(&self.kf, frame, n, &gens)
    }

    /// Coordinates over `F` of an element of the node.
    pub fn coords(&self, x: &TameElement) -> Result<Vec<TameElement>> {
        let x = x.coerce(&self.field)?;
        let one = TameElement::one(&self.field, x.prec());
        let m = self.regular_rep(&x.mul(&one)?)?;
        Ok((0..self.n()).map(|r| m.get(r, 0).clone()).collect())
    }

    /// Multiplication by `x` in the basis `zeta^a pi^b`.
    pub fn regular_rep(&self, x: &TameElement) -> Result<Mat> {
        let x = x.coerce(&self.field)?;
        let n = self.n();
        let e = self.e as i64;
        let k = self.field.residue();
        let u = self.field.unit();
        let mut acc: Vec<BTreeMap<i64, u32>> = vec![BTreeMap::new(); n * n];
        for col in 0..n {
            let (b, a) = (col / self.f, col % self.f);
            for (&v, &xv) in x.digits() {
                let w = v + b as i64;
                let bp = w.rem_euclid(e);
                let kk = (w - bp) / e;
                let c = k.mul(k.mul(xv, self.zeta_pows[a]), k.pow(u, -kk));
                for (ap, &coord) in self.to_coords[c as usize].iter().enumerate() {
                    if coord == 0 {
                        continue;
                    }
                    let row = bp as usize * self.f + ap;
                    let slot = acc[row * n + col].entry(kk).or_insert(0);
                    *slot = self.kf.add(*slot, coord);
                }
            }
        }
        let p = x.prec();
        let entries = (0..n * n)
            .map(|i| {
                let (r, c) = (i / n, i % n);
                let br = self.deg(r);
                let bc = self.deg(c);
                let prec = num_integer::Integer::div_ceil(&(p - br + bc), &e);
                TameElement::new(&self.base, acc[i].iter().map(|(&v, &a)| (v, a)), prec)
            })
            .collect();
        Ok(Mat { n, entries })
    }

    /// Whether `a L_j` lies in `L_k`.
    pub fn maps_into(&self, a: &Mat, j: i64, k: i64) -> Result<bool> {
        let n = self.n();
        for c in 0..n {
            for r in 0..n {
                let x = a.get(r, c);
                let need = self.lattice_exp(k, r) - self.lattice_exp(j, c);
                match x.valuation() {
                    Some(v) if v < need => return Ok(false),
                    None if x.prec() < need => {
                        return Err(Error::precision("entry unknown at the needed t-power"))
                    }
                    _ => {}
                }
            }
        }
        Ok(true)
    }

    /// Membership in the hereditary order `{a : a L_i in L_i}`.
    pub fn in_order(&self, a: &Mat) -> Result<bool> {
        for j in 0..self.e as i64 {
            if !self.maps_into(a, j, j)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Largest `n` with `a L_j in L_{j+n}` for all `j`.
    pub fn v_a_direct(&self, a: &Mat) -> Result<i64> {
        let Some(w) = a.entries.iter().filter_map(|x| x.valuation()).min() else {
            return Err(Error::precision("matrix is zero to precision"));
        };
        let e = self.e as i64;
        let mut n = e * (w + 2);
        loop {
            let mut ok = true;
            for j in 0..e {
                if !self.maps_into(a, j, j + n)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(n);
            }
            n -= 1;
            if n < e * (w - 2) {
                return Err(Error::Internal("valuation scan ran past its lower bound".into()));
            }
        }
    }

    /// Minimal `t`-exponent at `(r, c)` for `a L_j in L_{target(j)}` over a period.
    pub fn pattern(&self, target: impl Fn(i64) -> i64) -> Vec<i64> {
        let n = self.n();
        let mut out = vec![i64::MIN; n * n];
        for j in 0..self.e as i64 {
            let tj = target(j);
            for r in 0..n {
                for c in 0..n {
                    let need = self.lattice_exp(tj, r) - self.lattice_exp(j, c);
                    let slot = &mut out[r * n + c];
                    *slot = (*slot).max(need);
                }
            }
        }
        out
    }

    /// `P^n = {a : a L_j in L_{j+n}}` as a monomial lattice.
    pub fn filt_lattice(&self, n: i64, frame: Frame) -> Result<MatrixLattice> {
        let pat = self.pattern(|j| j + n);
        self.monomial_lattice(&pat, frame)
    }

    /// The Moy–Prasad lattice of a depth, through the lattice function
    /// `s -> L_{ceil(e s)}`.
    pub fn depth_lattice(&self, depth: FiltDepth, frame: Frame) -> Result<MatrixLattice> {
        let target = self.mp_target(depth);
        let pat = self.pattern(target);
        self.monomial_lattice(&pat, frame)
    }

    fn mp_target(&self, depth: FiltDepth) -> impl Fn(i64) -> i64 {
        let e = self.e as i64;
        move |j| {
            let x = crate::Rational::from(j) + depth.value * crate::Rational::from(e);
            if depth.plus {
                x.floor().to_integer() + 1
            } else {
                x.ceil().to_integer()
            }
        }
    }

    fn monomial_lattice(&self, pat: &[i64], frame: Frame) -> Result<MatrixLattice> {
        let gens: Vec<SparseVec> = pat
            .iter()
            .enumerate()
            .map(|(i, &k)| vec![(i, k, 1u32)])
            .collect();
        MatrixLattice::from_sparse(&self.kf, frame, self.n() * self.n(), &gens)
    }

    /// Homogeneous coefficient matrix of multiplication by a single-digit element.
    pub fn graded_rep(&self, x: &TameElement) -> Result<GradedOp> {
        let x = x.coerce(&self.field)?;
        if !x.is_monomial() {
            return Err(Error::domain("graded", "only single-digit elements are homogeneous"));
        }
        let (delta, _) = x.lead().unwrap();
        let m = self.regular_rep(&x)?;
        let n = self.n();
        let mut coef = vec![0u32; n * n];
        for r in 0..n {
            for c in 0..n {
                if let Some(k) = self.graded_exp(r, c, delta) {
                    coef[r * n + c] = m.get(r, c).digit(k);
                }
            }
        }
        Ok(GradedOp { delta, coef })
    }

    /// The `t`-power at `(r, c)` in degree `delta`, if that position is allowed.
    pub fn graded_exp(&self, r: usize, c: usize, delta: i64) -> Option<i64> {
        let e = self.e as i64;
        let w = self.deg(c) + delta - self.deg(r);
        (w.rem_euclid(e) == 0).then_some(w / e)
    }

    /// `{X of degree delta : X g = g X for all g}` over `k_F`.
    pub fn graded_commutant(&self, gens: &[GradedOp], delta: i64) -> Vec<GradedOp> {
        let n = self.n();
        let kf = &self.kf;
        let unknowns: Vec<usize> = (0..n * n)
            .filter(|&i| self.graded_exp(i / n, i % n, delta).is_some())
            .collect();
        let mut cols: Vec<Vec<u32>> = Vec::new();
        for &pos in &unknowns {
            let mut x = vec![0u32; n * n];
            x[pos] = 1;
            let mut image = Vec::new();
            for g in gens {
                let xg = graded_mul(kf, n, &x, &g.coef);
                let gx = graded_mul(kf, n, &g.coef, &x);
                image.extend(xg.iter().zip(&gx).map(|(a, b)| kf.sub(*a, *b)));
            }
            cols.push(image);
        }
        let kernel = kernel_fq(kf, &cols);
        kernel
            .into_iter()
            .map(|v| {
                let mut coef = vec![0u32; n * n];
                for (&pos, &val) in unknowns.iter().zip(&v) {
                    coef[pos] = val;
                }
                GradedOp { delta, coef }
            })
            .collect()
    }

    /// Single-digit generators of a subfield of the node.
    pub fn field_generators(&self, sub: &Subfield) -> Result<Vec<GradedOp>> {
        if sub.ambient() != &self.field {
            return Err(Error::domain("ambient", "subfield of a different node"));
        }
        if sub.is_base() {
            return Ok(Vec::new());
        }
        let pi = sub.uniformizer()?;
        let z = TameElement::constant(&self.field, sub.residue_generator(), pi.prec());
        Ok(vec![self.graded_rep(&pi)?, self.graded_rep(&z)?])
    }

    fn graded_lattice(
        &self,
        sub: &Subfield,
        lo: i64,
        keep: impl Fn(&GradedOp) -> Result<bool>,
        frame: Frame,
    ) -> Result<MatrixLattice> {
        let gens = self.field_generators(sub)?;
        let n = self.n();
        let mut vecs: Vec<SparseVec> = Vec::new();
        for delta in lo..lo + 3 * self.e as i64 {
            for x in self.graded_commutant(&gens, delta) {
                if !keep(&x)? {
                    continue;
                }
                let mut v = Vec::new();
                for (pos, &a) in x.coef.iter().enumerate() {
                    if a != 0 {
                        let k = self.graded_exp(pos / n, pos % n, delta).unwrap();
                        v.push((pos, k, a));
                    }
                }
                vecs.push(v);
            }
        }
        MatrixLattice::from_sparse(&self.kf, frame, n * n, &vecs)
    }

    /// `B n P^k` for the centralizer `B` of `sub`, from graded kernels.
    pub fn intersect_with_centralizer(&self, sub: &Subfield, k: i64, frame: Frame) -> Result<MatrixLattice> {
        self.graded_lattice(sub, k, |_| Ok(true), frame)
    }

    /// The Moy–Prasad lattice of a depth inside the centralizer of `sub`.
    pub fn centralizer_depth_lattice(&self, sub: &Subfield, depth: FiltDepth, frame: Frame) -> Result<MatrixLattice> {
        let e = self.e as i64;
        let lo = (depth.value * crate::Rational::from(e)).floor().to_integer() - e;
        let target = self.mp_target(depth);
        let base = self.base.clone();
        self.graded_lattice(
            sub,
            lo,
            |x| {
                let m = x.to_mat(self, &base, frame.prec as i64 + 8);
                for j in 0..e {
                    if !self.maps_into(&m, j, target(j))? {
                        return Ok(false);
                    }
                }
                Ok(true)
            },
            frame,
        )
    }

    /// Product lattice `x L` for a lattice of matrices and a fixed matrix `x` on the left.
    pub fn left_multiply(&self, x: &GradedOp, lat: &MatrixLattice) -> Result<MatrixLattice> {
        let n = self.n();
        let mut vecs = Vec::new();
        for row in lat.basis_rows() {
            let mut out: BTreeMap<(usize, i64), u32> = BTreeMap::new();
            for (pos, series) in row.iter().enumerate() {
                let (m, c) = (pos / n, pos % n);
                for r in 0..n {
                    let g = x.coef[r * n + m];
                    if g == 0 {
                        continue;
                    }
                    let kx = self.graded_exp(r, m, x.delta).unwrap();
                    for (i, &s) in series.iter().enumerate() {
                        if s == 0 {
                            continue;
                        }
                        let key = (r * n + c, kx + lat.frame.shift + i as i64);
                        let slot = out.entry(key).or_insert(0);
                        *slot = self.kf.add(*slot, self.kf.mul(g, s));
                    }
                }
            }
            vecs.push(out.into_iter().map(|((p, k), a)| (p, k, a)).collect());
        }
        MatrixLattice::from_sparse(&self.kf, lat.frame, n * n, &vecs)
    }
}

/// `(position, t-exponent, coefficient)` triples.
pub type SparseVec = Vec<(usize, i64, u32)>;

/// A homogeneous operator: coefficient matrix over `k_F` and its degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedOp {
    pub delta: i64,
    pub coef: Vec<u32>,
}

impl GradedOp {
    pub fn to_mat(&self, chain: &Chain, base: &TameField, prec: i64) -> Mat {
        let n = chain.n();
        let entries = (0..n * n)
            .map(|pos| {
                let a = self.coef[pos];
                match chain.graded_exp(pos / n, pos % n, self.delta) {
                    Some(k) if a != 0 => TameElement::monomial(base, a, k, prec.max(k + 1)),
                    _ => TameElement::zero(base, prec),
                }
            })
            .collect();
        Mat { n, entries }
    }
}

fn graded_mul(k: &FieldRef, n: usize, x: &[u32], y: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; n * n];
    for r in 0..n {
        for m in 0..n {
            let a = x[r * n + m];
            if a == 0 {
                continue;
            }
            for c in 0..n {
                let b = y[m * n + c];
                if b != 0 {
                    out[r * n + c] = k.add(out[r * n + c], k.mul(a, b));
                }
            }
        }
    }
    out
}

/// Kernel of the map whose columns are `cols`, as a list of basis vectors.
fn kernel_fq(k: &FieldRef, cols: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let nvars = cols.len();
    if nvars == 0 {
        return Vec::new();
    }
    let neq = cols[0].len();
    let mut a: Vec<Vec<u32>> = (0..neq).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..nvars {
        let Some(p) = (row..neq).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(row, p);
        let inv = k.inv(a[row][col]).unwrap();
        for x in a[row].iter_mut() {
            *x = k.mul(*x, inv);
        }
        for i in 0..neq {
            if i != row && a[i][col] != 0 {
                let f = a[i][col];
                for j in 0..nvars {
                    let t = k.mul(f, a[row][j]);
                    a[i][j] = k.sub(a[i][j], t);
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == neq {
            break;
        }
    }
    let free: Vec<usize> = (0..nvars).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u32; nvars];
            v[fc] = 1;
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = k.neg(a[r][fc]);
            }
            v
        })
        .collect()
}

/// Builds the chain of a node, refusing matrix sizes above `cap`.
pub fn chain_from_field_capped(field: &TameField, cap: usize) -> Result<Chain> {
    let n = field.degree() as usize;
    if n > cap {
        return Err(Error::domain("cap", format!("[E:F] = {n} exceeds the oracle cap {cap}")));
    }
    let base = field.base();
    let kf = base.residue().clone();
    let ke = field.residue();
    let f = field.f_abs() as usize;
    let emb = base.residue_table_to(field)?;
    let zeta = ke.generator_idx();
    let zeta_pows: Vec<u32> = (0..f).map(|a| ke.pow(zeta, a as i64)).collect();
    let mut to_coords = vec![Vec::new(); ke.size() as usize];
    let q = kf.size() as u64;
    for code in 0..q.pow(f as u32) {
        let mut c = code;
        let mut coords = Vec::with_capacity(f);
        let mut val = 0u32;
        for z in &zeta_pows {
            let d = (c % q) as u32;
            c /= q;
            coords.push(d);
            val = ke.add(val, ke.mul(emb[d as usize], *z));
        }
        to_coords[val as usize] = coords;
    }
    if to_coords.iter().any(|c| c.is_empty()) {
        return Err(Error::Internal("powers of zeta do not span the residue field".into()));
    }
    Ok(Chain {
        field: field.clone(),
        base,
        e: field.e_abs() as usize,
        f,
        kf,
        to_coords,
        zeta_pows,
    })
}

pub fn chain_from_field(field: &TameField) -> Result<Chain> {
    chain_from_field_capped(field, DEFAULT_CAP)
}

pub fn regular_rep(chain: &Chain, beta: &TameElement) -> Result<Mat> {
    chain.regular_rep(beta)
}

pub fn v_a_direct(a: &Mat, chain: &Chain) -> Result<i64> {
    chain.v_a_direct(a)
}

/// Truncation window: coordinates are `t^{shift} (c_0 + c_1 t + ..)` mod `t^{prec}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frame {
    pub shift: i64,
    pub prec: usize,
}

impl Frame {
    /// `2 max|v| + 8` digits above `shift`.
    pub fn for_valuations(shift: i64, max_abs: i64) -> Self {
        Frame {
            shift,
            prec: (2 * max_abs.abs() + 8) as usize,
        }
    }
    pub fn doubled(self) -> Self {
        Frame {
            shift: self.shift,
            prec: self.prec * 2,
        }
    }
}

/// An `o_F`-lattice in `F^dim`, kept in Hermite form modulo `t^{prec}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixLattice {
    pub dim: usize,
    pub frame: Frame,
    /// Pivot `t`-exponent per coordinate, relative to the frame shift.
    pub pivots: Vec<usize>,
    rows: Vec<Vec<Vec<u32>>>,
    #[doc(hidden)]
    pub q_field: QTag,
}

/// Identifies the coefficient field without holding tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QTag(pub u32, pub u32);

impl MatrixLattice {
    pub fn from_sparse(kf: &FieldRef, frame: Frame, dim: usize, gens: &[SparseVec]) -> Result<Self> {
        let p = frame.prec;
        let mut rows = Vec::with_capacity(gens.len());
        for g in gens {
            let mut row = vec![vec![0u32; p]; dim];
            for &(pos, k, a) in g {
                let off = k - frame.shift;
                if off < 0 {
                    return Err(Error::precision("generator below the frame shift"));
                }
                if (off as usize) < p {
                    let slot = &mut row[pos][off as usize];
                    *slot = kf.add(*slot, a);
                }
            }
            rows.push(row);
        }
        Ok(Self::hermite(kf, frame, dim, rows))
    }

    pub fn from_mats(kf: &FieldRef, frame: Frame, mats: &[Mat]) -> Result<Self> {
        let dim = mats.first().map(|m| m.n * m.n).unwrap_or(0);
        let mut gens = Vec::new();
        for m in mats {
            let mut v = Vec::new();
            for (pos, x) in m.entries.iter().enumerate() {
                if x.prec() < frame.shift + frame.prec as i64 {
                    return Err(Error::precision("matrix entry known below the frame precision"));
                }
                for (&k, &a) in x.digits() {
                    v.push((pos, k, a));
                }
            }
            gens.push(v);
        }
        Self::from_sparse(kf, frame, dim, &gens)
    }

    fn hermite(kf: &FieldRef, frame: Frame, dim: usize, mut rows: Vec<Vec<Vec<u32>>>) -> Self {
        let p = frame.prec;
        let mut pivots = vec![p; dim];
        let mut basis: Vec<Vec<Vec<u32>>> = vec![vec![vec![0u32; p]; dim]; dim];
        for col in 0..dim {
            let best = rows
                .iter()
                .enumerate()
                .filter_map(|(i, r)| sval(&r[col]).map(|v| (v, i)))
                .min();
            let Some((k, i)) = best else {
                continue;
            };
            let mut prow = rows.swap_remove(i);
            let unit: Vec<u32> = shift_down(&prow[col], k);
            let inv = series_inv(kf, &unit, p);
            for s in prow.iter_mut() {
                *s = series_mul(kf, s, &inv, p);
            }
            for r in rows.iter_mut() {
                if let Some(v) = sval(&r[col]) {
                    debug_assert!(v >= k);
                    let q = shift_down(&r[col], k);
                    sub_scaled(kf, r, &q, &prow, p);
                }
            }
            pivots[col] = k;
            basis[col] = prow;
        }
        for col in 0..dim {
            let k = pivots[col];
            if k >= p {
                continue;
            }
            let prow = basis[col].clone();
            for (i, row) in basis.iter_mut().enumerate().take(col) {
                if pivots[i] >= p || sval(&row[col]).is_none_or(|v| v >= p) {
                    continue;
                }
                let q = shift_down(&row[col], k);
                if q.iter().any(|&c| c != 0) {
                    sub_scaled(kf, row, &q, &prow, p);
                }
            }
        }
        MatrixLattice {
            dim,
            frame,
            pivots,
            rows: basis,
            q_field: QTag(kf.p(), kf.f()),
        }
    }

    pub fn basis_rows(&self) -> impl Iterator<Item = &Vec<Vec<u32>>> {
        self.rows
            .iter()
            .zip(&self.pivots)
            .filter(move |(_, &k)| k < self.frame.prec)
            .map(|(r, _)| r)
    }

    fn sparse_rows(&self) -> Vec<SparseVec> {
        self.basis_rows()
            .map(|row| {
                let mut v = Vec::new();
                for (pos, s) in row.iter().enumerate() {
                    for (i, &a) in s.iter().enumerate() {
                        if a != 0 {
                            v.push((pos, self.frame.shift + i as i64, a));
                        }
                    }
                }
                v
            })
            .collect()
    }

    pub fn sum(&self, other: &MatrixLattice, kf: &FieldRef) -> Result<MatrixLattice> {
        if self.frame != other.frame || self.dim != other.dim {
            return Err(Error::domain("frame", "lattices live in different frames"));
        }
        let mut gens = self.sparse_rows();
        gens.extend(other.sparse_rows());
        Self::from_sparse(kf, self.frame, self.dim, &gens)
    }

    pub fn contains(&self, other: &MatrixLattice, kf: &FieldRef) -> Result<bool> {
        if self.frame != other.frame || self.dim != other.dim {
            return Err(Error::domain("frame", "lattices live in different frames"));
        }
        Ok(self.sum(other, kf)? == *self)
    }

    /// `k` with `[self : other] = q^k`.
    pub fn index_of(&self, other: &MatrixLattice, kf: &FieldRef) -> Result<i64> {
        if !self.contains(other, kf)? {
            return Err(Error::domain("non_inclusion", "second lattice is not contained in the first"));
        }
        let s = |l: &MatrixLattice| l.pivots.iter().map(|&k| k as i64).sum::<i64>();
        Ok(s(other) - s(self))
    }

    /// Whether any finite pivot sits within two digits of the truncation.
    pub fn near_boundary(&self) -> bool {
        self.pivots
            .iter()
            .any(|&k| k < self.frame.prec && k + 2 >= self.frame.prec)
    }

    pub fn dump(&self) -> Value {
        let rows: Vec<Value> = self
            .sparse_rows()
            .into_iter()
            .map(|v| Value::Array(v.into_iter().map(|(p, k, a)| json!([p, k, a])).collect()))
            .collect();
        json!({
            "dim": self.dim,
            "shift": self.frame.shift,
            "prec": self.frame.prec,
            "pivots": self.pivots,
            "rows": rows,
        })
    }
}

/// `[L1 : L2]` as a `q`-exponent.
pub fn lattice_index(l1: &MatrixLattice, l2: &MatrixLattice, kf: &FieldRef) -> Result<i64> {
    l1.index_of(l2, kf)
}

fn sval(s: &[u32]) -> Option<usize> {
    s.iter().position(|&c| c != 0)
}

fn shift_down(s: &[u32], k: usize) -> Vec<u32> {
    let mut out = vec![0u32; s.len()];
    out[..s.len() - k].copy_from_slice(&s[k..]);
    out
}

fn series_mul(kf: &FieldRef, a: &[u32], b: &[u32], p: usize) -> Vec<u32> {
    let mut out = vec![0u32; p];
    for (i, &x) in a.iter().enumerate().take(p) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(p - i) {
            if y != 0 {
                out[i + j] = kf.add(out[i + j], kf.mul(x, y));
            }
        }
    }
    out
}

fn series_inv(kf: &FieldRef, a: &[u32], p: usize) -> Vec<u32> {
    let a0 = kf.inv(a[0]).expect("unit series");
    let mut b = vec![0u32; p];
    b[0] = a0;
    for i in 1..p {
        let mut s = 0;
        for j in 1..=i {
            if a[j] != 0 && b[i - j] != 0 {
                s = kf.add(s, kf.mul(a[j], b[i - j]));
            }
        }
        b[i] = kf.neg(kf.mul(a0, s));
    }
    b
}

fn sub_scaled(kf: &FieldRef, row: &mut [Vec<u32>], q: &[u32], prow: &[Vec<u32>], p: usize) {
    for (s, ps) in row.iter_mut().zip(prow) {
        if ps.iter().all(|&c| c == 0) {
            continue;
        }
        let t = series_mul(kf, q, ps, p);
        for (x, y) in s.iter_mut().zip(t) {
            *x = kf.sub(*x, y);
        }
    }
}

/// `Tr_{k_F/F_p}` of the `t^0` digit of `tr(c y)`, as an exponent of `zeta_p`.
pub fn eval_psi_c(c: &Mat, y: &Mat) -> Result<u32> {
    let prod = c.mul(y)?;
    let tr = prod.trace()?;
    if tr.prec() <= 0 {
        return Err(Error::precision("trace not known at t^0"));
    }
    let kf = tr.field().residue().clone();
    let a = tr.digit(0);
    let f = kf.f();
    let mut s = 0;
    for i in 0..f {
        s = kf.add(s, kf.frob(a, i as i64));
    }
    Ok(s % kf.p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{base_field, extend};

    #[test]
    fn companion_of_ramified_quadratic() {
        let e = extend(&base_field(3).unwrap(), 1, 2, 1).unwrap();
        let ch = chain_from_field(&e).unwrap();
        let m = ch.regular_rep(&TameElement::pi_power(&e, 1, 16)).unwrap();
        let t = TameElement::t_power(&e.base(), 1, 8);
        assert!(m.get(0, 1).eq_to_prec(&t));
        assert!(m.get(1, 0).eq_to_prec(&TameElement::one(&e.base(), 8)));
        assert!(m.get(0, 0).is_zero() && m.get(1, 1).is_zero());
        assert_eq!(ch.v_a_direct(&m).unwrap(), 1);
    }

    #[test]
    fn running_example_valuation() {
        let e = extend(&base_field(3).unwrap(), 1, 2, 1).unwrap();
        let ch = chain_from_field(&e).unwrap();
        let beta = TameElement::new(&e, [(-4, 1), (-1, 1)], 32);
        assert_eq!(ch.v_a_direct(&ch.regular_rep(&beta).unwrap()).unwrap(), -4);
        let b = TameElement::pi_power(&e, -3, 32);
        assert_eq!(ch.v_a_direct(&ch.regular_rep(&b).unwrap()).unwrap(), -3);
    }

    #[test]
    fn index_of_radical_in_m2() {
        let e = extend(&base_field(3).unwrap(), 1, 2, 1).unwrap();
        let ch = chain_from_field(&e).unwrap();
        let fr = Frame::for_valuations(0, 4);
        let a0 = ch.filt_lattice(0, fr).unwrap();
        let a1 = ch.filt_lattice(1, fr).unwrap();
        assert_eq!(lattice_index(&a0, &a1, ch.kf()).unwrap(), 2);
        let l0 = ch.lattice(0, fr).unwrap();
        let l2 = ch.lattice(2, fr).unwrap();
        assert_eq!(lattice_index(&l0, &l2, ch.kf()).unwrap(), 2);
    }

    #[test]
    fn commutant_of_companion() {
        let e = extend(&base_field(3).unwrap(), 1, 2, 1).unwrap();
        let ch = chain_from_field(&e).unwrap();
        let whole = Subfield::of_node(&e, &e).unwrap();
        let fr = Frame::for_valuations(0, 4);
        let b0 = ch.intersect_with_centralizer(&whole, 0, fr).unwrap();
        assert_eq!(b0.pivots.iter().filter(|&&k| k < fr.prec).count(), 2);
        let base = Subfield::base(&e).unwrap();
        let full = ch.intersect_with_centralizer(&base, 0, fr).unwrap();
        assert_eq!(full, ch.filt_lattice(0, fr).unwrap());
    }
}
