//! Hereditary orders, strata and filtration indices at the symbolic level.
//!
//! An order is described by its numerical invariants only: `A = M_m(D)` with
//! `N = m d`, the period constant `e_A`, and the field over which it is pure.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::minimal::{howe_factorize, Factorization};
use crate::tower::{Subfield, TameElement};
use crate::translate::YuSkeleton;
use crate::Rational;

#[derive(Clone, Debug)]
pub struct OrderSkeleton {
    pub m: u32,
    pub d: u32,
    pub e_a: u32,
    pub pure_over: Subfield,
    pub b_maximal: bool,
}

impl OrderSkeleton {
    pub fn new(m: u32, d: u32, e_a: u32, pure_over: Subfield, b_maximal: bool) -> Result<Self> {
        if m == 0 || d == 0 || e_a == 0 {
            return Err(Error::domain("order", "m, d and e_A must be positive"));
        }
        let e = pure_over.e_abs();
        if e_a % e != 0 {
            return Err(Error::domain(
                "order",
                format!("e(E/F) = {e} does not divide e_A = {e_a}"),
            ));
        }
        if e_a % d != 0 || e_a / d > m {
            return Err(Error::domain(
                "order",
                format!("e_A = {e_a} is not d times a chain period at most m = {m}"),
            ));
        }
        let n = m * d;
        if n % pure_over.degree() != 0 {
            return Err(Error::domain(
                "order",
                format!("[E:F] = {} does not divide N = {n}", pure_over.degree()),
            ));
        }
        if d == 1 && b_maximal != (e_a == e) {
            return Err(Error::domain(
                "b_maximal",
                "in the split case the centralizer order is maximal exactly when e_A = e(E/F)",
            ));
        }
        Ok(OrderSkeleton {
            m,
            d,
            e_a,
            pure_over,
            b_maximal,
        })
    }

    /// The split order attached to `E` acting on `E^{m/[E:F]}` with maximal `B`-part.
    pub fn attached(pure_over: &Subfield, m: u32) -> Result<Self> {
        let e = pure_over.e_abs();
        Self::new(m, 1, e, pure_over.clone(), true)
    }

    pub fn n_dim(&self) -> u32 {
        self.m * self.d
    }

    /// `e(B|o_E)` for the centralizer order.
    pub fn e_b(&self) -> u32 {
        self.e_a / self.pure_over.e_abs()
    }

    /// The same order regarded as pure over a smaller field.
    pub fn restrict_to(&self, field: &Subfield) -> Result<Self> {
        if !self.pure_over.contains_field(field) {
            return Err(Error::domain("not_pure", "field is not contained in the pure field"));
        }
        let b_max = if self.d == 1 {
            self.e_a == field.e_abs()
        } else {
            self.b_maximal && field == &self.pure_over
        };
        Self::new(self.m, self.d, self.e_a, field.clone(), b_max)
    }
}

/// `v_A(x) = e_A v_E(x) / e(E/F)` for `x` in the pure field.
pub fn v_order(x: &TameElement, order: &OrderSkeleton) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::domain("zero_input", "v_A of zero"));
    }
    if !order.pure_over.contains(x)? {
        return Err(Error::domain("not_pure", "element does not lie in the pure field"));
    }
    let v = x.ord()? * Rational::from(order.e_a as i64);
    if !v.is_integer() {
        return Err(Error::domain(
            "non_integral",
            format!("e_A ord(x) = {v} is not an integer"),
        ));
    }
    Ok(v.to_integer())
}

/// `k_F(beta)`, or `None` for `-infinity` when `beta` lies in `F`.
pub fn k_f(beta: &TameElement) -> Result<Option<i64>> {
    let fac = howe_factorize(beta, &Subfield::base(beta.field())?)?;
    k_f_from(&fac)
}

fn k_f_from(fac: &Factorization) -> Result<Option<i64>> {
    if fac.degenerate {
        return Ok(None);
    }
    let c0 = &fac.chunks[0];
    Ok(Some(c0.field.valuation_of(&c0.c)?))
}

/// `k_0(beta, A) = e_A k_F(beta) / e(F[beta]/F)`.
pub fn k0(beta: &TameElement, order: &OrderSkeleton) -> Result<Option<i64>> {
    if !order.pure_over.contains(beta)? {
        return Err(Error::domain("not_pure", "beta does not lie in the pure field"));
    }
    let fac = howe_factorize(beta, &Subfield::base(beta.field())?)?;
    k0_from(&fac, order)
}

fn k0_from(fac: &Factorization, order: &OrderSkeleton) -> Result<Option<i64>> {
    let Some(kf) = k_f_from(fac)? else {
        return Ok(None);
    };
    let e = fac.chunks[0].field.e_abs() as i64;
    let num = order.e_a as i64 * kf;
    if num % e != 0 {
        return Err(Error::domain(
            "non_integral",
            format!("e_A k_F / e = {num}/{e} is not an integer"),
        ));
    }
    Ok(Some(num / e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StratumKind {
    Simple,
    Pure,
    Null,
}

impl StratumKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StratumKind::Simple => "simple",
            StratumKind::Pure => "pure",
            StratumKind::Null => "null",
        }
    }
}

#[derive(Clone, Debug)]
pub struct StratumSkeleton {
    pub order: OrderSkeleton,
    pub n: i64,
    pub r: i64,
    pub beta: TameElement,
    pub fac: Factorization,
    pub kind: StratumKind,
}

impl StratumSkeleton {
    /// `[A, n, r, beta]` with `n = -v_A(beta)`; `order` must be pure over `F[beta]`.
    pub fn new(order: OrderSkeleton, r: i64, beta: &TameElement) -> Result<Self> {
        let amb = order.pure_over.ambient().clone();
        let beta = beta.coerce(&amb)?;
        let base = Subfield::base(&amb)?;
        let fac = howe_factorize(&beta, &base)?;
        if fac.chunks[0].field != order.pure_over {
            return Err(Error::domain("pure_field", "the order is not pure over F[beta]"));
        }
        let n = -v_order(&beta, &order)?;
        if n < 0 || r < 0 {
            return Err(Error::domain("stratum", format!("need 0 <= r and 0 <= n, got n = {n}, r = {r}")));
        }
        if r > n {
            return Err(Error::domain("stratum", format!("r = {r} exceeds n = {n}")));
        }
        let kind = if n == 0 && r == 0 && fac.degenerate {
            StratumKind::Simple
        } else if r == n {
            StratumKind::Null
        } else {
            match k0_from(&fac, &order)? {
                None => StratumKind::Simple,
                Some(k) if r < -k => StratumKind::Simple,
                Some(_) => StratumKind::Pure,
            }
        };
        Ok(StratumSkeleton {
            order,
            n,
            r,
            beta,
            fac,
            kind,
        })
    }

    pub fn is_depth_zero(&self) -> bool {
        self.n == 0 && self.fac.degenerate
    }
}

/// The strata `[A, n, r_i, beta_i]` with `r_{i+1} = -k_0(beta_i, A)`.
pub fn defining_sequence(stratum: &StratumSkeleton) -> Result<Vec<StratumSkeleton>> {
    if stratum.kind != StratumKind::Simple {
        return Err(Error::domain("not_simple", "defining sequences need a simple stratum"));
    }
    let fac = &stratum.fac;
    let mut out: Vec<StratumSkeleton> = Vec::new();
    let mut r = stratum.r;
    for i in 0..fac.chunks.len() {
        let beta_i = fac.partial_sum(i)?;
        let order_i = stratum.order.restrict_to(&fac.chunks[i].field)?;
        if i > 0 {
            r = -k0(&out[i - 1].beta, &out[i - 1].order)?.ok_or_else(|| {
                Error::Internal("approximation in F before the last step".into())
            })?;
        }
        out.push(StratumSkeleton::new(order_i, r, &beta_i)?);
    }
    if let Some(clause) = check_defining_sequence(stratum, &out)? {
        return Err(Error::domain(clause, "defining sequence failed validation"));
    }
    Ok(out)
}

/// First violated clause of a claimed defining sequence, if any.
pub fn check_defining_sequence(
    stratum: &StratumSkeleton,
    seq: &[StratumSkeleton],
) -> Result<Option<&'static str>> {
    let Some(first) = seq.first() else {
        return Ok(Some("empty"));
    };
    if !first.beta.eq_to_prec(&stratum.beta) || first.r != stratum.r {
        return Ok(Some("head"));
    }
    for (i, st) in seq.iter().enumerate() {
        if st.n != stratum.n || st.order.e_a != stratum.order.e_a {
            return Ok(Some("same_order"));
        }
        if st.kind != StratumKind::Simple {
            return Ok(Some("kind"));
        }
        if i + 1 < seq.len() {
            let next = &seq[i + 1];
            let k = k0(&st.beta, &st.order)?;
            if k.map(|k| -k) != Some(next.r) {
                return Ok(Some("jump"));
            }
            if next.r <= st.r {
                return Ok(Some("increasing"));
            }
            let diff = st.beta.sub(&next.beta)?;
            if diff.is_zero() || v_order(&diff, &st.order)? < -next.r {
                return Ok(Some("equivalence"));
            }
        }
    }
    let last = seq.last().unwrap();
    if last.r >= stratum.n && !(stratum.n == 0 && last.r == 0) {
        return Ok(Some("increasing"));
    }
    let base = Subfield::base(last.beta.field())?;
    if !crate::minimal::is_minimal(&last.beta, &base)?.verdict() {
        return Ok(Some("last_minimal"));
    }
    Ok(None)
}

/// A point of `R~`: a rational depth `r` or `r+`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FiltDepth {
    pub value: Rational,
    pub plus: bool,
}

impl FiltDepth {
    pub fn at(value: Rational) -> Self {
        FiltDepth { value, plus: false }
    }
    pub fn plus(value: Rational) -> Self {
        FiltDepth { value, plus: true }
    }

    /// The exponent `k` with `g_x,depth = P^k` for a chain of period constant `e_a`.
    pub fn lattice_exponent(&self, e_a: u32) -> i64 {
        let x = self.value * Rational::from(e_a as i64);
        if self.plus {
            x.floor().to_integer() + 1
        } else {
            x.ceil().to_integer()
        }
    }

    /// Representative on the grid `(1/e_a) Z` defining the same filtration step.
    pub fn canonical(&self, e_a: u32) -> Self {
        FiltDepth::at(Rational::new(self.lattice_exponent(e_a), e_a as i64))
    }
}

impl Ord for FiltDepth {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value).then(self.plus.cmp(&other.plus))
    }
}
impl PartialOrd for FiltDepth {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FiltDepth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.value, if self.plus { "+" } else { "" })
    }
}

/// The four ways an integer argument names a filtration step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DepthMode {
    /// `P^n` at depth `n/e_A`.
    Plain,
    /// `P^{n+1}` at depth `(n/e_A)+`.
    Plus,
    /// `P^{floor((n+1)/2)}` at depth `n/(2 e_A)`.
    HalfCeil,
    /// `P^{floor(n/2)+1}` at depth `(n/(2 e_A))+`.
    HalfPlusOne,
}

impl DepthMode {
    pub const ALL: [DepthMode; 4] = [
        DepthMode::Plain,
        DepthMode::Plus,
        DepthMode::HalfCeil,
        DepthMode::HalfPlusOne,
    ];

    /// The power of the radical named by argument `n`.
    pub fn exponent(self, n: i64) -> i64 {
        match self {
            DepthMode::Plain => n,
            DepthMode::Plus => n + 1,
            DepthMode::HalfCeil => Integer::div_floor(&(n + 1), &2),
            DepthMode::HalfPlusOne => Integer::div_floor(&n, &2) + 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DepthMode::Plain => "plain",
            DepthMode::Plus => "plus",
            DepthMode::HalfCeil => "half_ceil",
            DepthMode::HalfPlusOne => "half_plus_one",
        }
    }
}

pub fn depth_of_index(n: i64, e_a: u32, mode: DepthMode) -> FiltDepth {
    let e = e_a as i64;
    match mode {
        DepthMode::Plain => FiltDepth::at(Rational::new(n, e)),
        DepthMode::Plus => FiltDepth::plus(Rational::new(n, e)),
        DepthMode::HalfCeil => FiltDepth::at(Rational::new(n, 2 * e)),
        DepthMode::HalfPlusOne => FiltDepth::plus(Rational::new(n, 2 * e)),
    }
}

pub fn index_of_depth(depth: FiltDepth, e_a: u32, mode: DepthMode) -> Result<i64> {
    let want_plus = matches!(mode, DepthMode::Plus | DepthMode::HalfPlusOne);
    if depth.plus != want_plus {
        return Err(Error::domain(
            "depth_kind",
            format!("mode {} expects a depth {} a plus", mode.name(), if want_plus { "with" } else { "without" }),
        ));
    }
    let scale = match mode {
        DepthMode::Plain | DepthMode::Plus => e_a as i64,
        DepthMode::HalfCeil | DepthMode::HalfPlusOne => 2 * e_a as i64,
    };
    let n = depth.value * Rational::from(scale);
    if !n.is_integer() {
        return Err(Error::domain(
            "jump",
            format!("{scale} * {} = {n} is not an integer, so the depth is not attained", depth.value),
        ));
    }
    Ok(n.to_integer())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExponentRule {
    /// `U(B)`.
    U0,
    /// The normalizer of the order.
    KFrak,
    /// `U^{floor(r/2)+1}`.
    FloorHalfPlusOne(i64),
    /// `U^{floor((r+1)/2)}`.
    FloorHalfCeil(i64),
    /// `U^n`.
    Power(i64),
    /// A Moy–Prasad depth.
    Depth(FiltDepth),
}

impl ExponentRule {
    pub fn depth(&self, e_a: u32) -> FiltDepth {
        match *self {
            ExponentRule::U0 | ExponentRule::KFrak => FiltDepth::at(Rational::from(0)),
            ExponentRule::FloorHalfPlusOne(r) => depth_of_index(r, e_a, DepthMode::HalfPlusOne),
            ExponentRule::FloorHalfCeil(r) => depth_of_index(r, e_a, DepthMode::HalfCeil),
            ExponentRule::Power(n) => depth_of_index(n, e_a, DepthMode::Plain),
            ExponentRule::Depth(d) => d,
        }
    }

    pub fn label(&self) -> String {
        match self {
            ExponentRule::U0 => "U0".into(),
            ExponentRule::KFrak => "K".into(),
            ExponentRule::FloorHalfPlusOne(r) => format!("floor_half_plus1({r})"),
            ExponentRule::FloorHalfCeil(r) => format!("floor_halfp1({r})"),
            ExponentRule::Power(n) => format!("U({n})"),
            ExponentRule::Depth(d) => format!("depth({d})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor {
    pub level: usize,
    pub rule: ExponentRule,
}

/// `[E_l : F]` and `e(E_l/F)` for one level of the tower.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelInfo {
    pub degree: u32,
    pub e: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    pub name: String,
    pub levels: Vec<LevelInfo>,
    pub n_dim: u32,
    pub e_a: u32,
    pub factors: Vec<Factor>,
    pub normalizer: bool,
    pub normal_form: Vec<(usize, FiltDepth)>,
}

impl GroupPresentation {
    pub fn build(
        name: &str,
        levels: Vec<LevelInfo>,
        n_dim: u32,
        e_a: u32,
        factors: Vec<Factor>,
    ) -> Result<Self> {
        for (l, info) in levels.iter().enumerate() {
            if e_a % info.e != 0 {
                return Err(Error::domain(
                    "per_level_constant",
                    format!("e(E_{l}/F) = {} does not divide e_A = {e_a}", info.e),
                ));
            }
            if n_dim % info.degree != 0 {
                return Err(Error::domain(
                    "per_level_constant",
                    format!("[E_{l}:F] = {} does not divide N = {n_dim}", info.degree),
                ));
            }
        }
        if let Some(f) = factors.iter().find(|f| f.level >= levels.len()) {
            return Err(Error::domain("level", format!("factor at missing level {}", f.level)));
        }
        let normalizer = factors.iter().any(|f| f.rule == ExponentRule::KFrak);
        let normal_form = normalize(&factors, e_a);
        Ok(GroupPresentation {
            name: name.to_string(),
            levels,
            n_dim,
            e_a,
            factors,
            normalizer,
            normal_form,
        })
    }

    /// The window `delta_j` of the complement of level `j - 1` in level `j`.
    pub fn windows(&self) -> Result<Vec<FiltDepth>> {
        (0..self.levels.len())
            .map(|j| {
                self.normal_form
                    .iter()
                    .filter(|(l, _)| *l >= j)
                    .map(|(_, d)| *d)
                    .min()
                    .ok_or_else(|| Error::domain("top_level", format!("nothing covers level {j}")))
            })
            .collect()
    }

    /// `q`-exponent of one filtration step of the level-`j` Lie algebra.
    pub fn step_weight(&self, j: usize) -> i64 {
        let n2 = (self.n_dim as i64).pow(2);
        n2 / (self.levels[j].degree as i64 * self.e_a as i64)
    }
}

// Merge equal levels, move depths to the 1/e_A grid, then drop any factor
// contained in a higher level with no larger depth.
fn normalize(factors: &[Factor], e_a: u32) -> Vec<(usize, FiltDepth)> {
    let mut merged: Vec<(usize, FiltDepth)> = Vec::new();
    for f in factors {
        let d = f.rule.depth(e_a).canonical(e_a);
        match merged.iter_mut().find(|(l, _)| *l == f.level) {
            Some(slot) => slot.1 = slot.1.min(d),
            None => merged.push((f.level, d)),
        }
    }
    merged.sort();
    let snapshot = merged.clone();
    merged.retain(|(l, d)| !snapshot.iter().any(|(l2, d2)| l2 > l && d2 <= d));
    merged
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationDiff {
    pub equal: bool,
    pub diffs: Vec<String>,
}

pub fn compare_presentations(a: &GroupPresentation, b: &GroupPresentation) -> Result<PresentationDiff> {
    if a.levels != b.levels || a.n_dim != b.n_dim || a.e_a != b.e_a {
        return Err(Error::domain("tower_mismatch", "presentations live over different towers"));
    }
    let mut diffs = Vec::new();
    if a.normalizer != b.normalizer {
        diffs.push(format!("normalizer: {} vs {}", a.normalizer, b.normalizer));
    }
    for l in 0..a.levels.len() {
        let da = a.normal_form.iter().find(|(x, _)| *x == l).map(|p| p.1);
        let db = b.normal_form.iter().find(|(x, _)| *x == l).map(|p| p.1);
        if da != db {
            let show = |d: Option<FiltDepth>| d.map_or("-".to_string(), |d| d.to_string());
            diffs.push(format!("level {l}: {} vs {}", show(da), show(db)));
        }
    }
    Ok(PresentationDiff {
        equal: diffs.is_empty(),
        diffs,
    })
}

/// `k` with `(num : den) = q^k`, from the step weights of each level.
pub fn index_card(num: &GroupPresentation, den: &GroupPresentation) -> Result<i64> {
    if num.levels != den.levels || num.n_dim != den.n_dim || num.e_a != den.e_a {
        return Err(Error::domain("tower_mismatch", "presentations live over different towers"));
    }
    if num.normalizer != den.normalizer {
        return Err(Error::domain("normalizer", "index across a normalizer factor is not finite here"));
    }
    let wn = num.windows()?;
    let wd = den.windows()?;
    let mut total = 0;
    let mut prev_weight = 0;
    for j in 0..num.levels.len() {
        let kn = wn[j].lattice_exponent(num.e_a);
        let kd = wd[j].lattice_exponent(num.e_a);
        if kd < kn {
            return Err(Error::domain(
                "non_inclusion",
                format!("level {j}: denominator window {} is larger", wd[j]),
            ));
        }
        let w = num.step_weight(j);
        total += (w - prev_weight) * (kd - kn);
        prev_weight = w;
    }
    Ok(total)
}

/// The tower levels `E_0, .., E_s [, F]` of a factorization.
pub fn levels_of(fac: &Factorization) -> Vec<Subfield> {
    let mut out: Vec<Subfield> = fac.chunks.iter().map(|c| c.field.clone()).collect();
    if !fac.last_in_base() {
        out.push(fac.base.clone());
    }
    out
}

pub fn level_info(fields: &[Subfield]) -> Vec<LevelInfo> {
    fields
        .iter()
        .map(|k| LevelInfo {
            degree: k.degree(),
            e: k.e_abs(),
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct SecherrePresentations {
    pub h1: GroupPresentation,
    pub j1: GroupPresentation,
    pub j: GroupPresentation,
    pub jhat: GroupPresentation,
}

/// `H^1`, `J^1`, `J` and `J^` as factor lists over the levels of the factorization.
pub fn presentation_secherre(stratum: &StratumSkeleton) -> Result<SecherrePresentations> {
    if !stratum.order.b_maximal {
        return Err(Error::domain("b_maximal", "the centralizer order must be maximal"));
    }
    if stratum.kind != StratumKind::Simple {
        return Err(Error::domain("not_simple", "presentations need a simple stratum"));
    }
    let seq = defining_sequence(stratum)?;
    let fields = levels_of(&stratum.fac);
    let info = level_info(&fields);
    let top = fields.len() - 1;
    let n = stratum.n;
    let mut h1 = vec![Factor {
        level: 0,
        rule: ExponentRule::FloorHalfPlusOne(0),
    }];
    let mut tail = Vec::new();
    for (i, st) in seq.iter().enumerate().skip(1) {
        h1.push(Factor {
            level: i,
            rule: ExponentRule::FloorHalfPlusOne(st.r),
        });
        tail.push(Factor {
            level: i,
            rule: ExponentRule::FloorHalfCeil(st.r),
        });
    }
    h1.push(Factor {
        level: top,
        rule: ExponentRule::FloorHalfPlusOne(n),
    });
    tail.push(Factor {
        level: top,
        rule: if stratum.is_depth_zero() {
            ExponentRule::Power(1)
        } else {
            ExponentRule::FloorHalfCeil(n)
        },
    });
    let with_head = |head: ExponentRule| {
        let mut v = vec![Factor { level: 0, rule: head }];
        v.extend(tail.iter().copied());
        v
    };
    let nd = stratum.order.n_dim();
    let e_a = stratum.order.e_a;
    Ok(SecherrePresentations {
        h1: GroupPresentation::build("H1", info.clone(), nd, e_a, h1)?,
        j1: GroupPresentation::build("J1", info.clone(), nd, e_a, with_head(ExponentRule::Power(1)))?,
        j: GroupPresentation::build("J", info.clone(), nd, e_a, with_head(ExponentRule::U0))?,
        jhat: GroupPresentation::build("Jhat", info, nd, e_a, with_head(ExponentRule::KFrak))?,
    })
}

#[derive(Clone, Debug)]
pub struct YuPresentations {
    pub k_plus: GroupPresentation,
    pub k_circ: GroupPresentation,
    pub k: GroupPresentation,
}

/// `K_+^d`, `K°^d` and `K^d` with `s_i = r_i / 2`.
pub fn presentation_yu(yu: &YuSkeleton) -> Result<YuPresentations> {
    yu.validate_shape()?;
    let info = level_info(&yu.fields);
    let zero = Rational::from(0);
    let mut plus = vec![Factor {
        level: 0,
        rule: ExponentRule::Depth(FiltDepth::plus(zero)),
    }];
    let mut circ = vec![Factor {
        level: 0,
        rule: ExponentRule::Depth(FiltDepth::at(zero)),
    }];
    for i in 1..=yu.d {
        let s = yu.depths[i - 1] / Rational::from(2);
        plus.push(Factor {
            level: i,
            rule: ExponentRule::Depth(FiltDepth::plus(s)),
        });
        circ.push(Factor {
            level: i,
            rule: ExponentRule::Depth(FiltDepth::at(s)),
        });
    }
    let mut full = circ.clone();
    full.push(Factor {
        level: 0,
        rule: ExponentRule::KFrak,
    });
    Ok(YuPresentations {
        k_plus: GroupPresentation::build("K+", info.clone(), yu.n_dim, yu.e_a, plus)?,
        k_circ: GroupPresentation::build("K0", info.clone(), yu.n_dim, yu.e_a, circ)?,
        k: GroupPresentation::build("K", info, yu.n_dim, yu.e_a, full)?,
    })
}

/// `sum_i log_q (J^i : J^i_+)` read off the Yu depths.
pub fn yu_jump_indices(yu: &YuSkeleton) -> Result<Vec<i64>> {
    let pres = presentation_yu(yu)?;
    let p = &pres.k_plus;
    let mut out = Vec::new();
    for i in 1..=yu.d {
        let s = yu.depths[i - 1] / Rational::from(2);
        let steps = |d: FiltDepth| FiltDepth::plus(d.value).lattice_exponent(p.e_a) - d.lattice_exponent(p.e_a);
        let k = steps(FiltDepth::at(s));
        out.push((p.step_weight(i) - p.step_weight(i - 1)) * k);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{base_field, extend, TameField};

    fn running() -> (TameField, StratumSkeleton) {
        let e = extend(&base_field(3).unwrap(), 1, 2, 1).unwrap();
        let whole = Subfield::of_node(&e, &e).unwrap();
        let beta = TameElement::new(&e, [(-4, 1), (-1, 1)], 64);
        let order = OrderSkeleton::attached(&whole, 2).unwrap();
        let st = StratumSkeleton::new(order, 0, &beta).unwrap();
        (e, st)
    }

    #[test]
    fn running_example_sequence() {
        let (_, st) = running();
        assert_eq!(st.n, 4);
        assert_eq!(st.kind, StratumKind::Simple);
        let seq = defining_sequence(&st).unwrap();
        assert_eq!(seq.len(), 2);
        assert_eq!(seq[1].r, 1);
    }

    #[test]
    fn k_values() {
        let (e, _) = running();
        let beta = TameElement::new(&e, [(-4, 1), (-1, 1)], 64);
        assert_eq!(k_f(&beta).unwrap(), Some(-1));
        assert_eq!(k_f(&TameElement::t_power(&e, -1, 64)).unwrap(), None);
        assert_eq!(k_f(&TameElement::pi_power(&e, -3, 64)).unwrap(), Some(-3));
    }

    #[test]
    fn half_mode_example() {
        assert_eq!(DepthMode::HalfCeil.exponent(3), 2);
        assert_eq!(
            depth_of_index(3, 2, DepthMode::HalfCeil),
            FiltDepth::at(Rational::new(3, 4))
        );
        let err = index_of_depth(FiltDepth::at(Rational::new(1, 3)), 2, DepthMode::Plain).unwrap_err();
        assert_eq!(err.clause(), "jump");
    }

    #[test]
    fn u1_over_u2_in_m2() {
        let info = vec![LevelInfo { degree: 1, e: 1 }];
        let a = GroupPresentation::build("U1", info.clone(), 2, 1, vec![Factor { level: 0, rule: ExponentRule::Power(1) }]).unwrap();
        let b = GroupPresentation::build("U2", info, 2, 1, vec![Factor { level: 0, rule: ExponentRule::Power(2) }]).unwrap();
        assert_eq!(index_card(&a, &b).unwrap(), 4);
        assert_eq!(index_card(&a, &a).unwrap(), 0);
    }
}
