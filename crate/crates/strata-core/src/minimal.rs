//! Minimality, genericity and Howe factorization.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::tower::{Subfield, TameElement, TameField};
use crate::Rational;

#[derive(Clone, Debug)]
pub struct MinimalityReport {
    pub element: TameElement,
    pub base: Subfield,
    /// `base[c]`.
    pub field: Subfield,
    pub in_base: bool,
    pub crit1_classical: bool,
    pub crit2_sr_generates: bool,
    pub crit3_embedding_ord: bool,
    /// An embedding pair violating the third criterion.
    pub witness: Option<(usize, usize)>,
}

impl MinimalityReport {
    pub fn agree(&self) -> bool {
        self.crit1_classical == self.crit2_sr_generates
            && self.crit2_sr_generates == self.crit3_embedding_ord
    }

    pub fn verdict(&self) -> bool {
        self.crit1_classical && self.crit2_sr_generates && self.crit3_embedding_ord
    }
}

/// Evaluate the three criteria without insisting that they agree.
pub fn minimality_report(c: &TameElement, base: &Subfield) -> Result<MinimalityReport> {
    let amb = base.ambient();
    let c = c.coerce(amb)?;
    if c.is_zero() {
        return Err(Error::domain("zero_input", "minimality of an element zero to precision"));
    }
    if base.contains(&c)? {
        return Ok(MinimalityReport {
            element: c,
            base: base.clone(),
            field: base.clone(),
            in_base: true,
            crit1_classical: true,
            crit2_sr_generates: true,
            crit3_embedding_ord: true,
            witness: None,
        });
    }
    let field = base.with_generator(&c)?;
    let crit1 = classical_criterion(&c, base, &field)?;
    let crit2 = base.with_generator(&c.sr()?)? == field;
    let (crit3, witness) = embedding_criterion(&c, base)?;
    Ok(MinimalityReport {
        element: c,
        base: base.clone(),
        field,
        in_base: false,
        crit1_classical: crit1,
        crit2_sr_generates: crit2,
        crit3_embedding_ord: crit3,
        witness,
    })
}

/// Minimality over `base`; disagreement between the criteria is an error.
pub fn is_minimal(c: &TameElement, base: &Subfield) -> Result<MinimalityReport> {
    let r = minimality_report(c, base)?;
    if !r.agree() {
        return Err(Error::Internal(format!(
            "minimality criteria disagree: classical={} sr={} embedding={}",
            r.crit1_classical, r.crit2_sr_generates, r.crit3_embedding_ord
        )));
    }
    Ok(r)
}

/// Minimality over a tower node below the owner.
pub fn is_minimal_over_node(c: &TameElement, node: &TameField) -> Result<MinimalityReport> {
    is_minimal(c, &Subfield::of_node(node, c.field())?)
}

// gcd(v_E(c), e(E/K)) = 1 and the residue of c^e / y generates k_E over k_K,
// where y is a single-digit element of K with the valuation of c^e.
fn classical_criterion(c: &TameElement, base: &Subfield, field: &Subfield) -> Result<bool> {
    let e = (field.e_abs() / base.e_abs()) as i64;
    let v = field.valuation_of(c)?;
    if v.gcd(&e) != 1 {
        return Ok(false);
    }
    let (vn, lead) = c.lead().unwrap();
    let m = e * vn;
    let b = base
        .fixed_digit(m)?
        .ok_or_else(|| Error::Internal("base has no element of the required valuation".into()))?;
    let k = base.ambient().residue();
    let ubar = k.div(k.pow(lead, e), b).unwrap();
    let fk = base.f_abs();
    let fe = field.f_abs();
    let f0 = base.ambient().f0() as i64;
    let mut d = 1;
    while k.frob(ubar, f0 * (fk * d) as i64) != ubar {
        d += 1;
    }
    Ok(fk * d == fe)
}

fn embedding_criterion(c: &TameElement, base: &Subfield) -> Result<(bool, Option<(usize, usize)>)> {
    let amb = base.ambient();
    let embs = amb.embeddings()?;
    let ord_c = c.ord()?;
    let base_imgs: Vec<Vec<TameElement>> = embs
        .iter()
        .map(|s| base.generators().iter().map(|g| s.apply(g)).collect())
        .collect::<Result<_>>()?;
    let c_imgs: Vec<TameElement> = embs.iter().map(|s| s.apply(c)).collect::<Result<_>>()?;
    for i in 0..embs.len() {
        for j in i + 1..embs.len() {
            let same_base = base_imgs[i]
                .iter()
                .zip(&base_imgs[j])
                .all(|(a, b)| a.eq_to_prec(b));
            if !same_base || c_imgs[i].eq_to_prec(&c_imgs[j]) {
                continue;
            }
            let d = c_imgs[i].sub(&c_imgs[j])?;
            if d.ord()? != ord_c {
                return Ok((false, Some((i, j))));
            }
        }
    }
    Ok((true, None))
}

#[derive(Clone, Debug)]
pub struct GenericityReport {
    pub element: TameElement,
    pub upper: Subfield,
    pub lower: Subfield,
    /// `r = -ord(c)`.
    pub depth: Rational,
    pub verdict: bool,
    /// Relative minimality, computed independently.
    pub minimal: bool,
    /// `(i, j, ord(sigma_i c - sigma_j c))` over pairs agreeing on the lower field
    /// and distinct on the upper one.
    pub table: Vec<(usize, usize, Option<Rational>)>,
}

/// Genericity of `c` in `upper` relative to `lower`, checked on embedding pairs.
pub fn is_generic(c: &TameElement, upper: &Subfield, lower: &Subfield) -> Result<GenericityReport> {
    let amb = upper.ambient();
    if lower.ambient() != amb {
        return Err(Error::domain("tower_mismatch", "fields live in different ambients"));
    }
    let c = c.coerce(amb)?;
    if !upper.contains(&c)? {
        return Err(Error::domain("not_in_field", "c does not lie in the upper field"));
    }
    if !upper.contains_field(lower) {
        return Err(Error::domain("not_nested", "lower field is not contained in the upper one"));
    }
    let depth = -c.ord()?;
    let embs = amb.embeddings()?;
    let imgs = |gens: &[TameElement]| -> Result<Vec<Vec<TameElement>>> {
        embs.iter()
            .map(|s| gens.iter().map(|g| s.apply(g)).collect())
            .collect()
    };
    let lo = imgs(lower.generators())?;
    let up = imgs(upper.generators())?;
    let ci: Vec<TameElement> = embs.iter().map(|s| s.apply(&c)).collect::<Result<_>>()?;
    let agree = |a: &[TameElement], b: &[TameElement]| a.iter().zip(b).all(|(x, y)| x.eq_to_prec(y));
    let mut table = Vec::new();
    let mut verdict = true;
    for i in 0..embs.len() {
        for j in i + 1..embs.len() {
            if !agree(&lo[i], &lo[j]) || agree(&up[i], &up[j]) {
                continue;
            }
            let d = ci[i].sub(&ci[j])?;
            let o = d.valuation().map(|_| d.ord()).transpose()?;
            if o != Some(-depth) {
                verdict = false;
            }
            table.push((i, j, o));
        }
    }
    let minimal = if upper == lower {
        true
    } else {
        lower.with_generator(&c)? == *upper && is_minimal(&c, lower)?.verdict()
    };
    if minimal != verdict {
        return Err(Error::Internal(format!(
            "genericity ({verdict}) and relative minimality ({minimal}) disagree"
        )));
    }
    Ok(GenericityReport {
        element: c,
        upper: upper.clone(),
        lower: lower.clone(),
        depth,
        verdict,
        minimal,
        table,
    })
}

#[derive(Clone, Debug)]
pub struct Chunk {
    pub c: TameElement,
    pub field: Subfield,
    pub field_degree: u32,
    pub ord: Rational,
}

impl Chunk {
    pub fn new(c: TameElement, field: Subfield) -> Result<Self> {
        let ord = c.ord()?;
        Ok(Chunk {
            field_degree: field.degree(),
            c,
            field,
            ord,
        })
    }
}

/// Chunks `c_0, .., c_s` with `beta = sum c_i`; `c_0` is the finest tail in
/// `E_0 = base[beta]`, `c_s` the leading chunk in the smallest field.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub beta: TameElement,
    pub base: Subfield,
    pub chunks: Vec<Chunk>,
    /// `beta` lies in the base.
    pub degenerate: bool,
}

impl Factorization {
    pub fn s(&self) -> usize {
        self.chunks.len() - 1
    }

    /// `beta_i = sum_{j >= i} c_j`.
    pub fn partial_sum(&self, i: usize) -> Result<TameElement> {
        let mut acc = TameElement::zero(self.beta.field(), self.beta.prec());
        for ch in &self.chunks[i..] {
            acc = acc.add(&ch.c)?;
        }
        Ok(acc)
    }

    pub fn fields(&self) -> Vec<&Subfield> {
        self.chunks.iter().map(|c| &c.field).collect()
    }

    /// Whether the last approximation `beta_s` lies in the base.
    pub fn last_in_base(&self) -> bool {
        self.chunks.last().unwrap().field == self.base
    }
}

/// Digit-scan factorization; the result is certified before returning.
pub fn howe_factorize(beta: &TameElement, base: &Subfield) -> Result<Factorization> {
    let amb = base.ambient();
    let beta = beta.coerce(amb)?;
    if beta.is_zero() {
        return Err(Error::domain("zero_input", "cannot factorize zero"));
    }
    let fac = if base.contains(&beta)? {
        Factorization {
            chunks: vec![Chunk::new(beta.clone(), base.clone())?],
            beta,
            base: base.clone(),
            degenerate: true,
        }
    } else {
        let prec = beta.prec();
        let mut k = base.clone();
        let mut current: Vec<(i64, u32)> = Vec::new();
        let mut scanned: Vec<(Vec<(i64, u32)>, Subfield)> = Vec::new();
        for (&v, &a) in beta.digits() {
            let d = TameElement::monomial(amb, a, v, prec);
            if !k.contains(&d)? {
                if !current.is_empty() {
                    scanned.push((std::mem::take(&mut current), k.clone()));
                }
                k = k.with_generator(&d)?;
            }
            current.push((v, a));
        }
        scanned.push((current, k));
        scanned.reverse();
        let chunks = scanned
            .into_iter()
            .map(|(ds, f)| Chunk::new(TameElement::new(amb, ds, prec), f))
            .collect::<Result<_>>()?;
        Factorization {
            beta,
            base: base.clone(),
            chunks,
            degenerate: false,
        }
    };
    let report = check_factorization(&fac)?;
    if let Some(clause) = report.clause {
        return Err(Error::Internal(format!(
            "digit scan produced an invalid factorization ({clause}): {}",
            report.detail
        )));
    }
    Ok(fac)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidityReport {
    pub clause: Option<String>,
    pub detail: String,
}

impl ValidityReport {
    pub fn valid(&self) -> bool {
        self.clause.is_none()
    }
    fn fail(clause: &str, detail: impl Into<String>) -> Self {
        ValidityReport {
            clause: Some(clause.to_string()),
            detail: detail.into(),
        }
    }
}

/// Re-verify every factorization invariant; reports the first violated clause.
pub fn check_factorization(fac: &Factorization) -> Result<ValidityReport> {
    let amb = fac.base.ambient();
    let chunks = &fac.chunks;
    if chunks.is_empty() {
        return Ok(ValidityReport::fail("nonzero_chunk", "no chunks"));
    }
    if fac.beta.field() != amb
        || chunks.iter().any(|c| c.c.field() != amb || c.field.ambient() != amb)
    {
        return Ok(ValidityReport::fail("ambient", "chunk outside the ambient field"));
    }
    if let Some(i) = chunks.iter().position(|c| c.c.is_zero()) {
        return Ok(ValidityReport::fail("nonzero_chunk", format!("chunk {i} is zero")));
    }
    if !fac.partial_sum(0)?.eq_to_prec(&fac.beta) {
        return Ok(ValidityReport::fail("sum", "chunks do not sum to beta"));
    }
    for (i, c) in chunks.iter().enumerate() {
        if c.c.ord()? != c.ord {
            return Ok(ValidityReport::fail("declared_ord", format!("chunk {i}")));
        }
        if c.field_degree != c.field.degree() {
            return Ok(ValidityReport::fail("declared_degree", format!("chunk {i}")));
        }
    }
    for i in 0..chunks.len() - 1 {
        if chunks[i].ord <= chunks[i + 1].ord {
            return Ok(ValidityReport::fail(
                "ord_decrease",
                format!("ord(c_{i}) <= ord(c_{})", i + 1),
            ));
        }
    }
    if chunks.last().unwrap().ord != fac.beta.ord()? {
        return Ok(ValidityReport::fail("ord_decrease", "ord(c_s) != ord(beta)"));
    }
    let in_base = fac.base.contains(&fac.beta)?;
    if in_base != fac.degenerate
        || (in_base && (chunks.len() != 1 || chunks[0].field != fac.base))
    {
        return Ok(ValidityReport::fail("degenerate", "base-element flag or shape is wrong"));
    }
    for i in 0..chunks.len() {
        let below = chunks.get(i + 1).map(|c| &c.field).unwrap_or(&fac.base);
        let strict = i + 1 < chunks.len();
        let ok = chunks[i].field.contains_field(below)
            && (!strict || chunks[i].field.degree() > below.degree());
        if !ok {
            return Ok(ValidityReport::fail(
                "field_growth",
                format!("E_{} is not a proper extension of the next field", i),
            ));
        }
    }
    for i in 0..chunks.len() {
        let below = chunks.get(i + 1).map(|c| &c.field).unwrap_or(&fac.base);
        if below.with_generator(&chunks[i].c)? != chunks[i].field {
            return Ok(ValidityReport::fail(
                "field_generation",
                format!("E_{i} is not generated by c_{i} over the next field"),
            ));
        }
    }
    for i in 0..chunks.len() {
        let below = chunks.get(i + 1).map(|c| &c.field).unwrap_or(&fac.base);
        let rep = minimality_report(&chunks[i].c, below)?;
        if !rep.agree() {
            return Err(Error::Internal(format!("minimality criteria disagree on chunk {i}")));
        }
        if !rep.verdict() {
            return Ok(ValidityReport::fail(
                "chunk_minimal",
                format!("c_{i} is not minimal over the next field"),
            ));
        }
    }
    for i in 0..chunks.len() {
        let bi = fac.partial_sum(i)?;
        if fac.base.with_generator(&bi)? != chunks[i].field {
            return Ok(ValidityReport::fail(
                "partial_field",
                format!("base[beta_{i}] differs from E_{i}"),
            ));
        }
        if i + 1 < chunks.len() {
            let jump = bi.sub(&fac.partial_sum(i + 1)?)?.ord()?;
            if jump != chunks[i].ord {
                return Ok(ValidityReport::fail("jump", format!("level {i}")));
            }
        }
    }
    Ok(ValidityReport {
        clause: None,
        detail: String::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{base_field, extend};

    fn setup() -> (TameField, Subfield) {
        let e = extend(&base_field(3).unwrap(), 1, 2, 1).unwrap();
        let f = Subfield::base(&e).unwrap();
        (e, f)
    }

    #[test]
    fn running_example_chunks() {
        let (e, f) = setup();
        let beta = TameElement::new(&e, [(-4, 1), (-1, 1)], 64);
        let fac = howe_factorize(&beta, &f).unwrap();
        assert_eq!(fac.chunks.len(), 2);
        assert_eq!(fac.chunks[0].ord, Rational::new(-1, 2));
        assert_eq!(fac.chunks[1].ord, Rational::from(-2));
        assert_eq!(fac.chunks[1].field.degree(), 1);
        assert_eq!(fac.chunks[0].field.degree(), 2);
    }

    #[test]
    fn odd_power_is_minimal() {
        let (e, f) = setup();
        let c = TameElement::pi_power(&e, -3, 64);
        let r = is_minimal(&c, &f).unwrap();
        assert!(r.verdict() && !r.in_base);
    }

    #[test]
    fn mixed_element_not_minimal() {
        let (e, f) = setup();
        let c = TameElement::new(&e, [(-2, 1), (-1, 1)], 64);
        let r = is_minimal(&c, &f).unwrap();
        assert!(!r.verdict());
        assert_eq!(r.field.degree(), 2);
    }

    #[test]
    fn generic_uniformizer_inverse() {
        let (e, f) = setup();
        let whole = Subfield::of_node(&e, &e).unwrap();
        let c = TameElement::pi_power(&e, -1, 64);
        let g = is_generic(&c, &whole, &f).unwrap();
        assert!(g.verdict);
        assert_eq!(g.depth, Rational::new(1, 2));
        let c = TameElement::pi_power(&e, -2, 64);
        assert!(!is_generic(&c, &whole, &f).unwrap().verdict);
    }
}
