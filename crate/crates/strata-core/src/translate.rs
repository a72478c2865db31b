//! Stratum skeletons and Yu datum skeletons, in both directions.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::minimal::{is_generic, GenericityReport};
use crate::stratum::{
    compare_presentations, defining_sequence, depth_of_index, level_info, levels_of,
    presentation_secherre, presentation_yu, v_order, DepthMode, FiltDepth, OrderSkeleton,
    StratumKind, StratumSkeleton,
};
use crate::tower::{Subfield, TameElement, TameField};
use crate::Rational;

pub const SCHEMA: &str = "strata-kit/v1";

/// The numerical content of a Yu datum.
#[derive(Clone, Debug)]
pub struct YuSkeleton {
    pub ambient: TameField,
    /// `E_0 > E_1 > .. > E_d = F`.
    pub fields: Vec<Subfield>,
    pub n_dim: u32,
    pub e_a: u32,
    /// The point is a vertex for `G^0`.
    pub vertex: bool,
    /// `r_0 < .. < r_d`; empty for depth zero.
    pub depths: Vec<Rational>,
    /// `c_0, .., c_s`.
    pub realizers: Vec<TameElement>,
    pub s: Option<usize>,
    pub d: usize,
    /// `d = s + 1` with a trivial last character and `r_d = r_s`.
    pub trivial_top: bool,
    pub rho: String,
}

impl YuSkeleton {
    /// Structural checks that do not need embeddings.
    pub fn validate_shape(&self) -> Result<()> {
        let bad = |m: String| Err(Error::domain("yu_skeleton", m));
        if self.fields.len() != self.d + 1 {
            return bad(format!("{} fields for d = {}", self.fields.len(), self.d));
        }
        if !self.fields.last().unwrap().is_base() {
            return bad("the last field must be F".into());
        }
        for w in self.fields.windows(2) {
            if !(w[0].contains_field(&w[1]) && w[0].degree() > w[1].degree()) {
                return bad("fields must strictly decrease".into());
            }
        }
        match self.s {
            None => {
                if self.d != 0 || !self.realizers.is_empty() || !self.depths.is_empty() {
                    return bad("depth-zero skeleton carries realizers or depths".into());
                }
            }
            Some(s) => {
                if self.realizers.len() != s + 1 {
                    return bad(format!("{} realizers for s = {s}", self.realizers.len()));
                }
                let want_d = if self.trivial_top { s + 1 } else { s };
                if self.d != want_d {
                    return bad(format!("d = {} but s = {s} and trivial_top = {}", self.d, self.trivial_top));
                }
                if self.depths.len() != self.d.max(s) + 1 {
                    return bad(format!("{} depths for d = {}", self.depths.len(), self.d));
                }
                if self.depths[0] <= Rational::from(0) {
                    return bad("r_0 must be positive".into());
                }
                for i in 0..s {
                    if self.depths[i] >= self.depths[i + 1] {
                        return Err(Error::domain(
                            "monotonicity",
                            format!("r_{i} = {} is not below r_{} = {}", self.depths[i], i + 1, self.depths[i + 1]),
                        ));
                    }
                }
                if self.trivial_top && self.depths[s + 1] != self.depths[s] {
                    return bad("r_d must equal r_s when the last character is trivial".into());
                }
            }
        }
        Ok(())
    }

    /// Full validation: shape, realizer depths and genericity of each realizer.
    pub fn validate(&self) -> Result<Vec<GenericityReport>> {
        self.validate_shape()?;
        let mut reports = Vec::new();
        for (i, c) in self.realizers.iter().enumerate() {
            let c = c.coerce(&self.ambient)?;
            if -c.ord()? != self.depths[i] {
                return Err(Error::domain(
                    "realizer_depth",
                    format!("r_{i} = {} but -ord(c_{i}) = {}", self.depths[i], -c.ord()?),
                ));
            }
            let upper = &self.fields[i];
            let lower = self.fields.get(i + 1).unwrap_or(upper);
            if !upper.contains(&c)? {
                return Err(Error::domain("realizer_field", format!("c_{i} is not in E_{i}")));
            }
            let g = is_generic(&c, upper, lower)?;
            if !g.verdict {
                return Err(Error::domain("generic", format!("c_{i} is not generic")));
            }
            reports.push(g);
        }
        Ok(reports)
    }
}

/// Stratum to datum, with both group presentations compared afterwards.
pub fn secherre_to_yu(stratum: &StratumSkeleton) -> Result<YuSkeleton> {
    if stratum.kind != StratumKind::Simple || stratum.r != 0 {
        return Err(Error::domain("not_simple", "need a simple stratum with r = 0"));
    }
    if !stratum.order.b_maximal {
        return Err(Error::domain("b_maximal", "the centralizer order must be maximal"));
    }
    let amb = stratum.order.pure_over.ambient().clone();
    let fac = &stratum.fac;
    let yu = if stratum.is_depth_zero() {
        YuSkeleton {
            ambient: amb.clone(),
            fields: vec![Subfield::base(&amb)?],
            n_dim: stratum.order.n_dim(),
            e_a: stratum.order.e_a,
            vertex: true,
            depths: Vec::new(),
            realizers: Vec::new(),
            s: None,
            d: 0,
            trivial_top: false,
            rho: "rho".into(),
        }
    } else {
        let s = fac.s();
        let trivial_top = !fac.last_in_base();
        let mut depths: Vec<Rational> = fac.chunks.iter().map(|c| -c.ord).collect();
        if trivial_top {
            depths.push(depths[s]);
        }
        YuSkeleton {
            ambient: amb,
            fields: levels_of(fac),
            n_dim: stratum.order.n_dim(),
            e_a: stratum.order.e_a,
            vertex: true,
            depths,
            realizers: fac.chunks.iter().map(|c| c.c.clone()).collect(),
            s: Some(s),
            d: if trivial_top { s + 1 } else { s },
            trivial_top,
            rho: "rho".into(),
        }
    };
    yu.validate().map_err(|e| match e {
        Error::Domain { clause, location } if clause == "generic" => {
            Error::Internal(format!("emitted realizer fails genericity: {location}"))
        }
        other => other,
    })?;
    let sp = presentation_secherre(stratum)?;
    let yp = presentation_yu(&yu)?;
    for (a, b) in [(&sp.h1, &yp.k_plus), (&sp.j, &yp.k_circ), (&sp.jhat, &yp.k)] {
        let cmp = compare_presentations(a, b)?;
        if !cmp.equal {
            return Err(Error::Internal(format!(
                "{} and {} differ: {}",
                a.name,
                b.name,
                cmp.diffs.join("; ")
            )));
        }
    }
    Ok(yu)
}

/// Datum to stratum: `beta = sum c_i`, `n = -v_A(beta)`.
pub fn yu_to_secherre(yu: &YuSkeleton) -> Result<StratumSkeleton> {
    yu.validate_shape()?;
    let amb = &yu.ambient;
    let prec = yu
        .realizers
        .iter()
        .map(|c| c.coerce(amb).map(|c| c.prec()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min()
        .unwrap_or(crate::tower::default_prec());
    for (i, r) in yu.depths.iter().enumerate() {
        let k = *r * Rational::from(yu.e_a as i64);
        if !k.is_integer() {
            return Err(Error::domain(
                "jump",
                format!("e_A r_{i} = {k} is not an integer"),
            ));
        }
    }
    yu.validate()?;
    let beta = if yu.s.is_none() {
        TameElement::one(amb, prec)
    } else {
        let mut acc = TameElement::zero(amb, prec);
        for c in &yu.realizers {
            acc = acc.add(&c.coerce(amb)?)?;
        }
        acc
    };
    let e0 = Subfield::base(amb)?.with_generator(&beta)?;
    if e0 != yu.fields[0] {
        return Err(Error::domain("tower", "F[beta] differs from E_0"));
    }
    if yu.n_dim % e0.degree() != 0 {
        return Err(Error::domain("tower", "[E_0:F] does not divide N"));
    }
    let order = OrderSkeleton::new(yu.n_dim, 1, yu.e_a, e0, yu.vertex)?;
    let st = StratumSkeleton::new(order, 0, &beta)?;
    if st.kind != StratumKind::Simple {
        return Err(Error::domain("not_simple", "sum of realizers is not simple"));
    }
    let seq = defining_sequence(&st)?;
    for (i, stage) in seq.iter().enumerate().skip(1) {
        let want = yu.depths[i - 1] * Rational::from(yu.e_a as i64);
        if Rational::from(stage.r) != want {
            return Err(Error::domain(
                "depth_dictionary",
                format!("r_{i} = {} but e_A r_{} = {want}", stage.r, i - 1),
            ));
        }
    }
    Ok(st)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundtripReport {
    pub items: Vec<(String, bool)>,
}

impl RoundtripReport {
    pub fn equal(&self) -> bool {
        self.items.iter().all(|(_, ok)| *ok)
    }
    pub fn failures(&self) -> Vec<&str> {
        self.items.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect()
    }
}

pub enum Skeleton<'a> {
    Secherre(&'a StratumSkeleton),
    Yu(&'a YuSkeleton),
}

fn same_units(a: &[TameElement], b: &[TameElement]) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    for (x, y) in a.iter().zip(b) {
        let (x, y) = crate::tower::lift_pair(x, y)?;
        if x.lead() != y.lead() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn yu_items(a: &YuSkeleton, b: &YuSkeleton) -> Result<Vec<(String, bool)>> {
    let deg = |y: &YuSkeleton| level_info(&y.fields);
    Ok(vec![
        ("tower".into(), deg(a) == deg(b)),
        ("n_dim".into(), a.n_dim == b.n_dim),
        ("e_a".into(), a.e_a == b.e_a),
        ("depths".into(), a.depths == b.depths),
        ("s".into(), a.s == b.s),
        ("d".into(), a.d == b.d && a.trivial_top == b.trivial_top),
        ("realizers".into(), same_units(&a.realizers, &b.realizers)?),
    ])
}

/// Both composites, itemized against the input.
pub fn roundtrip_check(x: Skeleton<'_>) -> Result<RoundtripReport> {
    let items = match x {
        Skeleton::Secherre(st) => {
            let yu = secherre_to_yu(st)?;
            let back = yu_to_secherre(&yu)?;
            let chunks = |s: &StratumSkeleton| -> Vec<TameElement> {
                if s.is_depth_zero() {
                    return Vec::new();
                }
                s.fac.chunks.iter().map(|c| c.c.clone()).collect()
            };
            let degs = |s: &StratumSkeleton| level_info(&levels_of(&s.fac));
            let rs = |s: &StratumSkeleton| -> Result<Vec<i64>> {
                Ok(defining_sequence(s)?.iter().map(|t| t.r).collect())
            };
            vec![
                ("tower".into(), degs(st) == degs(&back)),
                ("n".into(), st.n == back.n),
                ("e_a".into(), st.order.e_a == back.order.e_a),
                ("depths".into(), rs(st)? == rs(&back)?),
                ("realizers".into(), same_units(&chunks(st), &chunks(&back))?),
                (
                    "beta".into(),
                    st.beta.eq_to_prec(&back.beta) || (st.is_depth_zero() && back.is_depth_zero()),
                ),
            ]
        }
        Skeleton::Yu(yu) => {
            let st = yu_to_secherre(yu)?;
            let again = secherre_to_yu(&st)?;
            yu_items(yu, &again)?
        }
    };
    Ok(RoundtripReport { items })
}

/// Windows `t_i = max(t, floor(-v_A(c_i)/2))` and the depth of `H^{t_i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterIndexTable {
    pub t: i64,
    pub rows: Vec<(i64, FiltDepth)>,
}

pub fn factchar_indices(stratum: &StratumSkeleton, t: i64) -> Result<CharacterIndexTable> {
    let order = &stratum.order;
    let bound = match crate::stratum::k0(&stratum.beta, order)? {
        Some(k) => -k,
        None => stratum.n.max(1),
    };
    if t < 0 || t >= bound {
        return Err(Error::domain(
            "t_range",
            format!("t = {t} is outside [0, {bound})"),
        ));
    }
    let mut rows = Vec::new();
    for ch in &stratum.fac.chunks {
        let o = order.restrict_to(&ch.field)?;
        let v = v_order(&ch.c, &o)?;
        let ti = t.max(Integer::div_floor(&(-v), &2));
        rows.push((ti, depth_of_index(ti, order.e_a, DepthMode::Plus)));
    }
    Ok(CharacterIndexTable { t, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{base_field, extend};

    fn running() -> StratumSkeleton {
        let e = extend(&base_field(3).unwrap(), 1, 2, 1).unwrap();
        let whole = Subfield::of_node(&e, &e).unwrap();
        let beta = TameElement::new(&e, [(-4, 1), (-1, 1)], 64);
        let order = OrderSkeleton::attached(&whole, 2).unwrap();
        StratumSkeleton::new(order, 0, &beta).unwrap()
    }

    #[test]
    fn running_example_datum() {
        let st = running();
        let yu = secherre_to_yu(&st).unwrap();
        assert_eq!(yu.depths, vec![Rational::new(1, 2), Rational::from(2)]);
        assert_eq!(yu.d, 1);
        assert!(!yu.trivial_top);
        let back = yu_to_secherre(&yu).unwrap();
        assert!(back.beta.eq_to_prec(&st.beta));
        assert!(roundtrip_check(Skeleton::Secherre(&st)).unwrap().equal());
        assert!(roundtrip_check(Skeleton::Yu(&yu)).unwrap().equal());
    }

    #[test]
    fn running_example_windows() {
        let st = running();
        let tab = factchar_indices(&st, 0).unwrap();
        assert_eq!(tab.rows.iter().map(|r| r.0).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn depth_zero_round_trip() {
        let f = base_field(5).unwrap();
        let base = Subfield::base(&f).unwrap();
        let order = OrderSkeleton::attached(&base, 1).unwrap();
        let st = StratumSkeleton::new(order, 0, &TameElement::constant(&f, 2, 32)).unwrap();
        assert!(st.is_depth_zero());
        let yu = secherre_to_yu(&st).unwrap();
        assert_eq!((yu.d, yu.s), (0, None));
        assert!(roundtrip_check(Skeleton::Secherre(&st)).unwrap().equal());
    }
}
