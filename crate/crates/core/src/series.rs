//! Finite-support Hahn series over `F_p`: the truncated model of the perfect
//! valued field `K` and of its valuation ring.
//!
//! A series is a strictly increasing list of `(exponent, coefficient)` terms
//! together with an optional exponent cap: a capped series is only known
//! modulo `t^cap`. Arithmetic propagates the cap exactly, so that a capped
//! zero is never mistaken for an exact zero.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value_group::{GammaElt, GammaJson, GroupKind};

/// Exponent precision of a series.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Precision {
    Exact,
    /// Known modulo `t^cap`.
    Capped(GammaElt),
}

impl Precision {
    pub fn cap(&self) -> Option<&GammaElt> {
        match self {
            Precision::Exact => None,
            Precision::Capped(c) => Some(c),
        }
    }

    pub fn min(&self, other: &Precision) -> Precision {
        match (self, other) {
            (Precision::Exact, x) | (x, Precision::Exact) => x.clone(),
            (Precision::Capped(a), Precision::Capped(b)) => Precision::Capped(a.min(b).clone()),
        }
    }

    fn shift(&self, by: &GammaElt) -> Precision {
        match self {
            Precision::Exact => Precision::Exact,
            Precision::Capped(c) => Precision::Capped(c + by),
        }
    }
}

/// Valuation of a series at its precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Valuation {
    Finite(GammaElt),
    /// Zero modulo `t^cap`: the true valuation is at least `cap`.
    AtLeast(GammaElt),
    Infinite,
}

impl Valuation {
    /// A certified lower bound, `None` for an exact zero.
    pub fn lower_bound(&self) -> Option<&GammaElt> {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn finite(&self) -> Option<&GammaElt> {
        match self {
            Valuation::Finite(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">= {v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HahnSeries {
    p: u32,
    kind: GroupKind,
    terms: Vec<(GammaElt, u32)>,
    prec: Precision,
}

impl HahnSeries {
    pub fn zero(p: u32, kind: GroupKind) -> Self {
        HahnSeries { p, kind, terms: Vec::new(), prec: Precision::Exact }
    }

    /// Zero known only modulo `t^cap`.
    pub fn zero_capped(p: u32, cap: GammaElt) -> Self {
        HahnSeries { p, kind: cap.kind(), terms: Vec::new(), prec: Precision::Capped(cap) }
    }

    pub fn one(p: u32, kind: GroupKind) -> Self {
        Self::constant(p, kind, 1)
    }

    pub fn constant(p: u32, kind: GroupKind, c: u32) -> Self {
        Self::monomial(p, GammaElt::zero(kind), c)
    }

    /// `t^gamma`.
    pub fn t_pow(p: u32, gamma: GammaElt) -> Self {
        Self::monomial(p, gamma, 1)
    }

    pub fn monomial(p: u32, gamma: GammaElt, c: u32) -> Self {
        let kind = gamma.kind();
        let c = c % p;
        let terms = if c == 0 { Vec::new() } else { vec![(gamma, c)] };
        HahnSeries { p, kind, terms, prec: Precision::Exact }
    }

    /// Build from arbitrary terms: sorts, merges, reduces mod `p`, and drops
    /// terms at or beyond the cap.
    pub fn from_terms(
        p: u32,
        kind: GroupKind,
        terms: impl IntoIterator<Item = (GammaElt, u32)>,
        prec: Precision,
    ) -> Result<Self> {
        if let Some(c) = prec.cap() {
            if c.kind() != kind {
                return Err(Error::GroupMismatch { left: kind, right: c.kind() });
            }
        }
        let mut acc: BTreeMap<GammaElt, u32> = BTreeMap::new();
        for (e, c) in terms {
            if e.kind() != kind {
                return Err(Error::GroupMismatch { left: kind, right: e.kind() });
            }
            let slot = acc.entry(e).or_insert(0);
            *slot = (*slot + c % p) % p;
        }
        Ok(Self::from_map(p, kind, acc, prec))
    }

    fn from_map(p: u32, kind: GroupKind, acc: BTreeMap<GammaElt, u32>, prec: Precision) -> Self {
        let terms = acc
            .into_iter()
            .filter(|(e, c)| *c != 0 && prec.cap().map_or(true, |cap| e < cap))
            .collect();
        HahnSeries { p, kind, terms, prec }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn terms(&self) -> &[(GammaElt, u32)] {
        &self.terms
    }

    pub fn precision(&self) -> &Precision {
        &self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec == Precision::Exact
    }

    /// No known nonzero term (exact zero or zero modulo the cap).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.is_exact()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn valuation(&self) -> Valuation {
        match (self.terms.first(), &self.prec) {
            (Some((e, _)), _) => Valuation::Finite(e.clone()),
            (None, Precision::Capped(c)) => Valuation::AtLeast(c.clone()),
            (None, Precision::Exact) => Valuation::Infinite,
        }
    }

    /// Truncate to a (possibly tighter) cap.
    pub fn with_cap(&self, cap: &GammaElt) -> Self {
        let prec = self.prec.min(&Precision::Capped(cap.clone()));
        let c = prec.cap().cloned();
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| c.as_ref().map_or(true, |c| e < c))
            .cloned()
            .collect();
        HahnSeries { p: self.p, kind: self.kind, terms, prec }
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch { left: self.p, right: other.p });
        }
        if self.kind != other.kind {
            return Err(Error::GroupMismatch { left: self.kind, right: other.kind });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert!(self.check_compatible(other).is_ok());
        let prec = self.prec.min(&other.prec);
        let mut acc: BTreeMap<GammaElt, u32> = self.terms.iter().cloned().collect();
        for (e, c) in &other.terms {
            let slot = acc.entry(e.clone()).or_insert(0);
            *slot = (*slot + c) % self.p;
        }
        Self::from_map(self.p, self.kind, acc, prec)
    }

    pub fn neg(&self) -> Self {
        let p = self.p;
        HahnSeries {
            p,
            kind: self.kind,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), (p - c) % p)).collect(),
            prec: self.prec.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Lower bound on the valuation used for precision propagation:
    /// the leading exponent, or the cap of a capped zero.
    fn low(&self) -> Option<&GammaElt> {
        self.terms.first().map(|(e, _)| e).or(self.prec.cap())
    }

    fn product_precision(&self, other: &Self) -> Precision {
        let from_self = match (self.prec.cap(), other.low()) {
            (Some(c), Some(l)) => Precision::Capped(c + l),
            _ => Precision::Exact,
        };
        let from_other = match (other.prec.cap(), self.low()) {
            (Some(c), Some(l)) => Precision::Capped(c + l),
            _ => Precision::Exact,
        };
        from_self.min(&from_other)
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert!(self.check_compatible(other).is_ok());
        let prec = self.product_precision(other);
        if let Some(terms) = self.mul_small(other, &prec) {
            return HahnSeries { p: self.p, kind: self.kind, terms, prec };
        }
        let cap = prec.cap();
        let mut acc: BTreeMap<GammaElt, u32> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1 + e2;
                if cap.map_or(false, |c| &e >= c) {
                    // terms are sorted, later e2 only grow
                    break;
                }
                let slot = acc.entry(e).or_insert(0);
                *slot = ((*slot as u64 + *c1 as u64 * *c2 as u64) % self.p as u64) as u32;
            }
        }
        Self::from_map(self.p, self.kind, acc, prec)
    }

    // Product with every exponent in machine integers: collect, sort and
    // merge instead of going through the big-rational map.
    fn mul_small(&self, other: &Self, prec: &Precision) -> Option<Vec<(GammaElt, u32)>> {
        if self.kind == GroupKind::Lex {
            return None;
        }
        let ints = |s: &Self| s.terms.iter().map(|(e, c)| Some((e.small()?, *c))).collect::<Option<Vec<_>>>();
        let (xs, ys) = (ints(self)?, ints(other)?);
        let cap = match prec.cap() {
            Some(c) => Some(c.small()?),
            None => None,
        };
        let below = |(n, d): (i128, i128)| cap.map_or(true, |(cn, cd)| n * (cd as i128) < (cn as i128) * d);
        let mut acc: Vec<((i128, i128), u64)> = Vec::with_capacity(xs.len() * ys.len());
        for &((a, b), c1) in &xs {
            for &((c, d), c2) in &ys {
                let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
                let (n, m) = if b == d { (a + c, b) } else { (a * d + c * b, b * d) };
                let g = num_integer::Integer::gcd(&n, &m);
                let e = (n / g, m / g);
                if !below(e) {
                    break;
                }
                acc.push((e, c1 as u64 * c2 as u64));
            }
        }
        acc.sort_unstable_by(|(x, _), (y, _)| (x.0 * y.1).cmp(&(y.0 * x.1)));
        let p = self.p as u64;
        let mut terms: Vec<(GammaElt, u32)> = Vec::new();
        let mut i = 0;
        while i < acc.len() {
            let e = acc[i].0;
            let mut c = 0u64;
            while i < acc.len() && acc[i].0 == e {
                c = (c + acc[i].1) % p;
                i += 1;
            }
            if c != 0 {
                terms.push((GammaElt::from_small(self.kind, i64::try_from(e.0).ok()?, i64::try_from(e.1).ok()?), c as u32));
            }
        }
        Some(terms)
    }

    /// Multiply by the monomial `c * t^gamma` (exact; shifts the cap).
    pub fn mul_monomial(&self, gamma: &GammaElt, c: u32) -> Self {
        let c = c % self.p;
        if c == 0 {
            return HahnSeries::zero(self.p, self.kind);
        }
        HahnSeries {
            p: self.p,
            kind: self.kind,
            terms: self
                .terms
                .iter()
                .map(|(e, k)| (e + gamma, ((*k as u64 * c as u64) % self.p as u64) as u32))
                .collect(),
            prec: self.prec.shift(gamma),
        }
    }

    pub fn pow(&self, e: u64) -> Self {
        if e == 0 {
            return HahnSeries::one(self.p, self.kind);
        }
        if e % self.p as u64 == 0 {
            // x^(pk) = frob(x^k): exact in characteristic p
            return self.pow(e / self.p as u64).frobenius();
        }
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Raise every exponent (and the cap) by the factor `p^k`, `k` possibly
    /// negative. `k = 1` is Frobenius, `k = -1` the p-th root.
    pub fn frobenius_pow(&self, k: i32) -> Self {
        if k == 0 {
            return self.clone();
        }
        HahnSeries {
            p: self.p,
            kind: self.kind,
            terms: self.terms.iter().map(|(e, c)| (e.scale_p(self.p, k), *c)).collect(),
            prec: match &self.prec {
                Precision::Exact => Precision::Exact,
                Precision::Capped(c) => Precision::Capped(c.scale_p(self.p, k)),
            },
        }
    }

    pub fn frobenius(&self) -> Self {
        self.frobenius_pow(1)
    }

    pub fn pth_root(&self) -> Self {
        self.frobenius_pow(-1)
    }

    /// Inverse known modulo `t^gamma_prec` (absolute exponent cap on the
    /// result), so that `a * result = 1 mod t^(gamma_prec + v(a))`.
    /// Monomials invert exactly.
    pub fn invert(&self, gamma_prec: &GammaElt) -> Result<Self> {
        let Some((v, c)) = self.terms.first().cloned() else {
            return Err(Error::DivisionByZero);
        };
        let c_inv = inv_mod(c, self.p);
        let lead_inv = HahnSeries::monomial(self.p, -&v, c_inv);
        if self.terms.len() == 1 && self.is_exact() {
            return Ok(lead_inv);
        }
        // a = c t^v (1 + eps); 1/a = c^-1 t^-v sum (-eps)^k
        let eps = self.mul(&lead_inv).sub(&HahnSeries::one(self.p, self.kind));
        let mut cap = gamma_prec.clone();
        if let Some(pc) = self.prec.cap() {
            // an error t^pc in a gives an error t^(pc - 2v) in 1/a
            let limit = &(pc - &v) - &v;
            if limit < cap {
                cap = limit;
            }
        }
        let rel_cap = &cap + &v;
        let minus_eps = eps.neg().with_cap(&rel_cap);
        let mut sum = HahnSeries::one(self.p, self.kind).with_cap(&rel_cap);
        let mut power = HahnSeries::one(self.p, self.kind);
        const MAX_ITERS: usize = 4096;
        for _ in 0..MAX_ITERS {
            power = power.mul(&minus_eps).with_cap(&rel_cap);
            if power.is_zero() {
                let out = sum.mul_monomial(&-&v, c_inv);
                return Ok(out.with_cap(&cap));
            }
            sum = sum.add(&power);
        }
        Err(Error::PrecisionExhausted(format!(
            "geometric series for 1/({self}) does not reach t^{cap}"
        )))
    }

    /// `a = a_plus + a_minus` with `a_plus` supported on exponents `>= 0` and
    /// `a_minus` on exponents `< 0`.
    pub fn split_nonneg(&self) -> (Self, Self) {
        let zero = GammaElt::zero(self.kind);
        let (plus, minus): (Vec<_>, Vec<_>) =
            self.terms.iter().cloned().partition(|(e, _)| *e >= zero);
        let minus_prec = match self.prec.cap() {
            Some(c) if *c <= zero => self.prec.clone(),
            _ => Precision::Exact,
        };
        (
            HahnSeries { p: self.p, kind: self.kind, terms: plus, prec: self.prec.clone() },
            HahnSeries { p: self.p, kind: self.kind, terms: minus, prec: minus_prec },
        )
    }

    /// Equality modulo the coarser of the two caps.
    pub fn congruent(&self, other: &Self) -> bool {
        let prec = self.prec.min(&other.prec);
        match prec.cap() {
            None => self.terms == other.terms,
            Some(c) => self.with_cap(c).terms == other.with_cap(c).terms,
        }
    }

    /// Image in the residue field `F_p` for a series in the valuation ring;
    /// `None` if the series is not certifiably integral.
    pub fn residue(&self) -> Option<u32> {
        let zero = GammaElt::zero(self.kind);
        if let Some((e, _)) = self.terms.first() {
            if e.is_negative() {
                return None;
            }
        }
        if let Some(c) = self.prec.cap() {
            if *c <= zero {
                return None;
            }
        }
        Some(self.terms.iter().find(|(e, _)| *e == zero).map_or(0, |(_, c)| *c))
    }

    /// Checked field operations with compatibility errors.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.add(other))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.mul(other))
    }

    pub fn div(&self, other: &Self, gamma_prec: &GammaElt) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.mul(&other.invert(gamma_prec)?))
    }
}

pub(crate) fn inv_mod(c: u32, p: u32) -> u32 {
    let c = c % p;
    assert!(c != 0, "inverse of zero mod p");
    // p is small; Fermat
    let mut acc = 1u64;
    for _ in 0..(p - 2) {
        acc = acc * c as u64 % p as u64;
    }
    acc as u32
}

impl fmt::Display for HahnSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coef = if *c == 1 { String::new() } else { format!("{c}*") };
            if e.is_zero() {
                write!(f, "{c}")?;
            } else if e.as_rational().map_or(false, |x| x.is_one()) {
                write!(f, "{coef}t")?;
            } else {
                write!(f, "{coef}t^{e}")?;
            }
        }
        match &self.prec {
            Precision::Exact if first => write!(f, "0"),
            Precision::Exact => Ok(()),
            Precision::Capped(c) => {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "O(t^{c})")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PrecJson {
    Exact(String),
    Capped(GammaJson),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub p: u32,
    pub group: GroupKind,
    pub terms: Vec<(GammaJson, u32)>,
    pub prec: PrecJson,
}

impl SeriesJson {
    pub fn from_series(s: &HahnSeries) -> Self {
        SeriesJson {
            p: s.p,
            group: s.kind,
            terms: s.terms.iter().map(|(e, c)| (GammaJson::from_gamma(e), *c)).collect(),
            prec: match &s.prec {
                Precision::Exact => PrecJson::Exact("exact".into()),
                Precision::Capped(c) => PrecJson::Capped(GammaJson::from_gamma(c)),
            },
        }
    }

    pub fn to_series(&self) -> Result<HahnSeries> {
        let prec = match &self.prec {
            PrecJson::Exact(s) if s == "exact" => Precision::Exact,
            PrecJson::Exact(s) => return Err(Error::Json(format!("bad precision {s:?}"))),
            PrecJson::Capped(g) => Precision::Capped(g.to_gamma(self.group, self.p)?),
        };
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| Ok((e.to_gamma(self.group, self.p)?, *c)))
            .collect::<Result<Vec<_>>>()?;
        HahnSeries::from_terms(self.p, self.group, terms, prec)
    }
}

impl Serialize for HahnSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson::from_series(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for HahnSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SeriesJson::deserialize(d)?
            .to_series()
            .map_err(serde::de::Error::custom)
    }
}

/// Shorthand used in tests and examples: `t^(num/den)` in `Z[1/p]`.
pub fn tq(p: u32, num: i64, den: i64) -> HahnSeries {
    HahnSeries::t_pow(p, GammaElt::Zp1(crate::value_group::rat(num, den)))
}

/// Exponent `num/den` as a `Zp1` element.
pub fn zq(num: i64, den: i64) -> GammaElt {
    GammaElt::Zp1(crate::value_group::rat(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value_group::rat;
    use proptest::prelude::*;

    const P: u32 = 2;

    fn poly(p: u32, exps: &[(i64, i64)]) -> HahnSeries {
        HahnSeries::from_terms(
            p,
            GroupKind::Zp1,
            exps.iter().map(|&(n, d)| (zq(n, d), 1)),
            Precision::Exact,
        )
        .unwrap()
    }

    #[test]
    fn basic_arithmetic() {
        let a = poly(P, &[(1, 1), (2, 1)]);
        assert_eq!(a.mul(&tq(P, -1, 1)), poly(P, &[(0, 1), (1, 1)]));
        let b = poly(P, &[(0, 1), (1, 1)]);
        assert!(b.add(&b).is_exact_zero());
        assert_eq!(tq(P, 1, 2).mul(&tq(P, 1, 2)), tq(P, 1, 1));
    }

    #[test]
    fn valuations() {
        assert_eq!(poly(P, &[(3, 4), (2, 1)]).valuation(), Valuation::Finite(zq(3, 4)));
        let z = HahnSeries::zero_capped(P, zq(5, 1));
        assert_eq!(z.valuation(), Valuation::AtLeast(zq(5, 1)));
        assert_eq!(z.valuation().to_string(), ">= 5");
        assert_eq!(poly(P, &[(0, 1), (1, 1)]).valuation(), Valuation::Finite(zq(0, 1)));
        assert_eq!(HahnSeries::zero(P, GroupKind::Zp1).valuation(), Valuation::Infinite);
    }

    #[test]
    fn inversion() {
        let a = poly(P, &[(0, 1), (1, 1)]);
        let inv = a.invert(&zq(3, 1)).unwrap();
        assert_eq!(inv.terms(), poly(P, &[(0, 1), (1, 1), (2, 1)]).terms());
        assert_eq!(inv.precision(), &Precision::Capped(zq(3, 1)));
        // (1 + t)(1 + t + t^2) = 1 + t^3
        assert_eq!(a.mul(&poly(P, &[(0, 1), (1, 1), (2, 1)])), poly(P, &[(0, 1), (3, 1)]));
        assert!(a.mul(&inv).congruent(&HahnSeries::one(P, GroupKind::Zp1)));
        assert_eq!(tq(P, 1, 2).invert(&zq(0, 1)).unwrap(), tq(P, -1, 2));
        assert_eq!(HahnSeries::zero(P, GroupKind::Zp1).invert(&zq(1, 1)), Err(Error::DivisionByZero));
    }

    #[test]
    fn inversion_p3_with_offset() {
        // 2t + t^2 over F_3: inverse = 2 t^-1 (1 + 2t)^-1
        let a = HahnSeries::from_terms(3, GroupKind::Zp1, [(zq(1, 1), 2), (zq(2, 1), 1)], Precision::Exact).unwrap();
        let inv = a.invert(&zq(4, 1)).unwrap();
        let prod = a.mul(&inv);
        // known modulo t^(4 + 1)
        assert_eq!(prod.precision(), &Precision::Capped(zq(5, 1)));
        assert!(prod.congruent(&HahnSeries::one(3, GroupKind::Zp1)));
    }

    #[test]
    fn frobenius_and_roots() {
        assert_eq!(tq(P, 1, 2).frobenius(), tq(P, 1, 1));
        assert_eq!(tq(P, 1, 1).pth_root(), tq(P, 1, 2));
        assert_eq!(poly(P, &[(0, 1), (1, 1)]).frobenius(), poly(P, &[(0, 1), (2, 1)]));
        assert_eq!(poly(P, &[(0, 1), (1, 1)]).pow(2), poly(P, &[(0, 1), (2, 1)]));
    }

    #[test]
    fn splitting() {
        let a = poly(P, &[(-1, 1), (0, 1), (1, 1)]);
        let (plus, minus) = a.split_nonneg();
        assert_eq!(plus, poly(P, &[(0, 1), (1, 1)]));
        assert_eq!(minus, tq(P, -1, 1));
        let (plus, minus) = tq(P, 1, 2).split_nonneg();
        assert_eq!(plus, tq(P, 1, 2));
        assert!(minus.is_exact_zero());
        let (plus, minus) = HahnSeries::zero(P, GroupKind::Zp1).split_nonneg();
        assert!(plus.is_exact_zero() && minus.is_exact_zero());
    }

    #[test]
    fn cap_propagation_through_products() {
        let a = poly(P, &[(0, 1)]).with_cap(&zq(2, 1));
        let b = tq(P, -1, 1);
        // a known mod t^2, times t^-1 is known mod t^1
        assert_eq!(a.mul(&b).precision(), &Precision::Capped(zq(1, 1)));
        assert_eq!(a.add(&b).precision(), &Precision::Capped(zq(2, 1)));
    }

    #[test]
    fn json_roundtrip() {
        let a = poly(P, &[(-1, 2), (3, 4)]).with_cap(&zq(2, 1));
        let j = serde_json::to_string(&a).unwrap();
        assert!(j.contains("\"group\":\"zp1\""));
        let b: HahnSeries = serde_json::from_str(&j).unwrap();
        assert_eq!(a, b);
        let e: HahnSeries = serde_json::from_str(r#"{"p":2,"group":"zp1","terms":[],"prec":"exact"}"#).unwrap();
        assert!(e.is_exact_zero());
    }

    fn arb_series(p: u32) -> impl Strategy<Value = HahnSeries> {
        prop::collection::vec(((-8i64..16), 0u32..3, 1u32..p.max(2)), 0..4).prop_map(move |ts| {
            HahnSeries::from_terms(
                p,
                GroupKind::Zp1,
                ts.into_iter().map(|(n, k, c)| (GammaElt::Zp1(rat(n, 1 << k)), c)),
                Precision::Exact,
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_series(3), b in arb_series(3), c in arb_series(3)) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert!(a.add(&a.neg()).is_exact_zero());
        }

        #[test]
        fn valuation_laws(a in arb_series(2), b in arb_series(2)) {
            if let (Some(va), Some(vb)) = (a.valuation().finite().cloned(), b.valuation().finite().cloned()) {
                prop_assert_eq!(a.mul(&b).valuation(), Valuation::Finite(&va + &vb));
                match a.add(&b).valuation() {
                    Valuation::Finite(v) => {
                        prop_assert!(v >= va.clone().min(vb.clone()));
                        if va != vb { prop_assert_eq!(v, va.clone().min(vb.clone())); }
                    }
                    Valuation::Infinite => prop_assert!(va == vb),
                    Valuation::AtLeast(_) => prop_assert!(false),
                }
            }
        }

        #[test]
        fn frobenius_is_ring_hom(a in arb_series(3), b in arb_series(3)) {
            prop_assert_eq!(a.mul(&b).frobenius(), a.frobenius().mul(&b.frobenius()));
            prop_assert_eq!(a.add(&b).frobenius(), a.frobenius().add(&b.frobenius()));
            prop_assert_eq!(a.frobenius().pth_root(), a.clone());
        }

        #[test]
        fn split_is_additive(a in arb_series(2), b in arb_series(2)) {
            let (ap, am) = a.split_nonneg();
            prop_assert_eq!(ap.add(&am), a.clone());
            let (sp, sm) = a.add(&b).split_nonneg();
            let (bp, bm) = b.split_nonneg();
            prop_assert_eq!(sp, ap.add(&bp));
            prop_assert_eq!(sm, am.add(&bm));
            let (app, apm) = ap.split_nonneg();
            prop_assert_eq!(app, ap);
            prop_assert!(apm.is_exact_zero());
        }
    }
}
