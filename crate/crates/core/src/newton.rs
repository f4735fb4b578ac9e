//! Newton polygons and Gauss norms of Witt expansions.
//!
//! The polygon of `h = sum p^n [c_n]` is the lower convex hull of the points
//! `(n, v(c_n))`, kept up to its leftmost lowest vertex, so every edge has a
//! strictly negative slope. A slope is stored as `dv / dn` along the edge;
//! it is the negative of the per-step valuation drop `v(c_n / c_{n+1})`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Valuation;
use crate::value_group::{GammaElt, GroupKind, RatJson};
use crate::witt::{Tail, WittVec};

type Pair = (BigRational, BigRational);

fn pair_add(a: &Pair, b: &Pair) -> Pair {
    (&a.0 + &b.0, &a.1 + &b.1)
}

fn pair_sub(a: &Pair, b: &Pair) -> Pair {
    (&a.0 - &b.0, &a.1 - &b.1)
}

fn pair_scale(a: &Pair, k: &BigRational) -> Pair {
    (&a.0 * k, &a.1 * k)
}

fn pair_of(g: &GammaElt) -> Pair {
    g.to_pair()
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// An edge slope `dv / dn`. Real for value groups inside `Q`, a
/// lexicographic pair otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SlopeValue {
    Real(BigRational),
    Lex(BigRational, BigRational),
}

impl SlopeValue {
    fn from_pair(kind: GroupKind, p: Pair) -> Self {
        match kind {
            GroupKind::Lex => SlopeValue::Lex(p.0, p.1),
            _ => SlopeValue::Real(p.0),
        }
    }

    pub fn to_pair(&self) -> Pair {
        match self {
            SlopeValue::Real(x) => (x.clone(), BigRational::zero()),
            SlopeValue::Lex(a, b) => (a.clone(), b.clone()),
        }
    }

    pub fn is_negative(&self) -> bool {
        let (a, b) = self.to_pair();
        a.is_negative() || (a.is_zero() && b.is_negative())
    }
}

impl PartialOrd for SlopeValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SlopeValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_pair().cmp(&other.to_pair())
    }
}

impl fmt::Display for SlopeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlopeValue::Real(x) => write!(f, "{x}"),
            SlopeValue::Lex(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

impl Serialize for SlopeValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct LexSlope {
            hi: RatJson,
            lo: RatJson,
        }
        match self {
            SlopeValue::Real(x) => RatJson::from_rat(x).serialize(s),
            SlopeValue::Lex(a, b) => LexSlope { hi: RatJson::from_rat(a), lo: RatJson::from_rat(b) }.serialize(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub slope: SlopeValue,
    pub width: u64,
    /// No completion of the unseen coordinates can change this edge.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    pub kind: GroupKind,
    pub vertices: Vec<(i64, GammaElt)>,
    pub edges: Vec<Edge>,
    /// Total width of the leading run of certified edges.
    pub certified_prefix: u64,
    /// The certified edges are the whole negative-slope polygon.
    pub complete: bool,
}

// A point whose height is only bounded below.
struct Uncertain {
    n: i64,
    floor: Option<Pair>,
}

/// Lower hull of `(n, v(c_n))` over the nonzero coordinates, restricted to
/// negative slopes, with certification against unseen coordinates.
pub fn newton_polygon(h: &WittVec) -> Result<NewtonPolygon> {
    let kind = h.kind();
    let mut pts: Vec<(i64, Pair)> = Vec::new();
    let mut uncertain: Vec<Uncertain> = Vec::new();
    for (n, c) in h.levels() {
        match c.valuation() {
            Valuation::Infinite => {}
            Valuation::Finite(v) => pts.push((n, pair_of(&v))),
            Valuation::AtLeast(v) => uncertain.push(Uncertain { n, floor: Some(pair_of(&v)) }),
        }
    }
    match h.tail() {
        Tail::Zero => {}
        Tail::AtLeast(f) => uncertain.push(Uncertain { n: h.precision(), floor: Some(pair_of(f)) }),
        Tail::Unknown => uncertain.push(Uncertain { n: h.precision(), floor: None }),
    }
    if pts.is_empty() {
        return Err(Error::Invalid(
            "Newton polygon of an element that vanishes at precision".into(),
        ));
    }
    let hull = lower_hull(&pts);
    // keep the chain up to the leftmost minimum
    let min_idx = hull
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.cmp(&b.1 .1).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .unwrap();
    let hull = &hull[..=min_idx];
    let vmin = hull[min_idx].1.clone();

    let first_n = hull[0].0;
    let blocked_from_left = uncertain.iter().any(|u| u.n < first_n);
    let mut edges = Vec::new();
    let mut certified_prefix = 0u64;
    let mut still = !blocked_from_left;
    for w in hull.windows(2) {
        let (n0, v0) = (&w[0].0, &w[0].1);
        let (n1, v1) = (&w[1].0, &w[1].1);
        let width = (n1 - n0) as u64;
        let dv = pair_sub(v1, v0);
        let slope_pair = pair_scale(&dv, &BigRational::new(BigInt::from(1), BigInt::from(width)));
        let ok = still
            && uncertain.iter().filter(|u| u.n > *n0).all(|u| match &u.floor {
                None => false,
                Some(f) => {
                    let line = pair_add(v0, &pair_scale(&slope_pair, &big(u.n - n0)));
                    *f > line
                }
            });
        still = ok;
        if ok {
            certified_prefix += width;
        }
        edges.push(Edge { slope: SlopeValue::from_pair(kind, slope_pair), width, certified: ok });
    }
    let complete = still
        && uncertain.iter().all(|u| match &u.floor {
            None => false,
            Some(f) => *f >= vmin,
        });
    let vertices = hull
        .iter()
        .map(|(n, v)| (*n, pair_to_gamma(kind, v)))
        .collect();
    Ok(NewtonPolygon { kind, vertices, edges, certified_prefix, complete })
}

fn pair_to_gamma(kind: GroupKind, v: &Pair) -> GammaElt {
    match kind {
        GroupKind::Lex => GammaElt::Lex(v.0.clone(), v.1.clone()),
        GroupKind::Zp1 => GammaElt::Zp1(v.0.clone()),
        GroupKind::Rat => GammaElt::Rat(v.0.clone()),
    }
}

// Cross product sign of (b - a) x (c - a) with pair-valued heights:
// positive when c lies strictly above the line through a, b.
fn turn(a: &(i64, Pair), b: &(i64, Pair), c: &(i64, Pair)) -> Ordering {
    let (dx1, dy1) = (big(b.0 - a.0), pair_sub(&b.1, &a.1));
    let (dx2, dy2) = (big(c.0 - a.0), pair_sub(&c.1, &a.1));
    pair_scale(&dy2, &dx1).cmp(&pair_scale(&dy1, &dx2))
}

fn lower_hull(pts: &[(i64, Pair)]) -> Vec<(i64, Pair)> {
    let mut hull: Vec<(i64, Pair)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 && turn(&hull[hull.len() - 2], &hull[hull.len() - 1], p) != Ordering::Greater {
            hull.pop();
        }
        hull.push(p.clone());
    }
    hull
}

impl NewtonPolygon {
    pub fn certified_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().take_while(|e| e.certified)
    }

    /// Certified slopes with multiplicities, weakly increasing.
    pub fn slopes(&self) -> Vec<(SlopeValue, u64)> {
        self.certified_edges().map(|e| (e.slope.clone(), e.width)).collect()
    }

    /// Slope of the last certified edge, or a marker that nothing beyond
    /// the certified part can exist.
    fn certified_ceiling(&self) -> Ceiling {
        if self.complete {
            Ceiling::Infinite
        } else {
            match self.certified_edges().last() {
                Some(e) => Ceiling::At(e.slope.clone()),
                None => Ceiling::Nothing,
            }
        }
    }

    /// ASCII rendering of the hull, one row per distinct height.
    pub fn ascii_plot(&self) -> String {
        let mut out = String::new();
        let Some(n_first) = self.vertices.first().map(|v| v.0) else {
            return out;
        };
        let n_last = self.vertices.last().unwrap().0;
        for (n, v) in &self.vertices {
            let col = (n - n_first) as usize;
            out.push_str(&format!("{:>4} | {}*  v = {}\n", n, " ".repeat(col * 2), v));
        }
        out.push_str(&format!(
            "     +{}\n       certified width {} of {}{}\n",
            "-".repeat(((n_last - n_first) as usize + 1) * 2),
            self.certified_prefix,
            n_last - n_first,
            if self.complete { " (complete)" } else { "" }
        ));
        out
    }
}

enum Ceiling {
    Nothing,
    At(SlopeValue),
    Infinite,
}

pub fn np_width(np: &NewtonPolygon) -> u64 {
    np.certified_prefix
}

/// Height change over the certified prefix: `sum slope * width`.
pub fn np_height(np: &NewtonPolygon) -> GammaElt {
    let mut acc = (BigRational::zero(), BigRational::zero());
    for e in np.certified_edges() {
        acc = pair_add(&acc, &pair_scale(&e.slope.to_pair(), &big(e.width as i64)));
    }
    pair_to_gamma(np.kind, &acc)
}

pub fn np_slopes(np: &NewtonPolygon) -> Vec<(SlopeValue, u64)> {
    np.slopes()
}

/// Polygon whose slope multiset is the disjoint union of the two inputs.
///
/// An edge of the sum is certified when its slope does not exceed the last
/// certified slope of any incomplete summand.
pub fn np_minkowski(a: &NewtonPolygon, b: &NewtonPolygon) -> NewtonPolygon {
    let kind = a.kind;
    let (Some(sa), Some(sb)) = (a.vertices.first(), b.vertices.first()) else {
        return if a.vertices.is_empty() { b.clone() } else { a.clone() };
    };
    let start = (sa.0 + sb.0, pair_add(&pair_of(&sa.1), &pair_of(&sb.1)));
    let mut all: Vec<(SlopeValue, u64)> = a
        .edges
        .iter()
        .chain(b.edges.iter())
        .map(|e| (e.slope.clone(), e.width))
        .collect();
    all.sort_by(|x, y| x.0.cmp(&y.0));
    let mut merged: Vec<(SlopeValue, u64)> = Vec::new();
    for (s, w) in all {
        match merged.last_mut() {
            Some(last) if last.0 == s => last.1 += w,
            _ => merged.push((s, w)),
        }
    }
    let ceilings = [a.certified_ceiling(), b.certified_ceiling()];
    let allowed = |s: &SlopeValue| {
        ceilings.iter().all(|c| match c {
            Ceiling::Nothing => false,
            Ceiling::At(top) => s <= top,
            Ceiling::Infinite => true,
        })
    };
    let mut vertices = vec![(start.0, pair_to_gamma(kind, &start.1))];
    let mut cur = start;
    let mut edges = Vec::new();
    let mut certified_prefix = 0;
    let mut still = true;
    for (s, w) in merged {
        let ok = still && allowed(&s);
        still = ok;
        if ok {
            certified_prefix += w;
        }
        cur = (cur.0 + w as i64, pair_add(&cur.1, &pair_scale(&s.to_pair(), &big(w as i64))));
        vertices.push((cur.0, pair_to_gamma(kind, &cur.1)));
        edges.push(Edge { slope: s, width: w, certified: ok });
    }
    let complete = a.complete && b.complete;
    NewtonPolygon { kind, vertices, edges, certified_prefix, complete }
}

/// Three-valued outcome of a necessary-condition test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlopeVerdict {
    Pass,
    Fail,
    Indeterminate,
}

/// Necessary condition for `h in (g)`: every certified slope of `g`, with
/// multiplicity, occurs among the slopes of `h`. `Fail` is a sound
/// refutation; `Pass` proves nothing.
pub fn divisibility_slope_test(h: &WittVec, g: &WittVec) -> SlopeVerdict {
    let (nh, ng) = match (newton_polygon(h), newton_polygon(g)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return SlopeVerdict::Indeterminate,
    };
    slope_containment(&nh, &ng)
}

/// Is `small`'s certified slope multiset contained in `big`'s?
pub fn slope_containment(big_np: &NewtonPolygon, small: &NewtonPolygon) -> SlopeVerdict {
    let have = big_np.slopes();
    let ceiling = big_np.certified_ceiling();
    let mut verdict = SlopeVerdict::Pass;
    for (s, w) in small.slopes() {
        let got = have.iter().find(|(t, _)| *t == s).map_or(0, |(_, k)| *k);
        if got >= w {
            continue;
        }
        // more edges of slope s could only hide beyond the certified part
        let settled = match &ceiling {
            Ceiling::Infinite => true,
            Ceiling::At(top) => *top > s,
            Ceiling::Nothing => false,
        };
        if settled {
            return SlopeVerdict::Fail;
        }
        verdict = SlopeVerdict::Indeterminate;
    }
    verdict
}

/// Gauss norm `w_s(h) = min_n (n + s v(c_n))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaussNorm {
    #[serde(serialize_with = "ser_rat")]
    pub value: BigRational,
    /// `false` when the value is only a lower bound.
    pub exact: bool,
}

fn ser_rat<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    RatJson::from_rat(x).serialize(s)
}

pub fn gauss_norm(h: &WittVec, s: &BigRational) -> Result<GaussNorm> {
    if h.kind() == GroupKind::Lex {
        return Err(Error::UnsupportedVariant(GroupKind::Lex));
    }
    if !s.is_positive() {
        return Err(Error::Invalid(format!("Gauss norm parameter must be positive, got {s}")));
    }
    let weight = |n: i64, v: &GammaElt| big(n) + s * v.as_rational().expect("scalar group");
    let mut certain: Option<BigRational> = None;
    let mut bound: Option<BigRational> = None;
    let mut unknown = false;
    let upd = |slot: &mut Option<BigRational>, x: BigRational| {
        if slot.as_ref().map_or(true, |y| x < *y) {
            *slot = Some(x);
        }
    };
    for (n, c) in h.levels() {
        match c.valuation() {
            Valuation::Infinite => {}
            Valuation::Finite(v) => upd(&mut certain, weight(n, &v)),
            Valuation::AtLeast(v) => upd(&mut bound, weight(n, &v)),
        }
    }
    match h.tail() {
        Tail::Zero => {}
        Tail::AtLeast(f) => upd(&mut bound, weight(h.precision(), f)),
        Tail::Unknown => unknown = true,
    }
    match (certain, bound) {
        (None, None) => Err(Error::Invalid("Gauss norm of zero".into())),
        (Some(c), b) if b.as_ref().map_or(true, |b| c < *b) => Ok(GaussNorm { value: c, exact: !unknown }),
        (_, Some(b)) => Ok(GaussNorm { value: b, exact: false }),
        (_, None) => unreachable!(),
    }
}

/// `min over vertices of (n + s * height)`; equals the Gauss norm for exact
/// finite expansions whose polygon reaches the minimum.
pub fn gauss_from_polygon(np: &NewtonPolygon, s: &BigRational) -> Option<BigRational> {
    np.vertices
        .iter()
        .map(|(n, v)| v.as_rational().map(|r| big(*n) + s * r))
        .collect::<Option<Vec<_>>>()?
        .into_iter()
        .min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{tq, HahnSeries};
    use crate::value_group::rat;

    fn real(n: i64, d: i64) -> SlopeValue {
        SlopeValue::Real(rat(n, d))
    }

    #[test]
    fn single_teichmuller_has_no_slopes() {
        let np = newton_polygon(&WittVec::teichmuller(tq(2, 1, 1), 3)).unwrap();
        assert_eq!(np.vertices.len(), 1);
        assert_eq!(np_width(&np), 0);
        assert!(np.complete);
    }

    #[test]
    fn two_point_hull() {
        let h = WittVec::from_teichmuller(0, vec![HahnSeries::one(2, GroupKind::Zp1), tq(2, -1, 1)]).unwrap();
        let np = newton_polygon(&h).unwrap();
        assert_eq!(np.slopes(), vec![(real(-1, 1), 1)]);
        assert_eq!(np_width(&np), 1);
        assert_eq!(np_height(&np), GammaElt::Zp1(rat(-1, 1)));
    }

    #[test]
    fn archimedean_generator_slopes() {
        // v = 1, 3/4, 11/16, 43/64
        let cs = vec![tq(2, 1, 1), tq(2, 3, 4), tq(2, 11, 16), tq(2, 43, 64)];
        let np = newton_polygon(&WittVec::from_teichmuller(0, cs).unwrap()).unwrap();
        let s = np.slopes();
        assert_eq!(s[0], (real(-1, 4), 1));
        assert_eq!(s[1], (real(-1, 16), 1));
    }

    #[test]
    fn unknown_tail_certifies_nothing() {
        let h = WittVec::from_teichmuller(0, vec![HahnSeries::one(2, GroupKind::Zp1), tq(2, -1, 1)])
            .unwrap()
            .with_tail(Tail::Unknown);
        let np = newton_polygon(&h).unwrap();
        assert_eq!(np.certified_prefix, 0);
        assert!(!np.complete);
    }

    #[test]
    fn low_tail_blocks_certification() {
        // unseen coordinates may reach valuation -5 at level 2
        let h = WittVec::from_teichmuller(0, vec![HahnSeries::one(2, GroupKind::Zp1), tq(2, -1, 1)])
            .unwrap()
            .with_tail(Tail::AtLeast(GammaElt::Zp1(rat(-5, 1))));
        let np = newton_polygon(&h).unwrap();
        assert_eq!(np.certified_prefix, 0);
        let h = h.with_tail(Tail::AtLeast(GammaElt::Zp1(rat(-1, 1))));
        let np = newton_polygon(&h).unwrap();
        assert_eq!(np.certified_prefix, 1);
        assert!(np.complete);
    }

    #[test]
    fn minkowski_merges() {
        let a = newton_polygon(
            &WittVec::from_teichmuller(0, vec![HahnSeries::one(2, GroupKind::Zp1), tq(2, -1, 1)]).unwrap(),
        )
        .unwrap();
        let b = newton_polygon(
            &WittVec::from_teichmuller(0, vec![HahnSeries::one(2, GroupKind::Zp1), tq(2, -2, 1)]).unwrap(),
        )
        .unwrap();
        let m = np_minkowski(&a, &b);
        assert_eq!(m.slopes(), vec![(real(-2, 1), 1), (real(-1, 1), 1)]);
        let e = newton_polygon(&WittVec::teichmuller(HahnSeries::one(2, GroupKind::Zp1), 1)).unwrap();
        assert_eq!(np_minkowski(&a, &e).slopes(), a.slopes());
    }

    #[test]
    fn gauss_norms() {
        let h = WittVec::p_power(2, GroupKind::Zp1, 1, 3).mul_teichmuller(&tq(2, 1, 1)).unwrap();
        assert_eq!(gauss_norm(&h, &rat(1, 1)).unwrap(), GaussNorm { value: rat(2, 1), exact: true });
        let h = WittVec::teichmuller(tq(2, 3, 2), 2);
        assert_eq!(gauss_norm(&h, &rat(1, 3)).unwrap().value, rat(1, 2));
        let lex = WittVec::teichmuller(HahnSeries::one(2, GroupKind::Lex), 2);
        assert_eq!(gauss_norm(&lex, &rat(1, 1)), Err(Error::UnsupportedVariant(GroupKind::Lex)));
    }

    #[test]
    fn slope_test_examples() {
        let g = WittVec::from_teichmuller(0, vec![tq(2, 1, 1), HahnSeries::one(2, GroupKind::Zp1)]).unwrap();
        let h = g.mul(&WittVec::teichmuller(tq(2, 1, 1), 2)).unwrap();
        assert_eq!(divisibility_slope_test(&h, &g), SlopeVerdict::Pass);
        let h = WittVec::teichmuller(tq(2, 2, 1), 2);
        assert_eq!(divisibility_slope_test(&h, &g), SlopeVerdict::Fail);
    }
}
