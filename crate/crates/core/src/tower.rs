//! Monomial model of the rings around the punctured spectrum of `A`.
//!
//! A monomial `p^a [t^gamma]` is a point `(a, gamma)`. Each ring is a
//! localization of a ring of definition, and a ring of definition is the
//! set of points satisfying finitely many half-plane constraints through
//! the origin. The three rational localizations `B1, B2, B12` also carry a
//! gauge, a minimum of linear forms that is nonnegative exactly on their
//! ring of definition.
//!
//! Only the finite shadow is modeled: no completions, no topologies.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value_group::{GammaElt, GroupKind};

/// `p^a [t^gamma]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Monomial {
    pub a: i64,
    pub gamma: GammaElt,
}

impl Monomial {
    pub fn new(a: i64, gamma: GammaElt) -> Self {
        Monomial { a, gamma }
    }

    /// Integer point `(a, g)` of the scalar group `kind`.
    pub fn int(kind: GroupKind, a: i64, g: i64) -> Self {
        Monomial { a, gamma: GammaElt::from_int(kind, g) }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial { a: self.a + other.a, gamma: &self.gamma + &other.gamma }
    }

    pub fn pow(&self, k: i64) -> Monomial {
        Monomial { a: self.a * k, gamma: self.gamma.mul_int(k) }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p^{}[t^{}]", self.a, self.gamma)
    }
}

/// `ca * a + cg * gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Form {
    pub ca: i64,
    pub cg: i64,
}

impl Form {
    pub const fn new(ca: i64, cg: i64) -> Self {
        Form { ca, cg }
    }

    pub fn eval(&self, m: &Monomial) -> GammaElt {
        &GammaElt::from_int(m.gamma.kind(), self.ca * m.a) + &m.gamma.mul_int(self.cg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TowerTag {
    A,
    A1,
    A2,
    A12,
    B1,
    B2,
    B12,
    B1p,
    B2p,
}

impl TowerTag {
    pub const ALL: [TowerTag; 9] = [
        TowerTag::A,
        TowerTag::A1,
        TowerTag::A2,
        TowerTag::A12,
        TowerTag::B1,
        TowerTag::B2,
        TowerTag::B12,
        TowerTag::B1p,
        TowerTag::B2p,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TowerTag::A => "A",
            TowerTag::A1 => "A1",
            TowerTag::A2 => "A2",
            TowerTag::A12 => "A12",
            TowerTag::B1 => "B1",
            TowerTag::B2 => "B2",
            TowerTag::B12 => "B12",
            TowerTag::B1p => "B1p",
            TowerTag::B2p => "B2p",
        }
    }

    pub fn parse(s: &str) -> Result<TowerTag> {
        TowerTag::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnsupportedTag(s.to_string()))
    }
}

impl fmt::Display for TowerTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One ring: ring of definition, inverted monomials, optional gauge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec {
    pub tag: TowerTag,
    /// The ring of definition is `{m : L(m) >= 0 for every L}`.
    pub region: Vec<Form>,
    /// Inverted monomials as `(a, gamma)` integer points.
    pub inverted: Vec<(i64, i64)>,
    /// The gauge is the minimum of these forms.
    pub gauge: Option<Vec<Form>>,
}

const X: Form = Form::new(1, 0);
const G: Form = Form::new(0, 1);
const S: Form = Form::new(1, 1);

const P: (i64, i64) = (1, 0);
const T: (i64, i64) = (0, 1);
const PT: (i64, i64) = (1, 1);

/// The nine rings with their regions and gauges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tower {
    pub rings: Vec<RingSpec>,
}

impl Default for Tower {
    fn default() -> Self {
        let ring = |tag, region: &[Form], inverted: &[(i64, i64)], gauge: Option<&[Form]>| RingSpec {
            tag,
            region: region.to_vec(),
            inverted: inverted.to_vec(),
            gauge: gauge.map(<[Form]>::to_vec),
        };
        let a_def = [X, G];
        let b1_def = [G, S];
        let b2_def = [X, S];
        let b12_def = [S];
        Tower {
            rings: vec![
                ring(TowerTag::A, &a_def, &[], None),
                ring(TowerTag::A1, &a_def, &[P], None),
                ring(TowerTag::A2, &a_def, &[T], None),
                ring(TowerTag::A12, &a_def, &[PT], None),
                ring(TowerTag::B1, &b1_def, &[P], Some(&b1_def)),
                ring(TowerTag::B2, &b2_def, &[T], Some(&b2_def)),
                ring(TowerTag::B12, &b12_def, &[PT], Some(&b12_def)),
                ring(TowerTag::B1p, &b1_def, &[P, T], None),
                ring(TowerTag::B2p, &b2_def, &[T, P], None),
            ],
        }
    }
}

impl Tower {
    pub fn ring(&self, tag: TowerTag) -> Result<&RingSpec> {
        self.rings
            .iter()
            .find(|r| r.tag == tag)
            .ok_or_else(|| Error::UnsupportedTag(format!("{tag} is missing from this tower")))
    }

    /// Replace the gauge of one ring (mutation tests).
    pub fn with_gauge(mut self, tag: TowerTag, gauge: Vec<Form>) -> Self {
        if let Some(r) = self.rings.iter_mut().find(|r| r.tag == tag) {
            r.gauge = Some(gauge);
        }
        self
    }

    pub fn with_region(mut self, tag: TowerTag, region: Vec<Form>) -> Self {
        if let Some(r) = self.rings.iter_mut().find(|r| r.tag == tag) {
            r.region = region;
        }
        self
    }

    /// `m` lies in the ring: some product of inverted monomials moves it
    /// into the ring of definition.
    pub fn member(&self, m: &Monomial, tag: TowerTag) -> Result<bool> {
        let r = self.ring(tag)?;
        let kind = m.gamma.kind();
        let units: Vec<Monomial> = r.inverted.iter().map(|&(a, g)| Monomial::int(kind, a, g)).collect();
        for l in &r.region {
            if !l.eval(m).is_negative() {
                continue;
            }
            // a violated constraint is repaired only by a unit that raises it;
            // units that lower some constraint are outside this calculus
            let mut repaired = false;
            for u in &units {
                let lu = l.eval(u);
                if lu.is_negative() {
                    return Err(Error::Invalid(format!("inverted monomial {u} leaves the region of {tag}")));
                }
                repaired |= lu.is_positive();
            }
            if !repaired {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `m` lies in the ring of definition itself.
    pub fn in_definition(&self, m: &Monomial, tag: TowerTag) -> Result<bool> {
        Ok(self.ring(tag)?.region.iter().all(|l| !l.eval(m).is_negative()))
    }

    pub fn gauge(&self, m: &Monomial, tag: TowerTag) -> Result<GammaElt> {
        let forms = self.ring(tag)?.gauge.as_ref().ok_or_else(|| Error::UnsupportedTag(format!("{tag} has no gauge")))?;
        forms
            .iter()
            .map(|l| l.eval(m))
            .min()
            .ok_or_else(|| Error::Invalid(format!("empty gauge for {tag}")))
    }

    /// Least gauge over the support of a finite monomial sum; `None` for the
    /// empty sum.
    pub fn gauge_eval(&self, expansion: &[Monomial], tag: TowerTag) -> Result<Option<GammaElt>> {
        let mut best: Option<GammaElt> = None;
        self.ring(tag)?
            .gauge
            .as_ref()
            .ok_or_else(|| Error::UnsupportedTag(format!("{tag} has no gauge")))?;
        for m in expansion {
            let g = self.gauge(m, tag)?;
            if best.as_ref().map_or(true, |b| g < *b) {
                best = Some(g);
            }
        }
        Ok(best)
    }
}

pub fn monomial_membership(m: &Monomial, tag: TowerTag) -> bool {
    Tower::default().member(m, tag).expect("the standard tower is well formed")
}

/// Gauge of a finite sum of monomials in `B1`, `B2` or `B12`.
pub fn gauge_eval(expansion: &[Monomial], tag: TowerTag) -> Result<Option<GammaElt>> {
    Tower::default().gauge_eval(expansion, tag)
}

/// Support of a product of two finite monomial sums.
pub fn product_support(x: &[Monomial], y: &[Monomial]) -> Vec<Monomial> {
    let mut out: Vec<Monomial> = x.iter().flat_map(|m| y.iter().map(move |n| m.mul(n))).collect();
    out.sort_by(|m, n| m.a.cmp(&n.a).then_with(|| m.gamma.cmp(&n.gamma)));
    out.dedup();
    out
}

/// A violated cell of the covering table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellFailure {
    pub cell: String,
    pub monomial: Monomial,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellReport {
    pub cell: String,
    pub checked: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub window: i64,
    pub cells: Vec<CellReport>,
    /// First few counterexamples per failing cell.
    pub failures: Vec<CellFailure>,
    pub passed: bool,
}

/// Restriction maps of the covering table: `U ∪ V -> U`, `U ∪ V -> V`,
/// `U -> U ∩ V`, `V -> U ∩ V`, one row per cover.
pub const ARROWS: [(TowerTag, TowerTag); 16] = [
    (TowerTag::A, TowerTag::B1),
    (TowerTag::A, TowerTag::B2),
    (TowerTag::B1, TowerTag::B12),
    (TowerTag::B2, TowerTag::B12),
    (TowerTag::A1, TowerTag::B1),
    (TowerTag::A1, TowerTag::B2p),
    (TowerTag::B1, TowerTag::B12),
    (TowerTag::B2p, TowerTag::B12),
    (TowerTag::A2, TowerTag::B1p),
    (TowerTag::A2, TowerTag::B2),
    (TowerTag::B1p, TowerTag::B12),
    (TowerTag::B2, TowerTag::B12),
    (TowerTag::A12, TowerTag::B1p),
    (TowerTag::A12, TowerTag::B2p),
    (TowerTag::B1p, TowerTag::B12),
    (TowerTag::B2p, TowerTag::B12),
];

const GAUGED: [TowerTag; 3] = [TowerTag::B1, TowerTag::B2, TowerTag::B12];
const MAX_EXAMPLES: usize = 3;

struct Cells {
    cells: Vec<CellReport>,
    failures: Vec<CellFailure>,
}

impl Cells {
    fn check(&mut self, cell: String, points: &[Monomial], mut f: impl FnMut(&Monomial) -> Result<Option<String>>) -> Result<()> {
        let mut bad = 0;
        for m in points {
            if let Some(detail) = f(m)? {
                if bad < MAX_EXAMPLES {
                    self.failures.push(CellFailure { cell: cell.clone(), monomial: m.clone(), detail });
                }
                bad += 1;
            }
        }
        self.cells.push(CellReport { cell, checked: points.len(), passed: bad == 0 });
        Ok(())
    }
}

fn fail_if(bad: bool, detail: impl FnOnce() -> String) -> Option<String> {
    bad.then(detail)
}

/// Check the compatibilities of the covering table on the integer window
/// `[-w, w]^2`.
pub fn covering_table_check(tower: &Tower, w: i64) -> Result<TableReport> {
    let kind = GroupKind::Rat;
    let points: Vec<Monomial> =
        (-w..=w).flat_map(|a| (-w..=w).map(move |g| Monomial::int(kind, a, g))).collect();
    let mut c = Cells { cells: Vec::new(), failures: Vec::new() };
    // enough powers of a unit to move any window point across a constraint
    let kmax = 4 * w.max(1) + 4;
    let t = Monomial::int(kind, 0, 1);
    let p = Monomial::int(kind, 1, 0);

    let localized = |m: &Monomial, base: TowerTag, u: &Monomial| -> Result<bool> {
        for k in 0..=kmax {
            if tower.member(&m.mul(&u.pow(k)), base)? {
                return Ok(true);
            }
        }
        Ok(false)
    };
    c.check("B1p = B1[1/[t]]".into(), &points, |m| {
        let (l, r) = (tower.member(m, TowerTag::B1p)?, localized(m, TowerTag::B1, &t)?);
        Ok(fail_if(l != r, || format!("B1p says {l}, B1[1/[t]] says {r}")))
    })?;
    c.check("B2p = B2[1/p]".into(), &points, |m| {
        let (l, r) = (tower.member(m, TowerTag::B2p)?, localized(m, TowerTag::B2, &p)?);
        Ok(fail_if(l != r, || format!("B2p says {l}, B2[1/p] says {r}")))
    })?;
    c.check("B12 contains B1 and B2".into(), &points, |m| {
        let in_union = tower.member(m, TowerTag::B1)? || tower.member(m, TowerTag::B2)?;
        Ok(fail_if(in_union && !tower.member(m, TowerTag::B12)?, || "in B1 or B2 but not in B12".into()))
    })?;
    for tag in TowerTag::ALL {
        c.check(format!("A in {tag}"), &points, |m| {
            Ok(fail_if(tower.member(m, TowerTag::A)? && !tower.member(m, tag)?, || format!("in A but not in {tag}")))
        })?;
    }
    let mut seen = Vec::new();
    for (src, dst) in ARROWS {
        if seen.contains(&(src, dst)) {
            continue;
        }
        seen.push((src, dst));
        c.check(format!("{src} -> {dst}"), &points, |m| {
            Ok(fail_if(tower.member(m, src)? && !tower.member(m, dst)?, || format!("in {src} but not in {dst}")))
        })?;
        if GAUGED.contains(&src) && GAUGED.contains(&dst) {
            c.check(format!("gauge {src} -> {dst}"), &points, |m| {
                let (gs, gd) = (tower.gauge(m, src)?, tower.gauge(m, dst)?);
                Ok(fail_if(gd < gs, || format!("gauge drops from {gs} to {gd}")))
            })?;
        }
    }
    for tag in GAUGED {
        c.check(format!("gauge {tag} >= 0 on its ring of definition"), &points, |m| {
            let (g, d) = (tower.gauge(m, tag)?, tower.in_definition(m, tag)?);
            Ok(fail_if(g.is_negative() == d, || format!("gauge {g}, in ring of definition: {d}")))
        })?;
    }
    // closure under products and gauge (super)additivity on a smaller window
    let small: Vec<Monomial> = points.iter().filter(|m| m.a.abs() <= w / 2 + 1).cloned().collect();
    for tag in TowerTag::ALL {
        c.check(format!("{tag} closed under products"), &small, |m| {
            if !tower.member(m, tag)? {
                return Ok(None);
            }
            for n in &small {
                if tower.member(n, tag)? && !tower.member(&m.mul(n), tag)? {
                    return Ok(Some(format!("times {n} leaves {tag}")));
                }
            }
            Ok(None)
        })?;
    }
    for tag in GAUGED {
        let linear = tower.ring(tag)?.gauge.as_ref().map_or(false, |g| g.len() == 1);
        c.check(format!("gauge {tag} on products"), &small, |m| {
            let gm = tower.gauge(m, tag)?;
            for n in &small {
                let sum = &gm + &tower.gauge(n, tag)?;
                let gp = tower.gauge(&m.mul(n), tag)?;
                if gp < sum || (linear && gp != sum) {
                    return Ok(Some(format!("times {n}: gauge {gp}, sum of gauges {sum}")));
                }
            }
            Ok(None)
        })?;
    }
    let passed = c.cells.iter().all(|x| x.passed);
    Ok(TableReport { window: w, cells: c.cells, failures: c.failures, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::zq;
    use proptest::prelude::*;

    fn m(a: i64, g: i64) -> Monomial {
        Monomial::int(GroupKind::Rat, a, g)
    }

    #[test]
    fn membership_examples() {
        assert!(monomial_membership(&m(-1, 1), TowerTag::B1));
        assert!(!monomial_membership(&m(1, -1), TowerTag::B1));
        assert!(monomial_membership(&m(1, -1), TowerTag::B2));
        assert!(monomial_membership(&m(0, -3), TowerTag::A2));
        assert!(!monomial_membership(&m(0, -3), TowerTag::A));
    }

    #[test]
    fn fractional_exponents() {
        let x = Monomial::new(-1, zq(3, 2));
        assert!(monomial_membership(&x, TowerTag::B1));
        assert!(!monomial_membership(&x, TowerTag::A));
        assert!(monomial_membership(&Monomial::new(1, zq(-1, 2)), TowerTag::B2));
    }

    #[test]
    fn gauge_examples() {
        let x = [m(1, -1), m(2, 0)];
        assert_eq!(gauge_eval(&x, TowerTag::B12).unwrap(), Some(GammaElt::from_int(GroupKind::Rat, 0)));
        assert_eq!(gauge_eval(&[m(0, 0)], TowerTag::B1).unwrap(), Some(GammaElt::from_int(GroupKind::Rat, 0)));
        assert_eq!(gauge_eval(&[], TowerTag::B2).unwrap(), None);
        assert!(matches!(gauge_eval(&x, TowerTag::A1), Err(Error::UnsupportedTag(_))));
    }

    #[test]
    fn standard_table_passes() {
        let r = covering_table_check(&Tower::default(), 5).unwrap();
        assert!(r.passed, "{:?}", r.failures);
    }

    #[test]
    fn corrupted_gauges_are_named() {
        let bad = Tower::default().with_gauge(TowerTag::B1, vec![G, X]);
        let r = covering_table_check(&bad, 5).unwrap();
        assert!(!r.passed);
        assert!(r.failures.iter().any(|f| f.cell.contains("gauge B1")));

        let bad = Tower::default().with_gauge(TowerTag::B12, vec![Form::new(1, 2)]);
        let r = covering_table_check(&bad, 5).unwrap();
        assert!(r.failures.iter().any(|f| f.cell.starts_with("gauge B1 -> B12") || f.cell.starts_with("gauge B2 -> B12")));
    }

    #[test]
    fn corrupted_region_is_named() {
        let bad = Tower::default().with_region(TowerTag::A, vec![X]);
        let r = covering_table_check(&bad, 5).unwrap();
        assert!(r.failures.iter().any(|f| f.cell == "A in A1"));

        let bad = Tower::default().with_region(TowerTag::B1, vec![G]);
        let r = covering_table_check(&bad, 5).unwrap();
        assert!(r.failures.iter().any(|f| f.cell == "gauge B1 >= 0 on its ring of definition"));
    }

    fn support() -> impl Strategy<Value = Vec<Monomial>> {
        prop::collection::vec((-6i64..=6, -6i64..=6).prop_map(|(a, g)| m(a, g)), 1..5)
    }

    proptest! {
        #[test]
        fn gauge_of_products(x in support(), y in support()) {
            for tag in GAUGED {
                let gx = gauge_eval(&x, tag).unwrap().unwrap();
                let gy = gauge_eval(&y, tag).unwrap().unwrap();
                let gxy = gauge_eval(&product_support(&x, &y), tag).unwrap().unwrap();
                prop_assert!(gxy >= &gx + &gy);
                if tag == TowerTag::B12 {
                    prop_assert_eq!(gxy, &gx + &gy);
                }
            }
        }

        #[test]
        fn regions_closed_under_products(a1 in -8i64..=8, g1 in -8i64..=8, a2 in -8i64..=8, g2 in -8i64..=8) {
            let (x, y) = (m(a1, g1), m(a2, g2));
            for tag in TowerTag::ALL {
                if monomial_membership(&x, tag) && monomial_membership(&y, tag) {
                    prop_assert!(monomial_membership(&x.mul(&y), tag));
                }
            }
        }
    }
}
