use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::newton::{newton_polygon, np_minkowski, NewtonPolygon};
use crate::series::{HahnSeries, Valuation};
use crate::value_group::{GammaElt, GroupKind, RatJson};
use crate::witt::{
    divide_exact_teichmuller, divide_teichmuller, poly::table_cap, ring_membership, witt_divide_with_precision,
    Floor, Membership, RingTag, Tail, WittVec,
};

fn ser_rat<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    RatJson::from_rat(x).serialize(s)
}

fn ser_rats<S: serde::Serializer>(xs: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    xs.iter().map(RatJson::from_rat).collect::<Vec<_>>().serialize(s)
}

fn two_pow_neg(e: u64) -> BigRational {
    BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(2), e as usize))
}

/// `s_k = 2^-(2^k - 1)` for `k = 0..=depth`: `1, 1/2, 1/8, 1/128, ...`,
/// so that `s_(k+1) = s_k^2 / 2`.
pub fn build_rapid_sequence(depth: usize) -> Vec<BigRational> {
    (0..=depth).map(|k| two_pow_neg((1u64 << k) - 1)).collect()
}

/// `x = sum p^n [x_n]` with `v(x_n) = s_n`, over the group `Q`.
#[derive(Debug, Clone, Serialize)]
pub struct ScholzeElement {
    pub p: u32,
    #[serde(serialize_with = "ser_rats")]
    pub s: Vec<BigRational>,
    /// `r_k = s_(k-1) - s_k`, the negated slopes of `x`.
    #[serde(serialize_with = "ser_rats")]
    pub r: Vec<BigRational>,
    pub x: WittVec,
}

/// The element at `min(depth, table cap)` Witt levels; the sequence is kept
/// through `s_depth`.
pub fn build_scholze_element(p: u32, depth: usize) -> Result<ScholzeElement> {
    ScholzeElement::from_sequence(p, build_rapid_sequence(depth))
}

impl ScholzeElement {
    pub fn from_sequence(p: u32, s: Vec<BigRational>) -> Result<Self> {
        if s.len() < 2 {
            return Err(Error::Invalid("need at least s_0, s_1".into()));
        }
        if !s[0].is_one() {
            return Err(Error::Invalid("the sequence must start at s_0 = 1".into()));
        }
        for w in s.windows(2) {
            if !w[1].is_positive() || w[1] >= w[0] {
                return Err(Error::Invalid("sequence must decrease strictly and stay positive".into()));
            }
            if w[1] > &w[0] * &w[0] {
                return Err(Error::Invalid(format!("gap condition fails: {} > ({})^2", w[1], w[0])));
            }
        }
        let levels = (s.len() - 1).min(table_cap());
        let coords = s[..levels]
            .iter()
            .map(|v| HahnSeries::t_pow(p, GammaElt::Rat(v.clone())))
            .collect();
        // unseen coordinates have positive valuation tending to 0
        let x = WittVec::from_teichmuller(0, coords)?.with_tail(Tail::AtLeast(GammaElt::zero(GroupKind::Rat)));
        let r = s.windows(2).map(|w| &w[0] - &w[1]).collect();
        Ok(ScholzeElement { p, s, r, x })
    }

    pub fn depth(&self) -> usize {
        self.s.len() - 1
    }

    /// First known level with `s_n < c`.
    fn level_below(&self, c: &BigRational) -> Option<usize> {
        self.s.iter().position(|v| v < c)
    }

    /// Smallest depth whose sequence reaches below `c` (default sequence).
    fn depth_reaching(c: &BigRational) -> Option<usize> {
        (0..=12).find(|&k| two_pow_neg((1u64 << k) - 1) < *c)
    }
}

/// Sum maximal runs of consecutive selected terms.
pub fn regroup(terms: &[BigRational], selected: &[bool]) -> Vec<BigRational> {
    let mut out = Vec::new();
    let mut run: Option<BigRational> = None;
    for (t, &sel) in terms.iter().zip(selected) {
        if sel {
            run = Some(run.map_or_else(|| t.clone(), |acc| acc + t));
        } else if let Some(acc) = run.take() {
            out.push(acc);
        }
    }
    out.extend(run);
    out
}

/// No rational of height `<= H` can be the sum of a series whose terms
/// continue under the gap condition `u_(j+1) <= u_j^2`.
#[derive(Debug, Clone, Serialize)]
pub struct LiouvilleCertificate {
    pub height: u64,
    /// Number of listed terms summed.
    pub stage: usize,
    #[serde(serialize_with = "ser_rat")]
    pub partial_sum: BigRational,
    /// The unlisted tail lies in `(0, tail_bound]`.
    #[serde(serialize_with = "ser_rat")]
    pub tail_bound: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LiouvilleFailure {
    Empty,
    /// Terms must be positive, decreasing and below 1.
    BadTerms { index: usize },
    /// `u_(index+1) > u_index^2`. `suspected` is the simplest rational in
    /// the interval obtained by extrapolating the last ratio geometrically.
    GapViolated { index: usize, suspected: Option<(String, String)> },
    /// `a / b` lies in the interval that contains the sum.
    RationalInInterval { a: String, b: String },
}

/// Smallest-denominator integer fraction in `(lo, hi]`, denominators `<= h`.
fn first_rational(lo: &BigRational, hi: &BigRational, h: u64, closed: bool) -> Option<(BigInt, BigInt)> {
    for b in 1..=h {
        let bb = BigRational::from_integer(b.into());
        let (l, u) = (lo * &bb, hi * &bb);
        let fl = l.numer().div_floor(l.denom());
        let fu = u.numer().div_floor(u.denom());
        let hit = if closed && l.is_integer() { Some(fl.clone()) } else if fu > fl { Some(&fl + 1) } else { None };
        if let Some(a) = hit {
            return Some((a, BigInt::from(b)));
        }
    }
    None
}

pub fn liouville_certificate(terms: &[BigRational], height: u64) -> std::result::Result<LiouvilleCertificate, LiouvilleFailure> {
    let Some(last) = terms.last() else {
        return Err(LiouvilleFailure::Empty);
    };
    for (i, t) in terms.iter().enumerate() {
        if !t.is_positive() || *t >= BigRational::one() || (i > 0 && *t >= terms[i - 1]) {
            return Err(LiouvilleFailure::BadTerms { index: i });
        }
    }
    let partial: BigRational = terms.iter().cloned().sum();
    for i in 0..terms.len() - 1 {
        if terms[i + 1] > &terms[i] * &terms[i] {
            let ratio = &terms[terms.len() - 1] / &terms[terms.len().saturating_sub(2)];
            let suspected = if terms.len() >= 2 && ratio < BigRational::one() {
                let tail = last * &ratio / (BigRational::one() - &ratio);
                first_rational(&partial, &(&partial + tail), height, true)
                    .map(|(a, b)| (a.to_string(), b.to_string()))
            } else {
                None
            };
            return Err(LiouvilleFailure::GapViolated { index: i, suspected });
        }
    }
    let tail_bound = last * last / (BigRational::one() - last);
    if let Some((a, b)) = first_rational(&partial, &(&partial + &tail_bound), height, false) {
        return Err(LiouvilleFailure::RationalInInterval { a: a.to_string(), b: b.to_string() });
    }
    Ok(LiouvilleCertificate { height, stage: terms.len(), partial_sum: partial, tail_bound })
}

/// One requirement that a factorization `x = y z` in `W(m_K)` breaks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A coordinate of the factor has valuation `<= 0` (or sits at a
    /// negative level).
    NotInWmK { factor: char, level: i64, valuation: String },
    /// The certified slopes of `y` and `z` do not make up those of `x`.
    SlopeMismatch { x: Vec<String>, y_plus_z: Vec<String> },
    /// Every coordinate of the factor has valuation `>= c > 0`, which would
    /// force `v(x_n) >= c`, yet `v(x_level) < c`.
    BoundedBelow { factor: char, c: String, level: usize, x_valuation: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ObstructionOutcome {
    Violated { violations: Vec<Violation> },
    Indeterminate { suggested_depth: Option<usize>, reason: String },
}

impl ObstructionOutcome {
    pub fn is_violated(&self) -> bool {
        matches!(self, ObstructionOutcome::Violated { .. })
    }
}

fn wmk_violations(name: char, w: &WittVec) -> Vec<Violation> {
    let mut out = Vec::new();
    for (n, c) in w.levels() {
        match c.valuation() {
            Valuation::Finite(v) if n < 0 || !v.is_positive() => {
                out.push(Violation::NotInWmK { factor: name, level: n, valuation: v.to_string() })
            }
            _ => {}
        }
    }
    out
}

fn slope_strings(np: &NewtonPolygon, width: u64) -> Vec<String> {
    let mut out = Vec::new();
    let mut left = width;
    for (s, w) in np.slopes() {
        let take = w.min(left);
        for _ in 0..take {
            out.push(s.to_string());
        }
        left -= take;
        if left == 0 {
            break;
        }
    }
    out
}

/// Check `y z = x` at precision, then list the requirements it violates.
pub fn factorization_obstruction_check(x: &ScholzeElement, y: &WittVec, z: &WittVec) -> Result<ObstructionOutcome> {
    let prod = y.mul(z)?;
    if prod.precision() <= x.x.p_min() {
        return Err(Error::PrecisionExhausted("y z is known at no level of x".into()));
    }
    if let Some(level) = prod.first_difference(&x.x) {
        return Err(Error::NotAFactorization { level });
    }
    let mut violations = wmk_violations('y', y);
    violations.extend(wmk_violations('z', z));

    // slope bookkeeping only for factors certified in A
    if ring_membership(y, RingTag::A) == Membership::Yes && ring_membership(z, RingTag::A) == Membership::Yes {
        if let (Ok(nx), Ok(ny), Ok(nz)) = (newton_polygon(&x.x), newton_polygon(y), newton_polygon(z)) {
            let sum = np_minkowski(&ny, &nz);
            let width = nx.certified_prefix.min(sum.certified_prefix);
            let (sx, syz) = (slope_strings(&nx, width), slope_strings(&sum, width));
            if sx != syz {
                violations.push(Violation::SlopeMismatch { x: sx, y_plus_z: syz });
            }
        }
    }

    let mut suggestion: Option<usize> = None;
    for (name, f) in [('y', y), ('z', z)] {
        if let Floor::At(c) = f.floor() {
            if !c.is_positive() {
                continue;
            }
            let c = c.as_rational().expect("scalar group").clone();
            match x.level_below(&c) {
                Some(level) => violations.push(Violation::BoundedBelow {
                    factor: name,
                    c: c.to_string(),
                    level,
                    x_valuation: x.s[level].to_string(),
                }),
                None => {
                    let d = ScholzeElement::depth_reaching(&c);
                    suggestion = match (suggestion, d) {
                        (Some(a), Some(b)) => Some(a.min(b)),
                        (a, b) => a.or(b),
                    };
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(ObstructionOutcome::Indeterminate {
            suggested_depth: suggestion,
            reason: "no requirement is violated at this depth".into(),
        })
    } else {
        Ok(ObstructionOutcome::Violated { violations })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    pub label: String,
    pub y: WittVec,
    pub z: WittVec,
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Structured candidate factorizations of `x`: Teichmüller factors,
/// factors with a second level, non-monomial Teichmüller factors, the
/// trivial factorization, each with the roles of `y` and `z` swapped.
pub fn candidate_family(x: &ScholzeElement) -> Result<Vec<Candidate>> {
    let p = x.p;
    let t = |e: BigRational| HahnSeries::t_pow(p, GammaElt::Rat(e));
    let n = x.x.coords().len();
    let gamma_prec = GammaElt::Rat(q(8, 1));
    let mut out = Vec::new();
    let mut push_both = |label: String, y: WittVec, z: WittVec| {
        out.push(Candidate { label: format!("{label} | swapped"), y: z.clone(), z: y.clone() });
        out.push(Candidate { label, y, z });
    };
    let gammas = [
        q(1, 1), q(1, 2), q(1, 3), q(2, 3), q(1, 4), q(3, 4), q(1, 8), q(3, 8), q(5, 8), q(7, 8),
        q(1, 16), q(3, 16), q(1, 64), q(1, 128), q(1, 1024), q(3, 2), q(2, 1),
    ];
    for g in &gammas {
        let y = WittVec::teichmuller(t(g.clone()), n);
        let z = divide_exact_teichmuller(&x.x, &t(g.clone()))?;
        push_both(format!("y = [t^{g}]"), y, z);
    }
    for (g, d) in [(q(1, 2), q(1, 4)), (q(1, 4), q(1, 2)), (q(1, 8), q(1, 1)), (q(1, 2), q(-1, 4)), (q(1, 16), q(1, 16))] {
        let mut coords = vec![HahnSeries::zero(p, GroupKind::Rat); n];
        coords[0] = t(g.clone());
        coords[1] = t(&g + &d);
        let y = WittVec::from_teichmuller(0, coords)?;
        let z = witt_divide_with_precision(&x.x, &y, &gamma_prec)?;
        push_both(format!("y = [t^{g}] + p[t^{}]", &g + &d), y, z);
    }
    for (a, b) in [(q(1, 2), q(3, 4)), (q(1, 4), q(1, 3)), (q(1, 8), q(1, 2))] {
        let c = t(a.clone()).add(&t(b.clone()));
        let y = WittVec::teichmuller(c.clone(), n);
        let z = divide_teichmuller(&x.x, &c, &gamma_prec)?;
        push_both(format!("y = [t^{a} + t^{b}]"), y, z);
    }
    push_both("y = 1".into(), WittVec::one(p, GroupKind::Rat, n), x.x.clone());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rapid_sequence() {
        let s = build_rapid_sequence(3);
        assert_eq!(s, vec![q(1, 1), q(1, 2), q(1, 8), q(1, 128)]);
        let x = build_scholze_element(2, 4).unwrap();
        let total: BigRational = x.r.iter().cloned().sum();
        assert_eq!(total, BigRational::one() - &x.s[4]);
        assert_eq!(ring_membership(&x.x, RingTag::WmK), Membership::Yes);
    }

    #[test]
    fn regrouping() {
        let t = [q(1, 2), q(1, 4), q(1, 8), q(1, 16)];
        assert_eq!(regroup(&t, &[true, true, false, true]), vec![q(3, 4), q(1, 16)]);
        assert!(regroup(&t, &[false; 4]).is_empty());
    }

    #[test]
    fn liouville_examples() {
        let x = build_scholze_element(2, 6).unwrap();
        let odd: Vec<bool> = (1..=x.r.len()).map(|k| k % 2 == 1).collect();
        let u = regroup(&x.r, &odd);
        let cert = liouville_certificate(&u, 1000).unwrap();
        assert_eq!(cert.stage, 3);
        let geo: Vec<_> = (1..=10).map(|k| two_pow_neg(k)).collect();
        match liouville_certificate(&geo, 1000) {
            Err(LiouvilleFailure::GapViolated { suspected, .. }) => {
                assert_eq!(suspected, Some(("1".into(), "1".into())))
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(liouville_certificate(&[], 10).unwrap_err(), LiouvilleFailure::Empty);
    }

    #[test]
    fn liouville_is_sound_on_small_windows() {
        // a rational sum is never certified at a height reaching its denominator
        let terms = [q(1, 3), q(1, 10), q(1, 200)];
        let sum: BigRational = terms.iter().cloned().sum();
        let r = liouville_certificate(&terms, sum.denom().try_into().unwrap());
        assert!(r.is_ok() || matches!(r, Err(LiouvilleFailure::RationalInInterval { .. })));
        // a certificate really excludes every small-height rational
        if let Ok(c) = r {
            for b in 1..=c.height as i64 {
                for a in 0..=b {
                    let v = q(a, b);
                    assert!(!(v > c.partial_sum && v <= &c.partial_sum + &c.tail_bound));
                }
            }
        }
    }

    #[test]
    fn obstruction_examples() {
        let x = build_scholze_element(2, 4).unwrap();
        let half = HahnSeries::t_pow(2, GammaElt::Rat(q(1, 2)));
        let y = WittVec::teichmuller(half.clone(), 4);
        let z = divide_exact_teichmuller(&x.x, &half).unwrap();
        assert!(factorization_obstruction_check(&x, &y, &z).unwrap().is_violated());
        let one = WittVec::one(2, GroupKind::Rat, 4);
        match factorization_obstruction_check(&x, &one, &x.x).unwrap() {
            ObstructionOutcome::Violated { violations } => {
                assert!(violations.iter().any(|v| matches!(v, Violation::NotInWmK { factor: 'y', .. })))
            }
            o => panic!("{o:?}"),
        }
        assert!(matches!(
            factorization_obstruction_check(&x, &y, &y),
            Err(Error::NotAFactorization { .. })
        ));
    }
}

#[cfg(test)]
mod family {
    use super::*;

    #[test]
    fn every_candidate_violates() {
        let x = build_scholze_element(2, 6).unwrap();
        let fam = candidate_family(&x).unwrap();
        assert!(fam.len() >= 50, "{}", fam.len());
        for c in &fam {
            let o = factorization_obstruction_check(&x, &c.y, &c.z).unwrap();
            assert!(o.is_violated(), "{}: {o:?}", c.label);
        }
    }
}
