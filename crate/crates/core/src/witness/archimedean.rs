use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::HahnSeries;
use crate::value_group::{in_value_group, GammaElt, GroupKind};
use crate::witt::{poly::table_cap, Tail, WittVec};

use super::IdealPair;

/// `f = [x_0]`, `g = sum p^n [x_n]` with `v(x_n) = a_n` strictly decreasing
/// to a limit `r` outside `Z[1/p]`, with strictly decreasing gaps.
#[derive(Debug, Clone, Serialize)]
pub struct ArchimedeanWitness {
    pub p: u32,
    pub a: Vec<GammaElt>,
    /// Limit of `a_n`; a real number outside the value group, carried as a
    /// rational.
    #[serde(serialize_with = "crate::witness::archimedean::ser_rat")]
    pub r: BigRational,
    /// `2 a_0 - r`: every `h in (f) ∩ (g)` has `v(h_0) > bound`.
    #[serde(serialize_with = "crate::witness::archimedean::ser_rat")]
    pub bound: BigRational,
    pub f: WittVec,
    pub g: WittVec,
    #[serde(skip)]
    x0: HahnSeries,
}

pub(crate) fn ser_rat<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::value_group::RatJson::from_rat(x).serialize(s)
}

fn pw(p: u32, e: u32) -> BigRational {
    BigRational::from_integer(num_traits::pow(BigInt::from(p), e as usize))
}

/// Default instance: `a_0 = 1`, `a_n - a_(n+1) = p^(-2(n+1))`, so
/// `r = 1 - 1/(p^2 - 1)`; for `p = 2` this is `a = 1, 3/4, 11/16, ...`,
/// `r = 2/3`. `g` is kept to `min(depth + 1, 4)` levels.
pub fn build_archimedean_witness(p: u32, depth: usize) -> Result<ArchimedeanWitness> {
    ArchimedeanWitness::default_sequence(p, depth, 4.min(depth + 1))
}

impl ArchimedeanWitness {
    pub fn default_sequence(p: u32, depth: usize, levels: usize) -> Result<Self> {
        let mut a = vec![BigRational::one()];
        for k in 1..=depth.max(levels) as u32 {
            let prev = a.last().unwrap().clone();
            a.push(prev - pw(p, 2 * k).recip());
        }
        let pp = pw(p, 2);
        let r = BigRational::one() - (pp - BigRational::one()).recip();
        Self::from_sequence(p, a, r, levels)
    }

    /// Validate a user sequence and assemble `f`, `g`.
    pub fn from_sequence(p: u32, a: Vec<BigRational>, r: BigRational, levels: usize) -> Result<Self> {
        if levels == 0 || levels > a.len() {
            return Err(Error::Invalid(format!("need 1 <= levels <= {} sequence terms", a.len())));
        }
        if levels > table_cap() {
            return Err(Error::TableCap { requested: levels, cap: table_cap() });
        }
        if in_value_group(&r, p) {
            return Err(Error::Invalid(format!("limit {r} lies in Z[1/{p}]")));
        }
        if !r.is_positive() {
            return Err(Error::Invalid("limit must be positive".into()));
        }
        let mut gam = Vec::with_capacity(a.len());
        for x in &a {
            gam.push(GammaElt::zp1(x.clone(), p)?);
            if *x <= r {
                return Err(Error::Invalid(format!("term {x} does not exceed the limit {r}")));
            }
        }
        let diffs: Vec<BigRational> = a.windows(2).map(|w| &w[0] - &w[1]).collect();
        if diffs.iter().any(|d| !d.is_positive()) {
            return Err(Error::Invalid("sequence is not strictly decreasing".into()));
        }
        if diffs.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Invalid("gaps are not strictly decreasing".into()));
        }
        let coords: Vec<HahnSeries> = gam[..levels].iter().map(|e| HahnSeries::t_pow(p, e.clone())).collect();
        let x0 = coords[0].clone();
        // unseen coordinates have valuation in (r, a_levels]
        let tail = Tail::AtLeast(GammaElt::Zp1(below_in_group(&r, p)));
        let g = WittVec::from_teichmuller(0, coords)?.with_tail(tail);
        let f = WittVec::teichmuller(x0.clone(), levels);
        let bound = &a[0] * BigRational::from_integer(2.into()) - &r;
        Ok(ArchimedeanWitness { p, a: gam, r, bound, f, g, x0 })
    }

    pub fn levels(&self) -> usize {
        self.g.coords().len()
    }
}

// Largest element of p^-12 Z below x.
fn below_in_group(x: &BigRational, p: u32) -> BigRational {
    let scale = pw(p, 12);
    let y = x * &scale;
    let fl = y.numer().div_floor(y.denom());
    BigRational::from_integer(fl) / scale
}

/// `ceil(x p^e) / p^e`.
fn ceil_at(x: &BigRational, p: u32, e: u32) -> BigRational {
    let scale = pw(p, e);
    let y = x * &scale;
    let c = y.numer().div_ceil(y.denom());
    BigRational::from_integer(c) / scale
}

impl IdealPair for ArchimedeanWitness {
    fn f(&self) -> &WittVec {
        &self.f
    }

    fn f_coord(&self) -> &HahnSeries {
        &self.x0
    }

    fn g(&self) -> &WittVec {
        &self.g
    }

    fn gamma_prec(&self) -> GammaElt {
        GammaElt::from_int(GroupKind::Zp1, 16)
    }

    /// `c_k = t^(v_k - a_0)` where `v_k = ceil(bound p^e) / p^e` for the
    /// smallest `e` beyond the previous one that lowers `v`.
    fn multipliers(&self, kmax: usize) -> Result<Vec<HahnSeries>> {
        let a0 = self.a[0].as_rational().expect("scalar").clone();
        let mut out = Vec::with_capacity(kmax);
        let mut prev: Option<BigRational> = None;
        let mut e = 0u32;
        while out.len() < kmax {
            e += 1;
            if e > 256 {
                return Err(Error::PrecisionExhausted("chain exponents exceed p^-256".into()));
            }
            let v = ceil_at(&self.bound, self.p, e);
            if prev.as_ref().map_or(true, |pv| v < *pv) {
                out.push(HahnSeries::t_pow(self.p, GammaElt::Zp1(&v - &a0)));
                prev = Some(v);
            }
        }
        Ok(out)
    }

    fn lower_bounds(&self) -> Vec<GammaElt> {
        vec![GammaElt::Zp1(self.bound.clone())]
    }

    fn infimum_not_attained(&self) -> bool {
        !in_value_group(&self.bound, self.p) && !self.bound.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value_group::rat;
    use crate::witness::{ideal_chain_report, intersection_membership, IntersectionVerdict};

    #[test]
    fn default_p2() {
        let w = build_archimedean_witness(2, 5).unwrap();
        let a: Vec<_> = w.a.iter().take(3).map(|g| g.as_rational().unwrap().clone()).collect();
        assert_eq!(a, vec![rat(1, 1), rat(3, 4), rat(11, 16)]);
        assert_eq!(w.r, rat(2, 3));
        assert_eq!(w.bound, rat(4, 3));
        assert!(!in_value_group(&w.r, 2));
    }

    #[test]
    fn chain_values() {
        let w = build_archimedean_witness(2, 5).unwrap();
        let rep = ideal_chain_report(&w, 3).unwrap();
        let v: Vec<_> = rep.entries.iter().map(|e| e.leading_valuation.clone()).collect();
        assert_eq!(v, vec![GammaElt::Zp1(rat(3, 2)), GammaElt::Zp1(rat(11, 8)), GammaElt::Zp1(rat(43, 32))]);
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn f_alone_is_out_and_zero_is_in() {
        let w = build_archimedean_witness(2, 5).unwrap();
        assert_eq!(intersection_membership(&w.f, &w).verdict, IntersectionVerdict::Out);
        let zero = WittVec::zero(2, GroupKind::Zp1, 4);
        assert_eq!(intersection_membership(&zero, &w).verdict, IntersectionVerdict::In);
    }

    #[test]
    fn rejects_bad_sequences() {
        let bad = ArchimedeanWitness::from_sequence(2, vec![rat(1, 1), rat(3, 4), rat(1, 2)], rat(1, 3), 3);
        assert!(bad.is_err(), "gaps must shrink");
        let bad = ArchimedeanWitness::from_sequence(2, vec![rat(1, 1), rat(3, 4)], rat(1, 2), 2);
        assert!(bad.is_err(), "limit in the group");
    }
}
