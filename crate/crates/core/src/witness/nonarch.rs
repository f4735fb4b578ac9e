use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::HahnSeries;
use crate::value_group::{GammaElt, GroupKind};
use crate::witt::{poly::table_cap, Tail, WittVec};

use super::IdealPair;

/// Rank-two witness: `x = t^(1,0)`, `y = t^(0,1)`, so `x` is divisible by
/// every power of `y`. `f = [x]` and `g = sum p^n [x / y^(R_n)]` with
/// `R_n = r_1 + ... + r_n` increasing without bound.
#[derive(Debug, Clone, Serialize)]
pub struct NonArchWitness {
    pub p: u32,
    pub r: Vec<GammaElt>,
    pub partial_sums: Vec<GammaElt>,
    pub f: WittVec,
    pub g: WittVec,
    /// How many multiples `v(x) + n v(y)` the chain is checked against.
    pub depth: usize,
    #[serde(skip)]
    x: HahnSeries,
}

fn lex(hi: BigRational, lo: BigRational) -> GammaElt {
    GammaElt::Lex(hi, lo)
}

fn pw(p: u32, e: u32) -> BigRational {
    BigRational::from_integer(num_traits::pow(BigInt::from(p), e as usize))
}

/// Default `r_n = 1 + p^-n`; `g` is kept to `min(depth + 1, 4)` levels.
pub fn build_nonarchimedean_witness(p: u32, depth: usize) -> Result<NonArchWitness> {
    let levels = 4.min(depth + 1);
    let r = (1..=depth.max(levels) as u32)
        .map(|n| BigRational::one() + pw(p, n).recip())
        .collect();
    NonArchWitness::from_exponents(p, r, levels, depth)
}

impl NonArchWitness {
    /// Validate `r_1, r_2, ...` (positive, strictly decreasing, in `Z[1/p]`)
    /// and assemble `f`, `g`.
    pub fn from_exponents(p: u32, r: Vec<BigRational>, levels: usize, depth: usize) -> Result<Self> {
        if levels == 0 || levels > r.len() + 1 {
            return Err(Error::Invalid(format!("need 1 <= levels <= {}", r.len() + 1)));
        }
        if levels > table_cap() {
            return Err(Error::TableCap { requested: levels, cap: table_cap() });
        }
        if r.iter().any(|x| !x.is_positive()) {
            return Err(Error::Invalid("exponents must be positive".into()));
        }
        if r.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Invalid("exponents must decrease strictly".into()));
        }
        // a decreasing positive sequence with r_n >= 1 has divergent sum
        if r.last().map_or(false, |x| *x < BigRational::one()) {
            return Err(Error::Invalid(
                "divergence is only certified here for exponents bounded below by 1".into(),
            ));
        }
        let mut sums = vec![BigRational::zero()];
        for x in &r {
            let next = sums.last().unwrap() + x;
            sums.push(next);
        }
        let one = BigRational::one();
        let coords = sums[..levels]
            .iter()
            .map(|s| Ok(HahnSeries::t_pow(p, GammaElt::lex(one.clone(), -s, p)?)))
            .collect::<Result<Vec<_>>>()?;
        let x = coords[0].clone();
        // every coordinate has valuation (1, -R) > (1/2, 0)
        let tail = Tail::AtLeast(lex(BigRational::new(1.into(), 2.into()), BigRational::zero()));
        let g = WittVec::from_teichmuller(0, coords)?.with_tail(tail);
        let f = WittVec::teichmuller(x.clone(), levels);
        Ok(NonArchWitness {
            p,
            r: r.into_iter().map(|x| lex(x, BigRational::zero())).collect(),
            partial_sums: sums.into_iter().map(|s| lex(s, BigRational::zero())).collect(),
            f,
            g,
            depth,
            x,
        })
    }

    /// Exponents of `g`'s coordinates, `(1, -R_n)`.
    pub fn coordinate_exponents(&self) -> Vec<GammaElt> {
        self.g
            .coords()
            .iter()
            .map(|c| c.terms()[0].0.clone())
            .collect()
    }
}

impl IdealPair for NonArchWitness {
    fn f(&self) -> &WittVec {
        &self.f
    }

    fn f_coord(&self) -> &HahnSeries {
        &self.x
    }

    fn g(&self) -> &WittVec {
        &self.g
    }

    fn gamma_prec(&self) -> GammaElt {
        GammaElt::from_int(GroupKind::Lex, 16)
    }

    /// `c_k = t^(p^-k, 0)`, so `v(h_k,0) = (1 + p^-k, 0)`.
    fn multipliers(&self, kmax: usize) -> Result<Vec<HahnSeries>> {
        Ok((1..=kmax as u32)
            .map(|k| HahnSeries::t_pow(self.p, lex(pw(self.p, k).recip(), BigRational::zero())))
            .collect())
    }

    /// `v(x) + n v(y) = (1, n)` for `n = 0..=depth`.
    fn lower_bounds(&self) -> Vec<GammaElt> {
        (0..=self.depth as i64)
            .map(|n| lex(BigRational::one(), BigRational::from_integer(n.into())))
            .collect()
    }

    /// The bounds `(1, n)` have no supremum attained by any `(1 + e, 0)`.
    fn infimum_not_attained(&self) -> bool {
        self.x.kind() == GroupKind::Lex
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value_group::rat;
    use crate::witness::ideal_chain_report;

    #[test]
    fn partial_sums_and_exponents() {
        let w = build_nonarchimedean_witness(2, 5).unwrap();
        assert_eq!(w.partial_sums[3], lex(rat(31, 8), rat(0, 1)));
        assert!(lex(rat(1, 1), rat(0, 1)) - lex(rat(0, 1), rat(5, 1)) > GammaElt::zero(GroupKind::Lex));
        assert_eq!(w.coordinate_exponents()[1], lex(rat(1, 1), rat(-3, 2)));
    }

    #[test]
    fn chain_has_no_minimum() {
        let w = build_nonarchimedean_witness(2, 5).unwrap();
        let rep = ideal_chain_report(&w, 6).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert_eq!(rep.entries[0].leading_valuation, lex(rat(3, 2), rat(0, 1)));
    }
}
