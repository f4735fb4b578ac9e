//! Totally ordered value groups: `Z[1/p]`, `Q`, and the rank-two lexicographic
//! group `Z[1/p] x Z[1/p]`.
//!
//! Every element is an exact reduced fraction (or a pair of them). The `Zp1`
//! variant does not carry its prime; the prime is a property of the ambient
//! field and is checked where elements are built from external input.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which ordered group an element lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Zp1,
    Rat,
    Lex,
}

/// An element of one of the supported value groups.
#[derive(Debug, Clone, Eq, Hash)]
pub enum GammaElt {
    /// Reduced `a / p^k`.
    Zp1(BigRational),
    /// Reduced rational.
    Rat(BigRational),
    /// `(hi, lo)` compared with `hi` dominant; both coordinates in `Z[1/p]`.
    Lex(BigRational, BigRational),
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// True iff the reduced denominator of `x` is a power of `p`.
pub fn in_value_group(x: &BigRational, p: u32) -> bool {
    let mut d = x.denom().abs();
    let p = BigInt::from(p);
    while d > BigInt::one() {
        let (q, r) = d.div_rem(&p);
        if !r.is_zero() {
            return false;
        }
        d = q;
    }
    true
}

fn check_zp1(x: &BigRational, p: u32) -> Result<()> {
    if in_value_group(x, p) {
        Ok(())
    } else {
        Err(Error::NotInValueGroup { value: x.to_string(), p })
    }
}

fn pow_p(p: u32, e: u32) -> BigRational {
    BigRational::from_integer(num_traits::pow(BigInt::from(p), e as usize))
}

impl GammaElt {
    pub fn zp1(x: BigRational, p: u32) -> Result<Self> {
        check_zp1(&x, p)?;
        Ok(GammaElt::Zp1(x))
    }

    pub fn lex(hi: BigRational, lo: BigRational, p: u32) -> Result<Self> {
        check_zp1(&hi, p)?;
        check_zp1(&lo, p)?;
        Ok(GammaElt::Lex(hi, lo))
    }

    pub fn zero(kind: GroupKind) -> Self {
        match kind {
            GroupKind::Zp1 => GammaElt::Zp1(BigRational::zero()),
            GroupKind::Rat => GammaElt::Rat(BigRational::zero()),
            GroupKind::Lex => GammaElt::Lex(BigRational::zero(), BigRational::zero()),
        }
    }

    /// The integer `n` embedded in the group (`(n, 0)` for `Lex`).
    pub fn from_int(kind: GroupKind, n: i64) -> Self {
        let q = BigRational::from_integer(BigInt::from(n));
        match kind {
            GroupKind::Zp1 => GammaElt::Zp1(q),
            GroupKind::Rat => GammaElt::Rat(q),
            GroupKind::Lex => GammaElt::Lex(q, BigRational::zero()),
        }
    }

    /// Same kind as `self`, scalar value `q` (lex: `(q, 0)`). Caller is
    /// responsible for `q` lying in the group.
    pub fn like(&self, q: BigRational) -> Self {
        match self {
            GammaElt::Zp1(_) => GammaElt::Zp1(q),
            GammaElt::Rat(_) => GammaElt::Rat(q),
            GammaElt::Lex(..) => GammaElt::Lex(q, BigRational::zero()),
        }
    }

    pub fn kind(&self) -> GroupKind {
        match self {
            GammaElt::Zp1(_) => GroupKind::Zp1,
            GammaElt::Rat(_) => GroupKind::Rat,
            GammaElt::Lex(..) => GroupKind::Lex,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            GammaElt::Zp1(x) | GammaElt::Rat(x) => x.is_zero(),
            GammaElt::Lex(a, b) => a.is_zero() && b.is_zero(),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    pub fn sign(&self) -> Ordering {
        match self {
            GammaElt::Zp1(x) | GammaElt::Rat(x) => x.numer().sign().cmp(&num_bigint::Sign::NoSign),
            GammaElt::Lex(a, b) => {
                a.numer().sign().cmp(&num_bigint::Sign::NoSign).then_with(|| b.numer().sign().cmp(&num_bigint::Sign::NoSign))
            }
        }
    }

    /// The scalar value for the archimedean variants.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            GammaElt::Zp1(x) | GammaElt::Rat(x) => Some(x),
            GammaElt::Lex(..) => None,
        }
    }

    /// Coordinates as a lexicographic pair; archimedean elements map to `(x, 0)`.
    pub fn to_pair(&self) -> (BigRational, BigRational) {
        match self {
            GammaElt::Zp1(x) | GammaElt::Rat(x) => (x.clone(), BigRational::zero()),
            GammaElt::Lex(a, b) => (a.clone(), b.clone()),
        }
    }

    fn map(&self, f: impl Fn(&BigRational) -> BigRational) -> Self {
        match self {
            GammaElt::Zp1(x) => GammaElt::Zp1(f(x)),
            GammaElt::Rat(x) => GammaElt::Rat(f(x)),
            GammaElt::Lex(a, b) => GammaElt::Lex(f(a), f(b)),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Result<Self> {
        match (self, other) {
            (GammaElt::Zp1(x), GammaElt::Zp1(y)) => Ok(GammaElt::Zp1(f(x, y))),
            (GammaElt::Rat(x), GammaElt::Rat(y)) => Ok(GammaElt::Rat(f(x, y))),
            (GammaElt::Lex(a, b), GammaElt::Lex(c, d)) => Ok(GammaElt::Lex(f(a, c), f(b, d))),
            _ => Err(Error::GroupMismatch { left: self.kind(), right: other.kind() }),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| qadd(a, b, 1))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| qadd(a, b, -1))
    }

    pub fn checked_cmp(&self, other: &Self) -> Result<Ordering> {
        if self.kind() != other.kind() {
            return Err(Error::GroupMismatch { left: self.kind(), right: other.kind() });
        }
        Ok(self.cmp(other))
    }

    /// Multiply by `p^e`; `e` may be negative (every supported group is p-divisible).
    pub fn scale_p(&self, p: u32, e: i32) -> Self {
        let f = pow_p(p, e.unsigned_abs());
        if e >= 0 {
            self.map(|x| x * &f)
        } else {
            self.map(|x| x / &f)
        }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        let k = BigRational::from_integer(BigInt::from(k));
        self.map(|x| x * &k)
    }

    pub fn mul_big(&self, k: &BigInt) -> Self {
        let k = BigRational::from_integer(k.clone());
        self.map(|x| x * &k)
    }

    /// `(numerator, denominator)` in machine integers, for the archimedean
    /// variants when both fit.
    pub(crate) fn small(&self) -> Option<(i64, i64)> {
        let x = self.as_rational()?;
        Some((x.numer().to_i64()?, x.denom().to_i64()?))
    }

    /// Inverse of [`GammaElt::small`]; `n / d` must be reduced with `d > 0`.
    pub(crate) fn from_small(kind: GroupKind, n: i64, d: i64) -> Self {
        let q = BigRational::new_raw(BigInt::from(n), BigInt::from(d));
        match kind {
            GroupKind::Zp1 => GammaElt::Zp1(q),
            GroupKind::Rat => GammaElt::Rat(q),
            GroupKind::Lex => GammaElt::Lex(q, BigRational::zero()),
        }
    }

    /// Membership of every coordinate in `Z[1/p]` (always true for `Zp1`/`Lex`
    /// elements built through the checked constructors).
    pub fn in_zp1(&self, p: u32) -> bool {
        match self {
            GammaElt::Zp1(x) | GammaElt::Rat(x) => in_value_group(x, p),
            GammaElt::Lex(a, b) => in_value_group(a, p) && in_value_group(b, p),
        }
    }
}

// `BigRational`'s own comparisons go through continued fractions; values
// here are always reduced with positive denominators, so the fields can be
// compared directly.
fn qeq(x: &BigRational, y: &BigRational) -> bool {
    x.numer() == y.numer() && x.denom() == y.denom()
}

fn small(x: &BigRational) -> Option<(i128, i128)> {
    Some((x.numer().to_i64()? as i128, x.denom().to_i64()? as i128))
}

fn qcmp(x: &BigRational, y: &BigRational) -> Ordering {
    if let (Some((a, b)), Some((c, d))) = (small(x), small(y)) {
        return (a * d).cmp(&(c * b));
    }
    if x.denom() == y.denom() {
        x.numer().cmp(y.numer())
    } else {
        (x.numer() * y.denom()).cmp(&(y.numer() * x.denom()))
    }
}

// Sum or difference, in machine integers when everything fits.
fn qadd(x: &BigRational, y: &BigRational, sign: i128) -> BigRational {
    if let (Some((a, b)), Some((c, d))) = (small(x), small(y)) {
        let (n, m) = if b == d { (a + sign * c, b) } else { (a * d + sign * c * b, b * d) };
        let g = n.gcd(&m);
        let (n, m) = (n / g, m / g);
        if let (Ok(n), Ok(m)) = (i64::try_from(n), i64::try_from(m)) {
            return BigRational::new_raw(BigInt::from(n), BigInt::from(m));
        }
    }
    if sign > 0 {
        x + y
    } else {
        x - y
    }
}

impl PartialEq for GammaElt {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (GammaElt::Zp1(x), GammaElt::Zp1(y)) | (GammaElt::Rat(x), GammaElt::Rat(y)) => qeq(x, y),
            (GammaElt::Lex(a, b), GammaElt::Lex(c, d)) => qeq(a, c) && qeq(b, d),
            _ => false,
        }
    }
}

impl PartialOrd for GammaElt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order within a variant; elements of different variants are ordered
/// by variant tag so collections stay well-formed. Use
/// [`GammaElt::checked_cmp`] where a mismatch should be an error.
impl Ord for GammaElt {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (GammaElt::Zp1(x), GammaElt::Zp1(y)) | (GammaElt::Rat(x), GammaElt::Rat(y)) => qcmp(x, y),
            (GammaElt::Lex(a, b), GammaElt::Lex(c, d)) => qcmp(a, c).then_with(|| qcmp(b, d)),
            _ => self.kind().cmp(&other.kind()),
        }
    }
}

// The operator impls panic on a variant mismatch; every container in this
// crate validates the variant on construction.
impl Add for &GammaElt {
    type Output = GammaElt;
    fn add(self, rhs: &GammaElt) -> GammaElt {
        self.checked_add(rhs).expect("value group variant mismatch")
    }
}

impl Sub for &GammaElt {
    type Output = GammaElt;
    fn sub(self, rhs: &GammaElt) -> GammaElt {
        self.checked_sub(rhs).expect("value group variant mismatch")
    }
}

impl Add for GammaElt {
    type Output = GammaElt;
    fn add(self, rhs: GammaElt) -> GammaElt {
        &self + &rhs
    }
}

impl Sub for GammaElt {
    type Output = GammaElt;
    fn sub(self, rhs: GammaElt) -> GammaElt {
        &self - &rhs
    }
}

impl Neg for &GammaElt {
    type Output = GammaElt;
    fn neg(self) -> GammaElt {
        self.map(|x| -x)
    }
}

impl Neg for GammaElt {
    type Output = GammaElt;
    fn neg(self) -> GammaElt {
        -&self
    }
}

impl fmt::Display for GammaElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaElt::Zp1(x) | GammaElt::Rat(x) => write!(f, "{x}"),
            GammaElt::Lex(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

// ---------------------------------------------------------------------------
// JSON

/// An integer that serializes as a JSON number when it fits in `i64`, and as a
/// decimal string otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonInt {
    Small(i64),
    Big(String),
}

impl JsonInt {
    pub fn from_big(x: &BigInt) -> Self {
        match x.to_i64() {
            Some(v) => JsonInt::Small(v),
            None => JsonInt::Big(x.to_string()),
        }
    }

    pub fn to_big(&self) -> Result<BigInt> {
        match self {
            JsonInt::Small(v) => Ok(BigInt::from(*v)),
            JsonInt::Big(s) => s
                .parse()
                .map_err(|_| Error::Json(format!("bad integer {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatJson {
    pub num: JsonInt,
    pub den: JsonInt,
}

impl RatJson {
    pub fn from_rat(x: &BigRational) -> Self {
        RatJson { num: JsonInt::from_big(x.numer()), den: JsonInt::from_big(x.denom()) }
    }

    pub fn to_rat(&self) -> Result<BigRational> {
        let den = self.den.to_big()?;
        if den.is_zero() {
            return Err(Error::Json("zero denominator".into()));
        }
        Ok(BigRational::new(self.num.to_big()?, den))
    }
}

/// Wire form of a [`GammaElt`]: `{"num","den"}` or `{"hi":{..},"lo":{..}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaJson {
    Lex { hi: RatJson, lo: RatJson },
    Scalar(RatJson),
}

impl GammaJson {
    pub fn from_gamma(g: &GammaElt) -> Self {
        match g {
            GammaElt::Zp1(x) | GammaElt::Rat(x) => GammaJson::Scalar(RatJson::from_rat(x)),
            GammaElt::Lex(a, b) => GammaJson::Lex { hi: RatJson::from_rat(a), lo: RatJson::from_rat(b) },
        }
    }

    pub fn to_gamma(&self, kind: GroupKind, p: u32) -> Result<GammaElt> {
        match (self, kind) {
            (GammaJson::Scalar(r), GroupKind::Zp1) => GammaElt::zp1(r.to_rat()?, p),
            (GammaJson::Scalar(r), GroupKind::Rat) => Ok(GammaElt::Rat(r.to_rat()?)),
            (GammaJson::Lex { hi, lo }, GroupKind::Lex) => GammaElt::lex(hi.to_rat()?, lo.to_rat()?, p),
            (_, k) => Err(Error::Json(format!("exponent does not match group {k:?}"))),
        }
    }
}

impl Serialize for GammaElt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GammaJson::from_gamma(self).serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn zp(n: i64, d: i64) -> GammaElt {
        GammaElt::zp1(rat(n, d), 2).unwrap()
    }

    fn lex(a: i64, b: i64) -> GammaElt {
        GammaElt::Lex(rat(a, 1), rat(b, 1))
    }

    #[test]
    fn comparisons() {
        assert_eq!(lex(1, 0).checked_cmp(&lex(0, 5)).unwrap(), Ordering::Greater);
        assert_eq!(zp(3, 4).checked_cmp(&zp(1, 1)).unwrap(), Ordering::Less);
        let two_thirds = GammaElt::Rat(rat(2, 3));
        assert_eq!(two_thirds.checked_cmp(&GammaElt::Rat(rat(2, 3))).unwrap(), Ordering::Equal);
        assert!(zp(1, 2).checked_cmp(&two_thirds).is_err());
    }

    #[test]
    fn arithmetic() {
        assert_eq!(&zp(1, 2) + &zp(1, 4), zp(3, 4));
        assert_eq!(zp(1, 2).scale_p(2, -1), zp(1, 4));
        let d = &lex(1, 0) - &lex(0, 3);
        assert_eq!(d, lex(1, -3));
        assert!(d.is_positive());
        assert!(zp(1, 2).checked_add(&lex(0, 1)).is_err());
    }

    #[test]
    fn value_group_membership() {
        assert!(!in_value_group(&rat(2, 3), 2));
        assert!(in_value_group(&rat(5, 8), 2));
        assert!(!in_value_group(&rat(4, 3), 2));
        assert!(GammaElt::zp1(rat(1, 3), 2).is_err());
    }

    #[test]
    fn json_shapes() {
        let j = serde_json::to_string(&zp(3, 4)).unwrap();
        assert_eq!(j, r#"{"num":3,"den":4}"#);
        let j = serde_json::to_string(&lex(1, -2)).unwrap();
        assert_eq!(j, r#"{"hi":{"num":1,"den":1},"lo":{"num":-2,"den":1}}"#);
        let big = GammaElt::Zp1(BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(2), 70)));
        let back: GammaJson = serde_json::from_str(&serde_json::to_string(&big).unwrap()).unwrap();
        assert_eq!(back.to_gamma(GroupKind::Zp1, 2).unwrap(), big);
    }

    fn arb_zp1() -> impl Strategy<Value = GammaElt> {
        (-64i64..64, 0u32..6).prop_map(|(n, k)| GammaElt::Zp1(rat(n, 1 << k)))
    }

    fn arb_lex() -> impl Strategy<Value = GammaElt> {
        (arb_zp1(), arb_zp1()).prop_map(|(a, b)| {
            GammaElt::Lex(a.as_rational().unwrap().clone(), b.as_rational().unwrap().clone())
        })
    }

    proptest! {
        #[test]
        fn order_compatible_with_addition(x in arb_zp1(), y in arb_zp1(), z in arb_zp1()) {
            if x < y {
                prop_assert!(&x + &z < &y + &z);
            }
        }

        #[test]
        fn lex_order_compatible_with_addition(x in arb_lex(), y in arb_lex(), z in arb_lex()) {
            if x < y {
                prop_assert!(&x + &z < &y + &z);
            }
        }

        #[test]
        fn scale_roundtrip(x in arb_lex(), e in -5i32..5) {
            prop_assert_eq!(x.scale_p(2, e).scale_p(2, -e), x);
        }

        #[test]
        fn zp1_closed(x in arb_zp1(), y in arb_zp1(), e in -5i32..5) {
            prop_assert!((&x + &y).in_zp1(2));
            prop_assert!(x.scale_p(2, e).in_zp1(2));
        }
    }
}
