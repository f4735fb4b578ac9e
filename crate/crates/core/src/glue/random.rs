use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{zq, HahnSeries};
use crate::value_group::{GammaElt, GroupKind};
use crate::witt::{Membership, RingTag, WittVec};

use super::datum::{GlueDatum, GlueFactor};
use super::matrix::{Residual, WittMatrix};
use super::normal::normalize;
use super::GlueCertificate;

/// A bundle built from a known basis: `T = U_0 Q_0^-1` with `U_0` a word
/// over `A[1/p]` and `Q_0^-1` a word over `W(K)`, then scrambled by an
/// inserted cancelling pair.
#[derive(Debug, Clone, Serialize)]
pub struct RoundTrip {
    pub datum: GlueDatum,
    /// The known basis `Q_0` and its inverse.
    pub q0: WittMatrix,
    pub q0_inv: WittMatrix,
    /// Draws rejected because the scrambled word left the supported family.
    pub rejected: usize,
}

/// `Q_0^-1 Q` for a recovered basis `Q`, and whether it is invertible
/// over `A`.
#[derive(Debug, Clone, Serialize)]
pub struct Recovery {
    pub change_in_a: Membership,
    pub inverse_in_a: Membership,
    pub inverse_check: Residual,
    pub passed: bool,
}

fn exp(rng: &mut impl Rng, choices: &[(i64, i64)]) -> GammaElt {
    let (n, d) = *choices.choose(rng).unwrap();
    zq(n, d)
}

fn coef(rng: &mut impl Rng, p: u32) -> u32 {
    rng.gen_range(1..p)
}

fn random_perm(rng: &mut impl Rng, d: usize) -> Vec<usize> {
    let mut s: Vec<usize> = (0..d).collect();
    s.shuffle(rng);
    s
}

// Exact expansion on levels `from..from + len` with monomial coordinates.
fn expansion(rng: &mut impl Rng, p: u32, from: i64, len: usize, exps: &[(i64, i64)]) -> Result<WittVec> {
    let coords: Vec<HahnSeries> = (0..len)
        .map(|k| {
            if k > 0 && rng.gen_bool(0.4) {
                HahnSeries::zero(p, GroupKind::Zp1)
            } else {
                HahnSeries::monomial(p, exp(rng, exps), coef(rng, p))
            }
        })
        .collect();
    WittVec::from_teichmuller(from, coords)
}

fn elem_position(rng: &mut impl Rng, d: usize) -> (usize, usize) {
    let i = rng.gen_range(0..d);
    let j = (i + rng.gen_range(1..d)) % d;
    (i, j)
}

const INTEGRAL: &[(i64, i64)] = &[(0, 1), (1, 2), (1, 1), (3, 2)];
const ANY: &[(i64, i64)] = &[(-1, 1), (-1, 2), (0, 1), (1, 2), (1, 1)];

fn a_factor(rng: &mut impl Rng, p: u32, d: usize, pole: bool) -> Result<GlueFactor> {
    let zero = GammaElt::zero(GroupKind::Zp1);
    let pick = if d == 1 { 0 } else { rng.gen_range(0..3) };
    Ok(match pick {
        0 => {
            let mut ds: Vec<(i64, GammaElt)> = (0..d).map(|_| (rng.gen_range(0..=1), zero.clone())).collect();
            if pole {
                ds[rng.gen_range(0..d)].0 = -1;
            }
            GlueFactor::Diag(ds)
        }
        1 => {
            let (i, j) = elem_position(rng, d);
            let e = if pole {
                expansion(rng, p, -1, 2, INTEGRAL)?
            } else {
                let len = rng.gen_range(1..=2);
                expansion(rng, p, 0, len, INTEGRAL)?
            };
            GlueFactor::Elem { i, j, e }
        }
        _ => GlueFactor::Perm(random_perm(rng, d)),
    })
}

fn b_factor(rng: &mut impl Rng, p: u32, d: usize) -> Result<GlueFactor> {
    let pick = if d == 1 { 0 } else { rng.gen_range(0..3) };
    Ok(match pick {
        0 => GlueFactor::Diag((0..d).map(|_| (0, exp(rng, ANY))).collect()),
        1 => {
            let (i, j) = elem_position(rng, d);
            let len = rng.gen_range(1..=2);
            GlueFactor::Elem { i, j, e: expansion(rng, p, 0, len, ANY)? }
        }
        _ => GlueFactor::Perm(random_perm(rng, d)),
    })
}

fn word_product(p: u32, d: usize, word: &[GlueFactor]) -> Result<WittMatrix> {
    word.iter()
        .rev()
        .try_fold(WittMatrix::identity(p, GroupKind::Zp1, d), |acc, f| f.apply_left(&acc))
}

/// Draw a round-trip instance of rank `d`. Words whose normalization leaves
/// the supported family are redrawn.
pub fn random_round_trip(rng: &mut impl Rng, p: u32, d: usize, n: i64, gamma_max: GammaElt) -> Result<RoundTrip> {
    for rejected in 0..1000 {
        let pole = rng.gen_bool(0.5);
        let a_len = rng.gen_range(1..=2);
        let a_word: Vec<GlueFactor> = (0..a_len)
            .map(|k| a_factor(rng, p, d, pole && k == 0))
            .collect::<Result<_>>()?;
        let b_word: Vec<GlueFactor> = (0..rng.gen_range(1..=2)).map(|_| b_factor(rng, p, d)).collect::<Result<_>>()?;
        let mut word: Vec<GlueFactor> = a_word.iter().chain(&b_word).cloned().collect();
        let x = if rng.gen_bool(0.5) { a_factor(rng, p, d, false)? } else { b_factor(rng, p, d)? };
        let at = rng.gen_range(0..=word.len());
        let x_inv = x.inverse()?;
        word.insert(at, x_inv);
        word.insert(at, x);
        let datum = GlueDatum::new(p, GroupKind::Zp1, d, word, n, gamma_max.clone())?;
        if normalize(&datum.factors).is_err() {
            continue;
        }
        let q0_inv = word_product(p, d, &b_word)?;
        let q0_word: Vec<GlueFactor> = b_word.iter().rev().map(GlueFactor::inverse).collect::<Result<_>>()?;
        let q0 = word_product(p, d, &q0_word)?;
        return Ok(RoundTrip { datum, q0, q0_inv, rejected });
    }
    Err(Error::Invalid("no supported word in 1000 draws".into()))
}

impl RoundTrip {
    /// Compare a recovered basis with `Q_0`: the change of basis must be
    /// invertible over `A`.
    pub fn recovery(&self, cert: &GlueCertificate) -> Result<Recovery> {
        let gm = &self.datum.gamma_max;
        let x = self.q0_inv.mul(&cert.q)?;
        let x_inv = x.inverse(gm)?;
        let inverse_check = x.mul(&x_inv)?.residual(&self.datum.identity_matrix(), self.datum.n, gm);
        let change_in_a = x.membership(RingTag::A);
        let inverse_in_a = x_inv.membership(RingTag::A);
        let passed = change_in_a == Membership::Yes && inverse_in_a == Membership::Yes && inverse_check.passed();
        Ok(Recovery { change_in_a, inverse_in_a, inverse_check, passed })
    }
}
