//! Rewriting a factor word for `T` as `U V` with `U` over `A[1/p]` and `V`
//! over `W(K)`.
//!
//! Every factor is split into an `A[1/p]`-part and a `W(K)`-part, then the
//! `W(K)`-parts are pushed to the right. Passing a factor across another
//! uses conjugation or a Steinberg commutator relation; the only split that
//! can fail is an element with a p-pole whose coefficient is not integral.

use crate::error::{Error, Result};
use crate::series::{HahnSeries, Valuation};
use crate::value_group::{GammaElt, GroupKind};
use crate::witt::{ring_membership, Membership, RingTag, WittVec};

use super::datum::{invert_perm, GlueFactor};
use super::matrix::{rmul, rneg, WittMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    /// Invertible over `A[1/p]`.
    A,
    /// Invertible over `W(K)`.
    B,
}

#[derive(Debug, Clone)]
pub(crate) enum Fac {
    /// `diag(p^a_i)`.
    DiagP(Vec<i64>),
    /// `diag([t^g_i])`.
    DiagT(Vec<GammaElt>),
    Perm(Vec<usize>),
    Elem { i: usize, j: usize, e: WittVec, side: Side },
}

impl Fac {
    pub(crate) fn side(&self) -> Side {
        match self {
            Fac::DiagP(_) | Fac::Perm(_) => Side::A,
            Fac::DiagT(_) => Side::B,
            Fac::Elem { side, .. } => *side,
        }
    }

    pub(crate) fn inverse(&self) -> Result<Fac> {
        Ok(match self {
            Fac::DiagP(a) => Fac::DiagP(a.iter().map(|x| -x).collect()),
            Fac::DiagT(g) => Fac::DiagT(g.iter().map(|x| -x).collect()),
            Fac::Perm(s) => Fac::Perm(invert_perm(s)),
            Fac::Elem { i, j, e, side } => Fac::Elem { i: *i, j: *j, e: rneg(e)?, side: *side },
        })
    }

    pub(crate) fn to_factor(&self, kind: GroupKind) -> GlueFactor {
        match self {
            Fac::DiagP(a) => GlueFactor::Diag(a.iter().map(|&x| (x, GammaElt::zero(kind))).collect()),
            Fac::DiagT(g) => GlueFactor::Diag(g.iter().map(|x| (0, x.clone())).collect()),
            Fac::Perm(s) => GlueFactor::Perm(s.clone()),
            Fac::Elem { i, j, e, .. } => GlueFactor::Elem { i: *i, j: *j, e: e.clone() },
        }
    }
}

/// Split `e = e_A + e_B` with `e_A` the negative levels (which must have
/// integral coordinates) and `e_B in W(K)` the rest. Exact because a
/// Teichmüller expansion is a convergent sum.
pub(crate) fn split(e: &WittVec) -> Result<(Option<WittVec>, Option<WittVec>)> {
    let et = e.trimmed();
    if et.is_zero() && et.is_exact() {
        return Ok((None, None));
    }
    let (p, kind) = (e.p(), e.kind());
    let mut neg = Vec::new();
    let mut rest = Vec::new();
    for (n, c) in et.levels() {
        if n < 0 {
            match c.valuation() {
                Valuation::Finite(v) if v.is_negative() => {
                    return Err(Error::UnsupportedForm(format!(
                        "coefficient {c} of p^{n} is not integral, so {e} does not split between the charts"
                    )))
                }
                Valuation::AtLeast(v) if v.is_negative() => {
                    return Err(Error::Indeterminate(format!("integrality of the p^{n} coefficient is hidden")))
                }
                _ => neg.push(c.clone()),
            }
        } else {
            rest.push(c.clone());
        }
    }
    let a_part = (!neg.iter().all(HahnSeries::is_exact_zero))
        .then(|| WittVec::from_teichmuller(et.p_min(), neg))
        .transpose()?;
    let b_from = et.p_min().max(0);
    let b_part = if rest.iter().all(HahnSeries::is_exact_zero) && et.is_exact() {
        None
    } else if rest.is_empty() {
        Some(WittVec::zero(p, kind, 1).shift_p(b_from).with_tail(et.tail().clone()))
    } else {
        Some(WittVec::from_teichmuller(b_from, rest)?.with_tail(et.tail().clone()))
    };
    Ok((a_part, b_part))
}

fn elem_parts(i: usize, j: usize, e: &WittVec) -> Result<Vec<Fac>> {
    if ring_membership(e, RingTag::AInvP) == Membership::Yes {
        return Ok(vec![Fac::Elem { i, j, e: e.clone(), side: Side::A }]);
    }
    if ring_membership(e, RingTag::WK) == Membership::Yes {
        return Ok(vec![Fac::Elem { i, j, e: e.clone(), side: Side::B }]);
    }
    let (a, b) = split(e)?;
    let mut out = Vec::new();
    if let Some(a) = a {
        out.push(Fac::Elem { i, j, e: a, side: Side::A });
    }
    if let Some(b) = b {
        out.push(Fac::Elem { i, j, e: b, side: Side::B });
    }
    Ok(out)
}

/// Factors of the datum, each split into an `A`-part followed by a
/// `B`-part.
pub(crate) fn expand(factors: &[GlueFactor]) -> Result<Vec<Fac>> {
    let mut out = Vec::new();
    for f in factors {
        match f {
            GlueFactor::Diag(ds) => {
                if ds.iter().any(|(a, _)| *a != 0) {
                    out.push(Fac::DiagP(ds.iter().map(|(a, _)| *a).collect()));
                }
                if ds.iter().any(|(_, g)| !g.is_zero()) {
                    out.push(Fac::DiagT(ds.iter().map(|(_, g)| g.clone()).collect()));
                }
            }
            GlueFactor::Perm(s) => out.push(Fac::Perm(s.clone())),
            GlueFactor::Elem { i, j, e } => out.extend(elem_parts(*i, *j, e)?),
        }
    }
    Ok(out)
}

// `P^-1 X P` for the permutation matrix `P: e_j -> e_(s(j))`.
fn conj_perm(x: &Fac, s: &[usize]) -> Fac {
    let si = invert_perm(s);
    match x {
        Fac::DiagP(a) => Fac::DiagP((0..a.len()).map(|m| a[s[m]]).collect()),
        Fac::DiagT(g) => Fac::DiagT((0..g.len()).map(|m| g[s[m]].clone()).collect()),
        Fac::Perm(t) => Fac::Perm((0..t.len()).map(|m| si[t[s[m]]]).collect()),
        Fac::Elem { i, j, e, side } => Fac::Elem { i: si[*i], j: si[*j], e: e.clone(), side: *side },
    }
}

fn push_parts(i: usize, j: usize, e: &WittVec, a_out: &mut Vec<Fac>, b_out: &mut Vec<Fac>) -> Result<()> {
    let (a, b) = split(e)?;
    if let Some(a) = a {
        a_out.push(Fac::Elem { i, j, e: a, side: Side::A });
    }
    if let Some(b) = b {
        b_out.push(Fac::Elem { i, j, e: b, side: Side::B });
    }
    Ok(())
}

/// `x y = a' b'` for a `B`-factor `x` and an `A`-factor `y`.
fn swap(x: &Fac, y: &Fac) -> Result<(Vec<Fac>, Vec<Fac>)> {
    let mut a_out = Vec::new();
    let mut b_out = Vec::new();
    match (x, y) {
        (_, Fac::Perm(s)) => {
            a_out.push(y.clone());
            b_out.push(conj_perm(x, s));
        }
        (Fac::DiagT(_), Fac::DiagP(_)) => {
            a_out.push(y.clone());
            b_out.push(x.clone());
        }
        // D (I + e E_ij) = (I + [t^(g_i - g_j)] e E_ij) D
        (Fac::DiagT(g), Fac::Elem { i, j, e, .. }) => {
            let p = e.p();
            let e2 = e.mul_teichmuller(&HahnSeries::t_pow(p, &g[*i] - &g[*j]))?;
            push_parts(*i, *j, &e2, &mut a_out, &mut b_out)?;
            b_out.push(x.clone());
        }
        // (I + b E_kl) D = D (I + p^(a_l - a_k) b E_kl)
        (Fac::Elem { i: k, j: l, e: b, .. }, Fac::DiagP(a)) => {
            a_out.push(y.clone());
            let b2 = b.shift_p(a[*l] - a[*k]);
            push_parts(*k, *l, &b2, &mut a_out, &mut b_out)?;
        }
        (Fac::Elem { i: k, j: l, e: b, .. }, Fac::Elem { i, j, e: a, .. }) => {
            let (k, l, i, j) = (*k, *l, *i, *j);
            if l != i && j != k {
                a_out.push(y.clone());
                b_out.push(x.clone());
            } else if l == i && j != k {
                // X Y = Y X (I + b a E_kj), and X commutes with E_kj
                let c = rmul(b, a)?;
                a_out.push(y.clone());
                b_out.push(x.clone());
                let mut b_tail = Vec::new();
                push_parts(k, j, &c, &mut a_out, &mut b_tail)?;
                b_out.extend(b_tail);
            } else if j == k && l != i {
                // X Y = (I - a b E_il) Y X, and E_il commutes with Y
                let c = rneg(&rmul(a, b)?)?;
                push_parts(i, l, &c, &mut a_out, &mut b_out)?;
                a_out.push(y.clone());
                b_out.push(x.clone());
            } else {
                return Err(Error::UnsupportedForm(format!(
                    "opposite elementary factors at ({k}, {l}) and ({i}, {j}) do not commute past each other"
                )));
            }
        }
        _ => return Err(Error::Invalid("swap expects a W(K)-factor then an A[1/p]-factor".into())),
    }
    Ok((a_out, b_out))
}

/// `b a = a' b'` for words `b` (over `W(K)`) and `a` (over `A[1/p]`).
fn commute_past(b: Vec<Fac>, a: Vec<Fac>) -> Result<(Vec<Fac>, Vec<Fac>)> {
    if b.is_empty() || a.is_empty() {
        return Ok((a, b));
    }
    if a.len() > 1 {
        let mut a = a;
        let rest = a.split_off(1);
        let (a1, b1) = commute_past(b, a)?;
        let (a2, b2) = commute_past(b1, rest)?;
        let mut out = a1;
        out.extend(a2);
        return Ok((out, b2));
    }
    if b.len() > 1 {
        let mut b = b;
        let last = b.pop().unwrap();
        let (a1, b1) = commute_past(vec![last], a)?;
        let (a2, b2) = commute_past(b, a1)?;
        let mut tail = b2;
        tail.extend(b1);
        return Ok((a2, tail));
    }
    swap(&b[0], &a[0])
}

/// `T = U V` as factor words.
#[derive(Debug, Clone)]
pub(crate) struct Factorization {
    pub(crate) a_word: Vec<Fac>,
    pub(crate) b_word: Vec<Fac>,
}

pub(crate) fn normalize(factors: &[GlueFactor]) -> Result<Factorization> {
    let mut a_word = Vec::new();
    let mut b_word = Vec::new();
    for f in expand(factors)? {
        match f.side() {
            Side::A => {
                let (a2, b2) = commute_past(std::mem::take(&mut b_word), vec![f])?;
                a_word.extend(a2);
                b_word = b2;
            }
            Side::B => b_word.push(f),
        }
    }
    Ok(Factorization { a_word, b_word })
}

/// Product of a word, applied right to left to the identity.
pub(crate) fn word_matrix(word: &[Fac], p: u32, kind: GroupKind, d: usize) -> Result<WittMatrix> {
    word.iter()
        .rev()
        .try_fold(WittMatrix::identity(p, kind, d), |acc, f| f.to_factor(kind).apply_left(&acc))
}

/// Product of the inverse word (reverse order, inverted factors).
pub(crate) fn inverse_word(word: &[Fac]) -> Result<Vec<Fac>> {
    word.iter().rev().map(Fac::inverse).collect()
}
