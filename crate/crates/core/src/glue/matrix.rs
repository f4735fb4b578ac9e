use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{HahnSeries, Valuation};
use crate::value_group::{GammaElt, GroupKind};
use crate::witt::{poly::table_cap, ring_membership, Membership, RingTag, WittVec};

/// Entry arithmetic at the largest relative length the tables allow: a
/// result starting at level `l` is computed modulo `p^(l + cap)`.
pub(crate) fn rel_top(lead: i64) -> i64 {
    lead + table_cap() as i64
}

pub(crate) fn rmul(x: &WittVec, y: &WittVec) -> Result<WittVec> {
    x.mul_to(y, rel_top(x.lead_level() + y.lead_level()))
}

pub(crate) fn radd(x: &WittVec, y: &WittVec) -> Result<WittVec> {
    x.add_to(y, rel_top(x.lead_level().min(y.lead_level())))
}

pub(crate) fn rneg(x: &WittVec) -> Result<WittVec> {
    x.neg_to(rel_top(x.lead_level()))
}

pub(crate) fn rsub(x: &WittVec, y: &WittVec) -> Result<WittVec> {
    radd(x, &rneg(y)?)
}

pub(crate) fn rdiv(x: &WittVec, y: &WittVec, gamma_prec: &GammaElt) -> Result<WittVec> {
    x.div_to(y, gamma_prec, rel_top(x.lead_level() - y.lead_level()))
}

/// Square matrix over `W(K)[1/p]`, row-major.
#[derive(Debug, Clone, Serialize)]
pub struct WittMatrix {
    pub d: usize,
    pub rows: Vec<Vec<WittVec>>,
}

/// Where two matrices first disagree, and the precision the comparison
/// could reach.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Residual {
    /// Lowest absolute precision among the compared entries.
    pub precision: i64,
    /// `(row, column, level)` of the first non-congruent coordinate below
    /// the requested precision.
    pub first_difference: Option<(usize, usize, i64)>,
    pub required: i64,
}

impl Residual {
    pub fn passed(&self) -> bool {
        self.first_difference.is_none() && self.precision >= self.required
    }
}

pub(crate) fn zero_entry(p: u32, kind: GroupKind) -> WittVec {
    WittVec::zero(p, kind, 1)
}

impl WittMatrix {
    pub fn identity(p: u32, kind: GroupKind, d: usize) -> Self {
        Self::from_fn(d, |i, j| if i == j { WittVec::one(p, kind, 1) } else { zero_entry(p, kind) })
    }

    pub fn from_fn(d: usize, mut f: impl FnMut(usize, usize) -> WittVec) -> Self {
        WittMatrix { d, rows: (0..d).map(|i| (0..d).map(|j| f(i, j)).collect()).collect() }
    }

    pub fn from_columns(cols: &[Vec<WittVec>]) -> Self {
        Self::from_fn(cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn get(&self, i: usize, j: usize) -> &WittVec {
        &self.rows[i][j]
    }

    pub fn column(&self, j: usize) -> Vec<WittVec> {
        self.rows.iter().map(|r| r[j].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<WittVec>> {
        (0..self.d).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.d, |i, j| self.rows[j][i].clone())
    }

    pub fn entries(&self) -> impl Iterator<Item = &WittVec> {
        self.rows.iter().flatten()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let d = self.d;
        let mut rows = Vec::with_capacity(d);
        for i in 0..d {
            let mut row = Vec::with_capacity(d);
            for j in 0..d {
                let mut acc = rmul(&self.rows[i][0], &other.rows[0][j])?;
                for k in 1..d {
                    acc = radd(&acc, &rmul(&self.rows[i][k], &other.rows[k][j])?)?;
                }
                row.push(acc);
            }
            rows.push(row);
        }
        Ok(WittMatrix { d, rows })
    }

    /// Conjunction of entrywise memberships.
    pub fn membership(&self, tag: RingTag) -> Membership {
        self.entries().fold(Membership::Yes, |m, e| m.and(ring_membership(e, tag)))
    }

    /// Lowest level carrying a nonzero coordinate, over all entries.
    pub fn min_level(&self) -> Option<i64> {
        self.entries().filter(|e| !e.is_zero()).map(|e| e.lead_level()).min()
    }

    /// Lowest coordinate valuation over all entries and stored levels.
    pub fn min_valuation(&self) -> Option<GammaElt> {
        self.entries()
            .flat_map(|e| e.coords().iter())
            .filter_map(|c| match c.valuation() {
                Valuation::Finite(v) => Some(v),
                _ => None,
            })
            .min()
    }

    /// Compare with `other` below level `n_abs`, each coordinate modulo
    /// `t^gamma_max`.
    pub fn residual(&self, other: &Self, n_abs: i64, gamma_max: &GammaElt) -> Residual {
        let mut precision = i64::MAX;
        let mut first = None;
        for i in 0..self.d {
            for j in 0..self.d {
                let (a, b) = (&self.rows[i][j], &other.rows[i][j]);
                let known = match (a.is_exact(), b.is_exact()) {
                    (true, true) => i64::MAX,
                    (true, false) => b.precision(),
                    (false, true) => a.precision(),
                    (false, false) => a.precision().min(b.precision()),
                };
                precision = precision.min(known);
                let from = a.p_min().min(b.p_min());
                for level in from..n_abs.min(known) {
                    let (x, y) = (a.ext_coord(level).unwrap(), b.ext_coord(level).unwrap());
                    if !x.with_cap(gamma_max).congruent(&y.with_cap(gamma_max)) {
                        if first.map_or(true, |(_, _, l)| level < l) {
                            first = Some((i, j, level));
                        }
                        break;
                    }
                }
            }
        }
        // all-exact comparisons are decided at every level
        let precision = if precision == i64::MAX { n_abs } else { precision };
        Residual { precision, first_difference: first, required: n_abs }
    }

    /// Inverse by Gauss-Jordan elimination over the field `W(K)[1/p]`,
    /// pivoting on the entry with the lowest leading level.
    pub fn inverse(&self, gamma_prec: &GammaElt) -> Result<Self> {
        let d = self.d;
        if d == 0 {
            return Ok(self.clone());
        }
        let (p, kind) = (self.rows[0][0].p(), self.rows[0][0].kind());
        let mut a = self.rows.clone();
        let mut inv = WittMatrix::identity(p, kind, d).rows;
        for c in 0..d {
            let pivot = (c..d)
                .filter(|&r| a[r][c].trimmed().coords().first().map_or(false, |x| !x.is_zero()))
                .min_by_key(|&r| a[r][c].lead_level())
                .ok_or_else(|| Error::Indeterminate(format!("no certifiably nonzero pivot in column {c}")))?;
            a.swap(c, pivot);
            inv.swap(c, pivot);
            let pv = a[c][c].clone();
            for j in 0..d {
                a[c][j] = if j == c { WittVec::one(p, kind, 1) } else { rdiv(&a[c][j], &pv, gamma_prec)? };
                inv[c][j] = rdiv(&inv[c][j], &pv, gamma_prec)?;
            }
            for r in 0..d {
                if r == c || a[r][c].is_zero() && a[r][c].is_exact() {
                    continue;
                }
                let f = a[r][c].clone();
                for j in 0..d {
                    a[r][j] = if j == c { zero_entry(p, kind) } else { rsub(&a[r][j], &rmul(&f, &a[c][j])?)? };
                    inv[r][j] = rsub(&inv[r][j], &rmul(&f, &inv[c][j])?)?;
                }
            }
        }
        Ok(WittMatrix { d, rows: inv })
    }
}

/// Solve `cols · x = rhs` over `K`, where `cols` are the `d` columns of a
/// square matrix; `None` when the matrix is singular.
pub(crate) fn solve_k(cols: &[Vec<HahnSeries>], rhs: &[HahnSeries], gamma_prec: &GammaElt) -> Result<Option<Vec<HahnSeries>>> {
    let d = rhs.len();
    let mut m: Vec<Vec<HahnSeries>> = (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect();
    let mut b = rhs.to_vec();
    for c in 0..d {
        let mut best: Option<(usize, GammaElt)> = None;
        let mut hidden = false;
        for r in c..d {
            match m[r][c].valuation() {
                Valuation::Finite(v) => {
                    if best.as_ref().map_or(true, |(_, bv)| v < *bv) {
                        best = Some((r, v));
                    }
                }
                Valuation::AtLeast(_) => hidden = true,
                Valuation::Infinite => {}
            }
        }
        let Some((r, _)) = best else {
            if hidden {
                return Err(Error::Indeterminate(format!("pivot in column {c} hidden by the exponent cap")));
            }
            return Ok(None);
        };
        m.swap(c, r);
        b.swap(c, r);
        let inv = m[c][c].invert(gamma_prec)?;
        for r2 in 0..d {
            if r2 == c || m[r2][c].is_exact_zero() {
                continue;
            }
            let f = m[r2][c].mul(&inv);
            for j in c..d {
                let t = f.mul(&m[c][j]);
                m[r2][j] = m[r2][j].sub(&t);
            }
            let t = f.mul(&b[c]);
            b[r2] = b[r2].sub(&t);
        }
    }
    let x = (0..d)
        .map(|i| m[i][i].invert(gamma_prec).map(|inv| b[i].mul(&inv)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(x))
}
