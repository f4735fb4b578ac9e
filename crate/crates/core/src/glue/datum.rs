use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::HahnSeries;
use crate::value_group::{GammaElt, GammaJson, GroupKind};
use crate::witt::{WittJson, WittVec};

use super::matrix::{radd, rmul, WittMatrix};

/// One factor of a transition matrix in supported form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GlueFactor {
    /// `diag(p^(a_i) [t^(gamma_i)])`.
    Diag(Vec<(i64, GammaElt)>),
    /// Permutation `sigma`: the matrix sends `e_j` to `e_(sigma(j))`.
    Perm(Vec<usize>),
    /// `I + e E_ij` with `i != j` and `e` a Witt vector (possibly with
    /// p-poles).
    Elem { i: usize, j: usize, e: WittVec },
}

/// Two-chart description of a rank-`d` bundle on the punctured spectrum of
/// `A = W(o_K)`: free modules on `A[1/p]` and `W(K)`, glued over `W(K)[1/p]`
/// by `T = F_1 F_2 ... F_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlueDatum {
    pub p: u32,
    pub kind: GroupKind,
    pub d: usize,
    pub factors: Vec<GlueFactor>,
    /// p-adic precision of the certificate.
    pub n: i64,
    /// Exponent cap for comparisons and series inverses.
    pub gamma_max: GammaElt,
}

impl GlueFactor {
    pub(crate) fn validate(&self, p: u32, kind: GroupKind, d: usize) -> Result<()> {
        match self {
            GlueFactor::Diag(ds) => {
                if ds.len() != d {
                    return Err(Error::Invalid(format!("diagonal factor of size {} in rank {d}", ds.len())));
                }
                if let Some((_, g)) = ds.iter().find(|(_, g)| g.kind() != kind) {
                    return Err(Error::GroupMismatch { left: g.kind(), right: kind });
                }
                if ds.iter().any(|(_, g)| !g.in_zp1(p) && kind == GroupKind::Zp1) {
                    return Err(Error::NotInValueGroup { value: "diagonal exponent".into(), p });
                }
            }
            GlueFactor::Perm(s) => {
                let mut seen = vec![false; d];
                if s.len() != d || s.iter().any(|&k| k >= d || std::mem::replace(&mut seen[k], true)) {
                    return Err(Error::Invalid(format!("{s:?} is not a permutation of 0..{d}")));
                }
            }
            GlueFactor::Elem { i, j, e } => {
                if i == j || *i >= d || *j >= d {
                    return Err(Error::Invalid(format!("elementary position ({i}, {j}) in rank {d}")));
                }
                if e.p() != p {
                    return Err(Error::PrimeMismatch { left: e.p(), right: p });
                }
                if e.kind() != kind {
                    return Err(Error::GroupMismatch { left: e.kind(), right: kind });
                }
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Result<GlueFactor> {
        Ok(match self {
            GlueFactor::Diag(ds) => GlueFactor::Diag(ds.iter().map(|(a, g)| (-a, -g)).collect()),
            GlueFactor::Perm(s) => GlueFactor::Perm(invert_perm(s)),
            GlueFactor::Elem { i, j, e } => GlueFactor::Elem { i: *i, j: *j, e: super::matrix::rneg(e)? },
        })
    }

    /// `F * m`, acting on rows.
    pub fn apply_left(&self, m: &WittMatrix) -> Result<WittMatrix> {
        let mut rows = m.rows.clone();
        match self {
            GlueFactor::Diag(ds) => {
                for (row, (a, g)) in rows.iter_mut().zip(ds) {
                    let t = HahnSeries::t_pow(m.rows[0][0].p(), g.clone());
                    for x in row.iter_mut() {
                        *x = x.mul_teichmuller(&t)?.shift_p(*a);
                    }
                }
            }
            GlueFactor::Perm(s) => {
                for (j, &sj) in s.iter().enumerate() {
                    rows[sj] = m.rows[j].clone();
                }
            }
            GlueFactor::Elem { i, j, e } => {
                for (k, x) in rows[*i].iter_mut().enumerate() {
                    *x = radd(x, &rmul(e, &m.rows[*j][k])?)?;
                }
            }
        }
        Ok(WittMatrix { d: m.d, rows })
    }
}

pub(crate) fn invert_perm(s: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; s.len()];
    for (j, &sj) in s.iter().enumerate() {
        inv[sj] = j;
    }
    inv
}

impl GlueDatum {
    pub fn new(p: u32, kind: GroupKind, d: usize, factors: Vec<GlueFactor>, n: i64, gamma_max: GammaElt) -> Result<Self> {
        if n < 1 {
            return Err(Error::Invalid("precision N must be at least 1".into()));
        }
        for f in &factors {
            f.validate(p, kind, d)?;
        }
        Ok(GlueDatum { p, kind, d, factors, n, gamma_max })
    }

    pub fn identity_matrix(&self) -> WittMatrix {
        WittMatrix::identity(self.p, self.kind, self.d)
    }

    /// `T * m`, applying the factors right to left.
    pub fn apply(&self, m: &WittMatrix) -> Result<WittMatrix> {
        self.factors.iter().rev().try_fold(m.clone(), |acc, f| f.apply_left(&acc))
    }

    /// The transition matrix `T`.
    pub fn transition(&self) -> Result<WittMatrix> {
        self.apply(&self.identity_matrix())
    }
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorJson {
    Diag(Vec<(i64, GammaJson)>),
    Perm(Vec<usize>),
    Elem { i: usize, j: usize, e: WittJson },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GlueDatumJson {
    pub p: u32,
    pub group: GroupKind,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: i64,
    pub gamma_max: GammaJson,
    pub factors: Vec<FactorJson>,
}

impl GlueDatumJson {
    pub fn from_datum(g: &GlueDatum) -> Self {
        let factors = g
            .factors
            .iter()
            .map(|f| match f {
                GlueFactor::Diag(ds) => FactorJson::Diag(ds.iter().map(|(a, e)| (*a, GammaJson::from_gamma(e))).collect()),
                GlueFactor::Perm(s) => FactorJson::Perm(s.clone()),
                GlueFactor::Elem { i, j, e } => FactorJson::Elem { i: *i, j: *j, e: WittJson::from_witt(e) },
            })
            .collect();
        GlueDatumJson {
            p: g.p,
            group: g.kind,
            d: g.d,
            n: g.n,
            gamma_max: GammaJson::from_gamma(&g.gamma_max),
            factors,
        }
    }

    pub fn to_datum(&self) -> Result<GlueDatum> {
        let factors = self
            .factors
            .iter()
            .map(|f| {
                Ok(match f {
                    FactorJson::Diag(ds) => GlueFactor::Diag(
                        ds.iter()
                            .map(|(a, e)| Ok((*a, e.to_gamma(self.group, self.p)?)))
                            .collect::<Result<_>>()?,
                    ),
                    FactorJson::Perm(s) => GlueFactor::Perm(s.clone()),
                    FactorJson::Elem { i, j, e } => GlueFactor::Elem { i: *i, j: *j, e: e.to_witt()? },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        GlueDatum::new(self.p, self.group, self.d, factors, self.n, self.gamma_max.to_gamma(self.group, self.p)?)
    }
}

impl Serialize for GlueDatum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GlueDatumJson::from_datum(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for GlueDatum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        GlueDatumJson::deserialize(d)?.to_datum().map_err(serde::de::Error::custom)
    }
}
