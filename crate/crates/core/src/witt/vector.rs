use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{HahnSeries, SeriesJson, Valuation};
use crate::value_group::{GammaElt, GammaJson, GroupKind};

/// What is known about the Teichmüller coordinates at levels `>= N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tail {
    /// A finite expansion: every unseen coordinate is zero.
    Zero,
    /// Every unseen coordinate has valuation at least the bound.
    AtLeast(GammaElt),
    Unknown,
}

/// Lower bound on all coordinate valuations, seen and unseen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Floor {
    Infinite,
    At(GammaElt),
    Unknown,
}

impl Floor {
    pub(crate) fn min(self, other: Floor) -> Floor {
        match (self, other) {
            (Floor::Unknown, _) | (_, Floor::Unknown) => Floor::Unknown,
            (Floor::Infinite, x) | (x, Floor::Infinite) => x,
            (Floor::At(a), Floor::At(b)) => Floor::At(if a < b { a } else { b }),
        }
    }

    pub(crate) fn plus(self, other: Floor) -> Floor {
        match (self, other) {
            (Floor::Unknown, _) | (_, Floor::Unknown) => Floor::Unknown,
            (Floor::Infinite, _) | (_, Floor::Infinite) => Floor::Infinite,
            (Floor::At(a), Floor::At(b)) => Floor::At(&a + &b),
        }
    }

    pub(crate) fn into_tail(self) -> Tail {
        match self {
            Floor::Infinite => Tail::Zero,
            Floor::At(g) => Tail::AtLeast(g),
            Floor::Unknown => Tail::Unknown,
        }
    }
}

/// A truncated element `sum_{p_min <= n < N} p^n [c_n]` of `W(K)[1/p]`.
///
/// Coordinates are Teichmüller coordinates. `p_min < 0` encodes a pole at
/// `p`; the element is known modulo `p^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WittVec {
    pub(crate) p: u32,
    pub(crate) kind: GroupKind,
    pub(crate) p_min: i64,
    pub(crate) coords: Vec<HahnSeries>,
    pub(crate) tail: Tail,
}

impl WittVec {
    /// Finite Teichmüller expansion `sum p^(p_min + i) [coords[i]]`.
    pub fn from_teichmuller(p_min: i64, coords: Vec<HahnSeries>) -> Result<Self> {
        let first = coords
            .first()
            .ok_or_else(|| Error::Invalid("a Witt vector needs at least one coordinate".into()))?;
        let (p, kind) = (first.p(), first.kind());
        for c in &coords {
            first.check_compatible(c)?;
        }
        Ok(WittVec { p, kind, p_min, coords, tail: Tail::Zero })
    }

    /// `[c]` known modulo `p^levels`.
    pub fn teichmuller(c: HahnSeries, levels: usize) -> Self {
        let (p, kind) = (c.p(), c.kind());
        let mut coords = vec![HahnSeries::zero(p, kind); levels.max(1)];
        coords[0] = c;
        WittVec { p, kind, p_min: 0, coords, tail: Tail::Zero }
    }

    pub fn zero(p: u32, kind: GroupKind, levels: usize) -> Self {
        Self::teichmuller(HahnSeries::zero(p, kind), levels)
    }

    pub fn one(p: u32, kind: GroupKind, levels: usize) -> Self {
        Self::teichmuller(HahnSeries::one(p, kind), levels)
    }

    /// `p^k` known modulo `p^n_abs`.
    pub fn p_power(p: u32, kind: GroupKind, k: i64, n_abs: i64) -> Self {
        let len = (n_abs - k).max(0) as usize;
        let mut coords = vec![HahnSeries::zero(p, kind); len];
        if let Some(c) = coords.first_mut() {
            *c = HahnSeries::one(p, kind);
        }
        WittVec { p, kind, p_min: k, coords, tail: Tail::Zero }
    }

    /// An element known only to vanish modulo `p^n_abs`.
    pub(crate) fn empty(p: u32, kind: GroupKind, n_abs: i64) -> Self {
        WittVec { p, kind, p_min: n_abs, coords: Vec::new(), tail: Tail::Unknown }
    }

    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn p_min(&self) -> i64 {
        self.p_min
    }

    /// Absolute p-adic precision `N`: the element is known modulo `p^N`.
    pub fn precision(&self) -> i64 {
        self.p_min + self.coords.len() as i64
    }

    pub fn coords(&self) -> &[HahnSeries] {
        &self.coords
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// Teichmüller coordinate at an absolute level; exact zero below `p_min`,
    /// `None` at or beyond the precision.
    pub fn coord(&self, level: i64) -> Option<HahnSeries> {
        if level >= self.precision() {
            None
        } else if level < self.p_min {
            Some(HahnSeries::zero(self.p, self.kind))
        } else {
            Some(self.coords[(level - self.p_min) as usize].clone())
        }
    }

    /// `(level, coordinate)` pairs for the stored levels.
    pub fn levels(&self) -> impl Iterator<Item = (i64, &HahnSeries)> {
        self.coords.iter().enumerate().map(move |(i, c)| (self.p_min + i as i64, c))
    }

    /// First level whose coordinate is not an exact zero, or `N` if none.
    pub fn lead_level(&self) -> i64 {
        self.levels()
            .find(|(_, c)| !c.is_exact_zero())
            .map_or(self.precision(), |(n, _)| n)
    }

    /// Every stored coordinate is an exact zero.
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_exact_zero())
    }

    /// Drop leading exact-zero coordinates.
    pub fn trimmed(&self) -> Self {
        let lead = self.lead_level();
        let skip = (lead - self.p_min) as usize;
        WittVec {
            p: self.p,
            kind: self.kind,
            p_min: lead,
            coords: self.coords[skip..].to_vec(),
            tail: self.tail.clone(),
        }
    }

    /// Restrict to levels `< n_abs`; unseen levels become unknown.
    pub fn truncate(&self, n_abs: i64) -> Self {
        if n_abs >= self.precision() {
            return self.clone();
        }
        let keep = (n_abs - self.p_min).max(0) as usize;
        let tail = match self.floor() {
            Floor::Infinite => Tail::Zero,
            f => f.into_tail(),
        };
        WittVec { p: self.p, kind: self.kind, p_min: self.p_min.min(n_abs), coords: self.coords[..keep].to_vec(), tail }
    }

    /// A finite expansion: every level beyond the stored ones is zero, so
    /// the element is known to any precision.
    pub fn is_exact(&self) -> bool {
        self.tail == Tail::Zero
    }

    /// Like [`coord`](Self::coord), but exact elements continue with zeros.
    pub(crate) fn ext_coord(&self, level: i64) -> Option<HahnSeries> {
        match self.coord(level) {
            None if self.is_exact() => Some(HahnSeries::zero(self.p, self.kind)),
            c => c,
        }
    }

    /// Exact elements padded with zero coordinates up to `n_abs`; others
    /// unchanged.
    pub fn extended(&self, n_abs: i64) -> Self {
        if !self.is_exact() || n_abs <= self.precision() {
            return self.clone();
        }
        let mut out = self.clone();
        out.coords.resize((n_abs - self.p_min) as usize, HahnSeries::zero(self.p, self.kind));
        out
    }

    /// Coordinates over levels `[from, to)`, padding with exact zeros.
    pub(crate) fn window(&self, from: i64, to: i64) -> Vec<HahnSeries> {
        (from..to)
            .map(|l| self.ext_coord(l).expect("window within precision"))
            .collect()
    }

    /// Multiply by `p^k` (a shift of levels).
    pub fn shift_p(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.p_min += k;
        out
    }

    pub(crate) fn floor(&self) -> Floor {
        let mut f = match &self.tail {
            Tail::Zero => Floor::Infinite,
            Tail::AtLeast(g) => Floor::At(g.clone()),
            Tail::Unknown => Floor::Unknown,
        };
        for c in &self.coords {
            f = f.min(match c.valuation() {
                Valuation::Infinite => Floor::Infinite,
                Valuation::Finite(v) | Valuation::AtLeast(v) => Floor::At(v),
            });
        }
        f
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch { left: self.p, right: other.p });
        }
        if self.kind != other.kind {
            return Err(Error::GroupMismatch { left: self.kind, right: other.kind });
        }
        Ok(())
    }

    /// Equality of representations at the common precision: coordinates
    /// agree below `min(N)` (exact operands count as known everywhere),
    /// each modulo the coarser exponent cap.
    pub fn congruent(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }

    /// Lowest level at which the two elements are not congruent.
    pub fn first_difference(&self, other: &Self) -> Option<i64> {
        let top = match (self.is_exact(), other.is_exact()) {
            (true, true) => self.precision().max(other.precision()),
            (true, false) => other.precision(),
            (false, true) => self.precision(),
            (false, false) => self.precision().min(other.precision()),
        };
        let from = self.p_min.min(other.p_min);
        (from..top).find(|&l| !self.ext_coord(l).unwrap().congruent(&other.ext_coord(l).unwrap()))
    }

    /// Valuations of the stored coordinates.
    pub fn coord_valuations(&self) -> Vec<(i64, Valuation)> {
        self.levels().map(|(n, c)| (n, c.valuation())).collect()
    }
}

impl fmt::Display for WittVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.levels() {
            if c.is_exact_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "[{c}]")?,
                1 => write!(f, "p[{c}]")?,
                _ => write!(f, "p^{n}[{c}]")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        match self.tail {
            Tail::Zero => Ok(()),
            _ => write!(f, " + O(p^{})", self.precision()),
        }
    }
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailJson {
    Zero,
    AtLeast(GammaJson),
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WittJson {
    pub p_min: i64,
    #[serde(rename = "N")]
    pub n: i64,
    pub coords: Vec<SeriesJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailJson>,
}

impl WittJson {
    pub fn from_witt(w: &WittVec) -> Self {
        WittJson {
            p_min: w.p_min,
            n: w.precision(),
            coords: w.coords.iter().map(SeriesJson::from_series).collect(),
            tail: Some(match &w.tail {
                Tail::Zero => TailJson::Zero,
                Tail::AtLeast(g) => TailJson::AtLeast(GammaJson::from_gamma(g)),
                Tail::Unknown => TailJson::Unknown,
            }),
        }
    }

    pub fn to_witt(&self) -> Result<WittVec> {
        let coords = self
            .coords
            .iter()
            .map(SeriesJson::to_series)
            .collect::<Result<Vec<_>>>()?;
        if self.n - self.p_min != coords.len() as i64 {
            return Err(Error::Json(format!(
                "N - p_min = {} but {} coordinates given",
                self.n - self.p_min,
                coords.len()
            )));
        }
        let w = WittVec::from_teichmuller(self.p_min, coords)?;
        let tail = match &self.tail {
            None | Some(TailJson::Zero) => Tail::Zero,
            Some(TailJson::Unknown) => Tail::Unknown,
            Some(TailJson::AtLeast(g)) => Tail::AtLeast(g.to_gamma(w.kind, w.p)?),
        };
        Ok(w.with_tail(tail))
    }
}

impl Serialize for WittVec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WittJson::from_witt(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for WittVec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        WittJson::deserialize(d)?.to_witt().map_err(serde::de::Error::custom)
    }
}
