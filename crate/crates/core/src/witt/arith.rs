use std::sync::Arc;

use crate::error::{Error, Result};
use crate::series::HahnSeries;
use crate::value_group::GammaElt;

use super::poly::{build_witt_tables, eval, FpPoly, PowerCache, WittPolyTable};
use super::vector::{Tail, WittVec};

/// Evaluate the first `len` polynomials of `polys` on relative Teichmüller
/// coordinate vectors of that length.
fn relative_op(table: &WittPolyTable, polys: &[FpPoly], xs: &[HahnSeries], ys: &[HahnSeries]) -> Vec<HahnSeries> {
    let len = xs.len();
    debug_assert_eq!(len, ys.len());
    debug_assert!(len <= table.levels);
    let (p, kind) = (xs[0].p(), xs[0].kind());
    let to_witt = |cs: &[HahnSeries]| -> Vec<HahnSeries> {
        (0..table.levels)
            .map(|n| if n < len { cs[n].frobenius_pow(n as i32) } else { HahnSeries::zero(p, kind) })
            .collect()
    };
    let wx = to_witt(xs);
    let wy = to_witt(ys);
    let mut cache = PowerCache::default();
    (0..len)
        .map(|n| eval(&polys[n], &wx, &wy, &mut cache).frobenius_pow(-(n as i32)))
        .collect()
}

enum Tables<'a> {
    Given(&'a WittPolyTable),
    Built(Arc<WittPolyTable>),
}

impl Tables<'_> {
    fn get(&self) -> &WittPolyTable {
        match self {
            Tables::Given(t) => t,
            Tables::Built(t) => t,
        }
    }
}

fn tables(given: Option<&WittPolyTable>, p: u32, len: usize) -> Result<Tables<'_>> {
    match given {
        Some(table) => {
            if table.p != p {
                return Err(Error::PrimeMismatch { left: table.p, right: p });
            }
            if table.levels < len {
                return Err(Error::TableCap { requested: len, cap: table.levels });
            }
            Ok(Tables::Given(table))
        }
        None => Ok(Tables::Built(build_witt_tables(p, len.max(1))?)),
    }
}

fn exact_zero(x: &WittVec) -> bool {
    x.is_exact() && x.is_zero()
}

/// Precision of a result: the tightest limit coming from inexact operands,
/// capped by `target`; with only exact operands, `target` or `fallback`.
fn result_top(limits: impl IntoIterator<Item = Option<i64>>, target: Option<i64>, fallback: i64) -> i64 {
    let limit = limits.into_iter().flatten().min();
    match (limit, target) {
        (Some(l), Some(t)) => l.min(t),
        (Some(l), None) => l,
        (None, Some(t)) => t,
        (None, None) => fallback,
    }
}

fn add_core(x: &WittVec, y: &WittVec, target: Option<i64>, given: Option<&WittPolyTable>) -> Result<WittVec> {
    x.check_compatible(y)?;
    let base = x.p_min.min(y.p_min);
    let (xt, yt) = (x.trimmed(), y.trimmed());
    let limit = |v: &WittVec| (!v.is_exact()).then(|| v.precision());
    let top = result_top([limit(&xt), limit(&yt)], target, xt.precision().max(yt.precision()));
    if exact_zero(&xt) {
        return Ok(y.extended(top).truncate(top));
    }
    if exact_zero(&yt) {
        return Ok(x.extended(top).truncate(top));
    }
    let tail = xt.floor().min(yt.floor()).into_tail();
    let from = xt.p_min.min(yt.p_min);
    if top <= from {
        return Ok(WittVec::empty(x.p, x.kind, top).with_tail(tail).padded_to(base));
    }
    let len = (top - from) as usize;
    let tab = tables(given, x.p, len)?;
    let coords = relative_op(tab.get(), &tab.get().sum, &xt.window(from, top), &yt.window(from, top));
    Ok(WittVec { p: x.p, kind: x.kind, p_min: from, coords, tail }.padded_to(base))
}

fn single_term(x: &WittVec) -> Option<&HahnSeries> {
    (x.is_exact() && x.coords.len() == 1).then(|| &x.coords[0])
}

fn mul_core(x: &WittVec, y: &WittVec, target: Option<i64>, given: Option<&WittPolyTable>) -> Result<WittVec> {
    x.check_compatible(y)?;
    let base = x.p_min + y.p_min;
    let (xt, yt) = (x.trimmed(), y.trimmed());
    let (a, b) = (xt.p_min, yt.p_min);
    let limit_x = (!xt.is_exact()).then(|| xt.precision() + b);
    let limit_y = (!yt.is_exact()).then(|| yt.precision() + a);
    let top = result_top([limit_x, limit_y], target, (xt.precision() + b).max(yt.precision() + a));
    if exact_zero(&xt) || exact_zero(&yt) {
        let len = (top - base).max(1) as usize;
        return Ok(WittVec { p: x.p, kind: x.kind, p_min: base, coords: vec![HahnSeries::zero(x.p, x.kind); len], tail: Tail::Zero });
    }
    // `p^a [c] * y` is a coordinatewise product and stays exact
    if let Some(c) = single_term(&xt) {
        return Ok(mul_teichmuller(&yt, c)?.shift_p(a).extended(top).truncate(top).padded_to(base));
    }
    if let Some(c) = single_term(&yt) {
        return Ok(mul_teichmuller(&xt, c)?.shift_p(b).extended(top).truncate(top).padded_to(base));
    }
    let from = a + b;
    let tail = xt.floor().plus(yt.floor()).into_tail();
    if top <= from {
        return Ok(WittVec::empty(x.p, x.kind, top).with_tail(tail).padded_to(base));
    }
    let len = top - from;
    let tab = tables(given, x.p, len as usize)?;
    let coords = relative_op(tab.get(), &tab.get().prod, &xt.window(a, a + len), &yt.window(b, b + len));
    Ok(WittVec { p: x.p, kind: x.kind, p_min: from, coords, tail }.padded_to(base))
}

fn neg_core(x: &WittVec, target: Option<i64>, given: Option<&WittPolyTable>) -> Result<WittVec> {
    if x.p != 2 {
        let mut out = x.clone();
        for c in &mut out.coords {
            *c = c.neg();
        }
        return Ok(out);
    }
    let t = x.trimmed();
    if t.is_zero() {
        return Ok(x.clone());
    }
    let top = result_top([(!t.is_exact()).then(|| t.precision())], target, t.precision());
    let len = (top - t.p_min).max(1) as usize;
    mul_core(&t, &minus_one(2, t.kind, len), Some(top), given).map(|w| w.padded_to(x.p_min))
}

/// Sum using the supplied tables, which must cover the aligned length.
///
/// The result is known modulo the smaller precision of the inexact
/// operands; exact operands (finite expansions) never limit it.
pub fn witt_add(x: &WittVec, y: &WittVec, table: &WittPolyTable) -> Result<WittVec> {
    add_core(x, y, None, Some(table))
}

/// Product using the supplied tables.
///
/// If `x` is known modulo `p^Nx` and starts at level `a`, and likewise
/// `(Ny, b)` for `y`, the product starts at `a + b` and is known modulo
/// `p^min(Nx + b, Ny + a)`, where exact operands drop out of the minimum.
pub fn witt_mul(x: &WittVec, y: &WittVec, table: &WittPolyTable) -> Result<WittVec> {
    mul_core(x, y, None, Some(table))
}

/// `-1` known modulo `p^levels`. For odd `p` this is `[-1]`; for `p = 2`
/// every Teichmüller coordinate is `1`.
pub fn minus_one(p: u32, kind: crate::value_group::GroupKind, levels: usize) -> WittVec {
    if p == 2 {
        WittVec {
            p,
            kind,
            p_min: 0,
            coords: vec![HahnSeries::one(p, kind); levels],
            tail: Tail::AtLeast(GammaElt::zero(kind)),
        }
    } else {
        WittVec::teichmuller(HahnSeries::constant(p, kind, p - 1), levels)
    }
}

pub fn witt_neg(x: &WittVec, table: &WittPolyTable) -> Result<WittVec> {
    neg_core(x, None, Some(table))
}

pub fn witt_sub(x: &WittVec, y: &WittVec, table: &WittPolyTable) -> Result<WittVec> {
    witt_add(x, &witt_neg(y, table)?, table)
}

/// `[c] * x`, coordinatewise and exact: `[c] p^n [x_n] = p^n [c x_n]`.
pub fn mul_teichmuller(x: &WittVec, c: &HahnSeries) -> Result<WittVec> {
    if x.p != c.p() || x.kind != c.kind() {
        return Err(Error::Invalid("Teichmüller factor from a different field".into()));
    }
    let mut out = x.clone();
    for v in &mut out.coords {
        *v = v.mul(c);
    }
    out.tail = match (&x.tail, c.valuation().lower_bound()) {
        (Tail::Zero, _) => Tail::Zero,
        (Tail::AtLeast(f), Some(v)) => Tail::AtLeast(f + v),
        (Tail::AtLeast(_), None) => Tail::Zero,
        (Tail::Unknown, _) => Tail::Unknown,
    };
    Ok(out)
}

/// `[c]^-1 * x` for an exact monomial `c`.
pub fn divide_exact_teichmuller(x: &WittVec, c: &HahnSeries) -> Result<WittVec> {
    if c.is_exact_zero() {
        return Err(Error::DivisionByZero);
    }
    if !(c.is_monomial() && c.is_exact()) {
        return Err(Error::Invalid(format!(
            "exact Teichmüller division needs a monomial, got {c}"
        )));
    }
    let (e, k) = c.terms()[0].clone();
    mul_teichmuller(x, &HahnSeries::monomial(c.p(), -&e, crate::series::inv_mod(k, c.p())))
}

/// `[c]^-1 * x` for any nonzero `c`, inverting `c` modulo `t^gamma_prec`.
pub fn divide_teichmuller(x: &WittVec, c: &HahnSeries, gamma_prec: &GammaElt) -> Result<WittVec> {
    if c.is_monomial() && c.is_exact() {
        return divide_exact_teichmuller(x, c);
    }
    if c.is_zero() {
        return Err(if c.is_exact() {
            Error::DivisionByZero
        } else {
            Error::Indeterminate(format!("divisor {c} may vanish"))
        });
    }
    mul_teichmuller(x, &c.invert(gamma_prec)?)
}

/// Quotient `h / g` in `W(K)[1/p]`, computed level by level.
///
/// With `g = p^k g'` and `g'_0 != 0`, each step sets `q_n = r_n / g'_0`
/// (inverting `g'_0` modulo `t^gamma_prec`) and subtracts `p^n [q_n] g'`.
pub fn witt_divide_with_precision(h: &WittVec, g: &WittVec, gamma_prec: &GammaElt) -> Result<WittVec> {
    witt_divide_to(h, g, gamma_prec, None)
}

/// [`witt_divide_with_precision`] stopping at absolute level `target` when
/// the operands allow more.
pub fn witt_divide_to(h: &WittVec, g: &WittVec, gamma_prec: &GammaElt, target: Option<i64>) -> Result<WittVec> {
    h.check_compatible(g)?;
    let g = g.trimmed();
    let k = g.p_min;
    let Some(g0) = g.coords.first() else {
        return Err(if exact_zero(&g) {
            Error::DivisionByZero
        } else {
            Error::Indeterminate("divisor vanishes at every known level".into())
        });
    };
    if g0.is_zero() {
        return Err(Error::Indeterminate(format!(
            "leading coordinate of the divisor at level {k} is {g0}"
        )));
    }
    let g_unit = g.shift_p(-k);
    let g0_inv = g0.invert(gamma_prec)?;
    let r0 = h.shift_p(-k).trimmed();
    if r0.is_zero() {
        return Ok(r0.padded_to(h.p_min - k));
    }
    let m = r0.p_min;
    let limit_h = (!r0.is_exact()).then(|| r0.precision());
    let limit_g = (!g_unit.is_exact()).then(|| m + g_unit.precision());
    let top = result_top([limit_h, limit_g], target, r0.precision().max(m + g_unit.precision()));
    if top <= m {
        return Err(Error::PrecisionExhausted(format!(
            "quotient has no known level (dividend known mod p^{}, divisor mod p^{})",
            h.precision(),
            g.precision()
        )));
    }
    let mut r = r0;
    let mut qs = Vec::with_capacity((top - m) as usize);
    for level in m..top {
        let c = r.ext_coord(level).expect("remainder covers the level");
        if c.is_exact_zero() {
            qs.push(c);
            r = drop_level(&r, level);
            continue;
        }
        let q = c.mul(&g0_inv);
        let step = mul_teichmuller(&g_unit, &q)?.shift_p(level);
        r = sub_core(&r, &step, Some(top))?;
        match r.coord(level) {
            Some(left) if !left.is_zero() => {
                return Err(Error::Invalid(format!(
                    "division step at level {level} left {left}"
                )))
            }
            _ => {}
        }
        qs.push(q);
        r = drop_level(&r, level);
    }
    Ok(WittVec { p: h.p, kind: h.kind, p_min: m, coords: qs, tail: Tail::Unknown })
}

fn sub_core(x: &WittVec, y: &WittVec, target: Option<i64>) -> Result<WittVec> {
    add_core(x, &neg_core(y, target, None)?, target, None)
}

// Forget the (vanishing) coordinate at `level` and everything below it.
fn drop_level(r: &WittVec, level: i64) -> WittVec {
    let from = level + 1;
    if from >= r.precision() && !r.is_exact() {
        return WittVec::empty(r.p, r.kind, r.precision());
    }
    WittVec {
        p: r.p,
        kind: r.kind,
        p_min: from,
        coords: r.window(from, r.precision().max(from)),
        tail: r.tail.clone(),
    }
}

impl WittVec {
    pub fn add(&self, other: &Self) -> Result<Self> {
        add_core(self, other, None, None)
    }

    pub fn neg(&self) -> Result<Self> {
        neg_core(self, None, None)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        sub_core(self, other, None)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        mul_core(self, other, None, None)
    }

    /// Sum computed modulo `p^n_abs` (or less, if an inexact operand is
    /// known to less).
    pub fn add_to(&self, other: &Self, n_abs: i64) -> Result<Self> {
        add_core(self, other, Some(n_abs), None)
    }

    pub fn neg_to(&self, n_abs: i64) -> Result<Self> {
        neg_core(self, Some(n_abs), None)
    }

    pub fn sub_to(&self, other: &Self, n_abs: i64) -> Result<Self> {
        sub_core(self, other, Some(n_abs))
    }

    pub fn mul_to(&self, other: &Self, n_abs: i64) -> Result<Self> {
        mul_core(self, other, Some(n_abs), None)
    }

    pub fn mul_teichmuller(&self, c: &HahnSeries) -> Result<Self> {
        mul_teichmuller(self, c)
    }

    pub fn div(&self, other: &Self, gamma_prec: &GammaElt) -> Result<Self> {
        witt_divide_with_precision(self, other, gamma_prec)
    }

    pub fn div_to(&self, other: &Self, gamma_prec: &GammaElt, n_abs: i64) -> Result<Self> {
        witt_divide_to(self, other, gamma_prec, Some(n_abs))
    }

    /// Frobenius `sum p^n [c_n] -> sum p^n [c_n^p]`.
    pub fn frobenius(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.coords {
            *c = c.frobenius();
        }
        out.tail = match &self.tail {
            Tail::AtLeast(f) => Tail::AtLeast(f.scale_p(self.p, 1)),
            t => t.clone(),
        };
        out
    }

    /// Prepend exact-zero coordinates so that `p_min <= from`.
    pub(crate) fn padded_to(mut self, from: i64) -> Self {
        if from < self.p_min {
            let zero = HahnSeries::zero(self.p, self.kind);
            let mut coords = vec![zero; (self.p_min - from) as usize];
            coords.append(&mut self.coords);
            self.coords = coords;
            self.p_min = from;
        }
        self
    }
}
