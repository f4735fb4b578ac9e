//! Universal Witt addition and multiplication polynomials over `F_p`.
//!
//! `S_n` and `P_n` are determined by the ghost identities
//! `w_n(S) = w_n(X) + w_n(Y)` and `w_n(P) = w_n(X) * w_n(Y)` with
//! `w_n = sum_{i<=n} p^i X_i^{p^(n-i)}`. Only their reductions mod `p` are
//! stored. The recursion is run modulo `p^(n+1)`: `p^i S_i^{p^(n-i)}` modulo
//! `p^(n+1)` depends on `S_i` only modulo `p`, so the reduced polynomials can
//! be lifted with coefficients in `[0, p)` at every step.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::series::HahnSeries;

pub const DEFAULT_TABLE_CAP: usize = 6;

/// Current Witt level cap: `AINF_TABLE_CAP` if set, else [`DEFAULT_TABLE_CAP`].
pub fn table_cap() -> usize {
    std::env::var("AINF_TABLE_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_TABLE_CAP)
}

/// Exponent vector over `X_0..X_{N-1}, Y_0..Y_{N-1}`.
pub type Exponents = Vec<u32>;

/// Sparse polynomial over `F_p`, terms sorted by exponent vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPoly {
    pub terms: Vec<(Exponents, u32)>,
}

impl FpPoly {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Debug)]
pub struct WittPolyTable {
    pub p: u32,
    pub levels: usize,
    pub sum: Vec<FpPoly>,
    pub prod: Vec<FpPoly>,
}

// Polynomials with coefficients in Z/p^k during construction.
type ModPoly = HashMap<Exponents, u64>;

struct Ctx {
    p: u64,
    modulus: u64,
    nvars: usize,
}

impl Ctx {
    fn mul(&self, a: &ModPoly, b: &ModPoly) -> ModPoly {
        let mut out: ModPoly = HashMap::with_capacity(a.len() * b.len() / 2 + 1);
        for (ea, ca) in a {
            for (eb, cb) in b {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let slot = out.entry(e).or_insert(0);
                *slot = (*slot + ca * cb) % self.modulus;
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }

    fn add_into(&self, acc: &mut ModPoly, b: &ModPoly, scale: u64) {
        for (e, c) in b {
            let slot = acc.entry(e.clone()).or_insert(0);
            *slot = (*slot + c * scale) % self.modulus;
        }
        acc.retain(|_, c| *c != 0);
    }

    fn neg(&self, a: &ModPoly) -> ModPoly {
        a.iter().map(|(e, c)| (e.clone(), (self.modulus - c) % self.modulus)).collect()
    }

    fn pow_p(&self, a: &ModPoly) -> ModPoly {
        let mut acc = a.clone();
        for _ in 1..self.p {
            acc = self.mul(&acc, a);
        }
        acc
    }

    fn var_pow(&self, var: usize, e: u32) -> ModPoly {
        let mut ex = vec![0; self.nvars];
        ex[var] = e;
        HashMap::from([(ex, 1)])
    }

    /// Ghost component `w_n` in the variable block starting at `offset`.
    fn ghost(&self, n: usize, offset: usize) -> ModPoly {
        let mut acc = ModPoly::new();
        for i in 0..=n {
            let e = (self.p as u32).pow((n - i) as u32);
            self.add_into(&mut acc, &self.var_pow(offset + i, e), self.p.pow(i as u32));
        }
        acc
    }

    /// Divide an exact multiple of `p^n` by `p^n` and reduce mod `p`.
    fn divide_reduce(&self, a: ModPoly, n: usize, what: &str) -> FpPoly {
        let pn = self.p.pow(n as u32);
        let mut terms: Vec<(Exponents, u32)> = a
            .into_iter()
            .filter_map(|(e, c)| {
                assert!(
                    c % pn == 0,
                    "Witt recursion for {what}_{n}: coefficient {c} not divisible by p^{n}"
                );
                let r = (c / pn) % self.p;
                (r != 0).then_some((e, r as u32))
            })
            .collect();
        terms.sort();
        FpPoly { terms }
    }
}

fn lift(poly: &FpPoly) -> ModPoly {
    poly.terms.iter().map(|(e, c)| (e.clone(), *c as u64)).collect()
}

impl WittPolyTable {
    fn construct(p: u32, levels: usize) -> Self {
        let nvars = 2 * levels;
        let modulus = (p as u64).pow(levels as u32);
        let ctx = Ctx { p: p as u64, modulus, nvars };
        let mut sum: Vec<FpPoly> = Vec::with_capacity(levels);
        let mut prod: Vec<FpPoly> = Vec::with_capacity(levels);
        // powers[i][m] = lift(S_i)^(p^m) mod p^levels
        let mut sum_pows: Vec<Vec<ModPoly>> = Vec::new();
        let mut prod_pows: Vec<Vec<ModPoly>> = Vec::new();
        for n in 0..levels {
            let wx = ctx.ghost(n, 0);
            let wy = ctx.ghost(n, levels);

            let mut num_s = wx.clone();
            ctx.add_into(&mut num_s, &wy, 1);
            let mut num_p = ctx.mul(&wx, &wy);
            for i in 0..n {
                let m = n - i;
                for (pows, num) in [(&mut sum_pows, &mut num_s), (&mut prod_pows, &mut num_p)] {
                    while pows[i].len() <= m {
                        let next = ctx.pow_p(pows[i].last().unwrap());
                        pows[i].push(next);
                    }
                    let term = ctx.neg(&pows[i][m]);
                    ctx.add_into(num, &term, ctx.p.pow(i as u32));
                }
            }
            let s = ctx.divide_reduce(num_s, n, "S");
            let pr = ctx.divide_reduce(num_p, n, "P");
            sum_pows.push(vec![lift(&s)]);
            prod_pows.push(vec![lift(&pr)]);
            sum.push(s);
            prod.push(pr);
        }
        WittPolyTable { p, levels, sum, prod }
    }
}

type Slot = Arc<OnceLock<Arc<WittPolyTable>>>;

fn registry() -> &'static Mutex<HashMap<(u32, usize), Slot>> {
    static REG: OnceLock<Mutex<HashMap<(u32, usize), Slot>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

fn check_prime(p: u32) -> Result<()> {
    if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p % d == 0) {
        return Err(Error::BadPrime(p));
    }
    Ok(())
}

/// Memoized tables for `(p, levels)` under the configured level cap.
pub fn build_witt_tables(p: u32, levels: usize) -> Result<Arc<WittPolyTable>> {
    build_witt_tables_with_cap(p, levels, table_cap())
}

pub fn build_witt_tables_with_cap(p: u32, levels: usize, cap: usize) -> Result<Arc<WittPolyTable>> {
    check_prime(p)?;
    if levels == 0 {
        return Err(Error::Invalid("Witt tables need at least one level".into()));
    }
    if levels > cap {
        return Err(Error::TableCap { requested: levels, cap });
    }
    if (p as u64).checked_pow(levels as u32).map_or(true, |m| m > u32::MAX as u64) {
        return Err(Error::TableCap { requested: levels, cap: levels - 1 });
    }
    let slot = {
        let mut reg = registry().lock().expect("table registry poisoned");
        reg.entry((p, levels)).or_default().clone()
    };
    Ok(slot
        .get_or_init(|| Arc::new(WittPolyTable::construct(p, levels)))
        .clone())
}

/// Evaluate a table polynomial at `X = xs`, `Y = ys` (Witt coordinates).
pub(crate) fn eval(poly: &FpPoly, xs: &[HahnSeries], ys: &[HahnSeries], cache: &mut PowerCache) -> HahnSeries {
    let p = xs[0].p();
    let kind = xs[0].kind();
    let nx = xs.len();
    let mut acc = HahnSeries::zero(p, kind);
    'terms: for (ex, c) in &poly.terms {
        let mut term: Option<HahnSeries> = None;
        for (var, &e) in ex.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let base = if var < nx { &xs[var] } else { &ys[var - nx] };
            if base.is_exact_zero() {
                continue 'terms;
            }
            let pw = cache.get(var, e, base);
            term = Some(match term {
                None => pw,
                Some(t) => t.mul(&pw),
            });
        }
        let term = term.unwrap_or_else(|| HahnSeries::one(p, kind));
        let term = if *c == 1 { term } else { term.mul(&HahnSeries::constant(p, kind, *c)) };
        acc = acc.add(&term);
    }
    acc
}

#[derive(Default)]
pub(crate) struct PowerCache {
    map: HashMap<(usize, u32), HahnSeries>,
}

impl PowerCache {
    fn get(&mut self, var: usize, e: u32, base: &HahnSeries) -> HahnSeries {
        self.map
            .entry((var, e))
            .or_insert_with(|| base.pow(e as u64))
            .clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(terms: &[(&[u32], u32)]) -> FpPoly {
        let mut t: Vec<(Exponents, u32)> = terms.iter().map(|(e, c)| (e.to_vec(), *c)).collect();
        t.sort();
        FpPoly { terms: t }
    }

    #[test]
    fn low_levels_p2() {
        let t = build_witt_tables(2, 2).unwrap();
        // variables X0 X1 Y0 Y1
        assert_eq!(t.sum[0], poly(&[(&[1, 0, 0, 0], 1), (&[0, 0, 1, 0], 1)]));
        assert_eq!(
            t.sum[1],
            poly(&[(&[0, 1, 0, 0], 1), (&[0, 0, 0, 1], 1), (&[1, 0, 1, 0], 1)])
        );
        assert_eq!(t.prod[0], poly(&[(&[1, 0, 1, 0], 1)]));
        assert_eq!(t.prod[1], poly(&[(&[2, 0, 0, 1], 1), (&[0, 1, 2, 0], 1)]));
    }

    #[test]
    fn p3_level_one() {
        let t = build_witt_tables(3, 2).unwrap();
        // S_1 = X1 + Y1 - (X0^2 Y0 + X0 Y0^2) mod 3
        assert_eq!(
            t.sum[1],
            poly(&[(&[0, 1, 0, 0], 1), (&[0, 0, 0, 1], 1), (&[2, 0, 1, 0], 2), (&[1, 0, 2, 0], 2)])
        );
    }

    #[test]
    fn cap_enforced_and_memoized() {
        assert_eq!(
            build_witt_tables_with_cap(2, 7, 6).unwrap_err(),
            Error::TableCap { requested: 7, cap: 6 }
        );
        assert!(matches!(build_witt_tables(4, 2), Err(Error::BadPrime(4))));
        let a = build_witt_tables(2, 3).unwrap();
        let b = build_witt_tables(2, 3).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn prefix_stable_across_levels() {
        let small = build_witt_tables(2, 3).unwrap();
        let big = build_witt_tables(2, 4).unwrap();
        // same polynomials once the exponent vectors are re-indexed
        for n in 0..3 {
            let reindex = |p: &FpPoly, from: usize, to: usize| -> Vec<(Exponents, u32)> {
                let mut v: Vec<_> = p
                    .terms
                    .iter()
                    .map(|(e, c)| {
                        let mut out = vec![0; 2 * to];
                        out[..from].copy_from_slice(&e[..from]);
                        out[to..to + from].copy_from_slice(&e[from..]);
                        (out, *c)
                    })
                    .collect();
                v.sort();
                v
            };
            assert_eq!(reindex(&small.sum[n], 3, 4), big.sum[n].terms);
            assert_eq!(reindex(&small.prod[n], 3, 4), big.prod[n].terms);
        }
    }
}
