use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{inv_mod, HahnSeries, Valuation};
use crate::value_group::GammaElt;
use crate::witt::{ring_membership, Membership, RingTag, WittVec};

use super::datum::GlueDatum;
use super::matrix::{radd, rmul, rsub, solve_k, WittMatrix};

/// The `o_K`-span `N` of finitely many vectors in `K^d`, reduced.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeReport {
    pub d: usize,
    /// `dim_F_p (N / m_K N)`.
    pub dim: usize,
    pub free_rank_d: bool,
    /// Indices of input vectors forming an `o_K`-basis of `N` (first
    /// occurrence wins ties).
    pub basis: Vec<usize>,
    /// Echelon `o_K`-basis produced by the reduction.
    pub echelon: Vec<Vec<HahnSeries>>,
    /// Coordinates of every input in the echelon basis, reduced mod `m_K`.
    pub residues: Vec<Vec<u32>>,
}

fn finite_valuation(c: &HahnSeries) -> Result<Option<GammaElt>> {
    match c.valuation() {
        Valuation::Finite(v) => Ok(Some(v)),
        Valuation::Infinite => Ok(None),
        Valuation::AtLeast(_) => Err(Error::Indeterminate(format!("{c} may or may not vanish"))),
    }
}

/// Column reduction over the valuation ring `o_K`: repeatedly take, in the
/// first unprocessed row, the vector whose entry has the least valuation,
/// and clear that row in the others with integral multiples. Then pick the
/// inputs whose residues in `N ⊗ F_p` are independent.
pub fn valuation_lattice_dim(gens: &[Vec<HahnSeries>], d: usize) -> Result<LatticeReport> {
    if let Some(g) = gens.iter().find(|g| g.len() != d) {
        return Err(Error::Invalid(format!("vector of length {} in K^{d}", g.len())));
    }
    let mut work: Vec<Vec<HahnSeries>> = gens.to_vec();
    let mut echelon: Vec<(usize, Vec<HahnSeries>)> = Vec::new();
    for row in 0..d {
        let mut best: Option<(usize, GammaElt)> = None;
        for (k, w) in work.iter().enumerate() {
            if let Some(v) = finite_valuation(&w[row])? {
                if best.as_ref().map_or(true, |(_, bv)| v < *bv) {
                    best = Some((k, v));
                }
            }
        }
        let Some((k, _)) = best else { continue };
        let pivot = work.remove(k);
        // w <- (pivot_row w - w_row pivot) / lead(pivot_row): a unit times
        // w - (w_row / pivot_row) pivot, and exact on finite expansions
        let (lv, lc) = leading(&pivot[row])?;
        let scale = (-&lv, inv_mod(lc, pivot[row].p()));
        for w in work.iter_mut() {
            if w[row].is_exact_zero() {
                continue;
            }
            let f = w[row].clone();
            for (x, y) in w.iter_mut().zip(&pivot) {
                *x = pivot[row].mul(x).sub(&f.mul(y)).mul_monomial(&scale.0, scale.1);
            }
            w[row] = HahnSeries::zero(pivot[row].p(), pivot[row].kind());
        }
        echelon.push((row, pivot));
    }
    for w in &work {
        for c in w {
            finite_valuation(c)?
                .map_or(Ok(()), |_| Err(Error::Invalid(format!("reduction left a nonzero entry {c}"))))?;
        }
    }
    // coordinates of each input in the echelon basis, as exact fractions
    // N_k / D_k by forward substitution on the pivot rows
    let mut residues = Vec::with_capacity(gens.len());
    for g in gens {
        let mut nums: Vec<HahnSeries> = Vec::with_capacity(echelon.len());
        let mut dens: Vec<HahnSeries> = Vec::with_capacity(echelon.len());
        for (k, (row, b)) in echelon.iter().enumerate() {
            let prev = dens.last().cloned().unwrap_or_else(|| HahnSeries::one(b[*row].p(), b[*row].kind()));
            let mut num = g[*row].mul(&prev);
            for j in 0..k {
                // D_(k-1) / D_j = product of the pivots j+1..k-1
                let ratio = echelon[j + 1..k]
                    .iter()
                    .fold(nums[j].clone(), |acc, (r, e)| acc.mul(&e[*r]));
                num = num.sub(&ratio.mul(&echelon[j].1[*row]));
            }
            dens.push(prev.mul(&b[*row]));
            nums.push(num);
        }
        let coeffs = nums
            .iter()
            .zip(&dens)
            .map(|(n, d)| fraction_residue(n, d))
            .collect::<Result<Vec<u32>>>()?;
        residues.push(coeffs);
    }
    let p = gens.first().and_then(|g| g.first()).map_or(2, |c| c.p());
    let basis = independent_rows(&residues, p);
    let dim = echelon.len();
    Ok(LatticeReport {
        d,
        dim,
        free_rank_d: dim == d,
        basis,
        echelon: echelon.into_iter().map(|(_, b)| b).collect(),
        residues,
    })
}

fn leading(c: &HahnSeries) -> Result<(GammaElt, u32)> {
    match finite_valuation(c)? {
        Some(_) => Ok(c.terms()[0].clone()),
        None => Err(Error::Invalid("zero pivot".into())),
    }
}

// Residue of n / d in o_K / m_K.
fn fraction_residue(n: &HahnSeries, d: &HahnSeries) -> Result<u32> {
    let (dv, dc) = leading(d)?;
    let Some(nv) = finite_valuation(n)? else { return Ok(0) };
    if nv < dv {
        return Err(Error::Invalid(format!("coefficient ({n}) / ({d}) of a generator is not integral")));
    }
    if nv > dv {
        return Ok(0);
    }
    let nc = n.terms()[0].1;
    Ok((nc as u64 * inv_mod(dc, n.p()) as u64 % n.p() as u64) as u32)
}

/// Indices of the first rows that are linearly independent over `F_p`.
fn independent_rows(rows: &[Vec<u32>], p: u32) -> Vec<usize> {
    let p64 = p as u64;
    let mut reduced: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut chosen = Vec::new();
    for (idx, r) in rows.iter().enumerate() {
        let mut v: Vec<u64> = r.iter().map(|&x| x as u64 % p64).collect();
        for (col, b) in &reduced {
            if v[*col] != 0 {
                let f = v[*col];
                for (x, y) in v.iter_mut().zip(b) {
                    *x = (*x + p64 * p64 - f * y % p64) % p64;
                }
            }
        }
        if let Some(col) = v.iter().position(|&x| x != 0) {
            let inv = pow_mod(v[col], p64 - 2, p64);
            for x in v.iter_mut() {
                *x = *x * inv % p64;
            }
            reduced.push((col, v));
            chosen.push(idx);
        }
    }
    chosen
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// A section of `A[1/p]^d` seen in `Gr A[1/p] = o_K((p̄))`: its coordinate
/// vectors level by level, and their reductions to `F_p((p̄))`.
#[derive(Debug, Clone, Serialize)]
pub struct GradedSection {
    pub levels: Vec<(i64, Vec<HahnSeries>)>,
    /// `None` marks a coordinate that is not integral.
    pub reduced: Vec<(i64, Vec<Option<u32>>)>,
}

impl GradedSection {
    pub fn of(u: &[WittVec], upto: i64) -> Self {
        let from = u.iter().filter(|x| !x.is_zero()).map(|x| x.lead_level()).min().unwrap_or(upto);
        let levels: Vec<(i64, Vec<HahnSeries>)> = (from..upto)
            .filter_map(|n| u.iter().map(|x| x.ext_coord(n)).collect::<Option<Vec<_>>>().map(|cs| (n, cs)))
            .collect();
        let reduced = levels
            .iter()
            .map(|(n, cs)| (*n, cs.iter().map(HahnSeries::residue).collect()))
            .collect();
        GradedSection { levels, reduced }
    }

    /// Lowest level with a nonzero coordinate.
    pub fn leading_level(&self) -> Option<i64> {
        self.levels
            .iter()
            .find(|(_, cs)| cs.iter().any(|c| !c.is_exact_zero()))
            .map(|(n, _)| *n)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisSelection {
    /// Indices into the generator list.
    pub indices: Vec<usize>,
    pub basis: Vec<Vec<WittVec>>,
    pub lattice: LatticeReport,
    /// Images `T v_i` of the chosen generators on the `A[1/p]` chart.
    pub graded: Vec<GradedSection>,
}

/// Reduction of a section mod `p`: its level-0 coordinates in `K^d`.
fn mod_p(v: &[WittVec]) -> Vec<HahnSeries> {
    v.iter()
        .map(|x| x.ext_coord(0).unwrap_or_else(|| HahnSeries::zero(x.p(), x.kind())))
        .collect()
}

/// Choose `d` generators whose images in `M ⊗_A o_K = M / pM ⊂ K^d` form a
/// basis of that lattice; by Nakayama they then form a basis of `M`.
pub fn graded_lattice_basis(gens: &[Vec<WittVec>], datum: &GlueDatum) -> Result<BasisSelection> {
    let d = datum.d;
    let reductions: Vec<Vec<HahnSeries>> = gens.iter().map(|g| mod_p(g)).collect();
    let lattice = valuation_lattice_dim(&reductions, d)?;
    if lattice.dim < d {
        return Err(Error::LatticeDefect { found: lattice.dim, expected: d });
    }
    let indices = lattice.basis.clone();
    let basis: Vec<Vec<WittVec>> = indices.iter().map(|&k| gens[k].clone()).collect();
    let graded = if d == 0 {
        Vec::new()
    } else {
        let images = datum.apply(&WittMatrix::from_columns(&basis))?;
        images.columns().iter().map(|u| GradedSection::of(u, datum.n)).collect()
    };
    Ok(BasisSelection { indices, basis, lattice, graded })
}

/// Expression of each generator in the candidate basis, with coefficients
/// certified in `A`.
#[derive(Debug, Clone, Serialize)]
pub struct TransferCertificate {
    /// `expression[k][i]` is the coefficient of `v_i` in generator `k`.
    pub expression: Vec<Vec<WittVec>>,
    pub coefficients_in_a: Membership,
    /// `sum_i r_ki v_i` agrees with generator `k` below level `N`.
    pub recombined: bool,
    pub levels: i64,
}

/// Solve `sum_i r_i v_i = g` level by level. At level `l` the remainder is
/// `p^l` times something whose reduction mod `p` is matched by `[c]`, with
/// `c` solving the reduced system; the coefficients stay in `A` exactly
/// when every such `c` is integral.
pub fn transfer_generators_check(
    basis: &[Vec<WittVec>],
    gens: &[Vec<WittVec>],
    datum: &GlueDatum,
) -> Result<TransferCertificate> {
    let d = datum.d;
    let n = datum.n;
    let gp = &datum.gamma_max;
    if basis.len() != d {
        return Err(Error::Invalid(format!("{} candidates for rank {d}", basis.len())));
    }
    let reduced: Vec<Vec<HahnSeries>> = basis.iter().map(|v| mod_p(v)).collect();
    let mut expression = Vec::with_capacity(gens.len());
    let mut all_in = Membership::Yes;
    let mut recombined = true;
    for g in gens {
        let mut rem: Vec<WittVec> = g.clone();
        let mut coeffs: Vec<Vec<HahnSeries>> = vec![Vec::new(); d];
        for level in 0..n {
            let rhs = rem
                .iter()
                .map(|x| {
                    x.ext_coord(level).ok_or_else(|| {
                        Error::PrecisionExhausted(format!("remainder unknown at level {level}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let Some(c) = solve_k(&reduced, &rhs, gp)? else {
                return Err(Error::TransferStall {
                    level,
                    reason: "the candidates are dependent mod p, so some coefficient needs p^-1".into(),
                });
            };
            for (i, ci) in c.iter().enumerate() {
                if let Valuation::Finite(v) = ci.valuation() {
                    if v.is_negative() {
                        return Err(Error::TransferStall {
                            level,
                            reason: format!("coefficient {ci} of candidate {i} is not integral"),
                        });
                    }
                }
            }
            for (i, ci) in c.iter().enumerate() {
                coeffs[i].push(ci.clone());
                if ci.is_exact_zero() {
                    continue;
                }
                for (r, v) in rem.iter_mut().zip(&basis[i]) {
                    let step = v.mul_teichmuller(ci)?.shift_p(level);
                    *r = rsub(r, &step)?;
                }
            }
        }
        let row: Vec<WittVec> = coeffs
            .into_iter()
            .map(|cs| WittVec::from_teichmuller(0, cs).map(|w| w.with_tail(crate::witt::Tail::Unknown)))
            .collect::<Result<_>>()?;
        for r in &row {
            all_in = all_in.and(ring_membership(r, RingTag::A));
        }
        // independent check with full Witt arithmetic
        for (k, gk) in g.iter().enumerate().filter(|_| d > 0) {
            let mut acc = rmul(&row[0], &basis[0][k])?;
            for i in 1..d {
                acc = radd(&acc, &rmul(&row[i], &basis[i][k])?)?;
            }
            let diff = acc.truncate(n).first_difference(&gk.truncate(n));
            if diff.map_or(false, |l| l < n) || acc.precision() < n {
                recombined = false;
            }
        }
        expression.push(row);
    }
    Ok(TransferCertificate { expression, coefficients_in_a: all_in, recombined, levels: n })
}
