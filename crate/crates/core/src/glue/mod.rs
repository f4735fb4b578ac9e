//! Vector bundles on the punctured spectrum of `A = W(o_K)`, presented on
//! the two charts `Spec A[1/p]` and `Spec W(K)` with a transition matrix
//! `T` over `W(K)[1/p]`.
//!
//! Global sections are `M = {v in W(K)^d : T v in A[1/p]^d}`. When
//! `T = U Q^-1` with `U` invertible over `A[1/p]` and `Q` invertible over
//! `W(K)`, `M = Q A^d`, because `A[1/p] ∩ W(K) = A`; the columns of `Q`
//! are a basis. [`glue_to_free`] finds such a factorization for
//! transition matrices given as words in diagonal, permutation and
//! elementary factors, and certifies it by direct multiplication.

mod datum;
mod lattice;
mod matrix;
mod normal;
mod random;

pub use datum::{FactorJson, GlueDatum, GlueDatumJson, GlueFactor};
pub use lattice::{
    graded_lattice_basis, transfer_generators_check, valuation_lattice_dim, BasisSelection, GradedSection,
    LatticeReport, TransferCertificate,
};
pub use matrix::{Residual, WittMatrix};
pub use random::{random_round_trip, RoundTrip};

use serde::Serialize;

use crate::error::Result;
use crate::value_group::GammaElt;
use crate::witt::{ring_membership, Membership, RingTag, WittVec};

use normal::{inverse_word, normalize, word_matrix};

/// Invertibility of one chart's matrix, shown by an explicit inverse.
#[derive(Debug, Clone, Serialize)]
pub struct InverseCheck {
    pub ring: RingTag,
    pub entries_in_ring: Membership,
    pub inverse_entries_in_ring: Membership,
    pub product_is_identity: Residual,
}

impl InverseCheck {
    fn new(m: &WittMatrix, inv: &WittMatrix, ring: RingTag, datum: &GlueDatum) -> Result<Self> {
        let (n, gamma_max) = (datum.n, &datum.gamma_max);
        let id = datum.identity_matrix();
        Ok(InverseCheck {
            ring,
            entries_in_ring: m.membership(ring),
            inverse_entries_in_ring: inv.membership(ring),
            product_is_identity: m.mul(inv)?.residual(&id, n, gamma_max),
        })
    }

    pub fn passed(&self) -> bool {
        self.entries_in_ring == Membership::Yes
            && self.inverse_entries_in_ring == Membership::Yes
            && self.product_is_identity.passed()
    }
}

/// Valuation bounds of the four matrices `U, U^-1, Q, Q^-1`.
#[derive(Debug, Clone, Serialize)]
pub struct Bounds {
    pub min_level_u: Option<i64>,
    pub min_level_u_inv: Option<i64>,
    pub min_level_q: Option<i64>,
    pub min_level_q_inv: Option<i64>,
    pub min_valuation_u: Option<GammaElt>,
    pub min_valuation_q_inv: Option<GammaElt>,
}

/// Generators of `M = H^0` at precision.
#[derive(Debug, Clone, Serialize)]
pub struct Sections {
    /// Columns of `Q`.
    pub generators: Vec<Vec<WittVec>>,
    /// `T v` for each generator: columns of `U`.
    pub images: Vec<Vec<WittVec>>,
    /// Per generator: `v in W(K)^d` and `T v in A[1/p]^d`.
    pub membership: Vec<(Membership, Membership)>,
    /// `U` invertible over `A[1/p]` and `Q` over `W(K)`: together these say
    /// every section is an `A`-combination of the generators.
    pub u_check: InverseCheck,
    pub q_check: InverseCheck,
    pub bounds: Bounds,
    pub a_factors: usize,
    pub b_factors: usize,
    #[serde(skip)]
    u: WittMatrix,
    #[serde(skip)]
    q: WittMatrix,
}

impl Sections {
    pub fn complete(&self) -> bool {
        self.u_check.passed() && self.q_check.passed()
    }

    pub fn u(&self) -> &WittMatrix {
        &self.u
    }

    pub fn q(&self) -> &WittMatrix {
        &self.q
    }
}

fn column_membership(v: &[WittVec], tag: RingTag) -> Membership {
    v.iter().fold(Membership::Yes, |m, x| m.and(ring_membership(x, tag)))
}

/// Sections of the glued bundle, from a factorization `T = U Q^-1`.
pub fn h0_sections(datum: &GlueDatum) -> Result<Sections> {
    let (p, kind, d) = (datum.p, datum.kind, datum.d);
    let f = normalize(&datum.factors)?;
    let u = word_matrix(&f.a_word, p, kind, d)?;
    let u_inv = word_matrix(&inverse_word(&f.a_word)?, p, kind, d)?;
    let q_inv = word_matrix(&f.b_word, p, kind, d)?;
    let q = word_matrix(&inverse_word(&f.b_word)?, p, kind, d)?;
    let generators = q.columns();
    let images = u.columns();
    let membership = generators
        .iter()
        .zip(&images)
        .map(|(v, w)| (column_membership(v, RingTag::WK), column_membership(w, RingTag::AInvP)))
        .collect();
    let bounds = Bounds {
        min_level_u: u.min_level(),
        min_level_u_inv: u_inv.min_level(),
        min_level_q: q.min_level(),
        min_level_q_inv: q_inv.min_level(),
        min_valuation_u: u.min_valuation(),
        min_valuation_q_inv: q_inv.min_valuation(),
    };
    Ok(Sections {
        generators,
        images,
        membership,
        u_check: InverseCheck::new(&u, &u_inv, RingTag::AInvP, datum)?,
        q_check: InverseCheck::new(&q, &q_inv, RingTag::WK, datum)?,
        bounds,
        a_factors: f.a_word.len(),
        b_factors: f.b_word.len(),
        u,
        q,
    })
}

/// Free basis of `M` on both charts, with `T Q ≡ U` checked by
/// multiplying out the datum's own factors.
#[derive(Debug, Clone, Serialize)]
pub struct GlueCertificate {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: i64,
    pub basis: Vec<usize>,
    #[serde(rename = "U")]
    pub u: WittMatrix,
    #[serde(rename = "Q")]
    pub q: WittMatrix,
    pub residual: Residual,
    pub u_in_a_inv_p: Membership,
    pub q_in_wk: Membership,
    pub sections_complete: bool,
    pub transfer: TransferCertificate,
    pub bounds: Bounds,
    pub passed: bool,
}

pub fn glue_to_free(datum: &GlueDatum) -> Result<GlueCertificate> {
    let sections = h0_sections(datum)?;
    let selection = graded_lattice_basis(&sections.generators, datum)?;
    let transfer = transfer_generators_check(&selection.basis, &sections.generators, datum)?;
    let q = WittMatrix::from_columns(&selection.basis);
    let u = WittMatrix::from_columns(&selection.indices.iter().map(|&k| sections.images[k].clone()).collect::<Vec<_>>());
    let tq = datum.apply(&q)?;
    let residual = tq.residual(&u, datum.n, &datum.gamma_max);
    let u_in = u.membership(RingTag::AInvP);
    let q_in = q.membership(RingTag::WK);
    let passed = residual.passed()
        && u_in == Membership::Yes
        && q_in == Membership::Yes
        && sections.complete()
        && transfer.coefficients_in_a == Membership::Yes
        && transfer.recombined;
    Ok(GlueCertificate {
        d: datum.d,
        n: datum.n,
        basis: selection.indices,
        u,
        q,
        residual,
        u_in_a_inv_p: u_in,
        q_in_wk: q_in,
        sections_complete: sections.complete(),
        transfer,
        bounds: sections.bounds,
        passed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ReflexivityReport {
    /// Dual transition `(T^-1)^t` carries the dual basis `(Q^-1)^t` to
    /// `(U^-1)^t`.
    pub dual_factorization: Residual,
    pub dual_q_in_wk: Membership,
    pub dual_u_in_a_inv_p: Membership,
    /// `((Q^-1)^t)^-1)^t ≡ Q`: the map to the double dual is the identity
    /// in these bases.
    pub double_dual: Residual,
    /// `(Q^-1)^t` pairs with `Q` to the identity.
    pub pairing: Residual,
    pub holds: bool,
}

/// Build `M^∨` and `M^∨∨` from the chart data by explicit matrix inversion
/// and compare the canonical map with the identity.
pub fn reflexivity_check(basis: &WittMatrix, datum: &GlueDatum) -> Result<ReflexivityReport> {
    let (n, gm) = (datum.n, &datum.gamma_max);
    let id = datum.identity_matrix();
    if datum.d == 0 {
        let r = id.residual(&id, n, gm);
        return Ok(ReflexivityReport {
            dual_factorization: r.clone(),
            dual_q_in_wk: Membership::Yes,
            dual_u_in_a_inv_p: Membership::Yes,
            double_dual: r.clone(),
            pairing: r,
            holds: true,
        });
    }
    let u = datum.apply(basis)?;
    let t_inv = datum.transition()?.inverse(gm)?;
    let q_dual = basis.inverse(gm)?.transpose();
    let u_dual = u.inverse(gm)?.transpose();
    let dual_factorization = t_inv.transpose().mul(&q_dual)?.residual(&u_dual, n, gm);
    let q_dd = q_dual.inverse(gm)?.transpose();
    let double_dual = q_dd.residual(basis, n, gm);
    let pairing = q_dual.transpose().mul(basis)?.residual(&id, n, gm);
    let dual_q_in_wk = q_dual.membership(RingTag::WK);
    let dual_u_in_a_inv_p = u_dual.membership(RingTag::AInvP);
    let holds = dual_factorization.passed()
        && double_dual.passed()
        && pairing.passed()
        && dual_q_in_wk == Membership::Yes
        && dual_u_in_a_inv_p == Membership::Yes;
    Ok(ReflexivityReport { dual_factorization, dual_q_in_wk, dual_u_in_a_inv_p, double_dual, pairing, holds })
}

/// Memberships behind `A[1/p] ∩ W(K) = A`.
#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
pub struct ProbeReport {
    pub in_a_inv_p: Membership,
    pub in_wk: Membership,
    pub in_a: Membership,
    /// The premise holds, so the probe says something.
    pub applicable: bool,
    pub holds: bool,
}

pub fn probe_report(x: &WittVec) -> ProbeReport {
    let in_a_inv_p = ring_membership(x, RingTag::AInvP);
    let in_wk = ring_membership(x, RingTag::WK);
    let in_a = ring_membership(x, RingTag::A);
    let applicable = in_a_inv_p == Membership::Yes && in_wk == Membership::Yes;
    ProbeReport { in_a_inv_p, in_wk, in_a, applicable, holds: !applicable || in_a == Membership::Yes }
}

/// `x in A[1/p]` and `x in W(K)` imply `x in A`.
pub fn fully_faithful_probe(x: &WittVec) -> bool {
    probe_report(x).holds
}
