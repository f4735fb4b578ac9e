//! Finite-precision witnesses for non-coherence of `W(o_K)` and for the
//! single-product obstruction in `W(m_K)`.
//!
//! Both non-coherence witnesses consist of `f = [x_0]` and a Witt vector
//! `g`; a chain `h_k = g [c_k]` lies in `(f) ∩ (g)` while the leading
//! valuations `v(h_k,0)` decrease strictly without reaching their infimum.

mod archimedean;
mod nonarch;
mod scholze;

pub use archimedean::{build_archimedean_witness, ArchimedeanWitness};
pub use nonarch::{build_nonarchimedean_witness, NonArchWitness};
pub use scholze::{
    build_rapid_sequence, build_scholze_element, candidate_family, factorization_obstruction_check,
    liouville_certificate, regroup, Candidate, LiouvilleCertificate, LiouvilleFailure, ObstructionOutcome,
    ScholzeElement, Violation,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::newton::{divisibility_slope_test, SlopeVerdict};
use crate::series::{HahnSeries, Valuation};
use crate::value_group::GammaElt;
use crate::witt::{divide_exact_teichmuller, ring_membership, witt_divide_with_precision, Membership, RingTag, WittVec};

/// Common shape of the two non-coherence witnesses.
pub trait IdealPair {
    fn f(&self) -> &WittVec;
    fn f_coord(&self) -> &HahnSeries;
    fn g(&self) -> &WittVec;
    /// Exponent cap used when a division needs an inverse series.
    fn gamma_prec(&self) -> GammaElt;
    /// Teichmüller multipliers `c_1..c_kmax` of the chain `h_k = g [c_k]`.
    fn multipliers(&self, kmax: usize) -> Result<Vec<HahnSeries>>;
    /// Lower bounds that every leading valuation in `(f) ∩ (g)` exceeds.
    fn lower_bounds(&self) -> Vec<GammaElt>;
    /// The bounds' infimum is not attained in the value group.
    fn infimum_not_attained(&self) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IntersectionVerdict {
    In,
    Out,
    Indeterminate,
}

/// Outcome of dividing `h` by `f` and by `g`, with both quotients.
#[derive(Debug, Clone, Serialize)]
pub struct IntersectionCertificate {
    pub verdict: IntersectionVerdict,
    pub quotient_f: Option<WittVec>,
    pub quotient_g: Option<WittVec>,
    pub in_a_f: Membership,
    pub in_a_g: Membership,
    pub slope_test_g: SlopeVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn division_membership(q: &Result<WittVec>) -> (Membership, Option<String>) {
    match q {
        Ok(q) => (ring_membership(q, RingTag::A), None),
        Err(Error::Indeterminate(m)) | Err(Error::PrecisionExhausted(m)) => (Membership::Indeterminate, Some(m.clone())),
        Err(e) => (Membership::Indeterminate, Some(e.to_string())),
    }
}

/// Is `h` in `(f) ∩ (g)` inside `A`, as far as the precision shows?
pub fn intersection_membership<W: IdealPair + ?Sized>(h: &WittVec, w: &W) -> IntersectionCertificate {
    let qf = divide_exact_teichmuller(h, w.f_coord());
    let qg = witt_divide_with_precision(h, w.g(), &w.gamma_prec());
    let (in_f, note_f) = division_membership(&qf);
    let (in_g, note_g) = division_membership(&qg);
    let slope = if h.is_zero() { SlopeVerdict::Pass } else { divisibility_slope_test(h, w.g()) };
    let in_a = ring_membership(h, RingTag::A);
    let verdict = match (in_a.and(in_f).and(in_g), slope) {
        (Membership::No, _) | (_, SlopeVerdict::Fail) => IntersectionVerdict::Out,
        (Membership::Yes, _) => IntersectionVerdict::In,
        _ => IntersectionVerdict::Indeterminate,
    };
    IntersectionCertificate {
        verdict,
        quotient_f: qf.ok(),
        quotient_g: qg.ok(),
        in_a_f: in_f,
        in_a_g: in_g,
        slope_test_g: slope,
        note: note_f.or(note_g),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainEntry {
    pub k: usize,
    pub h: WittVec,
    pub leading_valuation: GammaElt,
    pub membership: IntersectionCertificate,
    /// Strictly below every earlier leading valuation, so `h_k` is not in
    /// the ideal generated by `h_1..h_(k-1)` at the leading coefficient.
    pub new_generator: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub entries: Vec<ChainEntry>,
    pub lower_bounds: Vec<GammaElt>,
    pub all_in: bool,
    pub strictly_decreasing: bool,
    pub above_bounds: bool,
    pub infimum_not_attained: bool,
    pub passed: bool,
    pub indeterminate: bool,
}

/// Build `h_1..h_kmax`, certify each in `(f) ∩ (g)` and check the leading
/// valuations.
pub fn ideal_chain_report<W: IdealPair + ?Sized>(w: &W, kmax: usize) -> Result<ChainReport> {
    let mut entries: Vec<ChainEntry> = Vec::new();
    let bounds = w.lower_bounds();
    for (i, c) in w.multipliers(kmax)?.into_iter().enumerate() {
        let h = w.g().mul_teichmuller(&c)?;
        let lead = match h.coord(0).map(|c| c.valuation()) {
            Some(Valuation::Finite(v)) => v,
            other => {
                return Err(Error::Indeterminate(format!(
                    "leading coordinate of h_{} has valuation {:?}",
                    i + 1,
                    other
                )))
            }
        };
        let new_generator = entries.iter().all(|e| lead < e.leading_valuation);
        let membership = intersection_membership(&h, w);
        entries.push(ChainEntry { k: i + 1, h, leading_valuation: lead, membership, new_generator });
    }
    let all_in = entries.iter().all(|e| e.membership.verdict == IntersectionVerdict::In);
    let indeterminate = entries
        .iter()
        .any(|e| e.membership.verdict == IntersectionVerdict::Indeterminate);
    let strictly_decreasing = entries.windows(2).all(|p| p[1].leading_valuation < p[0].leading_valuation)
        && entries.iter().all(|e| e.new_generator);
    let above_bounds = entries
        .iter()
        .all(|e| bounds.iter().all(|b| e.leading_valuation > *b));
    let infimum_not_attained = w.infimum_not_attained();
    let passed = !entries.is_empty() && all_in && strictly_decreasing && above_bounds && infimum_not_attained;
    Ok(ChainReport {
        entries,
        lower_bounds: bounds,
        all_in,
        strictly_decreasing,
        above_bounds,
        infimum_not_attained,
        passed,
        indeterminate,
    })
}
