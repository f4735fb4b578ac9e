//! Reduced invariant suite behind `ainf selftest`. Everything is drawn from
//! a seeded ChaCha stream, so two runs with one seed give one report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::report::{Outcome, Report};
use crate::error::Result;
use crate::glue::{fully_faithful_probe, glue_to_free, random_round_trip, valuation_lattice_dim};
use crate::newton::{newton_polygon, np_minkowski, NewtonPolygon};
use crate::series::{zq, HahnSeries};
use crate::tower::{covering_table_check, Form, Tower, TowerTag};
use crate::value_group::GroupKind;
use crate::witness::{
    build_archimedean_witness, build_nonarchimedean_witness, build_scholze_element, candidate_family,
    factorization_obstruction_check, ideal_chain_report, liouville_certificate, regroup,
};
use crate::witt::oracle::{ghost_add, ghost_mul};
use crate::witt::WittVec;

fn coord(rng: &mut ChaCha8Rng, p: u32, lo: i64) -> HahnSeries {
    (0..rng.gen_range(0..3)).fold(HahnSeries::zero(p, GroupKind::Zp1), |acc, _| {
        acc.add(&HahnSeries::monomial(p, zq(rng.gen_range(lo..8), 4), rng.gen_range(1..p)))
    })
}

fn element(rng: &mut ChaCha8Rng, p: u32, p_min: i64, levels: usize, lo: i64) -> Result<WittVec> {
    WittVec::from_teichmuller(p_min, (0..levels).map(|_| coord(rng, p, lo)).collect())
}

fn residues(w: &WittVec, n: usize) -> Option<Vec<u32>> {
    (0..n as i64).map(|l| w.coord(l).and_then(|c| c.residue())).collect()
}

fn prime_field(xs: &[u32], p: u32) -> Result<WittVec> {
    WittVec::from_teichmuller(0, xs.iter().map(|&c| HahnSeries::constant(p, GroupKind::Zp1, c)).collect())
}

fn oracle(rng: &mut ChaCha8Rng) -> Result<(usize, usize)> {
    let (mut cases, mut bad) = (0, 0);
    for _ in 0..40 {
        let p = if rng.gen_bool(0.5) { 2 } else { 3 };
        let n = rng.gen_range(1..=4);
        let x: Vec<u32> = (0..n).map(|_| rng.gen_range(0..p)).collect();
        let y: Vec<u32> = (0..n).map(|_| rng.gen_range(0..p)).collect();
        let (wx, wy) = (prime_field(&x, p)?, prime_field(&y, p)?);
        for (got, want) in [(wx.add(&wy)?, ghost_add(&x, &y, p)), (wx.mul(&wy)?, ghost_mul(&x, &y, p))] {
            cases += 1;
            if residues(&got, n).as_ref() != Some(&want) {
                bad += 1;
            }
        }
    }
    Ok((cases, bad))
}

fn axioms(rng: &mut ChaCha8Rng) -> Result<(usize, usize)> {
    let (mut cases, mut bad) = (0, 0);
    for _ in 0..8 {
        let p = if rng.gen_bool(0.5) { 2 } else { 3 };
        let x = element(rng, p, 0, 3, 0)?;
        let y = element(rng, p, 0, 3, 0)?;
        let z = element(rng, p, 0, 3, 0)?;
        let c = coord(rng, p, 0);
        let d = coord(rng, p, 0);
        let checks = [
            x.add(&y)?.congruent(&y.add(&x)?),
            x.mul(&y)?.congruent(&y.mul(&x)?),
            x.add(&y)?.add(&z)?.congruent(&x.add(&y.add(&z)?)?),
            x.mul(&y)?.mul(&z)?.congruent(&x.mul(&y.mul(&z)?)?),
            x.mul(&y.add(&z)?)?.congruent(&x.mul(&y)?.add(&x.mul(&z)?)?),
            WittVec::teichmuller(c.mul(&d), 3).congruent(&WittVec::teichmuller(c, 3).mul(&WittVec::teichmuller(d, 3))?),
        ];
        cases += checks.len();
        bad += checks.iter().filter(|ok| !**ok).count();
    }
    Ok((cases, bad))
}

/// Unit slopes of the first `w` certified columns.
fn columns(np: &NewtonPolygon, w: u64) -> Vec<String> {
    np.slopes()
        .iter()
        .flat_map(|(s, k)| std::iter::repeat(s.to_string()).take(*k as usize))
        .take(w as usize)
        .collect()
}

fn newton(rng: &mut ChaCha8Rng) -> Result<(usize, usize)> {
    let (mut cases, mut bad) = (0, 0);
    while cases < 10 {
        let x = element(rng, 2, 0, 3, 0)?;
        let y = element(rng, 2, 0, 3, 0)?;
        let (Ok(nx), Ok(ny)) = (newton_polygon(&x), newton_polygon(&y)) else {
            continue;
        };
        let nxy = newton_polygon(&x.mul_to(&y, 5)?)?;
        let sum = np_minkowski(&nx, &ny);
        let w = nxy.certified_prefix.min(sum.certified_prefix);
        cases += 1;
        if columns(&nxy, w) != columns(&sum, w) {
            bad += 1;
        }
    }
    Ok((cases, bad))
}

fn probe(rng: &mut ChaCha8Rng) -> Result<(usize, usize)> {
    let mut bad = 0;
    for _ in 0..100 {
        let p_min = rng.gen_range(-1..=0);
        let lo = if rng.gen_bool(0.5) { -4 } else { 0 };
        let x = element(rng, 2, p_min, 3, lo)?;
        if !fully_faithful_probe(&x) {
            bad += 1;
        }
    }
    Ok((100, bad))
}

fn glue(rng: &mut ChaCha8Rng) -> Result<(usize, usize)> {
    let (mut cases, mut bad) = (0, 0);
    for d in 1..=2 {
        for _ in 0..2 {
            let rt = random_round_trip(rng, 2, d, 4, zq(16, 1))?;
            let c = glue_to_free(&rt.datum)?;
            cases += 1;
            if !(c.passed && rt.recovery(&c)?.passed) {
                bad += 1;
            }
        }
    }
    Ok((cases, bad))
}

fn lattice(rng: &mut ChaCha8Rng) -> Result<(usize, usize)> {
    let mut bad = 0;
    for _ in 0..20 {
        let d = rng.gen_range(1..=3);
        let gens: Vec<Vec<HahnSeries>> =
            (0..rng.gen_range(1..=3)).map(|_| (0..d).map(|_| coord(rng, 2, 0)).collect()).collect();
        let r = valuation_lattice_dim(&gens, d)?;
        if r.dim > d || r.dim != r.basis.len() || r.free_rank_d != (r.dim == d) {
            bad += 1;
        }
    }
    Ok((20, bad))
}

fn record(r: &mut Report, check: &str, res: Result<(usize, usize)>) {
    match res {
        Ok((cases, bad)) => r.check(check, bad == 0 && cases > 0, format!("{bad} of {cases} cases failed")),
        Err(e) => r.check_error(check, &e),
    }
}

pub fn selftest(seed: u64, r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let res = r.timed("oracle", |_| oracle(&mut rng));
    record(r, "arithmetic matches ghost components", res);
    let res = r.timed("axioms", |_| axioms(&mut rng));
    record(r, "ring axioms and multiplicative lifts", res);
    let res = r.timed("newton", |_| newton(&mut rng));
    record(r, "Newton polygons multiply", res);
    let res = r.timed("probe", |_| probe(&mut rng));
    record(r, "A[1/p] ∩ W(K) = A", res);
    let res = r.timed("glue", |_| glue(&mut rng));
    record(r, "glue round trips", res);
    let res = r.timed("lattice", |_| lattice(&mut rng));
    record(r, "lattice dimension at most d", res);

    let res = r.timed("witness", |_| -> Result<(bool, bool)> {
        let a = ideal_chain_report(&build_archimedean_witness(2, 4)?, 4)?;
        let n = ideal_chain_report(&build_nonarchimedean_witness(2, 4)?, 4)?;
        Ok((a.passed, n.passed))
    });
    match res {
        Ok((a, n)) => {
            r.check("archimedean chain", a, "p = 2, depth 4, kmax 4");
            r.check("lexicographic chain", n, "p = 2, depth 4, kmax 4");
        }
        Err(e) => r.check_error("ideal chains", &e),
    }

    let res = r.timed("scholze", |_| -> Result<(bool, usize, usize, usize)> {
        let x = build_scholze_element(2, 6)?;
        let odd: Vec<bool> = (1..=x.r.len()).map(|k| k % 2 == 1).collect();
        let liouville = liouville_certificate(&regroup(&x.r, &odd), 1000).is_ok();
        let family = candidate_family(&x)?;
        let mut violated = 0;
        for c in family.iter().step_by(5) {
            violated += factorization_obstruction_check(&x, &c.y, &c.z)?.is_violated() as usize;
        }
        Ok((liouville, violated, family.len().div_ceil(5), family.len()))
    });
    match res {
        Ok((liouville, violated, checked, total)) => {
            r.check("Liouville certificate", liouville, "height 1000");
            r.check("factorizations obstructed", violated == checked, format!("{violated} of {checked} (sampled from {total})"));
        }
        Err(e) => r.check_error("Scholze element", &e),
    }

    let res = r.timed("tower", |_| -> Result<(bool, bool)> {
        let ok = covering_table_check(&Tower::default(), 4)?.passed;
        let bent = Tower::default().with_gauge(TowerTag::B1, vec![Form { ca: 1, cg: 0 }]);
        Ok((ok, !covering_table_check(&bent, 4)?.passed))
    });
    match res {
        Ok((ok, caught)) => {
            r.check("covering table", ok, "window 4");
            r.check("corrupted gauge caught", caught, "");
        }
        Err(e) => r.check_error("covering table", &e),
    }
    let outcome = if r.verdicts.iter().all(|v| v.outcome == Outcome::Pass) { "pass" } else { "fail" };
    r.cert("summary", json!({ "checks": r.verdicts.len(), "outcome": outcome }));
}
