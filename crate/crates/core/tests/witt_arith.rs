use ainf::series::{tq, zq, HahnSeries};
use ainf::value_group::GroupKind;
use ainf::witt::{ring_membership, Membership, RingTag, Tail, WittVec};
use proptest::prelude::*;

// Z/p^N model of W(F_p): Teichmüller lift by iterated p-th powers.
fn lift(c: u64, p: u64, n: u32) -> u64 {
    let m = p.pow(n);
    let mut x = c % m;
    for _ in 0..n + 1 {
        x = pow_mod(x, p, m);
    }
    x
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn encode(digits: &[u64], p: u64) -> u64 {
    let n = digits.len() as u32;
    let m = p.pow(n);
    digits
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &d)| (acc + p.pow(i as u32) * lift(d, p, n)) % m)
}

fn decode(mut x: u64, p: u64, n: u32) -> Vec<u64> {
    let m = p.pow(n);
    let mut out = Vec::new();
    for _ in 0..n {
        let d = x % p;
        out.push(d);
        let rest = (x + m - lift(d, p, n)) % m;
        x = rest / p;
    }
    out
}

fn constant_vec(digits: &[u64], p: u32) -> WittVec {
    WittVec::from_teichmuller(
        0,
        digits.iter().map(|&d| HahnSeries::constant(p, GroupKind::Zp1, d as u32)).collect(),
    )
    .unwrap()
}

// Digits at levels 0..n (the result may be known further).
fn digits_of(w: &WittVec, n: u32) -> Vec<u64> {
    assert_eq!(w.p_min(), 0);
    w.coords()[..n as usize]
        .iter()
        .map(|c| c.residue().expect("integral constant") as u64)
        .collect()
}

#[test]
fn constants_match_integer_oracle() {
    for &(p, n) in &[(2u32, 5u32), (3, 4), (5, 3)] {
        let pp = p as u64;
        let m = pp.pow(n);
        for a in (0..m).step_by(((m / 23).max(1)) as usize) {
            for b in (0..m).step_by(((m / 17).max(1)) as usize) {
                let (da, db) = (decode(a, pp, n), decode(b, pp, n));
                assert_eq!(encode(&da, pp), a);
                let (wa, wb) = (constant_vec(&da, p), constant_vec(&db, p));
                let sum = wa.add(&wb).unwrap();
                assert_eq!(digits_of(&sum, n), decode((a + b) % m, pp, n), "p={p} {a}+{b}");
                let prod = wa.mul(&wb).unwrap();
                assert_eq!(digits_of(&prod, n), decode(a * b % m, pp, n), "p={p} {a}*{b}");
                let diff = wa.sub(&wb).unwrap();
                assert_eq!(digits_of(&diff, n), decode((a + m - b) % m, pp, n), "p={p} {a}-{b}");
            }
        }
    }
}

#[test]
fn one_plus_one_is_p_at_two() {
    let one = WittVec::one(2, GroupKind::Zp1, 4);
    let two = one.add(&one).unwrap();
    assert_eq!(two.lead_level(), 1);
    assert_eq!(two.coord(1).unwrap(), HahnSeries::one(2, GroupKind::Zp1));
    assert!(two.coord(2).unwrap().is_zero());
}

#[test]
fn teichmuller_is_multiplicative() {
    let a = tq(2, 1, 2).add(&tq(2, 3, 4));
    let b = tq(2, 1, 1).add(&HahnSeries::one(2, GroupKind::Zp1));
    let prod = WittVec::teichmuller(a.clone(), 4)
        .mul(&WittVec::teichmuller(b.clone(), 4))
        .unwrap();
    assert!(prod.congruent(&WittVec::teichmuller(a.mul(&b), 4)));
}

#[test]
fn doubling_a_teichmuller_p2() {
    // [x] + [x] = 2[x] = p [x] for p = 2
    let x = tq(2, 1, 2).add(&tq(2, 5, 4));
    let w = WittVec::teichmuller(x.clone(), 3);
    let d = w.add(&w).unwrap();
    assert!(d.congruent(&WittVec::from_teichmuller(0, vec![HahnSeries::zero(2, GroupKind::Zp1), x, HahnSeries::zero(2, GroupKind::Zp1)]).unwrap()));
}

#[test]
fn division_inverts_multiplication() {
    let p = 2;
    let g = WittVec::from_teichmuller(0, vec![HahnSeries::one(p, GroupKind::Zp1), tq(p, 1, 2), tq(p, 1, 1)]).unwrap();
    let q = WittVec::from_teichmuller(0, vec![tq(p, 1, 4), HahnSeries::one(p, GroupKind::Zp1), tq(p, 3, 2)]).unwrap();
    let h = g.mul(&q).unwrap();
    let back = h.div(&g, &zq(8, 1)).unwrap();
    assert!(back.congruent(&q), "{back} vs {q}");
    assert_eq!(*back.tail(), Tail::Unknown);
}

#[test]
fn division_by_p_power_shifts() {
    let p = 3;
    let g = WittVec::p_power(p, GroupKind::Zp1, 1, 4);
    let h = WittVec::teichmuller(tq(p, 1, 3), 4);
    let q = h.div(&g, &zq(4, 1)).unwrap();
    assert_eq!(q.p_min(), -1);
    assert_eq!(q.coord(-1).unwrap(), tq(p, 1, 3));
    assert_eq!(ring_membership(&q, RingTag::A), Membership::No);
    assert_eq!(ring_membership(&q, RingTag::AInvP), Membership::Yes);
}

#[test]
fn membership_is_three_valued() {
    let p = 2;
    let w = WittVec::teichmuller(tq(p, -1, 2), 2);
    assert_eq!(ring_membership(&w, RingTag::A), Membership::No);
    assert_eq!(ring_membership(&w, RingTag::WK), Membership::Yes);
    let capped = WittVec::teichmuller(HahnSeries::zero_capped(p, zq(-1, 1)), 2);
    assert_eq!(ring_membership(&capped, RingTag::A), Membership::Indeterminate);
    let pos = WittVec::teichmuller(tq(p, 1, 4), 2);
    assert_eq!(ring_membership(&pos, RingTag::WmK), Membership::Yes);
    let one = WittVec::one(p, GroupKind::Zp1, 2);
    assert_eq!(ring_membership(&one, RingTag::WmK), Membership::No);
    assert_eq!(ring_membership(&one, RingTag::A), Membership::Yes);
}

#[test]
fn json_round_trip() {
    let w = WittVec::from_teichmuller(-1, vec![tq(2, 1, 2), HahnSeries::one(2, GroupKind::Zp1)]).unwrap();
    let s = serde_json::to_string(&w).unwrap();
    let back: WittVec = serde_json::from_str(&s).unwrap();
    assert_eq!(w, back);
}

fn arb_coord(p: u32) -> impl Strategy<Value = HahnSeries> {
    proptest::collection::vec((0i64..8, 1u32..p), 0..3).prop_map(move |ts| {
        ts.into_iter()
            .fold(HahnSeries::zero(p, GroupKind::Zp1), |acc, (e, c)| {
                acc.add(&HahnSeries::monomial(p, zq(e, 4), c))
            })
    })
}

fn arb_witt(p: u32, n: usize) -> impl Strategy<Value = WittVec> {
    proptest::collection::vec(arb_coord(p), n).prop_map(|cs| WittVec::from_teichmuller(0, cs).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ring_axioms_p2(x in arb_witt(2, 3), y in arb_witt(2, 3), z in arb_witt(2, 3)) {
        prop_assert!(x.add(&y).unwrap().congruent(&y.add(&x).unwrap()));
        prop_assert!(x.mul(&y).unwrap().congruent(&y.mul(&x).unwrap()));
        let l = x.add(&y).unwrap().add(&z).unwrap();
        let r = x.add(&y.add(&z).unwrap()).unwrap();
        prop_assert!(l.congruent(&r));
        let l = x.mul(&y.add(&z).unwrap()).unwrap();
        let r = x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap();
        prop_assert!(l.congruent(&r));
        prop_assert!(x.sub(&x).unwrap().coords().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn ring_axioms_p3(x in arb_witt(3, 3), y in arb_witt(3, 3), z in arb_witt(3, 3)) {
        let l = x.mul(&y).unwrap().mul(&z).unwrap();
        let r = x.mul(&y.mul(&z).unwrap()).unwrap();
        prop_assert!(l.congruent(&r));
        let l = x.mul(&y.add(&z).unwrap()).unwrap();
        let r = x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap();
        prop_assert!(l.congruent(&r));
    }
}
