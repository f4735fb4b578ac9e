//! Arithmetic in W(o_K) for K the perfection of F_2((t)) completed, with
//! exponents in Z[1/2].
//!
//! ```text
//! cargo run --example witt_arithmetic
//! ```

use ainf::series::{tq, zq, HahnSeries};
use ainf::value_group::GroupKind;
use ainf::witt::{ring_membership, RingTag, WittJson, WittVec};

fn main() -> ainf::error::Result<()> {
    let p = 2;
    let one = WittVec::one(p, GroupKind::Zp1, 3);

    // [1] + [1] = 2 has Teichmüller coordinates (0, 1, 0, ...)
    let two = one.add(&one)?;
    println!("[1] + [1]      = {two}");

    // x lies in the maximal ideal of A; y is a unit
    let x = WittVec::from_teichmuller(0, vec![tq(p, 1, 2), tq(p, 1, 1), HahnSeries::zero(p, GroupKind::Zp1)])?;
    let y = WittVec::from_teichmuller(0, vec![HahnSeries::one(p, GroupKind::Zp1), tq(p, 1, 4)])?;
    let xy = x.mul(&y)?;
    println!("x              = {x}");
    println!("y              = {y}");
    println!("x y            = {xy}");

    // dividing by the unit recovers x up to the working precision
    let back = xy.div(&y, &zq(16, 1))?;
    println!("(x y) / y      = {back}");
    println!("matches x      : {}", back.congruent(&x));

    // p^-1 [t^-1] lives in W(K)[1/p] but in none of the smaller rings
    let pole = WittVec::from_teichmuller(-1, vec![tq(p, -1, 1)])?;
    for tag in RingTag::ALL {
        println!("{pole} in {:<10}: {:?}", tag.to_string(), ring_membership(&pole, tag));
    }

    println!("\nJSON operands for `ainf witt mul --input`:");
    let ops = serde_json::json!({ "x": WittJson::from_witt(&x), "y": WittJson::from_witt(&y) });
    println!("{}", serde_json::to_string(&ops).unwrap());
    Ok(())
}
