//! Newton polygons of Witt vectors and their behaviour under products.
//!
//! ```text
//! cargo run --example newton_polygons
//! ```

use ainf::newton::{divisibility_slope_test, gauss_norm, newton_polygon, np_minkowski};
use ainf::series::tq;
use ainf::value_group::rat;
use ainf::witt::{WittJson, WittVec};

fn main() -> ainf::error::Result<()> {
    let p = 2;
    // v(c_n) = 2, 1, 0: one slope -1 of width 2
    let f = WittVec::from_teichmuller(0, vec![tq(p, 2, 1), tq(p, 1, 1), tq(p, 0, 1)])?;
    // v(c_n) = 3/2, 1/2, 0: slopes -1 and -1/2
    let g = WittVec::from_teichmuller(0, vec![tq(p, 3, 2), tq(p, 1, 2), tq(p, 0, 1)])?;

    let (nf, ng) = (newton_polygon(&f)?, newton_polygon(&g)?);
    println!("NP(f):\n{}", nf.ascii_plot());
    println!("NP(g):\n{}", ng.ascii_plot());

    // the product has width 4, so ask for five levels
    let fg = f.mul_to(&g, 5)?;
    let nfg = newton_polygon(&fg)?;
    println!("f g = {fg}");
    println!("NP(f g):\n{}", nfg.ascii_plot());
    let show = |v: Vec<(ainf::newton::SlopeValue, u64)>| {
        v.iter().map(|(s, w)| format!("{s} x{w}")).collect::<Vec<_>>().join(", ")
    };
    println!("certified slopes of f g     : {}", show(nfg.slopes()));
    println!("slopes of f and g together  : {}", show(np_minkowski(&nf, &ng).slopes()));

    // Gauss norms min(n + s v(c_n)) are multiplicative in s
    for s in [rat(1, 2), rat(1, 1), rat(2, 1)] {
        let (a, b, c) = (gauss_norm(&f, &s)?, gauss_norm(&g, &s)?, gauss_norm(&fg, &s)?);
        println!("s = {s}: w(f) + w(g) = {}, w(f g) = {} ({})", &a.value + &b.value, c.value, if c.exact { "exact" } else { "bound" });
    }

    println!("slope test for g | f g: {:?}", divisibility_slope_test(&fg, &g));
    println!("slope test for f g | g: {:?}", divisibility_slope_test(&g, &fg));

    println!("\nJSON for `ainf newton show --input`:");
    println!("{}", serde_json::to_string(&WittJson::from_witt(&g)).unwrap());
    Ok(())
}
