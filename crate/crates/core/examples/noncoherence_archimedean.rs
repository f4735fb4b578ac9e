//! A_inf is not coherent: for an archimedean value group, an explicit pair
//! f, g whose ideal intersection needs infinitely many generators.
//!
//! ```text
//! cargo run --example noncoherence_archimedean
//! ```

use ainf::witness::{build_archimedean_witness, ideal_chain_report};

fn main() -> ainf::error::Result<()> {
    let w = build_archimedean_witness(2, 5)?;
    println!("exponents a_k = {}", w.a.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", "));
    println!("f = {}", w.f);
    println!("g = {}", w.g);
    println!("leading valuations stay above {}\n", w.bound);

    let chain = ideal_chain_report(&w, 8)?;
    for e in &chain.entries {
        println!(
            "h_{}: v = {:<12} in (f) ∩ (g): {:?}{}",
            e.k,
            e.leading_valuation.to_string(),
            e.membership.verdict,
            if e.new_generator { ", not in the ideal of its predecessors" } else { "" }
        );
    }
    println!("\nstrictly decreasing: {}", chain.strictly_decreasing);
    println!("above the bound:     {}", chain.above_bounds);
    println!("infimum not reached: {}", chain.infimum_not_attained);
    println!("chain certified:     {}", chain.passed);
    Ok(())
}
