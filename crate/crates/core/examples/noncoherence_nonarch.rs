//! The same failure of coherence for the lexicographic group Z[1/p] x Z[1/p],
//! where the leading valuations decrease without a minimum.
//!
//! ```text
//! cargo run --example noncoherence_nonarch
//! ```

use ainf::witness::{build_nonarchimedean_witness, ideal_chain_report};

fn main() -> ainf::error::Result<()> {
    let w = build_nonarchimedean_witness(2, 6)?;
    println!("f = {}", w.f);
    println!("g = {}", w.g);
    println!(
        "partial sums: {}\n",
        w.partial_sums.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
    );

    let chain = ideal_chain_report(&w, 6)?;
    for e in &chain.entries {
        println!("h_{}: v = {:<12} {:?}", e.k, e.leading_valuation.to_string(), e.membership.verdict);
    }
    println!("\nlex decreasing, no minimum: {}", chain.strictly_decreasing && chain.infimum_not_attained);
    println!("chain certified: {}", chain.passed);
    Ok(())
}
