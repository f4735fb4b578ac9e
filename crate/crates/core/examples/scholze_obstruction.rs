//! An element of W(m_K) that is not a product of two elements of W(m_K):
//! the exponents of its Teichmüller coordinates sum to a Liouville-type
//! number, which no splitting of the Newton polygon can reproduce.
//!
//! ```text
//! cargo run --example scholze_obstruction
//! ```

use ainf::witness::{
    build_scholze_element, candidate_family, factorization_obstruction_check, liouville_certificate, regroup,
    ObstructionOutcome,
};

fn main() -> ainf::error::Result<()> {
    let x = build_scholze_element(2, 6)?;
    println!("s_k = {}", x.s.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", "));
    println!("x   = {}\n", x.x);

    let odd: Vec<bool> = (1..=x.r.len()).map(|k| k % 2 == 1).collect();
    match liouville_certificate(&regroup(&x.r, &odd), 1000) {
        Ok(c) => println!("no a/b with b <= {} near the sum (stage {})", c.height, c.stage),
        Err(f) => println!("Liouville certificate failed: {f:?}"),
    }

    let family = candidate_family(&x)?;
    let mut violated = 0;
    for c in &family {
        match factorization_obstruction_check(&x, &c.y, &c.z)? {
            ObstructionOutcome::Violated { violations } => {
                violated += 1;
                if violated <= 4 {
                    println!("{:<28} {:?}", c.label, violations[0]);
                }
            }
            ObstructionOutcome::Indeterminate { reason, .. } => println!("{:<28} indeterminate: {reason}", c.label),
        }
    }
    println!("...\n{violated} of {} candidate factorizations violate a requirement", family.len());
    Ok(())
}
