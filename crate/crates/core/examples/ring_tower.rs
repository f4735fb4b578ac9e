//! The rings covering the punctured spectrum, modelled by the monomials
//! p^a [t]^gamma they contain.
//!
//! ```text
//! cargo run --example ring_tower
//! ```

use ainf::tower::{covering_table_check, Form, Monomial, Tower, TowerTag};
use ainf::value_group::GroupKind;

fn main() -> ainf::error::Result<()> {
    let tower = Tower::default();
    let monomials = [(1, 0), (0, 1), (-1, 2), (2, -1), (-1, -1)];
    print!("{:>12}", "");
    for tag in TowerTag::ALL {
        print!("{:>5}", tag.to_string());
    }
    println!();
    for (a, g) in monomials {
        let m = Monomial::int(GroupKind::Rat, a, g);
        print!("{:>12}", m.to_string());
        for tag in TowerTag::ALL {
            print!("{:>5}", if tower.member(&m, tag)? { "x" } else { "." });
        }
        println!();
    }

    let m = Monomial::int(GroupKind::Rat, 1, 3);
    println!("\ngauges of {m}:");
    for tag in [TowerTag::B1, TowerTag::B2, TowerTag::B12] {
        println!("  {tag}: {}", tower.gauge(&m, tag)?);
    }

    let report = covering_table_check(&tower, 8)?;
    println!("\ncovering table on [-8, 8]^2: {} cells, passed {}", report.cells.len(), report.passed);

    let bent = Tower::default().with_gauge(TowerTag::B1, vec![Form { ca: 1, cg: 0 }]);
    let report = covering_table_check(&bent, 8)?;
    println!("with a corrupted gauge on B1: passed {}", report.passed);
    if let Some(f) = report.failures.first() {
        println!("  first failure: {} at {}: {}", f.cell, f.monomial, f.detail);
    }
    Ok(())
}
