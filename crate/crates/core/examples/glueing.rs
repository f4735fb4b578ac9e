//! Extending vector bundles over the puncture: a transition matrix over
//! W(K)[1/p] is split into a matrix over A[1/p] and one over W(K), whose
//! columns give a free basis.
//!
//! ```text
//! cargo run --example glueing
//! ```

use ainf::glue::{glue_to_free, random_round_trip, reflexivity_check, GlueDatum, GlueFactor};
use ainf::series::{tq, zq};
use ainf::value_group::GroupKind;
use ainf::witt::WittVec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ainf::error::Result<()> {
    let p = 2;
    // T = (I + p^-1 [t] E_01) diag([t^-1/2], 1)
    let e = WittVec::from_teichmuller(-1, vec![tq(p, 1, 1)])?;
    let datum = GlueDatum::new(
        p,
        GroupKind::Zp1,
        2,
        vec![
            GlueFactor::Elem { i: 0, j: 1, e },
            GlueFactor::Diag(vec![(0, zq(-1, 2)), (0, zq(0, 1))]),
        ],
        4,
        zq(16, 1),
    )?;
    let cert = glue_to_free(&datum)?;
    println!("basis chosen from generators {:?}", cert.basis);
    for (name, m) in [("U", &cert.u), ("Q", &cert.q)] {
        println!("{name}:");
        for row in &m.rows {
            println!("  {}", row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("   |   "));
        }
    }
    println!("T Q = U: {:?} at precision {}", cert.residual.passed(), cert.residual.precision);
    println!("U over A[1/p]: {:?}, Q over W(K): {:?}", cert.u_in_a_inv_p, cert.q_in_wk);
    println!("certificate passes: {}", cert.passed);
    println!("reflexive: {}", reflexivity_check(&cert.q, &datum)?.holds);

    // Scrambled bundles with a known basis: recover it up to a change of
    // basis over A.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in 1..=3 {
        let rt = random_round_trip(&mut rng, p, d, 4, zq(16, 1))?;
        let c = glue_to_free(&rt.datum)?;
        let rec = rt.recovery(&c)?;
        println!(
            "rank {d}: {} factors, certificate {}, recovered basis {}",
            rt.datum.factors.len(),
            c.passed,
            rec.passed
        );
    }

    println!("\nJSON for `ainf glue --input`:");
    println!("{}", serde_json::to_string(&datum).unwrap());
    Ok(())
}
