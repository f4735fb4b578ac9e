//! Ghost-component arithmetic on integer Witt vectors, independent of the
//! polynomial tables.
//!
//! For `x = (x_0, ..., x_(N-1))` over `Z` the ghost components are
//! `w_n = sum_(i <= n) p^i x_i^(p^(n-i))`; sums and products are taken
//! componentwise and the Witt coordinates recovered by exact division. Over
//! `F_p` Witt and Teichmüller coordinates agree, so reducing mod `p` gives
//! the expected Teichmüller coordinates of a prime-field vector.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Pow, Zero};

// `sum_(i < upto) p^i x_i^(p^(n-i))`
fn partial_ghost(x: &[BigInt], p: u32, n: usize, upto: usize) -> BigInt {
    (0..upto)
        .map(|i| BigInt::from(p).pow(i as u32) * x[i].clone().pow(p.pow((n - i) as u32)))
        .sum()
}

fn ghost(x: &[BigInt], p: u32) -> Vec<BigInt> {
    (0..x.len()).map(|n| partial_ghost(x, p, n, n + 1)).collect()
}

fn unghost(w: &[BigInt], p: u32) -> Vec<BigInt> {
    let mut x: Vec<BigInt> = Vec::with_capacity(w.len());
    for n in 0..w.len() {
        let (q, r) = (&w[n] - partial_ghost(&x, p, n, n)).div_rem(&BigInt::from(p).pow(n as u32));
        assert!(r.is_zero(), "ghost vector is not integral at level {n}");
        x.push(q);
    }
    x
}

fn combine(x: &[u32], y: &[u32], p: u32, op: impl Fn(&BigInt, &BigInt) -> BigInt) -> Vec<u32> {
    assert_eq!(x.len(), y.len(), "vectors of different length");
    let pb = BigInt::from(p);
    let lift = |v: &[u32]| v.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>();
    let (gx, gy) = (ghost(&lift(x), p), ghost(&lift(y), p));
    let gz: Vec<BigInt> = gx.iter().zip(&gy).map(|(a, b)| op(a, b)).collect();
    unghost(&gz, p)
        .into_iter()
        .map(|c| u32::try_from(c.mod_floor(&pb)).expect("residue below p"))
        .collect()
}

/// Witt coordinates of `x + y` over `F_p`, `x, y` given by residues.
pub fn ghost_add(x: &[u32], y: &[u32], p: u32) -> Vec<u32> {
    combine(x, y, p, |a, b| a + b)
}

/// Witt coordinates of `x * y` over `F_p`.
pub fn ghost_mul(x: &[u32], y: &[u32], p: u32) -> Vec<u32> {
    combine(x, y, p, |a, b| a * b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_plus_one() {
        assert_eq!(ghost_add(&[1, 0, 0], &[1, 0, 0], 2), vec![0, 1, 0]);
        // 2 = [-1] + 3 = [2] + p[1] in W(F_3)
        assert_eq!(ghost_add(&[1, 0, 0], &[1, 0, 0], 3), vec![2, 1, 0]);
        // 1 + 3 = 4 = p^2 in W(F_2)
        assert_eq!(ghost_add(&[1, 0, 0], &[1, 1, 0], 2), vec![0, 0, 1]);
    }

    #[test]
    fn products() {
        assert_eq!(ghost_mul(&[1, 1, 0], &[1, 0, 0], 2), vec![1, 1, 0]);
        // p * p = p^2
        assert_eq!(ghost_mul(&[0, 1, 0, 0], &[0, 1, 0, 0], 3), vec![0, 0, 1, 0]);
    }
}
