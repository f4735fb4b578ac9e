//! Truncated Witt vectors over Hahn series fields.

mod arith;
mod member;
pub mod oracle;
pub mod poly;
mod vector;

pub use arith::{
    divide_exact_teichmuller, divide_teichmuller, minus_one, mul_teichmuller, witt_add,
    witt_divide_to, witt_divide_with_precision, witt_mul, witt_neg, witt_sub,
};
pub use member::{ring_membership, Membership, RingTag};
pub use poly::{build_witt_tables, WittPolyTable};
pub use vector::{Tail, TailJson, WittJson, WittVec};
pub(crate) use vector::Floor;
