use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::series::Valuation;
use crate::value_group::GammaElt;

use super::vector::WittVec;

/// Subrings of `W(K)[1/p]` recognised by [`ring_membership`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RingTag {
    /// `W(o_K)`: levels `>= 0`, coordinates in `o_K`.
    A,
    /// `W(o_K)[1/p]`.
    AInvP,
    /// `W(K)`.
    WK,
    /// `W(K)[1/p]`.
    WKInvP,
    /// `W(m_K)`: levels `>= 0`, coordinates in `m_K`.
    WmK,
}

impl RingTag {
    pub const ALL: [RingTag; 5] = [RingTag::A, RingTag::AInvP, RingTag::WK, RingTag::WKInvP, RingTag::WmK];

    fn no_poles(self) -> bool {
        matches!(self, RingTag::A | RingTag::WK | RingTag::WmK)
    }
}

impl fmt::Display for RingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RingTag::A => "A",
            RingTag::AInvP => "A[1/p]",
            RingTag::WK => "W(K)",
            RingTag::WKInvP => "W(K)[1/p]",
            RingTag::WmK => "W(m_K)",
        })
    }
}

impl FromStr for RingTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "A" => RingTag::A,
            "A[1/p]" | "A1p" => RingTag::AInvP,
            "W(K)" | "WK" => RingTag::WK,
            "W(K)[1/p]" | "WK1p" => RingTag::WKInvP,
            "W(m_K)" | "WmK" => RingTag::WmK,
            _ => return Err(Error::Invalid(format!("unknown ring tag {s:?}"))),
        })
    }
}

/// Three-valued answer for questions decided at finite precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Yes,
    No,
    Indeterminate,
}

impl Membership {
    /// Conjunction where a definite `No` dominates.
    pub fn and(self, other: Membership) -> Membership {
        use Membership::*;
        match (self, other) {
            (No, _) | (_, No) => No,
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            _ => Yes,
        }
    }

    pub fn from_bool(b: bool) -> Membership {
        if b {
            Membership::Yes
        } else {
            Membership::No
        }
    }
}

// Is a coordinate with valuation `v` bounded below by 0 (or above 0 when
// `strict`)?
fn coord_check(v: &Valuation, strict: bool) -> Membership {
    let ok = |g: &GammaElt| if strict { g.is_positive() } else { !g.is_negative() };
    match v {
        Valuation::Infinite => Membership::Yes,
        Valuation::Finite(g) => Membership::from_bool(ok(g)),
        Valuation::AtLeast(g) => {
            if ok(g) {
                Membership::Yes
            } else {
                Membership::Indeterminate
            }
        }
    }
}

/// Membership of the computed levels of `h` in the subring `tag`.
pub fn ring_membership(h: &WittVec, tag: RingTag) -> Membership {
    let mut out = Membership::Yes;
    for (n, c) in h.levels() {
        let v = c.valuation();
        if n < 0 && tag.no_poles() {
            out = out.and(match v {
                Valuation::Infinite => Membership::Yes,
                Valuation::Finite(_) => Membership::No,
                Valuation::AtLeast(_) => Membership::Indeterminate,
            });
        }
        out = out.and(match tag {
            RingTag::A | RingTag::AInvP => coord_check(&v, false),
            RingTag::WmK => coord_check(&v, true),
            RingTag::WK | RingTag::WKInvP => Membership::Yes,
        });
        if out == Membership::No {
            break;
        }
    }
    out
}
