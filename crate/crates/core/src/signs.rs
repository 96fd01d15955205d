//! Koszul sign bookkeeping.
//!
//! Every sign in the chain-level formulas of this crate is produced by one
//! of two rules, and only here:
//!
//! * `insertion`: an operator is applied to a consecutive block of a word;
//!   the sign is the operator's parity times the sum of the degrees of the
//!   entries standing to the right of the block. Structure maps count as
//!   odd operators (they carry one shift); stored operator parities are
//!   used as stored.
//! * `rotation`: a block of entries is moved from the back of a word to the
//!   front; the sign is the total degree of the moved block times the total
//!   degree of everything else.
//!
//! Degrees entering these sums are reduced (shifted) degrees for plain
//! tensor entries and unshifted degrees for the distinguished bimodule
//! entries; callers assemble the right parity via [`Parity`] sums.

use crate::scalars::Field;
use std::ops::{Add, AddAssign, Mul};

/// Mod-2 degree.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct Parity(pub bool);

pub const EVEN: Parity = Parity(false);
pub const ODD: Parity = Parity(true);

impl Parity {
    pub fn from_usize(n: usize) -> Parity {
        Parity(n % 2 == 1)
    }
    pub fn is_odd(self) -> bool {
        self.0
    }
    pub fn flip(self) -> Parity {
        Parity(!self.0)
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, o: Parity) -> Parity {
        Parity(self.0 ^ o.0)
    }
}
impl AddAssign for Parity {
    fn add_assign(&mut self, o: Parity) {
        self.0 ^= o.0;
    }
}

/// A sign, +1 or -1.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Sign(pub bool); // true = negative

pub const PLUS: Sign = Sign(false);
pub const MINUS: Sign = Sign(true);

impl Sign {
    /// (-1)^(a*b)
    pub fn koszul(a: Parity, b: Parity) -> Sign {
        Sign(a.0 && b.0)
    }
    /// (-1)^a
    pub fn from_parity(a: Parity) -> Sign {
        Sign(a.0)
    }
    pub fn is_negative(self) -> bool {
        self.0
    }
    pub fn apply<F: Field>(self, x: F) -> F {
        if self.0 {
            -x
        } else {
            x
        }
    }
    pub fn unit<F: Field>(self) -> F {
        self.apply(F::one())
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, o: Sign) -> Sign {
        Sign(self.0 ^ o.0)
    }
}

/// Sign for applying an operator of parity `op` to a block with entries of
/// total degree `right_of_block` standing to its right.
pub fn insertion(op: Parity, right_of_block: Parity) -> Sign {
    Sign::koszul(op, right_of_block)
}

/// Sign for rotating a block of total degree `moved` from the back of a word
/// to the front, past the remaining entries of total degree `rest`.
pub fn rotation(moved: Parity, rest: Parity) -> Sign {
    Sign::koszul(moved, rest)
}
