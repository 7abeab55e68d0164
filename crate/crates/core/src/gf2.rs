//! Polynomials over GF(2) in the delay operator `D`, packed into a `u64`
//! with bit `i` holding the coefficient of `D^i`.

use core::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Gf2Poly(u64);

impl Gf2Poly {
    pub const ZERO: Gf2Poly = Gf2Poly(0);
    pub const ONE: Gf2Poly = Gf2Poly(1);
    /// The monomial `D`.
    pub const D: Gf2Poly = Gf2Poly(2);

    pub const fn from_bits(bits: u64) -> Self {
        Gf2Poly(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Degree, or `None` for the zero polynomial.
    pub const fn degree(self) -> Option<u32> {
        if self.0 == 0 {
            None
        } else {
            Some(63 - self.0.leading_zeros())
        }
    }

    pub const fn coefficient(self, power: u32) -> u8 {
        ((self.0 >> power) & 1) as u8
    }

    /// Carry-less product; `None` if the result does not fit in 64 coefficients.
    pub fn checked_mul(self, rhs: Gf2Poly) -> Option<Gf2Poly> {
        match (self.degree(), rhs.degree()) {
            (Some(a), Some(b)) if a + b > 63 => None,
            (None, _) | (_, None) => Some(Gf2Poly::ZERO),
            _ => {
                let mut acc = 0u64;
                let mut a = self.0;
                let mut shift = 0;
                while a != 0 {
                    if a & 1 == 1 {
                        acc ^= rhs.0 << shift;
                    }
                    a >>= 1;
                    shift += 1;
                }
                Some(Gf2Poly(acc))
            }
        }
    }

    /// Long division. Returns `None` when dividing by zero.
    pub fn div_rem(self, divisor: Gf2Poly) -> Option<(Gf2Poly, Gf2Poly)> {
        let dd = divisor.degree()?;
        let mut rem = self.0;
        let mut quot = 0u64;
        while let Some(rd) = Gf2Poly(rem).degree() {
            if rd < dd {
                break;
            }
            let shift = rd - dd;
            quot |= 1 << shift;
            rem ^= divisor.0 << shift;
        }
        Some((Gf2Poly(quot), Gf2Poly(rem)))
    }

    /// Euclid's algorithm. Every nonzero GF(2) polynomial is monic, so the
    /// result needs no normalisation.
    pub fn gcd(a: Gf2Poly, b: Gf2Poly) -> Result<Gf2Poly> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::BothZero);
        }
        let (mut a, mut b) = (a, b);
        while !b.is_zero() {
            let (_, r) = a.div_rem(b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        Ok(a)
    }

    /// Splits off the largest power of `D` dividing `self`: returns
    /// `(self / D^l, l)`. Zero maps to `(0, 0)`.
    pub const fn strip_delay(self) -> (Gf2Poly, u32) {
        if self.0 == 0 {
            return (self, 0);
        }
        let l = self.0.trailing_zeros();
        (Gf2Poly(self.0 >> l), l)
    }

    /// True for `D^l`, `l >= 0`.
    pub const fn is_delay(self) -> bool {
        self.0 != 0 && self.0.is_power_of_two()
    }
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return f.write_str("0");
        }
        let mut first = true;
        for i in 0..64 {
            if self.coefficient(i) == 0 {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match i {
                0 => f.write_str("1")?,
                1 => f.write_str("D")?,
                _ => write!(f, "D^{}", i)?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Poly({})", self)
    }
}
