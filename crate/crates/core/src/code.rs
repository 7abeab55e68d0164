//! Rate-1/n convolutional code definitions.
//!
//! A generator is stored as its octal tap word: bit `K-1` (the most
//! significant) taps the current input, bit `K-1-i` taps the input `i` steps
//! in the past. For K=3, octal 7 taps the current and both previous inputs and
//! octal 5 taps the current and the second previous input.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::Gf2Poly;

pub const MIN_CONSTRAINT_LENGTH: u8 = 2;
pub const MAX_CONSTRAINT_LENGTH: u8 = 16;
/// Branch labels are packed into a `u32` and decoders tabulate all `2^n`
/// labels per step, so `n` is kept small.
pub const MAX_OUTPUTS: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Generator {
    taps: u32,
    k: u8,
}

impl Generator {
    pub fn from_taps(taps: u32, k: u8) -> Result<Self> {
        check_k(k)?;
        if taps >> k != 0 {
            return Err(Error::OctalOverflow {
                octal: alloc::format!("{:o}", taps),
                k,
            });
        }
        Ok(Generator { taps, k })
    }

    pub fn from_octal(text: &str, k: u8) -> Result<Self> {
        let text = text.trim();
        let taps = u32::from_str_radix(text, 8).map_err(|_| {
            if !text.is_empty() && text.bytes().all(|b| (b'0'..=b'7').contains(&b)) {
                // digits are fine, the value is just huge
                Error::OctalOverflow {
                    octal: text.to_string(),
                    k,
                }
            } else {
                Error::InvalidOctal(text.to_string())
            }
        })?;
        Self::from_taps(taps, k)
    }

    /// Octal tap word, current-input tap in bit `K-1`.
    pub const fn taps(self) -> u32 {
        self.taps
    }

    pub const fn constraint_length(self) -> u8 {
        self.k
    }

    /// Coefficient multiplying the input `delay` steps in the past.
    pub const fn coefficient(self, delay: u8) -> u8 {
        ((self.taps >> (self.k - 1 - delay)) & 1) as u8
    }

    pub fn coefficients(self) -> Vec<u8> {
        (0..self.k).map(|i| self.coefficient(i)).collect()
    }

    /// The generator as a polynomial in `D` (coefficient `i` on `D^i`).
    pub fn to_poly(self) -> Gf2Poly {
        let bits = (0..self.k).fold(0u64, |acc, i| acc | (u64::from(self.coefficient(i)) << i));
        Gf2Poly::from_bits(bits)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:o}", self.taps)
    }
}

/// A validated rate-1/n convolutional code.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CodeSpec {
    k: u8,
    generators: Vec<Generator>,
    id: String,
}

fn check_k(k: u8) -> Result<()> {
    if !(MIN_CONSTRAINT_LENGTH..=MAX_CONSTRAINT_LENGTH).contains(&k) {
        return Err(Error::InvalidConstraintLength(k));
    }
    Ok(())
}

impl CodeSpec {
    /// Builds a code from octal generator strings, e.g. `CodeSpec::new(3, &["7", "5"])`.
    pub fn new<S: AsRef<str>>(k: u8, generators_octal: &[S]) -> Result<Self> {
        check_k(k)?;
        let taps = generators_octal
            .iter()
            .map(|g| Generator::from_octal(g.as_ref(), k).map(Generator::taps))
            .collect::<Result<Vec<_>>>()?;
        Self::from_taps(k, &taps)
    }

    pub fn from_taps(k: u8, taps: &[u32]) -> Result<Self> {
        check_k(k)?;
        if taps.len() < 2 {
            return Err(Error::TooFewGenerators(taps.len()));
        }
        if taps.len() > MAX_OUTPUTS {
            return Err(Error::TooManyGenerators {
                got: taps.len(),
                max: MAX_OUTPUTS,
            });
        }
        let generators = taps
            .iter()
            .map(|&t| Generator::from_taps(t, k))
            .collect::<Result<Vec<_>>>()?;
        let current = generators.iter().any(|g| g.coefficient(0) == 1);
        let oldest = generators.iter().any(|g| g.coefficient(k - 1) == 1);
        if !current || !oldest {
            return Err(Error::DegenerateCode(k));
        }
        let mut id = alloc::format!("K{}-(", k);
        for (i, g) in generators.iter().enumerate() {
            if i > 0 {
                id.push(',');
            }
            id.push_str(&g.to_string());
        }
        id.push(')');
        Ok(CodeSpec { k, generators, id })
    }

    pub fn constraint_length(&self) -> u8 {
        self.k
    }

    /// Encoder memory, `K - 1`.
    pub fn memory(&self) -> u8 {
        self.k - 1
    }

    /// Outputs per input bit.
    pub fn n(&self) -> usize {
        self.generators.len()
    }

    pub fn num_states(&self) -> usize {
        1 << (self.k - 1)
    }

    pub fn rate(&self) -> f64 {
        1.0 / self.n() as f64
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn taps(&self) -> Vec<u32> {
        self.generators.iter().map(|g| g.taps()).collect()
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Massey-Sain test: a rate-1/n code is catastrophic iff the gcd of its
    /// generator polynomials is not a power of `D`. Returns the offending
    /// common factor (with any `D^l` removed) when it is.
    pub fn catastrophic_factor(&self) -> Option<Gf2Poly> {
        let g = self
            .generators
            .iter()
            .map(|g| g.to_poly())
            .fold(Gf2Poly::ZERO, |acc, p| {
                Gf2Poly::gcd(acc, p).unwrap_or(Gf2Poly::ZERO)
            });
        let (factor, _) = g.strip_delay();
        // an all-zero generator set cannot pass validation, but be explicit
        if factor == Gf2Poly::ONE {
            None
        } else {
            Some(factor)
        }
    }

    pub fn is_catastrophic(&self) -> bool {
        self.catastrophic_factor().is_some()
    }
}

/// `K:1/n:g1,g2,...`, e.g. `7:1/2:171,133`.
impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:1/{}:", self.k, self.n())?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", g)?;
        }
        Ok(())
    }
}

impl FromStr for CodeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidCodeString(s.to_string());
        let mut parts = s.trim().split(':');
        let (Some(k), Some(rate), Some(gens), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad());
        };
        let k: u8 = k.trim().parse().map_err(|_| bad())?;
        let gens: Vec<&str> = gens.split(',').map(str::trim).collect();
        let (num, den) = rate.trim().split_once('/').ok_or_else(bad)?;
        let num: usize = num.trim().parse().map_err(|_| bad())?;
        let den: usize = den.trim().parse().map_err(|_| bad())?;
        if num != 1 || den != gens.len() {
            return Err(bad());
        }
        CodeSpec::new(k, &gens)
    }
}
