use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{Error, Result};

/// Received channel values as log-likelihood ratios, `ln P(0)/P(1)`:
/// positive favours 0, exactly zero marks an erasure.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SoftWord(Vec<f64>);

impl SoftWord {
    pub fn new(llrs: Vec<f64>) -> Result<Self> {
        if let Some(pos) = llrs.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteLlr(pos));
        }
        Ok(SoftWord(llrs))
    }

    /// Noise-free LLRs: `+magnitude` for a 0 bit, `-magnitude` for a 1 bit.
    pub fn from_bits(bits: &[u8], magnitude: f64) -> Self {
        SoftWord(
            bits.iter()
                .map(|&b| if b == 0 { magnitude } else { -magnitude })
                .collect(),
        )
    }

    pub fn hard_decisions(&self) -> Vec<u8> {
        self.0.iter().map(|&l| u8::from(l < 0.0)).collect()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for SoftWord {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}
