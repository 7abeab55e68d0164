//! Row-column block interleaver applied to coded bits: each block is written
//! row by row and read out column by column.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct InterleaverSpec {
    rows: usize,
    cols: usize,
}

impl InterleaverSpec {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::InvalidInterleaver { rows, cols });
        }
        Ok(InterleaverSpec { rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn block_len(&self) -> usize {
        self.rows * self.cols
    }

    /// Smallest multiple of the block size holding `len` items.
    pub fn padded_len(&self, len: usize) -> usize {
        len.div_ceil(self.block_len()) * self.block_len()
    }

    fn check(&self, len: usize) -> Result<()> {
        if !len.is_multiple_of(self.block_len()) {
            return Err(Error::LengthNotMultipleOfBlock {
                len,
                block: self.block_len(),
            });
        }
        Ok(())
    }

    pub fn interleave<T: Copy>(&self, data: &[T]) -> Result<Vec<T>> {
        self.check(data.len())?;
        let mut out = Vec::with_capacity(data.len());
        for block in data.chunks_exact(self.block_len()) {
            for c in 0..self.cols {
                for r in 0..self.rows {
                    out.push(block[r * self.cols + c]);
                }
            }
        }
        Ok(out)
    }

    pub fn deinterleave<T: Copy>(&self, data: &[T]) -> Result<Vec<T>> {
        self.check(data.len())?;
        let mut out = Vec::with_capacity(data.len());
        for block in data.chunks_exact(self.block_len()) {
            for r in 0..self.rows {
                for c in 0..self.cols {
                    out.push(block[c * self.rows + r]);
                }
            }
        }
        Ok(out)
    }
}

/// `il=RxC`
impl fmt::Display for InterleaverSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "il={}x{}", self.rows, self.cols)
    }
}

impl FromStr for InterleaverSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim();
        let body = body.strip_prefix("il=").unwrap_or(body);
        let bad = || Error::InvalidInterleaver { rows: 0, cols: 0 };
        let (r, c) = body.split_once(['x', 'X']).ok_or_else(bad)?;
        let rows = r.trim().parse().map_err(|_| bad())?;
        let cols = c.trim().parse().map_err(|_| bad())?;
        InterleaverSpec::new(rows, cols)
    }
}
