//! Periodic puncturing of a rate-1/n mother code.
//!
//! The pattern has one row per generator and one column per input step; a
//! `1` keeps the coded bit, a `0` deletes it. Textual form lists the rows
//! separated by `/`, e.g. `p=110/101` for rate 3/4 on a rate-1/2 code.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::soft::SoftWord;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PunctureScheme {
    n: usize,
    period: usize,
    /// Row-major `n x period`.
    keep: Vec<bool>,
}

impl PunctureScheme {
    pub fn new(rows: &[Vec<u8>]) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidPuncture(msg.to_string()));
        if rows.len() < 2 {
            return bad("need one row per generator (at least 2)");
        }
        let period = rows[0].len();
        if period == 0 || rows.iter().any(|r| r.len() != period) {
            return bad("rows must be non-empty and of equal length");
        }
        if rows.iter().flatten().any(|&b| b > 1) {
            return bad("entries must be 0 or 1");
        }
        let n = rows.len();
        let keep: Vec<bool> = rows.iter().flatten().map(|&b| b == 1).collect();
        for col in 0..period {
            if (0..n).all(|row| !keep[row * period + col]) {
                return bad("every column must keep at least one bit");
            }
        }
        Ok(PunctureScheme { n, period, keep })
    }

    /// No deletions.
    pub fn identity(n: usize) -> Self {
        PunctureScheme {
            n,
            period: 1,
            keep: vec![true; n],
        }
    }

    /// `[[1,1],[1,0]]`: rate 2/3 from a rate-1/2 code.
    pub fn rate_2_3() -> Self {
        Self::new(&[vec![1, 1], vec![1, 0]]).expect("valid pattern")
    }

    /// `[[1,1,0],[1,0,1]]`: rate 3/4 from a rate-1/2 code.
    pub fn rate_3_4() -> Self {
        Self::new(&[vec![1, 1, 0], vec![1, 0, 1]]).expect("valid pattern")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn kept_per_period(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }

    /// Information bits per transmitted bit.
    pub fn rate(&self) -> f64 {
        self.period as f64 / self.kept_per_period() as f64
    }

    #[inline]
    pub fn keeps(&self, row: usize, step: usize) -> bool {
        self.keep[row * self.period + step % self.period]
    }

    /// Transmitted bits for `steps` input steps.
    pub fn kept_len(&self, steps: usize) -> usize {
        let full = steps / self.period * self.kept_per_period();
        let partial = (0..steps % self.period)
            .map(|col| (0..self.n).filter(|&row| self.keeps(row, col)).count())
            .sum::<usize>();
        full + partial
    }

    /// Drops deleted positions, preserving order. Works on bits and LLRs alike.
    pub fn puncture<T: Copy>(&self, coded: &[T]) -> Result<Vec<T>> {
        if !coded.len().is_multiple_of(self.n) {
            return Err(Error::LengthNotMultipleOfN {
                len: coded.len(),
                n: self.n,
            });
        }
        let steps = coded.len() / self.n;
        let mut out = Vec::with_capacity(self.kept_len(steps));
        for (t, symbol) in coded.chunks_exact(self.n).enumerate() {
            for (row, &v) in symbol.iter().enumerate() {
                if self.keeps(row, t) {
                    out.push(v);
                }
            }
        }
        Ok(out)
    }

    /// Reinserts erasures (LLR 0) at deleted positions.
    pub fn depuncture(&self, received: &[f64], original_steps: usize) -> Result<SoftWord> {
        let expected = self.kept_len(original_steps);
        if received.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: received.len(),
            });
        }
        let mut out = Vec::with_capacity(original_steps * self.n);
        let mut it = received.iter();
        for t in 0..original_steps {
            for row in 0..self.n {
                out.push(if self.keeps(row, t) {
                    *it.next().expect("length checked")
                } else {
                    0.0
                });
            }
        }
        SoftWord::new(out)
    }
}

impl fmt::Display for PunctureScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("p=")?;
        for row in 0..self.n {
            if row > 0 {
                f.write_str("/")?;
            }
            for col in 0..self.period {
                f.write_str(if self.keeps(row, col) { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

impl FromStr for PunctureScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim();
        let body = body.strip_prefix("p=").unwrap_or(body);
        let rows = body
            .split('/')
            .map(|row| {
                row.trim()
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        _ => Err(Error::InvalidPuncture(String::from(s))),
                    })
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        PunctureScheme::new(&rows)
    }
}
