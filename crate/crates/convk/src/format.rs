//! Coded-data files.
//!
//! A file is a 16-byte header followed by the payload:
//!
//! | bytes | field |
//! |-------|-------|
//! | 0..4  | magic `CVK1` |
//! | 4     | constraint length K |
//! | 5     | outputs per input bit n |
//! | 6     | 1 if zero-tail terminated, else 0 |
//! | 7     | payload kind: 0 packed bits, 1 LLRs |
//! | 8..16 | message length in bits, little-endian u64 |
//!
//! Packed bits are stored MSB-first with zero padding in the last byte. LLR
//! payloads are little-endian `f32`, positive favouring 0. Plain message
//! files (the input of `encode`, output of `decode`) are raw packed bits
//! with no header.

use convk_core::CodeSpec;

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"CVK1";
pub const HEADER_LEN: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Payload {
    Bits,
    Llrs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub k: u8,
    pub n: u8,
    pub terminated: bool,
    pub payload: Payload,
    pub message_bits: u64,
}

impl Header {
    pub fn for_code(code: &CodeSpec, terminated: bool, payload: Payload, message_bits: u64) -> Self {
        Header {
            k: code.constraint_length(),
            n: code.n() as u8,
            terminated,
            payload,
            message_bits,
        }
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[..4].copy_from_slice(&MAGIC);
        out[4] = self.k;
        out[5] = self.n;
        out[6] = u8::from(self.terminated);
        out[7] = match self.payload {
            Payload::Bits => 0,
            Payload::Llrs => 1,
        };
        out[8..].copy_from_slice(&self.message_bits.to_le_bytes());
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Format(format!("{} bytes is shorter than the header", bytes.len())));
        }
        if bytes[..4] != MAGIC {
            return Err(Error::Format("missing CVK1 magic".into()));
        }
        let terminated = match bytes[6] {
            0 => false,
            1 => true,
            other => return Err(Error::Format(format!("terminated flag {}", other))),
        };
        let payload = match bytes[7] {
            0 => Payload::Bits,
            1 => Payload::Llrs,
            other => return Err(Error::Format(format!("unknown payload kind {}", other))),
        };
        let message_bits = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
        Ok(Header {
            k: bytes[4],
            n: bytes[5],
            terminated,
            payload,
            message_bits,
        })
    }

    /// Rejects files written for a different constraint length or rate.
    pub fn check_code(&self, code: &CodeSpec) -> Result<()> {
        if self.k != code.constraint_length() || usize::from(self.n) != code.n() {
            return Err(Error::Format(format!(
                "file holds a K={} n={} code, decoder configured for {}",
                self.k, self.n, code
            )));
        }
        Ok(())
    }

    /// Trellis steps covered by the payload.
    pub fn steps(&self) -> usize {
        self.message_bits as usize + if self.terminated { usize::from(self.k) - 1 } else { 0 }
    }
}

pub fn pack_bits(bits: &[u8]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | ((b & 1) << (7 - i)))
        })
        .collect()
}

/// First `count` bits of `bytes`, MSB-first.
pub fn unpack_bits(bytes: &[u8], count: usize) -> Result<Vec<u8>> {
    if bytes.len() * 8 < count {
        return Err(Error::Format(format!(
            "payload holds {} bits, expected {}",
            bytes.len() * 8,
            count
        )));
    }
    Ok((0..count).map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1).collect())
}

/// Payload read back from a coded file.
#[derive(Clone, Debug, PartialEq)]
pub enum Coded {
    Bits(Vec<u8>),
    Llrs(Vec<f64>),
}

impl Coded {
    pub fn len(&self) -> usize {
        match self {
            Coded::Bits(b) => b.len(),
            Coded::Llrs(l) => l.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn write_bits(header: &Header, bits: &[u8]) -> Vec<u8> {
    let mut out = header.to_bytes().to_vec();
    out.extend(pack_bits(bits));
    out
}

pub fn write_llrs(header: &Header, llrs: &[f64]) -> Vec<u8> {
    let mut out = header.to_bytes().to_vec();
    for &l in llrs {
        out.extend((l as f32).to_le_bytes());
    }
    out
}

/// Splits a coded file into header and payload. `coded_len` maps the header
/// to the number of transmitted values expected; the payload must match it
/// exactly.
pub fn read_coded(bytes: &[u8], coded_len: impl FnOnce(&Header) -> usize) -> Result<(Header, Coded)> {
    let header = Header::parse(bytes)?;
    let body = &bytes[HEADER_LEN..];
    let count = coded_len(&header);
    let coded = match header.payload {
        Payload::Bits => {
            if body.len() != count.div_ceil(8) {
                return Err(Error::Format(format!(
                    "{} payload bytes for {} coded bits",
                    body.len(),
                    count
                )));
            }
            Coded::Bits(unpack_bits(body, count)?)
        }
        Payload::Llrs => {
            if body.len() != 4 * count {
                return Err(Error::Format(format!(
                    "{} payload bytes for {} LLRs",
                    body.len(),
                    count
                )));
            }
            let llrs: Vec<f64> = body
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64)
                .collect();
            if let Some(i) = llrs.iter().position(|l| !l.is_finite()) {
                return Err(Error::Format(format!("LLR {} is not finite", i)));
            }
            Coded::Llrs(llrs)
        }
    };
    Ok((header, coded))
}
