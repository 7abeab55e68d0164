//! Shift-register encoder with optional zero-tail termination.

use alloc::vec::Vec;

use crate::code::CodeSpec;
use crate::error::{Error, Result};

/// Streaming encoder. The register holds the last `K-1` inputs, most recent
/// in the most significant bit, and starts at zero.
#[derive(Clone, Debug)]
pub struct Encoder {
    taps: Vec<u32>,
    k: u8,
    register: u32,
    bits_consumed: u64,
}

impl Encoder {
    pub fn new(code: &CodeSpec) -> Self {
        Encoder {
            taps: code.taps(),
            k: code.constraint_length(),
            register: 0,
            bits_consumed: 0,
        }
    }

    pub fn register(&self) -> u32 {
        self.register
    }

    pub fn bits_consumed(&self) -> u64 {
        self.bits_consumed
    }

    pub fn reset(&mut self) {
        self.register = 0;
        self.bits_consumed = 0;
    }

    /// Shifts in one input bit and returns the packed output label
    /// (bit `j` from generator `j`).
    pub fn encode_bit(&mut self, input: u8) -> u32 {
        let input = u32::from(input & 1);
        let window = (input << (self.k - 1)) | self.register;
        let label = self
            .taps
            .iter()
            .enumerate()
            .fold(0u32, |acc, (j, &g)| acc | (((g & window).count_ones() & 1) << j));
        self.register = window >> 1;
        self.bits_consumed += 1;
        label
    }

    /// Encodes one bit and appends its `n` output bits, generator 0 first.
    pub fn push(&mut self, input: u8, out: &mut Vec<u8>) {
        let label = self.encode_bit(input);
        for j in 0..self.taps.len() {
            out.push(((label >> j) & 1) as u8);
        }
    }

    /// Flushes `K-1` zeros so the register returns to the all-zero state.
    pub fn terminate(&mut self, out: &mut Vec<u8>) {
        for _ in 1..self.k {
            self.push(0, out);
        }
        debug_assert_eq!(self.register, 0);
    }
}

/// Encodes a whole message. Output length is `n * (len + K - 1)` when
/// terminated and `n * len` otherwise.
pub fn encode_block(code: &CodeSpec, message: &[u8], terminated: bool) -> Result<Vec<u8>> {
    if message.is_empty() {
        return Err(Error::EmptyMessage);
    }
    let tail = if terminated { code.memory() as usize } else { 0 };
    let mut out = Vec::with_capacity(code.n() * (message.len() + tail));
    let mut enc = Encoder::new(code);
    for &bit in message {
        enc.push(bit, &mut out);
    }
    if terminated {
        enc.terminate(&mut out);
    }
    Ok(out)
}
