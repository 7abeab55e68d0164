//! Maximum-likelihood sequence decoding over a [`Trellis`].
//!
//! Both metrics are expressed as a *mismatch cost*: a branch pays the
//! reliability of every received position whose hard decision disagrees with
//! the branch label. With unit reliabilities this is the Hamming distance;
//! with `|llr|` reliabilities minimising it is the same as maximising the
//! correlation `sum (1 - 2c) * llr`. Erased positions (LLR 0) cost nothing
//! either way.
//!
//! Ties in add-compare-select keep the lower-numbered predecessor. Both
//! branches entering a state carry the same input bit, so this is also the
//! "input 0 first" rule for the final-state choice in unterminated mode.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::soft::SoftWord;
use crate::trellis::Trellis;

const TIE: u8 = 0b10;

pub trait PathMetric: Copy + PartialOrd + Add<Output = Self> + Sub<Output = Self> {
    const ZERO: Self;
    const UNREACHABLE: Self;
    fn accumulate(self, cost: Self) -> Self;
    fn settle(self, min: Self) -> Self;
}

impl PathMetric for u64 {
    const ZERO: u64 = 0;
    const UNREACHABLE: u64 = u64::MAX / 4;
    #[inline]
    fn accumulate(self, cost: u64) -> u64 {
        self.saturating_add(cost).min(Self::UNREACHABLE)
    }
    #[inline]
    fn settle(self, min: u64) -> u64 {
        if self >= Self::UNREACHABLE {
            self
        } else {
            self - min
        }
    }
}

impl PathMetric for f64 {
    const ZERO: f64 = 0.0;
    const UNREACHABLE: f64 = f64::INFINITY;
    #[inline]
    fn accumulate(self, cost: f64) -> f64 {
        self + cost
    }
    #[inline]
    fn settle(self, min: f64) -> f64 {
        self - min
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult<M> {
    pub decoded: Vec<u8>,
    /// Total mismatch cost of the chosen path (Hamming distance for hard
    /// decoding).
    pub final_metric: M,
    /// Add-compare-select ties met along the chosen path, plus a tie in the
    /// final-state choice. Zero means the decoded sequence is the unique
    /// minimiser.
    pub traceback_ties: u64,
}

#[derive(Clone, Copy)]
struct Acs {
    lo: u32,
    label_lo: u8,
    label_hi: u8,
}

/// Steps between metric renormalisations in the block decoder.
const NORMALIZE_EVERY: usize = 32;

/// Fills `table[m]` with the summed reliability of the positions set in `m`.
#[inline]
fn subset_sums<M: PathMetric>(reliability: &[M], table: &mut [M]) {
    table[0] = M::ZERO;
    for (j, &r) in reliability.iter().enumerate() {
        let (low, high) = table.split_at_mut(1 << j);
        for (h, &l) in high[..1 << j].iter_mut().zip(low.iter()) {
            *h = l + r;
        }
    }
}

/// Mismatch table and packed hard decisions for one soft symbol.
#[inline(always)]
fn soft_symbol(symbol: &[f64], table: &mut [f64; 256]) -> u8 {
    if let [a, b] = *symbol {
        let (ra, rb) = (libm::fabs(a), libm::fabs(b));
        table[..4].copy_from_slice(&[0.0, ra, rb, ra + rb]);
        return u8::from(a < 0.0) | (u8::from(b < 0.0) << 1);
    }
    let mut hard = 0u8;
    let mut size = 1usize;
    table[0] = 0.0;
    for (j, &l) in symbol.iter().enumerate() {
        let r = libm::fabs(l);
        hard |= u8::from(l < 0.0) << j;
        for m in 0..size {
            table[(size + m) & 255] = table[m & 255] + r;
        }
        size <<= 1;
    }
    hard
}

#[inline(always)]
fn select<M: PathMetric>(pred: [M; 2], labels: [u8; 2], hard: u8, mismatch: &[M; 256]) -> (M, u8) {
    let m0 = pred[0].accumulate(mismatch[usize::from(labels[0] ^ hard)]);
    let m1 = pred[1].accumulate(mismatch[usize::from(labels[1] ^ hard)]);
    let take_hi = m1 < m0;
    (if take_hi { m1 } else { m0 }, u8::from(take_hi) | (u8::from(m1 == m0) * TIE))
}

/// One trellis step. States `j` and `j + S/2` share the predecessors `2j`
/// and `2j + 1`.
#[inline(always)]
fn acs_step<M: PathMetric>(
    butterflies: &[[u8; 4]],
    metric: &[M],
    next: &mut [M],
    decisions: &mut [u8],
    hard: u8,
    mismatch: &[M; 256],
) {
    let half = butterflies.len();
    let (next_lo, next_hi) = next.split_at_mut(half);
    let (dec_lo, dec_hi) = decisions.split_at_mut(half);
    let (next_hi, dec_hi, metric) = (&mut next_hi[..half], &mut dec_hi[..half], &metric[..2 * half]);
    for (j, &[a0, a1, b0, b1]) in butterflies.iter().enumerate() {
        let p = [metric[2 * j], metric[2 * j + 1]];
        (next_lo[j], dec_lo[j]) = select(p, [a0, a1], hard, mismatch);
        (next_hi[j], dec_hi[j]) = select(p, [b0, b1], hard, mismatch);
    }
}

/// Subtracts the smallest metric from all of them and returns it.
fn normalize<M: PathMetric>(metric: &mut [M]) -> M {
    let min = metric.iter().fold(M::UNREACHABLE, |a, &m| if m < a { m } else { a });
    for m in metric.iter_mut() {
        *m = m.settle(min);
    }
    min
}

/// Reusable block decoder. Survivor storage is one decision byte per state
/// per trellis step.
pub struct ViterbiDecoder<'t> {
    trellis: &'t Trellis,
    acs: Vec<Acs>,
    /// Branch labels into states `j` and `j + S/2` from `2j` and `2j + 1`.
    butterflies: Vec<[u8; 4]>,
    decisions: Vec<u8>,
}

impl<'t> ViterbiDecoder<'t> {
    pub fn new(trellis: &'t Trellis) -> Self {
        let acs: Vec<Acs> = (0..trellis.num_states() as u32)
            .map(|s| {
                let [lo, hi] = trellis.predecessors(s);
                let u = trellis.input_into(s);
                Acs {
                    lo,
                    label_lo: trellis.label(lo, u) as u8,
                    label_hi: trellis.label(hi, u) as u8,
                }
            })
            .collect();
        let half = acs.len() / 2;
        let butterflies = (0..half)
            .map(|j| {
                let (a, b) = (&acs[j], &acs[j + half]);
                [a.label_lo, a.label_hi, b.label_lo, b.label_hi]
            })
            .collect();
        ViterbiDecoder {
            trellis,
            acs,
            butterflies,
            decisions: Vec::new(),
        }
    }

    pub fn trellis(&self) -> &Trellis {
        self.trellis
    }

    /// Survivor entries stored per trellis step: `2^(K-1)`.
    pub fn survivor_entries_per_step(&self) -> usize {
        self.acs.len()
    }

    fn check_len(&self, len: usize, terminated: bool) -> Result<usize> {
        let n = self.trellis.n();
        if !len.is_multiple_of(n) {
            return Err(Error::LengthNotMultipleOfN { len, n });
        }
        let tail = n * (self.trellis.constraint_length() as usize - 1);
        if terminated && len < tail {
            return Err(Error::BlockTooShort { len, tail });
        }
        Ok(len / n)
    }

    pub fn decode_hard(&mut self, received: &[u8], terminated: bool) -> Result<DecodeResult<u64>> {
        let n = self.trellis.n();
        let steps = self.check_len(received.len(), terminated)?;
        // Hamming costs do not change from step to step
        let mut table = [0u64; 256];
        subset_sums(&vec![1u64; n], &mut table[..1 << n]);
        Ok(self.run(steps, terminated, table, |t, _| {
            received[t * n..(t + 1) * n]
                .iter()
                .enumerate()
                .fold(0u8, |acc, (j, &b)| acc | ((b & 1) << j))
        }))
    }

    pub fn decode_soft(&mut self, received: &SoftWord, terminated: bool) -> Result<DecodeResult<f64>> {
        let n = self.trellis.n();
        let steps = self.check_len(received.len(), terminated)?;
        Ok(self.run(steps, terminated, [0.0; 256], |t, table| {
            soft_symbol(&received[t * n..(t + 1) * n], table)
        }))
    }

    /// `observe(t, mismatch)` returns the packed hard decisions for step `t`
    /// and may rewrite the mismatch table, indexed by `label ^ hard`.
    fn run<M: PathMetric>(
        &mut self,
        steps: usize,
        terminated: bool,
        mut mismatch: [M; 256],
        mut observe: impl FnMut(usize, &mut [M; 256]) -> u8,
    ) -> DecodeResult<M> {
        let states = self.acs.len();
        let k = self.trellis.constraint_length();
        let mut metric = vec![M::UNREACHABLE; states];
        let mut next = vec![M::UNREACHABLE; states];
        metric[0] = M::ZERO;
        let mut offset = M::ZERO;

        // every entry is overwritten below, so only grow
        if self.decisions.len() < steps * states {
            self.decisions.resize(steps * states, 0);
        }
        // two steps per pass, ping-ponging between the metric buffers
        let mut pairs = self.decisions[..steps * states].chunks_exact_mut(2 * states);
        for (p, pair) in (&mut pairs).enumerate() {
            let (first, second) = pair.split_at_mut(states);
            let hard = observe(2 * p, &mut mismatch);
            acs_step(&self.butterflies, &metric, &mut next, first, hard, &mismatch);
            let hard = observe(2 * p + 1, &mut mismatch);
            acs_step(&self.butterflies, &next, &mut metric, second, hard, &mismatch);
            if (2 * p + 2) % NORMALIZE_EVERY == 0 {
                offset = offset + normalize(&mut metric);
            }
        }
        let last = pairs.into_remainder();
        if !last.is_empty() {
            let hard = observe(steps - 1, &mut mismatch);
            acs_step(&self.butterflies, &metric, &mut next, last, hard, &mismatch);
            core::mem::swap(&mut metric, &mut next);
        }

        let mut ties = 0u64;
        let mut state = 0u32;
        if !terminated {
            let mut best = 0usize;
            for s in 1..states {
                if metric[s] < metric[best] {
                    best = s;
                }
            }
            if metric.iter().filter(|&&m| m == metric[best]).count() > 1 {
                ties += 1;
            }
            state = best as u32;
        }
        let final_metric = offset + metric[state as usize];

        let mut bits = vec![0u8; steps];
        for t in (0..steps).rev() {
            let d = self.decisions[t * states + state as usize];
            ties += u64::from(d & TIE != 0);
            bits[t] = (state >> (k - 2)) as u8;
            state = self.acs[state as usize].lo | u32::from(d & 1);
        }
        if terminated {
            bits.truncate(steps - (k as usize - 1));
        }
        DecodeResult {
            decoded: bits,
            final_metric,
            traceback_ties: ties,
        }
    }
}

pub fn viterbi_decode_hard(
    trellis: &Trellis,
    received: &[u8],
    terminated: bool,
) -> Result<DecodeResult<u64>> {
    ViterbiDecoder::new(trellis).decode_hard(received, terminated)
}

pub fn viterbi_decode_soft(
    trellis: &Trellis,
    received: &SoftWord,
    terminated: bool,
) -> Result<DecodeResult<f64>> {
    ViterbiDecoder::new(trellis).decode_soft(received, terminated)
}

/// Default traceback window: `5 * K` steps.
pub fn default_window(k: u8) -> usize {
    5 * k as usize
}

/// Fixed-lag soft decoder for unbounded streams. Bit `t` is released once
/// symbol `t + window` has been absorbed, by tracing back from the best
/// current state; [`StreamDecoder::finish`] flushes the rest from the best
/// final state.
pub struct StreamDecoder<'t> {
    trellis: &'t Trellis,
    acs: Vec<Acs>,
    window: usize,
    metric: Vec<f64>,
    next: Vec<f64>,
    ring: Vec<u8>,
    steps: usize,
    emitted: usize,
    mismatch: [f64; 256],
}

impl<'t> StreamDecoder<'t> {
    pub fn new(trellis: &'t Trellis, window: usize) -> Result<Self> {
        let k = trellis.constraint_length();
        if window < k as usize {
            return Err(Error::WindowTooSmall { window, k });
        }
        let states = trellis.num_states();
        let acs = ViterbiDecoder::new(trellis).acs;
        let mut metric = vec![f64::INFINITY; states];
        metric[0] = 0.0;
        Ok(StreamDecoder {
            trellis,
            acs,
            window,
            metric,
            next: vec![f64::INFINITY; states],
            ring: vec![0; window * states],
            steps: 0,
            emitted: 0,
            mismatch: [0.0; 256],
        })
    }

    /// Current survivor metrics, normalised so the best is 0.
    pub fn metrics(&self) -> &[f64] {
        &self.metric
    }

    /// Absorbs one `n`-LLR symbol; returns the bit released by it, if any.
    pub fn push(&mut self, symbol: &[f64]) -> Option<u8> {
        debug_assert_eq!(symbol.len(), self.trellis.n());
        let states = self.acs.len();
        let hard = soft_symbol(symbol, &mut self.mismatch);
        let slot = (self.steps % self.window) * states;
        let mut min = f64::INFINITY;
        for (s, acs) in self.acs.iter().enumerate() {
            let lo = acs.lo as usize;
            let m0 = self.metric[lo] + self.mismatch[usize::from(acs.label_lo ^ hard)];
            let m1 = self.metric[lo | 1] + self.mismatch[usize::from(acs.label_hi ^ hard)];
            let (m, d) = if m1 < m0 { (m1, 1) } else { (m0, 0) };
            self.next[s] = m;
            self.ring[slot + s] = d;
            if m < min {
                min = m;
            }
        }
        for m in self.next.iter_mut() {
            *m -= min;
        }
        core::mem::swap(&mut self.metric, &mut self.next);
        self.steps += 1;
        if self.steps > self.window {
            let bit = self.trace(self.best_state(), self.window + 1)[0];
            self.emitted += 1;
            Some(bit)
        } else {
            None
        }
    }

    fn best_state(&self) -> u32 {
        let mut best = 0;
        for s in 1..self.metric.len() {
            if self.metric[s] < self.metric[best] {
                best = s;
            }
        }
        best as u32
    }

    /// Inputs of the last `count` steps on the survivor ending in `state`,
    /// oldest first. Needs `count - 1` stored decision steps.
    fn trace(&self, mut state: u32, count: usize) -> Vec<u8> {
        let states = self.acs.len();
        let k = self.trellis.constraint_length();
        let mut bits = vec![0u8; count];
        for i in (0..count).rev() {
            bits[i] = (state >> (k - 2)) as u8;
            if i > 0 {
                let step = self.steps - count + i;
                let slot = (step % self.window) * states;
                state = self.acs[state as usize].lo | u32::from(self.ring[slot + state as usize]);
            }
        }
        bits
    }

    /// Releases every bit not yet emitted.
    pub fn finish(mut self) -> Vec<u8> {
        let remaining = self.steps - self.emitted;
        let bits = self.trace(self.best_state(), remaining);
        self.emitted = self.steps;
        bits
    }
}

pub fn viterbi_decode_stream(trellis: &Trellis, received: &SoftWord, window: usize) -> Result<Vec<u8>> {
    let n = trellis.n();
    if !received.len().is_multiple_of(n) {
        return Err(Error::LengthNotMultipleOfN {
            len: received.len(),
            n,
        });
    }
    let mut dec = StreamDecoder::new(trellis, window)?;
    let mut out = Vec::with_capacity(received.len() / n);
    for symbol in received.chunks_exact(n) {
        if let Some(bit) = dec.push(symbol) {
            out.push(bit);
        }
    }
    out.extend(dec.finish());
    Ok(out)
}
