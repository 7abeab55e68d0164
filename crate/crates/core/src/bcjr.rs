//! Symbol-by-symbol MAP decoding (forward-backward) in the log domain.
//!
//! Branch metric for a label `c` is `gamma = 1/2 * sum_j (1 - 2 c_j) * llr_j`.
//! The forward metrics `alpha` and backward metrics `beta` are combined with
//! either the exact Jacobian logarithm (log-MAP) or a plain maximum
//! (max-log-MAP), and each step is shifted so its largest entry is zero.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::soft::SoftWord;
use crate::trellis::Trellis;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum MapVariant {
    LogMap,
    MaxLogMap,
}

/// Per-message-bit posterior LLRs, positive favouring 0.
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorLlrs {
    pub llrs: Vec<f64>,
    pub variant: MapVariant,
}

impl PosteriorLlrs {
    pub fn hard_decisions(&self) -> Vec<u8> {
        self.llrs.iter().map(|&l| u8::from(l < 0.0)).collect()
    }
}

/// `ln(e^a + e^b)`, tolerating `-inf` operands.
#[inline]
pub fn jacobian_log(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + libm::log1p(libm::exp(lo - hi))
}

impl MapVariant {
    #[inline]
    fn combine(self, a: f64, b: f64) -> f64 {
        match self {
            MapVariant::LogMap => jacobian_log(a, b),
            MapVariant::MaxLogMap => a.max(b),
        }
    }
}

fn normalise(row: &mut [f64]) {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_finite() {
        for x in row.iter_mut() {
            *x -= max;
        }
    }
}

/// MAP decoding of a zero-tail terminated block. Returns one LLR per message
/// bit (the `K-1` tail steps are dropped).
pub fn bcjr_decode(
    trellis: &Trellis,
    received: &SoftWord,
    terminated: bool,
    variant: MapVariant,
) -> Result<PosteriorLlrs> {
    let n = trellis.n();
    if !received.len().is_multiple_of(n) {
        return Err(Error::LengthNotMultipleOfN {
            len: received.len(),
            n,
        });
    }
    if !terminated {
        return Err(Error::UnterminatedBlock);
    }
    let tail = trellis.constraint_length() as usize - 1;
    let steps = received.len() / n;
    if steps < tail {
        return Err(Error::BlockTooShort {
            len: received.len(),
            tail: n * tail,
        });
    }
    let states = trellis.num_states();
    let labels = 1usize << n;

    // gamma[t * labels + c]
    let mut gamma = vec![0.0f64; steps * labels];
    for (t, symbol) in received.chunks_exact(n).enumerate() {
        let row = &mut gamma[t * labels..(t + 1) * labels];
        for (c, g) in row.iter_mut().enumerate() {
            *g = 0.5
                * symbol
                    .iter()
                    .enumerate()
                    .map(|(j, &l)| if (c >> j) & 1 == 0 { l } else { -l })
                    .sum::<f64>();
        }
    }

    let mut alpha = vec![f64::NEG_INFINITY; (steps + 1) * states];
    alpha[0] = 0.0;
    for t in 0..steps {
        let (done, rest) = alpha.split_at_mut((t + 1) * states);
        let prev = &done[t * states..];
        let cur = &mut rest[..states];
        let g = &gamma[t * labels..(t + 1) * labels];
        for (s, slot) in cur.iter_mut().enumerate() {
            let u = trellis.input_into(s as u32);
            let [p0, p1] = trellis.predecessors(s as u32);
            let a0 = prev[p0 as usize] + g[trellis.label(p0, u) as usize];
            let a1 = prev[p1 as usize] + g[trellis.label(p1, u) as usize];
            *slot = variant.combine(a0, a1);
        }
        normalise(cur);
    }

    let mut beta = vec![f64::NEG_INFINITY; (steps + 1) * states];
    beta[steps * states] = 0.0;
    for t in (0..steps).rev() {
        let (head, tail_rows) = beta.split_at_mut((t + 1) * states);
        let cur = &mut head[t * states..];
        let next = &tail_rows[..states];
        let g = &gamma[t * labels..(t + 1) * labels];
        for (s, slot) in cur.iter_mut().enumerate() {
            let s = s as u32;
            let b0 = next[trellis.next_state(s, 0) as usize] + g[trellis.label(s, 0) as usize];
            let b1 = next[trellis.next_state(s, 1) as usize] + g[trellis.label(s, 1) as usize];
            *slot = variant.combine(b0, b1);
        }
        normalise(cur);
    }

    let message_len = steps - tail;
    let mut llrs = Vec::with_capacity(message_len);
    for t in 0..message_len {
        let a = &alpha[t * states..(t + 1) * states];
        let b = &beta[(t + 1) * states..(t + 2) * states];
        let g = &gamma[t * labels..(t + 1) * labels];
        let mut zero = f64::NEG_INFINITY;
        let mut one = f64::NEG_INFINITY;
        for s in 0..states as u32 {
            for u in 0..2u8 {
                let m = a[s as usize]
                    + g[trellis.label(s, u) as usize]
                    + b[trellis.next_state(s, u) as usize];
                if u == 0 {
                    zero = variant.combine(zero, m);
                } else {
                    one = variant.combine(one, m);
                }
            }
        }
        llrs.push(zero - one);
    }
    Ok(PosteriorLlrs { llrs, variant })
}
