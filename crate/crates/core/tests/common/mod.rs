//! Reference implementations that share no code with the crate under test.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_bits(rng: &mut impl Rng, len: usize) -> Vec<u8> {
    (0..len).map(|_| rng.random_range(0..2u8)).collect()
}

/// Convolution of the message with each generator, straight from the octal
/// tap words: coefficient `i` (input `i` steps ago) is bit `K-1-i`.
pub fn oracle_encode(k: u8, taps: &[u32], message: &[u8], terminated: bool) -> Vec<u8> {
    let k = k as usize;
    let steps = message.len() + if terminated { k - 1 } else { 0 };
    let at = |t: isize| -> u8 {
        if t < 0 || t as usize >= message.len() {
            0
        } else {
            message[t as usize]
        }
    };
    let mut out = Vec::with_capacity(steps * taps.len());
    for t in 0..steps as isize {
        for &g in taps {
            let mut bit = 0;
            for i in 0..k {
                if (g >> (k - 1 - i)) & 1 == 1 {
                    bit ^= at(t - i as isize);
                }
            }
            out.push(bit);
        }
    }
    out
}

/// Generator tap word as a polynomial in D (bit i = coefficient of D^i).
pub fn tap_poly(k: u8, taps: u32) -> u64 {
    (0..k).fold(0u64, |acc, i| acc | ((((taps >> (k - 1 - i)) & 1) as u64) << i))
}

pub fn clmul(a: u64, b: u64) -> u64 {
    let mut acc = 0;
    let mut a = a;
    let mut shift = 0;
    while a != 0 {
        if a & 1 == 1 {
            acc ^= b << shift;
        }
        a >>= 1;
        shift += 1;
    }
    acc
}

/// Weight of the zero-tail codeword of message polynomial `m`.
pub fn codeword_weight(k: u8, taps: &[u32], m: u64) -> u32 {
    taps.iter()
        .map(|&g| clmul(m, tap_poly(k, g)).count_ones())
        .sum()
}

/// Minimum nonzero terminated-codeword weight over all messages of up to
/// `max_len` bits.
pub fn brute_force_d_free(k: u8, taps: &[u32], max_len: u32) -> u32 {
    (1u64..1 << max_len)
        .map(|m| codeword_weight(k, taps, m))
        .min()
        .unwrap()
}

/// Exact posterior LLRs for each message bit by enumerating all 2^L
/// terminated codewords, with likelihood exp(1/2 sum (1-2c) llr).
pub fn brute_force_posteriors(k: u8, taps: &[u32], llrs: &[f64], len: usize) -> Vec<f64> {
    let mut logw = Vec::with_capacity(1 << len);
    for m in 0..1u32 << len {
        let msg: Vec<u8> = (0..len).map(|i| ((m >> i) & 1) as u8).collect();
        let cw = oracle_encode(k, taps, &msg, true);
        let s: f64 = cw
            .iter()
            .zip(llrs)
            .map(|(&c, &l)| if c == 0 { l } else { -l })
            .sum();
        logw.push(0.5 * s);
    }
    let lse = |vals: Vec<f64>| {
        let mx = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        mx + vals.iter().map(|v| (v - mx).exp()).sum::<f64>().ln()
    };
    (0..len)
        .map(|i| {
            let zero: Vec<f64> = (0..logw.len()).filter(|m| (m >> i) & 1 == 0).map(|m| logw[m]).collect();
            let one: Vec<f64> = (0..logw.len()).filter(|m| (m >> i) & 1 == 1).map(|m| logw[m]).collect();
            lse(zero) - lse(one)
        })
        .collect()
}

/// Box-Muller noise for tests, independent of the crate's channel code.
pub fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Channel LLRs for BPSK at `ebno_db` over code rate `rate`.
pub fn noisy_llrs(rng: &mut impl Rng, bits: &[u8], ebno_db: f64, rate: f64) -> Vec<f64> {
    let sigma2 = 1.0 / (2.0 * rate * 10f64.powf(ebno_db / 10.0));
    bits.iter()
        .map(|&b| {
            let s = if b == 0 { 1.0 } else { -1.0 };
            2.0 * (s + sigma2.sqrt() * gaussian(rng)) / sigma2
        })
        .collect()
}
