//! BPSK over AWGN, the binary symmetric channel, and the Gilbert-Elliott
//! two-state burst channel.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`), seeded with
//! `seed_from_u64(seed)` and split into independent streams with
//! `set_stream(stream)`. Both calls are value-stable across releases of
//! `rand_chacha`, so a `(seed, stream)` pair always reproduces the same
//! samples.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::soft::SoftWord;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum ChannelModel {
    Awgn,
    Bsc,
    GilbertElliott,
}

impl ChannelModel {
    pub fn name(self) -> &'static str {
        match self {
            ChannelModel::Awgn => "awgn",
            ChannelModel::Bsc => "bsc",
            ChannelModel::GilbertElliott => "ge",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "awgn" => Some(ChannelModel::Awgn),
            "bsc" => Some(ChannelModel::Bsc),
            "ge" | "gilbert-elliott" | "gilbertelliott" => Some(ChannelModel::GilbertElliott),
            _ => None,
        }
    }
}

/// Gilbert-Elliott transition and per-state flip probabilities.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct GeParams {
    pub p_good_to_bad: f64,
    pub p_bad_to_good: f64,
    pub error_good: f64,
    pub error_bad: f64,
}

impl Default for GeParams {
    fn default() -> Self {
        GeParams {
            p_good_to_bad: 0.01,
            p_bad_to_good: 0.2,
            error_good: 0.001,
            error_bad: 0.3,
        }
    }
}

impl GeParams {
    pub fn validate(&self) -> Result<()> {
        for p in [self.p_good_to_bad, self.p_bad_to_good, self.error_good, self.error_bad] {
            check_probability(p, 1.0)?;
        }
        Ok(())
    }

    /// Long-run fraction of time in the bad state.
    pub fn stationary_bad(&self) -> f64 {
        let total = self.p_good_to_bad + self.p_bad_to_good;
        if total == 0.0 {
            0.0
        } else {
            self.p_good_to_bad / total
        }
    }

    /// Long-run bit flip probability.
    pub fn mean_error(&self) -> f64 {
        let bad = self.stationary_bad();
        (1.0 - bad) * self.error_good + bad * self.error_bad
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GeState {
    Good,
    Bad,
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct ChannelConfig {
    pub model: ChannelModel,
    /// Information-bit Eb/N0 in dB.
    pub ebno_db: f64,
    /// Information bits per transmitted bit, after puncturing.
    pub rate: f64,
    pub seed: u64,
    /// Independent sub-stream of `seed`.
    pub stream: u64,
    pub bsc_p: f64,
    pub ge: GeParams,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            model: ChannelModel::Awgn,
            ebno_db: 0.0,
            rate: 1.0,
            seed: 0,
            stream: 0,
            bsc_p: 0.0,
            ge: GeParams::default(),
        }
    }
}

impl ChannelConfig {
    pub fn awgn(ebno_db: f64, rate: f64, seed: u64) -> Self {
        ChannelConfig {
            ebno_db,
            rate,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return Err(Error::InvalidRate(self.rate));
        }
        match self.model {
            ChannelModel::Awgn => Ok(()),
            ChannelModel::Bsc => check_probability(self.bsc_p, 0.5),
            ChannelModel::GilbertElliott => self.ge.validate(),
        }
    }

    /// Per-dimension noise variance for unit-energy BPSK.
    pub fn noise_variance(&self) -> f64 {
        noise_variance(self.ebno_db, self.rate)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        stream_rng(self.seed, self.stream)
    }
}

/// `sigma^2 = 1 / (2 R 10^(EbN0/10))`.
pub fn noise_variance(ebno_db: f64, rate: f64) -> f64 {
    1.0 / (2.0 * rate * libm::pow(10.0, ebno_db / 10.0))
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Gaussian tail probability `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / core::f64::consts::SQRT_2)
}

/// Uncoded BPSK bit error rate at the given Eb/N0.
pub fn uncoded_bpsk_ber(ebno_db: f64) -> f64 {
    q_function(libm::sqrt(2.0 * libm::pow(10.0, ebno_db / 10.0)))
}

fn check_probability(p: f64, max: f64) -> Result<()> {
    if !(0.0..=max).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

/// Maps bit `b` to `1 - 2b`, adds `N(0, sigma^2)` noise and returns the
/// channel LLRs `2y / sigma^2`.
pub fn transmit_awgn(bits: &[u8], config: &ChannelConfig) -> Result<SoftWord> {
    config.validate()?;
    let sigma2 = config.noise_variance();
    let sigma = libm::sqrt(sigma2);
    let scale = 2.0 / sigma2;
    let mut rng = config.rng();
    let llrs: Vec<f64> = bits
        .iter()
        .map(|&b| {
            let s = if b == 0 { 1.0 } else { -1.0 };
            let noise: f64 = StandardNormal.sample(&mut rng);
            scale * (s + sigma * noise)
        })
        .collect();
    SoftWord::new(llrs)
}

pub fn transmit_bsc(bits: &[u8], p: f64, seed: u64) -> Result<Vec<u8>> {
    check_probability(p, 0.5)?;
    let mut rng = stream_rng(seed, 0);
    Ok(flip(bits, p, &mut rng))
}

fn flip(bits: &[u8], p: f64, rng: &mut impl Rng) -> Vec<u8> {
    bits.iter()
        .map(|&b| if rng.random::<f64>() < p { b ^ 1 } else { b })
        .collect()
}

/// Flips each bit with the current state's error probability, then moves the
/// chain. Starts in the good state. Returns the state occupied by every bit.
pub fn transmit_gilbert_elliott(
    bits: &[u8],
    config: &ChannelConfig,
) -> Result<(Vec<u8>, Vec<GeState>)> {
    let ge = config.ge;
    ge.validate()?;
    let mut rng = config.rng();
    let mut state = GeState::Good;
    let mut out = Vec::with_capacity(bits.len());
    let mut trace = Vec::with_capacity(bits.len());
    for &b in bits {
        let (p_err, p_switch) = match state {
            GeState::Good => (ge.error_good, ge.p_good_to_bad),
            GeState::Bad => (ge.error_bad, ge.p_bad_to_good),
        };
        out.push(if rng.random::<f64>() < p_err { b ^ 1 } else { b });
        trace.push(state);
        if rng.random::<f64>() < p_switch {
            state = match state {
                GeState::Good => GeState::Bad,
                GeState::Bad => GeState::Good,
            };
        }
    }
    Ok((out, trace))
}

/// Channel output: LLRs from AWGN, flipped bits from BSC and Gilbert-Elliott.
#[derive(Clone, Debug, PartialEq)]
pub enum Received {
    Soft(SoftWord),
    Hard(Vec<u8>),
}

/// Sends `bits` through whichever model `config` selects, drawing from the
/// config's `(seed, stream)`.
pub fn transmit(bits: &[u8], config: &ChannelConfig) -> Result<Received> {
    config.validate()?;
    match config.model {
        ChannelModel::Awgn => transmit_awgn(bits, config).map(Received::Soft),
        ChannelModel::Bsc => Ok(Received::Hard(flip(bits, config.bsc_p, &mut config.rng()))),
        ChannelModel::GilbertElliott => {
            transmit_gilbert_elliott(bits, config).map(|(out, _)| Received::Hard(out))
        }
    }
}

/// Hard channel outputs as LLRs `+-ln((1-p)/p)`. `p` is clamped away from 0
/// so error-free channels still give finite values.
pub fn hard_to_llr(bits: &[u8], p: f64) -> SoftWord {
    let p = p.clamp(1e-12, 0.5);
    let magnitude = libm::log((1.0 - p) / p).max(1e-3);
    SoftWord::from_bits(bits, magnitude)
}
