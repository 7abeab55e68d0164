//! Sweep plans: which schemes, decoders and channel points to simulate and
//! when to stop. Plans come from presets, from `key=value` files and from
//! command-line overrides, all through [`SweepPlan::apply`].

use std::fmt::Write as _;

use convk_core::channel::{ChannelConfig, ChannelModel};

use crate::error::{plan_err, Error, Result};
use crate::scheme::{Decoder, Scheme};

pub const PRESETS: [&str; 3] = ["paper-sweep", "burst-demo", "k-scaling"];

/// Keys accepted by [`SweepPlan::apply`].
pub const KEYS: [&str; 17] = [
    "preset", "codes", "k", "decoders", "model", "ebno_db", "bsc_p", "ge_pgb", "ge_pbg", "ge_eg",
    "ge_eb", "seed", "min_errors", "max_bits", "block_len", "paired", "timing",
];

/// A point stops once it has seen `min_bit_errors` errors (when non-zero) or
/// tested `max_bits` bits, whichever comes first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StopRule {
    pub min_bit_errors: u64,
    pub max_bits: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            min_bit_errors: 100,
            max_bits: 10_000_000,
        }
    }
}

impl StopRule {
    pub fn satisfied(&self, bits: u64, errors: u64) -> bool {
        (self.min_bit_errors > 0 && errors >= self.min_bit_errors) || bits >= self.max_bits
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPlan {
    pub schemes: Vec<Scheme>,
    pub decoders: Vec<Decoder>,
    /// Model and its parameters; Eb/N0, rate and seeds are filled per point.
    pub channel: ChannelConfig,
    pub ebno_db: Vec<f64>,
    pub stop: StopRule,
    /// Information bits per block.
    pub block_len: usize,
    pub seed: u64,
    /// Share message and noise streams across schemes at a channel point.
    pub paired: bool,
    /// Fill the timing columns (these vary run to run).
    pub timing: bool,
}

impl Default for SweepPlan {
    fn default() -> Self {
        SweepPlan {
            schemes: Vec::new(),
            decoders: vec![Decoder::ViterbiSoft],
            channel: ChannelConfig::default(),
            ebno_db: (0..=6).map(f64::from).collect(),
            stop: StopRule::default(),
            block_len: 1024,
            seed: 0,
            paired: true,
            timing: false,
        }
    }
}

/// One simulated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanPoint {
    pub scheme: Scheme,
    pub decoder: Decoder,
    pub channel: ChannelConfig,
    pub scheme_index: usize,
    pub channel_index: usize,
}

impl SweepPlan {
    pub fn preset(name: &str) -> Result<Self> {
        let mut plan = SweepPlan::default();
        let text = match name {
            // soft Viterbi over the default codes, capped at 10^6 bits per
            // point to stay at desk scale
            "paper-sweep" => "k=3,5,7,9\ndecoders=viterbi-soft\nmodel=awgn\nebno_db=0:6:1\nmax_bits=1000000",
            "burst-demo" => {
                "codes=7;7+il=16x16\ndecoders=viterbi-hard\nmodel=ge\nebno_db=0\nmin_errors=0\nmax_bits=1000000"
            }
            "k-scaling" => {
                "k=3,4,5,6,7,8,9\ndecoders=viterbi-soft\nmodel=awgn\nebno_db=4\nmin_errors=0\nmax_bits=5000000\ntiming=true"
            }
            other => {
                return plan_err(format!("unknown preset '{}' (known: {})", other, PRESETS.join(", ")))
            }
        };
        plan.apply_text(text)?;
        Ok(plan)
    }

    /// Sets one key. `preset` replaces the whole plan, so it belongs first.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "preset" => *self = SweepPlan::preset(value)?,
            "codes" => {
                self.schemes = split(value, ';').map(str::parse).collect::<Result<_>>()?;
            }
            "k" => {
                self.schemes = split(value, ',').map(str::parse).collect::<Result<_>>()?;
            }
            "decoders" => {
                self.decoders = split(value, ',').map(str::parse).collect::<Result<_>>()?;
            }
            "model" => {
                self.channel.model = ChannelModel::from_name(value)
                    .ok_or_else(|| Error::Plan(format!("unknown channel model '{}'", value)))?;
            }
            "ebno_db" => self.ebno_db = parse_grid(value)?,
            "bsc_p" => self.channel.bsc_p = number(key, value)?,
            "ge_pgb" => self.channel.ge.p_good_to_bad = number(key, value)?,
            "ge_pbg" => self.channel.ge.p_bad_to_good = number(key, value)?,
            "ge_eg" => self.channel.ge.error_good = number(key, value)?,
            "ge_eb" => self.channel.ge.error_bad = number(key, value)?,
            "seed" => self.seed = number(key, value)?,
            "min_errors" => self.stop.min_bit_errors = number(key, value)?,
            "max_bits" => self.stop.max_bits = number(key, value)?,
            "block_len" => self.block_len = number(key, value)?,
            "paired" => self.paired = boolean(key, value)?,
            "timing" => self.timing = boolean(key, value)?,
            other => return plan_err(format!("unknown key '{}'", other)),
        }
        Ok(())
    }

    /// Applies a `key=value` document; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Plan(format!("line {}: expected key=value", i + 1)))?;
            self.apply(key, value).map_err(|e| match e {
                Error::Plan(msg) => Error::Plan(format!("line {}: {}", i + 1, msg)),
                other => Error::Plan(format!("line {}: {}", i + 1, other)),
            })?;
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<PlanPoint> {
        let mut points = Vec::new();
        for (scheme_index, scheme) in self.schemes.iter().enumerate() {
            let decoders: Vec<Decoder> = if scheme.code().is_none() {
                vec![Decoder::Uncoded]
            } else {
                self.decoders.iter().copied().filter(|&d| scheme.accepts(d)).collect()
            };
            for decoder in decoders {
                for (channel_index, &ebno_db) in self.ebno_db.iter().enumerate() {
                    points.push(PlanPoint {
                        scheme: scheme.clone(),
                        decoder,
                        channel: ChannelConfig {
                            ebno_db,
                            rate: scheme.rate(),
                            seed: 0,
                            stream: 0,
                            ..self.channel
                        },
                        scheme_index,
                        channel_index,
                    });
                }
            }
        }
        points
    }

    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() {
            return plan_err("no codes given (set codes=, k= or a preset)");
        }
        if self.decoders.is_empty() {
            return plan_err("no decoders given");
        }
        if self.ebno_db.is_empty() || self.ebno_db.iter().any(|x| !x.is_finite()) {
            return plan_err("ebno_db needs at least one finite value");
        }
        if self.channel.model != ChannelModel::Awgn && self.ebno_db.len() > 1 {
            return plan_err(format!(
                "ebno_db only shapes the awgn model; give a single value for {}",
                self.channel.model.name()
            ));
        }
        if self.block_len == 0 {
            return plan_err("block_len must be positive");
        }
        if self.stop.max_bits <= self.block_len as u64 {
            return plan_err(format!(
                "max_bits ({}) must exceed block_len ({})",
                self.stop.max_bits, self.block_len
            ));
        }
        ChannelConfig { rate: 1.0, ..self.channel }.validate()?;
        if self.points().is_empty() {
            return plan_err("no decoder in the list applies to the given codes");
        }
        Ok(())
    }

    /// Fully resolved plan in the same `key=value` form [`apply_text`]
    /// reads.
    ///
    /// [`apply_text`]: SweepPlan::apply_text
    pub fn describe(&self) -> String {
        let join = |items: Vec<String>, sep: &str| items.join(sep);
        let ge = &self.channel.ge;
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{}={}", k, v);
        };
        line("codes", join(self.schemes.iter().map(|s| s.to_string()).collect(), ";"));
        line("decoders", join(self.decoders.iter().map(|d| d.to_string()).collect(), ","));
        line("model", self.channel.model.name().to_string());
        line("ebno_db", join(self.ebno_db.iter().map(|x| x.to_string()).collect(), ","));
        line("bsc_p", self.channel.bsc_p.to_string());
        line("ge_pgb", ge.p_good_to_bad.to_string());
        line("ge_pbg", ge.p_bad_to_good.to_string());
        line("ge_eg", ge.error_good.to_string());
        line("ge_eb", ge.error_bad.to_string());
        line("seed", self.seed.to_string());
        line("min_errors", self.stop.min_bit_errors.to_string());
        line("max_bits", self.stop.max_bits.to_string());
        line("block_len", self.block_len.to_string());
        line("paired", self.paired.to_string());
        line("timing", self.timing.to_string());
        out
    }
}

fn split(value: &str, sep: char) -> impl Iterator<Item = &str> {
    value.split(sep).map(str::trim).filter(|s| !s.is_empty())
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Plan(format!("{}: cannot parse '{}'", key, value)))
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => plan_err(format!("{}: expected true or false, got '{}'", key, value)),
    }
}

/// `a,b,c` or an inclusive range `start:stop:step`.
fn parse_grid(value: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = value.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step): (f64, f64, f64) =
                (number("ebno_db", start)?, number("ebno_db", stop)?, number("ebno_db", step)?);
            if step.is_nan() || step <= 0.0 || stop < start {
                return plan_err(format!("ebno_db: bad range '{}'", value));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            // snap to a 1e-9 grid so 0.1 steps print cleanly
            Ok((0..count)
                .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
                .collect())
        }
        [_] => split(value, ',').map(|v| number("ebno_db", v)).collect(),
        _ => plan_err(format!("ebno_db: bad range '{}'", value)),
    }
}
