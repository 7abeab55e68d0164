//! What gets simulated at one point: a code (or the uncoded baseline) with
//! optional puncturing and interleaving, plus the decoder that reads it.

use std::fmt;
use std::str::FromStr;

use convk_core::analysis::complexity_profile;
use convk_core::registry::default_code;
use convk_core::{CodeSpec, InterleaverSpec, PunctureScheme};

use crate::error::{plan_err, Error, Result};

/// Listed in output sort order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Decoder {
    ViterbiHard,
    ViterbiSoft,
    BcjrLogMap,
    BcjrMaxLog,
    /// Sign decisions on the raw channel output; only valid for the uncoded
    /// baseline.
    Uncoded,
}

impl Decoder {
    pub const ALL: [Decoder; 5] = [
        Decoder::ViterbiHard,
        Decoder::ViterbiSoft,
        Decoder::BcjrLogMap,
        Decoder::BcjrMaxLog,
        Decoder::Uncoded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Decoder::ViterbiHard => "viterbi-hard",
            Decoder::ViterbiSoft => "viterbi-soft",
            Decoder::BcjrLogMap => "bcjr-logmap",
            Decoder::BcjrMaxLog => "bcjr-maxlog",
            Decoder::Uncoded => "uncoded",
        }
    }

    pub fn wants_soft(self) -> bool {
        matches!(self, Decoder::ViterbiSoft | Decoder::BcjrLogMap | Decoder::BcjrMaxLog)
    }
}

impl fmt::Display for Decoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Decoder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "bcjr" {
            return Ok(Decoder::BcjrLogMap);
        }
        Decoder::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::Plan(format!("unknown decoder '{}'", s)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scheme {
    code: Option<CodeSpec>,
    puncture: Option<PunctureScheme>,
    interleaver: Option<InterleaverSpec>,
}

impl Scheme {
    pub fn coded(code: CodeSpec) -> Self {
        Scheme {
            code: Some(code),
            puncture: None,
            interleaver: None,
        }
    }

    /// Pseudo-code with K = 1: bits go straight to the channel.
    pub fn uncoded() -> Self {
        Scheme {
            code: None,
            puncture: None,
            interleaver: None,
        }
    }

    pub fn with_puncture(mut self, puncture: PunctureScheme) -> Result<Self> {
        match &self.code {
            None => return plan_err("the uncoded baseline cannot be punctured"),
            Some(code) if code.n() != puncture.n() => {
                return plan_err(format!(
                    "{} has {} rows but {} has {} outputs",
                    puncture,
                    puncture.n(),
                    code,
                    code.n()
                ))
            }
            Some(_) => {}
        }
        self.puncture = Some(puncture);
        Ok(self)
    }

    pub fn with_interleaver(mut self, interleaver: InterleaverSpec) -> Self {
        self.interleaver = Some(interleaver);
        self
    }

    pub fn code(&self) -> Option<&CodeSpec> {
        self.code.as_ref()
    }

    pub fn puncture(&self) -> Option<&PunctureScheme> {
        self.puncture.as_ref()
    }

    pub fn interleaver(&self) -> Option<&InterleaverSpec> {
        self.interleaver.as_ref()
    }

    pub fn constraint_length(&self) -> u8 {
        self.code.as_ref().map_or(1, |c| c.constraint_length())
    }

    /// Information bits per transmitted bit, ignoring the termination tail.
    pub fn rate(&self) -> f64 {
        match (&self.code, &self.puncture) {
            (None, _) => 1.0,
            (Some(_), Some(p)) => p.rate(),
            (Some(c), None) => c.rate(),
        }
    }

    pub fn states(&self) -> usize {
        self.code.as_ref().map_or(1, |c| complexity_profile(c).states)
    }

    /// Decoders that make sense for this scheme.
    pub fn accepts(&self, decoder: Decoder) -> bool {
        self.code.is_some() != (decoder == Decoder::Uncoded)
    }
}

/// `7:1/2:171,133+p=110/101+il=16x16`, or `uncoded`.
impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.code {
            Some(code) => write!(f, "{}", code)?,
            None => f.write_str("uncoded")?,
        }
        if let Some(p) = &self.puncture {
            write!(f, "+{}", p)?;
        }
        if let Some(il) = &self.interleaver {
            write!(f, "+{}", il)?;
        }
        Ok(())
    }
}

/// Besides the full form, a bare constraint length (`7`) picks the default
/// rate-1/2 code for that K.
impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split('+');
        let head = parts.next().unwrap_or("").trim();
        let mut scheme = if head == "uncoded" {
            Scheme::uncoded()
        } else if !head.is_empty() && head.bytes().all(|b| b.is_ascii_digit()) {
            let k = head.parse().map_err(|_| Error::Plan(format!("bad constraint length '{}'", head)))?;
            Scheme::coded(default_code(k)?)
        } else {
            Scheme::coded(head.parse()?)
        };
        for part in parts {
            let part = part.trim();
            if part.starts_with("p=") {
                scheme = scheme.with_puncture(part.parse()?)?;
            } else if part.starts_with("il=") {
                scheme = scheme.with_interleaver(part.parse()?);
            } else {
                return plan_err(format!("unknown scheme option '{}'", part));
            }
        }
        Ok(scheme)
    }
}
