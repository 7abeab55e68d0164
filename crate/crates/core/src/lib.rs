//! Convolutional codes of configurable constraint length.
//!
//! `no_std` + `alloc`. The building blocks are:
//!
//! * [`CodeSpec`]: a validated rate-1/n code (constraint length K, octal
//!   generators) with Massey-Sain catastrophic detection over [`Gf2Poly`].
//! * [`Trellis`]: the dense `2^(K-1)`-state transition table used by every
//!   decoder and by the distance analysis.
//! * [`Encoder`] / [`encode_block`]: shift-register encoding with optional
//!   zero-tail termination.
//! * [`viterbi`]: hard and soft maximum-likelihood decoding, block and
//!   fixed-lag streaming.
//! * [`bcjr`]: log-MAP and max-log-MAP posterior LLRs.
//! * [`PunctureScheme`] and [`InterleaverSpec`]: rate adaptation and burst
//!   spreading.
//! * [`channel`]: BPSK/AWGN, BSC and Gilbert-Elliott channels.
//! * [`analysis`]: free distance, spectrum and exhaustive generator search;
//!   [`registry`] holds the best rate-1/2 codes it found for K = 3..9.
//!
//! ```
//! use convk_core::{encode_block, viterbi, CodeSpec, SoftWord, Trellis};
//!
//! let code: CodeSpec = "7:1/2:171,133".parse().unwrap();
//! let trellis = Trellis::new(&code);
//! let message = [1, 0, 1, 1, 0, 0, 1, 0];
//! let coded = encode_block(&code, &message, true).unwrap();
//! let rx = SoftWord::from_bits(&coded, 4.0);
//! let out = viterbi::viterbi_decode_soft(&trellis, &rx, true).unwrap();
//! assert_eq!(out.decoded, message);
//! ```
#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod bcjr;
pub mod channel;
pub mod code;
pub mod encoder;
pub mod error;
pub mod gf2;
pub mod interleave;
pub mod puncture;
pub mod registry;
pub mod soft;
pub mod trellis;
pub mod viterbi;

pub use code::{CodeSpec, Generator};
pub use encoder::{encode_block, Encoder};
pub use error::{Error, Result};
pub use gf2::Gf2Poly;
pub use interleave::InterleaverSpec;
pub use puncture::PunctureScheme;
pub use soft::SoftWord;
pub use trellis::Trellis;
