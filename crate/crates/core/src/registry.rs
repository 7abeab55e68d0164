//! Default rate-1/2 codes for K = 3..9.
//!
//! The table is the top-ranked entry of [`search_generators`] for each K,
//! frozen here so that results stay reproducible if the ranking ever
//! changes. `registry_matches_search` regenerates it.
//!
//! [`search_generators`]: crate::analysis::search_generators

use crate::code::CodeSpec;
use crate::error::{Error, Result};

/// Bumped whenever [`DEFAULT_CODES`] changes.
pub const REGISTRY_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegistryEntry {
    pub k: u8,
    pub generators: [u32; 2],
    pub d_free: u32,
    /// Number of weight-`d_free` detours.
    pub multiplicity: u64,
}

pub const DEFAULT_CODES: [RegistryEntry; 7] = [
    RegistryEntry { k: 3, generators: [0o7, 0o5], d_free: 5, multiplicity: 1 },
    RegistryEntry { k: 4, generators: [0o17, 0o13], d_free: 6, multiplicity: 1 },
    RegistryEntry { k: 5, generators: [0o31, 0o27], d_free: 7, multiplicity: 2 },
    RegistryEntry { k: 6, generators: [0o65, 0o57], d_free: 8, multiplicity: 1 },
    RegistryEntry { k: 7, generators: [0o155, 0o117], d_free: 10, multiplicity: 11 },
    RegistryEntry { k: 8, generators: [0o313, 0o275], d_free: 10, multiplicity: 1 },
    RegistryEntry { k: 9, generators: [0o677, 0o515], d_free: 12, multiplicity: 9 },
];

pub fn registry_entry(k: u8) -> Result<&'static RegistryEntry> {
    DEFAULT_CODES
        .iter()
        .find(|e| e.k == k)
        .ok_or(Error::UnsupportedK(k))
}

/// Best known rate-1/2 code of constraint length `k` (3..=9).
pub fn default_code(k: u8) -> Result<CodeSpec> {
    let entry = registry_entry(k)?;
    CodeSpec::from_taps(k, &entry.generators)
}
