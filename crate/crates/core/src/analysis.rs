//! Distance properties and exhaustive generator search.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::code::CodeSpec;
use crate::error::{Error, Result};
use crate::trellis::Trellis;

/// Weights above `d_free` included in the spectrum by default.
pub const DEFAULT_SPECTRUM_SPAN: u32 = 4;
/// Largest K accepted by [`search_generators`].
pub const MAX_SEARCH_K: u8 = 9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceReport {
    pub d_free: u32,
    /// `spectrum[i]` counts detours of output weight `d_free + i`.
    pub spectrum: Vec<u64>,
    /// Detour length limit used while counting the spectrum.
    pub depth_cap: usize,
    /// Longest detour length actually explored.
    pub search_depth_used: usize,
    /// True when the depth cap cut off paths that could still have counted.
    pub truncated: bool,
}

/// Free distance with the default spectrum truncation (`d_free + 4`, detours
/// up to `20 K` branches).
pub fn free_distance(trellis: &Trellis) -> Result<DistanceReport> {
    let cap = 20 * trellis.constraint_length() as usize;
    free_distance_with(trellis, DEFAULT_SPECTRUM_SPAN, cap)
}

pub fn free_distance_with(trellis: &Trellis, span: u32, depth_cap: usize) -> Result<DistanceReport> {
    if trellis.zero_weight_cycle_exists() {
        return Err(Error::CatastrophicCode);
    }
    let to_zero = distance_to_zero(trellis);
    let first = trellis.next_state(0, 1);
    let first_weight = trellis.label(0, 1).count_ones();
    let d_free = first_weight + to_zero[first as usize];
    let limit = d_free + span;

    let mut spectrum = vec![0u64; span as usize + 1];
    // live detours that have not returned to 0, keyed by (state, weight)
    let width = limit as usize + 1;
    let mut live: Vec<(u32, u32, u64)> = vec![(first, first_weight, 1)];
    let mut scratch = vec![0u64; trellis.num_states() * width];
    let mut touched: Vec<usize> = Vec::new();
    let mut depth = 1;
    while !live.is_empty() && depth < depth_cap {
        depth += 1;
        for &(state, weight, count) in &live {
            for u in 0..2u8 {
                let to = trellis.next_state(state, u);
                let w = weight + trellis.label(state, u).count_ones();
                if w + to_zero[to as usize] > limit {
                    continue;
                }
                if to == 0 {
                    let slot = &mut spectrum[(w - d_free) as usize];
                    *slot = slot.saturating_add(count);
                } else {
                    let idx = to as usize * width + w as usize;
                    if scratch[idx] == 0 {
                        touched.push(idx);
                    }
                    scratch[idx] = scratch[idx].saturating_add(count);
                }
            }
        }
        live.clear();
        touched.sort_unstable();
        for idx in touched.drain(..) {
            live.push(((idx / width) as u32, (idx % width) as u32, scratch[idx]));
            scratch[idx] = 0;
        }
    }
    Ok(DistanceReport {
        d_free,
        spectrum,
        depth_cap,
        search_depth_used: depth,
        truncated: !live.is_empty(),
    })
}

/// Least output weight from each state back to state 0 (uniform-cost search
/// over reversed branches).
fn distance_to_zero(trellis: &Trellis) -> Vec<u32> {
    let mut dist = vec![u32::MAX; trellis.num_states()];
    let mut heap = BinaryHeap::new();
    dist[0] = 0;
    heap.push(Reverse((0u32, 0u32)));
    while let Some(Reverse((d, state))) = heap.pop() {
        if d > dist[state as usize] {
            continue;
        }
        let u = trellis.input_into(state);
        for from in trellis.predecessors(state) {
            if from == 0 {
                continue;
            }
            let nd = d + trellis.label(from, u).count_ones();
            if nd < dist[from as usize] {
                dist[from as usize] = nd;
                heap.push(Reverse((nd, from)));
            }
        }
    }
    dist
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SearchOptions {
    pub spectrum_span: u32,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            spectrum_span: DEFAULT_SPECTRUM_SPAN,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchEntry {
    pub code: CodeSpec,
    pub report: DistanceReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchTable {
    pub k: u8,
    pub n: usize,
    /// Ranked by `d_free` descending, then multiplicity at `d_free`
    /// ascending, then generators ascending.
    pub entries: Vec<SearchEntry>,
    pub catastrophic_excluded: usize,
}

impl SearchTable {
    pub fn best(&self) -> &SearchEntry {
        &self.entries[0]
    }

    /// Entries tied with the best on `d_free`.
    pub fn top_class(&self) -> &[SearchEntry] {
        let d = self.entries[0].report.d_free;
        let end = self
            .entries
            .iter()
            .position(|e| e.report.d_free != d)
            .unwrap_or(self.entries.len());
        &self.entries[..end]
    }
}

/// Exhaustive search over rate-1/2 codes of constraint length `k`.
///
/// Every generator must tap both the current and the oldest input, pairs are
/// unordered (listed larger octal first) and catastrophic pairs are counted
/// and skipped.
pub fn search_generators(k: u8, n: usize, options: SearchOptions) -> Result<SearchTable> {
    if n != 2 || !(2..=MAX_SEARCH_K).contains(&k) {
        return Err(Error::SearchSpaceTooLarge { k, n });
    }
    let ends = (1u32 << (k - 1)) | 1;
    let candidates: Vec<u32> = (0..1u32 << k).filter(|g| g & ends == ends).collect();
    let mut entries = Vec::new();
    let mut catastrophic_excluded = 0;
    for (i, &g1) in candidates.iter().enumerate() {
        for &g2 in &candidates[..i] {
            let code = CodeSpec::from_taps(k, &[g1, g2])?;
            if code.is_catastrophic() {
                catastrophic_excluded += 1;
                continue;
            }
            let trellis = Trellis::new(&code);
            let report = free_distance_with(&trellis, options.spectrum_span, 20 * k as usize)?;
            entries.push(SearchEntry { code, report });
        }
    }
    entries.sort_by_key(|e| (Reverse(e.report.d_free), e.report.spectrum[0], e.code.taps()));
    Ok(SearchTable {
        k,
        n,
        entries,
        catastrophic_excluded,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ComplexityProfile {
    pub states: usize,
    pub branches_per_step: usize,
    /// One survivor decision bit per state per step.
    pub survivor_bits_per_step: usize,
}

pub fn complexity_profile(code: &CodeSpec) -> ComplexityProfile {
    let states = code.num_states();
    ComplexityProfile {
        states,
        branches_per_step: 2 * states,
        survivor_bits_per_step: states,
    }
}
