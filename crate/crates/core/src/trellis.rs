//! Dense state-transition table for a [`CodeSpec`].
//!
//! State `s` holds the last `K-1` inputs with the most recent one in the most
//! significant position. Feeding input `u` moves to
//! `(u << (K-2)) | (s >> 1)` and emits a label whose bit `j` is the parity of
//! `generators[j] & ((u << (K-1)) | s)`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::code::CodeSpec;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Branch {
    pub from: u32,
    pub input: u8,
    pub to: u32,
    /// Bit `j` is the output of generator `j`.
    pub label: u32,
}

#[derive(Clone, Debug)]
pub struct Trellis {
    code: CodeSpec,
    num_states: usize,
    next: Vec<u32>,
    labels: Vec<u32>,
    prev: Vec<[u32; 2]>,
}

impl Trellis {
    pub fn new(code: &CodeSpec) -> Self {
        let k = code.constraint_length();
        let num_states = code.num_states();
        let taps = code.taps();
        let mut next = vec![0u32; 2 * num_states];
        let mut labels = vec![0u32; 2 * num_states];
        let mut prev = vec![[u32::MAX; 2]; num_states];
        let mut filled = vec![0usize; num_states];
        for state in 0..num_states as u32 {
            for input in 0..2u32 {
                let window = (input << (k - 1)) | state;
                let to = (input << (k - 2)) | (state >> 1);
                let label = taps
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (j, &g)| acc | (((g & window).count_ones() & 1) << j));
                let idx = 2 * state as usize + input as usize;
                next[idx] = to;
                labels[idx] = label;
                prev[to as usize][filled[to as usize]] = state;
                filled[to as usize] += 1;
            }
        }
        Trellis {
            code: code.clone(),
            num_states,
            next,
            labels,
            prev,
        }
    }

    pub fn code(&self) -> &CodeSpec {
        &self.code
    }

    pub fn constraint_length(&self) -> u8 {
        self.code.constraint_length()
    }

    pub fn n(&self) -> usize {
        self.code.n()
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    #[inline]
    pub fn next_state(&self, state: u32, input: u8) -> u32 {
        self.next[2 * state as usize + input as usize]
    }

    #[inline]
    pub fn label(&self, state: u32, input: u8) -> u32 {
        self.labels[2 * state as usize + input as usize]
    }

    /// The two states leading into `state`, lower index first.
    #[inline]
    pub fn predecessors(&self, state: u32) -> [u32; 2] {
        self.prev[state as usize]
    }

    /// The input bit on every branch entering `state`.
    #[inline]
    pub fn input_into(&self, state: u32) -> u8 {
        (state >> (self.constraint_length() - 2)) as u8
    }

    pub fn branches(&self) -> impl Iterator<Item = Branch> + '_ {
        (0..self.num_states as u32).flat_map(move |from| {
            (0..2u8).map(move |input| Branch {
                from,
                input,
                to: self.next_state(from, input),
                label: self.label(from, input),
            })
        })
    }

    /// Appends the label bits of one branch, generator 0 first.
    #[inline]
    pub fn push_label(&self, label: u32, out: &mut Vec<u8>) {
        for j in 0..self.n() {
            out.push(((label >> j) & 1) as u8);
        }
    }

    /// Runs `inputs` through the table from state 0; returns the coded bits
    /// and the final state.
    pub fn walk(&self, inputs: &[u8]) -> (Vec<u8>, u32) {
        let mut out = Vec::with_capacity(inputs.len() * self.n());
        let mut state = 0;
        for &u in inputs {
            self.push_label(self.label(state, u), &mut out);
            state = self.next_state(state, u);
        }
        (out, state)
    }

    /// True iff some cycle through nonzero states has zero output weight,
    /// i.e. the code is catastrophic. Depth-first search for a back edge in
    /// the subgraph of zero-label branches between nonzero states.
    pub fn zero_weight_cycle_exists(&self) -> bool {
        const WHITE: u8 = 0;
        const GREY: u8 = 1;
        const BLACK: u8 = 2;
        let mut colour = vec![WHITE; self.num_states];
        let mut stack: Vec<(u32, u8)> = Vec::new();
        for root in 1..self.num_states as u32 {
            if colour[root as usize] != WHITE {
                continue;
            }
            colour[root as usize] = GREY;
            stack.push((root, 0));
            while let Some(top) = stack.last_mut() {
                let (state, input) = *top;
                if input == 2 {
                    colour[state as usize] = BLACK;
                    stack.pop();
                    continue;
                }
                top.1 += 1;
                if self.label(state, input) != 0 {
                    continue;
                }
                let to = self.next_state(state, input);
                if to == 0 {
                    continue;
                }
                match colour[to as usize] {
                    GREY => return true,
                    WHITE => {
                        colour[to as usize] = GREY;
                        stack.push((to, 0));
                    }
                    _ => {}
                }
            }
        }
        false
    }

    /// Plain-text table `state,input,next_state,output_bits`, states in binary
    /// (most recent input first) and output bits generator 0 first.
    pub fn dump(&self) -> String {
        let width = (self.constraint_length() - 1) as usize;
        let mut out = String::from("state,input,next_state,output_bits\n");
        for b in self.branches() {
            let mut bits = String::new();
            for j in 0..self.n() {
                bits.push(if (b.label >> j) & 1 == 1 { '1' } else { '0' });
            }
            let _ = writeln!(
                out,
                "{:0w$b},{},{:0w$b},{}",
                b.from,
                b.input,
                b.to,
                bits,
                w = width
            );
        }
        out
    }
}
