//! Rate-1/2 feedforward convolutional code with hard-decision Viterbi decoding.
//!
//! The default is the constraint-length 7 code with octal generators
//! (171, 133). Generator bit `K−1` taps the current input, bit 0 the oldest
//! register stage. Streams are tail-terminated with `K−1` zeros, so the
//! trellis starts and ends in state 0.

use crate::error::{Error, Result};

pub const DEFAULT_CONSTRAINT_LENGTH: u32 = 7;
pub const DEFAULT_GENERATORS: [u32; 2] = [0o171, 0o133];
pub const DEFAULT_FREE_DISTANCE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvCode {
    constraint_length: u32,
    generators: [u32; 2],
}

impl Default for ConvCode {
    fn default() -> Self {
        Self {
            constraint_length: DEFAULT_CONSTRAINT_LENGTH,
            generators: DEFAULT_GENERATORS,
        }
    }
}

impl ConvCode {
    /// Constraint lengths 2 through 7 are supported (at most 64 states).
    pub fn new(constraint_length: u32, generators: [u32; 2]) -> Result<Self> {
        if !(2..=7).contains(&constraint_length)
            || generators.iter().any(|&g| g == 0 || g >> constraint_length != 0)
        {
            return Err(Error::Config(format!(
                "unsupported convolutional code K = {constraint_length}, g = ({:o}, {:o})",
                generators[0], generators[1]
            )));
        }
        Ok(Self {
            constraint_length,
            generators,
        })
    }

    pub fn constraint_length(&self) -> u32 {
        self.constraint_length
    }

    pub fn generators(&self) -> [u32; 2] {
        self.generators
    }

    pub fn num_states(&self) -> usize {
        1 << (self.constraint_length - 1)
    }

    pub fn tail_len(&self) -> usize {
        self.constraint_length as usize - 1
    }

    pub fn coded_len(&self, info_len: usize) -> usize {
        2 * (info_len + self.tail_len())
    }

    fn outputs(&self, register: u32) -> (u8, u8) {
        (
            ((register & self.generators[0]).count_ones() & 1) as u8,
            ((register & self.generators[1]).count_ones() & 1) as u8,
        )
    }

    pub fn encode(&self, bits: &[u8]) -> Result<Vec<u8>> {
        if bits.is_empty() {
            return Err(Error::EmptyInput);
        }
        let m = self.constraint_length - 1;
        let mut state = 0u32;
        let mut out = Vec::with_capacity(self.coded_len(bits.len()));
        let tail = std::iter::repeat_n(0u8, self.tail_len());
        for b in bits.iter().copied().chain(tail) {
            let register = u32::from(b & 1) << m | state;
            let (o0, o1) = self.outputs(register);
            out.push(o0);
            out.push(o1);
            state = register >> 1;
        }
        Ok(out)
    }

    /// Maximum-likelihood (Hamming metric) decoding over the terminated trellis.
    pub fn decode(&self, coded: &[u8]) -> Result<Vec<u8>> {
        if !coded.len().is_multiple_of(2) || coded.len() <= 2 * self.tail_len() {
            return Err(Error::Framing {
                expected: 2 * (self.tail_len() + 1),
                got: coded.len(),
            });
        }
        let m = self.constraint_length - 1;
        let states = self.num_states();
        let steps = coded.len() / 2;
        let high_mask = (states as u32) >> 1;

        // Branch outputs indexed by (state << 1 | input).
        let branch: Vec<(u8, u8)> = (0..2 * states as u32)
            .map(|si| self.outputs((si & 1) << m | si >> 1))
            .collect();

        const UNREACHED: u32 = u32::MAX / 2;
        let mut metric = vec![UNREACHED; states];
        metric[0] = 0;
        let mut next = vec![0u32; states];
        let mut decisions: Vec<u64> = Vec::with_capacity(steps);

        for pair in coded.chunks_exact(2) {
            let (r0, r1) = (pair[0] & 1, pair[1] & 1);
            let mut word = 0u64;
            for (ns, slot) in next.iter_mut().enumerate() {
                let ns = ns as u32;
                let input = ns >> (m - 1);
                let base = (ns & (high_mask - 1)) << 1;
                let mut best = u32::MAX;
                let mut pick = 0u64;
                for x in 0..2u32 {
                    let s = base | x;
                    let (o0, o1) = branch[(s << 1 | input) as usize];
                    let cost = metric[s as usize] + u32::from(o0 ^ r0) + u32::from(o1 ^ r1);
                    if cost < best {
                        best = cost;
                        pick = u64::from(x);
                    }
                }
                *slot = best;
                word |= pick << ns;
            }
            std::mem::swap(&mut metric, &mut next);
            decisions.push(word);
        }

        let mut state = 0u32;
        let mut bits = vec![0u8; steps];
        for (t, word) in decisions.iter().enumerate().rev() {
            bits[t] = (state >> (m - 1)) as u8;
            let x = (word >> state & 1) as u32;
            state = (state & (high_mask - 1)) << 1 | x;
        }
        bits.truncate(steps - self.tail_len());
        Ok(bits)
    }

    /// Free distance by a shortest-path search over paths that leave state 0
    /// and first return to it.
    pub fn free_distance(&self) -> usize {
        let m = self.constraint_length - 1;
        let states = self.num_states();
        let mut dist = vec![usize::MAX; states];
        let (o0, o1) = self.outputs(1 << m);
        let start = (1u32 << m) >> 1;
        dist[start as usize] = usize::from(o0 + o1);
        let mut best = usize::MAX;
        // Bellman-Ford style relaxation; weights are non-negative and the graph small.
        for _ in 0..states * 2 {
            let mut changed = false;
            for s in 1..states as u32 {
                let d = dist[s as usize];
                if d == usize::MAX {
                    continue;
                }
                for input in 0..2u32 {
                    let register = input << m | s;
                    let (o0, o1) = self.outputs(register);
                    let nd = d + usize::from(o0 + o1);
                    let ns = register >> 1;
                    if ns == 0 {
                        best = best.min(nd);
                    } else if nd < dist[ns as usize] {
                        dist[ns as usize] = nd;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        best
    }
}

pub fn conv_encode(bits: &[u8]) -> Result<Vec<u8>> {
    ConvCode::default().encode(bits)
}

pub fn viterbi_decode(coded: &[u8]) -> Result<Vec<u8>> {
    ConvCode::default().decode(coded)
}
