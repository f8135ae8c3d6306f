//! Systematic extended Golay (24, 12, 8) code.
//!
//! Codewords are `(u, u·B)` where `B` is the symmetric, self-inverse 12×12
//! parity matrix. Decoding follows the classical four-step syndrome search,
//! which corrects every pattern of up to three errors and flags every
//! weight-four pattern as uncorrectable.

use super::DecodeOutcome;
use crate::error::{Error, Result};

pub const N: usize = 24;
pub const K: usize = 12;
pub const D_MIN: usize = 8;
pub const T: usize = 3;

const B_ROWS: [&str; 12] = [
    "110111000101",
    "101110001011",
    "011100010111",
    "111000101101",
    "110001011011",
    "100010110111",
    "000101101111",
    "001011011101",
    "010110111001",
    "101101110001",
    "011011100011",
    "111111111110",
];

const fn parse_row(row: &str) -> u16 {
    let bytes = row.as_bytes();
    let mut word = 0u16;
    let mut j = 0;
    while j < 12 {
        if bytes[j] == b'1' {
            word |= 1 << j;
        }
        j += 1;
    }
    word
}

pub const PARITY_ROWS: [u16; 12] = {
    let mut rows = [0u16; 12];
    let mut i = 0;
    while i < 12 {
        rows[i] = parse_row(B_ROWS[i]);
        i += 1;
    }
    rows
};

const MASK12: u16 = 0x0fff;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GolayDecoded {
    pub message: u16,
    pub corrected: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Golay {
    rows: [u16; 12],
}

impl Default for Golay {
    fn default() -> Self {
        Self { rows: PARITY_ROWS }
    }
}

impl Golay {
    /// A codec with a caller-supplied parity matrix. Only the standard matrix
    /// gives a distance-8 code; anything else is a fault-injection hook.
    pub fn with_parity_rows(rows: [u16; 12]) -> Self {
        Self { rows }
    }

    pub fn parity_rows(&self) -> &[u16; 12] {
        &self.rows
    }

    fn times_b(&self, v: u16) -> u16 {
        let mut acc = 0;
        for (i, row) in self.rows.iter().enumerate() {
            if v >> i & 1 == 1 {
                acc ^= row;
            }
        }
        acc & MASK12
    }

    /// Message in the low 12 bits, parity in the high 12 bits.
    pub fn encode_word(&self, message: u16) -> u32 {
        let message = message & MASK12;
        u32::from(message) | u32::from(self.times_b(message)) << 12
    }

    pub fn decode_word(&self, received: u32) -> Option<GolayDecoded> {
        let info = (received & 0xfff) as u16;
        let parity = (received >> 12 & 0xfff) as u16;
        let s = self.times_b(info) ^ parity;
        let (e_info, e_parity) = self.locate(s)?;
        Some(GolayDecoded {
            message: info ^ e_info,
            corrected: e_info.count_ones() + e_parity.count_ones(),
        })
    }

    /// Error pattern (info part, parity part) of weight ≤ 3 with syndrome `s`.
    fn locate(&self, s: u16) -> Option<(u16, u16)> {
        if s.count_ones() <= 3 {
            return Some((0, s));
        }
        for (i, row) in self.rows.iter().enumerate() {
            let v = s ^ row;
            if v.count_ones() <= 2 {
                return Some((1 << i, v));
            }
        }
        let s2 = self.times_b(s);
        if s2.count_ones() <= 3 {
            return Some((s2, 0));
        }
        for (i, row) in self.rows.iter().enumerate() {
            let v = s2 ^ row;
            if v.count_ones() <= 2 {
                return Some((v, 1 << i));
            }
        }
        None
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != K {
            return Err(Error::Length {
                expected: K,
                got: message.len(),
            });
        }
        let word = self.encode_word(pack(message) as u16);
        Ok(unpack(word, N))
    }

    pub fn decode(&self, received: &[u8]) -> Result<DecodeOutcome> {
        if received.len() != N {
            return Err(Error::Length {
                expected: N,
                got: received.len(),
            });
        }
        Ok(match self.decode_word(pack(received)) {
            Some(d) => DecodeOutcome::Decoded {
                message: unpack(u32::from(d.message), K),
                corrected: d.corrected as usize,
            },
            None => DecodeOutcome::Failure,
        })
    }
}

fn pack(bits: &[u8]) -> u32 {
    bits.iter()
        .enumerate()
        .fold(0, |w, (i, &b)| w | u32::from(b & 1) << i)
}

fn unpack(word: u32, len: usize) -> Vec<u8> {
    (0..len).map(|i| (word >> i & 1) as u8).collect()
}

pub fn golay_encode(message: &[u8]) -> Result<Vec<u8>> {
    Golay::default().encode(message)
}

pub fn golay_decode(received: &[u8]) -> Result<DecodeOutcome> {
    Golay::default().decode(received)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weight_le3_patterns() -> Vec<u32> {
        let mut out = vec![0u32];
        for a in 0..24 {
            out.push(1 << a);
            for b in a + 1..24 {
                out.push(1 << a | 1 << b);
                for c in b + 1..24 {
                    out.push(1 << a | 1 << b | 1 << c);
                }
            }
        }
        out
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn parity_matrix_is_symmetric_and_self_inverse() {
        let g = Golay::default();
        for i in 0..12 {
            for j in 0..12 {
                assert_eq!(PARITY_ROWS[i] >> j & 1, PARITY_ROWS[j] >> i & 1);
            }
            assert_eq!(g.times_b(g.times_b(1 << i)), 1 << i);
        }
    }

    #[test]
    fn code_parameters_by_enumeration() {
        let g = Golay::default();
        let mut words: Vec<u32> = (0..4096u16).map(|m| g.encode_word(m)).collect();
        assert_eq!(words[0], 0);
        let min_weight = words[1..].iter().map(|w| w.count_ones()).min().unwrap();
        assert_eq!(min_weight as usize, D_MIN);
        words.sort_unstable();
        words.dedup();
        assert_eq!(words.len(), 4096);
    }

    #[test]
    fn linearity() {
        let g = Golay::default();
        for a in (0..4096u16).step_by(7) {
            for b in (0..4096u16).step_by(131) {
                assert_eq!(g.encode_word(a ^ b), g.encode_word(a) ^ g.encode_word(b));
            }
        }
    }

    #[test]
    fn corrects_all_weight_le3_errors_sampled() {
        // The full 4096 x 2325 sweep lives in the acceptance suite.
        let g = Golay::default();
        let patterns = weight_le3_patterns();
        assert_eq!(patterns.len(), 2325);
        for m in (0..4096u16).step_by(37) {
            let c = g.encode_word(m);
            for &e in &patterns {
                let d = g.decode_word(c ^ e).expect("decodable");
                assert_eq!(d.message, m);
                assert_eq!(d.corrected, e.count_ones());
            }
        }
    }

    #[test]
    fn weight4_is_detected() {
        let g = Golay::default();
        for m in (0..4096u16).step_by(61) {
            let c = g.encode_word(m);
            for a in 0..24 {
                for b in a + 1..24 {
                    for cc in b + 1..24 {
                        for d in cc + 1..24 {
                            let e = 1u32 << a | 1 << b | 1 << cc | 1 << d;
                            assert!(g.decode_word(c ^ e).is_none());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn slice_api() {
        let msg = [1, 0, 1, 1, 0, 0, 0, 1, 1, 1, 0, 1];
        let mut cw = golay_encode(&msg).unwrap();
        assert_eq!(cw.len(), 24);
        assert_eq!(&cw[..12], &msg);
        cw[3] ^= 1;
        cw[20] ^= 1;
        assert_eq!(
            golay_decode(&cw).unwrap(),
            DecodeOutcome::Decoded {
                message: msg.to_vec(),
                corrected: 2
            }
        );
        assert!(matches!(golay_encode(&msg[..11]), Err(Error::Length { .. })));
        assert!(matches!(golay_decode(&cw[..23]), Err(Error::Length { .. })));
        assert_eq!(golay_encode(&[0; 12]).unwrap(), vec![0; 24]);
    }
}
