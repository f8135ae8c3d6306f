//! Exhaustive and randomized codec checks behind `codec-test`.

use gmsk_wsn::channel::substream;
use gmsk_wsn::fec::golay::{self, Golay};
use gmsk_wsn::fec::{ConvCode, ReedSolomon, RsOutcome, Symbol};
use rand::Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub trials: u64,
    pub failures: u64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.trials > 0
    }
}

/// All error patterns of weight at most three on 24 bits.
pub fn golay_error_patterns() -> Vec<u32> {
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

/// Every `message_step`-th message against every pattern of weight ≤ 3.
pub fn golay_radius(code: &Golay, message_step: usize) -> CheckResult {
    let patterns = golay_error_patterns();
    let messages: Vec<u16> = (0..1u16 << golay::K).step_by(message_step.max(1)).collect();
    let failures: u64 = messages
        .par_iter()
        .map(|&m| {
            let c = code.encode_word(m);
            patterns
                .iter()
                .filter(|&&e| code.decode_word(c ^ e).is_none_or(|d| d.message != m))
                .count() as u64
        })
        .sum();
    CheckResult {
        name: "golay_radius",
        trials: (messages.len() * patterns.len()) as u64,
        failures,
    }
}

const RS_SEED_TAG: u64 = 0x5253;
const RS3_SEED_TAG: u64 = 0x5233;
const VITERBI_SEED_TAG: u64 = 0x5654;

fn random_symbols<R: Rng>(rng: &mut R, len: usize, order: usize) -> Vec<Symbol> {
    (0..len).map(|_| rng.random_range(0..order as Symbol)).collect()
}

/// Adds `weight` nonzero errors at distinct random positions.
fn corrupt<R: Rng>(rng: &mut R, word: &mut [Symbol], weight: usize, order: usize) {
    let mut positions: Vec<usize> = Vec::with_capacity(weight);
    while positions.len() < weight {
        let p = rng.random_range(0..word.len());
        if !positions.contains(&p) {
            positions.push(p);
        }
    }
    for p in positions {
        word[p] ^= rng.random_range(1..order as Symbol);
    }
}

/// Random codewords with up to `t` symbol errors must decode exactly.
pub fn rs_within_radius(code: &ReedSolomon, trials: usize, seed: u64) -> CheckResult {
    let order = code.field().size();
    let failures = (0..trials)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = substream(seed ^ RS_SEED_TAG, i as u64);
            let msg = random_symbols(&mut rng, code.k(), order);
            let mut word = code.encode(&msg).expect("valid message");
            let weight = rng.random_range(0..=code.t());
            corrupt(&mut rng, &mut word, weight, order);
            !matches!(code.decode(&word), Ok(RsOutcome::Decoded { message, corrected })
                if message == msg && corrected == weight)
        })
        .count() as u64;
    CheckResult {
        name: "rs_within_radius",
        trials: trials as u64,
        failures,
    }
}

/// The codeword within distance `t` of `received`, found by trying every
/// error pattern of weight ≤ `t`.
pub fn rs_nearest_codeword(code: &ReedSolomon, received: &[Symbol]) -> Option<Vec<Symbol>> {
    let order = code.field().size();
    let is_codeword = |w: &[Symbol]| code.encode(&w[..code.k()]).is_ok_and(|c| c == w);
    fn search(
        word: &mut Vec<Symbol>,
        start: usize,
        left: usize,
        order: usize,
        is_codeword: &dyn Fn(&[Symbol]) -> bool,
    ) -> Option<Vec<Symbol>> {
        if is_codeword(word) {
            return Some(word.clone());
        }
        if left == 0 {
            return None;
        }
        for p in start..word.len() {
            let orig = word[p];
            for e in 1..order as Symbol {
                word[p] = orig ^ e;
                if let Some(found) = search(word, p + 1, left - 1, order, is_codeword) {
                    word[p] = orig;
                    return Some(found);
                }
            }
            word[p] = orig;
        }
        None
    }
    search(&mut received.to_vec(), 0, code.t(), order, &is_codeword)
}

/// Codewords with `t + 1` symbol errors: the decoder must not panic, must
/// report failure when no codeword lies within distance `t`, and must return
/// that codeword (a miscorrection) when one does.
pub fn rs_beyond_radius(code: &ReedSolomon, trials: usize, seed: u64) -> CheckResult {
    let order = code.field().size();
    let failures = (0..trials)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = substream(seed ^ RS3_SEED_TAG, i as u64);
            let msg = random_symbols(&mut rng, code.k(), order);
            let mut word = code.encode(&msg).expect("valid message");
            corrupt(&mut rng, &mut word, code.t() + 1, order);
            let oracle = rs_nearest_codeword(code, &word);
            let got = std::panic::catch_unwind(|| code.decode(&word));
            match (got, oracle) {
                (Ok(Ok(RsOutcome::Failure)), None) => false,
                (Ok(Ok(RsOutcome::Decoded { message, .. })), Some(c)) => message != c[..code.k()],
                _ => true,
            }
        })
        .count() as u64;
    CheckResult {
        name: "rs_beyond_radius",
        trials: trials as u64,
        failures,
    }
}

pub fn viterbi_roundtrip(code: &ConvCode, trials: usize, seed: u64) -> CheckResult {
    let failures = (0..trials)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = substream(seed ^ VITERBI_SEED_TAG, i as u64);
            let len = rng.random_range(1..=200);
            let bits: Vec<u8> = (0..len).map(|_| rng.random_range(0..2u8)).collect();
            let coded = code.encode(&bits).expect("non-empty");
            code.decode(&coded).map_or(true, |d| d != bits)
        })
        .count() as u64;
    CheckResult {
        name: "viterbi_roundtrip",
        trials: trials as u64,
        failures,
    }
}

/// Every pair of bit errors in a 200-bit coded block. The block carries
/// `100 − tail` information bits.
pub fn viterbi_double_errors(code: &ConvCode, seed: u64) -> CheckResult {
    let mut rng = substream(seed ^ VITERBI_SEED_TAG, u64::MAX);
    let info_len = 100 - code.tail_len();
    let bits: Vec<u8> = (0..info_len).map(|_| rng.random_range(0..2u8)).collect();
    let coded = code.encode(&bits).expect("non-empty");
    let n = coded.len();
    let failures: u64 = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .filter(|&j| {
                    let mut r = coded.clone();
                    r[i] ^= 1;
                    r[j] ^= 1;
                    code.decode(&r).map_or(true, |d| d != bits)
                })
                .count() as u64
        })
        .sum();
    CheckResult {
        name: "viterbi_double_errors",
        trials: (n * (n - 1) / 2) as u64,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_count() {
        assert_eq!(golay_error_patterns().len(), 1 + 24 + 276 + 2024);
    }

    #[test]
    fn shipped_codecs_pass_quick_checks() {
        assert!(golay_radius(&Golay::default(), 64).passed());
        assert!(rs_within_radius(&ReedSolomon::rs15_11(), 500, 1).passed());
        assert!(rs_beyond_radius(&ReedSolomon::rs15_11(), 20, 1).passed());
        assert!(viterbi_roundtrip(&ConvCode::default(), 100, 1).passed());
    }

    #[test]
    fn faulty_golay_fails() {
        let mut rows = *Golay::default().parity_rows();
        rows[0] ^= 1;
        assert!(!golay_radius(&Golay::with_parity_rows(rows), 64).passed());
    }

    #[test]
    fn nearest_codeword_oracle() {
        let code = ReedSolomon::rs15_11();
        let msg: Vec<Symbol> = (0..11).collect();
        let c = code.encode(&msg).unwrap();
        assert_eq!(rs_nearest_codeword(&code, &c), Some(c.clone()));
        let mut r = c.clone();
        r[0] ^= 3;
        r[14] ^= 9;
        assert_eq!(rs_nearest_codeword(&code, &r), Some(c));
    }
}
