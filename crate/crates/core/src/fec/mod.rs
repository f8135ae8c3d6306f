//! Forward error correction: extended Golay, Reed–Solomon and convolutional
//! codecs behind a common block-segmenting dispatcher.

pub mod conv;
pub mod gf;
pub mod golay;
pub mod rs;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use conv::{conv_encode, viterbi_decode, ConvCode};
pub use gf::{GaloisField, Symbol};
pub use golay::{golay_decode, golay_encode, Golay};
pub use rs::{rs_decode, rs_encode, ReedSolomon, RsOutcome};

/// Default coding gain for every coded configuration, in dB.
pub const DEFAULT_CODING_GAIN_DB: f64 = 4.0;

/// Encoder and decoder power draw, W.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodecPowerProfile {
    pub p_enc: f64,
    pub p_dec: f64,
}

impl Default for CodecPowerProfile {
    fn default() -> Self {
        Self {
            p_enc: 28e-3,
            p_dec: 35e-3,
        }
    }
}

impl CodecPowerProfile {
    pub const ZERO: Self = Self { p_enc: 0.0, p_dec: 0.0 };

    pub fn validate(&self) -> Result<()> {
        if self.p_enc < 0.0 || self.p_dec < 0.0 {
            return Err(Error::Config("codec powers must be >= 0".into()));
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.p_enc + self.p_dec
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    Decoded { message: Vec<u8>, corrected: usize },
    Failure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeKind {
    None,
    Golay,
    ReedSolomon,
    Convolutional,
}

impl CodeKind {
    pub const ALL: [CodeKind; 4] = [
        CodeKind::None,
        CodeKind::Golay,
        CodeKind::ReedSolomon,
        CodeKind::Convolutional,
    ];

    /// Short label used in file names and CSV columns.
    pub fn label(self) -> &'static str {
        match self {
            CodeKind::None => "none",
            CodeKind::Golay => "golay",
            CodeKind::ReedSolomon => "rs",
            CodeKind::Convolutional => "conv",
        }
    }
}

impl fmt::Display for CodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CodeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "uncoded" => Ok(CodeKind::None),
            "golay" => Ok(CodeKind::Golay),
            "rs" | "reed_solomon" | "reed-solomon" => Ok(CodeKind::ReedSolomon),
            "conv" | "convolutional" => Ok(CodeKind::Convolutional),
            other => Err(Error::Parse(format!("unknown codec '{other}'"))),
        }
    }
}

/// Code parameters. `n` and `k` are in bits for binary codes and in symbols
/// of `symbol_bits` bits for Reed–Solomon; for the convolutional code they
/// describe the rate (n = 2, k = 1) and `d_min`/`t` are undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeSpec {
    pub kind: CodeKind,
    pub n: usize,
    pub k: usize,
    pub rate: f64,
    pub d_min: Option<usize>,
    pub t: Option<usize>,
    pub g_code_db: f64,
    pub symbol_bits: u32,
}

impl CodeSpec {
    pub fn none() -> Self {
        Self {
            kind: CodeKind::None,
            n: 1,
            k: 1,
            rate: 1.0,
            d_min: Some(1),
            t: Some(0),
            g_code_db: 0.0,
            symbol_bits: 1,
        }
    }

    pub fn golay(g_code_db: f64) -> Self {
        Self {
            kind: CodeKind::Golay,
            n: golay::N,
            k: golay::K,
            rate: golay::K as f64 / golay::N as f64,
            d_min: Some(golay::D_MIN),
            t: Some(golay::T),
            g_code_db,
            symbol_bits: 1,
        }
    }

    pub fn reed_solomon(n: usize, k: usize, symbol_bits: u32, g_code_db: f64) -> Result<Self> {
        if k == 0 || k >= n || !(2..=8).contains(&symbol_bits) || n >= 1 << symbol_bits {
            return Err(Error::Config(format!(
                "invalid RS({n}, {k}) with {symbol_bits}-bit symbols"
            )));
        }
        Ok(Self {
            kind: CodeKind::ReedSolomon,
            n,
            k,
            rate: k as f64 / n as f64,
            d_min: Some(n - k + 1),
            t: Some((n - k) / 2),
            g_code_db,
            symbol_bits,
        })
    }

    pub fn convolutional(g_code_db: f64) -> Self {
        Self {
            kind: CodeKind::Convolutional,
            n: 2,
            k: 1,
            rate: 0.5,
            d_min: None,
            t: None,
            g_code_db,
            symbol_bits: 1,
        }
    }

    /// Default parameters for a code family: Golay (24, 12), RS(15, 11) over
    /// GF(16), K = 7 (171, 133) convolutional, all at the default coding gain.
    pub fn default_for(kind: CodeKind) -> Self {
        match kind {
            CodeKind::None => Self::none(),
            CodeKind::Golay => Self::golay(DEFAULT_CODING_GAIN_DB),
            CodeKind::ReedSolomon => {
                Self::reed_solomon(15, 11, 4, DEFAULT_CODING_GAIN_DB).expect("valid")
            }
            CodeKind::Convolutional => Self::convolutional(DEFAULT_CODING_GAIN_DB),
        }
    }

    pub fn with_gain_db(mut self, g_code_db: f64) -> Self {
        self.g_code_db = g_code_db;
        self
    }

    pub fn coding_gain_linear(&self) -> f64 {
        10f64.powf(self.g_code_db / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.n {
            return Err(Error::Config(format!("need 0 < k <= n, got n = {}, k = {}", self.n, self.k)));
        }
        if (self.rate - self.k as f64 / self.n as f64).abs() > 0.0 {
            return Err(Error::Config("rate must equal k / n".into()));
        }
        if self.kind == CodeKind::None && (self.rate != 1.0 || self.g_code_db != 0.0) {
            return Err(Error::Config("uncoded spec must have rate 1 and 0 dB gain".into()));
        }
        Ok(())
    }

    /// Information bits per code block (one block for the stream codes).
    pub fn info_bits_per_block(&self) -> usize {
        self.k * self.symbol_bits as usize
    }
}

/// Output of [`apply_code`]; keeps what [`strip_code`] needs to undo it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoded {
    pub bits: Vec<u8>,
    pub info_len: usize,
    pub pad_bits: usize,
}

/// Output of [`strip_code`]. On a block decode failure the raw received
/// systematic bits are passed through and the block is counted here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stripped {
    pub bits: Vec<u8>,
    pub failed_blocks: usize,
    pub corrected: usize,
}

#[derive(Debug, Clone)]
enum Engine {
    None,
    Golay(Golay),
    Rs(ReedSolomon),
    Conv(ConvCode),
}

/// A ready-to-use codec for one [`CodeSpec`].
#[derive(Debug, Clone)]
pub struct Codec {
    spec: CodeSpec,
    engine: Engine,
}

impl Codec {
    pub fn new(spec: CodeSpec) -> Result<Self> {
        spec.validate()?;
        let engine = match spec.kind {
            CodeKind::None => Engine::None,
            CodeKind::Golay => Engine::Golay(Golay::default()),
            CodeKind::ReedSolomon => {
                let field = match spec.symbol_bits {
                    3 => GaloisField::new(3, 0b1011)?,
                    4 => GaloisField::gf16(),
                    5 => GaloisField::new(5, 0b10_0101)?,
                    6 => GaloisField::new(6, 0b100_0011)?,
                    7 => GaloisField::new(7, 0b1000_1001)?,
                    8 => GaloisField::new(8, 0x11d)?,
                    m => return Err(Error::Config(format!("no field table for m = {m}"))),
                };
                Engine::Rs(ReedSolomon::new(field, spec.n, spec.k)?)
            }
            CodeKind::Convolutional => Engine::Conv(ConvCode::default()),
        };
        Ok(Self { spec, engine })
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    /// Coded length for `info_len` information bits.
    pub fn coded_len(&self, info_len: usize) -> usize {
        match &self.engine {
            Engine::None => info_len,
            Engine::Conv(c) => c.coded_len(info_len),
            _ => {
                let per_block = self.spec.info_bits_per_block();
                info_len.div_ceil(per_block) * self.spec.n * self.spec.symbol_bits as usize
            }
        }
    }

    pub fn apply(&self, bits: &[u8]) -> Result<Encoded> {
        let info_len = bits.len();
        let (bits, pad_bits) = match &self.engine {
            Engine::None => (bits.to_vec(), 0),
            Engine::Conv(c) => (c.encode(bits)?, 0),
            Engine::Golay(g) => {
                let (blocks, pad) = segment(bits, golay::K);
                let mut out = Vec::with_capacity(blocks.len() / golay::K * golay::N);
                for block in blocks.chunks_exact(golay::K) {
                    out.extend(g.encode(block)?);
                }
                (out, pad)
            }
            Engine::Rs(rs) => {
                let m = self.spec.symbol_bits as usize;
                let (blocks, pad) = segment(bits, rs.k() * m);
                let mut out = Vec::with_capacity(blocks.len() / rs.k() * rs.n() * m);
                for block in blocks.chunks_exact(rs.k() * m) {
                    let codeword = rs.encode(&bits_to_symbols(block, m))?;
                    out.extend(symbols_to_bits(&codeword, m));
                }
                (out, pad)
            }
        };
        Ok(Encoded {
            bits,
            info_len,
            pad_bits,
        })
    }

    pub fn strip(&self, coded: &[u8], info_len: usize) -> Result<Stripped> {
        let expected = self.coded_len(info_len);
        if coded.len() != expected {
            return Err(Error::Framing {
                expected,
                got: coded.len(),
            });
        }
        let mut failed_blocks = 0;
        let mut corrected = 0;
        let mut bits = match &self.engine {
            Engine::None => coded.to_vec(),
            Engine::Conv(c) => c.decode(coded)?,
            Engine::Golay(g) => {
                let mut out = Vec::with_capacity(coded.len() / 2);
                for block in coded.chunks_exact(golay::N) {
                    match g.decode(block)? {
                        DecodeOutcome::Decoded { message, corrected: c } => {
                            corrected += c;
                            out.extend(message);
                        }
                        DecodeOutcome::Failure => {
                            failed_blocks += 1;
                            out.extend_from_slice(&block[..golay::K]);
                        }
                    }
                }
                out
            }
            Engine::Rs(rs) => {
                let m = self.spec.symbol_bits as usize;
                let mut out = Vec::new();
                for block in coded.chunks_exact(rs.n() * m) {
                    match rs.decode(&bits_to_symbols(block, m))? {
                        RsOutcome::Decoded { message, corrected: c } => {
                            corrected += c;
                            out.extend(symbols_to_bits(&message, m));
                        }
                        RsOutcome::Failure => {
                            failed_blocks += 1;
                            out.extend_from_slice(&block[..rs.k() * m]);
                        }
                    }
                }
                out
            }
        };
        bits.truncate(info_len);
        Ok(Stripped {
            bits,
            failed_blocks,
            corrected,
        })
    }
}

fn segment(bits: &[u8], block: usize) -> (Vec<u8>, usize) {
    let pad = (block - bits.len() % block) % block;
    let mut padded = bits.to_vec();
    padded.resize(bits.len() + pad, 0);
    (padded, pad)
}

/// MSB-first packing of `m`-bit symbols.
pub fn bits_to_symbols(bits: &[u8], m: usize) -> Vec<Symbol> {
    bits.chunks(m)
        .map(|c| c.iter().fold(0, |acc, &b| acc << 1 | Symbol::from(b & 1)))
        .collect()
}

pub fn symbols_to_bits(symbols: &[Symbol], m: usize) -> Vec<u8> {
    symbols
        .iter()
        .flat_map(|&s| (0..m).rev().map(move |i| (s >> i & 1) as u8))
        .collect()
}

pub fn apply_code(bits: &[u8], spec: &CodeSpec) -> Result<Encoded> {
    Codec::new(*spec)?.apply(bits)
}

pub fn strip_code(encoded: &Encoded, spec: &CodeSpec) -> Result<Stripped> {
    Codec::new(*spec)?.strip(&encoded.bits, encoded.info_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_bits(len: usize, seed: u64) -> Vec<u8> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| rng.random_range(0..2)).collect()
    }

    #[test]
    fn spec_invariants() {
        let g = CodeSpec::golay(4.0);
        assert_eq!((g.n, g.k, g.d_min, g.t), (24, 12, Some(8), Some(3)));
        assert_eq!(g.rate, 0.5);
        let rs = CodeSpec::default_for(CodeKind::ReedSolomon);
        assert_eq!((rs.n, rs.k, rs.d_min, rs.t), (15, 11, Some(5), Some(2)));
        assert!((rs.rate - 11.0 / 15.0).abs() == 0.0);
        let none = CodeSpec::none();
        assert_eq!((none.rate, none.g_code_db), (1.0, 0.0));
        assert!((CodeSpec::golay(4.0).coding_gain_linear() - 2.511_886_431_509_58).abs() < 1e-12);
        assert!(CodeSpec::reed_solomon(16, 11, 4, 4.0).is_err());
        assert!(CodeSpec::none().with_gain_db(1.0).validate().is_err());
    }

    #[test]
    fn singleton_bound() {
        for kind in [CodeKind::Golay, CodeKind::ReedSolomon] {
            let s = CodeSpec::default_for(kind);
            let d = s.d_min.unwrap();
            assert!(d <= s.n - s.k + 1);
            assert_eq!(d == s.n - s.k + 1, kind == CodeKind::ReedSolomon);
        }
    }

    #[test]
    fn golay_segmentation() {
        let bits = random_bits(1000, 1);
        let enc = apply_code(&bits, &CodeSpec::golay(4.0)).unwrap();
        assert_eq!(enc.bits.len(), 2016);
        assert_eq!(enc.pad_bits, 8);
        assert_eq!(enc.bits.len() / 24, 84);
        let out = strip_code(&enc, &CodeSpec::golay(4.0)).unwrap();
        assert_eq!(out.bits, bits);
        assert_eq!(out.failed_blocks, 0);
    }

    #[test]
    fn uncoded_identity() {
        let bits = random_bits(77, 2);
        let enc = apply_code(&bits, &CodeSpec::none()).unwrap();
        assert_eq!(enc.bits, bits);
        assert_eq!(strip_code(&enc, &CodeSpec::none()).unwrap().bits, bits);
    }

    #[test]
    fn golay_failure_passes_raw_systematic_bits() {
        let codec = Codec::new(CodeSpec::golay(4.0)).unwrap();
        let bits = random_bits(12, 3);
        let mut enc = codec.apply(&bits).unwrap();
        for i in [0, 5, 13, 20] {
            enc.bits[i] ^= 1;
        }
        let out = codec.strip(&enc.bits, 12).unwrap();
        assert_eq!(out.failed_blocks, 1);
        assert_eq!(out.bits, enc.bits[..12].to_vec());
    }

    #[test]
    fn rs_corrects_symbol_burst() {
        let codec = Codec::new(CodeSpec::default_for(CodeKind::ReedSolomon)).unwrap();
        let bits = random_bits(88, 4);
        let mut enc = codec.apply(&bits).unwrap();
        assert_eq!(enc.bits.len(), 120);
        // 8 adjacent bit errors inside two symbols of the first codeword
        for b in &mut enc.bits[4..12] {
            *b ^= 1;
        }
        let out = codec.strip(&enc.bits, 88).unwrap();
        assert_eq!(out.bits, bits);
        assert_eq!(out.corrected, 2);
    }

    #[test]
    fn framing_mismatch() {
        let codec = Codec::new(CodeSpec::golay(4.0)).unwrap();
        assert!(matches!(codec.strip(&[0; 23], 12), Err(Error::Framing { .. })));
    }

    #[test]
    fn symbol_packing() {
        assert_eq!(bits_to_symbols(&[1, 0, 1, 1, 0, 0, 0, 1], 4), vec![0b1011, 0b0001]);
        assert_eq!(symbols_to_bits(&[0b1011, 0b0001], 4), vec![1, 0, 1, 1, 0, 0, 0, 1]);
    }

    #[test]
    fn kind_parsing() {
        for kind in CodeKind::ALL {
            assert_eq!(kind.label().parse::<CodeKind>().unwrap(), kind);
        }
        assert!("hamming".parse::<CodeKind>().is_err());
    }

    proptest! {
        #[test]
        fn rate_bookkeeping(len in 1usize..400, seed in 0u64..1000, kind_idx in 0usize..4) {
            let spec = CodeSpec::default_for(CodeKind::ALL[kind_idx]);
            let bits = random_bits(len, seed);
            let enc = apply_code(&bits, &spec).unwrap();
            prop_assert!(enc.bits.len() as f64 * spec.rate >= len as f64 - 1e-9);
            prop_assert_eq!(strip_code(&enc, &spec).unwrap().bits, bits);
        }
    }
}
