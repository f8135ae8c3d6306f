//! Gaussian Minimum Shift Keying baseband modem.
//!
//! The transmitter is a continuous-phase FM modulator with modulation index
//! h = 0.5 driven through a truncated Gaussian frequency pulse. Information
//! bits are differentially precoded (`d[k] = b[k] ^ b[k-1]`, frequency symbol
//! `+1` for `d = 1`) so that the linear receiver below decides information
//! bits directly, without the error doubling of differential decoding.
//!
//! The receiver correlates against the principal Laurent pulse `C0` and makes
//! one threshold decision per bit on alternating I/Q axes. Synchronization is
//! assumed perfect; the modem's group delay is absorbed inside [`demodulate`].
//!
//! # α table
//!
//! The bit error bound `Pe = Q(sqrt(2 α Eb/N0))` needs a value for α, which
//! depends on BT. [`alpha_for_bt`] uses α = 0.68 at BT = 0.25 and the MSK
//! value 0.85 from BT = 0.5 upward, interpolating linearly in between.
//!
//! | BT    | α      |
//! |-------|--------|
//! | ≤0.25 | 0.68   |
//! | 0.30  | 0.714  |
//! | ≥0.50 | 0.85   |

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Modulation index of GMSK.
pub const MODULATION_INDEX: f64 = 0.5;

pub const ALPHA_BT_025: f64 = 0.68;
pub const ALPHA_MSK: f64 = 0.85;
/// BT at and above which α is taken at its MSK value.
pub const MSK_LIMIT_BT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModemConfig {
    /// 3 dB bandwidth of the Gaussian filter times the bit period.
    pub bt_product: f64,
    pub samples_per_symbol: usize,
    /// Truncation of the Gaussian impulse response, in symbol periods each side.
    pub pulse_span_symbols: usize,
    /// Bit rate in Hz. Only used to label the sample rate.
    pub bit_rate: f64,
}

impl Default for ModemConfig {
    fn default() -> Self {
        Self {
            bt_product: 0.3,
            samples_per_symbol: 8,
            pulse_span_symbols: 3,
            bit_rate: 1e4,
        }
    }
}

impl ModemConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bt_product > 0.0) || !self.bt_product.is_finite() {
            return Err(Error::Config(format!(
                "BT product must be positive, got {}",
                self.bt_product
            )));
        }
        if self.samples_per_symbol < 4 || !self.samples_per_symbol.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "samples_per_symbol must be even and >= 4, got {}",
                self.samples_per_symbol
            )));
        }
        let min_span = if self.bt_product <= 0.5 { 2 } else { 1 };
        if self.pulse_span_symbols < min_span {
            return Err(Error::Config(format!(
                "pulse_span_symbols must be >= {min_span} for BT = {}, got {}",
                self.bt_product, self.pulse_span_symbols
            )));
        }
        if !(self.bit_rate > 0.0) {
            return Err(Error::Config(format!(
                "bit_rate must be positive, got {}",
                self.bit_rate
            )));
        }
        Ok(())
    }

    /// Length of the frequency pulse in symbol periods (Gaussian support plus
    /// the rectangular symbol pulse).
    pub fn pulse_len_symbols(&self) -> usize {
        2 * self.pulse_span_symbols + 1
    }

    /// Number of samples `modulate` produces for `num_bits` bits.
    pub fn signal_len(&self, num_bits: usize) -> usize {
        (num_bits + 2 * self.pulse_span_symbols) * self.samples_per_symbol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasebandSignal {
    pub samples: Vec<Complex64>,
    /// Hz.
    pub sample_rate: f64,
}

impl BasebandSignal {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerModelParams {
    pub alpha: f64,
    pub target_pe: f64,
}

impl BerModelParams {
    pub fn new(alpha: f64, target_pe: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if !(target_pe > 0.0 && target_pe <= 0.5) {
            return Err(Error::Domain(format!(
                "target_pe must lie in (0, 0.5], got {target_pe}"
            )));
        }
        Ok(Self { alpha, target_pe })
    }
}

/// α of the BER bound as a function of BT (see the module docs for the table).
pub fn alpha_for_bt(bt: f64) -> f64 {
    if bt <= 0.25 {
        ALPHA_BT_025
    } else if bt >= MSK_LIMIT_BT {
        ALPHA_MSK
    } else {
        ALPHA_BT_025 + (bt - 0.25) / (MSK_LIMIT_BT - 0.25) * (ALPHA_MSK - ALPHA_BT_025)
    }
}

/// Gaussian tail probability, `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `Q(sqrt(2 α Eb/N0))`.
pub fn theoretical_ber(ebno_db: f64, alpha: f64) -> f64 {
    q_function((2.0 * alpha * db_to_linear(ebno_db)).sqrt())
}

/// Exponential approximation `exp(-α Eb/N0)` of the same bound.
pub fn theoretical_ber_exponential(ebno_db: f64, alpha: f64) -> f64 {
    (-alpha * db_to_linear(ebno_db)).exp()
}

fn gaussian_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Sampled frequency pulse: a Gaussian impulse response truncated to
/// `±pulse_span_symbols` periods, convolved with a one-symbol rectangle.
///
/// There are `(2 * span + 1) * sps` taps evaluated at sample midpoints. The
/// taps sum to 0.5, and so does every polyphase branch scaled by `sps`, so a
/// run of identical symbols advances the phase by exactly `h π` per symbol.
pub fn gaussian_frequency_pulse(config: &ModemConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let sps = config.samples_per_symbol;
    let span = config.pulse_span_symbols as f64;
    let sigma = 2f64.ln().sqrt() / (2.0 * PI * config.bt_product);
    let cdf = |t: f64| gaussian_cdf(t / sigma);
    let mass = cdf(span) - cdf(-span);
    let n_taps = config.pulse_len_symbols() * sps;
    let half = span + 0.5;

    let taps = (0..n_taps)
        .map(|n| {
            let t = (n as f64 + 0.5) / sps as f64 - half;
            let hi = (t + 0.5).min(span);
            let lo = (t - 0.5).max(-span);
            if hi <= lo {
                0.0
            } else {
                0.5 / sps as f64 * (cdf(hi) - cdf(lo)) / mass
            }
        })
        .collect();
    Ok(taps)
}

/// Maps raw bits to frequency symbols, bit 1 → +1 and bit 0 → −1.
pub fn frequency_symbols(bits: &[u8]) -> Vec<f64> {
    bits.iter().map(|&b| if b & 1 == 1 { 1.0 } else { -1.0 }).collect()
}

/// Differential precoding: `d[k] = b[k] ^ b[k-1]` with `b[-1] = 0`, then the
/// frequency mapping of [`frequency_symbols`].
pub fn precode(bits: &[u8]) -> Vec<f64> {
    let mut prev = 0u8;
    bits.iter()
        .map(|&b| {
            let b = b & 1;
            let d = b ^ prev;
            prev = b;
            if d == 1 {
                1.0
            } else {
                -1.0
            }
        })
        .collect()
}

/// Modulator and receiver with the pulse tables precomputed for one config.
#[derive(Debug, Clone)]
pub struct GmskModem {
    config: ModemConfig,
    freq_pulse: Vec<f64>,
    laurent_c0: Vec<f64>,
}

impl GmskModem {
    pub fn new(config: ModemConfig) -> Result<Self> {
        let freq_pulse = gaussian_frequency_pulse(&config)?;
        let laurent_c0 = laurent_principal_pulse(&freq_pulse, &config);
        Ok(Self {
            config,
            freq_pulse,
            laurent_c0,
        })
    }

    pub fn config(&self) -> &ModemConfig {
        &self.config
    }

    pub fn frequency_pulse(&self) -> &[f64] {
        &self.freq_pulse
    }

    pub fn principal_pulse(&self) -> &[f64] {
        &self.laurent_c0
    }

    /// Continuous-phase modulation of ±1 frequency symbols, no precoding.
    pub fn modulate_symbols(&self, symbols: &[f64]) -> Result<BasebandSignal> {
        if symbols.is_empty() {
            return Err(Error::EmptyInput);
        }
        let sps = self.config.samples_per_symbol;
        let mut dphi = vec![0.0; self.config.signal_len(symbols.len())];
        let scale = 2.0 * PI * MODULATION_INDEX;
        for (k, &a) in symbols.iter().enumerate() {
            let start = k * sps;
            for (d, &g) in dphi[start..start + self.freq_pulse.len()]
                .iter_mut()
                .zip(&self.freq_pulse)
            {
                *d += scale * a * g;
            }
        }
        let mut phase = 0.0;
        let samples = dphi
            .into_iter()
            .map(|d| {
                phase += d;
                Complex64::from_polar(1.0, phase)
            })
            .collect();
        Ok(BasebandSignal {
            samples,
            sample_rate: self.config.bit_rate * sps as f64,
        })
    }

    /// Precodes `bits` and modulates them.
    pub fn modulate(&self, bits: &[u8]) -> Result<BasebandSignal> {
        self.modulate_symbols(&precode(bits))
    }

    /// Matched filter on the principal Laurent pulse, then one threshold
    /// decision per bit.
    pub fn demodulate(&self, signal: &BasebandSignal, num_bits: usize) -> Result<Vec<u8>> {
        if num_bits == 0 {
            return Err(Error::EmptyInput);
        }
        let expected = self.config.signal_len(num_bits);
        if signal.samples.len() != expected {
            return Err(Error::Framing {
                expected,
                got: signal.samples.len(),
            });
        }
        let sps = self.config.samples_per_symbol;
        let samples = &signal.samples;
        let bits = (0..num_bits)
            .map(|k| {
                let start = k * sps;
                let end = (start + self.laurent_c0.len()).min(samples.len());
                let z: Complex64 = samples[start..end]
                    .iter()
                    .zip(&self.laurent_c0)
                    .map(|(s, &c)| s * c)
                    .sum();
                // Derotate by j^-(k+1); the pseudo-symbol then lies on the real axis.
                let c = match (k + 1) % 4 {
                    0 => z.re,
                    1 => z.im,
                    2 => -z.re,
                    _ => -z.im,
                };
                let c = if k % 2 == 0 { c } else { -c };
                u8::from(c > 0.0)
            })
            .collect();
        Ok(bits)
    }
}

/// `C0(t) = Π_{i<L} S(t + iT)` with `S(t) = sin(π q(t))` on `[0, LT)`
/// mirrored onto `[LT, 2LT)`, where `q` is the integrated frequency pulse.
fn laurent_principal_pulse(freq_pulse: &[f64], config: &ModemConfig) -> Vec<f64> {
    let sps = config.samples_per_symbol;
    let l = config.pulse_len_symbols();
    let h = MODULATION_INDEX;
    let mut q = 0.0;
    let rising: Vec<f64> = freq_pulse
        .iter()
        .map(|&g| {
            q += g;
            (2.0 * PI * h * q).sin() / (PI * h).sin()
        })
        .collect();
    let s: Vec<f64> = rising.iter().chain(rising.iter().rev()).copied().collect();
    (0..(l + 1) * sps)
        .map(|n| {
            (0..l)
                .map(|i| s.get(n + i * sps).copied().unwrap_or(0.0))
                .product()
        })
        .collect()
}

pub fn modulate(bits: &[u8], config: &ModemConfig) -> Result<BasebandSignal> {
    GmskModem::new(*config)?.modulate(bits)
}

pub fn demodulate(
    signal: &BasebandSignal,
    config: &ModemConfig,
    num_bits: usize,
) -> Result<Vec<u8>> {
    GmskModem::new(*config)?.demodulate(signal, num_bits)
}
