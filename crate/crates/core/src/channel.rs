//! AWGN channel calibrated to Eb/N0, the power-law path gain, and the
//! seeded random streams every simulation draws from.
//!
//! Random numbers come from ChaCha8 (`rand_chacha`). A stream for item `i`
//! of a run seeded with `s` is `ChaCha8Rng::seed_from_u64(mix(s, i))`, where
//! `mix` is the SplitMix64 finalizer applied twice; see [`substream_seed`].

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gmsk::{db_to_linear, BasebandSignal};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of substream `index` under `seed`.
pub fn substream_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index)
}

pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(seed, index))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    /// Energy per information bit over N0, in dB.
    pub ebno_db: f64,
    /// Channel-bit energy is information-bit energy times this rate.
    pub code_rate: f64,
    pub samples_per_symbol: usize,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.code_rate > 0.0 && self.code_rate <= 1.0) {
            return Err(Error::Config(format!(
                "code_rate must lie in (0, 1], got {}",
                self.code_rate
            )));
        }
        if self.samples_per_symbol == 0 {
            return Err(Error::Config("samples_per_symbol must be >= 1".into()));
        }
        Ok(())
    }

    /// Complex noise variance per sample. A unit-envelope signal carries one
    /// unit of energy per sample, so a channel bit has energy `sps` and
    /// `N0 = sps / (R · Eb/N0)`.
    pub fn noise_variance(&self) -> f64 {
        self.samples_per_symbol as f64 / (db_to_linear(self.ebno_db) * self.code_rate)
    }
}

/// Adds circular complex Gaussian noise with the variance of
/// [`ChannelConfig::noise_variance`], drawn from a stream seeded by `config.seed`.
pub fn awgn(signal: &BasebandSignal, config: &ChannelConfig) -> Result<BasebandSignal> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok(awgn_with_rng(signal, config.noise_variance(), &mut rng))
}

pub fn awgn_with_rng<R: rand::Rng + ?Sized>(
    signal: &BasebandSignal,
    noise_variance: f64,
    rng: &mut R,
) -> BasebandSignal {
    if noise_variance == 0.0 {
        return signal.clone();
    }
    let sigma = (noise_variance / 2.0).sqrt();
    let samples = signal
        .samples
        .iter()
        .map(|s| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            s + Complex64::new(sigma * re, sigma * im)
        })
        .collect();
    BasebandSignal {
        samples,
        sample_rate: signal.sample_rate,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    /// Gain factor at 1 m.
    pub g_l: f64,
    /// Link margin.
    pub m_l: f64,
    /// Path-loss exponent.
    pub k_exp: f64,
    pub distance_m: f64,
    /// Receiver noise figure, linear.
    pub n_f: f64,
    /// Thermal noise PSD, J (W/Hz).
    pub sigma2: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            g_l: 1e3,
            m_l: 1e4,
            k_exp: 3.0,
            distance_m: 100.0,
            n_f: 10.0,
            sigma2: 3.981e-21,
        }
    }
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        if !(2.0..=4.0).contains(&self.k_exp) {
            return Err(Error::Config(format!(
                "path-loss exponent must lie in [2, 4], got {}",
                self.k_exp
            )));
        }
        if !(self.distance_m > 0.0) {
            return Err(Error::Config(format!(
                "distance must be positive, got {}",
                self.distance_m
            )));
        }
        if !(self.g_l > 0.0 && self.m_l > 0.0 && self.n_f > 0.0 && self.sigma2 > 0.0) {
            return Err(Error::Config("link gains and noise terms must be positive".into()));
        }
        Ok(())
    }

    pub fn at_distance(mut self, distance_m: f64) -> Self {
        self.distance_m = distance_m;
        self
    }
}

/// `G_d = G_l · d^k · M_l`.
pub fn path_gain(budget: &LinkBudget) -> f64 {
    budget.g_l * budget.distance_m.powf(budget.k_exp) * budget.m_l
}
