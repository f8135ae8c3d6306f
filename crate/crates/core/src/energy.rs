//! Closed-form transceiver energy for uncoded and coded GMSK links.
//!
//! Per transmission of `L` bits:
//!
//! ```text
//! E = (2/α)(1+β) N_f σ² ln(1/Pe) G_d L / G_code      radiated + PA
//!   + P_circuit · T_on'                               tx and rx circuits
//!   + (P_enc + P_dec) · T_on / R                      codec
//!   + 2 P_syn T_start                                 synthesizer start-up
//! ```
//!
//! with `T_on = L / bit_rate`. `T_on'` is `T_on / R` under
//! [`Variant::Literal`] and `T_on` under [`Variant::CircuitUnscaled`]. The
//! uncoded case is `G_code = 1`, `R = 1` with no codec term. Standby and sleep
//! power are zero.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{path_gain, LinkBudget};
use crate::error::{Error, Result};
use crate::fec::{CodeSpec, CodecPowerProfile};

/// Circuit power draw, W, and power-amplifier parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerProfile {
    pub p_adc: f64,
    /// Carried for completeness; frequency modulators do not use a DAC.
    pub p_dac: f64,
    pub p_filt: f64,
    pub p_syn: f64,
    pub p_lna: f64,
    pub p_ifa: f64,
    pub p_mixer: f64,
    /// Drain efficiency.
    pub eta: f64,
    /// Peak-to-average ratio; 1 for constant-envelope modulation.
    pub zeta: f64,
}

impl Default for PowerProfile {
    fn default() -> Self {
        Self {
            p_adc: 6.70e-3,
            p_dac: 15.40e-3,
            p_filt: 2.5e-3,
            p_syn: 50e-3,
            p_lna: 20e-3,
            p_ifa: 3e-3,
            p_mixer: 30.3e-3,
            eta: 0.75,
            zeta: 1.0,
        }
    }
}

impl PowerProfile {
    pub const ZERO_CIRCUITS: Self = Self {
        p_adc: 0.0,
        p_dac: 0.0,
        p_filt: 0.0,
        p_syn: 0.0,
        p_lna: 0.0,
        p_ifa: 0.0,
        p_mixer: 0.0,
        eta: 0.75,
        zeta: 1.0,
    };

    pub fn validate(&self) -> Result<()> {
        let powers = [
            self.p_adc,
            self.p_dac,
            self.p_filt,
            self.p_syn,
            self.p_lna,
            self.p_ifa,
            self.p_mixer,
        ];
        if powers.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::Config("circuit powers must be >= 0".into()));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Domain(format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        if !(self.zeta >= 1.0) {
            return Err(Error::Domain(format!("zeta must be >= 1, got {}", self.zeta)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingProfile {
    /// Synthesizer start-up time, s.
    pub t_start: f64,
    /// Bits per transmission.
    pub l_bits: f64,
    /// Hz.
    pub bit_rate: f64,
    /// Standby duration, s. Bookkeeping only; standby power is zero.
    pub t_stby: f64,
}

impl Default for TimingProfile {
    fn default() -> Self {
        Self {
            t_start: 5e-6,
            l_bits: 1e3,
            bit_rate: 1e4,
            t_stby: 0.0,
        }
    }
}

impl TimingProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_start >= 0.0) || !(self.t_stby >= 0.0) {
            return Err(Error::Config("timing intervals must be >= 0".into()));
        }
        if !(self.l_bits >= 1.0) {
            return Err(Error::Config(format!("l_bits must be >= 1, got {}", self.l_bits)));
        }
        if !(self.bit_rate > 0.0) {
            return Err(Error::Config("bit_rate must be positive".into()));
        }
        Ok(())
    }

    /// Active time for `L` uncoded bits, `L / bit_rate`.
    pub fn t_on(&self) -> f64 {
        self.l_bits / self.bit_rate
    }

    /// Whole period `T_start + T_on + T_stby`.
    pub fn period(&self) -> f64 {
        self.t_start + self.t_on() + self.t_stby
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EnergyBreakdown {
    pub e_tx_radiated: f64,
    pub e_pa_overhead: f64,
    pub e_circuit: f64,
    pub e_transient: f64,
    pub e_codec: f64,
    pub e_total: f64,
    pub e_per_info_bit: f64,
}

impl EnergyBreakdown {
    fn assemble(radiated: f64, pa: f64, circuit: f64, transient: f64, codec: f64, l_bits: f64) -> Self {
        let e_total = radiated + pa + circuit + transient + codec;
        Self {
            e_tx_radiated: radiated,
            e_pa_overhead: pa,
            e_circuit: circuit,
            e_transient: transient,
            e_codec: codec,
            e_total,
            e_per_info_bit: e_total / l_bits,
        }
    }
}

/// How the coded transmission time stretch enters the circuit energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Circuit and codec powers both integrated over `T_on / R`.
    #[default]
    Literal,
    /// Circuits integrated over the uncoded `T_on`; codec over `T_on / R`.
    CircuitUnscaled,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Literal, Variant::CircuitUnscaled];

    pub fn label(self) -> &'static str {
        match self {
            Variant::Literal => "literal",
            Variant::CircuitUnscaled => "circuit-unscaled",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(Variant::Literal),
            "circuit-unscaled" | "circuit_unscaled" => Ok(Variant::CircuitUnscaled),
            other => Err(Error::Parse(format!("unknown variant '{other}'"))),
        }
    }
}

/// Everything the per-link formulas need apart from the code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyInputs {
    pub power: PowerProfile,
    pub timing: TimingProfile,
    pub link: LinkBudget,
    /// Target bit error probability.
    pub pe: f64,
    pub alpha: f64,
}

impl EnergyInputs {
    pub fn validate(&self) -> Result<()> {
        self.power.validate()?;
        self.timing.validate()?;
        self.link.validate()?;
        check_pe(self.pe)?;
        check_alpha(self.alpha)
    }

    pub fn at_distance(mut self, distance_m: f64) -> Self {
        self.link.distance_m = distance_m;
        self
    }
}

fn check_pe(pe: f64) -> Result<()> {
    if pe > 0.0 && pe < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Pe must lie in (0, 1), got {pe}")))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must lie in (0, 1], got {alpha}")))
    }
}

/// `β = ζ/η − 1`, the PA power per watt radiated.
pub fn amplifier_beta(profile: &PowerProfile) -> Result<f64> {
    if !(profile.eta > 0.0) {
        return Err(Error::Domain(format!("eta must be positive, got {}", profile.eta)));
    }
    // Same as ζ/η − 1, but exact whenever ζ − η is.
    Ok((profile.zeta - profile.eta) / profile.eta)
}

/// Transmitter and receiver circuit power, W. The transmitter of a
/// frequency modulator has no DAC and no mixer.
pub fn circuit_powers(profile: &PowerProfile) -> (f64, f64) {
    let tx = profile.p_filt + profile.p_syn;
    let rx = profile.p_adc + profile.p_filt + profile.p_mixer + profile.p_syn + profile.p_lna + profile.p_ifa;
    (tx, rx)
}

/// Received energy per bit needed for error probability `pe`,
/// `(2/α) σ² N_f ln(1/pe)`.
pub fn rx_energy_per_bit(pe: f64, alpha: f64, sigma2: f64, n_f: f64) -> Result<f64> {
    check_pe(pe)?;
    check_alpha(alpha)?;
    Ok(2.0 / alpha * sigma2 * n_f * (1.0 / pe).ln())
}

/// Radiated energy for `l_bits` bits over a link with path gain `g_d`.
pub fn tx_energy_uncoded(pe: f64, alpha: f64, n_f: f64, sigma2: f64, g_d: f64, l_bits: f64) -> Result<f64> {
    Ok(rx_energy_per_bit(pe, alpha, sigma2, n_f)? * g_d * l_bits)
}

pub fn total_energy_uncoded(inputs: &EnergyInputs) -> Result<EnergyBreakdown> {
    inputs.validate()?;
    let beta = amplifier_beta(&inputs.power)?;
    let radiated = radiated_energy(inputs)?;
    let (tx, rx) = circuit_powers(&inputs.power);
    let t_on = inputs.timing.t_on();
    Ok(EnergyBreakdown::assemble(
        radiated,
        beta * radiated,
        (tx + rx) * t_on,
        transient_energy(inputs),
        0.0,
        inputs.timing.l_bits,
    ))
}

pub fn total_energy_coded(
    inputs: &EnergyInputs,
    spec: &CodeSpec,
    codec_power: &CodecPowerProfile,
    variant: Variant,
) -> Result<EnergyBreakdown> {
    inputs.validate()?;
    spec.validate()?;
    codec_power.validate()?;
    if !(spec.rate > 0.0 && spec.rate <= 1.0) {
        return Err(Error::Domain(format!("rate must lie in (0, 1], got {}", spec.rate)));
    }
    let beta = amplifier_beta(&inputs.power)?;
    let radiated = radiated_energy(inputs)? / spec.coding_gain_linear();
    let (tx, rx) = circuit_powers(&inputs.power);
    let t_on = inputs.timing.t_on();
    let t_code = t_on / spec.rate;
    let t_circuit = match variant {
        Variant::Literal => t_code,
        Variant::CircuitUnscaled => t_on,
    };
    Ok(EnergyBreakdown::assemble(
        radiated,
        beta * radiated,
        (tx + rx) * t_circuit,
        transient_energy(inputs),
        codec_power.total() * t_code,
        inputs.timing.l_bits,
    ))
}

fn radiated_energy(inputs: &EnergyInputs) -> Result<f64> {
    tx_energy_uncoded(
        inputs.pe,
        inputs.alpha,
        inputs.link.n_f,
        inputs.link.sigma2,
        path_gain(&inputs.link),
        inputs.timing.l_bits,
    )
}

/// Synthesizers at both ends settling once per transmission.
fn transient_energy(inputs: &EnergyInputs) -> f64 {
    2.0 * inputs.power.p_syn * inputs.timing.t_start
}

/// `1 − coded/uncoded`.
pub fn savings(uncoded: &EnergyBreakdown, coded: &EnergyBreakdown) -> f64 {
    1.0 - coded.e_total / uncoded.e_total
}

/// Distance at which coded and uncoded per-bit energies are equal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossover {
    At(f64),
    /// Coded is cheaper over the whole search range.
    CodedAlwaysCheaper,
    /// Coded is never cheaper within the search range.
    CodedNeverCheaper,
}

impl Crossover {
    pub fn distance(&self) -> Option<f64> {
        match self {
            Crossover::At(d) => Some(*d),
            _ => None,
        }
    }
}

pub const CROSSOVER_SEARCH_RANGE_M: (f64, f64) = (0.1, 1e4);

/// Bisection (in log distance) on the coded-minus-uncoded energy
/// difference, which is monotone in distance.
pub fn crossover_distance(
    inputs: &EnergyInputs,
    spec: &CodeSpec,
    codec_power: &CodecPowerProfile,
    variant: Variant,
) -> Result<Crossover> {
    let diff = |d: f64| -> Result<f64> {
        let at = inputs.at_distance(d);
        Ok(total_energy_coded(&at, spec, codec_power, variant)?.e_per_info_bit
            - total_energy_uncoded(&at)?.e_per_info_bit)
    };
    let (lo, hi) = CROSSOVER_SEARCH_RANGE_M;
    let (f_lo, f_hi) = (diff(lo)?, diff(hi)?);
    if f_lo < 0.0 && f_hi < 0.0 {
        return Ok(Crossover::CodedAlwaysCheaper);
    }
    if f_lo >= 0.0 && f_hi >= 0.0 {
        return Ok(Crossover::CodedNeverCheaper);
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let f_mid = diff(mid.exp())?;
        if (f_mid < 0.0) == (f_lo < 0.0) {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-14 {
            break;
        }
    }
    Ok(Crossover::At((0.5 * (a + b)).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fec::CodeKind;

    fn defaults() -> EnergyInputs {
        EnergyInputs {
            power: PowerProfile::default(),
            timing: TimingProfile::default(),
            link: LinkBudget::default(),
            pe: 1e-4,
            alpha: 0.68,
        }
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        ((a - b) / b).abs() <= rel
    }

    #[test]
    fn beta_values() {
        let mut p = PowerProfile::default();
        assert_eq!(amplifier_beta(&p).unwrap(), 1.0 / 3.0);
        p.eta = 1.0;
        assert_eq!(amplifier_beta(&p).unwrap(), 0.0);
        p.eta = 0.5;
        p.zeta = 2.0;
        assert_eq!(amplifier_beta(&p).unwrap(), 3.0);
        p.eta = 0.0;
        assert!(matches!(amplifier_beta(&p), Err(Error::Domain(_))));
    }

    #[test]
    fn circuit_power_sums() {
        let (tx, rx) = circuit_powers(&PowerProfile::default());
        assert!(close(tx, 52.5e-3, 1e-12));
        assert!(close(rx, 112.5e-3, 1e-12));
        assert!(close(tx + rx, 165e-3, 1e-12));
        assert_eq!(circuit_powers(&PowerProfile::ZERO_CIRCUITS), (0.0, 0.0));
        let only_syn = PowerProfile { p_syn: 50e-3, ..PowerProfile::ZERO_CIRCUITS };
        assert_eq!(circuit_powers(&only_syn).0, 50e-3);
    }

    #[test]
    fn rx_energy_values() {
        let e = rx_energy_per_bit(1e-4, 0.68, 3.981e-21, 10.0).unwrap();
        // (2 / 0.68) * 3.981e-21 * 10 * ln(1e4)
        assert!(close(e, 1.078_418e-18, 1e-5), "{e}");
        assert!(rx_energy_per_bit(1.0 - 1e-16, 0.68, 3.981e-21, 10.0).unwrap() < 1e-33);
        let half = rx_energy_per_bit(1e-4, 0.34, 3.981e-21, 10.0).unwrap();
        assert!(close(half, 2.0 * e, 1e-12));
        assert!(rx_energy_per_bit(0.0, 0.68, 3.981e-21, 10.0).is_err());
        assert!(rx_energy_per_bit(1.0, 0.68, 3.981e-21, 10.0).is_err());
    }

    #[test]
    fn tx_energy_values() {
        let e = tx_energy_uncoded(1e-4, 0.68, 10.0, 3.981e-21, 1e13, 1e3).unwrap();
        assert!(close(e, 1.078_418e-2, 1e-5));
        assert_eq!(tx_energy_uncoded(1e-4, 0.68, 10.0, 3.981e-21, 1e13, 0.0).unwrap(), 0.0);
        let doubled = tx_energy_uncoded(1e-4, 0.68, 10.0, 3.981e-21, 2e13, 1e3).unwrap();
        assert!(close(doubled, 2.0 * e, 1e-12));
        let rx = rx_energy_per_bit(1e-4, 0.68, 3.981e-21, 10.0).unwrap();
        assert_eq!(e, rx * 1e13 * 1e3);
    }

    #[test]
    fn uncoded_breakdown_defaults() {
        let b = total_energy_uncoded(&defaults()).unwrap();
        assert!(close(b.e_tx_radiated + b.e_pa_overhead, 4.0 / 3.0 * 1.078_418e-2, 1e-5));
        assert!(close(b.e_circuit, 1.65e-2, 1e-12));
        assert!(close(b.e_transient, 5e-7, 1e-12));
        assert_eq!(b.e_codec, 0.0);
        assert_eq!(b.e_per_info_bit * 1e3, b.e_total);
        let sum = b.e_tx_radiated + b.e_pa_overhead + b.e_circuit + b.e_transient + b.e_codec;
        assert!(close(b.e_total, sum, 1e-12));
    }

    #[test]
    fn uncoded_reduces_to_radiated_without_circuits() {
        let inputs = EnergyInputs {
            power: PowerProfile::ZERO_CIRCUITS,
            timing: TimingProfile { t_start: 0.0, ..TimingProfile::default() },
            ..defaults()
        };
        let b = total_energy_uncoded(&inputs).unwrap();
        let tx = tx_energy_uncoded(1e-4, 0.68, 10.0, 3.981e-21, 1e13, 1e3).unwrap();
        assert!(close(b.e_total, (1.0 + 1.0 / 3.0) * tx, 1e-12));
    }

    #[test]
    fn degenerate_code_equals_uncoded() {
        let spec = CodeSpec { rate: 1.0, n: 1, k: 1, ..CodeSpec::golay(0.0) };
        for variant in Variant::ALL {
            let c = total_energy_coded(&defaults(), &spec, &CodecPowerProfile::ZERO, variant).unwrap();
            let u = total_energy_uncoded(&defaults()).unwrap();
            assert!(close(c.e_total, u.e_total, 1e-14));
        }
    }

    #[test]
    fn golay_breakdown_defaults() {
        let spec = CodeSpec::golay(4.0);
        let u = total_energy_uncoded(&defaults()).unwrap();
        let c = total_energy_coded(&defaults(), &spec, &CodecPowerProfile::default(), Variant::Literal).unwrap();
        let g = 10f64.powf(0.4);
        assert!(close(c.e_tx_radiated + c.e_pa_overhead, (u.e_tx_radiated + u.e_pa_overhead) / g, 1e-12));
        assert!(close(c.e_circuit, 2.0 * u.e_circuit, 1e-12));
        assert!(close(c.e_codec, 63e-3 * 0.2, 1e-12));
        assert_eq!(c.e_transient, u.e_transient);
        let cu = total_energy_coded(&defaults(), &spec, &CodecPowerProfile::default(), Variant::CircuitUnscaled)
            .unwrap();
        assert!(close(cu.e_circuit, u.e_circuit, 1e-12));
        assert_eq!(cu.e_codec, c.e_codec);
    }

    #[test]
    fn savings_increase_beyond_crossover() {
        let spec = CodeSpec::golay(4.0);
        for variant in Variant::ALL {
            let x = crossover_distance(&defaults(), &spec, &CodecPowerProfile::default(), variant).unwrap();
            let d_star = x.distance().expect("crossing");
            let mut last = f64::NEG_INFINITY;
            for d in 1..=200 {
                let at = defaults().at_distance(d as f64);
                let u = total_energy_uncoded(&at).unwrap();
                let c = total_energy_coded(&at, &spec, &CodecPowerProfile::default(), variant).unwrap();
                let s = savings(&u, &c);
                assert!(s > last);
                last = s;
                assert_eq!(s > 0.0, (d as f64) > d_star, "{variant} d = {d}");
            }
        }
    }

    #[test]
    fn crossover_edge_cases() {
        let never = crossover_distance(
            &defaults(),
            &CodeSpec::golay(0.0),
            &CodecPowerProfile::default(),
            Variant::Literal,
        )
        .unwrap();
        assert_eq!(never, Crossover::CodedNeverCheaper);

        let radiated_only = EnergyInputs { power: PowerProfile::ZERO_CIRCUITS, ..defaults() };
        let always = crossover_distance(
            &radiated_only,
            &CodeSpec::golay(4.0),
            &CodecPowerProfile::ZERO,
            Variant::Literal,
        )
        .unwrap();
        assert_eq!(always, Crossover::CodedAlwaysCheaper);
    }

    #[test]
    fn crossover_balances_energies() {
        let spec = CodeSpec::golay(4.0);
        let codec = CodecPowerProfile::default();
        let d = crossover_distance(&defaults(), &spec, &codec, Variant::CircuitUnscaled)
            .unwrap()
            .distance()
            .unwrap();
        // closed form: (2/α)(1+β)N_f σ² ln(1/Pe) G_l M_l d³ (1 − 1/G) = codec energy / L
        let a = total_energy_uncoded(&defaults().at_distance(1.0)).unwrap();
        let per_d3 = (a.e_tx_radiated + a.e_pa_overhead) / 1e3;
        let expected = (63e-3 * 0.2 / 1e3 / (per_d3 * (1.0 - 1.0 / spec.coding_gain_linear()))).cbrt();
        assert!(close(d, expected, 1e-9), "{d} vs {expected}");
    }

    #[test]
    fn asymptotic_limits() {
        let u_small = total_energy_uncoded(&defaults().at_distance(1e-3)).unwrap();
        let floor = (0.165 * 0.1 + 5e-7) / 1e3;
        assert!(close(u_small.e_per_info_bit, floor, 1e-3));

        let e3 = total_energy_uncoded(&defaults().at_distance(1e3)).unwrap().e_per_info_bit;
        let e4 = total_energy_uncoded(&defaults().at_distance(1e4)).unwrap().e_per_info_bit;
        let slope = (e4 / e3).log10();
        assert!((slope - 3.0).abs() < 0.03, "{slope}");
    }

    #[test]
    fn length_scaling() {
        let base = total_energy_uncoded(&defaults()).unwrap();
        let mut inputs = defaults();
        inputs.timing.l_bits *= 4.0;
        let scaled = total_energy_uncoded(&inputs).unwrap();
        assert!(close(scaled.e_tx_radiated, 4.0 * base.e_tx_radiated, 1e-12));
        assert!(close(scaled.e_tx_radiated / 4e3, base.e_tx_radiated / 1e3, 1e-12));
    }

    #[test]
    fn difference_is_monotone() {
        let spec = CodeSpec::default_for(CodeKind::ReedSolomon);
        let codec = CodecPowerProfile::default();
        let mut last = f64::INFINITY;
        for i in 0..100 {
            let d = 10f64.powf(-1.0 + 5.0 * i as f64 / 99.0);
            let at = defaults().at_distance(d);
            let diff = total_energy_coded(&at, &spec, &codec, Variant::Literal).unwrap().e_total
                - total_energy_uncoded(&at).unwrap().e_total;
            assert!(diff <= last);
            last = diff;
        }
    }

    #[test]
    fn validation() {
        let mut bad = defaults();
        bad.pe = 0.0;
        assert!(total_energy_uncoded(&bad).is_err());
        let mut bad = defaults();
        bad.power.p_syn = -1.0;
        assert!(total_energy_uncoded(&bad).is_err());
        assert!("literal".parse::<Variant>().is_ok());
        assert!("both".parse::<Variant>().is_err());
        assert!((TimingProfile::default().t_on() - 0.1).abs() < 1e-15);
    }
}
