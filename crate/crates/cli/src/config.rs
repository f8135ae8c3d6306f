//! Run configuration: TOML with one table per concern and units in key names.
//! Every key is optional and defaults to the shipped parameter file.

use std::path::{Path, PathBuf};

use gmsk_wsn::channel::LinkBudget;
use gmsk_wsn::energy::{EnergyInputs, PowerProfile, TimingProfile, Variant};
use gmsk_wsn::fec::{CodeKind, CodeSpec, CodecPowerProfile};
use gmsk_wsn::gmsk::{alpha_for_bt, db_to_linear, ModemConfig};
use gmsk_wsn::link_sim::{EbnoAxis, StopRule};
use gmsk_wsn::net_sim::TopologyMode;
use gmsk_wsn::{Error, Result};
use serde::Deserialize;

/// The shipped parameter file.
pub const DEFAULT_TOML: &str = include_str!("../params/default.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantChoice {
    Literal,
    CircuitUnscaled,
    #[default]
    Both,
}

impl VariantChoice {
    pub fn variants(self) -> Vec<Variant> {
        match self {
            VariantChoice::Literal => vec![Variant::Literal],
            VariantChoice::CircuitUnscaled => vec![Variant::CircuitUnscaled],
            VariantChoice::Both => Variant::ALL.to_vec(),
        }
    }
}

impl std::str::FromStr for VariantChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(VariantChoice::Literal),
            "circuit-unscaled" => Ok(VariantChoice::CircuitUnscaled),
            "both" => Ok(VariantChoice::Both),
            other => Err(Error::Parse(format!(
                "unknown variant '{other}' (expected literal, circuit-unscaled or both)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub variant: VariantChoice,
    pub out_dir: PathBuf,
    pub modem: ModemSection,
    pub radio: RadioSection,
    pub link: LinkSection,
    pub power: PowerSection,
    pub codec: CodecSection,
    pub ber_sweep: BerSweepSection,
    pub energy_distance: EnergyDistanceSection,
    pub route_sim: RouteSimSection,
    pub codec_test: CodecTestSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            variant: VariantChoice::Both,
            out_dir: PathBuf::from("out"),
            modem: ModemSection::default(),
            radio: RadioSection::default(),
            link: LinkSection::default(),
            power: PowerSection::default(),
            codec: CodecSection::default(),
            ber_sweep: BerSweepSection::default(),
            energy_distance: EnergyDistanceSection::default(),
            route_sim: RouteSimSection::default(),
            codec_test: CodecTestSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModemSection {
    pub bt_product: f64,
    pub samples_per_symbol: usize,
    pub pulse_span_symbols: usize,
}

impl Default for ModemSection {
    fn default() -> Self {
        let m = ModemConfig::default();
        Self {
            bt_product: m.bt_product,
            samples_per_symbol: m.samples_per_symbol,
            pulse_span_symbols: m.pulse_span_symbols,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioSection {
    pub t_start_s: f64,
    /// Listed for completeness; energy uses `l_bits / bandwidth_hz` as the on time.
    pub t_period_s: f64,
    pub l_bits: u64,
    /// Channel bandwidth, also the bit rate.
    pub bandwidth_hz: f64,
    pub carrier_hz: f64,
    pub pe: f64,
    /// Overrides the BT-dependent value when set.
    pub alpha: Option<f64>,
}

impl Default for RadioSection {
    fn default() -> Self {
        Self {
            t_start_s: 5e-6,
            t_period_s: 1.07,
            l_bits: 1000,
            bandwidth_hz: 1e4,
            carrier_hz: 2.45e9,
            pe: 1e-4,
            alpha: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkSection {
    pub sigma2_w_per_hz: f64,
    pub k_exp: f64,
    pub g_l: f64,
    pub m_l: f64,
    pub n_f_db: f64,
}

impl Default for LinkSection {
    fn default() -> Self {
        Self {
            sigma2_w_per_hz: 3.981e-21,
            k_exp: 3.0,
            g_l: 1e3,
            m_l: 1e4,
            n_f_db: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PowerSection {
    pub eta: f64,
    pub zeta: f64,
    pub p_adc_mw: f64,
    pub p_dac_mw: f64,
    pub p_filt_mw: f64,
    pub p_syn_mw: f64,
    pub p_lna_mw: f64,
    pub p_ifa_mw: f64,
    pub p_mixer_mw: f64,
    pub p_enc_mw: f64,
    pub p_dec_mw: f64,
}

impl Default for PowerSection {
    fn default() -> Self {
        Self {
            eta: 0.75,
            zeta: 1.0,
            p_adc_mw: 6.70,
            p_dac_mw: 15.40,
            p_filt_mw: 2.5,
            p_syn_mw: 50.0,
            p_lna_mw: 20.0,
            p_ifa_mw: 3.0,
            p_mixer_mw: 30.3,
            p_enc_mw: 28.0,
            p_dec_mw: 35.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CodecSection {
    /// Codecs for `ber-sweep` and `codec-test`: none, golay, rs, conv.
    pub codecs: Vec<String>,
    /// Code used by `energy-distance` and `route-sim`.
    pub energy_codec: String,
    pub g_code_db: f64,
    pub rs_n: usize,
    pub rs_k: usize,
    pub rs_symbol_bits: u32,
}

impl Default for CodecSection {
    fn default() -> Self {
        Self {
            codecs: CodeKind::ALL.iter().map(|k| k.label().to_string()).collect(),
            energy_codec: "golay".into(),
            g_code_db: 4.0,
            rs_n: 15,
            rs_k: 11,
            rs_symbol_bits: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisChoice {
    #[default]
    InfoBit,
    ChannelBit,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BerSweepSection {
    pub ebno_start_db: f64,
    pub ebno_stop_db: f64,
    pub ebno_step_db: f64,
    pub min_bit_errors: u64,
    pub max_bits: u64,
    pub frame_bits: usize,
    pub axis: AxisChoice,
}

impl Default for BerSweepSection {
    fn default() -> Self {
        let rule = StopRule::default();
        Self {
            ebno_start_db: 0.0,
            ebno_stop_db: 10.0,
            ebno_step_db: 1.0,
            min_bit_errors: rule.min_bit_errors,
            max_bits: rule.max_bits,
            frame_bits: gmsk_wsn::link_sim::DEFAULT_FRAME_BITS,
            axis: AxisChoice::InfoBit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergyDistanceSection {
    pub d_start_m: f64,
    pub d_stop_m: f64,
    pub d_step_m: f64,
    /// Distance at which savings are reported.
    pub report_distance_m: f64,
    /// Savings figure the sensitivity report ranks combinations against.
    pub reference_savings: f64,
}

impl Default for EnergyDistanceSection {
    fn default() -> Self {
        Self {
            d_start_m: 1.0,
            d_stop_m: 200.0,
            d_step_m: 1.0,
            report_distance_m: 100.0,
            reference_savings: 0.47,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RouteSimSection {
    pub trials: usize,
    pub n_nodes: usize,
    pub field_width_m: f64,
    pub field_height_m: f64,
    pub max_hop_m: f64,
    pub replication_hops: usize,
    pub hop_min_m: f64,
    pub hop_max_m: f64,
    /// Charge the synthesizer start-up energy on every hop.
    pub transient_per_hop: bool,
}

impl Default for RouteSimSection {
    fn default() -> Self {
        Self {
            trials: 1000,
            n_nodes: 20,
            field_width_m: 100.0,
            field_height_m: 100.0,
            max_hop_m: 100.0,
            replication_hops: 4,
            hop_min_m: 50.0,
            hop_max_m: 100.0,
            transient_per_hop: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CodecTestSection {
    pub rs_trials: usize,
    pub rs_weight3_trials: usize,
    pub viterbi_trials: usize,
}

impl Default for CodecTestSection {
    fn default() -> Self {
        Self {
            rs_trials: 100_000,
            rs_weight3_trials: 1000,
            viterbi_trials: 10_000,
        }
    }
}

/// Evenly spaced grid `start, start + step, …` up to `stop` inclusive
/// (within a small tolerance), computed without accumulating round-off.
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::Config(format!("bad grid {start}..{stop} step {step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    if n > 1_000_000 {
        return Err(Error::Config("grid has too many points".into()));
    }
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.modem_config().validate()?;
        self.energy_inputs().validate()?;
        self.codec_power().validate()?;
        self.codec_kinds()?;
        self.energy_spec()?;
        for kind in CodeKind::ALL {
            self.code_spec(kind)?.validate()?;
        }
        self.ebno_grid()?;
        self.distance_grid()?;
        self.stop_rule_checked()?;
        let r = &self.route_sim;
        if r.trials == 0 {
            return Err(Error::Config("route_sim.trials must be >= 1".into()));
        }
        if !(r.hop_min_m > 0.0 && r.hop_min_m <= r.hop_max_m) || r.replication_hops == 0 {
            return Err(Error::Config("route_sim hop range must satisfy 0 < min <= max".into()));
        }
        if r.n_nodes < 2 || !(r.max_hop_m > 0.0) {
            return Err(Error::Config("route_sim needs >= 2 nodes and a positive max hop".into()));
        }
        if !(self.energy_distance.report_distance_m > 0.0) {
            return Err(Error::Config("report_distance_m must be positive".into()));
        }
        Ok(())
    }

    pub fn modem_config(&self) -> ModemConfig {
        ModemConfig {
            bt_product: self.modem.bt_product,
            samples_per_symbol: self.modem.samples_per_symbol,
            pulse_span_symbols: self.modem.pulse_span_symbols,
            bit_rate: self.radio.bandwidth_hz,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.radio.alpha.unwrap_or_else(|| alpha_for_bt(self.modem.bt_product))
    }

    pub fn power_profile(&self) -> PowerProfile {
        let p = &self.power;
        PowerProfile {
            p_adc: p.p_adc_mw * 1e-3,
            p_dac: p.p_dac_mw * 1e-3,
            p_filt: p.p_filt_mw * 1e-3,
            p_syn: p.p_syn_mw * 1e-3,
            p_lna: p.p_lna_mw * 1e-3,
            p_ifa: p.p_ifa_mw * 1e-3,
            p_mixer: p.p_mixer_mw * 1e-3,
            eta: p.eta,
            zeta: p.zeta,
        }
    }

    pub fn codec_power(&self) -> CodecPowerProfile {
        CodecPowerProfile {
            p_enc: self.power.p_enc_mw * 1e-3,
            p_dec: self.power.p_dec_mw * 1e-3,
        }
    }

    pub fn energy_inputs(&self) -> EnergyInputs {
        EnergyInputs {
            power: self.power_profile(),
            timing: TimingProfile {
                t_start: self.radio.t_start_s,
                l_bits: self.radio.l_bits as f64,
                bit_rate: self.radio.bandwidth_hz,
                t_stby: 0.0,
            },
            link: LinkBudget {
                g_l: self.link.g_l,
                m_l: self.link.m_l,
                k_exp: self.link.k_exp,
                distance_m: self.energy_distance.report_distance_m,
                n_f: db_to_linear(self.link.n_f_db),
                sigma2: self.link.sigma2_w_per_hz,
            },
            pe: self.radio.pe,
            alpha: self.alpha(),
        }
    }

    pub fn code_spec(&self, kind: CodeKind) -> Result<CodeSpec> {
        let g = self.codec.g_code_db;
        Ok(match kind {
            CodeKind::None => CodeSpec::none(),
            CodeKind::Golay => CodeSpec::golay(g),
            CodeKind::ReedSolomon => {
                CodeSpec::reed_solomon(self.codec.rs_n, self.codec.rs_k, self.codec.rs_symbol_bits, g)?
            }
            CodeKind::Convolutional => CodeSpec::convolutional(g),
        })
    }

    pub fn codec_kinds(&self) -> Result<Vec<CodeKind>> {
        if self.codec.codecs.is_empty() {
            return Err(Error::Config("codec list is empty".into()));
        }
        let mut kinds = Vec::new();
        for name in &self.codec.codecs {
            let k: CodeKind = name.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
            if !kinds.contains(&k) {
                kinds.push(k);
            }
        }
        Ok(kinds)
    }

    pub fn energy_spec(&self) -> Result<CodeSpec> {
        let kind: CodeKind = self
            .codec
            .energy_codec
            .parse()
            .map_err(|e: Error| Error::Config(e.to_string()))?;
        if kind == CodeKind::None {
            return Err(Error::Config("energy_codec must name a code".into()));
        }
        self.code_spec(kind)
    }

    pub fn ebno_grid(&self) -> Result<Vec<f64>> {
        let b = &self.ber_sweep;
        grid(b.ebno_start_db, b.ebno_stop_db, b.ebno_step_db)
    }

    pub fn distance_grid(&self) -> Result<Vec<f64>> {
        let e = &self.energy_distance;
        let g = grid(e.d_start_m, e.d_stop_m, e.d_step_m)?;
        if g[0] <= 0.0 {
            return Err(Error::Config("distances must be positive".into()));
        }
        Ok(g)
    }

    fn stop_rule_checked(&self) -> Result<StopRule> {
        let b = &self.ber_sweep;
        if b.min_bit_errors == 0 || b.max_bits == 0 || b.frame_bits == 0 {
            return Err(Error::Config("ber_sweep stop rule and frame size must be >= 1".into()));
        }
        Ok(StopRule {
            min_bit_errors: b.min_bit_errors,
            max_bits: b.max_bits,
        })
    }

    pub fn stop_rule(&self) -> StopRule {
        StopRule {
            min_bit_errors: self.ber_sweep.min_bit_errors,
            max_bits: self.ber_sweep.max_bits,
        }
    }

    pub fn axis(&self) -> EbnoAxis {
        match self.ber_sweep.axis {
            AxisChoice::InfoBit => EbnoAxis::InfoBit,
            AxisChoice::ChannelBit => EbnoAxis::ChannelBit,
        }
    }

    pub fn geometry_mode(&self) -> TopologyMode {
        let r = &self.route_sim;
        TopologyMode::Geometry {
            n_nodes: r.n_nodes,
            width: r.field_width_m,
            height: r.field_height_m,
            max_hop_m: r.max_hop_m,
        }
    }

    pub fn replication_mode(&self) -> TopologyMode {
        let r = &self.route_sim;
        TopologyMode::Replication {
            hops: r.replication_hops,
            min_hop_m: r.hop_min_m,
            max_hop_m: r.hop_max_m,
        }
    }

    /// Reduced workloads for smoke runs; still deterministic.
    pub fn apply_quick(&mut self) {
        self.ber_sweep.max_bits = self.ber_sweep.max_bits.min(100_000);
        self.ber_sweep.min_bit_errors = self.ber_sweep.min_bit_errors.min(50);
        self.route_sim.trials = self.route_sim.trials.min(100);
        self.codec_test.rs_trials = self.codec_test.rs_trials.min(5_000);
        self.codec_test.rs_weight3_trials = self.codec_test.rs_weight3_trials.min(100);
        self.codec_test.viterbi_trials = self.codec_test.viterbi_trials.min(500);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_file_equals_defaults() {
        assert_eq!(RunConfig::from_toml(DEFAULT_TOML).unwrap(), RunConfig::default());
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn shipped_file_converts_to_si() {
        let cfg = RunConfig::from_toml(DEFAULT_TOML).unwrap();
        let e = cfg.energy_inputs();
        assert_eq!(e.power, PowerProfile::default());
        assert_eq!(e.timing, TimingProfile::default());
        assert_eq!(e.link, LinkBudget::default());
        assert_eq!(cfg.codec_power(), CodecPowerProfile::default());
        assert_eq!(e.pe, 1e-4);
        assert!((cfg.alpha() - 0.714).abs() < 1e-12);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml("sed = 3").is_err());
        assert!(RunConfig::from_toml("[power]\np_syn = 50").is_err());
        assert!(RunConfig::from_toml("[nope]\n").is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(RunConfig::from_toml("[power]\neta = 0").is_err());
        assert!(RunConfig::from_toml("[codec]\ncodecs = [\"turbo\"]").is_err());
        assert!(RunConfig::from_toml("[codec]\nenergy_codec = \"none\"").is_err());
        assert!(RunConfig::from_toml("[ber_sweep]\nebno_step_db = 0").is_err());
        assert!(RunConfig::from_toml("[modem]\nsamples_per_symbol = 3").is_err());
        assert!(RunConfig::from_toml("variant = \"neither\"").is_err());
        assert!(RunConfig::from_toml("[route_sim]\ntrials = 0").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(grid(0.0, 10.0, 1.0).unwrap().len(), 11);
        let g = grid(1.0, 200.0, 1.0).unwrap();
        assert_eq!((g[0], g[199], g.len()), (1.0, 200.0, 200));
        assert_eq!(grid(0.0, 1.0, 0.1).unwrap().len(), 11);
        assert!(grid(1.0, 0.0, 1.0).is_err());
    }
}
