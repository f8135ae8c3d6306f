//! Monte Carlo BER over the full chain: random bits, encoder, GMSK modulator,
//! AWGN, demodulator, decoder.
//!
//! A point at `ebno_db` draws frame `i` from substream `i` of
//! `substream_seed(seed, ebno_db.to_bits())`, so a point does not depend on
//! which other points share the sweep, and frames may be simulated in any
//! order or concurrently. Frames are accumulated strictly in index order and
//! the stop rule is checked after every frame.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{awgn_with_rng, substream, substream_seed, ChannelConfig};
use crate::error::{Error, Result};
use crate::fec::{CodeKind, CodeSpec, Codec};
use crate::gmsk::{theoretical_ber, GmskModem, ModemConfig};

/// Information bits per frame; a whole number of Golay and RS(15, 11) blocks.
pub const DEFAULT_FRAME_BITS: usize = 1056;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub min_bit_errors: u64,
    pub max_bits: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_bit_errors: 200,
            max_bits: 10_000_000,
        }
    }
}

/// Which energy the Eb/N0 axis refers to for coded curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EbnoAxis {
    /// Energy per information bit; a rate-R code sees `R·Eb/N0` per channel bit.
    #[default]
    InfoBit,
    ChannelBit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub ebno_points: Vec<f64>,
    pub codec: CodeSpec,
    pub modem: ModemConfig,
    pub stop_rule: StopRule,
    pub seed: u64,
    pub axis: EbnoAxis,
    pub frame_bits: usize,
}

impl SweepSpec {
    pub fn new(ebno_points: Vec<f64>, codec: CodeSpec, seed: u64) -> Self {
        Self {
            ebno_points,
            codec,
            modem: ModemConfig::default(),
            stop_rule: StopRule::default(),
            seed,
            axis: EbnoAxis::default(),
            frame_bits: DEFAULT_FRAME_BITS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.modem.validate()?;
        self.codec.validate()?;
        if self.frame_bits == 0 {
            return Err(Error::Config("frame_bits must be >= 1".into()));
        }
        if self.stop_rule.max_bits == 0 {
            return Err(Error::Config("max_bits must be >= 1".into()));
        }
        if self.ebno_points.iter().any(|e| e.is_nan()) {
            return Err(Error::Config("Eb/N0 points must be numbers".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub ebno_db: f64,
    pub measured_ber: f64,
    pub bit_errors: u64,
    pub bits_simulated: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// The stop rule ended on `max_bits` before `min_bit_errors` was reached.
    pub low_confidence: bool,
    /// Errors before decoding, over `channel_bits` coded bits.
    pub channel_bit_errors: u64,
    pub channel_bits: u64,
    pub failed_blocks: u64,
}

impl BerPoint {
    pub fn channel_ber(&self) -> f64 {
        if self.channel_bits == 0 {
            0.0
        } else {
            self.channel_bit_errors as f64 / self.channel_bits as f64
        }
    }
}

/// 95% Wilson score interval for `errors` successes in `trials`.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

#[derive(Debug, Clone, Copy, Default)]
struct FrameTally {
    info_errors: u64,
    channel_errors: u64,
    channel_bits: u64,
    failed_blocks: u64,
}

struct Link {
    modem: GmskModem,
    codec: Codec,
    noise_variance: f64,
    frame_bits: usize,
}

impl Link {
    fn new(spec: &SweepSpec, ebno_db: f64) -> Result<Self> {
        let code_rate = match spec.axis {
            EbnoAxis::InfoBit => spec.codec.rate,
            EbnoAxis::ChannelBit => 1.0,
        };
        let channel = ChannelConfig {
            ebno_db,
            code_rate,
            samples_per_symbol: spec.modem.samples_per_symbol,
            seed: 0,
        };
        channel.validate()?;
        Ok(Self {
            modem: GmskModem::new(spec.modem)?,
            codec: Codec::new(spec.codec)?,
            noise_variance: channel.noise_variance(),
            frame_bits: spec.frame_bits,
        })
    }

    fn frame(&self, point_seed: u64, index: u64) -> Result<FrameTally> {
        let mut rng = substream(point_seed, index);
        let info: Vec<u8> = (0..self.frame_bits).map(|_| rng.random_range(0..2u8)).collect();
        let encoded = self.codec.apply(&info)?;
        let tx = self.modem.modulate(&encoded.bits)?;
        let rx = awgn_with_rng(&tx, self.noise_variance, &mut rng);
        let hard = self.modem.demodulate(&rx, encoded.bits.len())?;
        let stripped = self.codec.strip(&hard, info.len())?;
        Ok(FrameTally {
            info_errors: count_diff(&info, &stripped.bits),
            channel_errors: count_diff(&encoded.bits, &hard),
            channel_bits: encoded.bits.len() as u64,
            failed_blocks: stripped.failed_blocks as u64,
        })
    }
}

fn count_diff(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

/// Seed of the point at `ebno_db` under a sweep seed.
pub fn point_seed(seed: u64, ebno_db: f64) -> u64 {
    substream_seed(seed, ebno_db.to_bits())
}

pub fn run_point(spec: &SweepSpec, ebno_db: f64) -> Result<BerPoint> {
    spec.validate()?;
    let link = Link::new(spec, ebno_db)?;
    let seed = point_seed(spec.seed, ebno_db);
    let rule = spec.stop_rule;
    let frame_bits = spec.frame_bits as u64;
    let max_frames = rule.max_bits.div_ceil(frame_bits);
    let batch = (4 * rayon::current_num_threads()).max(8) as u64;

    let mut total = FrameTally::default();
    let mut bits = 0u64;
    let mut next = 0u64;
    'outer: while next < max_frames {
        let end = (next + batch).min(max_frames);
        let tallies: Vec<Result<FrameTally>> =
            (next..end).into_par_iter().map(|i| link.frame(seed, i)).collect();
        for tally in tallies {
            let t = tally?;
            total.info_errors += t.info_errors;
            total.channel_errors += t.channel_errors;
            total.channel_bits += t.channel_bits;
            total.failed_blocks += t.failed_blocks;
            bits += frame_bits;
            if total.info_errors >= rule.min_bit_errors {
                break 'outer;
            }
        }
        next = end;
    }

    let (ci_low, ci_high) = wilson_interval(total.info_errors, bits);
    Ok(BerPoint {
        ebno_db,
        measured_ber: total.info_errors as f64 / bits as f64,
        bit_errors: total.info_errors,
        bits_simulated: bits,
        ci_low,
        ci_high,
        low_confidence: total.info_errors < rule.min_bit_errors,
        channel_bit_errors: total.channel_errors,
        channel_bits: total.channel_bits,
        failed_blocks: total.failed_blocks,
    })
}

/// One point per Eb/N0 value, sorted by Eb/N0.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<BerPoint>> {
    let mut grid = spec.ebno_points.clone();
    grid.sort_by(f64::total_cmp);
    grid.iter().map(|&e| run_point(spec, e)).collect()
}

/// BER at which two curves on the same Eb/N0 grid cross, by linear
/// interpolation of `log10 BER` between the bracketing points. Points where
/// either curve has no errors are skipped. Returns the first strict crossing.
pub fn crossover_ber(coded: &[BerPoint], uncoded: &[BerPoint]) -> Result<Option<f64>> {
    if coded.len() != uncoded.len() {
        return Err(Error::Length {
            expected: uncoded.len(),
            got: coded.len(),
        });
    }
    if coded.iter().zip(uncoded).any(|(c, u)| c.ebno_db != u.ebno_db) {
        return Err(Error::Config("curves must share an Eb/N0 grid".into()));
    }
    let logs: Vec<(f64, f64)> = coded
        .iter()
        .zip(uncoded)
        .filter(|(c, u)| c.measured_ber > 0.0 && u.measured_ber > 0.0)
        .map(|(c, u)| (c.measured_ber.log10(), u.measured_ber.log10()))
        .collect();
    // A point where the curves touch counts only if they swap order across it.
    let mut last: Option<(f64, f64)> = None;
    let mut touch: Option<f64> = None;
    for &(c, u) in &logs {
        let d = c - u;
        if d == 0.0 {
            touch.get_or_insert(u);
            continue;
        }
        if let Some((d0, u0)) = last {
            if d0 * d < 0.0 {
                if let Some(at) = touch {
                    return Ok(Some(10f64.powf(at)));
                }
                let t = d0 / (d0 - d);
                return Ok(Some(10f64.powf(u0 + t * (u - u0))));
            }
        }
        last = Some((d, u));
        touch = None;
    }
    Ok(None)
}

/// Eb/N0 at which a curve first reaches `target` BER, interpolating
/// `log10 BER` linearly between points. `None` if the curve never gets there.
pub fn ebno_at_ber(curve: &[BerPoint], target: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|p| p.measured_ber > 0.0)
        .map(|p| (p.ebno_db, p.measured_ber.log10()))
        .collect();
    let goal = target.log10();
    pts.windows(2).find_map(|w| {
        let ((e0, b0), (e1, b1)) = (w[0], w[1]);
        (b0 >= goal && b1 <= goal && b0 != b1).then(|| e0 + (goal - b0) / (b1 - b0) * (e1 - e0))
    })
}

/// Post-decoding bit error probability of a bounded-distance decoder fed
/// with channel bit error probability `p`.
///
/// Binary block codes use `Σ_{i>t} (i+t)/n · C(n,i) p^i (1−p)^(n−i)`. For
/// Reed–Solomon the same sum runs over symbol errors with
/// `p_s = 1 − (1−p)^m`, and a symbol error is converted to bit errors with
/// the factor `2^(m−1) / (2^m − 1)`.
pub fn coded_ber_from_channel_ber(spec: &CodeSpec, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability must lie in [0, 1], got {p}")));
    }
    match spec.kind {
        CodeKind::None => Ok(p),
        CodeKind::Convolutional => Err(Error::Config(
            "no semi-analytic estimate for convolutional codes".into(),
        )),
        CodeKind::Golay => Ok(block_error_sum(spec.n, spec.t.unwrap_or(0), p)),
        CodeKind::ReedSolomon => {
            let m = spec.symbol_bits as i32;
            let ps = 1.0 - (1.0 - p).powi(m);
            let per_bit = 2f64.powi(m - 1) / (2f64.powi(m) - 1.0);
            Ok(block_error_sum(spec.n, spec.t.unwrap_or(0), ps) * per_bit)
        }
    }
}

fn block_error_sum(n: usize, t: usize, p: f64) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let mut ln_choose = 0.0;
    let mut sum = 0.0;
    for i in 1..=n {
        ln_choose += ((n - i + 1) as f64).ln() - (i as f64).ln();
        if i > t {
            let term = ln_choose + i as f64 * ln_p + if i < n { (n - i) as f64 * ln_q } else { 0.0 };
            sum += (i + t) as f64 / n as f64 * term.exp();
        }
    }
    sum.min(1.0)
}

/// Semi-analytic coded BER at info-bit `ebno_db`: the channel BER from the
/// Q-function model at `R·Eb/N0`, pushed through
/// [`coded_ber_from_channel_ber`].
pub fn semi_analytic_coded_ber(spec: &CodeSpec, ebno_db: f64, alpha: f64) -> Result<f64> {
    spec.validate()?;
    let channel_db = ebno_db + 10.0 * spec.rate.log10();
    coded_ber_from_channel_ber(spec, theoretical_ber(channel_db, alpha))
}

/// Info-bit Eb/N0 at which [`semi_analytic_coded_ber`] equals `target`, by
/// bisection over [-10, 30] dB. `None` if the target is outside that range.
pub fn semi_analytic_ebno_at_ber(spec: &CodeSpec, target: f64, alpha: f64) -> Result<Option<f64>> {
    if !(target > 0.0 && target < 0.5) {
        return Err(Error::Domain(format!("target BER must lie in (0, 0.5), got {target}")));
    }
    let f = |e: f64| -> Result<f64> { Ok(semi_analytic_coded_ber(spec, e, alpha)? - target) };
    let (mut lo, mut hi) = (-10.0, 30.0);
    if f(lo)? < 0.0 || f(hi)? > 0.0 {
        return Ok(None);
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

pub const CSV_HEADER: &str = "ebno_db,codec,ber,errors,bits,ci_low,ci_high,low_confidence_flag";

pub fn write_csv<W: Write>(mut out: W, codec: &str, points: &[BerPoint]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for p in points {
        write_csv_row(&mut out, codec, p)?;
    }
    Ok(())
}

pub fn write_csv_row<W: Write>(out: &mut W, codec: &str, p: &BerPoint) -> std::io::Result<()> {
    writeln!(
        out,
        "{},{},{:e},{},{},{:e},{:e},{}",
        p.ebno_db,
        codec,
        p.measured_ber,
        p.bit_errors,
        p.bits_simulated,
        p.ci_low,
        p.ci_high,
        u8::from(p.low_confidence)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmsk::alpha_for_bt;

    fn spec(codec: CodeSpec, max_bits: u64) -> SweepSpec {
        SweepSpec {
            stop_rule: StopRule {
                min_bit_errors: 200,
                max_bits,
            },
            ..SweepSpec::new(vec![], codec, 7)
        }
    }

    fn synthetic(points: &[(f64, f64)]) -> Vec<BerPoint> {
        points
            .iter()
            .map(|&(ebno_db, ber)| BerPoint {
                ebno_db,
                measured_ber: ber,
                bit_errors: 1,
                bits_simulated: 1,
                ci_low: ber,
                ci_high: ber,
                low_confidence: false,
                channel_bit_errors: 0,
                channel_bits: 0,
                failed_blocks: 0,
            })
            .collect()
    }

    #[test]
    fn noise_free_limit_is_low_confidence() {
        let p = run_point(&spec(CodeSpec::none(), 100_000), 30.0).unwrap();
        assert_eq!(p.bit_errors, 0);
        assert!(p.bits_simulated >= 100_000);
        assert!(p.low_confidence);
        assert_eq!(p.ci_low, 0.0);
        assert!(p.ci_high > 0.0);
    }

    #[test]
    fn uncoded_tracks_q_function_at_8db() {
        let p = run_point(&spec(CodeSpec::none(), 20_000_000), 8.0).unwrap();
        assert!(p.bit_errors >= 200);
        let theory = theoretical_ber(8.0, alpha_for_bt(0.3));
        let ratio = p.measured_ber / theory;
        assert!((0.25..=4.0).contains(&ratio), "ratio {ratio}");
        assert_eq!(p.channel_bit_errors, p.bit_errors);
    }

    #[test]
    fn golay_loses_at_low_snr() {
        let u = run_point(&spec(CodeSpec::none(), 1_000_000), 0.0).unwrap();
        let g = run_point(&spec(CodeSpec::golay(4.0), 1_000_000), 0.0).unwrap();
        assert!(g.measured_ber > u.measured_ber, "{} vs {}", g.measured_ber, u.measured_ber);
    }

    #[test]
    fn sweep_is_pointwise_and_sorted() {
        let mut s = spec(CodeSpec::golay(4.0), 50_000);
        s.ebno_points = vec![4.0, 1.0, 2.0];
        let sweep = run_sweep(&s).unwrap();
        let grid: Vec<f64> = sweep.iter().map(|p| p.ebno_db).collect();
        assert_eq!(grid, vec![1.0, 2.0, 4.0]);
        assert_eq!(sweep[1], run_point(&s, 2.0).unwrap());
        assert_eq!(run_sweep(&s).unwrap(), sweep);
        s.ebno_points = vec![2.0];
        assert_eq!(run_sweep(&s).unwrap(), vec![sweep[1]]);
    }

    #[test]
    fn ber_decreases_with_snr() {
        let mut s = spec(CodeSpec::none(), 2_000_000);
        s.ebno_points = (0..=8).map(f64::from).collect();
        let sweep = run_sweep(&s).unwrap();
        for w in sweep.windows(2) {
            assert!(w[1].measured_ber <= w[0].measured_ber || w[1].ci_low <= w[0].ci_high);
        }
        for p in &sweep {
            assert!(p.ci_low <= p.measured_ber && p.measured_ber <= p.ci_high);
            assert_eq!(p.measured_ber, p.bit_errors as f64 / p.bits_simulated as f64);
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let s = spec(CodeSpec::default_for(CodeKind::Convolutional), 200_000);
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_point(&s, 3.0).unwrap());
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_point(&s, 3.0).unwrap());
        assert_eq!(serial, parallel);
    }

    #[test]
    fn wilson_interval_properties() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.036_994).abs() < 1e-5, "{hi}");
        // 50 / 100: centre 0.5, half width z·sqrt(0.25/100 + z²/40000)/(1 + z²/100)
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.403_832).abs() < 1e-5 && (hi - 0.596_168).abs() < 1e-5);
        let (lo, hi) = wilson_interval(100, 100);
        assert_eq!(hi, 1.0);
        assert!(lo < 1.0);
    }

    #[test]
    fn crossover_degenerate() {
        let a = synthetic(&[(0.0, 1e-1), (1.0, 1e-2), (2.0, 1e-3)]);
        assert_eq!(crossover_ber(&a, &a).unwrap(), None);
        assert!(crossover_ber(&a[..2], &a).is_err());
        // Touching without swapping order is not a crossing.
        let b = synthetic(&[(0.0, 2e-1), (1.0, 1e-2), (2.0, 2e-3)]);
        assert_eq!(crossover_ber(&b, &a).unwrap(), None);
        let c = synthetic(&[(0.0, 2e-1), (1.0, 1e-2), (2.0, 5e-4)]);
        assert_eq!(crossover_ber(&c, &a).unwrap(), Some(1e-2));
    }

    #[test]
    fn crossover_synthetic_line() {
        // Straight lines in log BER: uncoded −1−e, coded −0.5−1.5e, crossing at e = 1.
        let grid = [0.0, 0.3, 0.9, 1.4, 2.0];
        let unc: Vec<(f64, f64)> = grid.iter().map(|&e| (e, 10f64.powf(-1.0 - e))).collect();
        let cod: Vec<(f64, f64)> = grid.iter().map(|&e| (e, 10f64.powf(-0.5 - 1.5 * e))).collect();
        let x = crossover_ber(&synthetic(&cod), &synthetic(&unc)).unwrap().unwrap();
        assert!((x / 1e-2 - 1.0).abs() < 1e-9, "{x}");
    }

    #[test]
    fn ebno_at_ber_interpolates() {
        let c = synthetic(&[(0.0, 1e-1), (2.0, 1e-3), (4.0, 1e-5)]);
        assert!((ebno_at_ber(&c, 1e-4).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(ebno_at_ber(&c, 1e-7), None);
    }

    #[test]
    fn semi_analytic_trivia() {
        assert_eq!(coded_ber_from_channel_ber(&CodeSpec::golay(4.0), 0.0).unwrap(), 0.0);
        let one = CodeSpec { n: 1, k: 1, rate: 1.0, t: Some(0), ..CodeSpec::golay(0.0) };
        assert!((coded_ber_from_channel_ber(&one, 0.013).unwrap() - 0.013).abs() < 1e-15);
        assert!(semi_analytic_coded_ber(&CodeSpec::convolutional(4.0), 5.0, 0.714).is_err());
        let cs = CodeSpec::none();
        assert_eq!(semi_analytic_coded_ber(&cs, 5.0, 0.714).unwrap(), theoretical_ber(5.0, 0.714));
    }

    #[test]
    fn semi_analytic_direct_sum() {
        // Term-by-term with exact binomials.
        let p: f64 = 0.01;
        let mut expect = 0.0;
        let mut c = 1.0;
        for i in 1..=24u32 {
            c = c * f64::from(25 - i) / f64::from(i);
            if i > 3 {
                expect += f64::from(i + 3) / 24.0 * c * p.powi(i as i32) * (1.0 - p).powi(24 - i as i32);
            }
        }
        let got = coded_ber_from_channel_ber(&CodeSpec::golay(4.0), p).unwrap();
        assert!((got / expect - 1.0).abs() < 1e-10);
    }

    #[test]
    fn semi_analytic_gains_at_1e4() {
        let a = alpha_for_bt(0.3);
        let at = |spec: &CodeSpec| semi_analytic_ebno_at_ber(spec, 1e-4, a).unwrap().unwrap();
        let u = at(&CodeSpec::none());
        assert!((theoretical_ber(u, a) / 1e-4 - 1.0).abs() < 1e-9);
        let golay = u - at(&CodeSpec::golay(4.0));
        let rs = u - at(&CodeSpec::default_for(CodeKind::ReedSolomon));
        assert!(golay >= 1.0, "{golay}");
        assert!(golay >= rs && rs > 0.0, "{golay} {rs}");
    }

    #[test]
    fn golay_semi_analytic_matches_monte_carlo() {
        // Channel BER near 1e-2; compare against the formula at the measured
        // channel BER.
        let mut s = spec(CodeSpec::golay(4.0), 2_000_000);
        s.axis = EbnoAxis::ChannelBit;
        let p = run_point(&s, 4.6).unwrap();
        let channel = p.channel_ber();
        assert!((0.5e-2..2e-2).contains(&channel), "{channel}");
        let predicted = coded_ber_from_channel_ber(&s.codec, channel).unwrap();
        let ratio = p.measured_ber / predicted;
        assert!((0.5..=2.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn csv_format() {
        let pts = synthetic(&[(4.0, 1.5e-3)]);
        let mut buf = Vec::new();
        write_csv(&mut buf, "golay", &pts).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, format!("{CSV_HEADER}\n4,golay,1.5e-3,1,1,1.5e-3,1.5e-3,0\n"));
    }
}
