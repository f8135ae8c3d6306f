//! Command-line front end: BER sweeps, energy-versus-distance scans, route
//! simulations and codec self-checks. Results go to CSV files plus gnuplot
//! scripts; diagnostics go to stderr.

// `!(x > 0.0)` on purpose: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod codec_check;
pub mod config;
pub mod output;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use gmsk_wsn::energy::{
    crossover_distance, savings, total_energy_coded, total_energy_uncoded, Crossover, EnergyInputs, Variant,
};
use gmsk_wsn::fec::golay::Golay;
use gmsk_wsn::fec::{CodeKind, CodeSpec, ConvCode, GaloisField, ReedSolomon};
use gmsk_wsn::gmsk::{ALPHA_BT_025, ALPHA_MSK};
use gmsk_wsn::link_sim::{
    crossover_ber, ebno_at_ber, run_sweep, semi_analytic_ebno_at_ber, write_csv, write_csv_row, BerPoint,
    SweepSpec, CSV_HEADER,
};
use gmsk_wsn::net_sim::{compare_coded_uncoded, trial_deployment, write_results_csv, Comparison, EnsembleSpec};

use crate::codec_check::CheckResult;
use crate::config::{RunConfig, VariantChoice};
use crate::output::Outputs;

/// Exit status for success, usage or configuration errors, and runtime failures.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Runtime(m) => write!(f, "failure: {m}"),
        }
    }
}

impl From<gmsk_wsn::Error> for CliError {
    fn from(e: gmsk_wsn::Error) -> Self {
        match e {
            gmsk_wsn::Error::Config(_) | gmsk_wsn::Error::Parse(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "gmsk-wsn", version, about = "GMSK + FEC link, energy and route experiments")]
pub struct Cli {
    /// TOML run configuration; defaults to the shipped parameter file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Comma-separated codec list: none, golay, rs, conv.
    #[arg(long, global = true, value_name = "LIST", value_delimiter = ',')]
    pub codecs: Option<Vec<String>>,
    /// Energy interpretation: literal, circuit-unscaled or both.
    #[arg(long, global = true, value_name = "VARIANT")]
    pub variant: Option<String>,
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Reduced trial counts for smoke runs.
    #[arg(long, global = true)]
    pub quick: bool,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, hide = true)]
    pub threads: Option<usize>,
    /// Flip one Golay parity-matrix entry before `codec-test`.
    #[arg(long, global = true, hide = true)]
    pub inject_fault: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Monte Carlo BER versus Eb/N0 for each codec.
    BerSweep,
    /// Per-bit energy versus distance, coded and uncoded.
    EnergyDistance,
    /// Multi-hop route energy, coded versus uncoded.
    RouteSim,
    /// Exhaustive and randomized codec verification.
    CodecTest,
}

impl Cli {
    /// The run configuration after applying command-line overrides.
    pub fn resolve_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::from_toml(config::DEFAULT_TOML)?,
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(codecs) = &self.codecs {
            cfg.codec.codecs = codecs.clone();
        }
        if let Some(v) = &self.variant {
            cfg.variant = v.parse::<VariantChoice>().map_err(|e| CliError::Usage(e.to_string()))?;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        if self.quick {
            cfg.apply_quick();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = cli.resolve_config()?;
    let threads = cli.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    pool.install(|| {
        let (outputs, verdict) = match cli.command {
            Command::BerSweep => (ber_sweep(&cfg)?, Ok(())),
            Command::EnergyDistance => (energy_distance(&cfg)?, Ok(())),
            Command::RouteSim => (route_sim(&cfg)?, Ok(())),
            Command::CodecTest => codec_test(&cfg, cli.quick, cli.inject_fault)?,
        };
        let written = outputs.commit(&cfg.out_dir).map_err(io_err)?;
        eprintln!("wrote {} files to {}", written.len(), cfg.out_dir.display());
        verdict
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x}"))
}

pub fn ber_sweep(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let kinds = cfg.codec_kinds()?;
    let grid = cfg.ebno_grid()?;
    let mut curves: Vec<(CodeKind, CodeSpec, Vec<BerPoint>)> = Vec::new();
    for &kind in &kinds {
        let spec = cfg.code_spec(kind)?;
        let sweep = SweepSpec {
            modem: cfg.modem_config(),
            stop_rule: cfg.stop_rule(),
            axis: cfg.axis(),
            frame_bits: cfg.ber_sweep.frame_bits,
            ..SweepSpec::new(grid.clone(), spec, cfg.seed)
        };
        curves.push((kind, spec, run_sweep(&sweep)?));
    }

    let mut out = Outputs::default();
    let mut merged = Vec::new();
    writeln_bytes(&mut merged, CSV_HEADER);
    for (kind, _, points) in &curves {
        let mut file = Vec::new();
        write_csv(&mut file, kind.label(), points).map_err(io_err)?;
        out.add(format!("ber_{}.csv", kind.label()), file);
        for p in points {
            write_csv_row(&mut merged, kind.label(), p).map_err(io_err)?;
        }
    }
    out.add("ber_all.csv", merged);

    let uncoded = curves.iter().find(|(k, _, _)| *k == CodeKind::None).map(|(_, _, p)| p);
    let alpha = cfg.alpha();
    let target = 1e-4;
    let mc_ref = uncoded.and_then(|u| ebno_at_ber(u, target));
    let sa_ref = semi_analytic_ebno_at_ber(&CodeSpec::none(), target, alpha)?;
    let mut summary = String::from(
        "codec,crossover_ber,ebno_at_1e-4_db,gain_at_1e-4_db,semi_analytic_ebno_at_1e-4_db,semi_analytic_gain_at_1e-4_db\n",
    );
    for (kind, spec, points) in &curves {
        let cross = match uncoded {
            Some(u) if *kind != CodeKind::None => crossover_ber(points, u)?,
            _ => None,
        };
        let at = ebno_at_ber(points, target);
        let gain = at.zip(mc_ref).map(|(a, r)| r - a);
        let sa = match kind {
            CodeKind::Convolutional => None,
            _ => semi_analytic_ebno_at_ber(spec, target, alpha)?,
        };
        let sa_gain = sa.zip(sa_ref).map(|(a, r)| r - a);
        let _ = writeln!(
            summary,
            "{},{},{},{},{},{}",
            kind.label(),
            cross.map_or_else(String::new, |x| format!("{x:e}")),
            opt(at),
            opt(gain),
            opt(sa),
            opt(sa_gain)
        );
    }
    out.add("ber_summary.csv", summary.into_bytes());
    out.add("ber.gp", output::ber_gnuplot(&kinds).into_bytes());
    Ok(out)
}

fn writeln_bytes(buf: &mut Vec<u8>, line: &str) {
    buf.extend_from_slice(line.as_bytes());
    buf.push(b'\n');
}

/// One row of the α × variant sensitivity report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivity {
    pub alpha_label: &'static str,
    pub alpha: f64,
    pub variant: Variant,
    pub crossover: Crossover,
    pub savings_at_report: f64,
}

/// Crossover and savings at the report distance for each α in
/// {BT = 0.25 table value, configured, MSK limit} and each variant.
pub fn sensitivity(cfg: &RunConfig) -> Result<Vec<Sensitivity>, CliError> {
    let spec = cfg.energy_spec()?;
    let codec = cfg.codec_power();
    let d = cfg.energy_distance.report_distance_m;
    let mut rows = Vec::new();
    for (alpha_label, alpha) in [("bt_0.25", ALPHA_BT_025), ("configured", cfg.alpha()), ("msk", ALPHA_MSK)] {
        let inputs = EnergyInputs { alpha, ..cfg.energy_inputs() };
        for variant in Variant::ALL {
            let at = inputs.at_distance(d);
            let u = total_energy_uncoded(&at)?;
            let c = total_energy_coded(&at, &spec, &codec, variant)?;
            rows.push(Sensitivity {
                alpha_label,
                alpha,
                variant,
                crossover: crossover_distance(&inputs, &spec, &codec, variant)?,
                savings_at_report: savings(&u, &c),
            });
        }
    }
    Ok(rows)
}

/// The sensitivity row whose savings at the report distance is closest to
/// the reference figure; earlier rows win ties.
pub fn closest_to_reference(rows: &[Sensitivity], reference: f64) -> Option<Sensitivity> {
    rows.iter()
        .copied()
        .reduce(|best, r| {
            if (r.savings_at_report - reference).abs() < (best.savings_at_report - reference).abs() {
                r
            } else {
                best
            }
        })
}

fn crossover_fields(x: &Crossover) -> (&'static str, String) {
    match x {
        Crossover::At(d) => ("at", format!("{d}")),
        Crossover::CodedAlwaysCheaper => ("coded_always_cheaper", String::new()),
        Crossover::CodedNeverCheaper => ("coded_never_cheaper", String::new()),
    }
}

pub fn energy_distance(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let spec = cfg.energy_spec()?;
    let codec = cfg.codec_power();
    let inputs = cfg.energy_inputs();
    let variants = cfg.variant.variants();
    let grid = cfg.distance_grid()?;

    let mut table = String::from("d_m,e_uncoded");
    for v in &variants {
        let _ = write!(table, ",e_coded_{}", v.label().replace('-', "_"));
    }
    for v in &variants {
        let _ = write!(table, ",savings_{}", v.label().replace('-', "_"));
    }
    table.push('\n');
    for &d in &grid {
        let at = inputs.at_distance(d);
        let u = total_energy_uncoded(&at)?;
        let coded = variants
            .iter()
            .map(|&v| total_energy_coded(&at, &spec, &codec, v))
            .collect::<Result<Vec<_>, _>>()?;
        let _ = write!(table, "{d},{:e}", u.e_per_info_bit);
        for c in &coded {
            let _ = write!(table, ",{:e}", c.e_per_info_bit);
        }
        for c in &coded {
            let _ = write!(table, ",{:e}", savings(&u, c));
        }
        table.push('\n');
    }

    let report_d = cfg.energy_distance.report_distance_m;
    let mut cross = format!("variant,alpha,crossover,d_star_m,in_grid,savings_at_{report_d}m\n");
    for &v in &variants {
        let x = crossover_distance(&inputs, &spec, &codec, v)?;
        let at = inputs.at_distance(report_d);
        let s = savings(&total_energy_uncoded(&at)?, &total_energy_coded(&at, &spec, &codec, v)?);
        let (kind, d_star) = crossover_fields(&x);
        let in_grid = x.distance().is_some_and(|d| d >= grid[0] && d <= grid[grid.len() - 1]);
        let _ = writeln!(cross, "{},{},{kind},{d_star},{},{s:e}", v.label(), inputs.alpha, u8::from(in_grid));
    }

    let rows = sensitivity(cfg)?;
    let reference = cfg.energy_distance.reference_savings;
    let best = closest_to_reference(&rows, reference);
    let mut sens = format!(
        "alpha_label,alpha,variant,crossover,d_star_m,savings_at_{report_d}m,gap_to_reference,closest\n"
    );
    for r in &rows {
        let (kind, d_star) = crossover_fields(&r.crossover);
        let _ = writeln!(
            sens,
            "{},{},{},{kind},{d_star},{:e},{:e},{}",
            r.alpha_label,
            r.alpha,
            r.variant.label(),
            r.savings_at_report,
            r.savings_at_report - reference,
            u8::from(Some(*r) == best)
        );
    }

    let mut out = Outputs::default();
    out.add("energy_distance.csv", table.into_bytes());
    out.add("energy_crossover.csv", cross.into_bytes());
    out.add("energy_sensitivity.csv", sens.into_bytes());
    out.add("energy_distance.gp", output::energy_gnuplot(&variants).into_bytes());
    Ok(out)
}

/// Runs one route ensemble with the configured inputs, optionally overriding α.
pub fn route_comparison(
    cfg: &RunConfig,
    mode: gmsk_wsn::net_sim::TopologyMode,
    variant: Variant,
    alpha: Option<f64>,
) -> Result<Comparison, CliError> {
    let mut inputs = cfg.energy_inputs();
    if let Some(a) = alpha {
        inputs.alpha = a;
    }
    if !cfg.route_sim.transient_per_hop {
        inputs.timing.t_start = 0.0;
    }
    let ensemble = EnsembleSpec {
        mode,
        trials: cfg.route_sim.trials,
        seed: cfg.seed,
    };
    Ok(compare_coded_uncoded(&ensemble, &inputs, &cfg.energy_spec()?, &cfg.codec_power(), variant)?)
}

pub fn route_sim(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let mut out = Outputs::default();
    let mut summary =
        String::from("mode,variant,accounting,alpha,trials,routing_failures,mean,std,min,max\n");
    for mode in [cfg.geometry_mode(), cfg.replication_mode()] {
        for variant in cfg.variant.variants() {
            let cmp = route_comparison(cfg, mode, variant, None)?;
            let mut file = Vec::new();
            write_results_csv(&mut file, &cmp.trials).map_err(io_err)?;
            if !cmp.trials.is_empty() {
                let n = cmp.trials.len() as f64;
                let mean_u = cmp.trials.iter().map(|t| t.e_uncoded).sum::<f64>() / n;
                let mean_c = cmp.trials.iter().map(|t| t.e_coded).sum::<f64>() / n;
                let mean_s = cmp.full.map_or(f64::NAN, |s| s.mean);
                writeln_bytes(&mut file, &format!("mean,{mean_u:e},{mean_c:e},{mean_s:e}"));
            }
            out.add(format!("route_{}_{}.csv", mode.label(), variant.label()), file);
            for (accounting, stats) in [("full", cmp.full), ("radiated", cmp.radiated)] {
                let fields = stats.map_or_else(
                    || ",,,".to_string(),
                    |s| format!("{:e},{:e},{:e},{:e}", s.mean, s.std, s.min, s.max),
                );
                let _ = writeln!(
                    summary,
                    "{},{},{accounting},{},{},{},{fields}",
                    mode.label(),
                    variant.label(),
                    cfg.alpha(),
                    cmp.trials.len(),
                    cmp.routing_failures
                );
            }
        }
    }
    out.add("route_summary.csv", summary.into_bytes());

    let r = &cfg.route_sim;
    let dep = trial_deployment(r.n_nodes, r.field_width_m, r.field_height_m, cfg.seed, 0)?;
    let mut file = Vec::new();
    dep.write_csv(&mut file).map_err(io_err)?;
    out.add("deployment_trial0.csv", file);
    Ok(out)
}

/// Runs the codec checks; the second value is `Err` if any check failed.
pub fn codec_test(
    cfg: &RunConfig,
    quick: bool,
    inject_fault: bool,
) -> Result<(Outputs, Result<(), CliError>), CliError> {
    let kinds = cfg.codec_kinds()?;
    let mut golay = Golay::default();
    if inject_fault {
        let mut rows = *golay.parity_rows();
        rows[0] ^= 1;
        golay = Golay::with_parity_rows(rows);
    }
    let t = &cfg.codec_test;
    let mut results: Vec<CheckResult> = Vec::new();
    if kinds.contains(&CodeKind::Golay) {
        results.push(codec_check::golay_radius(&golay, if quick { 16 } else { 1 }));
    }
    if kinds.contains(&CodeKind::ReedSolomon) {
        let rs = ReedSolomon::new(GaloisField::gf16(), 15, 11)?;
        results.push(codec_check::rs_within_radius(&rs, t.rs_trials, cfg.seed));
        results.push(codec_check::rs_beyond_radius(&rs, t.rs_weight3_trials, cfg.seed));
    }
    if kinds.contains(&CodeKind::Convolutional) {
        let conv = ConvCode::default();
        results.push(codec_check::viterbi_roundtrip(&conv, t.viterbi_trials, cfg.seed));
        results.push(codec_check::viterbi_double_errors(&conv, cfg.seed));
    }
    let mut report = String::from("check,trials,failures,result\n");
    for r in &results {
        let verdict = if r.passed() { "pass" } else { "fail" };
        let _ = writeln!(report, "{},{},{},{verdict}", r.name, r.trials, r.failures);
        println!("{:<22} {verdict}  ({} failures in {} trials)", r.name, r.failures, r.trials);
    }
    let mut out = Outputs::default();
    out.add("codec_test.csv", report.into_bytes());
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed()).map(|r| r.name).collect();
    let verdict = if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Runtime(format!("codec checks failed: {}", failed.join(", "))))
    };
    Ok((out, verdict))
}
