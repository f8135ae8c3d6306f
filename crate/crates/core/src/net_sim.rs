//! Random sensor deployments, greedy geographic routes and multi-hop route
//! energy for coded and uncoded links.
//!
//! Route energy charges encoding once at the source and decoding once at the
//! sink; relays forward coded bits as they are. Every hop pays its own radiated
//! energy (sized for the hop distance), PA overhead, transmitter and receiver
//! circuit energy, and one synthesizer start-up pair.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use rand::Rng;
use rayon::prelude::*;

use crate::channel::substream;
use crate::energy::{circuit_powers, total_energy_coded, total_energy_uncoded, EnergyInputs, Variant};
use crate::error::{Error, Result};
use crate::fec::{CodeSpec, CodecPowerProfile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub id: u32,
    pub x: f64,
    pub y: f64,
}

impl Node {
    pub fn distance(&self, other: &Node) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub nodes: Vec<Node>,
    pub field_width: f64,
    pub field_height: f64,
    pub seed: u64,
}

impl Deployment {
    pub fn new(nodes: Vec<Node>, field_width: f64, field_height: f64, seed: u64) -> Result<Self> {
        check_field(field_width, field_height)?;
        let mut ids = HashSet::new();
        for n in &nodes {
            if !ids.insert(n.id) {
                return Err(Error::Config(format!("duplicate node id {}", n.id)));
            }
            if !(0.0..=field_width).contains(&n.x) || !(0.0..=field_height).contains(&n.y) {
                return Err(Error::Config(format!("node {} lies outside the field", n.id)));
            }
        }
        Ok(Self {
            nodes,
            field_width,
            field_height,
            seed,
        })
    }

    pub fn node(&self, id: u32) -> Result<&Node> {
        self.nodes.iter().find(|n| n.id == id).ok_or(Error::UnknownNode(id))
    }

    /// The two nodes farthest apart, lower id first; ties go to the pair
    /// found first in node order.
    pub fn farthest_pair(&self) -> Option<(u32, u32)> {
        let mut best: Option<(f64, u32, u32)> = None;
        for (i, a) in self.nodes.iter().enumerate() {
            for b in &self.nodes[i + 1..] {
                let d = a.distance(b);
                if best.is_none_or(|(bd, _, _)| d > bd) {
                    best = Some((d, a.id.min(b.id), a.id.max(b.id)));
                }
            }
        }
        best.map(|(_, a, b)| (a, b))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "id,x,y")?;
        for n in &self.nodes {
            writeln!(out, "{},{},{}", n.id, n.x, n.y)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R, field_width: f64, field_height: f64) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or(Error::EmptyInput)?
            .map_err(|e| Error::Parse(e.to_string()))?;
        if header.trim() != "id,x,y" {
            return Err(Error::Parse(format!("expected header 'id,x,y', got '{header}'")));
        }
        let mut nodes = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = || Error::Parse(format!("line {}: expected 'id,x,y', got '{line}'", lineno + 2));
            if fields.len() != 3 {
                return Err(bad());
            }
            nodes.push(Node {
                id: fields[0].parse().map_err(|_| bad())?,
                x: fields[1].parse().map_err(|_| bad())?,
                y: fields[2].parse().map_err(|_| bad())?,
            });
        }
        Self::new(nodes, field_width, field_height, 0)
    }
}

fn check_field(width: f64, height: f64) -> Result<()> {
    if width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("field must have positive area, got {width} x {height} m")))
    }
}

/// Uniform i.i.d. positions with ids `0..n_nodes`.
pub fn deploy_random(n_nodes: usize, width: f64, height: f64, seed: u64) -> Result<Deployment> {
    if n_nodes < 2 {
        return Err(Error::Config(format!("need at least 2 nodes, got {n_nodes}")));
    }
    check_field(width, height)?;
    let mut rng = substream(seed, 0);
    let nodes = (0..n_nodes as u32)
        .map(|id| Node {
            id,
            x: rng.random_range(0.0..width),
            y: rng.random_range(0.0..height),
        })
        .collect();
    Deployment::new(nodes, width, height, seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    /// Node ids, source first, sink last.
    pub hops: Vec<u32>,
    pub per_hop_distance: Vec<f64>,
}

impl Route {
    /// A route over abstract relays `0..=n` with the given hop lengths.
    pub fn from_distances(distances: Vec<f64>) -> Result<Self> {
        if distances.is_empty() {
            return Err(Error::EmptyInput);
        }
        if distances.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::Domain("hop distances must be positive".into()));
        }
        Ok(Self {
            hops: (0..=distances.len() as u32).collect(),
            per_hop_distance: distances,
        })
    }

    pub fn num_hops(&self) -> usize {
        self.per_hop_distance.len()
    }

    pub fn total_distance(&self) -> f64 {
        self.per_hop_distance.iter().sum()
    }
}

/// Greedy geographic forwarding: each step moves to the neighbour within
/// `max_hop_m` that is closest to the sink and strictly closer to it than the
/// current node. Exact ties go to the lower id.
pub fn build_route(deployment: &Deployment, source: u32, sink: u32, max_hop_m: f64) -> Result<Route> {
    if source == sink {
        return Err(Error::Config("source and sink must differ".into()));
    }
    let sink_node = *deployment.node(sink)?;
    let mut current = *deployment.node(source)?;
    let mut hops = vec![source];
    let mut dists = Vec::new();
    while current.id != sink {
        let here = current.distance(&sink_node);
        let next = deployment
            .nodes
            .iter()
            .filter(|n| n.id != current.id && current.distance(n) <= max_hop_m)
            .filter(|n| n.distance(&sink_node) < here)
            .min_by(|a, b| {
                a.distance(&sink_node)
                    .total_cmp(&b.distance(&sink_node))
                    .then(a.id.cmp(&b.id))
            })
            .ok_or(Error::Routing {
                stuck_at: current.id,
                sink,
            })?;
        dists.push(current.distance(next));
        hops.push(next.id);
        current = *next;
    }
    Ok(Route {
        hops,
        per_hop_distance: dists,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HopEnergy {
    pub distance_m: f64,
    pub e_radiated: f64,
    pub e_pa: f64,
    pub e_tx_circuit: f64,
    pub e_rx_circuit: f64,
    pub e_transient: f64,
}

impl HopEnergy {
    pub fn total(&self) -> f64 {
        self.e_radiated + self.e_pa + self.e_tx_circuit + self.e_rx_circuit + self.e_transient
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteEnergy {
    pub hops: Vec<HopEnergy>,
    pub e_enc: f64,
    pub e_dec: f64,
    pub e_total: f64,
}

impl RouteEnergy {
    /// Radiated and PA energy over all hops plus codec energy; circuits and
    /// start-up transients left out.
    pub fn radiated_only(&self) -> f64 {
        self.hops.iter().map(|h| h.e_radiated + h.e_pa).sum::<f64>() + self.e_enc + self.e_dec
    }
}

/// Code and codec power for the coded case; `None` means uncoded.
pub type Coding<'a> = Option<(&'a CodeSpec, &'a CodecPowerProfile)>;

pub fn route_energy(route: &Route, inputs: &EnergyInputs, coding: Coding<'_>, variant: Variant) -> Result<RouteEnergy> {
    if route.per_hop_distance.is_empty() || route.hops.len() != route.per_hop_distance.len() + 1 {
        return Err(Error::Config("route must have at least one hop".into()));
    }
    let (p_tx, p_rx) = circuit_powers(&inputs.power);
    let split = |circuit: f64| {
        let total = p_tx + p_rx;
        if total > 0.0 {
            (circuit * p_tx / total, circuit * p_rx / total)
        } else {
            (0.0, 0.0)
        }
    };
    let mut hops = Vec::with_capacity(route.num_hops());
    for &d in &route.per_hop_distance {
        let at = inputs.at_distance(d);
        let b = match coding {
            None => total_energy_uncoded(&at)?,
            Some((spec, _)) => total_energy_coded(&at, spec, &CodecPowerProfile::ZERO, variant)?,
        };
        let (e_tx_circuit, e_rx_circuit) = split(b.e_circuit);
        hops.push(HopEnergy {
            distance_m: d,
            e_radiated: b.e_tx_radiated,
            e_pa: b.e_pa_overhead,
            e_tx_circuit,
            e_rx_circuit,
            e_transient: b.e_transient,
        });
    }
    let (e_enc, e_dec) = match coding {
        None => (0.0, 0.0),
        Some((spec, codec)) => {
            codec.validate()?;
            let t_code = inputs.timing.t_on() / spec.rate;
            (codec.p_enc * t_code, codec.p_dec * t_code)
        }
    };
    let e_total = hops.iter().map(HopEnergy::total).sum::<f64>() + e_enc + e_dec;
    Ok(RouteEnergy {
        hops,
        e_enc,
        e_dec,
        e_total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TopologyMode {
    /// Random deployment per trial, routed between its two farthest nodes.
    Geometry {
        n_nodes: usize,
        width: f64,
        height: f64,
        max_hop_m: f64,
    },
    /// Hop lengths drawn uniformly from `[min_hop_m, max_hop_m]`, no geometry.
    Replication {
        hops: usize,
        min_hop_m: f64,
        max_hop_m: f64,
    },
}

impl TopologyMode {
    pub fn geometry_default() -> Self {
        TopologyMode::Geometry {
            n_nodes: 20,
            width: 100.0,
            height: 100.0,
            max_hop_m: 100.0,
        }
    }

    pub fn replication_default() -> Self {
        TopologyMode::Replication {
            hops: 4,
            min_hop_m: 50.0,
            max_hop_m: 100.0,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            TopologyMode::Geometry { .. } => "geometry",
            TopologyMode::Replication { .. } => "replication",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub mode: TopologyMode,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub hops: usize,
    pub e_uncoded: f64,
    pub e_coded: f64,
    pub savings: f64,
    pub e_uncoded_radiated: f64,
    pub e_coded_radiated: f64,
    pub savings_radiated: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SavingsStats {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single trial.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl SavingsStats {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self {
            count: values.len(),
            mean,
            std,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub trials: Vec<TrialResult>,
    /// Trials whose deployment had no greedy route.
    pub routing_failures: usize,
    pub full: Option<SavingsStats>,
    pub radiated: Option<SavingsStats>,
}

/// The deployment geometry mode uses for `trial` under `seed`.
pub fn trial_deployment(n_nodes: usize, width: f64, height: f64, seed: u64, trial: usize) -> Result<Deployment> {
    deploy_random(n_nodes, width, height, substream(seed, trial as u64).random())
}

/// The route a trial of `mode` evaluates.
pub fn trial_route(mode: &TopologyMode, seed: u64, trial: usize) -> Result<Route> {
    match *mode {
        TopologyMode::Geometry {
            n_nodes,
            width,
            height,
            max_hop_m,
        } => {
            let dep = trial_deployment(n_nodes, width, height, seed, trial)?;
            let (source, sink) = dep.farthest_pair().ok_or(Error::EmptyInput)?;
            build_route(&dep, source, sink, max_hop_m)
        }
        TopologyMode::Replication {
            hops,
            min_hop_m,
            max_hop_m,
        } => {
            if hops == 0 || !(min_hop_m > 0.0 && min_hop_m <= max_hop_m) {
                return Err(Error::Config("replication mode needs hops >= 1 and 0 < min <= max".into()));
            }
            let mut rng = substream(seed, trial as u64);
            Route::from_distances((0..hops).map(|_| rng.random_range(min_hop_m..=max_hop_m)).collect())
        }
    }
}

pub fn compare_coded_uncoded(
    ensemble: &EnsembleSpec,
    inputs: &EnergyInputs,
    spec: &CodeSpec,
    codec_power: &CodecPowerProfile,
    variant: Variant,
) -> Result<Comparison> {
    if ensemble.trials == 0 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    let outcomes: Vec<Result<Option<TrialResult>>> = (0..ensemble.trials)
        .into_par_iter()
        .map(|trial| {
            let route = match trial_route(&ensemble.mode, ensemble.seed, trial) {
                Ok(r) => r,
                Err(Error::Routing { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            let u = route_energy(&route, inputs, None, variant)?;
            let c = route_energy(&route, inputs, Some((spec, codec_power)), variant)?;
            Ok(Some(TrialResult {
                trial,
                hops: route.num_hops(),
                e_uncoded: u.e_total,
                e_coded: c.e_total,
                savings: 1.0 - c.e_total / u.e_total,
                e_uncoded_radiated: u.radiated_only(),
                e_coded_radiated: c.radiated_only(),
                savings_radiated: 1.0 - c.radiated_only() / u.radiated_only(),
            }))
        })
        .collect();
    let mut trials = Vec::with_capacity(ensemble.trials);
    let mut routing_failures = 0;
    for o in outcomes {
        match o? {
            Some(t) => trials.push(t),
            None => routing_failures += 1,
        }
    }
    let full: Vec<f64> = trials.iter().map(|t| t.savings).collect();
    let radiated: Vec<f64> = trials.iter().map(|t| t.savings_radiated).collect();
    Ok(Comparison {
        full: SavingsStats::from_values(&full),
        radiated: SavingsStats::from_values(&radiated),
        trials,
        routing_failures,
    })
}

pub const RESULTS_CSV_HEADER: &str = "trial,e_uncoded_J,e_coded_J,savings_fraction";

pub fn write_results_csv<W: Write>(mut out: W, trials: &[TrialResult]) -> std::io::Result<()> {
    writeln!(out, "{RESULTS_CSV_HEADER}")?;
    for t in trials {
        writeln!(out, "{},{:e},{:e},{:e}", t.trial, t.e_uncoded, t.e_coded, t.savings)?;
    }
    Ok(())
}
