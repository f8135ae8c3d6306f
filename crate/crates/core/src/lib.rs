//! Link- and network-level simulation of GMSK with forward error correction
//! for wireless sensor networks.

// `!(x > 0.0)` on purpose: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod energy;
pub mod error;
pub mod fec;
pub mod gmsk;
pub mod link_sim;
pub mod net_sim;

pub use channel::{awgn, path_gain, ChannelConfig, LinkBudget};
pub use energy::{
    crossover_distance, total_energy_coded, total_energy_uncoded, Crossover, EnergyBreakdown,
    EnergyInputs, PowerProfile, TimingProfile, Variant,
};
pub use error::{Error, Result};
pub use fec::{apply_code, strip_code, CodeKind, CodeSpec, Codec, CodecPowerProfile};
pub use gmsk::{alpha_for_bt, demodulate, modulate, theoretical_ber, BasebandSignal, GmskModem, ModemConfig};
pub use link_sim::{run_point, run_sweep, BerPoint, EbnoAxis, StopRule, SweepSpec};
pub use net_sim::{build_route, compare_coded_uncoded, deploy_random, route_energy, Deployment, Route};
