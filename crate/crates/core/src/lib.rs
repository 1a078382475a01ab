//! Link-stability modelling for low-power wireless networks.
//!
//! The crate models packet reception over a log-normal shadowing channel
//! with per-radio hardware variability, locates the transitional region
//! between reliable and disconnected links, runs seeded Monte-Carlo sweeps,
//! evaluates distance-normalized routing metrics and computes entropy-based
//! stability measures from mobility traces.
//!
//! ```
//! use linkstab_core::{expected_prr, region_bounds, DeploymentScenario};
//!
//! let indoor = DeploymentScenario::indoor();
//! let r = region_bounds(&indoor).unwrap();
//! assert!(expected_prr(r.d_begin, &indoor).unwrap().mean > 0.79);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod config;
pub mod entropy;
pub mod error;
pub mod experiment;
pub mod montecarlo;
pub mod output;
pub mod quadrature;
pub mod region;
pub mod rng;
pub mod routing;
pub mod trace;
pub mod units;

pub use channel::{
    bit_error_rate, draw_link_hardware, draw_radio_hardware, expected_prr, mean_path_loss, packet_reception_rate,
    sample_snr, snr_mean, BitErrorModel, ChannelModel, DeploymentScenario, Encoding, HardwareVariability, Modulation,
    PrrMoments, RadioInstance, RadioModel,
};
pub use config::DeploymentSpec;
pub use entropy::{
    link_entropy, mobility_feature, node_entropy, relative_position, relative_velocity, route_stability_log,
    route_stability_product, shannon_entropy, spatiotemporal_entropy, speed_feature, FeatureWindow, KinematicSample,
    LogBase, NeighborFeature, SignConvention, StabilityLink, Vec2,
};
pub use error::{BracketEnd, Error, Result};
pub use experiment::{ExperimentConfig, ExperimentFile, ExperimentKind, Overrides};
pub use montecarlo::{
    compare_node_configs, run_prr_sweep, summarize, NodeComparison, Summary, SweepResult, SweepScenario,
};
pub use output::CsvTable;
pub use region::{region_bounds, region_bounds_with, region_coefficient, RegionBounds, RegionSearch};
pub use routing::{
    eld, etd, etx_from_pdr, expected_attempts, ld, run_relay_sweep, select_forwarder, simulate_attempts, Forwarder,
    ForwarderCandidate, ForwardingMetric, NodeId, RelayExperiment, RelaySweep, RetransmissionPolicy,
};
pub use trace::{entropy_report, EntropyReport, FeatureKind, Trace};
