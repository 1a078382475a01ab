//! Experiment configuration and dispatch.
//!
//! An experiment file is TOML: a `kind`, an optional `preset`, optional
//! `[deployment]` overrides (see [`crate::config`]), and the kind-specific
//! keys. [`run`] produces a CSV artifact whose first line is a `#` comment
//! recording the seed and a hash of the resolved configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::DeploymentScenario;
use crate::config::DeploymentSpec;
use crate::entropy::{route_stability_log, route_stability_product};
use crate::error::{Error, Result};
use crate::montecarlo::{compare_node_configs, run_prr_sweep, SweepScenario};
use crate::output::{fmt_num, CsvTable};
use crate::region::{region_bounds_with, region_coefficient, RegionBounds, RegionSearch};
use crate::routing::{run_relay_sweep, RelayExperiment, RetransmissionPolicy};
use crate::trace::{entropy_report, FeatureKind, Trace};

/// Seed used when neither the config nor the command line sets one.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    PrrSweep,
    NodeCompare,
    Region,
    RelaySweep,
    Entropy,
    RouteStability,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::PrrSweep,
        ExperimentKind::NodeCompare,
        ExperimentKind::Region,
        ExperimentKind::RelaySweep,
        ExperimentKind::Entropy,
        ExperimentKind::RouteStability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::PrrSweep => "prr-sweep",
            ExperimentKind::NodeCompare => "node-compare",
            ExperimentKind::Region => "region",
            ExperimentKind::RelaySweep => "relay-sweep",
            ExperimentKind::Entropy => "entropy",
            ExperimentKind::RouteStability => "route-stability",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid("kind", format!("unknown experiment kind '{s}'")))
    }
}

/// Raw experiment file. Everything is optional here; [`ExperimentConfig`]
/// applies defaults and validation.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub kind: Option<String>,
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub deployment: DeploymentSpec,

    // distance grids (prr-sweep, node-compare)
    pub distances_m: Option<Vec<f64>>,
    pub d_min_m: Option<f64>,
    pub d_max_m: Option<f64>,
    pub d_step_m: Option<f64>,
    pub sims: Option<usize>,
    pub nodes: Option<usize>,
    pub multi_nodes: Option<usize>,
    pub confidence: Option<f64>,

    // region
    pub upper: Option<f64>,
    pub lower: Option<f64>,
    pub search_limit_m: Option<f64>,
    pub tolerance_m: Option<f64>,

    // relay-sweep
    pub l_sd_m: Option<f64>,
    pub relay_distances_m: Option<Vec<f64>>,
    pub max_retx: Option<u32>,
    pub fail_value: Option<u32>,

    // entropy
    pub trace: Option<PathBuf>,
    pub feature: Option<FeatureKind>,
    pub radio_range_m: Option<f64>,

    // route-stability
    pub routes: Option<Vec<Vec<f64>>>,
}

impl ExperimentFile {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.message().trim().to_string()))
    }

    /// Reads a file; a relative `trace` path is taken relative to the file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut file = Self::from_toml_str(&text)?;
        if let (Some(trace), Some(dir)) = (&file.trace, path.parent()) {
            if trace.is_relative() {
                file.trace = Some(dir.join(trace));
            }
        }
        Ok(file)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceGrid(pub Vec<f64>);

impl DistanceGrid {
    fn from_file(f: &ExperimentFile) -> Result<Self> {
        if let Some(d) = &f.distances_m {
            return Ok(Self(d.clone()));
        }
        let lo = f.d_min_m.unwrap_or(1.0);
        let hi = f.d_max_m.unwrap_or(40.0);
        let step = f.d_step_m.unwrap_or(0.5);
        if !(lo > 0.0 && hi >= lo && step > 0.0) {
            return Err(Error::invalid(
                "d_step_m",
                "need 0 < d_min_m <= d_max_m and d_step_m > 0",
            ));
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        Ok(Self((0..=n).map(|i| lo + step * i as f64).collect()))
    }
}

/// Kind-specific parameters after defaults are applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentParams {
    PrrSweep {
        distances_m: Vec<f64>,
        sims: usize,
        nodes: usize,
        confidence: f64,
    },
    NodeCompare {
        distances_m: Vec<f64>,
        sims: usize,
        multi_nodes: usize,
        confidence: f64,
    },
    Region {
        upper: f64,
        lower: f64,
        search_limit_m: f64,
        tolerance_m: f64,
    },
    RelaySweep {
        l_sd_m: f64,
        relay_distances_m: Vec<f64>,
        sims: usize,
        max_retx: u32,
        fail_value: u32,
        confidence: f64,
    },
    Entropy {
        // hashed by content, not location
        #[serde(skip)]
        trace: PathBuf,
        feature: FeatureKind,
        radio_range_m: f64,
    },
    RouteStability {
        routes: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// Absent for kinds that do not model a radio link.
    pub deployment: Option<DeploymentScenario>,
    pub params: ExperimentParams,
    pub seed: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub kind: Option<String>,
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_file(file: &ExperimentFile, overrides: &Overrides) -> Result<Self> {
        let kind: ExperimentKind = overrides
            .kind
            .as_deref()
            .or(file.kind.as_deref())
            .ok_or_else(|| Error::MissingField("kind".into()))?
            .parse()?;
        let preset = overrides
            .preset
            .as_deref()
            .or(file.preset.as_deref())
            .map(DeploymentScenario::preset)
            .transpose()?;
        let deployment = match kind {
            ExperimentKind::Entropy | ExperimentKind::RouteStability => None,
            _ => Some(file.deployment.resolve(preset.as_ref())?),
        };
        let seed = overrides.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
        let out = overrides.out.clone().or_else(|| file.out.clone());

        let confidence = file.confidence.unwrap_or(crate::montecarlo::DEFAULT_CONFIDENCE);
        let params = match kind {
            ExperimentKind::PrrSweep => ExperimentParams::PrrSweep {
                distances_m: DistanceGrid::from_file(file)?.0,
                sims: file.sims.unwrap_or(500),
                nodes: file.nodes.unwrap_or(1),
                confidence,
            },
            ExperimentKind::NodeCompare => ExperimentParams::NodeCompare {
                distances_m: DistanceGrid::from_file(file)?.0,
                sims: file.sims.unwrap_or(1000),
                multi_nodes: file.multi_nodes.unwrap_or(10),
                confidence,
            },
            ExperimentKind::Region => ExperimentParams::Region {
                upper: file.upper.unwrap_or(crate::region::DEFAULT_UPPER),
                lower: file.lower.unwrap_or(crate::region::DEFAULT_LOWER),
                search_limit_m: file.search_limit_m.unwrap_or(RegionSearch::default().d_max),
                tolerance_m: file.tolerance_m.unwrap_or(crate::region::DEFAULT_TOLERANCE_M),
            },
            ExperimentKind::RelaySweep => {
                let l_sd_m = file.l_sd_m.unwrap_or(RelayExperiment::DEFAULT_L_SD);
                let relay_distances_m = match &file.relay_distances_m {
                    Some(r) => r.clone(),
                    None => {
                        let last = l_sd_m.ceil() as i64 - 1;
                        (1..=last).map(|d| d as f64).collect()
                    }
                };
                let policy = RetransmissionPolicy::default();
                ExperimentParams::RelaySweep {
                    l_sd_m,
                    relay_distances_m,
                    sims: file.sims.unwrap_or(200),
                    max_retx: file.max_retx.unwrap_or(policy.max_retx()),
                    fail_value: file.fail_value.unwrap_or(policy.fail_value()),
                    confidence,
                }
            }
            ExperimentKind::Entropy => ExperimentParams::Entropy {
                trace: file.trace.clone().ok_or_else(|| Error::MissingField("trace".into()))?,
                feature: file.feature.unwrap_or_default(),
                radio_range_m: file
                    .radio_range_m
                    .ok_or_else(|| Error::MissingField("radio_range_m".into()))?,
            },
            ExperimentKind::RouteStability => ExperimentParams::RouteStability {
                routes: file
                    .routes
                    .clone()
                    .ok_or_else(|| Error::MissingField("routes".into()))?,
            },
        };
        let cfg = Self {
            deployment,
            params,
            seed,
            out,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn deployment(&self) -> Result<&DeploymentScenario> {
        self.deployment
            .as_ref()
            .ok_or_else(|| Error::invalid("deployment", "this experiment kind has no deployment"))
    }

    pub fn kind(&self) -> ExperimentKind {
        match self.params {
            ExperimentParams::PrrSweep { .. } => ExperimentKind::PrrSweep,
            ExperimentParams::NodeCompare { .. } => ExperimentKind::NodeCompare,
            ExperimentParams::Region { .. } => ExperimentKind::Region,
            ExperimentParams::RelaySweep { .. } => ExperimentKind::RelaySweep,
            ExperimentParams::Entropy { .. } => ExperimentKind::Entropy,
            ExperimentParams::RouteStability { .. } => ExperimentKind::RouteStability,
        }
    }

    /// Builds the library inputs once so that parameter errors surface
    /// before anything runs.
    fn validate(&self) -> Result<()> {
        match &self.params {
            ExperimentParams::PrrSweep { .. } => {
                self.sweep_scenario()?;
            }
            ExperimentParams::NodeCompare { .. } => {
                self.node_compare_scenarios()?;
            }
            ExperimentParams::Region { .. } => {}
            ExperimentParams::RelaySweep { .. } => {
                self.relay_experiment()?;
            }
            ExperimentParams::Entropy { radio_range_m, .. } => {
                if !(*radio_range_m > 0.0) {
                    return Err(Error::invalid("radio_range_m", "must be positive"));
                }
            }
            ExperimentParams::RouteStability { routes } => {
                if routes.is_empty() {
                    return Err(Error::invalid("routes", "need at least one route"));
                }
                for r in routes {
                    route_stability_product(r).map_err(|e| Error::invalid("routes", e.to_string()))?;
                }
            }
        }
        Ok(())
    }

    pub fn sweep_scenario(&self) -> Result<SweepScenario> {
        match &self.params {
            ExperimentParams::PrrSweep {
                distances_m,
                sims,
                nodes,
                confidence,
            } => SweepScenario::new(
                self.deployment()?.clone(),
                distances_m.clone(),
                *sims,
                *nodes,
                self.seed,
            )?
            .with_confidence(*confidence),
            _ => Err(Error::invalid("kind", "not a prr-sweep experiment")),
        }
    }

    /// Single-node run under `seed`, multi-node run under `seed + 1`.
    pub fn node_compare_scenarios(&self) -> Result<(SweepScenario, SweepScenario)> {
        match &self.params {
            ExperimentParams::NodeCompare {
                distances_m,
                sims,
                multi_nodes,
                confidence,
            } => {
                let single = SweepScenario::new(self.deployment()?.clone(), distances_m.clone(), *sims, 1, self.seed)?
                    .with_confidence(*confidence)?;
                let multi = SweepScenario::new(
                    self.deployment()?.clone(),
                    distances_m.clone(),
                    *sims,
                    *multi_nodes,
                    self.seed.wrapping_add(1),
                )?
                .with_confidence(*confidence)?;
                Ok((single, multi))
            }
            _ => Err(Error::invalid("kind", "not a node-compare experiment")),
        }
    }

    pub fn relay_experiment(&self) -> Result<RelayExperiment> {
        match &self.params {
            ExperimentParams::RelaySweep {
                l_sd_m,
                relay_distances_m,
                sims,
                max_retx,
                fail_value,
                confidence,
            } => {
                let policy = RetransmissionPolicy::new(*max_retx, *fail_value)?;
                let mut exp = RelayExperiment::new(
                    self.deployment()?.clone(),
                    *l_sd_m,
                    relay_distances_m.clone(),
                    policy,
                    *sims,
                    self.seed,
                )?;
                if !(*confidence > 0.0 && *confidence < 1.0) {
                    return Err(Error::invalid("confidence", "must lie in (0, 1)"));
                }
                exp.confidence_level = *confidence;
                Ok(exp)
            }
            _ => Err(Error::invalid("kind", "not a relay-sweep experiment")),
        }
    }

    pub fn region_search(&self) -> Result<RegionSearch> {
        match &self.params {
            ExperimentParams::Region {
                upper,
                lower,
                search_limit_m,
                tolerance_m,
            } => Ok(RegionSearch {
                upper: *upper,
                lower: *lower,
                d_max: *search_limit_m,
                tolerance_m: *tolerance_m,
            }),
            _ => Err(Error::invalid("kind", "not a region experiment")),
        }
    }
}

pub fn region_table(bounds: &RegionBounds) -> CsvTable {
    let mut t = CsvTable::new(&["d_begin_m", "d_end_m", "coefficient", "upper", "lower"]);
    t.push(vec![
        fmt_num(bounds.d_begin),
        fmt_num(bounds.d_end),
        fmt_num(region_coefficient(bounds)),
        fmt_num(bounds.upper),
        fmt_num(bounds.lower),
    ]);
    t
}

pub fn route_stability_table(routes: &[Vec<f64>]) -> Result<CsvTable> {
    let mut t = CsvTable::new(&["route", "hops", "rs1", "rs2"]);
    for (i, r) in routes.iter().enumerate() {
        t.push(vec![
            i.to_string(),
            r.len().to_string(),
            fmt_num(route_stability_product(r)?),
            fmt_num(route_stability_log(r)?),
        ]);
    }
    Ok(t)
}

/// A finished CSV artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub kind: ExperimentKind,
    pub config_hash: String,
    /// Data table without the metadata line.
    pub table: CsvTable,
}

impl Artifact {
    pub fn metadata_line(&self, seed: u64) -> String {
        format!(
            "# linkstab {} kind={} seed={} config_sha256={}\n",
            env!("CARGO_PKG_VERSION"),
            self.kind.name(),
            seed,
            self.config_hash
        )
    }
}

/// Runs the experiment and returns the full CSV text (metadata line first).
pub fn run(config: &ExperimentConfig) -> Result<String> {
    let artifact = run_artifact(config)?;
    Ok(artifact.metadata_line(config.seed) + &artifact.table.to_csv_string()?)
}

pub fn run_artifact(config: &ExperimentConfig) -> Result<Artifact> {
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_vec(config).expect("config serializes"));

    let table = match &config.params {
        ExperimentParams::PrrSweep { .. } => run_prr_sweep(&config.sweep_scenario()?)?.to_table(),
        ExperimentParams::NodeCompare { .. } => {
            let (single, multi) = config.node_compare_scenarios()?;
            compare_node_configs(&single, &multi)?.to_table()
        }
        ExperimentParams::Region { .. } => {
            region_table(&region_bounds_with(config.deployment()?, &config.region_search()?)?)
        }
        ExperimentParams::RelaySweep { .. } => run_relay_sweep(&config.relay_experiment()?)?.to_table(),
        ExperimentParams::Entropy {
            trace,
            feature,
            radio_range_m,
        } => {
            let bytes = std::fs::read(trace)
                .map_err(|e| Error::Config(format!("cannot read trace {}: {e}", trace.display())))?;
            hasher.update(&bytes);
            let trace = Trace::from_reader(bytes.as_slice())?;
            entropy_report(&trace, *feature, *radio_range_m)?.to_table()
        }
        ExperimentParams::RouteStability { routes } => route_stability_table(routes)?,
    };
    Ok(Artifact {
        kind: config.kind(),
        config_hash: hex::encode(hasher.finalize()),
        table,
    })
}
