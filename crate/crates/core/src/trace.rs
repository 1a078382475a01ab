//! Mobility trace ingestion and per-node entropy reports.
//!
//! Trace CSV columns: `node_id, t_s, x_m, y_m, vx_mps, vy_mps`.

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::entropy::{mobility_feature, node_entropy, speed_feature, FeatureWindow, KinematicSample, NeighborFeature};
use crate::error::{Error, Result};
use crate::output::{fmt_num, CsvTable};
use crate::routing::NodeId;

#[derive(Debug, Clone, Copy, Deserialize)]
struct TraceRow {
    node_id: NodeId,
    t_s: f64,
    x_m: f64,
    y_m: f64,
    vx_mps: f64,
    vy_mps: f64,
}

/// Time-ordered samples per node.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub nodes: BTreeMap<NodeId, Vec<KinematicSample>>,
}

impl Trace {
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut nodes: BTreeMap<NodeId, Vec<KinematicSample>> = BTreeMap::new();
        for row in rdr.deserialize() {
            let r: TraceRow = row?;
            let vals = [r.t_s, r.x_m, r.y_m, r.vx_mps, r.vy_mps];
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(
                    "trace",
                    format!("non-finite value for node {}", r.node_id),
                ));
            }
            nodes.entry(r.node_id).or_default().push(KinematicSample {
                position: [r.x_m, r.y_m],
                velocity: [r.vx_mps, r.vy_mps],
                timestamp: r.t_s,
            });
        }
        for (id, series) in nodes.iter_mut() {
            series.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
            if series.windows(2).any(|w| w[0].timestamp == w[1].timestamp) {
                return Err(Error::invalid("trace", format!("duplicate timestamp for node {id}")));
            }
        }
        Ok(Self { nodes })
    }

    pub fn from_csv_str(s: &str) -> Result<Self> {
        Self::from_reader(s.as_bytes())
    }

    /// Samples of `m` and `n` restricted to their shared timestamps.
    pub fn aligned(&self, m: NodeId, n: NodeId) -> (Vec<KinematicSample>, Vec<KinematicSample>) {
        let (Some(sm), Some(sn)) = (self.nodes.get(&m), self.nodes.get(&n)) else {
            return (Vec::new(), Vec::new());
        };
        let (mut i, mut j) = (0, 0);
        let (mut am, mut an) = (Vec::new(), Vec::new());
        while i < sm.len() && j < sn.len() {
            match sm[i].timestamp.total_cmp(&sn[j].timestamp) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    am.push(sm[i]);
                    an.push(sn[j]);
                    i += 1;
                    j += 1;
                }
            }
        }
        (am, an)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    /// Mean relative speed.
    #[default]
    Speed,
    /// Mean predicted relative displacement over the radio range.
    Mobility,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureRow {
    pub node_id: NodeId,
    pub neighbor_id: NodeId,
    pub feature: f64,
    /// `None` when every feature of the node is zero.
    pub node_entropy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub rows: Vec<FeatureRow>,
}

impl EntropyReport {
    pub const CSV_HEADER: [&'static str; 4] = ["node_id", "neighbor_id", "feature", "node_entropy"];

    pub fn to_table(&self) -> CsvTable {
        let mut t = CsvTable::new(&Self::CSV_HEADER);
        for r in &self.rows {
            t.push(vec![
                r.node_id.to_string(),
                r.neighbor_id.to_string(),
                fmt_num(r.feature),
                r.node_entropy.map(fmt_num).unwrap_or_default(),
            ]);
        }
        t
    }
}

/// Features and normalized entropy for every node. A node's neighbours are
/// the nodes within `radio_range` at one or more shared timestamps.
pub fn entropy_report(trace: &Trace, kind: FeatureKind, radio_range: f64) -> Result<EntropyReport> {
    if !(radio_range > 0.0 && radio_range.is_finite()) {
        return Err(Error::invalid("radio_range_m", "must be positive"));
    }
    let mut rows = Vec::new();
    for &m in trace.nodes.keys() {
        let mut features = Vec::new();
        for &n in trace.nodes.keys().filter(|&&n| n != m) {
            let (sm, sn) = trace.aligned(m, n);
            let in_range = sm
                .iter()
                .zip(&sn)
                .any(|(a, b)| (a.position[0] - b.position[0]).hypot(a.position[1] - b.position[1]) <= radio_range);
            if !in_range {
                continue;
            }
            let a_mn = match kind {
                FeatureKind::Speed => speed_feature(&sm, &sn)?,
                FeatureKind::Mobility => {
                    let window = FeatureWindow::from_series(&sm, radio_range)?;
                    mobility_feature(&sm, &sn, &window)?
                }
            };
            features.push(NeighborFeature { neighbor_id: n, a_mn });
        }
        if features.is_empty() {
            continue;
        }
        let h = match node_entropy(&features) {
            Ok(h) => Some(h),
            Err(Error::DegenerateFeatures) => None,
            Err(e) => return Err(e),
        };
        rows.extend(features.iter().map(|f| FeatureRow {
            node_id: m,
            neighbor_id: f.neighbor_id,
            feature: f.a_mn,
            node_entropy: h,
        }));
    }
    Ok(EntropyReport { rows })
}
