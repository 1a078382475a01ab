//! Seeded Monte-Carlo sweeps of packet reception rate versus distance.
//!
//! Each node gets a transmitter/receiver hardware pair drawn once per sweep.
//! Shadowing is redrawn for every packet. At each distance the node's
//! `sims_per_distance / node_count` samples come from a stream keyed by
//! `(distance index, node index)`, so results are identical for any number
//! of worker threads.

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::channel::{draw_link_hardware, packet_reception_rate, sample_snr, DeploymentScenario, RadioInstance};
use crate::error::{Error, Result};
use crate::output::{fmt_num, CsvTable};
use crate::rng::{substream, StreamKind};

pub const DEFAULT_CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepScenario {
    pub deployment: DeploymentScenario,
    distances: Vec<f64>,
    pub sims_per_distance: usize,
    pub node_count: usize,
    pub seed: u64,
    pub confidence_level: f64,
}

impl SweepScenario {
    /// Validates the scenario. The distance grid is sorted ascending;
    /// duplicates are rejected.
    pub fn new(
        deployment: DeploymentScenario,
        mut distances: Vec<f64>,
        sims_per_distance: usize,
        node_count: usize,
        seed: u64,
    ) -> Result<Self> {
        deployment.validate()?;
        if distances.is_empty() {
            return Err(Error::Empty("distance grid"));
        }
        if distances.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::invalid("distances", "must be positive and finite"));
        }
        distances.sort_by(f64::total_cmp);
        if distances.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("distances", "duplicate distance in grid"));
        }
        if sims_per_distance == 0 {
            return Err(Error::invalid("sims", "must be at least 1"));
        }
        if node_count == 0 {
            return Err(Error::invalid("nodes", "must be at least 1"));
        }
        if !sims_per_distance.is_multiple_of(node_count) {
            return Err(Error::invalid(
                "sims",
                format!("{sims_per_distance} simulations do not split evenly over {node_count} nodes"),
            ));
        }
        Ok(Self {
            deployment,
            distances,
            sims_per_distance,
            node_count,
            seed,
            confidence_level: DEFAULT_CONFIDENCE,
        })
    }

    pub fn with_confidence(mut self, level: f64) -> Result<Self> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::invalid("confidence", "must lie in (0, 1)"));
        }
        self.confidence_level = level;
        Ok(self)
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn samples_per_node(&self) -> usize {
        self.sims_per_distance / self.node_count
    }
}

/// Sample mean, unbiased standard deviation and normal-approximation
/// confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Two-sided standard normal quantile for a confidence level.
pub fn z_value(confidence_level: f64) -> Result<f64> {
    if !(confidence_level > 0.0 && confidence_level < 1.0) {
        return Err(Error::invalid("confidence", "must lie in (0, 1)"));
    }
    let n = Normal::standard();
    Ok(n.inverse_cdf(0.5 + confidence_level / 2.0))
}

/// Summary of PRR samples; the interval is clamped to `[0, 1]`.
pub fn summarize(samples: &[f64], confidence_level: f64) -> Result<Summary> {
    summarize_within(samples, confidence_level, 0.0, 1.0)
}

/// Summary with the interval clamped to `[lo, hi]`.
pub fn summarize_within(samples: &[f64], confidence_level: f64, lo: f64, hi: f64) -> Result<Summary> {
    if samples.is_empty() {
        return Err(Error::Empty("sample set"));
    }
    let z = z_value(confidence_level)?;
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        let ss: f64 = samples.iter().map(|x| (x - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let half = z * std / (n as f64).sqrt();
    Ok(Summary {
        n,
        mean,
        std,
        ci_lo: (mean - half).clamp(lo, hi).min(mean),
        ci_hi: (mean + half).clamp(lo, hi).max(mean),
    })
}

fn central_moments(samples: &[f64], mean: f64) -> (f64, f64) {
    let nf = samples.len() as f64;
    let m2 = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / nf;
    let m4 = samples.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / nf;
    (m2, m4)
}

/// Delta-method standard error of the std of `n` draws from a population
/// with central moments `m2`, `m4`.
fn std_se_from_moments(m2: f64, m4: f64, n: usize) -> f64 {
    if n < 2 || m2 == 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    let var_s2 = ((m4 - (nf - 3.0) / (nf - 1.0) * m2 * m2) / nf).max(0.0);
    var_s2.sqrt() / (2.0 * m2.sqrt())
}

/// Delta-method standard error of the sample standard deviation, from the
/// sample's own fourth central moment. Zero when the sample is constant.
pub fn std_standard_error(samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let (m2, m4) = central_moments(samples, mean);
    std_se_from_moments(m2 * n as f64 / (n as f64 - 1.0), m4, n)
}

/// Standard error of `std(b) − std(a)` when both samples come from one
/// population, with the moments estimated from the two samples pooled.
pub fn pooled_std_difference_se(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() + b.len();
    if a.len() < 2 || b.len() < 2 {
        return 0.0;
    }
    let mean = a.iter().chain(b).sum::<f64>() / n as f64;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (m2, m4) = central_moments(&pooled, mean);
    let m2 = m2 * n as f64 / (n as f64 - 1.0);
    std_se_from_moments(m2, m4, a.len()).hypot(std_se_from_moments(m2, m4, b.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceRecord {
    pub distance_m: f64,
    #[serde(flatten)]
    pub summary: Summary,
    #[serde(skip)]
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub records: Vec<DistanceRecord>,
}

impl SweepResult {
    pub const CSV_HEADER: [&'static str; 6] = ["distance_m", "n", "mean_prr", "std_prr", "ci_lo", "ci_hi"];

    pub fn std_curve(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.summary.std).collect()
    }

    pub fn distances(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.distance_m).collect()
    }

    /// Distance of the largest per-distance standard deviation (first one on ties).
    pub fn std_peak_distance(&self) -> f64 {
        let mut best = &self.records[0];
        for r in &self.records[1..] {
            if r.summary.std > best.summary.std {
                best = r;
            }
        }
        best.distance_m
    }

    /// Width of the span of grid distances whose standard deviation exceeds
    /// `threshold` (last such distance minus the first; 0 if none).
    pub fn spread_width(&self, threshold: f64) -> f64 {
        let above: Vec<f64> = self
            .records
            .iter()
            .filter(|r| r.summary.std > threshold)
            .map(|r| r.distance_m)
            .collect();
        match (above.first(), above.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    pub fn to_table(&self) -> CsvTable {
        let mut t = CsvTable::new(&Self::CSV_HEADER);
        for r in &self.records {
            let s = &r.summary;
            t.push(vec![
                fmt_num(r.distance_m),
                s.n.to_string(),
                fmt_num(s.mean),
                fmt_num(s.std),
                fmt_num(s.ci_lo),
                fmt_num(s.ci_hi),
            ]);
        }
        t
    }
}

/// Link hardware for each node of the sweep.
pub fn node_hardware(scenario: &SweepScenario) -> Vec<RadioInstance> {
    let dep = &scenario.deployment;
    (0..scenario.node_count)
        .map(|node| {
            let mut rng = substream(scenario.seed, StreamKind::Hardware, node, 0);
            draw_link_hardware(&dep.hardware, &dep.radio, &mut rng)
        })
        .collect()
}

pub fn run_prr_sweep(scenario: &SweepScenario) -> Result<SweepResult> {
    let nodes = node_hardware(scenario);
    let dep = &scenario.deployment;
    let per_node = scenario.samples_per_node();
    let f = dep.radio.frame_bits();

    let records = scenario
        .distances
        .par_iter()
        .enumerate()
        .map(|(di, &d)| -> Result<DistanceRecord> {
            let mut samples = Vec::with_capacity(scenario.sims_per_distance);
            for (ni, hw) in nodes.iter().enumerate() {
                let mut rng = substream(scenario.seed, StreamKind::Shadowing, di, ni);
                for _ in 0..per_node {
                    let snr = sample_snr(d, dep, Some(hw), &mut rng)?;
                    samples.push(packet_reception_rate(snr, f, &dep.radio.modulation));
                }
            }
            let summary = summarize(&samples, scenario.confidence_level)?;
            Ok(DistanceRecord {
                distance_m: d,
                summary,
                samples,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { records })
}

/// Single-node and multi-node sweeps over the same grid, with the
/// per-distance difference `std_multi − std_single`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeComparison {
    pub single: SweepResult,
    pub multi: SweepResult,
    pub std_delta: Vec<f64>,
}

impl NodeComparison {
    pub const CSV_HEADER: [&'static str; 8] = [
        "distance_m",
        "n",
        "mean_prr_single",
        "std_prr_single",
        "mean_prr_multi",
        "std_prr_multi",
        "delta_std",
        "delta_std_se",
    ];

    /// Pooled standard error of each `std_delta` entry.
    pub fn pooled_standard_errors(&self) -> Vec<f64> {
        self.single
            .records
            .iter()
            .zip(&self.multi.records)
            .map(|(a, b)| pooled_std_difference_se(&a.samples, &b.samples))
            .collect()
    }

    pub fn to_table(&self) -> CsvTable {
        let mut t = CsvTable::new(&Self::CSV_HEADER);
        let se = self.pooled_standard_errors();
        for (i, (a, b)) in self.single.records.iter().zip(&self.multi.records).enumerate() {
            t.push(vec![
                fmt_num(a.distance_m),
                a.summary.n.to_string(),
                fmt_num(a.summary.mean),
                fmt_num(a.summary.std),
                fmt_num(b.summary.mean),
                fmt_num(b.summary.std),
                fmt_num(self.std_delta[i]),
                fmt_num(se[i]),
            ]);
        }
        t
    }
}

pub fn compare_node_configs(single: &SweepScenario, multi: &SweepScenario) -> Result<NodeComparison> {
    if single.deployment != multi.deployment {
        return Err(Error::invalid(
            "deployment",
            "single and multi-node runs must share the deployment",
        ));
    }
    if single.distances != multi.distances {
        return Err(Error::invalid(
            "distances",
            "single and multi-node runs must share the grid",
        ));
    }
    if single.sims_per_distance != multi.sims_per_distance {
        return Err(Error::invalid(
            "sims",
            "single and multi-node runs must use the same total",
        ));
    }
    let single = run_prr_sweep(single)?;
    let multi = run_prr_sweep(multi)?;
    let std_delta = single
        .records
        .iter()
        .zip(&multi.records)
        .map(|(a, b)| b.summary.std - a.summary.std)
        .collect();
    Ok(NodeComparison {
        single,
        multi,
        std_delta,
    })
}
