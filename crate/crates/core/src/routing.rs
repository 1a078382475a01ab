//! Data-driven routing metrics.
//!
//! ETX is the expected number of transmissions over a link. ETD, LD and ELD
//! divide ETX, MAC latency and expected MAC latency by the geographic
//! progress a forwarder makes toward the destination,
//! `L(S,D) − L(R,D)`. A forwarder that makes no progress scores `∞`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{packet_reception_rate, sample_snr, DeploymentScenario};
use crate::error::{Error, Result};
use crate::montecarlo::{summarize, summarize_within, DEFAULT_CONFIDENCE};
use crate::output::{fmt_num, CsvTable};
use crate::rng::{substream, StreamKind};

pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetransmissionPolicy {
    max_retx: u32,
    fail_value: u32,
}

impl Default for RetransmissionPolicy {
    fn default() -> Self {
        Self {
            max_retx: 7,
            fail_value: 8,
        }
    }
}

impl RetransmissionPolicy {
    pub fn new(max_retx: u32, fail_value: u32) -> Result<Self> {
        if max_retx < 1 {
            return Err(Error::invalid("max_retx", "must be at least 1"));
        }
        if fail_value < max_retx {
            return Err(Error::invalid("fail_value", "must be at least max_retx"));
        }
        Ok(Self { max_retx, fail_value })
    }

    pub fn max_retx(&self) -> u32 {
        self.max_retx
    }

    pub fn fail_value(&self) -> u32 {
        self.fail_value
    }
}

/// `1 / pdr`, infinite for a dead link.
pub fn etx_from_pdr(pdr: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&pdr) {
        return Err(Error::Domain {
            what: "PDR",
            value: pdr,
        });
    }
    Ok(if pdr == 0.0 { f64::INFINITY } else { 1.0 / pdr })
}

/// Transmits until the first success or until `max_retx` attempts are
/// spent. Returns the attempt count, or the policy's failure charge.
pub fn simulate_attempts<R: Rng + ?Sized>(prr: f64, policy: &RetransmissionPolicy, rng: &mut R) -> u32 {
    let p = prr.clamp(0.0, 1.0);
    for attempt in 1..=policy.max_retx {
        if rng.random_bool(p) {
            return attempt;
        }
    }
    policy.fail_value
}

/// Mean of [`simulate_attempts`] for a fixed `prr`.
pub fn expected_attempts(prr: f64, policy: &RetransmissionPolicy) -> f64 {
    let p = prr.clamp(0.0, 1.0);
    let q = 1.0 - p;
    let m = policy.max_retx as i32;
    // Σ_{k=1..m} k p q^{k-1} = (1 − (m+1) q^m + m q^{m+1}) / p
    let success_part = if p == 0.0 {
        0.0
    } else {
        (1.0 - (m as f64 + 1.0) * q.powi(m) + m as f64 * q.powi(m + 1)) / p
    };
    success_part + policy.fail_value as f64 * q.powi(m)
}

#[inline]
fn per_progress(numerator: f64, l_sd: f64, l_rd: f64) -> f64 {
    if l_sd > l_rd {
        numerator / (l_sd - l_rd)
    } else {
        f64::INFINITY
    }
}

/// ETX per meter of progress.
pub fn etd(etx: f64, l_sd: f64, l_rd: f64) -> f64 {
    per_progress(etx, l_sd, l_rd)
}

/// MAC latency per meter of progress.
pub fn ld(latency: f64, l_sd: f64, l_rd: f64) -> f64 {
    per_progress(latency, l_sd, l_rd)
}

/// Expected MAC latency per meter of progress.
pub fn eld(expected_latency: f64, l_sd: f64, l_rd: f64) -> f64 {
    per_progress(expected_latency, l_sd, l_rd)
}

/// ELD with the expectation taken as the mean of observed latencies.
pub fn eld_from_samples(latencies: &[f64], l_sd: f64, l_rd: f64) -> Result<f64> {
    if latencies.is_empty() {
        return Err(Error::Empty("latency samples"));
    }
    let mean = latencies.iter().sum::<f64>() / latencies.len() as f64;
    Ok(eld(mean, l_sd, l_rd))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForwarderCandidate {
    pub id: NodeId,
    pub etx_estimate: f64,
    /// Expected MAC latency over the link, if measured.
    pub latency_estimate: Option<f64>,
    pub dist_to_dest: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForwardingMetric {
    Etd,
    Eld,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Forwarder {
    Selected(NodeId),
    /// Every candidate scores `∞`.
    NoForwarder,
}

impl ForwarderCandidate {
    pub fn score(&self, l_sd: f64, metric: ForwardingMetric) -> f64 {
        match metric {
            ForwardingMetric::Etd => etd(self.etx_estimate, l_sd, self.dist_to_dest),
            ForwardingMetric::Eld => match self.latency_estimate {
                Some(lat) => eld(lat, l_sd, self.dist_to_dest),
                None => f64::INFINITY,
            },
        }
    }
}

/// Candidate with the lowest metric; ties go to the smallest id.
pub fn select_forwarder(candidates: &[ForwarderCandidate], l_sd: f64, metric: ForwardingMetric) -> Result<Forwarder> {
    if candidates.is_empty() {
        return Err(Error::Empty("candidate set"));
    }
    let best = candidates
        .iter()
        .map(|c| (c.score(l_sd, metric), c.id))
        .filter(|(s, _)| s.is_finite())
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(match best {
        Some((_, id)) => Forwarder::Selected(id),
        None => Forwarder::NoForwarder,
    })
}

/// Sender, relay and destination on a line; the relay sits `d` meters from
/// the sender so its distance to the destination is `l_sd − d`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayExperiment {
    pub deployment: DeploymentScenario,
    pub l_sd: f64,
    relay_distances: Vec<f64>,
    pub policy: RetransmissionPolicy,
    pub sims: usize,
    pub seed: u64,
    /// MAC latency of one transmission attempt (time units).
    pub slot_time: f64,
    pub confidence_level: f64,
}

impl RelayExperiment {
    pub const DEFAULT_L_SD: f64 = 40.0;

    pub fn new(
        deployment: DeploymentScenario,
        l_sd: f64,
        relay_distances: Vec<f64>,
        policy: RetransmissionPolicy,
        sims: usize,
        seed: u64,
    ) -> Result<Self> {
        deployment.validate()?;
        if !(l_sd > 0.0 && l_sd.is_finite()) {
            return Err(Error::invalid("l_sd", "must be positive"));
        }
        if relay_distances.is_empty() {
            return Err(Error::Empty("relay distance grid"));
        }
        if relay_distances.iter().any(|d| !(*d > 0.0 && *d < l_sd)) {
            return Err(Error::invalid("relay_distances", "each must lie in (0, l_sd)"));
        }
        if relay_distances.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("relay_distances", "must be strictly ascending"));
        }
        if sims == 0 {
            return Err(Error::invalid("sims", "must be at least 1"));
        }
        Ok(Self {
            deployment,
            l_sd,
            relay_distances,
            policy,
            sims,
            seed,
            slot_time: 1.0,
            confidence_level: DEFAULT_CONFIDENCE,
        })
    }

    /// Relays at 1, 2, …, l_sd − 1 meters with default policy.
    pub fn standard_setup(deployment: DeploymentScenario, sims: usize, seed: u64) -> Result<Self> {
        let grid = (1..40).map(f64::from).collect();
        Self::new(
            deployment,
            Self::DEFAULT_L_SD,
            grid,
            RetransmissionPolicy::default(),
            sims,
            seed,
        )
    }

    pub fn relay_distances(&self) -> &[f64] {
        &self.relay_distances
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelayRecord {
    pub relay_distance_m: f64,
    pub n: usize,
    pub mean_etx: f64,
    pub etx_ci_lo: f64,
    pub etx_ci_hi: f64,
    pub etd: f64,
    pub eld: f64,
    pub mean_prr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelaySweep {
    pub records: Vec<RelayRecord>,
}

impl RelaySweep {
    pub const CSV_HEADER: [&'static str; 7] = [
        "relay_distance_m",
        "n",
        "mean_etx",
        "etx_ci_lo",
        "etx_ci_hi",
        "etd",
        "mean_prr",
    ];

    /// Record with the lowest ETD (first on ties).
    pub fn argmin_etd(&self) -> &RelayRecord {
        let mut best = &self.records[0];
        for r in &self.records[1..] {
            if r.etd < best.etd {
                best = r;
            }
        }
        best
    }

    pub fn to_table(&self) -> CsvTable {
        let mut t = CsvTable::new(&Self::CSV_HEADER);
        for r in &self.records {
            t.push(vec![
                fmt_num(r.relay_distance_m),
                r.n.to_string(),
                fmt_num(r.mean_etx),
                fmt_num(r.etx_ci_lo),
                fmt_num(r.etx_ci_hi),
                fmt_num(r.etd),
                fmt_num(r.mean_prr),
            ]);
        }
        t
    }
}

pub fn run_relay_sweep(exp: &RelayExperiment) -> Result<RelaySweep> {
    let dep = &exp.deployment;
    let f = dep.radio.frame_bits();
    let records = exp
        .relay_distances
        .par_iter()
        .enumerate()
        .map(|(i, &d)| -> Result<RelayRecord> {
            let mut rng = substream(exp.seed, StreamKind::Relay, i, 0);
            let mut prrs = Vec::with_capacity(exp.sims);
            let mut attempts = Vec::with_capacity(exp.sims);
            for _ in 0..exp.sims {
                let snr = sample_snr(d, dep, None, &mut rng)?;
                let prr = packet_reception_rate(snr, f, &dep.radio.modulation);
                prrs.push(prr);
                attempts.push(simulate_attempts(prr, &exp.policy, &mut rng) as f64);
            }
            let etx = summarize_within(&attempts, exp.confidence_level, 1.0, exp.policy.fail_value() as f64)?;
            let prr = summarize(&prrs, exp.confidence_level)?;
            let l_rd = exp.l_sd - d;
            Ok(RelayRecord {
                relay_distance_m: d,
                n: exp.sims,
                mean_etx: etx.mean,
                etx_ci_lo: etx.ci_lo,
                etx_ci_hi: etx.ci_hi,
                etd: etd(etx.mean, exp.l_sd, l_rd),
                eld: eld(etx.mean * exp.slot_time, exp.l_sd, l_rd),
                mean_prr: prr.mean,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RelaySweep { records })
}
