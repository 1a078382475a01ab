//! Entropy measures for link and route stability.
//!
//! Covers Shannon entropy, pairwise link entropy, relative-mobility
//! features between two nodes, the normalized node entropy built on them,
//! route-stability products, and a quality-weighted spatiotemporal entropy
//! over a node's neighbours.
//!
//! Conventions: `0·log 0 = 0`; a node with a single neighbour has entropy 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::routing::NodeId;

/// Tolerance on `Σ p = 1`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
    Custom(f64),
}

impl LogBase {
    pub fn ln_base(self) -> f64 {
        match self {
            LogBase::Natural => 1.0,
            LogBase::Two => std::f64::consts::LN_2,
            LogBase::Ten => std::f64::consts::LN_10,
            LogBase::Custom(b) => b.ln(),
        }
    }

    fn validate(self) -> Result<()> {
        let lb = self.ln_base();
        if lb.is_finite() && lb > 0.0 {
            Ok(())
        } else {
            Err(Error::invalid("log_base", "base must be finite and greater than 1"))
        }
    }
}

/// `p·ln p` with the continuity convention at 0.
#[inline]
fn plogp(p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * p.ln()
    }
}

/// `−Σ p·log p`.
pub fn shannon_entropy(probs: &[f64], base: LogBase) -> Result<f64> {
    base.validate()?;
    if probs.is_empty() {
        return Err(Error::Empty("probability list"));
    }
    if let Some(&bad) = probs.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
        return Err(Error::Domain {
            what: "probability",
            value: bad,
        });
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized { sum });
    }
    let h = -probs.iter().copied().map(plogp).sum::<f64>() / base.ln_base();
    Ok(h.max(0.0))
}

/// Entropy in bits of a joint distribution over node pairs.
pub fn link_entropy<'a>(joint: impl IntoIterator<Item = (&'a (NodeId, NodeId), &'a f64)>) -> Result<f64> {
    let probs: Vec<f64> = joint.into_iter().map(|(_, p)| *p).collect();
    shannon_entropy(&probs, LogBase::Two)
}

pub type Vec2 = [f64; 2];

#[inline]
fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
fn norm(v: Vec2) -> f64 {
    v[0].hypot(v[1])
}

/// `v(m) − v(n)`.
pub fn relative_velocity(vm: Vec2, vn: Vec2) -> Vec2 {
    sub(vm, vn)
}

/// `p(m) − p(n)`.
pub fn relative_position(pm: Vec2, pn: Vec2) -> Vec2 {
    sub(pm, pn)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinematicSample {
    pub position: Vec2,
    pub velocity: Vec2,
    pub timestamp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureWindow {
    dt_values: Vec<f64>,
    radio_range: f64,
}

impl FeatureWindow {
    pub fn new(dt_values: Vec<f64>, radio_range: f64) -> Result<Self> {
        if dt_values.is_empty() {
            return Err(Error::Empty("feature window"));
        }
        if !(radio_range > 0.0 && radio_range.is_finite()) {
            return Err(Error::invalid("radio_range_m", "must be positive"));
        }
        if dt_values.iter().any(|d| !d.is_finite()) {
            return Err(Error::invalid("dt_values", "must be finite"));
        }
        Ok(Self { dt_values, radio_range })
    }

    /// Window whose prediction horizons are the forward timestamp gaps of
    /// `series`; the last sample reuses the previous gap (0 for one sample).
    pub fn from_series(series: &[KinematicSample], radio_range: f64) -> Result<Self> {
        let mut dts: Vec<f64> = series.windows(2).map(|w| w[1].timestamp - w[0].timestamp).collect();
        if !series.is_empty() {
            dts.push(dts.last().copied().unwrap_or(0.0));
        }
        Self::new(dts, radio_range)
    }

    pub fn sample_count(&self) -> usize {
        self.dt_values.len()
    }

    pub fn dt_values(&self) -> &[f64] {
        &self.dt_values
    }

    pub fn radio_range(&self) -> f64 {
        self.radio_range
    }
}

fn check_aligned(series_m: &[KinematicSample], series_n: &[KinematicSample]) -> Result<()> {
    if series_m.len() != series_n.len() {
        return Err(Error::LengthMismatch {
            left: series_m.len(),
            right: series_n.len(),
        });
    }
    if series_m.is_empty() {
        return Err(Error::Empty("kinematic series"));
    }
    for (i, (a, b)) in series_m.iter().zip(series_n).enumerate() {
        if a.timestamp != b.timestamp {
            return Err(Error::TimestampMismatch { index: i });
        }
        if i > 0 && !(a.timestamp > series_m[i - 1].timestamp) {
            return Err(Error::invalid("timestamp", "must be strictly increasing"));
        }
    }
    Ok(())
}

/// Mean relative speed between two nodes over aligned samples.
pub fn speed_feature(series_m: &[KinematicSample], series_n: &[KinematicSample]) -> Result<f64> {
    check_aligned(series_m, series_n)?;
    let n = series_m.len() as f64;
    let total: f64 = series_m
        .iter()
        .zip(series_n)
        .map(|(a, b)| norm(relative_velocity(a.velocity, b.velocity)))
        .sum();
    Ok(total / n)
}

/// Mean predicted relative displacement `|p + v·Δt|`, in units of the
/// radio range.
pub fn mobility_feature(
    series_m: &[KinematicSample],
    series_n: &[KinematicSample],
    window: &FeatureWindow,
) -> Result<f64> {
    check_aligned(series_m, series_n)?;
    if window.sample_count() != series_m.len() {
        return Err(Error::LengthMismatch {
            left: window.sample_count(),
            right: series_m.len(),
        });
    }
    let total: f64 = series_m
        .iter()
        .zip(series_n)
        .zip(&window.dt_values)
        .map(|((a, b), dt)| {
            let p = relative_position(a.position, b.position);
            let v = relative_velocity(a.velocity, b.velocity);
            norm([p[0] + v[0] * dt, p[1] + v[1] * dt])
        })
        .sum();
    Ok(total / (series_m.len() as f64 * window.radio_range))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeighborFeature {
    pub neighbor_id: NodeId,
    pub a_mn: f64,
}

/// Normalized entropy of a node's neighbour features, in `[0, 1]`.
pub fn node_entropy(features: &[NeighborFeature]) -> Result<f64> {
    if features.is_empty() {
        return Err(Error::Empty("neighbour feature set"));
    }
    if let Some(bad) = features.iter().find(|f| !(f.a_mn >= 0.0 && f.a_mn.is_finite())) {
        return Err(Error::Domain {
            what: "feature",
            value: bad.a_mn,
        });
    }
    let total: f64 = features.iter().map(|f| f.a_mn).sum();
    if total == 0.0 {
        return Err(Error::DegenerateFeatures);
    }
    if features.len() == 1 {
        return Ok(0.0);
    }
    let h = -features.iter().map(|f| plogp(f.a_mn / total)).sum::<f64>();
    Ok((h / (features.len() as f64).ln()).clamp(0.0, 1.0))
}

fn check_unit(h: f64) -> Result<()> {
    if (0.0..=1.0).contains(&h) {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "route entropy",
            value: h,
        })
    }
}

/// `Π H_i`.
pub fn route_stability_product(h_values: &[f64]) -> Result<f64> {
    if h_values.is_empty() {
        return Err(Error::Empty("route"));
    }
    h_values.iter().try_for_each(|h| check_unit(*h))?;
    Ok(h_values.iter().product())
}

/// `−Σ ln H_i`. A zero entry makes the route infinitely unstable.
pub fn route_stability_log(h_values: &[f64]) -> Result<f64> {
    if h_values.is_empty() {
        return Err(Error::Empty("route"));
    }
    h_values.iter().try_for_each(|h| check_unit(*h))?;
    if h_values.contains(&0.0) {
        log::warn!("route contains a hop with zero entropy; RS2 is infinite");
        return Ok(f64::INFINITY);
    }
    Ok(-h_values.iter().map(|h| h.ln()).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityLink {
    pub neighbor_id: NodeId,
    /// Spatiotemporal stability with the neighbour.
    pub p: f64,
    /// Link quality.
    pub k: f64,
}

impl StabilityLink {
    pub fn new(neighbor_id: NodeId, p: f64, k: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain {
                what: "stability p",
                value: p,
            });
        }
        if !(0.0..=1.0).contains(&k) {
            return Err(Error::Domain {
                what: "quality k",
                value: k,
            });
        }
        Ok(Self { neighbor_id, p, k })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    /// `(1/N)·Σ k·p·log p`, which is never positive.
    #[default]
    AsWritten,
    /// Magnitude of the as-written value, for ranking.
    Negated,
}

/// Quality-weighted entropy over a node's neighbours.
pub fn spatiotemporal_entropy(links: &[StabilityLink], base: LogBase, sign: SignConvention) -> Result<f64> {
    base.validate()?;
    if links.is_empty() {
        return Err(Error::Empty("neighbour link set"));
    }
    for l in links {
        StabilityLink::new(l.neighbor_id, l.p, l.k)?;
    }
    let sum: f64 = links.iter().map(|l| l.k * plogp(l.p)).sum();
    let e = sum / base.ln_base() / links.len() as f64;
    Ok(match sign {
        SignConvention::AsWritten => e,
        SignConvention::Negated => e.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn ks(t: f64, p: Vec2, v: Vec2) -> KinematicSample {
        KinematicSample {
            position: p,
            velocity: v,
            timestamp: t,
        }
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_entropy(&[1.0], LogBase::Natural).unwrap(), 0.0);
        assert!((shannon_entropy(&[0.5, 0.5], LogBase::Two).unwrap() - 1.0).abs() < 1e-15);
        assert!((shannon_entropy(&[0.25, 0.75], LogBase::Natural).unwrap() - 0.562335).abs() < 5e-7);
        assert!(shannon_entropy(&[0.0, 1.0], LogBase::Natural).unwrap() == 0.0);
    }

    #[test]
    fn shannon_errors() {
        match shannon_entropy(&[0.5, 0.6], LogBase::Natural) {
            Err(Error::NotNormalized { sum }) => assert!((sum - 1.1).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(shannon_entropy(&[], LogBase::Natural).is_err());
        assert!(shannon_entropy(&[1.5, -0.5], LogBase::Natural).is_err());
        assert!(shannon_entropy(&[1.0], LogBase::Custom(1.0)).is_err());
    }

    #[test]
    fn link_entropy_examples() {
        let mut j = BTreeMap::new();
        j.insert((1, 2), 1.0);
        assert_eq!(link_entropy(&j).unwrap(), 0.0);
        let j: BTreeMap<(NodeId, NodeId), f64> =
            [((1, 2), 0.25), ((2, 1), 0.25), ((1, 3), 0.25), ((3, 2), 0.25)].into();
        assert!((link_entropy(&j).unwrap() - 2.0).abs() < 1e-15);
        let j: BTreeMap<(NodeId, NodeId), f64> = [((1, 2), 0.5), ((2, 3), 0.25), ((1, 3), 0.25)].into();
        assert!((link_entropy(&j).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn relative_vectors() {
        assert_eq!(relative_velocity([1.0, 2.0], [1.0, 2.0]), [0.0, 0.0]);
        assert_eq!(relative_velocity([1.5, -2.0], [0.0, 0.0]), [1.5, -2.0]);
        let a = [3.0, -1.0];
        let b = [0.5, 4.0];
        let ab = relative_velocity(a, b);
        let ba = relative_velocity(b, a);
        assert_eq!(ab, [-ba[0], -ba[1]]);
        assert_eq!(relative_position([10.0, 0.0], [4.0, 0.0]), [6.0, 0.0]);
    }

    #[test]
    fn speed_feature_examples() {
        let m = vec![ks(0.0, [0.0; 2], [1.0, 1.0]), ks(1.0, [0.0; 2], [2.0, 0.0])];
        assert_eq!(speed_feature(&m, &m).unwrap(), 0.0);
        let a = vec![ks(0.0, [0.0; 2], [3.0, 4.0])];
        let b = vec![ks(0.0, [0.0; 2], [0.0, 0.0])];
        assert_eq!(speed_feature(&a, &b).unwrap(), 5.0);
        let a = vec![ks(0.0, [0.0; 2], [3.0, 0.0]), ks(1.0, [0.0; 2], [0.0, 4.0])];
        let b = vec![ks(0.0, [0.0; 2], [0.0; 2]), ks(1.0, [0.0; 2], [0.0; 2])];
        assert_eq!(speed_feature(&a, &b).unwrap(), 3.5);
        assert!(matches!(speed_feature(&a, &b[..1]), Err(Error::LengthMismatch { .. })));
        let c = vec![ks(0.0, [0.0; 2], [0.0; 2]), ks(2.0, [0.0; 2], [0.0; 2])];
        assert!(matches!(
            speed_feature(&a, &c),
            Err(Error::TimestampMismatch { index: 1 })
        ));
    }

    #[test]
    fn mobility_feature_examples() {
        let a = vec![ks(0.0, [10.0, 0.0], [1.0, 1.0])];
        let w = FeatureWindow::new(vec![2.0], 20.0).unwrap();
        assert_eq!(mobility_feature(&a, &a, &w).unwrap(), 0.0);

        let a = vec![ks(0.0, [10.0, 0.0], [0.0; 2])];
        let b = vec![ks(0.0, [0.0, 0.0], [0.0; 2])];
        assert_eq!(mobility_feature(&a, &b, &w).unwrap(), 0.5);
        let w40 = FeatureWindow::new(vec![2.0], 40.0).unwrap();
        assert_eq!(mobility_feature(&a, &b, &w40).unwrap(), 0.25);

        // p + v·dt = (10, 0) + (−5, 0)·2 = 0
        let a = vec![ks(0.0, [10.0, 0.0], [-5.0, 0.0])];
        assert_eq!(mobility_feature(&a, &b, &w).unwrap(), 0.0);

        let bad = FeatureWindow::new(vec![1.0, 1.0], 20.0).unwrap();
        assert!(mobility_feature(&a, &b, &bad).is_err());
        assert!(FeatureWindow::new(vec![1.0], 0.0).is_err());
    }

    #[test]
    fn window_from_series() {
        let s = vec![
            ks(0.0, [0.0; 2], [0.0; 2]),
            ks(1.0, [0.0; 2], [0.0; 2]),
            ks(3.0, [0.0; 2], [0.0; 2]),
        ];
        assert_eq!(
            FeatureWindow::from_series(&s, 10.0).unwrap().dt_values(),
            &[1.0, 2.0, 2.0]
        );
        assert_eq!(FeatureWindow::from_series(&s[..1], 10.0).unwrap().dt_values(), &[0.0]);
    }

    fn feats(a: &[f64]) -> Vec<NeighborFeature> {
        a.iter()
            .enumerate()
            .map(|(i, &a_mn)| NeighborFeature {
                neighbor_id: i as NodeId,
                a_mn,
            })
            .collect()
    }

    #[test]
    fn node_entropy_examples() {
        assert!((node_entropy(&feats(&[2.0, 2.0, 2.0])).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(node_entropy(&feats(&[3.0])).unwrap(), 0.0);
        assert!((node_entropy(&feats(&[1.0, 3.0])).unwrap() - 0.811278).abs() < 5e-7);
        assert!(matches!(
            node_entropy(&feats(&[0.0, 0.0])),
            Err(Error::DegenerateFeatures)
        ));
        assert!(node_entropy(&[]).is_err());
        assert!(node_entropy(&feats(&[-1.0, 2.0])).is_err());
    }

    #[test]
    fn route_stability_examples() {
        assert_eq!(route_stability_product(&[1.0, 1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(route_stability_log(&[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(route_stability_product(&[0.5, 0.5]).unwrap(), 0.25);
        assert!((route_stability_log(&[0.5, 0.5]).unwrap() - 1.386294).abs() < 5e-7);
        assert_eq!(route_stability_log(&[0.5, 0.0]).unwrap(), f64::INFINITY);
        assert!(route_stability_product(&[1.2]).is_err());
        assert!(route_stability_log(&[]).is_err());
    }

    #[test]
    fn spatiotemporal_examples() {
        let l = |p, k| StabilityLink::new(1, p, k).unwrap();
        let n = LogBase::Natural;
        let w = SignConvention::AsWritten;
        assert_eq!(spatiotemporal_entropy(&[l(1.0, 0.3), l(1.0, 0.9)], n, w).unwrap(), 0.0);
        assert_eq!(spatiotemporal_entropy(&[l(0.2, 0.0), l(0.7, 0.0)], n, w).unwrap(), 0.0);
        let e = spatiotemporal_entropy(&[l(0.5, 1.0)], n, w).unwrap();
        assert!((e - (-0.346574)).abs() < 5e-7);
        assert_eq!(e, 0.5 * 0.5f64.ln());
        let neg = spatiotemporal_entropy(&[l(0.5, 1.0)], n, SignConvention::Negated).unwrap();
        assert_eq!(neg, -e);
        assert_eq!(spatiotemporal_entropy(&[l(0.0, 1.0)], n, w).unwrap(), 0.0);
        assert!(spatiotemporal_entropy(&[], n, w).is_err());
        assert!(StabilityLink::new(1, 1.5, 0.5).is_err());
        assert!(StabilityLink::new(1, 0.5, -0.1).is_err());
    }
}
