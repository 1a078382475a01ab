mod common;

use linkstab_core::{
    eld, etd, ld, node_entropy, packet_reception_rate, region_bounds_with, route_stability_log,
    route_stability_product, select_forwarder, shannon_entropy, spatiotemporal_entropy, DeploymentScenario, Forwarder,
    ForwarderCandidate, ForwardingMetric, LogBase, Modulation, NeighborFeature, RegionSearch, SignConvention,
    StabilityLink,
};
use proptest::prelude::*;

fn feats(a: &[f64]) -> Vec<NeighborFeature> {
    a.iter()
        .enumerate()
        .map(|(i, &a_mn)| NeighborFeature {
            neighbor_id: i as u32,
            a_mn,
        })
        .collect()
}

fn normalize(w: &[f64]) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

proptest! {
    #[test]
    fn prr_in_unit_interval(g in -50.0f64..60.0, f in 1u32..5000) {
        let p = packet_reception_rate(g, f, &Modulation::Ncfsk);
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn region_ordering(upper in 0.3f64..0.99, gap in 0.0f64..0.29) {
        let s = RegionSearch { upper, lower: upper - gap, ..Default::default() };
        let b = region_bounds_with(&DeploymentScenario::outdoor(), &s).unwrap();
        prop_assert!(b.d_begin <= b.d_end);
    }

    #[test]
    fn progress_metrics_infinite_iff_no_progress(x in 0.1f64..50.0, l_sd in 1.0f64..100.0, l_rd in 0.0f64..150.0) {
        for v in [etd(x, l_sd, l_rd), ld(x, l_sd, l_rd), eld(x, l_sd, l_rd)] {
            if l_sd > l_rd {
                prop_assert!(v.is_finite() && v > 0.0);
            } else {
                prop_assert!(v.is_infinite());
            }
        }
    }

    #[test]
    fn forwarder_invariant_under_rescaling(
        etx in prop::collection::vec(1.0f64..8.0, 1..8),
        dist in prop::collection::vec(0.0f64..60.0, 8),
        c in 0.01f64..100.0,
    ) {
        let cands: Vec<_> = etx.iter().zip(&dist).enumerate().map(|(i, (&e, &d))| ForwarderCandidate {
            id: i as u32,
            etx_estimate: e,
            latency_estimate: Some(e * 2.0),
            dist_to_dest: d,
        }).collect();
        let scaled: Vec<_> = cands.iter().map(|k| ForwarderCandidate {
            etx_estimate: k.etx_estimate * c,
            latency_estimate: k.latency_estimate.map(|l| l * c),
            ..*k
        }).collect();
        for metric in [ForwardingMetric::Etd, ForwardingMetric::Eld] {
            let a = select_forwarder(&cands, 40.0, metric).unwrap();
            prop_assert_eq!(a, select_forwarder(&scaled, 40.0, metric).unwrap());
            if let Forwarder::Selected(id) = a {
                prop_assert!(cands[id as usize].dist_to_dest < 40.0);
            }
        }
    }

    #[test]
    fn shannon_nonneg_and_permutation_invariant(w in prop::collection::vec(0.0f64..1.0, 1..9), rot in 0usize..9) {
        prop_assume!(w.iter().sum::<f64>() > 1e-6);
        let p = normalize(&w);
        let h = shannon_entropy(&p, LogBase::Natural).unwrap();
        prop_assert!(h >= 0.0);
        let mut q = p.clone();
        q.rotate_left(rot % p.len());
        q.reverse();
        prop_assert!((h - shannon_entropy(&q, LogBase::Natural).unwrap()).abs() < 1e-12);
        prop_assert!(h <= (p.len() as f64).ln() + 1e-12);
    }

    #[test]
    fn node_entropy_scale_invariant_and_bounded(a in prop::collection::vec(0.0f64..100.0, 1..12), c in 1e-3f64..1e3) {
        prop_assume!(a.iter().sum::<f64>() > 1e-6);
        let h = node_entropy(&feats(&a)).unwrap();
        prop_assert!((0.0..=1.0).contains(&h));
        let scaled: Vec<f64> = a.iter().map(|x| x * c).collect();
        prop_assert!((h - node_entropy(&feats(&scaled)).unwrap()).abs() <= 1e-12);
        prop_assert!((h - common::node_entropy(&a)).abs() <= 1e-10);
    }

    #[test]
    fn route_stability_additive(a in prop::collection::vec(0.01f64..=1.0, 1..6), b in prop::collection::vec(0.01f64..=1.0, 1..6)) {
        let ab: Vec<f64> = a.iter().chain(&b).copied().collect();
        let lhs = route_stability_log(&ab).unwrap();
        let rhs = route_stability_log(&a).unwrap() + route_stability_log(&b).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
        let rs1 = route_stability_product(&ab).unwrap();
        prop_assert!((0.0..=1.0).contains(&rs1));
        prop_assert!((rs1.ln() + lhs).abs() < 1e-9);
    }

    #[test]
    fn spatiotemporal_non_increasing_in_k(
        pk in prop::collection::vec((0.0f64..1.0, 0.0f64..=1.0), 1..6),
        idx in 0usize..6,
        bump in 0.0f64..1.0,
    ) {
        let links: Vec<_> = pk.iter().enumerate().map(|(i, &(p, k))| StabilityLink::new(i as u32, p, k).unwrap()).collect();
        let i = idx % links.len();
        let mut more = links.clone();
        more[i].k = (more[i].k + bump).min(1.0);
        let e0 = spatiotemporal_entropy(&links, LogBase::Natural, SignConvention::AsWritten).unwrap();
        let e1 = spatiotemporal_entropy(&more, LogBase::Natural, SignConvention::AsWritten).unwrap();
        prop_assert!(e1 <= e0 + 1e-15);
        prop_assert!(e0 <= 0.0);
    }
}

#[test]
fn shannon_maximal_at_uniform_on_simplex_grid() {
    let steps = 40;
    let uniform = shannon_entropy(&[1.0 / 3.0; 3], LogBase::Natural).unwrap();
    let mut best = (0.0, [0.0; 3]);
    for i in 0..=steps {
        for j in 0..=steps - i {
            let p = [
                i as f64 / steps as f64,
                j as f64 / steps as f64,
                (steps - i - j) as f64 / steps as f64,
            ];
            let h = shannon_entropy(&p, LogBase::Natural).unwrap();
            assert!(h <= uniform + 1e-12);
            if h > best.0 {
                best = (h, p);
            }
        }
    }
    assert!((uniform - 3f64.ln()).abs() < 1e-15);
    assert!(best.1.iter().all(|x| (x - 1.0 / 3.0).abs() < 0.05));
}
