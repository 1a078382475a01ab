//! Deterministic inputs shared by the benchmarks.

use linkstab_core::{DeploymentScenario, NeighborFeature, NodeId, Result, SweepScenario};

/// `n` neighbour features with a fixed, uneven spread.
pub fn neighbor_features(n: usize) -> Vec<NeighborFeature> {
    (0..n)
        .map(|i| NeighborFeature {
            neighbor_id: i as NodeId,
            a_mn: 1.0 + ((i * 7919) % 97) as f64 / 10.0,
        })
        .collect()
}

/// Indoor sweep over 1..40 m in 0.5 m steps.
pub fn indoor_sweep(sims: usize, nodes: usize) -> Result<SweepScenario> {
    let grid = (0..79).map(|i| 1.0 + 0.5 * i as f64).collect();
    SweepScenario::new(DeploymentScenario::indoor(), grid, sims, nodes, 1)
}
