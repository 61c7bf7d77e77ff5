//! Seeded fixtures shared by the benchmarks.

use std::sync::Arc;

use lipext_core::extension::{grid_extension_operator, mcshane_operator, GridBox, GridOperator};
use lipext_core::{validate_metric, ExtensionOperator, FiniteMetricSpace, L1PointSet, Subset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shortest-path metric of a complete graph with weights in `[1, 3)`.
pub fn random_metric(n: usize, seed: u64) -> FiniteMetricSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rng.gen_range(1.0..3.0);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    validate_metric(&d).expect("shortest paths form a metric")
}

/// `n` random points of the plane with the `l1` metric.
pub fn random_l1(n: usize, seed: u64) -> Arc<FiniteMetricSpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n).map(|_| vec![rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)]).collect();
    Arc::new(L1PointSet::new(2, coords, 0).and_then(|s| s.to_space()).expect("distinct points"))
}

/// The first `k` points as source (they include the base point).
pub fn prefix(n: usize, k: usize) -> Subset {
    Subset::new(n, (0..k).collect()).expect("valid prefix")
}

pub fn mcshane_fixture(n: usize, k: usize, seed: u64) -> ExtensionOperator {
    let m = random_l1(n, seed);
    mcshane_operator(m, prefix(n, k), None).expect("non-empty source")
}

pub fn grid_fixture(dim: usize, side: i64, samples: usize, seed: u64) -> GridOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bx = GridBox::cube(dim, 0, side).expect("valid box");
    let pts: Vec<Vec<f64>> = (0..samples).map(|_| (0..dim).map(|_| rng.gen_range(0.0..=side as f64)).collect()).collect();
    grid_extension_operator(&bx, &pts).expect("samples inside the box")
}
