#![allow(dead_code)]

use std::sync::Arc;

use lipext_core::{validate_metric, FiniteMetricSpace, L1PointSet};
use proptest::prelude::*;
use rand::Rng;

pub fn line(points: &[f64]) -> Arc<FiniteMetricSpace> {
    let coords = points.iter().map(|&p| vec![p]).collect();
    Arc::new(L1PointSet::new(1, coords, 0).unwrap().to_space().unwrap())
}

/// Shortest-path metric of the complete graph with the given edge weights.
pub fn graph_metric(n: usize, weights: &[f64]) -> FiniteMetricSpace {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = weights[(i * n + j) % weights.len()];
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    validate_metric(&d).unwrap()
}

pub fn random_graph_metric(rng: &mut impl Rng, n: usize) -> FiniteMetricSpace {
    let w: Vec<f64> = (0..n * n).map(|_| rng.gen_range(1.0..3.0)).collect();
    graph_metric(n, &w)
}

pub fn graph_space(sizes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Arc<FiniteMetricSpace>> {
    sizes.prop_flat_map(|n| {
        prop::collection::vec(1.0f64..3.0, n * n).prop_map(move |w| Arc::new(graph_metric(n, &w)))
    })
}

/// Distinct integer points of `l1^dim`.
pub fn l1_space(
    sizes: std::ops::RangeInclusive<usize>,
    dim: usize,
) -> impl Strategy<Value = Arc<FiniteMetricSpace>> {
    prop::collection::btree_set(prop::collection::vec(-6i32..=6, dim), sizes).prop_map(move |pts| {
        let coords = pts.into_iter().map(|p| p.into_iter().map(f64::from).collect()).collect();
        Arc::new(L1PointSet::new(dim, coords, 0).unwrap().to_space().unwrap())
    })
}
