//! Uncapacitated min-cost flow by the primal network simplex.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSolution {
    pub cost: f64,
    /// Flow on each input arc, in input order.
    pub flows: Vec<f64>,
    /// Node potentials `y` with `cost + y[from] - y[to] >= 0` on every arc at optimality.
    pub potentials: Vec<f64>,
    pub pivots: usize,
}

/// Minimizes `sum cost * flow` subject to `outflow - inflow = supply` at every node.
///
/// Costs must be nonnegative and supplies must sum to zero (up to rounding).
/// Entering arcs are chosen by lowest index with negative reduced cost and
/// leaving arcs by lowest index among the blocking arcs.
pub fn min_cost_flow(num_nodes: usize, arcs: &[Arc], supply: &[f64]) -> Result<FlowSolution> {
    if supply.len() != num_nodes {
        return Err(Error::InvalidParameter(format!(
            "{} supplies for {} nodes",
            supply.len(),
            num_nodes
        )));
    }
    let mut max_cost = 0.0f64;
    for a in arcs {
        if a.from >= num_nodes || a.to >= num_nodes {
            return Err(Error::InvalidParameter("arc endpoint out of range".into()));
        }
        if !(a.cost >= 0.0) || !a.cost.is_finite() {
            return Err(Error::InvalidParameter(format!("arc cost {} must be finite and >= 0", a.cost)));
        }
        max_cost = max_cost.max(a.cost);
    }
    let mass_scale = supply.iter().map(|s| s.abs()).fold(1.0f64, f64::max);
    let total: f64 = supply.iter().sum();
    if total.abs() > 1e-9 * mass_scale * num_nodes.max(1) as f64 {
        return Err(Error::NonzeroMass { mass: total });
    }

    let root = num_nodes;
    let big_m = 1.0 + (num_nodes as f64 + 1.0) * max_cost;
    let mut all: Vec<Arc> = arcs.to_vec();
    let mut flow = vec![0.0; arcs.len()];
    let mut in_tree = vec![false; arcs.len()];
    for (v, &b) in supply.iter().enumerate() {
        if b >= 0.0 {
            all.push(Arc { from: v, to: root, cost: big_m });
            flow.push(b);
        } else {
            all.push(Arc { from: root, to: v, cost: big_m });
            flow.push(-b);
        }
        in_tree.push(true);
    }

    let n = num_nodes + 1;
    let rc_eps = 1e-12 * big_m;
    let mut pivots = 0usize;
    let limit = 100_000 + 50 * all.len();
    let mut y = vec![0.0; n];
    let mut parent_arc = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];

    loop {
        // Potentials and parent pointers from the current spanning tree.
        for adj in adjacency.iter_mut() {
            adj.clear();
        }
        for (k, a) in all.iter().enumerate() {
            if in_tree[k] {
                adjacency[a.from].push(k);
                adjacency[a.to].push(k);
            }
        }
        parent_arc.iter_mut().for_each(|p| *p = usize::MAX);
        y[root] = 0.0;
        depth[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        let mut seen = vec![false; n];
        seen[root] = true;
        while let Some(u) = queue.pop_front() {
            for &k in &adjacency[u] {
                let a = all[k];
                let v = if a.from == u { a.to } else { a.from };
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                parent_arc[v] = k;
                depth[v] = depth[u] + 1;
                y[v] = if a.from == u { y[u] + a.cost } else { y[u] - a.cost };
                queue.push_back(v);
            }
        }

        let entering = (0..all.len())
            .find(|&k| !in_tree[k] && all[k].cost + y[all[k].from] - y[all[k].to] < -rc_eps);
        let Some(e) = entering else { break };
        if pivots >= limit {
            return Err(Error::InvalidParameter(format!("network simplex exceeded {limit} pivots")));
        }
        pivots += 1;

        // Cycle: e pushes from -> to, then the tree path to -> from.
        let (u0, v0) = (all[e].from, all[e].to);
        let mut forward = vec![e];
        let mut backward = Vec::new();
        let (mut a, mut b) = (v0, u0);
        let mut down = Vec::new();
        while a != b {
            if depth[a] >= depth[b] {
                let k = parent_arc[a];
                // Walking up from the `to` side follows the cycle direction.
                if all[k].from == a {
                    forward.push(k);
                } else {
                    backward.push(k);
                }
                a = other(&all[k], a);
            } else {
                let k = parent_arc[b];
                down.push((k, b));
                b = other(&all[k], b);
            }
        }
        for (k, child) in down {
            // The cycle crosses this arc from parent to child.
            if all[k].to == child {
                forward.push(k);
            } else {
                backward.push(k);
            }
        }
        let Some(theta) = backward.iter().map(|&k| flow[k]).reduce(f64::min) else {
            return Err(Error::FlowUnbounded);
        };
        let leaving = backward
            .iter()
            .copied()
            .filter(|&k| flow[k] <= theta)
            .min()
            .expect("blocking arc");
        for &k in &forward {
            flow[k] += theta;
        }
        for &k in &backward {
            flow[k] -= theta;
        }
        flow[leaving] = 0.0;
        in_tree[leaving] = false;
        in_tree[e] = true;
    }

    let residual: f64 = flow[arcs.len()..].iter().sum();
    if residual > 1e-9 * mass_scale {
        return Err(Error::FlowInfeasible { residual });
    }
    flow.truncate(arcs.len());
    let cost = arcs.iter().zip(&flow).map(|(a, f)| a.cost * f).sum();
    y.truncate(num_nodes);
    Ok(FlowSolution { cost, flows: flow, potentials: y, pivots })
}

fn other(a: &Arc, v: usize) -> usize {
    if a.from == v {
        a.to
    } else {
        a.from
    }
}

/// Transportation from `supply` points to `demand` points with a cost callback.
/// Returns the optimal cost. Masses are positive and the totals must agree.
pub fn transport(supply: &[f64], demand: &[f64], cost: impl Fn(usize, usize) -> f64) -> Result<f64> {
    let p = supply.len();
    let q = demand.len();
    let mut arcs = Vec::with_capacity(p * q);
    for i in 0..p {
        for j in 0..q {
            arcs.push(Arc { from: i, to: p + j, cost: cost(i, j) });
        }
    }
    let mut b: Vec<f64> = supply.to_vec();
    b.extend(demand.iter().map(|d| -d));
    Ok(min_cost_flow(p + q, &arcs, &b)?.cost)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_transport() {
        // Supplies 1, 2; demands 2, 1; cost |i - j| on the line {0, 1} vs {0, 1}.
        let c = transport(&[1.0, 2.0], &[2.0, 1.0], |i, j| (i as f64 - j as f64).abs()).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shortest_path_through_transshipment() {
        // 0 -> 1 -> 2 is cheaper than 0 -> 2.
        let arcs = [
            Arc { from: 0, to: 2, cost: 5.0 },
            Arc { from: 0, to: 1, cost: 1.0 },
            Arc { from: 1, to: 2, cost: 1.0 },
        ];
        let s = min_cost_flow(3, &arcs, &[3.0, 0.0, -3.0]).unwrap();
        assert!((s.cost - 6.0).abs() < 1e-12);
        assert_eq!(s.flows[0], 0.0);
        for (k, a) in arcs.iter().enumerate() {
            let rc = a.cost + s.potentials[a.from] - s.potentials[a.to];
            assert!(rc > -1e-9, "arc {k} has negative reduced cost");
        }
    }

    #[test]
    fn zero_supply_is_free() {
        let arcs = [Arc { from: 0, to: 1, cost: 1.0 }];
        assert_eq!(min_cost_flow(2, &arcs, &[0.0, 0.0]).unwrap().cost, 0.0);
    }

    #[test]
    fn infeasible_direction() {
        let arcs = [Arc { from: 0, to: 1, cost: 1.0 }];
        assert!(matches!(
            min_cost_flow(2, &arcs, &[-1.0, 1.0]),
            Err(Error::FlowInfeasible { .. })
        ));
        assert!(matches!(
            min_cost_flow(2, &arcs, &[1.0, 1.0]),
            Err(Error::NonzeroMass { .. })
        ));
    }
}
