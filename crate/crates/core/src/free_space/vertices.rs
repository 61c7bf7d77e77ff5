use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lipfn::LipFunction;
use crate::metric::{FiniteMetricSpace, Subset, TOL};

/// Largest set whose Lipschitz unit ball is enumerated.
pub const MAX_VERTEX_SET: usize = 9;

fn key(values: &[Option<f64>], quantum: f64) -> Vec<i64> {
    values
        .iter()
        .map(|v| match v {
            None => i64::MIN,
            Some(v) => (v / quantum).round() as i64,
        })
        .collect()
}

/// Vertices of `{f : f(points[base]) = 0, |f(x) - f(y)| <= d(x, y)}`, as values on `points`.
///
/// Every vertex is fixed by a spanning tree of tight pairs, so vertices are
/// grown from the base point one tight pair at a time, discarding infeasible
/// partial assignments. Output is sorted lexicographically.
pub fn lip_ball_vertex_values(space: &FiniteMetricSpace, points: &[usize], base: usize) -> Result<Vec<Vec<f64>>> {
    let n = points.len();
    if n > MAX_VERTEX_SET {
        return Err(Error::TooLarge { what: "vertex enumeration set", size: n, cap: MAX_VERTEX_SET });
    }
    if base >= n {
        return Err(Error::InvalidIndex { index: base, len: n });
    }
    let scale = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| space.d(points[a], points[b]))
        .fold(1.0f64, f64::max);
    let quantum = 1e-9 * scale;
    let slack = TOL * scale;

    let mut start = vec![None; n];
    start[base] = Some(0.0);
    let mut level = vec![start];
    for _ in 1..n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for state in &level {
            for v in 0..n {
                if state[v].is_some() {
                    continue;
                }
                for u in 0..n {
                    let Some(fu) = state[u] else { continue };
                    for sign in [1.0, -1.0] {
                        let fv = fu + sign * space.d(points[u], points[v]);
                        let feasible = (0..n).all(|w| match state[w] {
                            Some(fw) => (fv - fw).abs() <= space.d(points[v], points[w]) + slack,
                            None => true,
                        });
                        if !feasible {
                            continue;
                        }
                        let mut s = state.clone();
                        s[v] = Some(fv);
                        if seen.insert(key(&s, quantum)) {
                            next.push(s);
                        }
                    }
                }
            }
        }
        level = next;
    }
    let mut out: Vec<Vec<f64>> = level
        .into_iter()
        .map(|s| s.into_iter().map(|v| v.expect("complete assignment")).collect())
        .collect();
    out.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// Vertices of the unit ball of Lipschitz functions on `set` vanishing at the base point of the space.
pub fn lip_ball_vertices(space: &Arc<FiniteMetricSpace>, set: &Subset) -> Result<Vec<LipFunction>> {
    let base = space.base_point();
    let Some(pos) = set.position(base) else {
        return Err(Error::BasePointNotInS { base });
    };
    lip_ball_vertex_values(space, set.indices(), pos)?
        .into_iter()
        .map(|v| LipFunction::new(space.clone(), set.clone(), v))
        .collect()
}
