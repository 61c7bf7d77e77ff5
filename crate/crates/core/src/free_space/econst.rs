use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::ExtensionMatrix;
use crate::free_space::vertices::lip_ball_vertex_values;
use crate::lp::{LinearProgram, Relation, Sense};
use crate::metric::{FiniteMetricSpace, Subset};

pub const DEFAULT_ECONST_MAX_POINTS: usize = 12;

const MAX_ROUNDS: usize = 10_000;
const CUTS_PER_ROUND: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EconstOptions {
    pub max_points: usize,
}

impl Default for EconstOptions {
    fn default() -> Self {
        EconstOptions { max_points: DEFAULT_ECONST_MAX_POINTS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconstResult {
    /// Smallest norm of a linear extension operator from `source` to the whole space.
    pub value: f64,
    /// An optimal operator, pinned at the base point.
    pub matrix: ExtensionMatrix,
    pub vertices_used: usize,
    pub source: Vec<usize>,
    pub base: usize,
}

struct Cut {
    vertex: usize,
    x: usize,
    y: usize,
    sign: f64,
}

/// Exact extension constant of `set` in `space` by linear programming over the
/// vertices of the Lipschitz unit ball of `set`.
///
/// Constraints are generated lazily: the LP is re-solved with the most violated
/// vertex/pair inequalities until none is violated.
pub fn extension_constant_lp(space: &FiniteMetricSpace, set: &Subset, options: &EconstOptions) -> Result<EconstResult> {
    let n = space.len();
    if n > options.max_points {
        return Err(Error::TooLarge { what: "extension constant space", size: n, cap: options.max_points });
    }
    if let Some(&last) = set.indices().last() {
        space.check_index(last)?;
    }
    let base = space.base_point();
    let Some(base_pos) = set.position(base) else {
        return Err(Error::BasePointNotInS { base });
    };
    let basis: Vec<usize> = set.iter().filter(|&s| s != base).collect();
    let nb = basis.len();
    let outside: Vec<usize> = (0..n).filter(|&x| !set.contains(x)).collect();

    let mut rows = vec![vec![0.0; nb]; n];
    for (k, &s) in basis.iter().enumerate() {
        rows[s][k] = 1.0;
    }
    if nb == 0 || outside.is_empty() {
        return Ok(EconstResult {
            value: 1.0,
            matrix: ExtensionMatrix { pin: base, basis, rows },
            vertices_used: 0,
            source: set.indices().to_vec(),
            base,
        });
    }

    let all = lip_ball_vertex_values(space, set.indices(), base_pos)?;
    let vertices_used = all.len();
    // The ball is symmetric: keep one vertex of each antipodal pair.
    let verts: Vec<Vec<f64>> = all
        .into_iter()
        .filter(|v| v.iter().find(|&&a| a != 0.0).is_some_and(|&a| a > 0.0))
        .map(|v| set.iter().zip(v).filter(|&(s, _)| s != base).map(|(_, a)| a).collect())
        .collect();

    let mut out_pos = vec![None; n];
    for (o, &x) in outside.iter().enumerate() {
        out_pos[x] = Some(o);
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| ((x + 1)..n).map(move |y| (x, y)))
        .filter(|&(x, y)| out_pos[x].is_some() || out_pos[y].is_some())
        .collect();
    let t_var = outside.len() * nb;
    let scale = space.diameter().max(1.0);

    let mut cuts: Vec<Cut> = Vec::new();
    for vertex in 0..verts.len().min(4) {
        for &(x, y) in &pairs {
            for sign in [1.0, -1.0] {
                cuts.push(Cut { vertex, x, y, sign });
            }
        }
    }

    for _ in 0..MAX_ROUNDS {
        let mut lp = LinearProgram::new(t_var + 1, Sense::Minimize);
        lp.set_objective(t_var, 1.0);
        for j in 0..t_var {
            lp.set_free(j);
        }
        lp.add_constraint(vec![(t_var, 1.0)], Relation::Ge, 1.0);
        for c in &cuts {
            let v = &verts[c.vertex];
            // sign * (Ev(x) - Ev(y)) - t d(x, y) <= 0
            let mut coeffs = vec![(t_var, -space.d(c.x, c.y))];
            let mut rhs = 0.0;
            for (p, w) in [(c.x, c.sign), (c.y, -c.sign)] {
                match out_pos[p] {
                    Some(o) => coeffs.extend((0..nb).map(|k| (o * nb + k, w * v[k]))),
                    None => {
                        let k = basis.iter().position(|&b| b == p);
                        rhs -= w * k.map_or(0.0, |k| v[k]);
                    }
                }
            }
            lp.add_constraint(coeffs, Relation::Le, rhs);
        }
        let sol = lp.solve()?;
        let t = sol.x[t_var];
        for (o, &x) in outside.iter().enumerate() {
            rows[x].copy_from_slice(&sol.x[o * nb..(o + 1) * nb]);
        }

        let mut violated: Vec<(f64, Cut)> = Vec::new();
        for (vertex, v) in verts.iter().enumerate() {
            let ev: Vec<f64> = rows.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect();
            for &(x, y) in &pairs {
                let diff = ev[x] - ev[y];
                let excess = diff.abs() - t * space.d(x, y);
                if excess > 1e-11 * scale {
                    let sign = if diff >= 0.0 { 1.0 } else { -1.0 };
                    violated.push((excess, Cut { vertex, x, y, sign }));
                }
            }
        }
        if violated.is_empty() {
            return Ok(EconstResult {
                value: t,
                matrix: ExtensionMatrix { pin: base, basis, rows },
                vertices_used,
                source: set.indices().to_vec(),
                base,
            });
        }
        violated.sort_by(|a, b| b.0.total_cmp(&a.0));
        cuts.extend(violated.into_iter().take(CUTS_PER_ROUND).map(|(_, c)| c));
    }
    Err(Error::Lp(crate::lp::LpError::IterationLimit { limit: MAX_ROUNDS }))
}
