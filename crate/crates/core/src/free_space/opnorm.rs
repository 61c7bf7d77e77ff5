use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{ExtensionMatrix, ExtensionOperator};
use crate::free_space::molecule::{kr_primal_on, Molecule};
use crate::free_space::vertices::lip_ball_vertex_values;
use crate::lipfn::lip_const;
use crate::metric::FiniteMetricSpace;

/// Largest normalized source on which the norm is cross-checked through the Lipschitz ball vertices.
pub const VERTEX_ROUTE_CAP: usize = 7;

/// The preadjoint of an extension operator: `P delta(x) = sum_s (E e_s)(x) delta(s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionMatrix {
    pub pin: usize,
    /// Target coordinates (source points other than the pin).
    pub basis: Vec<usize>,
    pub ambient_len: usize,
    /// `entries[k][x]`: coefficient of `delta(basis[k])` in `P delta(x)`.
    pub entries: Vec<Vec<f64>>,
}

impl ProjectionMatrix {
    pub fn from_extension(matrix: &ExtensionMatrix) -> Self {
        let n = matrix.rows.len();
        let entries = (0..matrix.basis.len())
            .map(|k| (0..n).map(|x| matrix.rows[x][k]).collect())
            .collect();
        ProjectionMatrix { pin: matrix.pin, basis: matrix.basis.clone(), ambient_len: n, entries }
    }

    pub fn source_dim(&self) -> usize {
        self.ambient_len.saturating_sub(1)
    }

    pub fn target_dim(&self) -> usize {
        self.basis.len()
    }

    /// Image of a molecule, with the residual mass put on the pin.
    pub fn apply(&self, mu: &Molecule) -> Result<Molecule> {
        if mu.space().len() != self.ambient_len {
            return Err(Error::DomainMismatch);
        }
        let mut weights = BTreeMap::new();
        let mut mass = 0.0;
        for (k, &b) in self.basis.iter().enumerate() {
            let w: f64 = mu.weights().iter().map(|(&x, &m)| m * self.entries[k][x]).sum();
            if w != 0.0 {
                weights.insert(b, w);
                mass += w;
            }
        }
        if mass != 0.0 {
            *weights.entry(self.pin).or_insert(0.0) -= mass;
        }
        Molecule::new(mu.space().clone(), weights)
    }

    /// Largest deviation from the identity on `delta(s)`, `s` in the basis.
    pub fn projection_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (k, row) in self.entries.iter().enumerate() {
            for (j, &b) in self.basis.iter().enumerate() {
                let want = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((row[b] - want).abs());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorNorm {
    pub value: f64,
    /// Pair `(x, y)` whose normalized molecule attains the value.
    pub witness: Option<(usize, usize)>,
    /// Same norm computed as the largest `Lip(Ev)` over the vertices `v` of the Lipschitz ball.
    pub functions_route: Option<f64>,
    pub vertices: Option<usize>,
}

/// Exact norm of `E` as a map from Lipschitz functions on `source + pin` vanishing at
/// the pin, computed as the norm of its preadjoint on normalized molecules.
pub fn operator_norm_from_extension(op: &ExtensionOperator) -> Result<OperatorNorm> {
    let matrix = op.materialize_matrix()?;
    operator_norm_from_matrix(op.ambient(), &matrix)
}

pub fn operator_norm_from_matrix(space: &Arc<FiniteMetricSpace>, matrix: &ExtensionMatrix) -> Result<OperatorNorm> {
    let n = space.len();
    if matrix.basis.is_empty() {
        // Lip0 of a single point is trivial; report the neutral value.
        return Ok(OperatorNorm { value: 1.0, witness: None, functions_route: Some(1.0), vertices: Some(0) });
    }
    let mut points = matrix.basis.clone();
    points.push(matrix.pin);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| ((x + 1)..n).map(move |y| (x, y))).collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(x, y)| {
            let (rx, ry) = (&matrix.rows[x], &matrix.rows[y]);
            if rx == ry {
                return Ok(0.0);
            }
            let mut w: Vec<f64> = rx.iter().zip(ry).map(|(a, b)| a - b).collect();
            w.push(-w.iter().sum::<f64>());
            Ok(kr_primal_on(space, &points, &w)? / space.d(x, y))
        })
        .collect::<Result<_>>()?;
    let mut value = 0.0f64;
    let mut witness = None;
    for (k, &v) in values.iter().enumerate() {
        if v > value {
            value = v;
            witness = Some(pairs[k]);
        }
    }

    let mut functions_route = None;
    let mut vertices = None;
    if points.len() <= VERTEX_ROUTE_CAP {
        let base = points.len() - 1;
        let verts = lip_ball_vertex_values(space, &points, base)?;
        let all: Vec<usize> = (0..n).collect();
        let best = verts
            .par_iter()
            .map(|v| lip_const(space, &all, &matrix.apply(&v[..base])).value)
            .reduce(|| 0.0, f64::max);
        if (best - value).abs() > 1e-7 * value.max(1.0) {
            return Err(Error::NormRouteMismatch { projection: value, functions: best });
        }
        functions_route = Some(best);
        vertices = Some(verts.len());
    }
    Ok(OperatorNorm { value, witness, functions_route, vertices })
}
