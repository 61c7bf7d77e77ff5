use std::collections::HashMap;
use std::sync::Arc;

use serde_json::json;

use crate::error::{Error, Result};
use crate::extension::grid::{grid_points, interpolation_stencil, GridBox};
use crate::extension::operator::{ExtensionOperator, OperatorKind};
use crate::metric::{L1PointSet, Subset};

fn split_norms(block: &[usize], x: &[f64]) -> (f64, f64) {
    let inside: f64 = block.iter().map(|&k| x[k].abs()).sum();
    let outside: f64 = (0..x.len()).filter(|k| !block.contains(k)).map(|k| x[k].abs()).sum();
    (inside, outside)
}

/// `x` lies in the open cone `C_I = {||x - P_I x|| < ||P_I x||}`.
pub fn cone_member(block: &[usize], x: &[f64]) -> bool {
    let (inside, outside) = split_norms(block, x);
    outside < inside
}

/// `R_I x = r_I(x) P_I x` with `r_I(x) = max(1 - ||x - P_I x|| / ||P_I x||, 0)`, and `0` when `P_I x = 0`.
/// Coordinates are 0-based.
pub fn cone_retract(block: &[usize], x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    let (inside, outside) = split_norms(block, x);
    if inside == 0.0 {
        return out;
    }
    let r = if outside == 0.0 { 1.0 } else { (1.0 - outside / inside).max(0.0) };
    for &k in block {
        out[k] = if r == 1.0 { x[k] } else { r * x[k] };
    }
    out
}

pub(crate) fn check_partition(dim: usize, partition: &[Vec<usize>]) -> Result<()> {
    let mut seen = vec![false; dim];
    for block in partition {
        if block.is_empty() {
            return Err(Error::InvalidParameter("partition has an empty block".into()));
        }
        for &k in block {
            if k >= dim || seen[k] {
                return Err(Error::InvalidParameter(format!("coordinate {k} is out of range or repeated")));
            }
            seen[k] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidParameter("partition does not cover every coordinate".into()));
    }
    Ok(())
}

/// `f(block, R_I x)` for the block whose cone contains `x`, else `0`.
///
/// `f` receives the retracted point in full coordinates and reports
/// [`Error::RetractedPointOutsideDomain`] when it cannot evaluate there.
pub fn cone_partition_extend(
    partition: &[Vec<usize>],
    f: impl Fn(usize, &[f64]) -> Result<f64>,
    query: &[f64],
) -> Result<f64> {
    check_partition(query.len(), partition)?;
    for (i, block) in partition.iter().enumerate() {
        if cone_member(block, query) {
            return f(i, &cone_retract(block, query));
        }
    }
    Ok(0.0)
}

#[derive(Debug, Clone)]
pub struct ConeOperator {
    pub operator: ExtensionOperator,
    /// Ambient index of the origin (the pin).
    pub origin: usize,
    /// Ambient index of each sample point, in input order.
    pub sample_indices: Vec<usize>,
}

/// Finite cone-partition operator on `l1^n`.
///
/// The source is the union over blocks `I` of the grid points of
/// `Z^I cap [-b, b]^I` other than the origin; functions vanish at the origin.
/// At other points `Ef(x) = (Lambda_I f)(R_I x)` for `x in C_I` and `0`
/// outside every cone, where `Lambda_I` is multilinear interpolation on the block grid.
pub fn cone_partition_operator(
    dim: usize,
    partition: &[Vec<usize>],
    half_width: i64,
    samples: &[Vec<f64>],
) -> Result<ConeOperator> {
    check_partition(dim, partition)?;
    if half_width < 1 {
        return Err(Error::InvalidParameter("grid half-width must be at least 1".into()));
    }
    let mut coords: Vec<Vec<f64>> = vec![vec![0.0; dim]];
    // Per block: block grid point -> ambient index (origin maps to 0).
    let mut block_index: Vec<HashMap<Vec<i64>, usize>> = Vec::new();
    let mut boxes = Vec::new();
    for block in partition {
        let bx = GridBox::cube(block.len(), -half_width, half_width)?;
        let mut map = HashMap::new();
        for p in grid_points(&bx) {
            if p.iter().all(|&v| v == 0) {
                map.insert(p, 0);
                continue;
            }
            let mut c = vec![0.0; dim];
            for (j, &k) in block.iter().enumerate() {
                c[k] = p[j] as f64;
            }
            map.insert(p, coords.len());
            coords.push(c);
        }
        block_index.push(map);
        boxes.push(bx);
    }
    let num_source = coords.len() - 1;
    let mut stencils: Vec<Vec<(usize, f64)>> = vec![Vec::new(); coords.len()];
    let mut sample_indices = Vec::with_capacity(samples.len());
    for q in samples {
        if q.len() != dim || q.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("sample {q:?} is not a point of l1^{dim}")));
        }
        if let Some(pos) = coords.iter().position(|c| c == q) {
            sample_indices.push(pos);
            continue;
        }
        let mut stencil = Vec::new();
        for (i, block) in partition.iter().enumerate() {
            if cone_member(block, q) {
                let y = cone_retract(block, q);
                let local: Vec<f64> = block.iter().map(|&k| y[k]).collect();
                let st = interpolation_stencil(&boxes[i], &local)
                    .map_err(|_| Error::RetractedPointOutsideDomain { point: y.clone() })?;
                for (v, w) in st {
                    let idx = block_index[i][&v];
                    if idx != 0 {
                        stencil.push((idx - 1, w));
                    }
                }
                break;
            }
        }
        sample_indices.push(coords.len());
        coords.push(q.clone());
        stencils.push(stencil);
    }
    let ambient = Arc::new(L1PointSet::new(dim, coords, 0)?.to_space()?);
    let source = Subset::new(ambient.len(), (1..=num_source).collect())?;
    let rule = Arc::new(move |vals: &[f64]| -> Vec<f64> {
        stencils
            .iter()
            .enumerate()
            .map(|(x, st)| {
                if x >= 1 && x <= num_source {
                    return vals[x - 1];
                }
                let mut acc = 0.0;
                for &(k, w) in st {
                    acc += w * vals[k];
                }
                acc
            })
            .collect()
    });
    let operator = ExtensionOperator::new(
        ambient,
        source,
        0,
        OperatorKind::ConePartition,
        json!({ "dim": dim, "partition": partition, "half_width": half_width, "samples": samples.len() }),
        2.0,
        rule,
    )?;
    Ok(ConeOperator { operator, origin: 0, sample_indices })
}
