use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::extension::operator::{ExtensionOperator, OperatorKind};
use crate::metric::{max_points, L1PointSet, Subset};

/// Largest dimension accepted by the interpolation (2^n summands).
pub const MAX_INTERP_DIM: usize = 20;

/// Integer box `[lo_1, hi_1] x ... x [lo_n, hi_n]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl GridBox {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidParameter("box corners must have the same positive length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::InvalidParameter("box has lo > hi".into()));
        }
        Ok(GridBox { lo, hi })
    }

    /// `[from, to]^dim`.
    pub fn cube(dim: usize, from: i64, to: i64) -> Result<Self> {
        GridBox::new(vec![from; dim], vec![to; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn num_points(&self) -> usize {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (b - a + 1) as usize)
            .fold(1usize, |acc, k| acc.saturating_mul(k))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&v, (&a, &b))| v >= a as f64 && v <= b as f64)
    }
}

/// Grid points of the box in lexicographic order.
pub fn grid_points(bx: &GridBox) -> Vec<Vec<i64>> {
    let mut out = Vec::with_capacity(bx.num_points());
    let mut cur = bx.lo.clone();
    loop {
        out.push(cur.clone());
        let mut k = bx.dim();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < bx.hi[k] {
                cur[k] += 1;
                break;
            }
            cur[k] = bx.lo[k];
        }
    }
}

/// Values on (some) grid points of a box.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub bx: GridBox,
    pub values: BTreeMap<Vec<i64>, f64>,
}

impl GridFunction {
    /// Values listed in the order of [`grid_points`].
    pub fn from_dense(bx: GridBox, values: &[f64]) -> Result<Self> {
        let pts = grid_points(&bx);
        if pts.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values for {} grid points",
                values.len(),
                pts.len()
            )));
        }
        Ok(GridFunction { bx, values: pts.into_iter().zip(values.iter().copied()).collect() })
    }

    pub fn from_fn(bx: GridBox, f: impl Fn(&[i64]) -> f64) -> Self {
        let values = grid_points(&bx).into_iter().map(|p| {
            let v = f(&p);
            (p, v)
        });
        GridFunction { values: values.collect(), bx }
    }
}

/// Vertices and weights of the multilinear interpolant at `query`; zero weights are dropped.
pub fn interpolation_stencil(bx: &GridBox, query: &[f64]) -> Result<Vec<(Vec<i64>, f64)>> {
    let n = bx.dim();
    if n > MAX_INTERP_DIM {
        return Err(Error::TooLarge { what: "interpolation dimension", size: n, cap: MAX_INTERP_DIM });
    }
    if !bx.contains(query) || query.iter().any(|v| !v.is_finite()) {
        return Err(Error::QueryOutsideBox { query: query.to_vec() });
    }
    let mut base = Vec::with_capacity(n);
    let mut t = Vec::with_capacity(n);
    for k in 0..n {
        let top = (bx.hi[k] - 1).max(bx.lo[k]);
        let b = (query[k].floor() as i64).clamp(bx.lo[k], top);
        base.push(b);
        t.push(query[k] - b as f64);
    }
    let mut out = Vec::new();
    for gamma in 0u32..(1u32 << n) {
        let mut w = 1.0;
        for k in 0..n {
            w *= if gamma >> k & 1 == 1 { t[k] } else { 1.0 - t[k] };
        }
        if w == 0.0 {
            continue;
        }
        let vertex: Vec<i64> = (0..n).map(|k| base[k] + (gamma >> k & 1) as i64).collect();
        out.push((vertex, w));
    }
    Ok(out)
}

/// Multilinear interpolation of grid values on the unit cube containing `query`.
pub fn hypercube_interpolate(f: &GridFunction, query: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for (vertex, w) in interpolation_stencil(&f.bx, query)? {
        match f.values.get(&vertex) {
            Some(v) => acc += w * v,
            None => return Err(Error::MissingVertex { vertex }),
        }
    }
    Ok(acc)
}

/// A grid interpolation operator together with the ambient positions of its points.
#[derive(Debug, Clone)]
pub struct GridOperator {
    pub operator: ExtensionOperator,
    /// Ambient index of each grid point, in [`grid_points`] order.
    pub grid_indices: Vec<usize>,
    /// Ambient index of each sample point, in input order.
    pub sample_indices: Vec<usize>,
}

/// Extension from the grid points of `bx` to `sample` by multilinear interpolation.
///
/// The ambient space lists the grid points first, then the sample points that
/// are not grid points. The pin is the origin when it is a grid point, else the
/// `lo` corner.
pub fn grid_extension_operator(bx: &GridBox, sample: &[Vec<f64>]) -> Result<GridOperator> {
    let n = bx.dim();
    let cap = max_points();
    let count = bx.num_points();
    if count > cap {
        return Err(Error::TooLarge { what: "grid", size: count, cap });
    }
    let grid = grid_points(bx);
    let mut coords: Vec<Vec<f64>> = grid.iter().map(|p| p.iter().map(|&v| v as f64).collect()).collect();
    let grid_index: HashMap<Vec<i64>, usize> = grid.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let mut stencils: Vec<Vec<(usize, f64)>> = (0..grid.len()).map(|i| vec![(i, 1.0)]).collect();
    let mut sample_indices = Vec::with_capacity(sample.len());
    for q in sample {
        if q.len() != n {
            return Err(Error::QueryOutsideBox { query: q.clone() });
        }
        let stencil = interpolation_stencil(bx, q)?;
        if let Some(pos) = coords.iter().position(|c| c == q) {
            sample_indices.push(pos);
            continue;
        }
        sample_indices.push(coords.len());
        coords.push(q.clone());
        stencils.push(stencil.into_iter().map(|(v, w)| (grid_index[&v], w)).collect());
    }
    let origin = vec![0i64; n];
    let pin = grid_index.get(&origin).copied().unwrap_or(0);
    let ambient = Arc::new(L1PointSet::new(n, coords, pin)?.to_space()?);
    let num_grid = grid.len();
    let rule = Arc::new(move |vals: &[f64]| -> Vec<f64> {
        stencils
            .iter()
            .enumerate()
            .map(|(x, st)| {
                if x < num_grid {
                    return vals[x];
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
        Subset::all(num_grid),
        pin,
        OperatorKind::Hypercube,
        json!({ "lo": bx.lo, "hi": bx.hi, "samples": sample.len() }),
        1.0,
        rule,
    )?;
    Ok(GridOperator { operator, grid_indices: (0..num_grid).collect(), sample_indices })
}
