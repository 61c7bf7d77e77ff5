//! Finite metric spaces, subsets and the separation geometry of set families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Comparison slack used by every certified inequality in the crate.
pub const TOL: f64 = 1e-9;

/// Default cap on the number of points of a space with a materialized distance matrix.
pub const DEFAULT_MAX_POINTS: usize = 512;

/// Point cap, overridable through `LIPEXT_MAX_POINTS`.
pub fn max_points() -> usize {
    std::env::var("LIPEXT_MAX_POINTS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_POINTS)
}

/// `a <= b` up to the global tolerance, scaled by the magnitude of the operands.
pub fn leq_tol(a: f64, b: f64) -> bool {
    a <= b + TOL * (1.0f64).max(a.abs()).max(b.abs())
}

/// A validated finite metric space with a designated base point.
///
/// Spaces built from an [`L1PointSet`] keep their coordinates, which the
/// vector-space constructions (radial projections, cone retractions, grid
/// interpolation) need.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    ids: Vec<String>,
    n: usize,
    dist: Vec<f64>,
    base_point: usize,
    coords: Option<Vec<Vec<f64>>>,
}

/// Validates a distance matrix, reporting the first violated axiom with witness indices.
///
/// Axioms are checked in order: shape, finiteness, zero diagonal, non-negativity,
/// symmetry, positivity off the diagonal, triangle inequality (exhaustive).
pub fn validate_metric(matrix: &[Vec<f64>]) -> Result<FiniteMetricSpace> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    let cap = max_points();
    if n > cap {
        return Err(Error::TooLarge { what: "metric space", size: n, cap });
    }
    for (row, r) in matrix.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NotSquare { row, len: r.len(), expected: n });
        }
    }
    for (i, row) in matrix.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { i, j });
            }
        }
    }
    for (i, row) in matrix.iter().enumerate() {
        if row[i] != 0.0 {
            return Err(Error::NonzeroDiagonal { i, value: row[i] });
        }
    }
    for (i, row) in matrix.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v < 0.0 {
                return Err(Error::NegativeDistance { i, j, value: v });
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if matrix[i][j] != matrix[j][i] {
                return Err(Error::Asymmetry { i, j, dij: matrix[i][j], dji: matrix[j][i] });
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if matrix[i][j] == 0.0 {
                return Err(Error::ZeroOffDiagonal { i, j });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let direct = matrix[i][k];
                let detour = matrix[i][j] + matrix[j][k];
                if !leq_tol(direct, detour) {
                    return Err(Error::TriangleViolation { i, j, k, direct, detour });
                }
            }
        }
    }
    let dist = matrix.iter().flat_map(|r| r.iter().copied()).collect();
    Ok(FiniteMetricSpace {
        ids: (0..n).map(|i| i.to_string()).collect(),
        n,
        dist,
        base_point: 0,
        coords: None,
    })
}

impl FiniteMetricSpace {
    /// Replaces the default `"0"`, `"1"`, ... point ids.
    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.n {
            return Err(Error::InvalidParameter(format!(
                "{} ids for a space of {} points",
                ids.len(),
                self.n
            )));
        }
        self.ids = ids;
        Ok(self)
    }

    pub fn with_base_point(mut self, base_point: usize) -> Result<Self> {
        self.check_index(base_point)?;
        self.base_point = base_point;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn base_point(&self) -> usize {
        self.base_point
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|p| p == id)
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.n {
            Ok(())
        } else {
            Err(Error::InvalidIndex { index, len: self.n })
        }
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest distance between distinct points (`inf` for a single point).
    pub fn min_positive_distance(&self) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                m = m.min(self.d(i, j));
            }
        }
        m
    }

    /// `d(x, S)`; `inf` for an empty set.
    pub fn dist_to_set(&self, x: usize, set: &[usize]) -> f64 {
        set.iter().map(|&s| self.d(x, s)).fold(f64::INFINITY, f64::min)
    }

    /// `d(A, B)`; `inf` if either is empty.
    pub fn set_distance(&self, a: &[usize], b: &[usize]) -> f64 {
        a.iter().map(|&x| self.dist_to_set(x, b)).fold(f64::INFINITY, f64::min)
    }

    pub fn set_diameter(&self, set: &[usize]) -> f64 {
        let mut m = 0.0f64;
        for (k, &x) in set.iter().enumerate() {
            for &y in &set[k + 1..] {
                m = m.max(self.d(x, y));
            }
        }
        m
    }

    /// Closed ball `B(center, r)`.
    pub fn ball(&self, center: usize, r: f64) -> Result<Subset> {
        self.check_index(center)?;
        if !(r >= 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius {r} must be >= 0")));
        }
        let indices = (0..self.n).filter(|&x| self.d(center, x) <= r).collect();
        Ok(Subset { indices })
    }

    /// The metric subspace on `indices` (in the given order). The base point is
    /// carried over when it is among them, otherwise the first index becomes base.
    pub fn restrict(&self, indices: &[usize]) -> Result<FiniteMetricSpace> {
        if indices.is_empty() {
            return Err(Error::EmptySpace);
        }
        for &i in indices {
            self.check_index(i)?;
        }
        let m = indices.len();
        let mut dist = Vec::with_capacity(m * m);
        for &i in indices {
            for &j in indices {
                dist.push(self.d(i, j));
            }
        }
        let base_point = indices.iter().position(|&i| i == self.base_point).unwrap_or(0);
        Ok(FiniteMetricSpace {
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
            n: m,
            dist,
            base_point,
            coords: self
                .coords
                .as_ref()
                .map(|c| indices.iter().map(|&i| c[i].clone()).collect()),
        })
    }

    /// Relabels points: point `perm[i]` of the result is point `i` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<FiniteMetricSpace> {
        check_permutation(perm, self.n)?;
        let mut inverse = vec![0; self.n];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        let mut out = self.restrict(&inverse)?;
        out.base_point = perm[self.base_point];
        Ok(out)
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::InvalidParameter(format!(
            "permutation has {} entries for {} points",
            perm.len(),
            n
        )));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidParameter("not a permutation".into()));
        }
        seen[p] = true;
    }
    Ok(())
}

/// A set of points of some space, kept as sorted distinct indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subset {
    indices: Vec<usize>,
}

impl Subset {
    /// Validates `indices` against a space of `len` points. Duplicates are rejected.
    pub fn new(len: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        for w in indices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidParameter(format!("duplicate index {}", w[0])));
            }
        }
        if let Some(&last) = indices.last() {
            if last >= len {
                return Err(Error::InvalidIndex { index: last, len });
            }
        }
        Ok(Subset { indices })
    }

    pub fn of(space: &FiniteMetricSpace, indices: Vec<usize>) -> Result<Self> {
        Subset::new(space.len(), indices)
    }

    pub fn all(len: usize) -> Self {
        Subset { indices: (0..len).collect() }
    }

    pub fn singleton(index: usize) -> Self {
        Subset { indices: vec![index] }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.indices.binary_search(&x).is_ok()
    }

    /// Position of `x` inside the sorted index list.
    pub fn position(&self, x: usize) -> Option<usize> {
        self.indices.binary_search(&x).ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn union(&self, other: &Subset) -> Subset {
        let mut indices: Vec<usize> = self.iter().chain(other.iter()).collect();
        indices.sort_unstable();
        indices.dedup();
        Subset { indices }
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    pub fn is_disjoint(&self, other: &Subset) -> bool {
        self.iter().all(|x| !other.contains(x))
    }
}

/// Finite point set in `l1^n` with the induced metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1PointSet {
    pub dim: usize,
    pub coords: Vec<Vec<f64>>,
    pub base_point: usize,
}

pub fn l1_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum()
}

pub fn l1_norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a.abs()).sum()
}

impl L1PointSet {
    pub fn new(dim: usize, coords: Vec<Vec<f64>>, base_point: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if coords.is_empty() {
            return Err(Error::EmptySpace);
        }
        if base_point >= coords.len() {
            return Err(Error::InvalidIndex { index: base_point, len: coords.len() });
        }
        for (i, c) in coords.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    c.len()
                )));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { i, j: i });
            }
        }
        Ok(L1PointSet { dim, coords, base_point })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Materializes the distance matrix. The l1 metric needs no axiom check,
    /// only distinctness of points.
    pub fn to_space(&self) -> Result<FiniteMetricSpace> {
        let n = self.coords.len();
        let cap = max_points();
        if n > cap {
            return Err(Error::TooLarge { what: "l1 point set", size: n, cap });
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = l1_dist(&self.coords[i], &self.coords[j]);
                if d == 0.0 {
                    return Err(Error::ZeroOffDiagonal { i, j });
                }
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Ok(FiniteMetricSpace {
            ids: (0..n).map(|i| i.to_string()).collect(),
            n,
            dist,
            base_point: self.base_point,
            coords: Some(self.coords.clone()),
        })
    }

    /// Separation constants computed from coordinates, without a distance matrix or size cap.
    pub fn separation_constants(&self, family: &[Subset], anchor: usize) -> Result<SeparationReport> {
        separation_with(self.len(), |i, j| l1_dist(&self.coords[i], &self.coords[j]), family, anchor)
    }
}

/// Geometry of one set of a family relative to the anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SetGeometry {
    pub diam: f64,
    pub dist_to_anchor: f64,
}

/// Separation constants of a family `{S_i}` around an anchor `x0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// `max (d(x,x0) + d(y,x0)) / d(x,y)` over cross pairs, clamped below by 1.
    pub lambda: f64,
    /// The same maximum before clamping (`None` when there are no cross pairs).
    pub lambda_unclamped: Option<f64>,
    /// Cross pair attaining `lambda_unclamped`.
    pub lambda_witness: Option<(usize, usize)>,
    /// `max diam(S_i) / d(S_i, x0)`.
    #[serde(rename = "D")]
    pub d_const: f64,
    pub min_cross_distance: Option<f64>,
    pub per_set: Vec<SetGeometry>,
    pub anchor: usize,
}

/// Exact separation constants by exhaustive pair scans.
pub fn separation_constants(
    space: &FiniteMetricSpace,
    family: &[Subset],
    anchor: usize,
) -> Result<SeparationReport> {
    separation_with(space.len(), |i, j| space.d(i, j), family, anchor)
}

/// Separation constants for any distance given as a function of point indices `0..n`.
pub fn separation_with(
    n: usize,
    d: impl Fn(usize, usize) -> f64,
    family: &[Subset],
    anchor: usize,
) -> Result<SeparationReport> {
    let check = |index: usize| if index < n { Ok(()) } else { Err(Error::InvalidIndex { index, len: n }) };
    check(anchor)?;
    for (i, set) in family.iter().enumerate() {
        if set.is_empty() {
            return Err(Error::EmptySet { set: i });
        }
        if let Some(&last) = set.indices().last() {
            check(last)?;
        }
        if set.contains(anchor) {
            return Err(Error::AnchorInSet { set: i, anchor });
        }
    }
    for i in 0..family.len() {
        for j in (i + 1)..family.len() {
            if let Some(point) = family[i].iter().find(|&x| family[j].contains(x)) {
                return Err(Error::OverlappingSets { first: i, second: j, point });
            }
        }
    }

    let to_anchor: Vec<f64> = (0..n).map(|x| d(x, anchor)).collect();
    let per_set: Vec<SetGeometry> = family
        .iter()
        .map(|s| {
            let idx = s.indices();
            let mut diam = 0.0f64;
            for (a, &x) in idx.iter().enumerate() {
                for &y in &idx[a + 1..] {
                    diam = diam.max(d(x, y));
                }
            }
            let dist_to_anchor = idx.iter().map(|&x| to_anchor[x]).fold(f64::INFINITY, f64::min);
            SetGeometry { diam, dist_to_anchor }
        })
        .collect();
    let d_const = per_set.iter().map(|g| g.diam / g.dist_to_anchor).fold(0.0, f64::max);

    let mut best: Option<(f64, (usize, usize))> = None;
    let mut min_cross = f64::INFINITY;
    for i in 0..family.len() {
        for j in (i + 1)..family.len() {
            for x in family[i].iter() {
                for y in family[j].iter() {
                    let dxy = d(x, y);
                    if dxy == 0.0 {
                        return Err(Error::ZeroCrossDistance { first: i, second: j });
                    }
                    min_cross = min_cross.min(dxy);
                    let ratio = (to_anchor[x] + to_anchor[y]) / dxy;
                    if best.map_or(true, |(b, _)| ratio > b) {
                        best = Some((ratio, (x, y)));
                    }
                }
            }
        }
    }
    let lambda_unclamped = best.map(|(b, _)| b);
    Ok(SeparationReport {
        lambda: lambda_unclamped.unwrap_or(1.0).max(1.0),
        lambda_unclamped,
        lambda_witness: best.map(|(_, w)| w),
        d_const,
        min_cross_distance: min_cross.is_finite().then_some(min_cross),
        per_set,
        anchor,
    })
}

/// Outcome of an (eps, delta)-net check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetCheck {
    pub is_net: bool,
    /// `max_x d(x, candidate)` over the ambient space.
    pub covering_radius: f64,
    /// Smallest distance between distinct candidate points (`inf` for one point).
    pub min_separation: f64,
    /// A point farther than `eps` from the candidate, if any.
    pub density_witness: Option<usize>,
    /// A candidate pair closer than `delta`, if any.
    pub separation_witness: Option<(usize, usize)>,
}

pub fn is_net(space: &FiniteMetricSpace, candidate: &Subset, eps: f64, delta: f64) -> Result<NetCheck> {
    if !(eps > 0.0 && delta > 0.0) {
        return Err(Error::InvalidParameter("eps and delta must be positive".into()));
    }
    if candidate.is_empty() {
        return Err(Error::EmptySet { set: 0 });
    }
    let mut covering_radius = 0.0f64;
    let mut density_witness = None;
    for x in 0..space.len() {
        let dx = space.dist_to_set(x, candidate.indices());
        if dx > covering_radius {
            covering_radius = dx;
        }
        if density_witness.is_none() && !leq_tol(dx, eps) {
            density_witness = Some(x);
        }
    }
    let mut min_separation = f64::INFINITY;
    let mut separation_witness = None;
    let idx = candidate.indices();
    for (k, &x) in idx.iter().enumerate() {
        for &y in &idx[k + 1..] {
            let d = space.d(x, y);
            min_separation = min_separation.min(d);
            if separation_witness.is_none() && !leq_tol(delta, d) {
                separation_witness = Some((x, y));
            }
        }
    }
    Ok(NetCheck {
        is_net: density_witness.is_none() && separation_witness.is_none(),
        covering_radius,
        min_separation,
        density_witness,
        separation_witness,
    })
}

/// Greedy maximal delta-separated set, scanning points in `order`.
pub fn greedy_net(space: &FiniteMetricSpace, delta: f64, order: &[usize]) -> Result<Subset> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    check_permutation(order, space.len())?;
    let mut chosen: Vec<usize> = Vec::new();
    for &p in order {
        if chosen.iter().all(|&c| space.d(p, c) >= delta) {
            chosen.push(p);
        }
    }
    Subset::of(space, chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> FiniteMetricSpace {
        let coords = points.iter().map(|&p| vec![p]).collect();
        L1PointSet::new(1, coords, 0).unwrap().to_space().unwrap()
    }

    #[test]
    fn single_point_space_is_valid() {
        let s = validate_metric(&[vec![0.0]]).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn two_point_space_is_valid() {
        let s = validate_metric(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(s.d(0, 1), 1.0);
    }

    /// Exhaustive triple scan used as the oracle for the witness below.
    fn first_triangle_violation(m: &[Vec<f64>]) -> Option<(usize, usize, usize)> {
        let n = m.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if m[i][k] > m[i][j] + m[j][k] {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    #[test]
    fn triangle_violation_reports_witness() {
        let m = vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 1.0], vec![3.0, 1.0, 0.0]];
        assert_eq!(first_triangle_violation(&m), Some((0, 1, 2)));
        match validate_metric(&m) {
            Err(Error::TriangleViolation { i, j, k, .. }) => assert_eq!((i, j, k), (0, 1, 2)),
            other => panic!("expected triangle violation, got {other:?}"),
        }
    }

    #[test]
    fn axiom_errors() {
        assert!(matches!(
            validate_metric(&[vec![0.0, 1.0], vec![2.0, 0.0]]),
            Err(Error::Asymmetry { i: 0, j: 1, .. })
        ));
        assert!(matches!(
            validate_metric(&[vec![0.0, -1.0], vec![-1.0, 0.0]]),
            Err(Error::NegativeDistance { i: 0, j: 1, .. })
        ));
        assert!(matches!(
            validate_metric(&[vec![0.0, 0.0], vec![0.0, 0.0]]),
            Err(Error::ZeroOffDiagonal { i: 0, j: 1 })
        ));
        assert!(matches!(
            validate_metric(&[vec![0.0, 1.0], vec![1.0]]),
            Err(Error::NotSquare { row: 1, .. })
        ));
    }

    #[test]
    fn ball_cases() {
        let s = line(&[0.0, 1.0, 2.0]);
        assert_eq!(s.ball(1, 0.0).unwrap().indices(), &[1]);
        assert_eq!(s.ball(1, 1.0).unwrap().indices(), &[0, 1, 2]);
        assert_eq!(s.ball(0, s.diameter()).unwrap().len(), 3);
        assert!(s.ball(0, -1.0).is_err());
    }

    #[test]
    fn separation_examples() {
        let s = line(&[0.0, -1.0, 1.0, 4.0]);
        let single = separation_constants(&s, &[Subset::singleton(1)], 0).unwrap();
        assert_eq!(single.lambda, 1.0);
        assert_eq!(single.lambda_unclamped, None);

        let r = separation_constants(&s, &[Subset::singleton(1), Subset::singleton(2)], 0).unwrap();
        assert_eq!(r.lambda, 1.0);
        assert_eq!(r.d_const, 0.0);

        let r = separation_constants(&s, &[Subset::singleton(2), Subset::singleton(3)], 0).unwrap();
        assert!((r.lambda - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.min_cross_distance, Some(3.0));
    }

    #[test]
    fn separation_errors() {
        let s = line(&[0.0, 1.0, 2.0]);
        assert!(matches!(
            separation_constants(&s, &[Subset::singleton(0)], 0),
            Err(Error::AnchorInSet { set: 0, anchor: 0 })
        ));
        let a = Subset::new(3, vec![1, 2]).unwrap();
        assert!(matches!(
            separation_constants(&s, &[a.clone(), Subset::singleton(2)], 0),
            Err(Error::OverlappingSets { first: 0, second: 1, point: 2 })
        ));
        let empty = Subset::new(3, vec![]).unwrap();
        assert!(matches!(
            separation_constants(&s, &[a, empty], 0),
            Err(Error::EmptySet { set: 1 })
        ));
    }

    #[test]
    fn net_examples() {
        let s = line(&[0.0, 1.0, 2.5]);
        let all = Subset::all(3);
        assert!(is_net(&s, &all, 0.1, s.min_positive_distance()).unwrap().is_net);

        let two = validate_metric(&[vec![0.0, 5.0], vec![5.0, 0.0]]).unwrap();
        let c = is_net(&two, &Subset::singleton(0), 1.0, 1.0).unwrap();
        assert!(!c.is_net);
        assert_eq!(c.density_witness, Some(1));

        // Z in [-3, 3] inside the half-integers in [-3, 3].
        let halves: Vec<f64> = (-6..=6).map(|k| k as f64 / 2.0).collect();
        let h = line(&halves);
        let ints: Vec<usize> = (0..halves.len()).filter(|&i| halves[i].fract() == 0.0).collect();
        let c = is_net(&h, &Subset::of(&h, ints).unwrap(), 0.5, 1.0).unwrap();
        assert!(c.is_net);
        assert_eq!(c.covering_radius, 0.5);
        assert_eq!(c.min_separation, 1.0);
    }

    #[test]
    fn greedy_examples() {
        let s = line(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let order: Vec<usize> = (0..5).collect();
        assert_eq!(greedy_net(&s, 2.0, &order).unwrap().indices(), &[0, 2, 4]);
        assert_eq!(greedy_net(&s, 10.0, &[3, 0, 1, 2, 4]).unwrap().indices(), &[3]);
        assert_eq!(greedy_net(&s, 1.0, &order).unwrap().len(), 5);
        assert!(greedy_net(&s, 1.0, &[0, 0, 1, 2, 3]).is_err());
    }

    #[test]
    fn subset_validation() {
        assert!(Subset::new(3, vec![0, 0]).is_err());
        assert!(matches!(Subset::new(3, vec![3]), Err(Error::InvalidIndex { index: 3, len: 3 })));
        assert_eq!(Subset::new(5, vec![4, 1]).unwrap().indices(), &[1, 4]);
    }

    #[test]
    fn restrict_and_permute() {
        let s = line(&[0.0, 1.0, 3.0]).with_base_point(2).unwrap();
        let r = s.restrict(&[2, 0]).unwrap();
        assert_eq!(r.base_point(), 0);
        assert_eq!(r.d(0, 1), 3.0);
        let p = s.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.base_point(), 1);
        assert_eq!(p.d(2, 0), s.d(0, 1));
        assert_eq!(p.coords().unwrap()[2], vec![0.0]);
    }
}
