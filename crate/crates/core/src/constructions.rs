//! Generators for separated families of sets in `l1^n`, with their separation constants.
//!
//! Every family lives in an [`L1Family`]: the origin (the anchor) at index 0
//! followed by the points of each set. Separation constants are computed from
//! coordinates by exhaustive pair scans.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{l1_dist, l1_norm, FiniteMetricSpace, L1PointSet, SeparationReport, Subset};

/// Largest number of points a generator will produce.
pub const MAX_FAMILY_POINTS: usize = 200_000;

/// Sets in `l1^dim` indexed into one point set whose point 0 is the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1Family {
    pub points: L1PointSet,
    pub sets: Vec<Subset>,
    pub anchor: usize,
}

impl L1Family {
    pub fn from_sets(dim: usize, sets: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let total = 1 + sets.iter().map(Vec::len).sum::<usize>();
        if total > MAX_FAMILY_POINTS {
            return Err(Error::TooLarge { what: "family", size: total, cap: MAX_FAMILY_POINTS });
        }
        let mut coords = vec![vec![0.0; dim]];
        let mut subsets = Vec::with_capacity(sets.len());
        for (i, set) in sets.into_iter().enumerate() {
            if set.is_empty() {
                return Err(Error::EmptySet { set: i });
            }
            let start = coords.len();
            coords.extend(set);
            subsets.push(Subset::new(total, (start..coords.len()).collect())?);
        }
        let points = L1PointSet::new(dim, coords, 0)?;
        Ok(L1Family { points, sets: subsets, anchor: 0 })
    }

    pub fn dim(&self) -> usize {
        self.points.dim
    }

    pub fn set_coords(&self, i: usize) -> Vec<&[f64]> {
        self.sets[i].iter().map(|x| self.points.coords[x].as_slice()).collect()
    }

    pub fn separation(&self) -> Result<SeparationReport> {
        self.points.separation_constants(&self.sets, self.anchor)
    }

    /// The family as a finite metric space (subject to the point cap).
    pub fn to_space(&self) -> Result<FiniteMetricSpace> {
        self.points.to_space()
    }
}

fn power(k: u32) -> Result<i64> {
    1i64.checked_shl(k)
        .filter(|&p| p > 0 && k < 60)
        .ok_or_else(|| Error::InvalidParameter(format!("exponent {k} is too large")))
}

/// Integer vectors of `l1` norm at most `radius`, in lexicographic order.
pub fn l1_ball_lattice(dim: usize, radius: i64) -> Vec<Vec<i64>> {
    fn rec(dim: usize, left: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == dim {
            out.push(prefix.clone());
            return;
        }
        for v in -left..=left {
            prefix.push(v);
            rec(dim, left - v.abs(), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if radius >= 0 {
        rec(dim, radius, &mut Vec::with_capacity(dim), &mut out);
    }
    out
}

/// Number of integer points of `l1` norm at most `radius` in dimension `dim`.
fn l1_ball_count(dim: usize, radius: i64) -> u128 {
    // count[d][r]: points of norm exactly r in dimension d.
    let r = radius.max(0) as usize;
    let mut exact = vec![0u128; r + 1];
    exact[0] = 1;
    for _ in 0..dim {
        let mut next = vec![0u128; r + 1];
        for (k, &c) in exact.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for v in 0..=(r - k) {
                next[k + v] = next[k + v].saturating_add(if v == 0 { c } else { 2 * c });
            }
        }
        exact = next;
    }
    exact.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

fn check_budget(points: u128) -> Result<()> {
    if points > MAX_FAMILY_POINTS as u128 {
        return Err(Error::TooLarge { what: "family", size: points.min(usize::MAX as u128) as usize, cap: MAX_FAMILY_POINTS });
    }
    Ok(())
}

/// Sets translated into dyadic shells around the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicPlacement {
    pub k_seq: Vec<u32>,
    /// `p_n`, the image of the seed of set `n`.
    pub anchors: Vec<Vec<i64>>,
    /// `p_n - q_n`.
    pub translates: Vec<Vec<i64>>,
    pub family: L1Family,
    pub report: SeparationReport,
}

fn lattice_diameter(set: &[Vec<i64>]) -> i64 {
    let mut diam = 0;
    for (a, x) in set.iter().enumerate() {
        for y in &set[a + 1..] {
            diam = diam.max(x.iter().zip(y).map(|(u, v)| (u - v).abs()).sum::<i64>());
        }
    }
    diam
}

/// Places each set `S_n` (a finite set of lattice points) by translating its
/// seed `q_n` to `p_n = (-2^(k_n+2), 0, ..., 0)`, where `k_n` is the least
/// integer `k >= 1` with `2^k > diam(S_n)` and `k >= k_(n-1) + 4`.
pub fn place_dyadic(sets: &[Vec<Vec<i64>>], seeds: &[usize]) -> Result<DyadicPlacement> {
    if sets.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if seeds.len() != sets.len() {
        return Err(Error::InvalidParameter(format!("{} seeds for {} sets", seeds.len(), sets.len())));
    }
    let dim = sets.iter().find_map(|s| s.first()).map_or(0, Vec::len);
    if dim == 0 {
        return Err(Error::InvalidParameter("sets must live in Z^n with n >= 1".into()));
    }
    let mut k_seq: Vec<u32> = Vec::with_capacity(sets.len());
    let mut anchors = Vec::with_capacity(sets.len());
    let mut translates = Vec::with_capacity(sets.len());
    let mut placed = Vec::with_capacity(sets.len());
    for (n, (set, &seed)) in sets.iter().zip(seeds).enumerate() {
        if set.is_empty() {
            return Err(Error::EmptySet { set: n });
        }
        if set.iter().any(|x| x.len() != dim) {
            return Err(Error::InvalidParameter(format!("set {n} has points of the wrong dimension")));
        }
        if set.iter().flatten().any(|c| c.unsigned_abs() > 1 << 40) {
            return Err(Error::UnboundedSet { set: n });
        }
        let q = set.get(seed).ok_or(Error::InvalidIndex { index: seed, len: set.len() })?;
        let diam = lattice_diameter(set);
        let mut k = k_seq.last().map_or(1, |&prev| prev + 4);
        while power(k)? <= diam {
            k += 1;
        }
        let (lower, upper) = (power(k + 1)?, power(k + 2)?);
        // Lowest point of the band in lexicographic order.
        let mut p = vec![0i64; dim];
        p[0] = -upper;
        let norm: i64 = p.iter().map(|c| c.abs()).sum();
        if norm < lower || norm > upper {
            return Err(Error::NoAdmissiblePoint { lower: lower as f64, upper: upper as f64 });
        }
        let t: Vec<i64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
        placed.push(
            set.iter()
                .map(|x| x.iter().zip(&t).map(|(a, b)| (a + b) as f64).collect())
                .collect(),
        );
        k_seq.push(k);
        anchors.push(p);
        translates.push(t);
    }
    let family = L1Family::from_sets(dim, placed)?;
    let report = family.separation()?;
    Ok(DyadicPlacement { k_seq, anchors, translates, family, report })
}

/// Balls `B(x_n, 2^n)` of the lattice with `x_n = (-2^(n+2), 0, ..., 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSequence {
    pub centers: Vec<Vec<i64>>,
    pub radii: Vec<i64>,
    /// Half-width of the lattice window holding every ball.
    pub window: i64,
    pub family: L1Family,
    pub report: SeparationReport,
}

pub fn ball_sequence_lambda20(dim: usize, count: usize, window: Option<i64>) -> Result<BallSequence> {
    if dim == 0 || count == 0 {
        return Err(Error::InvalidParameter("dimension and count must be positive".into()));
    }
    let top = u32::try_from(count).map_err(|_| Error::InvalidParameter("count too large".into()))?;
    let needed = power(top + 2)? + power(top)?;
    let window = window.unwrap_or(needed);
    if window < needed {
        return Err(Error::WindowTooSmall { window, needed });
    }
    let mut budget = 0u128;
    for n in 1..=top {
        budget += l1_ball_count(dim, power(n)?);
    }
    check_budget(budget)?;
    let mut centers = Vec::with_capacity(count);
    let mut radii = Vec::with_capacity(count);
    let mut sets = Vec::with_capacity(count);
    for n in 1..=top {
        let r = power(n)?;
        let mut c = vec![0i64; dim];
        c[0] = -power(n + 2)?;
        sets.push(
            l1_ball_lattice(dim, r)
                .into_iter()
                .map(|v| v.iter().zip(&c).map(|(a, b)| (a + b) as f64).collect())
                .collect(),
        );
        centers.push(c);
        radii.push(r);
    }
    let family = L1Family::from_sets(dim, sets)?;
    let report = family.separation()?;
    Ok(BallSequence { centers, radii, window, family, report })
}

/// Balls `x_n + 2^-(N_n+1) B_(E_n)` with `|x_n| = 2^-N_n`, discretized on the mesh `2^-mesh_exponent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkingBallSequence {
    /// `N_n`.
    pub exponents: Vec<u32>,
    /// Dimension of `E_n` (the span of the first coordinates).
    pub dims: Vec<usize>,
    pub mesh_exponent: u32,
    pub centers: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub family: L1Family,
    pub report: SeparationReport,
}

impl ShrinkingBallSequence {
    /// Mesh exponent needed for `count` balls.
    pub fn required_mesh(count: usize) -> u32 {
        2 * count as u32 + 2
    }
}

/// Uses `N_1 = 1` and `N_n = N_(n-1) + 2`; `dims` must be non-decreasing and hold at least `count` entries.
pub fn shrinking_ball_sequence(dims: &[usize], count: usize, mesh_exponent: Option<u32>) -> Result<ShrinkingBallSequence> {
    if count == 0 || dims.len() < count {
        return Err(Error::InvalidParameter(format!("need {count} dimensions, got {}", dims.len())));
    }
    let dims = &dims[..count];
    if dims[0] == 0 || dims.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("dimensions must be positive and non-decreasing".into()));
    }
    let exponents: Vec<u32> = (0..count as u32).map(|n| 1 + 2 * n).collect();
    let required = ShrinkingBallSequence::required_mesh(count);
    let m = mesh_exponent.unwrap_or(required);
    if m < required {
        return Err(Error::MeshTooCoarse { mesh_exponent: m, required });
    }
    if m > 50 {
        return Err(Error::InvalidParameter(format!("mesh exponent {m} is too fine")));
    }
    let mut budget = 0u128;
    for (&big_n, &d) in exponents.iter().zip(dims) {
        budget += l1_ball_count(d, power(m - big_n - 1)?);
    }
    check_budget(budget)?;
    let dim = *dims.last().unwrap();
    let h = (-(m as f64)).exp2();
    let mut centers = Vec::with_capacity(count);
    let mut radii = Vec::with_capacity(count);
    let mut sets = Vec::with_capacity(count);
    for (&big_n, &d) in exponents.iter().zip(dims) {
        let mut c = vec![0.0; dim];
        c[0] = (-(big_n as f64)).exp2();
        let units = power(m - big_n - 1)?;
        sets.push(
            l1_ball_lattice(d, units)
                .into_iter()
                .map(|v| {
                    let mut x = c.clone();
                    for (k, &a) in v.iter().enumerate() {
                        x[k] += a as f64 * h;
                    }
                    x
                })
                .collect(),
        );
        centers.push(c);
        radii.push(units as f64 * h);
    }
    let family = L1Family::from_sets(dim, sets)?;
    let report = family.separation()?;
    Ok(ShrinkingBallSequence { exponents, dims: dims.to_vec(), mesh_exponent: m, centers, radii, family, report })
}

/// Largest `n` accepted by [`grid_box_sequence`].
pub const MAX_GRID_BOX_DIM: usize = 3;

/// `S_k = [-4^k, 4^k]^k` of the lattice `Z^k`, for `k = 1..=n`.
pub fn grid_box_sequence(n: usize) -> Result<Vec<L1PointSet>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if n > MAX_GRID_BOX_DIM {
        return Err(Error::TooLarge { what: "grid box sequence", size: n, cap: MAX_GRID_BOX_DIM });
    }
    (1..=n)
        .map(|k| {
            let r = 4i64.pow(k as u32);
            let bx = crate::extension::GridBox::cube(k, -r, r)?;
            let coords = crate::extension::grid_points(&bx)
                .into_iter()
                .map(|p| p.into_iter().map(|c| c as f64).collect())
                .collect();
            L1PointSet::new(k, coords, 0)
        })
        .collect()
}

/// Keeps the first `dim` coordinates of `x` and clamps each to `[-r, r]`.
pub fn box_retract(x: &[i64], dim: usize, r: i64) -> Vec<i64> {
    (0..dim).map(|k| x.get(k).copied().unwrap_or(0).clamp(-r, r)).collect()
}

/// Largest `|R x - R y| / |x - y|` of [`box_retract`] over all pairs of the
/// window `[-w, w]^ambient_dim`, with a witnessing pair.
pub fn box_retraction_lipschitz(ambient_dim: usize, dim: usize, r: i64, w: i64) -> (f64, Option<(Vec<i64>, Vec<i64>)>) {
    let Ok(bx) = crate::extension::GridBox::cube(ambient_dim, -w, w) else {
        return (0.0, None);
    };
    let pts = crate::extension::grid_points(&bx);
    let img: Vec<Vec<f64>> = pts
        .iter()
        .map(|p| box_retract(p, dim, r).into_iter().map(|c| c as f64).collect())
        .collect();
    let fpts: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|&c| c as f64).collect()).collect();
    let mut best = 0.0;
    let mut witness = None;
    for a in 0..pts.len() {
        for b in (a + 1)..pts.len() {
            let ratio = l1_dist(&img[a], &img[b]) / l1_dist(&fpts[a], &fpts[b]);
            if ratio > best {
                best = ratio;
                witness = Some((pts[a].clone(), pts[b].clone()));
            }
        }
    }
    (best, witness)
}

/// `max (|x| + |y|) / |x - y|` over cross pairs, straight from coordinates.
pub fn cross_ratio_max(family: &L1Family) -> f64 {
    let pts = &family.points.coords;
    let mut best = 0.0f64;
    for i in 0..family.sets.len() {
        for j in (i + 1)..family.sets.len() {
            for x in family.sets[i].iter() {
                for y in family.sets[j].iter() {
                    best = best.max((l1_norm(&pts[x]) + l1_norm(&pts[y])) / l1_dist(&pts[x], &pts[y]));
                }
            }
        }
    }
    best
}
