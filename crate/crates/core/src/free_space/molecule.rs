use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::flow::transport;
use crate::lp::{LinearProgram, Relation, Sense};
use crate::metric::{FiniteMetricSpace, TOL};

/// Finitely supported signed measure of total mass zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    space: Arc<FiniteMetricSpace>,
    weights: BTreeMap<usize, f64>,
}

fn mass_tolerance(weights: &BTreeMap<usize, f64>) -> f64 {
    TOL * weights.values().map(|w| w.abs()).sum::<f64>().max(1.0)
}

impl Molecule {
    /// Rejects weights whose total mass is not zero (up to the global tolerance).
    pub fn new(space: Arc<FiniteMetricSpace>, weights: BTreeMap<usize, f64>) -> Result<Self> {
        for (&x, &w) in &weights {
            space.check_index(x)?;
            if !w.is_finite() {
                return Err(Error::InvalidParameter(format!("weight at {x} is not finite")));
            }
        }
        let mass: f64 = weights.values().sum();
        if mass.abs() > mass_tolerance(&weights) {
            return Err(Error::NonzeroMass { mass });
        }
        Ok(Molecule { space, weights })
    }

    /// Moves the residual mass onto the base point.
    pub fn pinned(space: Arc<FiniteMetricSpace>, mut weights: BTreeMap<usize, f64>) -> Result<Self> {
        let mass: f64 = weights.values().sum();
        *weights.entry(space.base_point()).or_insert(0.0) -= mass;
        Molecule::new(space, weights)
    }

    pub fn zero(space: Arc<FiniteMetricSpace>) -> Self {
        Molecule { space, weights: BTreeMap::new() }
    }

    /// `delta(x) - delta(y)`.
    pub fn dirac_difference(space: Arc<FiniteMetricSpace>, x: usize, y: usize) -> Result<Self> {
        space.check_index(x)?;
        space.check_index(y)?;
        let mut weights = BTreeMap::new();
        if x != y {
            weights.insert(x, 1.0);
            weights.insert(y, -1.0);
        }
        Ok(Molecule { space, weights })
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn weights(&self) -> &BTreeMap<usize, f64> {
        &self.weights
    }

    pub fn scaled(&self, alpha: f64) -> Molecule {
        Molecule {
            space: self.space.clone(),
            weights: self.weights.iter().map(|(&x, &w)| (x, alpha * w)).collect(),
        }
    }

    pub fn add(&self, other: &Molecule) -> Result<Molecule> {
        if *self.space != *other.space {
            return Err(Error::DomainMismatch);
        }
        let mut weights = self.weights.clone();
        for (&x, &w) in &other.weights {
            *weights.entry(x).or_insert(0.0) += w;
        }
        Ok(Molecule { space: self.space.clone(), weights })
    }

    fn support(&self) -> (Vec<usize>, Vec<f64>) {
        self.weights.iter().filter(|(_, &w)| w != 0.0).map(|(&x, &w)| (x, w)).unzip()
    }
}

/// Transport cost of the positive part onto the negative part of `weights` on `points`.
pub fn kr_primal_on(space: &FiniteMetricSpace, points: &[usize], weights: &[f64]) -> Result<f64> {
    let mut pos = Vec::new();
    let mut supply = Vec::new();
    let mut neg = Vec::new();
    let mut demand = Vec::new();
    for (&x, &w) in points.iter().zip(weights) {
        if w > 0.0 {
            pos.push(x);
            supply.push(w);
        } else if w < 0.0 {
            neg.push(x);
            demand.push(-w);
        }
    }
    if pos.is_empty() && neg.is_empty() {
        return Ok(0.0);
    }
    if pos.is_empty() || neg.is_empty() {
        let mass: f64 = weights.iter().sum();
        return Err(Error::NonzeroMass { mass });
    }
    // Rounding can leave the two sides unequal by a few ulps; absorb that on the largest demand.
    let gap: f64 = supply.iter().sum::<f64>() - demand.iter().sum::<f64>();
    let scale = supply.iter().sum::<f64>().max(1.0);
    if gap.abs() > TOL * scale {
        return Err(Error::NonzeroMass { mass: gap });
    }
    let k = (0..demand.len()).max_by(|&a, &b| demand[a].total_cmp(&demand[b])).unwrap();
    demand[k] += gap;
    transport(&supply, &demand, |i, j| space.d(pos[i], neg[j]))
}

/// `max sum w_x f(x)` over 1-Lipschitz `f` on `points`, with `f(points[0]) = 0`.
pub fn kr_dual_on(space: &FiniteMetricSpace, points: &[usize], weights: &[f64]) -> Result<f64> {
    let n = points.len();
    if n <= 1 {
        return Ok(0.0);
    }
    // Variable k - 1 is f(points[k]).
    let mut lp = LinearProgram::new(n - 1, Sense::Maximize);
    for k in 1..n {
        lp.set_free(k - 1);
        lp.set_objective(k - 1, weights[k]);
    }
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let mut row = Vec::with_capacity(2);
            if a > 0 {
                row.push((a - 1, 1.0));
            }
            if b > 0 {
                row.push((b - 1, -1.0));
            }
            lp.add_constraint(row, Relation::Le, space.d(points[a], points[b]));
        }
    }
    Ok(lp.solve()?.value)
}

/// Free-space norm of a molecule, by min-cost flow.
pub fn kr_norm(mu: &Molecule) -> Result<f64> {
    let (pts, w) = mu.support();
    kr_primal_on(&mu.space, &pts, &w)
}

/// Free-space norm of a molecule, by the Lipschitz dual LP on its support
/// (or on the whole space when `whole_space` is set).
pub fn kr_norm_dual(mu: &Molecule, whole_space: bool) -> Result<f64> {
    if whole_space {
        let pts: Vec<usize> = (0..mu.space.len()).collect();
        let w: Vec<f64> = pts.iter().map(|x| mu.weights.get(x).copied().unwrap_or(0.0)).collect();
        return kr_dual_on(&mu.space, &pts, &w);
    }
    let (pts, w) = mu.support();
    kr_dual_on(&mu.space, &pts, &w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{validate_metric, L1PointSet};

    fn line(points: &[f64]) -> Arc<FiniteMetricSpace> {
        let coords = points.iter().map(|&p| vec![p]).collect();
        Arc::new(L1PointSet::new(1, coords, 0).unwrap().to_space().unwrap())
    }

    #[test]
    fn zero_and_diracs() {
        let s = line(&[0.0, 1.0, 4.0]);
        assert_eq!(kr_norm(&Molecule::zero(s.clone())).unwrap(), 0.0);
        for (x, y) in [(0, 1), (2, 0), (1, 2)] {
            let mu = Molecule::dirac_difference(s.clone(), x, y).unwrap();
            assert_eq!(kr_norm(&mu).unwrap(), s.d(x, y));
            assert!((kr_norm_dual(&mu, false).unwrap() - s.d(x, y)).abs() < 1e-12);
        }
    }

    #[test]
    fn nonzero_mass() {
        let s = line(&[0.0, 1.0]);
        let w = BTreeMap::from([(0, 1.0), (1, -0.5)]);
        assert!(matches!(Molecule::new(s.clone(), w.clone()), Err(Error::NonzeroMass { .. })));
        let mu = Molecule::pinned(s, w).unwrap();
        assert_eq!(mu.weights()[&0], 0.5);
    }

    #[test]
    fn four_point_duality() {
        let m = validate_metric(&[
            vec![0.0, 2.0, 3.0, 4.0],
            vec![2.0, 0.0, 2.0, 3.0],
            vec![3.0, 2.0, 0.0, 2.0],
            vec![4.0, 3.0, 2.0, 0.0],
        ])
        .unwrap();
        let s = Arc::new(m);
        let mu = Molecule::new(s, BTreeMap::from([(0, 3.0), (1, -1.0), (2, -4.0), (3, 2.0)])).unwrap();
        let p = kr_norm(&mu).unwrap();
        let d = kr_norm_dual(&mu, false).unwrap();
        let dw = kr_norm_dual(&mu, true).unwrap();
        assert!((p - d).abs() < 1e-9 && (p - dw).abs() < 1e-9);
        // 0 sends one unit to 1 and two to 2, 3 sends two to 2: 2 + 6 + 4.
        assert!((p - 12.0).abs() < 1e-12);
    }
}
