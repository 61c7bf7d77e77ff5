//! Real functions on subsets, exact Lipschitz seminorms and McShane extensions.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{leq_tol, FiniteMetricSpace, Subset};

/// Values of a function on a subset of a space, in the subset's index order.
#[derive(Debug, Clone, PartialEq)]
pub struct LipFunction {
    space: Arc<FiniteMetricSpace>,
    domain: Subset,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipNorm {
    pub value: f64,
    /// Pair of space indices attaining the maximum; `None` for constants.
    pub witness: Option<(usize, usize)>,
}

impl LipFunction {
    pub fn new(space: Arc<FiniteMetricSpace>, domain: Subset, values: Vec<f64>) -> Result<Self> {
        if domain.is_empty() {
            return Err(Error::EmptyDomain);
        }
        if let Some(&last) = domain.indices().last() {
            space.check_index(last)?;
        }
        if values.len() != domain.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values for a domain of {} points",
                values.len(),
                domain.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("value {i} is not finite")));
        }
        Ok(LipFunction { space, domain, values })
    }

    /// Builds a function on the whole space.
    pub fn on_space(space: Arc<FiniteMetricSpace>, values: Vec<f64>) -> Result<Self> {
        let domain = Subset::all(space.len());
        LipFunction::new(space, domain, values)
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn domain(&self) -> &Subset {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, x: usize) -> Option<f64> {
        self.domain.position(x).map(|k| self.values[k])
    }

    /// Subtracts the value at the base point when the base point is in the domain.
    pub fn pinned(&self) -> LipFunction {
        match self.value_at(self.space.base_point()) {
            Some(v0) => LipFunction {
                space: self.space.clone(),
                domain: self.domain.clone(),
                values: self.values.iter().map(|v| v - v0).collect(),
            },
            None => self.clone(),
        }
    }

    pub fn restrict(&self, to: &Subset) -> Result<LipFunction> {
        let mut values = Vec::with_capacity(to.len());
        for x in to.iter() {
            match self.value_at(x) {
                Some(v) => values.push(v),
                None => return Err(Error::DomainMismatch),
            }
        }
        LipFunction::new(self.space.clone(), to.clone(), values)
    }

    pub fn scaled(&self, alpha: f64) -> LipFunction {
        LipFunction {
            space: self.space.clone(),
            domain: self.domain.clone(),
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    fn check_same_domain(&self, other: &LipFunction) -> Result<()> {
        if self.domain != other.domain || !Arc::ptr_eq(&self.space, &other.space) && *self.space != *other.space {
            return Err(Error::DomainMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &LipFunction) -> Result<LipFunction> {
        self.check_same_domain(other)?;
        Ok(LipFunction {
            space: self.space.clone(),
            domain: self.domain.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }
}

/// Exact Lipschitz constant of `values` placed on `points` (parallel slices).
/// Ties keep the first pair in scan order.
pub fn lip_const(space: &FiniteMetricSpace, points: &[usize], values: &[f64]) -> LipNorm {
    let mut best = 0.0f64;
    let mut witness = None;
    for a in 0..points.len() {
        for b in (a + 1)..points.len() {
            let diff = (values[a] - values[b]).abs();
            if diff == 0.0 {
                continue;
            }
            let ratio = diff / space.d(points[a], points[b]);
            if ratio > best {
                best = ratio;
                witness = Some((points[a], points[b]));
            }
        }
    }
    LipNorm { value: best, witness }
}

pub fn lip_norm(f: &LipFunction) -> LipNorm {
    lip_const(&f.space, f.domain.indices(), &f.values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum McShaneMode {
    Inf,
    Sup,
    Midpoint,
}

/// McShane value at `x` for data `(points, values)` with constant `l`.
/// Points of the domain return their own value untouched.
pub fn mcshane_value(
    space: &FiniteMetricSpace,
    points: &[usize],
    values: &[f64],
    l: f64,
    x: usize,
    mode: McShaneMode,
) -> f64 {
    if let Some(k) = points.iter().position(|&p| p == x) {
        return values[k];
    }
    let upper = || {
        points
            .iter()
            .zip(values)
            .map(|(&s, &v)| v + l * space.d(x, s))
            .fold(f64::INFINITY, f64::min)
    };
    let lower = || {
        points
            .iter()
            .zip(values)
            .map(|(&s, &v)| v - l * space.d(x, s))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    match mode {
        McShaneMode::Inf => upper(),
        McShaneMode::Sup => lower(),
        McShaneMode::Midpoint => 0.5 * (upper() + lower()),
    }
}

/// Extends `f` to `targets` with the same Lipschitz constant.
pub fn mcshane_extend(f: &LipFunction, targets: &[usize], mode: McShaneMode) -> Result<LipFunction> {
    let domain = Subset::of(&f.space, targets.to_vec())?;
    let l = lip_norm(f).value;
    let values = domain
        .iter()
        .map(|x| mcshane_value(&f.space, f.domain.indices(), &f.values, l, x, mode))
        .collect();
    LipFunction::new(f.space.clone(), domain, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductRuleCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Compares `Lip(fg)` with `Lip(f) sup_{supp f} |g| + Lip(g) sup_{supp g} |f|`.
pub fn product_rule_check(f: &LipFunction, g: &LipFunction) -> Result<ProductRuleCheck> {
    f.check_same_domain(g)?;
    let prod: Vec<f64> = f.values.iter().zip(&g.values).map(|(a, b)| a * b).collect();
    let lhs = lip_const(&f.space, f.domain.indices(), &prod).value;
    let sup_on_support = |support: &[f64], other: &[f64]| {
        support
            .iter()
            .zip(other)
            .filter(|(s, _)| **s != 0.0)
            .map(|(_, o)| o.abs())
            .fold(0.0, f64::max)
    };
    let rhs = lip_norm(f).value * sup_on_support(&f.values, &g.values)
        + lip_norm(g).value * sup_on_support(&g.values, &f.values);
    Ok(ProductRuleCheck { lhs, rhs, holds: leq_tol(lhs, rhs) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::L1PointSet;

    fn line(points: &[f64]) -> Arc<FiniteMetricSpace> {
        let coords = points.iter().map(|&p| vec![p]).collect();
        Arc::new(L1PointSet::new(1, coords, 0).unwrap().to_space().unwrap())
    }

    #[test]
    fn lip_norm_examples() {
        let s = line(&[0.0, 1.0, 2.0]);
        let c = LipFunction::on_space(s.clone(), vec![4.0; 3]).unwrap();
        assert_eq!(lip_norm(&c), LipNorm { value: 0.0, witness: None });
        let f = LipFunction::on_space(s.clone(), vec![0.0, 2.0, 3.0]).unwrap();
        assert_eq!(lip_norm(&f), LipNorm { value: 2.0, witness: Some((0, 1)) });
        let dist = LipFunction::on_space(s.clone(), (0..3).map(|x| s.d(x, 2)).collect()).unwrap();
        assert_eq!(lip_norm(&dist).value, 1.0);
    }

    #[test]
    fn mcshane_examples() {
        let s = line(&[0.0, 2.0, 3.0, 10.0]);
        let f = LipFunction::new(s.clone(), Subset::new(4, vec![0, 1]).unwrap(), vec![0.0, 2.0]).unwrap();
        let ext = mcshane_extend(&f, &[0, 1, 2, 3], McShaneMode::Inf).unwrap();
        assert_eq!(ext.value_at(2), Some(3.0));
        for mode in [McShaneMode::Inf, McShaneMode::Sup, McShaneMode::Midpoint] {
            let e = mcshane_extend(&f, &[0, 1, 2, 3], mode).unwrap();
            assert_eq!(e.value_at(0), Some(0.0));
            assert_eq!(e.value_at(1), Some(2.0));
            assert_eq!(lip_norm(&e).value, 1.0);
        }
        let zero = LipFunction::new(s.clone(), Subset::new(4, vec![1]).unwrap(), vec![0.0]).unwrap();
        let e = mcshane_extend(&zero, &[0, 2, 3], McShaneMode::Midpoint).unwrap();
        assert!(e.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn product_rule_examples() {
        let s = line(&[0.0, 1.0, 3.0]);
        let f = LipFunction::on_space(s.clone(), vec![0.0, 1.0, -2.0]).unwrap();
        let one = LipFunction::on_space(s.clone(), vec![1.0; 3]).unwrap();
        let r = product_rule_check(&f, &one).unwrap();
        assert_eq!(r.lhs, lip_norm(&f).value);
        assert!(r.holds && r.rhs >= r.lhs);
        let zero = LipFunction::on_space(s.clone(), vec![0.0; 3]).unwrap();
        let r = product_rule_check(&zero, &f).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        let other = LipFunction::new(s, Subset::new(3, vec![0, 1]).unwrap(), vec![0.0, 1.0]).unwrap();
        assert_eq!(product_rule_check(&f, &other), Err(Error::DomainMismatch));
    }

    #[test]
    fn pinning() {
        let s = line(&[0.0, 1.0]);
        let f = LipFunction::on_space(s, vec![3.0, 5.0]).unwrap().pinned();
        assert_eq!(f.values(), &[0.0, 2.0]);
    }
}
