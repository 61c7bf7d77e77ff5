use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::extension::grid::{grid_points, GridBox};
use crate::extension::operator::{ExtensionOperator, OperatorKind};
use crate::metric::{l1_dist, leq_tol, L1PointSet, Subset};

/// Net points of `l1^n` together with a closed ball `B(center, radius)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetBall {
    pub points: Vec<Vec<f64>>,
    pub center: Vec<f64>,
    pub radius: f64,
    inside: Vec<usize>,
}

impl NetBall {
    pub fn new(points: Vec<Vec<f64>>, center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("ball radius {radius} must be positive")));
        }
        if points.iter().any(|p| p.len() != center.len()) {
            return Err(Error::InvalidParameter("net points and center differ in dimension".into()));
        }
        let inside: Vec<usize> = (0..points.len())
            .filter(|&i| leq_tol(l1_dist(&points[i], &center), radius))
            .collect();
        if inside.is_empty() {
            return Err(Error::EmptyIntersection);
        }
        Ok(NetBall { points, center, radius, inside })
    }

    /// Indices of net points in the ball.
    pub fn inside(&self) -> &[usize] {
        &self.inside
    }

    /// Radial projection `c + (x - c) min(1, R / ||x - c||)`.
    pub fn radial_projection(&self, x: &[f64]) -> Vec<f64> {
        let d = l1_dist(x, &self.center);
        if d <= self.radius {
            return x.to_vec();
        }
        let s = self.radius / d;
        x.iter().zip(&self.center).map(|(a, c)| c + (a - c) * s).collect()
    }

    /// Nearest net point in the ball to `y`, lowest index on ties.
    pub fn nearest_inside(&self, y: &[f64]) -> usize {
        let mut best = self.inside[0];
        let mut best_d = l1_dist(&self.points[best], y);
        for &i in &self.inside[1..] {
            let d = l1_dist(&self.points[i], y);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    /// `pi(r(x_i))` for the net point with index `i`.
    pub fn retract(&self, i: usize) -> usize {
        if self.inside.binary_search(&i).is_ok() {
            return i;
        }
        self.nearest_inside(&self.radial_projection(&self.points[i]))
    }

    /// Largest `||phi(x) - phi(y)|| / ||x - y||` over all pairs of net points.
    pub fn max_ratio(&self) -> (f64, Option<(usize, usize)>) {
        let image: Vec<usize> = (0..self.points.len()).map(|i| self.retract(i)).collect();
        let mut best = 0.0f64;
        let mut witness = None;
        for x in 0..self.points.len() {
            for y in (x + 1)..self.points.len() {
                let num = l1_dist(&self.points[image[x]], &self.points[image[y]]);
                let r = num / l1_dist(&self.points[x], &self.points[y]);
                if r > best {
                    best = r;
                    witness = Some((x, y));
                }
            }
        }
        (best, witness)
    }
}

/// `pi(r(x))` for a net point `x`.
pub fn net_ball_retract(net: &[Vec<f64>], center: &[f64], radius: f64, x: usize) -> Result<usize> {
    if x >= net.len() {
        return Err(Error::InvalidIndex { index: x, len: net.len() });
    }
    Ok(NetBall::new(net.to_vec(), center.to_vec(), radius)?.retract(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetConstants {
    pub eps: f64,
    pub delta: f64,
}

impl NetConstants {
    /// `2 + 4 eps / delta`.
    pub fn retraction_bound(&self) -> f64 {
        2.0 + 4.0 * self.eps / self.delta
    }
}

/// Density and separation of `Z^n` in `l1^n`, measured on the window `[-w, w]^n`:
/// `eps` is the largest distance from a half-integer point of the window to the
/// lattice points of the window and `delta` the least distance between lattice points.
pub fn lattice_net_constants(dim: usize, half_width: i64) -> Result<NetConstants> {
    if dim == 0 || half_width < 1 {
        return Err(Error::InvalidParameter("dimension and window half-width must be positive".into()));
    }
    let lattice: Vec<Vec<f64>> = grid_points(&GridBox::cube(dim, -half_width, half_width)?)
        .into_iter()
        .map(|p| p.into_iter().map(|v| v as f64).collect())
        .collect();
    let fine = grid_points(&GridBox::cube(dim, -2 * half_width, 2 * half_width)?);
    let mut eps = 0.0f64;
    for p in fine {
        let q: Vec<f64> = p.iter().map(|&v| v as f64 / 2.0).collect();
        let d = lattice.iter().map(|l| l1_dist(l, &q)).fold(f64::INFINITY, f64::min);
        eps = eps.max(d);
    }
    let mut delta = f64::INFINITY;
    for (i, a) in lattice.iter().enumerate() {
        for b in &lattice[i + 1..] {
            delta = delta.min(l1_dist(a, b));
        }
    }
    Ok(NetConstants { eps, delta })
}

/// `Ef = f o phi` for the net-ball retraction `phi`, claimed at `2 + 4 eps / delta`.
/// The ambient space is the given net window; the source is its intersection with the ball.
pub fn net_ball_operator(ball: &NetBall, constants: NetConstants) -> Result<ExtensionOperator> {
    let dim = ball.center.len();
    let base = ball.inside[0];
    let ambient = Arc::new(L1PointSet::new(dim, ball.points.clone(), base)?.to_space()?);
    let source = Subset::new(ambient.len(), ball.inside.clone())?;
    let image: Vec<usize> = (0..ball.points.len())
        .map(|i| source.position(ball.retract(i)).expect("retraction lands in the ball"))
        .collect();
    let (lip, _) = ball.max_ratio();
    let rule = Arc::new(move |vals: &[f64]| -> Vec<f64> { image.iter().map(|&k| vals[k]).collect() });
    ExtensionOperator::new(
        ambient,
        source,
        base,
        OperatorKind::NetBall,
        json!({
            "center": ball.center,
            "radius": ball.radius,
            "eps": constants.eps,
            "delta": constants.delta,
            "retraction_lipschitz": lip,
        }),
        constants.retraction_bound(),
        rule,
    )
}
