use std::sync::Arc;

use serde_json::json;

use crate::error::{Error, Result};
use crate::extension::operator::{ExtensionOperator, OperatorKind};
use crate::metric::{FiniteMetricSpace, Subset};

/// Linear McShane operator: `Ef = f(p) + sum_{s != p} (f(s) - f(p)) phi_s` where
/// `phi_s` is the midpoint McShane extension of the indicator of `s` on the source.
///
/// `pin` defaults to the ambient base point when it lies in the source, else to
/// the first source point.
pub fn mcshane_operator(
    ambient: Arc<FiniteMetricSpace>,
    source: Subset,
    pin: Option<usize>,
) -> Result<ExtensionOperator> {
    if source.is_empty() {
        return Err(Error::EmptySet { set: 0 });
    }
    let pin = pin.unwrap_or_else(|| {
        if source.contains(ambient.base_point()) {
            ambient.base_point()
        } else {
            source.indices()[0]
        }
    });
    if !source.contains(pin) {
        return Err(Error::PinOutsideSource { pin });
    }
    let src: Vec<usize> = source.iter().collect();
    let pin_pos = source.position(pin).expect("pin in source");
    let n = ambient.len();
    let m = src.len();

    // phi[x * m + k]: extension of the indicator of src[k], evaluated at x.
    let mut phi = vec![0.0; n * m];
    let mut bound_sum = 0.0;
    for (k, &s) in src.iter().enumerate() {
        if k == pin_pos {
            continue;
        }
        let sep = src
            .iter()
            .filter(|&&t| t != s)
            .map(|&t| ambient.d(s, t))
            .fold(f64::INFINITY, f64::min);
        let l = 1.0 / sep;
        bound_sum += ambient.d(s, pin) * l;
        for x in 0..n {
            let mut upper = 1.0 + l * ambient.d(x, s);
            let mut lower = 1.0 - l * ambient.d(x, s);
            for &t in &src {
                if t != s {
                    upper = upper.min(l * ambient.d(x, t));
                    lower = lower.max(-l * ambient.d(x, t));
                }
            }
            phi[x * m + k] = 0.5 * (upper + lower);
        }
    }
    let claimed = if m <= 2 { 1.0 } else { bound_sum.max(1.0) };

    let pos_of: Vec<Option<usize>> = (0..n).map(|x| source.position(x)).collect();
    let rule = Arc::new(move |vals: &[f64]| -> Vec<f64> {
        let base = vals[pin_pos];
        (0..n)
            .map(|x| match pos_of[x] {
                Some(k) => vals[k],
                None => {
                    let row = &phi[x * m..(x + 1) * m];
                    let mut acc = base;
                    for k in 0..m {
                        if k != pin_pos {
                            acc += (vals[k] - base) * row[k];
                        }
                    }
                    acc
                }
            })
            .collect()
    });
    ExtensionOperator::new(
        ambient,
        source,
        pin,
        OperatorKind::Mcshane,
        json!({ "pin": pin, "mode": "midpoint" }),
        claimed,
        rule,
    )
}

/// Nearest source point for every ambient point, ties to the lowest index.
pub fn nearest_point_retraction(ambient: &FiniteMetricSpace, source: &Subset) -> Result<Vec<usize>> {
    if source.is_empty() {
        return Err(Error::EmptySet { set: 0 });
    }
    Ok((0..ambient.len())
        .map(|x| {
            let mut best = source.indices()[0];
            for s in source.iter() {
                if ambient.d(x, s) < ambient.d(x, best) {
                    best = s;
                }
            }
            best
        })
        .collect())
}

/// `Ef = f o r` for a retraction `r` of the ambient space onto `source`.
/// The claimed bound is the exact Lipschitz constant of `r` (at least 1).
pub fn retraction_operator(
    ambient: Arc<FiniteMetricSpace>,
    source: Subset,
    retraction: Vec<usize>,
    kind: OperatorKind,
    mut params: serde_json::Value,
) -> Result<ExtensionOperator> {
    let n = ambient.len();
    if retraction.len() != n {
        return Err(Error::InvalidParameter(format!(
            "retraction has {} entries for {} points",
            retraction.len(),
            n
        )));
    }
    for (x, &r) in retraction.iter().enumerate() {
        if !source.contains(r) {
            return Err(Error::InvalidParameter(format!("point {x} retracts to {r}, outside the source")));
        }
        if source.contains(x) && r != x {
            return Err(Error::InvalidParameter(format!("source point {x} is moved to {r}")));
        }
    }
    let mut lip = 0.0f64;
    for x in 0..n {
        for y in (x + 1)..n {
            lip = lip.max(ambient.d(retraction[x], retraction[y]) / ambient.d(x, y));
        }
    }
    let pin = if source.contains(ambient.base_point()) {
        ambient.base_point()
    } else {
        source.indices()[0]
    };
    if let serde_json::Value::Object(map) = &mut params {
        map.insert("retraction_lipschitz".into(), json!(lip));
    }
    let pos: Vec<usize> = retraction
        .iter()
        .map(|&r| source.position(r).expect("retraction lands in source"))
        .collect();
    let rule = Arc::new(move |vals: &[f64]| -> Vec<f64> { pos.iter().map(|&k| vals[k]).collect() });
    ExtensionOperator::new(ambient, source, pin, kind, params, lip.max(1.0), rule)
}
