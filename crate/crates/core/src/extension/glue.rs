use std::sync::Arc;

use serde_json::json;

use crate::error::{Error, Hypothesis, Result};
use crate::extension::operator::{ExtensionOperator, OperatorKind};
use crate::metric::{leq_tol, separation_constants, SeparationReport, Subset, TOL};

/// Glues `E1` on `S1` and `E2` on `S2` along `h(x) = max(0, 1 - d(x, S2) / r)`:
/// `Ef = F1 + h (F2 - F1)` with `Fi = Ei(f|Si)`.
///
/// The result is pinned where `E1` is. `E2` must reproduce constants (its pin
/// lies in `S2`) and the pin of `E1` must be at least `r` away from `S2`.
pub fn glue_pair(e1: &ExtensionOperator, e2: &ExtensionOperator, r: f64) -> Result<ExtensionOperator> {
    glue_pair_with_point(e1, e2, r, None)
}

/// As [`glue_pair`], choosing the reference point `q` of `S2` used in the bound.
pub fn glue_pair_with_point(
    e1: &ExtensionOperator,
    e2: &ExtensionOperator,
    r: f64,
    q: Option<usize>,
) -> Result<ExtensionOperator> {
    let m = e1.ambient().clone();
    if *m != **e2.ambient() {
        return Err(Error::AmbientMismatch);
    }
    let s1 = e1.source().clone();
    let s2 = e2.source().clone();
    if let Some(point) = s1.iter().find(|&x| s2.contains(x)) {
        return Err(Error::OverlappingSets { first: 0, second: 1, point });
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("gluing radius {r} must be positive")));
    }
    let dist12 = m.set_distance(s1.indices(), s2.indices());
    if dist12 < r {
        return Err(Error::SetsTooClose { distance: dist12, radius: r });
    }
    if !e2.pin_in_source() {
        return Err(Error::PinOutsideSource { pin: e2.pin() });
    }
    let pin = e1.pin();
    let pin_to_s2 = m.dist_to_set(pin, s2.indices());
    if pin_to_s2 < r {
        return Err(Error::SetsTooClose { distance: pin_to_s2, radius: r });
    }
    let q = q.unwrap_or(s2.indices()[0]);
    if !s2.contains(q) {
        return Err(Error::InvalidParameter(format!("reference point {q} is not in the second set")));
    }

    let n = m.len();
    let h: Vec<f64> = (0..n).map(|x| (1.0 - m.dist_to_set(x, s2.indices()) / r).max(0.0)).collect();
    let support: Vec<usize> = (0..n).filter(|&x| h[x] > 0.0).collect();
    let r_pin = support.iter().map(|&x| m.d(x, pin)).fold(0.0, f64::max);
    let r_q = support.iter().map(|&x| m.d(x, q)).fold(0.0, f64::max);
    let (c1, c2) = (e1.claimed_bound(), e2.claimed_bound());
    let claimed = 2.0 * c1 + c2 + (c1 * r_pin + c2 * r_q + m.d(q, pin)) / r;

    let diam2 = m.set_diameter(s2.indices());
    let d20 = m.dist_to_set(pin, s2.indices());
    let a_priori = 2.0 * c1
        + c2
        + (c1 * (d20 + diam2 + r) + c2 * (diam2 + r) + d20 + diam2) / r;

    let union = s1.union(&s2);
    let pos1: Vec<usize> = union.iter().filter_map(|x| s1.position(x).map(|_| union.position(x).unwrap())).collect();
    let pos2: Vec<usize> = union.iter().filter_map(|x| s2.position(x).map(|_| union.position(x).unwrap())).collect();
    let (rule1, rule2) = (e1.rule().clone(), e2.rule().clone());
    let rule = Arc::new(move |vals: &[f64]| -> Vec<f64> {
        let f1: Vec<f64> = pos1.iter().map(|&k| vals[k]).collect();
        let f2: Vec<f64> = pos2.iter().map(|&k| vals[k]).collect();
        let big1 = rule1(&f1);
        let big2 = rule2(&f2);
        (0..n)
            .map(|x| {
                if h[x] == 0.0 {
                    big1[x]
                } else if h[x] == 1.0 {
                    big2[x]
                } else {
                    big1[x] + h[x] * (big2[x] - big1[x])
                }
            })
            .collect()
    });
    let params = json!({
        "radius": r,
        "set_distance": dist12,
        "c1": c1,
        "c2": c2,
        "reference_point": q,
        "support_radius_pin": r_pin,
        "support_radius_reference": r_q,
        "a_priori_bound": a_priori,
        "first": e1.descriptor(),
        "second": e2.descriptor(),
    });
    ExtensionOperator::new(m, union, pin, OperatorKind::GluePair, params, claimed, rule)
}

/// Iterated [`glue_pair`]: each new set is glued at its distance to the union so far.
pub fn glue_finite_union(extenders: &[ExtensionOperator]) -> Result<ExtensionOperator> {
    let (first, rest) = extenders.split_first().ok_or(Error::EmptyFamily)?;
    let mut acc = first.clone();
    for e in rest {
        let r = acc.ambient().set_distance(acc.source().indices(), e.source().indices());
        if r == 0.0 {
            return Err(Error::SetsTooClose { distance: 0.0, radius: 0.0 });
        }
        acc = glue_pair(&acc, e, r)?;
    }
    Ok(acc)
}

/// Inputs of the well-separated union construction.
#[derive(Debug, Clone)]
pub struct GlueFamilyInput {
    pub family: Vec<Subset>,
    pub extenders: Vec<ExtensionOperator>,
    pub anchor: usize,
    /// Uniform bound on the extenders' constants.
    pub c: f64,
    pub report: SeparationReport,
    /// Reference points `p_i` used only in the reported estimate; defaults to the first point of each set.
    pub anchor_points: Option<Vec<usize>>,
}

/// `Ef = Pi_i . E_i(f|S_i)` on `U_i = {d(x, S_i) <= r_i}`, zero elsewhere, with
/// `r_i = d(S_i, x0) / 2 lambda` and `Pi_i = max(0, 1 - d(x, S_i) / r_i)`.
///
/// The claimed bound is `K = K' + 2 lambda ((K' + 1) D + 1)` with
/// `K' = 2C + 2 lambda (1 + D + CD)`.
pub fn glue_family(input: GlueFamilyInput) -> Result<ExtensionOperator> {
    let GlueFamilyInput { family, extenders, anchor, c, report, anchor_points } = input;
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if extenders.len() != family.len() {
        return Err(Error::InvalidParameter(format!(
            "{} extenders for {} sets",
            extenders.len(),
            family.len()
        )));
    }
    let m = extenders[0].ambient().clone();
    m.check_index(anchor)?;
    for (i, e) in extenders.iter().enumerate() {
        if **e.ambient() != *m {
            return Err(Error::AmbientMismatch);
        }
        if e.source() != &family[i] {
            return Err(Error::InvalidParameter(format!("extender {i} is not defined on set {i}")));
        }
        if !e.pin_in_source() {
            return Err(Error::PinOutsideSource { pin: e.pin() });
        }
        if !leq_tol(e.claimed_bound(), c) {
            return Err(Error::HypothesisViolation {
                condition: Hypothesis::UniformExtendability,
                detail: format!("extender {i} claims {} > C = {c}", e.claimed_bound()),
            });
        }
    }
    let actual = separation_constants(&m, &family, anchor)?;
    if !(report.d_const.is_finite() && report.lambda.is_finite() && report.lambda >= 1.0) {
        return Err(Error::HypothesisViolation {
            condition: Hypothesis::WellSeparated,
            detail: "reported constants must be finite with lambda >= 1".into(),
        });
    }
    if report.anchor != anchor {
        return Err(Error::InvalidParameter(format!(
            "report is for anchor {} but the construction uses {anchor}",
            report.anchor
        )));
    }
    if !leq_tol(actual.d_const, report.d_const) {
        return Err(Error::HypothesisViolation {
            condition: Hypothesis::BoundedDiameter,
            detail: format!("computed D = {} exceeds reported {}", actual.d_const, report.d_const),
        });
    }
    if !leq_tol(actual.lambda, report.lambda) {
        let (x, y) = actual.lambda_witness.unwrap_or((anchor, anchor));
        return Err(Error::HypothesisViolation {
            condition: Hypothesis::WellSeparated,
            detail: format!(
                "pair ({x}, {y}) needs lambda = {} above reported {}",
                actual.lambda, report.lambda
            ),
        });
    }
    let anchor_points = match anchor_points {
        Some(p) => {
            if p.len() != family.len() || p.iter().zip(&family).any(|(&pi, s)| !s.contains(pi)) {
                return Err(Error::InvalidParameter("each reference point must lie in its own set".into()));
            }
            p
        }
        None => family.iter().map(|s| s.indices()[0]).collect(),
    };

    let lambda = report.lambda;
    let d_const = report.d_const;
    let radii: Vec<f64> = family
        .iter()
        .map(|s| m.dist_to_set(anchor, s.indices()) / (2.0 * lambda))
        .collect();
    let n = m.len();
    // owner[x] = (set, Pi value) for x in U_i.
    let mut owner: Vec<Option<(usize, f64)>> = vec![None; n];
    for x in 0..n {
        for (i, s) in family.iter().enumerate() {
            let dx = m.dist_to_set(x, s.indices());
            if dx <= radii[i] + TOL * radii[i].max(1.0) {
                if let Some((j, _)) = owner[x] {
                    return Err(Error::DisjointUiViolation { point: x, first: j, second: i });
                }
                owner[x] = Some((i, (1.0 - dx / radii[i]).max(0.0)));
            }
        }
    }

    let k_prime = 2.0 * c + 2.0 * lambda * (1.0 + d_const + c * d_const);
    let k = k_prime + 2.0 * lambda * ((k_prime + 1.0) * d_const + 1.0);
    let bound_28 = 28.0 * c * d_const.max(1.0).powi(2) * lambda * lambda;

    let union = family.iter().skip(1).fold(family[0].clone(), |acc, s| acc.union(s));
    let positions: Vec<Vec<usize>> = family
        .iter()
        .map(|s| s.iter().map(|x| union.position(x).unwrap()).collect())
        .collect();
    let rules: Vec<_> = extenders.iter().map(|e| e.rule().clone()).collect();
    let sets = family.clone();
    let rule = Arc::new(move |vals: &[f64]| -> Vec<f64> {
        let mut cache: Vec<Option<Vec<f64>>> = vec![None; rules.len()];
        (0..n)
            .map(|x| match owner[x] {
                None => 0.0,
                Some((i, pi)) => {
                    if let Some(k) = sets[i].position(x) {
                        return vals[positions[i][k]];
                    }
                    if pi == 0.0 {
                        return 0.0;
                    }
                    let big = cache[i].get_or_insert_with(|| {
                        let fi: Vec<f64> = positions[i].iter().map(|&k| vals[k]).collect();
                        rules[i](&fi)
                    });
                    pi * big[x]
                }
            })
            .collect()
    });
    let params = json!({
        "anchor": anchor,
        "C": c,
        "D": d_const,
        "lambda": lambda,
        "radii": radii,
        "anchor_points": anchor_points,
        "K_prime": k_prime,
        "K": k,
        "bound_28": bound_28,
        "sets": family.len(),
    });
    ExtensionOperator::new(m, union, anchor, OperatorKind::GlueFamily, params, k, rule)
}
