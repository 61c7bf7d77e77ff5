use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lipfn::LipFunction;
use crate::metric::{FiniteMetricSpace, Subset};

/// Maps values on the source (in source index order) to values on every ambient point.
pub type Rule = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Mcshane,
    GluePair,
    GlueFamily,
    Hypercube,
    ConePartition,
    NetBall,
    /// `f -> f o r` for a retraction `r`.
    Composed,
}

impl OperatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OperatorKind::Mcshane => "mcshane",
            OperatorKind::GluePair => "glue_pair",
            OperatorKind::GlueFamily => "glue_family",
            OperatorKind::Hypercube => "hypercube",
            OperatorKind::ConePartition => "cone_partition",
            OperatorKind::NetBall => "net_ball",
            OperatorKind::Composed => "composed",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Serializable summary of an operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorDescriptor {
    pub kind: OperatorKind,
    pub params: serde_json::Value,
    pub claimed_bound: f64,
}

/// A linear extension operator from functions on `source` to functions on the ambient space.
///
/// Functions are normalized at the `pin` point. When the pin lies in the
/// source the operator reproduces constants; otherwise the value at the pin is
/// taken to be zero and the operator must return zero there. Norms are always
/// measured on `source` together with the pin.
#[derive(Clone)]
pub struct ExtensionOperator {
    ambient: Arc<FiniteMetricSpace>,
    source: Subset,
    pin: usize,
    kind: OperatorKind,
    params: serde_json::Value,
    claimed_bound: f64,
    rule: Rule,
}

impl fmt::Debug for ExtensionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtensionOperator")
            .field("kind", &self.kind)
            .field("source", &self.source)
            .field("pin", &self.pin)
            .field("ambient_len", &self.ambient.len())
            .field("claimed_bound", &self.claimed_bound)
            .finish()
    }
}

impl ExtensionOperator {
    pub fn new(
        ambient: Arc<FiniteMetricSpace>,
        source: Subset,
        pin: usize,
        kind: OperatorKind,
        params: serde_json::Value,
        claimed_bound: f64,
        rule: Rule,
    ) -> Result<Self> {
        if source.is_empty() {
            return Err(Error::EmptySet { set: 0 });
        }
        if let Some(&last) = source.indices().last() {
            ambient.check_index(last)?;
        }
        ambient.check_index(pin)?;
        if !(claimed_bound.is_finite() && claimed_bound >= 1.0) {
            return Err(Error::InvalidParameter(format!("claimed bound {claimed_bound} must be finite and >= 1")));
        }
        Ok(ExtensionOperator { ambient, source, pin, kind, params, claimed_bound, rule })
    }

    pub fn ambient(&self) -> &Arc<FiniteMetricSpace> {
        &self.ambient
    }

    pub fn source(&self) -> &Subset {
        &self.source
    }

    pub fn pin(&self) -> usize {
        self.pin
    }

    pub fn pin_in_source(&self) -> bool {
        self.source.contains(self.pin)
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn params(&self) -> &serde_json::Value {
        &self.params
    }

    pub fn claimed_bound(&self) -> f64 {
        self.claimed_bound
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn descriptor(&self) -> OperatorDescriptor {
        OperatorDescriptor { kind: self.kind, params: self.params.clone(), claimed_bound: self.claimed_bound }
    }

    /// `source` plus the pin, sorted.
    pub fn normalized_domain(&self) -> Subset {
        self.source.union(&Subset::singleton(self.pin))
    }

    /// Values of `Ef` at every ambient point, from values on the source.
    pub fn apply_values(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.source.len() {
            return Err(Error::DomainMismatch);
        }
        Ok((self.rule)(values))
    }

    /// Extends `f` (defined exactly on the source) to the whole ambient space.
    pub fn apply(&self, f: &LipFunction) -> Result<LipFunction> {
        if f.domain() != &self.source || **f.space() != *self.ambient {
            return Err(Error::DomainMismatch);
        }
        let out = self.apply_values(f.values())?;
        LipFunction::on_space(self.ambient.clone(), out)
    }

    /// Extends `f` and keeps the values on `query`.
    pub fn apply_on(&self, f: &LipFunction, query: &Subset) -> Result<LipFunction> {
        let full = self.apply(f)?;
        full.restrict(query)
    }

    /// The matrix of the operator in the indicator basis of the source minus the pin.
    pub fn materialize_matrix(&self) -> Result<ExtensionMatrix> {
        let basis: Vec<usize> = self.source.iter().filter(|&s| s != self.pin).collect();
        let n = self.ambient.len();
        let mut rows = vec![vec![0.0; basis.len()]; n];
        let mut e = vec![0.0; self.source.len()];
        for (k, &s) in basis.iter().enumerate() {
            let pos = self.source.position(s).expect("basis point in source");
            e[pos] = 1.0;
            let col = self.apply_values(&e)?;
            e[pos] = 0.0;
            if col.len() != n {
                return Err(Error::NotMaterializable(format!(
                    "rule returned {} values for {} ambient points",
                    col.len(),
                    n
                )));
            }
            if col[self.pin] != 0.0 {
                return Err(Error::NotMaterializable(format!(
                    "extension of the indicator of point {s} is {} at the pin",
                    col[self.pin]
                )));
            }
            for (x, v) in col.into_iter().enumerate() {
                rows[x][k] = v;
            }
        }
        Ok(ExtensionMatrix { pin: self.pin, basis, rows })
    }
}

/// `rows[x][k] = (E e_k)(x)` where `e_k` is the indicator of `basis[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionMatrix {
    pub pin: usize,
    pub basis: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
}

impl ExtensionMatrix {
    /// Applies the matrix to values given on the basis points.
    pub fn apply(&self, basis_values: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(basis_values).map(|(a, b)| a * b).sum())
            .collect()
    }
}
