//! JSON file formats.
//!
//! * space: `{"points": [ids], "dist": [[..]], "base_point": i}` or
//!   `{"l1": {"dim": n, "coords": [[..]], "base_point": i}}`
//! * subset: `{"space": ref, "indices": [..]}`
//! * function: `{"domain": subset ref, "values": [..]}`
//! * molecule: `{"space": ref, "weights": {"point id": w}}`
//!
//! A reference is either a path (relative to the referencing file) or the
//! object itself.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::constructions::L1Family;
use crate::error::{Error, Result};
use crate::extension::OperatorKind;
use crate::free_space::Molecule;
use crate::lipfn::LipFunction;
use crate::metric::{validate_metric, FiniteMetricSpace, L1PointSet, SeparationReport, Subset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceFile {
    L1 {
        l1: L1PointSet,
    },
    Matrix {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<String>>,
        dist: Vec<Vec<f64>>,
        #[serde(default)]
        base_point: usize,
    },
}

impl SpaceFile {
    pub fn from_space(space: &FiniteMetricSpace) -> Self {
        SpaceFile::Matrix { points: Some(space.ids().to_vec()), dist: space.matrix(), base_point: space.base_point() }
    }

    pub fn into_space(self) -> Result<FiniteMetricSpace> {
        match self {
            SpaceFile::L1 { l1 } => L1PointSet::new(l1.dim, l1.coords, l1.base_point)?.to_space(),
            SpaceFile::Matrix { points, dist, base_point } => {
                let mut space = validate_metric(&dist)?;
                if let Some(ids) = points {
                    let mut seen = HashSet::new();
                    if let Some(dup) = ids.iter().find(|id| !seen.insert(id.as_str())) {
                        return Err(Error::Parse(format!("duplicate point id {dup:?}")));
                    }
                    space = space.with_ids(ids)?;
                }
                space.with_base_point(base_point)
            }
        }
    }
}

/// Either a path or an inline object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ref<T> {
    Path(String),
    Inline(T),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<Ref<SpaceFile>>,
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionFile {
    pub domain: Ref<SubsetFile>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoleculeFile {
    pub space: Ref<SpaceFile>,
    pub weights: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    pub kind: OperatorKind,
    pub norm: f64,
}

/// Report of the extension-constant LP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpOracleReport {
    #[serde(rename = "S")]
    pub source: Vec<usize>,
    #[serde(rename = "M")]
    pub space: String,
    pub e: f64,
    pub upper_bounds: Vec<UpperBound>,
    pub vertices_used: usize,
}

/// A generated family with its separation constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub l1: L1PointSet,
    pub sets: Vec<Vec<usize>>,
    pub anchor: usize,
    pub report: SeparationReport,
}

impl FamilyFile {
    pub fn new(family: &L1Family, report: &SeparationReport) -> Self {
        FamilyFile {
            l1: family.points.clone(),
            sets: family.sets.iter().map(|s| s.indices().to_vec()).collect(),
            anchor: family.anchor,
            report: report.clone(),
        }
    }
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn resolve(base: Option<&Path>, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    match base.and_then(Path::parent) {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    }
}

pub fn parse_space(text: &str) -> Result<FiniteMetricSpace> {
    parse::<SpaceFile>(text)?.into_space()
}

pub fn read_space(path: &Path) -> Result<FiniteMetricSpace> {
    read_json::<SpaceFile>(path)?.into_space()
}

fn load_space_ref(r: &Ref<SpaceFile>, from: Option<&Path>) -> Result<FiniteMetricSpace> {
    match r {
        Ref::Path(p) => read_space(&resolve(from, p)),
        Ref::Inline(s) => s.clone().into_space(),
    }
}

impl SubsetFile {
    /// Resolves the subset against `space`, or against its own space reference when `space` is `None`.
    pub fn resolve(
        &self,
        space: Option<Arc<FiniteMetricSpace>>,
        from: Option<&Path>,
    ) -> Result<(Arc<FiniteMetricSpace>, Subset)> {
        let space = match (space, &self.space) {
            (Some(s), _) => s,
            (None, Some(r)) => Arc::new(load_space_ref(r, from)?),
            (None, None) => return Err(Error::Parse("subset has no space".into())),
        };
        let subset = Subset::of(&space, self.indices.clone())?;
        Ok((space, subset))
    }
}

/// Reads a subset file; `space` overrides the space it references.
pub fn read_subset(path: &Path, space: Option<Arc<FiniteMetricSpace>>) -> Result<(Arc<FiniteMetricSpace>, Subset)> {
    read_json::<SubsetFile>(path)?.resolve(space, Some(path))
}

fn load_subset_ref(
    r: &Ref<SubsetFile>,
    space: Option<Arc<FiniteMetricSpace>>,
    from: Option<&Path>,
) -> Result<(Arc<FiniteMetricSpace>, Subset, Vec<usize>)> {
    let (file, from) = match r {
        Ref::Path(p) => {
            let path = resolve(from, p);
            (read_json::<SubsetFile>(&path)?, Some(path))
        }
        Ref::Inline(s) => (s.clone(), from.map(Path::to_path_buf)),
    };
    let (space, subset) = file.resolve(space, from.as_deref())?;
    Ok((space, subset, file.indices))
}

impl FunctionFile {
    pub fn load(&self, space: Option<Arc<FiniteMetricSpace>>, from: Option<&Path>) -> Result<LipFunction> {
        let (space, domain, listed) = load_subset_ref(&self.domain, space, from)?;
        if listed.len() != self.values.len() {
            return Err(Error::Parse(format!("{} values for {} domain points", self.values.len(), listed.len())));
        }
        // Values follow the order in which the domain lists its points.
        let mut values = vec![0.0; domain.len()];
        for (&x, &v) in listed.iter().zip(&self.values) {
            values[domain.position(x).expect("listed point in domain")] = v;
        }
        LipFunction::new(space, domain, values)
    }

    pub fn from_function(f: &LipFunction) -> Self {
        FunctionFile {
            domain: Ref::Inline(SubsetFile {
                space: Some(Ref::Inline(SpaceFile::from_space(f.space()))),
                indices: f.domain().indices().to_vec(),
            }),
            values: f.values().to_vec(),
        }
    }
}

pub fn read_function(path: &Path, space: Option<Arc<FiniteMetricSpace>>) -> Result<LipFunction> {
    read_json::<FunctionFile>(path)?.load(space, Some(path))
}

impl MoleculeFile {
    pub fn load(&self, space: Option<Arc<FiniteMetricSpace>>, from: Option<&Path>) -> Result<Molecule> {
        let space = match space {
            Some(s) => s,
            None => Arc::new(load_space_ref(&self.space, from)?),
        };
        let mut weights = BTreeMap::new();
        for (id, &w) in &self.weights {
            let x = space.index_of(id).ok_or_else(|| Error::Parse(format!("unknown point id {id:?}")))?;
            *weights.entry(x).or_insert(0.0) += w;
        }
        Molecule::new(space, weights)
    }

    pub fn from_molecule(mu: &Molecule) -> Self {
        let ids = mu.space().ids();
        MoleculeFile {
            space: Ref::Inline(SpaceFile::from_space(mu.space())),
            weights: mu.weights().iter().map(|(&x, &w)| (ids[x].clone(), w)).collect(),
        }
    }
}

pub fn read_molecule(path: &Path, space: Option<Arc<FiniteMetricSpace>>) -> Result<Molecule> {
    read_json::<MoleculeFile>(path)?.load(space, Some(path))
}
