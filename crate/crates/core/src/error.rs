use thiserror::Error;

use crate::lp::LpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which hypothesis of the well-separated union construction failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// Each set must carry an extender with constant at most `C`.
    UniformExtendability,
    /// `diam(S_i) <= D * d(S_i, x0)`.
    BoundedDiameter,
    /// `d(x, x0) + d(y, x0) <= lambda * d(x, y)` across sets.
    WellSeparated,
}

impl std::fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Hypothesis::UniformExtendability => "uniform extendability",
            Hypothesis::BoundedDiameter => "bounded diameter",
            Hypothesis::WellSeparated => "well-separation",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("distance matrix is empty")]
    EmptySpace,
    #[error("non-finite distance at ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("nonzero diagonal entry d({i},{i}) = {value}")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("negative distance d({i},{j}) = {value}")]
    NegativeDistance { i: usize, j: usize, value: f64 },
    #[error("asymmetric distances: d({i},{j}) = {dij} but d({j},{i}) = {dji}")]
    Asymmetry { i: usize, j: usize, dij: f64, dji: f64 },
    #[error("distinct points {i} and {j} are at distance zero")]
    ZeroOffDiagonal { i: usize, j: usize },
    #[error("triangle inequality fails: d({i},{k}) = {direct} > d({i},{j}) + d({j},{k}) = {detour}")]
    TriangleViolation { i: usize, j: usize, k: usize, direct: f64, detour: f64 },
    #[error("{what} has size {size}, above the cap of {cap}")]
    TooLarge { what: &'static str, size: usize, cap: usize },
    #[error("index {index} out of range for a space of {len} points")]
    InvalidIndex { index: usize, len: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("set {set} of the family is empty")]
    EmptySet { set: usize },
    #[error("the family is empty")]
    EmptyFamily,
    #[error("anchor point {anchor} belongs to set {set}")]
    AnchorInSet { set: usize, anchor: usize },
    #[error("sets {first} and {second} share point {point}")]
    OverlappingSets { first: usize, second: usize, point: usize },
    #[error("sets {first} and {second} are at distance zero")]
    ZeroCrossDistance { first: usize, second: usize },
    #[error("function has an empty domain")]
    EmptyDomain,
    #[error("functions are defined on different domains")]
    DomainMismatch,
    #[error("sets are at distance {distance}, closer than the gluing radius {radius}")]
    SetsTooClose { distance: f64, radius: f64 },
    #[error("hypothesis {condition} violated: {detail}")]
    HypothesisViolation { condition: Hypothesis, detail: String },
    #[error("point {point} lies in the neighbourhoods of sets {first} and {second}")]
    DisjointUiViolation { point: usize, first: usize, second: usize },
    #[error("pin point {pin} must lie in the operator's source set")]
    PinOutsideSource { pin: usize },
    #[error("operators live on different ambient spaces")]
    AmbientMismatch,
    #[error("grid vertex {vertex:?} carries no value")]
    MissingVertex { vertex: Vec<i64> },
    #[error("query {query:?} lies outside the grid box")]
    QueryOutsideBox { query: Vec<f64> },
    #[error("retracted point {point:?} is not in the function's domain")]
    RetractedPointOutsideDomain { point: Vec<f64> },
    #[error("the ball contains no net point")]
    EmptyIntersection,
    #[error("operator cannot be materialized: {0}")]
    NotMaterializable(String),
    #[error("operator norm routes disagree: projection side {projection}, function side {functions}")]
    NormRouteMismatch { projection: f64, functions: f64 },
    #[error("molecule has total mass {mass}, expected zero")]
    NonzeroMass { mass: f64 },
    #[error("the base point {base} is not in S")]
    BasePointNotInS { base: usize },
    #[error("space has no coordinates; this operation needs an l1 point set")]
    RequiresCoordinates,
    #[error("no grid point in the dyadic band [{lower}, {upper}]")]
    NoAdmissiblePoint { lower: f64, upper: f64 },
    #[error("set {set} is unbounded or has non-finite coordinates")]
    UnboundedSet { set: usize },
    #[error("grid window of half-width {window} cannot hold the requested balls (needs {needed})")]
    WindowTooSmall { window: i64, needed: i64 },
    #[error("mesh 2^-{mesh_exponent} is coarser than the required 2^-{required}")]
    MeshTooCoarse { mesh_exponent: u32, required: u32 },
    #[error("flow problem is infeasible (residual artificial flow {residual})")]
    FlowInfeasible { residual: f64 },
    #[error("flow problem is unbounded")]
    FlowUnbounded,
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("parse error: {0}")]
    Parse(String),
}
