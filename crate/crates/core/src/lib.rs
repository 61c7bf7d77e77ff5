//! Constructive Lipschitz extension operators on finite metric spaces and
//! finite `l1` point sets, with exact certification of their norms.
//!
//! The crate is organised bottom-up:
//!
//! * [`metric`]: validated finite metric spaces, subsets, nets and the
//!   separation constants of set families.
//! * [`lipfn`]: functions on subsets, exact Lipschitz constants, McShane
//!   extensions and the product rule.
//! * [`extension`]: linear extension operators (McShane, retractions, gluing,
//!   multilinear interpolation, cone retractions, net-ball retractions) and
//!   empirical/exact norm certification.
//! * [`free_space`]: Kantorovich-Rubinstein norms, preadjoint projections,
//!   vertices of the Lipschitz unit ball and the extension-constant LP.
//! * [`constructions`]: generators for separated set families.
//! * [`io`]: JSON file formats.

pub mod constructions;
pub mod error;
pub mod extension;
pub mod flow;
pub mod free_space;
pub mod io;
pub mod lipfn;
pub mod lp;
pub mod metric;

pub use error::{Error, Hypothesis, Result};
pub use extension::{ExtensionOperator, OperatorKind};
pub use free_space::Molecule;
pub use lipfn::{lip_norm, LipFunction, LipNorm, McShaneMode};
pub use metric::{
    separation_constants, validate_metric, FiniteMetricSpace, L1PointSet, SeparationReport, Subset, TOL,
};
