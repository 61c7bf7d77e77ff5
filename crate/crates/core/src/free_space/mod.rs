//! Lipschitz-free space computations on finite spaces.

mod econst;
mod molecule;
mod opnorm;
mod vertices;

pub use econst::{extension_constant_lp, EconstOptions, EconstResult, DEFAULT_ECONST_MAX_POINTS};
pub use molecule::{kr_dual_on, kr_norm, kr_norm_dual, kr_primal_on, Molecule};
pub use opnorm::{
    operator_norm_from_extension, operator_norm_from_matrix, OperatorNorm, ProjectionMatrix, VERTEX_ROUTE_CAP,
};
pub use vertices::{lip_ball_vertex_values, lip_ball_vertices, MAX_VERTEX_SET};
