//! Linear extension operators and their certification.

mod basic;
mod certify;
mod cone;
mod glue;
mod grid;
mod net_ball;
mod operator;

pub use basic::{mcshane_operator, nearest_point_retraction, retraction_operator};
pub use certify::{certify_norm, random_function, CertifyOptions, CertifyReport, Corpus};
pub use cone::{cone_member, cone_partition_extend, cone_partition_operator, cone_retract, ConeOperator};
pub use glue::{glue_family, glue_finite_union, glue_pair, glue_pair_with_point, GlueFamilyInput};
pub use grid::{
    grid_extension_operator, grid_points, hypercube_interpolate, interpolation_stencil, GridBox, GridFunction, GridOperator,
};
pub use net_ball::{lattice_net_constants, net_ball_operator, net_ball_retract, NetBall, NetConstants};
pub use operator::{ExtensionMatrix, ExtensionOperator, OperatorDescriptor, OperatorKind, Rule};
