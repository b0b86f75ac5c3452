//! Deformed canonical pair, ladder operators and the two Swanson Hamiltonians.

mod builders;
mod params;
mod poly;
mod symbol;

pub use builders::{
    build_canonical_pair, build_deformed_pair, build_hamiltonian, build_ladder, build_swanson_bf,
    build_swanson_jr, commutator_check, default_number_operator, deformation_weight,
    deformed_algebra_residual, gauge_residual, gauge_transform, momentum_symbol, position_symbol,
    CommutatorCheck, Ladder, ModelKind, Observable,
};
pub use params::{NumberFn, PhysParams, QDeformParams, CONSTRAINT_TOL};
pub use poly::Poly;
pub use symbol::DiffOp;
