//! Type vectors, type states, symmetric-subspace operators and ρ_uni.

pub mod family;
pub mod perm;
pub mod rho_uni;
pub mod sym_basis;
pub mod types;

pub use family::{
    is_distinct_family, is_unique_family, sample_type_family, sample_uniform_type,
    sample_unique_type, FamilyKind, TypeFamilyTag,
};
pub use perm::{permutation_operator, sym_projector, sym_state, type_state_vec, PermElement};
pub use rho_uni::{
    family_projector, family_state, rho_uni, rho_uni_matrix, uni_family_count, RhoUniMode,
};
pub use sym_basis::SymBasis;
pub use types::{
    binomial, factorial, falling_factorial, index_tuple, tuple_index, type_of, TypeEntry,
    TypeFamilyRecord, TypeVector,
};

use crate::error::Result;
use crate::qcore::PureState;

/// Type state as a [`PureState`]; the alphabet must be a power of two.
pub fn type_state(ty: &TypeVector) -> Result<PureState> {
    PureState::new(type_state_vec(ty)?)
}
