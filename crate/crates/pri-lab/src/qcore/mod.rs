//! Dense complex states, operators and the distance measures built on them.

pub mod dims;
pub mod layout;
pub mod linalg;
pub mod ops;
pub mod qmat;
pub mod state;

pub use dims::{check_cap, default_modulus, qubit_cap, QDims, StorageKind};
pub use layout::{RegisterLayout, Segment, SegmentKind};
pub use linalg::{CMatrix, CVector, C64};
pub use ops::{
    operator_norm, partial_trace, permutation_test_prob, swap_test_prob, tensor, tensor_pure,
    trace_distance, trace_distance_raw,
};
pub use state::{
    DensityMatrix, IsometryMatrix, PureState, UnitaryMatrix, TOL_SPECTRAL, TOL_STRUCT,
};
