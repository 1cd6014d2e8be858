//! Haar-random states, unitaries and isometries, the isometry inverse
//! channel, and Monte Carlo Haar twirls over a register layout.

pub mod inverse;
pub mod sampling;
pub mod twirl;

pub use inverse::{isometry_inverse_apply, DilationMode, IsometryInverseChannel};
pub use sampling::{
    ginibre, sample_haar_isometry, sample_haar_state, sample_haar_unitary,
    sample_haar_unitary_columns, HaarMethod, HaarSampler,
};
pub use twirl::{
    almost_invariance_deficit, haar_orthogonal_columns_vs_iid,
    haar_orthogonal_columns_vs_iid_exact, haar_twirl_exact, haar_twirl_exact_side, haar_twirl_mc,
    OrthVsIid, TwirlEstimate, EXACT_TWIRL_MAX_COPIES,
};
