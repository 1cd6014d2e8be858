//! The PRI construction `G_{(f,π)}`: append `|+^m>`, apply the phase oracle
//! `O_f`, then the permutation oracle `O_π`. Register order is input first,
//! appended qubits last.

pub mod construction;
pub mod spec;
pub mod twirl;

pub use construction::{
    pri_apply, pri_apply_matrix, pri_apply_pure, pri_dilation, pri_inverse_channel, pri_invert,
    pri_isometry,
};
pub use spec::{PermBackend, PhaseFunction, PriSpec, ResolvedPri};
pub use twirl::{
    g_twirl, perm_twirl, phase_twirl_exact, pri_channel_mc, PermTwirlMode, PERM_TWIRL_MAX_ALPHABET,
};
