//! Applications built on a PRI: the quantum MAC with its forgery games,
//! multi-copy encryption, and PRSG/PRFSG states.

pub mod enc;
pub mod games;
pub mod mac;

use crate::error::{LabError, Result};
use crate::pri::{pri_apply_pure, PriSpec};
use crate::qcore::PureState;

pub use enc::{
    dec, enc, enc_with_key, multi_copy_distinguishing_td, Ciphertext, Decrypted, EncScheme,
};
pub use games::{
    play, play_many_copies_game, play_perm_test_game, play_uncompute_game, Adversary, ForgeryGame,
    GameReport, GameVariant, TrialRecord,
};
pub use mac::{mac_sign, mac_verify, MacScheme, SignerMode};

/// PRSG output: `G|0^n>`.
pub fn prsg_state(spec: &PriSpec) -> Result<PureState> {
    prfsg_state(spec, 0)
}

/// PRFSG output on classical input `x`: `G|x>`.
pub fn prfsg_state(spec: &PriSpec, x: usize) -> Result<PureState> {
    if x >= 1usize << spec.n {
        return Err(LabError::Invalid(format!(
            "input {x} outside {} bits",
            spec.n
        )));
    }
    pri_apply_pure(spec, &PureState::basis(spec.n, x)?, 1, 0)
}
