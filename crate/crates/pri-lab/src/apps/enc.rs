//! Multi-copy encryption: a fresh PRI key per message, with the key itself
//! wrapped by a toy classical cipher. The wrap is a seeded ChaCha stream
//! XOR and is not cryptographic; it only stands in for the classical
//! component of the scheme.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::pri::{
    g_twirl, pri_apply_pure, pri_inverse_channel, pri_isometry, PermTwirlMode, PriSpec,
};
use crate::qcore::linalg::outer;
use crate::qcore::ops::trace_distance_raw;
use crate::qcore::{DensityMatrix, PureState, RegisterLayout};
use crate::rng::{streams, substream};

/// Range weight below which decryption reports a failed round trip.
pub const RANGE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncScheme {
    pub n: usize,
    pub m: usize,
    pub p: u64,
    /// Long-term classical key for the wrap.
    pub wrap_key: u64,
}

#[derive(Clone, Debug)]
pub struct Ciphertext {
    pub nonce: u64,
    pub wrapped_key: u64,
    /// One PRI output per message copy, all under the same key.
    pub copies: Vec<PureState>,
}

#[derive(Clone, Debug)]
pub struct Decrypted {
    pub copies: Vec<DensityMatrix>,
    /// Smallest weight of a ciphertext copy inside the key's range.
    pub range_weight: f64,
    pub ok: bool,
}

fn keystream(wrap_key: u64, nonce: u64) -> u64 {
    substream(wrap_key, streams::KEYS, nonce).random()
}

impl EncScheme {
    pub fn new(n: usize, m: usize, p: u64, wrap_key: u64) -> Self {
        EncScheme { n, m, p, wrap_key }
    }

    /// PRI key derived from a 64-bit key seed.
    pub fn pri_key(&self, key: u64) -> Result<PriSpec> {
        PriSpec::sample(
            self.n,
            self.m,
            self.p,
            &mut substream(key, streams::KEYS, 0),
        )
    }

    pub fn wrap(&self, key: u64, nonce: u64) -> u64 {
        key ^ keystream(self.wrap_key, nonce)
    }
}

pub fn enc<R: Rng + ?Sized>(
    scheme: &EncScheme,
    msg: &PureState,
    copies: usize,
    rng: &mut R,
) -> Result<Ciphertext> {
    let key: u64 = rng.random();
    let nonce: u64 = rng.random();
    enc_with_key(scheme, msg, copies, key, scheme.wrap(key, nonce), nonce)
}

/// Encryption with an explicit PRI key and wrapped-key field; the hybrid
/// step that swaps the wrap for a wrap of zero goes through here.
pub fn enc_with_key(
    scheme: &EncScheme,
    msg: &PureState,
    copies: usize,
    key: u64,
    wrapped_key: u64,
    nonce: u64,
) -> Result<Ciphertext> {
    if msg.qubits() != scheme.n {
        return Err(LabError::Dims(format!(
            "message has {} qubits, scheme encrypts {}",
            msg.qubits(),
            scheme.n
        )));
    }
    let spec = scheme.pri_key(key)?;
    let one = pri_apply_pure(&spec, msg, 1, 0)?;
    Ok(Ciphertext {
        nonce,
        wrapped_key,
        copies: vec![one; copies],
    })
}

pub fn dec(scheme: &EncScheme, ct: &Ciphertext) -> Result<Decrypted> {
    let key = scheme.wrap(ct.wrapped_key, ct.nonce);
    let spec = scheme.pri_key(key)?;
    let g = pri_isometry(&spec)?;
    let inv = pri_inverse_channel(&spec)?;
    let mut range_weight = 1.0f64;
    let mut copies = Vec::with_capacity(ct.copies.len());
    for c in &ct.copies {
        if c.qubits() != scheme.n + scheme.m {
            return Err(LabError::Dims(format!(
                "ciphertext copy has {} qubits, expected {}",
                c.qubits(),
                scheme.n + scheme.m
            )));
        }
        range_weight = range_weight.min((g.matrix().adjoint() * c.amplitudes()).norm_squared());
        copies.push(DensityMatrix::from_channel_output(
            inv.apply(&outer(c.amplitudes()))?,
        )?);
    }
    Ok(Decrypted {
        copies,
        range_weight,
        ok: range_weight >= 1.0 - RANGE_TOL,
    })
}

/// `TD(E_k G_k^{⊗t}(ψ0^{⊗t}), E_k G_k^{⊗t}(ψ1^{⊗t}))` with the key average
/// done exactly.
pub fn multi_copy_distinguishing_td(
    n: usize,
    m: usize,
    p: u64,
    t: usize,
    psi0: &PureState,
    psi1: &PureState,
) -> Result<f64> {
    let layout = RegisterLayout::blocks(t, 1usize << n)?;
    let power = |psi: &PureState| -> Result<crate::qcore::CMatrix> {
        let mut v = psi.clone();
        for _ in 1..t {
            v = v.tensor(psi)?;
        }
        Ok(outer(v.amplitudes()))
    };
    let a = g_twirl(&power(psi0)?, &layout, m, p, PermTwirlMode::Exact)?.mean;
    let b = g_twirl(&power(psi1)?, &layout, m, p, PermTwirlMode::Exact)?.mean;
    trace_distance_raw(&a, &b)
}
