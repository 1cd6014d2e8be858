use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Environment variable that overrides both qubit caps.
pub const CAP_ENV: &str = "PRI_LAB_MAX_QUBITS";

pub const DEFAULT_DENSITY_CAP: usize = 14;
pub const DEFAULT_PURE_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StorageKind {
    Pure,
    Density,
}

/// Qubit cap for the given storage kind, honouring the environment override.
pub fn qubit_cap(kind: StorageKind) -> usize {
    if let Some(v) = std::env::var(CAP_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
    {
        return v;
    }
    match kind {
        StorageKind::Pure => DEFAULT_PURE_CAP,
        StorageKind::Density => DEFAULT_DENSITY_CAP,
    }
}

pub fn check_cap(qubits: usize, kind: StorageKind) -> Result<()> {
    let cap = qubit_cap(kind);
    if qubits > cap {
        return Err(LabError::Cap {
            needed: qubits,
            cap,
        });
    }
    Ok(())
}

/// Same check for a raw dimension; non powers of two round up.
pub fn check_dim_cap(dim: usize, kind: StorageKind) -> Result<()> {
    check_cap(ceil_log2(dim), kind)
}

pub fn ceil_log2(d: usize) -> usize {
    if d <= 1 {
        0
    } else {
        (usize::BITS - (d - 1).leading_zeros()) as usize
    }
}

/// Smallest power of two strictly greater than `2q`.
pub fn default_modulus(q: usize) -> u64 {
    let mut p = 2u64;
    while p <= 2 * q as u64 {
        p *= 2;
    }
    p
}

/// Shared dimension bundle. `q = s*t` whenever both are supplied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QDims {
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub s: usize,
    pub t: usize,
    pub ell: usize,
    pub p: u64,
}

impl QDims {
    pub fn new(n: usize, m: usize, s: usize, t: usize) -> Self {
        let q = s * t;
        QDims {
            n,
            m,
            q,
            s,
            t,
            ell: 0,
            p: default_modulus(q),
        }
    }

    pub fn with_ell(mut self, ell: usize) -> Self {
        self.ell = ell;
        self
    }

    pub fn with_p(mut self, p: u64) -> Self {
        self.p = p;
        self
    }

    /// Alphabet size 2^(n+m).
    pub fn big_n(&self) -> usize {
        1usize << (self.n + self.m)
    }

    pub fn output_qubits(&self) -> usize {
        self.ell + self.q * (self.n + self.m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s > 0 && self.t > 0 && self.q != self.s * self.t {
            return Err(LabError::Invalid(format!(
                "q = {} but s*t = {}",
                self.q,
                self.s * self.t
            )));
        }
        if self.p < 2 {
            return Err(LabError::Invalid(
                "phase modulus p must be at least 2".into(),
            ));
        }
        if self.p <= self.q as u64 {
            return Err(LabError::Precondition(format!(
                "phase cancellation needs q < p (q = {}, p = {})",
                self.q, self.p
            )));
        }
        check_cap(self.output_qubits(), StorageKind::Density)
    }
}
