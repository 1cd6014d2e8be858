//! Phase-function and permutation backends, and the serializable `PriSpec`.
//!
//! The keyed backends are statistical stand-ins: they expand a 64-bit seed
//! with a ChaCha stream and carry no cryptographic claim.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::qcore::dims::{check_cap, StorageKind};
use crate::rng::{streams, substream};

const FEISTEL_ROUNDS: usize = 4;

/// `f: [N] → Z_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseFunction {
    Table {
        table: Vec<u64>,
    },
    /// Table drawn from the seed's stream; a statistical stand-in.
    Keyed {
        seed: u64,
    },
}

/// `π ∈ S_N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PermBackend {
    Array {
        array: Vec<usize>,
    },
    /// Balanced Feistel network with seeded round tables and cycle walking;
    /// a statistical stand-in.
    Feistel {
        seed: u64,
    },
}

impl PhaseFunction {
    pub fn table(&self, alphabet: usize, p: u64) -> Result<Vec<u64>> {
        match self {
            PhaseFunction::Table { table } => {
                if table.len() != alphabet {
                    return Err(LabError::Invalid(format!(
                        "phase table has {} entries, need {alphabet}",
                        table.len()
                    )));
                }
                if let Some(bad) = table.iter().find(|&&v| v >= p) {
                    return Err(LabError::Invalid(format!(
                        "phase value {bad} outside Z_{p}"
                    )));
                }
                Ok(table.clone())
            }
            PhaseFunction::Keyed { seed } => {
                let mut rng = substream(*seed, streams::KEYS, 1);
                Ok((0..alphabet).map(|_| rng.random_range(0..p)).collect())
            }
        }
    }
}

impl PermBackend {
    pub fn array(&self, alphabet: usize) -> Result<Vec<usize>> {
        let arr = match self {
            PermBackend::Array { array } => array.clone(),
            PermBackend::Feistel { seed } => feistel_table(alphabet, *seed),
        };
        check_bijection(&arr, alphabet)?;
        Ok(arr)
    }
}

fn check_bijection(arr: &[usize], alphabet: usize) -> Result<()> {
    if arr.len() != alphabet {
        return Err(LabError::Invalid(format!(
            "permutation has {} entries, need {alphabet}",
            arr.len()
        )));
    }
    let mut seen = vec![false; alphabet];
    for &y in arr {
        if y >= alphabet || seen[y] {
            return Err(LabError::Invalid(
                "permutation array is not a bijection".into(),
            ));
        }
        seen[y] = true;
    }
    Ok(())
}

/// Feistel permutation on `[alphabet]` (a power of two). Odd bit counts run
/// on one extra bit and cycle-walk back into range.
fn feistel_table(alphabet: usize, seed: u64) -> Vec<usize> {
    let bits = alphabet.trailing_zeros() as usize;
    if bits == 0 {
        return vec![0; alphabet.min(1)];
    }
    let half = bits.div_ceil(2);
    let hmask = (1usize << half) - 1;
    let mut rng = substream(seed, streams::KEYS, 2);
    let rounds: Vec<Vec<usize>> = (0..FEISTEL_ROUNDS)
        .map(|_| (0..=hmask).map(|_| rng.random_range(0..=hmask)).collect())
        .collect();
    let step = |x: usize| -> usize {
        let (mut l, mut r) = (x >> half, x & hmask);
        for f in &rounds {
            let next = l ^ f[r];
            l = r;
            r = next;
        }
        (l << half) | r
    };
    (0..alphabet)
        .map(|x| {
            // the wider domain is a permutation, so every orbit from x re-enters [alphabet]
            let mut y = step(x);
            while y >= alphabet {
                y = step(y);
            }
            y
        })
        .collect()
}

/// The pair `(f, π)` plus dimensions; determines `G_{(f,π)}` completely.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriSpec {
    pub n: usize,
    pub m: usize,
    pub p: u64,
    pub f: PhaseFunction,
    pub perm: PermBackend,
}

/// `PriSpec` with both backends expanded to explicit tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedPri {
    pub n: usize,
    pub m: usize,
    pub p: u64,
    pub phases: Vec<u64>,
    pub perm: Vec<usize>,
}

impl ResolvedPri {
    pub fn alphabet(&self) -> usize {
        1usize << (self.n + self.m)
    }
}

impl PriSpec {
    pub fn new(n: usize, m: usize, p: u64, f: PhaseFunction, perm: PermBackend) -> Result<Self> {
        let spec = PriSpec { n, m, p, f, perm };
        spec.resolve()?;
        Ok(spec)
    }

    pub fn from_tables(
        n: usize,
        m: usize,
        p: u64,
        table: Vec<u64>,
        array: Vec<usize>,
    ) -> Result<Self> {
        Self::new(
            n,
            m,
            p,
            PhaseFunction::Table { table },
            PermBackend::Array { array },
        )
    }

    /// Keyed variant: `k1` seeds the phase function and `k2` the permutation.
    pub fn keyed(n: usize, m: usize, p: u64, k1: u64, k2: u64) -> Result<Self> {
        Self::new(
            n,
            m,
            p,
            PhaseFunction::Keyed { seed: k1 },
            PermBackend::Feistel { seed: k2 },
        )
    }

    /// Uniformly random explicit `(f, π)`.
    pub fn sample<R: Rng + ?Sized>(n: usize, m: usize, p: u64, rng: &mut R) -> Result<Self> {
        let big_n = alphabet_of(n, m)?;
        let table = (0..big_n).map(|_| rng.random_range(0..p)).collect();
        let mut array: Vec<usize> = (0..big_n).collect();
        array.shuffle(rng);
        Self::from_tables(n, m, p, table, array)
    }

    pub fn alphabet(&self) -> usize {
        1usize << (self.n + self.m)
    }

    pub fn resolve(&self) -> Result<ResolvedPri> {
        if self.p < 2 {
            return Err(LabError::Invalid(format!(
                "phase modulus must be at least 2, got {}",
                self.p
            )));
        }
        let big_n = alphabet_of(self.n, self.m)?;
        Ok(ResolvedPri {
            n: self.n,
            m: self.m,
            p: self.p,
            phases: self.f.table(big_n, self.p)?,
            perm: self.perm.array(big_n)?,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: PriSpec = serde_json::from_str(s)?;
        spec.resolve()?;
        Ok(spec)
    }
}

fn alphabet_of(n: usize, m: usize) -> Result<usize> {
    check_cap(n + m, StorageKind::Pure)?;
    Ok(1usize << (n + m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::from_seed;

    #[test]
    fn feistel_is_a_bijection_for_every_width() {
        for bits in 1..=9 {
            let arr = feistel_table(1 << bits, 42 + bits as u64);
            check_bijection(&arr, 1 << bits).unwrap();
        }
        assert_ne!(feistel_table(16, 1), feistel_table(16, 2));
    }

    #[test]
    fn validation() {
        assert!(PriSpec::from_tables(1, 1, 4, vec![0, 1, 2], vec![0, 1, 2, 3]).is_err());
        assert!(PriSpec::from_tables(1, 1, 4, vec![0, 1, 2, 4], vec![0, 1, 2, 3]).is_err());
        assert!(PriSpec::from_tables(1, 1, 4, vec![0, 1, 2, 3], vec![0, 1, 1, 3]).is_err());
        assert!(PriSpec::from_tables(1, 1, 1, vec![0; 4], vec![0, 1, 2, 3]).is_err());
        let keyed = PriSpec::keyed(2, 1, 8, 3, 4).unwrap().resolve().unwrap();
        assert!(keyed.phases.iter().all(|&v| v < 8));
    }

    #[test]
    fn json_round_trip_and_shape() {
        let spec = PriSpec::from_tables(1, 1, 4, vec![0, 1, 2, 3], vec![0, 1, 2, 3]).unwrap();
        let js = spec.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&js).unwrap();
        assert_eq!(v["f"]["kind"], "table");
        assert_eq!(v["perm"]["kind"], "array");
        assert_eq!(PriSpec::from_json(&js).unwrap(), spec);
        let keyed = PriSpec::keyed(1, 2, 8, 5, 6).unwrap();
        let v: serde_json::Value = serde_json::from_str(&keyed.to_json().unwrap()).unwrap();
        assert_eq!(v["f"]["seed"], 5);
        assert_eq!(v["perm"]["kind"], "feistel");
        let mut rng = from_seed(1);
        let s = PriSpec::sample(2, 1, 8, &mut rng).unwrap();
        assert_eq!(PriSpec::from_json(&s.to_json().unwrap()).unwrap(), s);
    }
}
