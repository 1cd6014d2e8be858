use itertools::Itertools;
use rand::Rng;

use crate::error::{LabError, Result};
use crate::qcore::dims::{check_dim_cap, StorageKind};
use crate::qcore::linalg::{CMatrix, CVector, C64};
use crate::qcore::DensityMatrix;

use super::family::{sample_type_family, FamilyKind, TypeFamilyTag};
use super::perm::type_state_vec;
use super::types::{factorial, falling_factorial, tuple_index, TypeVector};

/// Families above this count are mixed from samples instead of enumerated.
pub const EXACT_ENUMERATION_LIMIT: f64 = 1e5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoUniMode {
    /// Enumerate when the family count is at most the limit, else sample.
    Auto {
        samples: usize,
        seed: u64,
    },
    Exact,
    Sampled {
        samples: usize,
        seed: u64,
    },
}

impl Default for RhoUniMode {
    fn default() -> Self {
        RhoUniMode::Auto {
            samples: 4096,
            seed: 0,
        }
    }
}

/// `|𝒯_uni|` for ordered s-tuples of t-sets over `[N]`.
pub fn uni_family_count(alphabet: usize, s: usize, t: usize) -> f64 {
    falling_factorial(alphabet, s * t) / factorial(t).powi(s as i32)
}

/// `⊗_i |type_{T_i}>`.
pub fn family_state(fam: &[TypeVector]) -> Result<CVector> {
    let mut v = CVector::from_element(1, C64::new(1.0, 0.0));
    for ty in fam {
        v = v.kronecker(&type_state_vec(ty)?);
    }
    Ok(v)
}

/// `⊗_i |type_{T_i}><type_{T_i}|`.
pub fn family_projector(fam: &[TypeVector]) -> Result<CMatrix> {
    let v = family_state(fam)?;
    Ok(&v * v.adjoint())
}

/// ρ_uni on `nm` qubits per register.
pub fn rho_uni(nm: usize, s: usize, t: usize) -> Result<DensityMatrix> {
    DensityMatrix::from_channel_output(rho_uni_matrix(1usize << nm, s, t, RhoUniMode::default())?)
}

pub fn rho_uni_matrix(alphabet: usize, s: usize, t: usize, mode: RhoUniMode) -> Result<CMatrix> {
    if s * t > alphabet {
        return Err(LabError::Infeasible(format!(
            "no unique family with s*t = {} > N = {alphabet}",
            s * t
        )));
    }
    let dim = alphabet
        .checked_pow((s * t) as u32)
        .ok_or_else(|| LabError::Dims("dimension overflow".into()))?;
    check_dim_cap(dim, StorageKind::Density)?;
    let count = uni_family_count(alphabet, s, t);
    match mode {
        RhoUniMode::Exact => Ok(enumerate(alphabet, s, t, dim, count)),
        RhoUniMode::Auto { .. } if count <= EXACT_ENUMERATION_LIMIT => {
            Ok(enumerate(alphabet, s, t, dim, count))
        }
        RhoUniMode::Auto { samples, seed } | RhoUniMode::Sampled { samples, seed } => {
            let mut rng = crate::rng::substream(seed, crate::rng::streams::INPUTS, 0);
            sampled(alphabet, s, t, dim, samples, &mut rng)
        }
    }
}

fn enumerate(alphabet: usize, s: usize, t: usize, dim: usize, count: f64) -> CMatrix {
    let mut out = CMatrix::zeros(dim, dim);
    // every family contributes (t!)^s arrangements, each pair weighted equally
    let w = C64::new(1.0 / (count * factorial(t).powi(s as i32)), 0.0);
    let mut used = vec![false; alphabet];
    let mut chosen: Vec<Vec<usize>> = Vec::with_capacity(s);
    fn rec(
        alphabet: usize,
        s: usize,
        t: usize,
        used: &mut [bool],
        chosen: &mut Vec<Vec<usize>>,
        out: &mut CMatrix,
        w: C64,
    ) {
        if chosen.len() == s {
            let blocks: Vec<Vec<Vec<usize>>> = chosen
                .iter()
                .map(|set| set.iter().copied().permutations(set.len()).collect())
                .collect();
            let idx: Vec<usize> = blocks
                .iter()
                .map(|b| b.iter())
                .multi_cartesian_product()
                .map(|parts| {
                    let flat: Vec<usize> = parts.into_iter().flatten().copied().collect();
                    tuple_index(&flat, alphabet)
                })
                .collect();
            let idx = if s == 0 { vec![0] } else { idx };
            for &j in &idx {
                for &i in &idx {
                    out[(i, j)] += w;
                }
            }
            return;
        }
        let free: Vec<usize> = (0..alphabet).filter(|&x| !used[x]).collect();
        for set in free.into_iter().combinations(t) {
            for &x in &set {
                used[x] = true;
            }
            chosen.push(set);
            rec(alphabet, s, t, used, chosen, out, w);
            let set = chosen.pop().expect("pushed above");
            for x in set {
                used[x] = false;
            }
        }
    }
    rec(alphabet, s, t, &mut used, &mut chosen, &mut out, w);
    out
}

fn sampled<R: Rng + ?Sized>(
    alphabet: usize,
    s: usize,
    t: usize,
    dim: usize,
    samples: usize,
    rng: &mut R,
) -> Result<CMatrix> {
    if samples == 0 {
        return Err(LabError::Invalid(
            "sampled rho_uni needs at least one sample".into(),
        ));
    }
    let tag = TypeFamilyTag {
        family: FamilyKind::Unique,
        alphabet,
        s,
        t,
    };
    let mut out = CMatrix::zeros(dim, dim);
    for _ in 0..samples {
        let fam = sample_type_family(&tag, rng)?;
        out += family_projector(&fam)?;
    }
    Ok(out / C64::new(samples as f64, 0.0))
}
