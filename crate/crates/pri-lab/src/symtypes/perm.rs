use itertools::Itertools;

use crate::error::{LabError, Result};
use crate::qcore::dims::{check_dim_cap, StorageKind};
use crate::qcore::linalg::{CMatrix, CVector, C64, ONE};

use super::types::{index_tuple, tuple_index, TypeVector};

/// Bijection on `{0..t}`. `images[j] = σ(j)`; acting on tuples, the entry at
/// position `j` moves to position `σ(j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PermElement {
    images: Vec<usize>,
}

impl PermElement {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(LabError::Invalid(format!("{images:?} is not a bijection")));
            }
            seen[i] = true;
        }
        Ok(PermElement { images })
    }

    pub fn identity(t: usize) -> Self {
        PermElement {
            images: (0..t).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `(self ∘ other)(j) = self(other(j))`.
    pub fn compose(&self, other: &PermElement) -> PermElement {
        PermElement {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        }
    }

    pub fn inverse(&self) -> PermElement {
        let mut inv = vec![0usize; self.images.len()];
        for (j, &i) in self.images.iter().enumerate() {
            inv[i] = j;
        }
        PermElement { images: inv }
    }

    pub fn apply<T: Copy + Default>(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); v.len()];
        for (j, &x) in v.iter().enumerate() {
            out[self.images[j]] = x;
        }
        out
    }

    /// All of `S_t` in lexicographic order of image lists.
    pub fn all(t: usize) -> Vec<PermElement> {
        (0..t)
            .permutations(t)
            .map(|images| PermElement { images })
            .collect()
    }
}

/// `P_σ = Σ_x |σ(x)><x|` on `([N])^t`.
pub fn permutation_operator(sigma: &PermElement, alphabet: usize) -> Result<CMatrix> {
    let t = sigma.degree();
    let dim = alphabet.pow(t as u32);
    check_dim_cap(dim, StorageKind::Density)?;
    let mut p = CMatrix::zeros(dim, dim);
    for x in 0..dim {
        let y = tuple_index(&sigma.apply(&index_tuple(x, alphabet, t)), alphabet);
        p[(y, x)] = ONE;
    }
    Ok(p)
}

/// Projector onto the symmetric subspace of `([N])^t`.
pub fn sym_projector(alphabet: usize, t: usize) -> Result<CMatrix> {
    let dim = alphabet.pow(t as u32);
    check_dim_cap(dim, StorageKind::Density)?;
    let mut p = CMatrix::zeros(dim, dim);
    let mut seen = vec![false; dim];
    // block per type: every pair of arrangements gets Π freq! / t!
    for x in 0..dim {
        if seen[x] {
            continue;
        }
        let ty = super::types::type_of(&index_tuple(x, alphabet, t), alphabet)?;
        let idx: Vec<usize> = ty
            .arrangements()
            .iter()
            .map(|v| tuple_index(v, alphabet))
            .collect();
        let w = C64::new(ty.weight(), 0.0);
        for &i in &idx {
            seen[i] = true;
            for &j in &idx {
                p[(i, j)] = w;
            }
        }
    }
    Ok(p)
}

/// `Π_sym / Tr Π_sym`, the t-copy moment of a Haar-random state.
pub fn sym_state(alphabet: usize, t: usize) -> Result<CMatrix> {
    let p = sym_projector(alphabet, t)?;
    let tr = super::types::binomial(alphabet + t - 1, t);
    Ok(p / C64::new(tr, 0.0))
}

/// Unit vector `√(Π freq!/t!) Σ_{v∈T} |v>`.
pub fn type_state_vec(ty: &TypeVector) -> Result<CVector> {
    let t = ty.size();
    let dim = ty.alphabet().pow(t as u32);
    check_dim_cap(dim, StorageKind::Pure)?;
    let mut v = CVector::zeros(dim);
    let amp = C64::new(ty.weight().sqrt(), 0.0);
    for tup in ty.arrangements() {
        v[tuple_index(&tup, ty.alphabet())] = amp;
    }
    Ok(v)
}
