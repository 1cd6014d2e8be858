use itertools::Itertools;

use crate::error::{LabError, Result};
use crate::qcore::linalg::{CMatrix, C64};

use super::types::{tuple_index, TypeVector};

/// Type-state basis of `∨^{k_1} C^{N_1} ⊗ ∨^{k_2} C^{N_2} ⊗ ...`, each group
/// of `k` consecutive registers symmetrized. Columns are stored sparsely.
#[derive(Clone, Debug)]
pub struct SymBasis {
    full_dim: usize,
    cols: Vec<Vec<(usize, f64)>>,
}

fn group_basis(alphabet: usize, copies: usize) -> Result<Vec<Vec<(usize, f64)>>> {
    (0..alphabet)
        .combinations_with_replacement(copies)
        .map(|tuple| {
            let ty = super::types::type_of(&tuple, alphabet)?;
            Ok(column(&ty))
        })
        .collect()
}

fn column(ty: &TypeVector) -> Vec<(usize, f64)> {
    let amp = ty.weight().sqrt();
    ty.arrangements()
        .iter()
        .map(|v| (tuple_index(v, ty.alphabet()), amp))
        .collect()
}

impl SymBasis {
    /// `groups[g] = (alphabet, copies)`, in register order.
    pub fn new(groups: &[(usize, usize)]) -> Result<Self> {
        let mut full_dim = 1usize;
        let mut cols: Vec<Vec<(usize, f64)>> = vec![vec![(0, 1.0)]];
        for &(alphabet, copies) in groups {
            let dim = alphabet
                .checked_pow(copies as u32)
                .ok_or_else(|| LabError::Dims("symmetric basis dimension overflow".into()))?;
            let g = group_basis(alphabet, copies)?;
            cols = cols
                .iter()
                .cartesian_product(g.iter())
                .map(|(a, b)| {
                    a.iter()
                        .cartesian_product(b.iter())
                        .map(|(&(i, u), &(j, v))| (i * dim + j, u * v))
                        .collect()
                })
                .collect();
            full_dim *= dim;
        }
        Ok(SymBasis { full_dim, cols })
    }

    pub fn rank(&self) -> usize {
        self.cols.len()
    }

    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    /// `V† X V`. Trace distances between operators supported in the
    /// subspace are unchanged by this map.
    pub fn compress(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.nrows() != self.full_dim || x.ncols() != self.full_dim {
            return Err(LabError::Dims(format!(
                "operator is {}x{}, basis lives in {}",
                x.nrows(),
                x.ncols(),
                self.full_dim
            )));
        }
        let r = self.rank();
        let d = self.full_dim;
        let mut w = CMatrix::zeros(d, r);
        for (b, col) in self.cols.iter().enumerate() {
            for &(j, v) in col {
                let src = x.column(j);
                let mut dst = w.column_mut(b);
                dst.axpy(C64::new(v, 0.0), &src, C64::new(1.0, 0.0));
            }
        }
        let mut y = CMatrix::zeros(r, r);
        for (a, col) in self.cols.iter().enumerate() {
            for b in 0..r {
                let mut acc = C64::new(0.0, 0.0);
                for &(i, u) in col {
                    acc += w[(i, b)] * u;
                }
                y[(a, b)] = acc;
            }
        }
        Ok(y)
    }

    /// Weight of `x` outside the subspace: `Tr(x) - Tr(V† x V)`.
    pub fn leakage(&self, x: &CMatrix) -> Result<f64> {
        Ok((x.trace() - self.compress(x)?.trace()).norm())
    }
}
