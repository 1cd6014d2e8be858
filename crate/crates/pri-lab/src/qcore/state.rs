use crate::error::{LabError, Result};

use super::dims::{check_cap, StorageKind};
use super::linalg::{hermitian_eigenvalues, max_abs_diff, outer, CMatrix, CVector, C64};

/// Structural identities (norms, traces, unitarity).
pub const TOL_STRUCT: f64 = 1e-10;
/// Spectral quantities (eigenvalues, trace norms).
pub const TOL_SPECTRAL: f64 = 1e-8;

fn qubits_of(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(LabError::Dims(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Unit vector over `qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amps: CVector,
    qubits: usize,
}

impl PureState {
    pub fn new(amps: CVector) -> Result<Self> {
        let qubits = qubits_of(amps.len())?;
        check_cap(qubits, StorageKind::Pure)?;
        let nrm = amps.norm();
        if (nrm - 1.0).abs() > TOL_STRUCT {
            return Err(LabError::Invalid(format!(
                "state norm is {nrm}, expected 1"
            )));
        }
        Ok(PureState { amps, qubits })
    }

    /// Normalizes first; fails only on the zero vector.
    pub fn normalized(amps: CVector) -> Result<Self> {
        let nrm = amps.norm();
        if nrm < 1e-300 {
            return Err(LabError::Invalid("cannot normalize the zero vector".into()));
        }
        Self::new(amps / C64::new(nrm, 0.0))
    }

    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        check_cap(qubits, StorageKind::Pure)?;
        let dim = 1usize << qubits;
        if index >= dim {
            return Err(LabError::Invalid(format!(
                "basis index {index} out of range"
            )));
        }
        let mut v = CVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Ok(PureState { amps: v, qubits })
    }

    /// `|+>^{⊗qubits}`.
    pub fn plus(qubits: usize) -> Result<Self> {
        check_cap(qubits, StorageKind::Pure)?;
        let dim = 1usize << qubits;
        let a = (dim as f64).sqrt().recip();
        Ok(PureState {
            amps: CVector::from_element(dim, C64::new(a, 0.0)),
            qubits,
        })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            mat: outer(&self.amps),
            qubits: self.qubits,
        }
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        check_cap(self.qubits + other.qubits, StorageKind::Pure)?;
        Ok(PureState {
            amps: self.amps.kronecker(&other.amps),
            qubits: self.qubits + other.qubits,
        })
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix over `qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    qubits: usize,
}

impl DensityMatrix {
    /// Checks Hermiticity and trace; positivity is checked by [`Self::check_psd`].
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(LabError::Dims("density matrix must be square".into()));
        }
        let qubits = qubits_of(mat.nrows())?;
        check_cap(qubits, StorageKind::Density)?;
        let herm = max_abs_diff(&mat, &mat.adjoint());
        if herm > TOL_STRUCT {
            return Err(LabError::Invalid(format!(
                "matrix is not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TOL_STRUCT || tr.im.abs() > TOL_STRUCT {
            return Err(LabError::Invalid(format!("trace is {tr}, expected 1")));
        }
        Ok(DensityMatrix { mat, qubits })
    }

    /// Wraps a matrix produced by a trusted channel. Only the shape is checked.
    pub fn from_channel_output(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(LabError::Dims("density matrix must be square".into()));
        }
        let qubits = qubits_of(mat.nrows())?;
        check_cap(qubits, StorageKind::Density)?;
        Ok(DensityMatrix { mat, qubits })
    }

    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        check_cap(qubits, StorageKind::Density)?;
        let d = 1usize << qubits;
        Ok(DensityMatrix {
            mat: CMatrix::identity(d, d) / C64::new(d as f64, 0.0),
            qubits,
        })
    }

    pub fn check_psd(&self) -> Result<()> {
        let min = hermitian_eigenvalues(&self.mat)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < -1e-9 {
            return Err(LabError::Invalid(format!(
                "matrix has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        check_cap(self.qubits + other.qubits, StorageKind::Density)?;
        Ok(DensityMatrix {
            mat: self.mat.kronecker(&other.mat),
            qubits: self.qubits + other.qubits,
        })
    }
}

/// Matrix with orthonormal columns, `rows >= cols`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsometryMatrix {
    mat: CMatrix,
}

impl IsometryMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() < mat.ncols() {
            return Err(LabError::Dims(format!(
                "isometry must be tall, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let gram = mat.adjoint() * &mat;
        let dev = max_abs_diff(&gram, &CMatrix::identity(mat.ncols(), mat.ncols()));
        if dev > TOL_STRUCT {
            return Err(LabError::Invalid(format!(
                "columns are not orthonormal (deviation {dev:.3e})"
            )));
        }
        Ok(IsometryMatrix { mat })
    }

    pub(crate) fn new_unchecked(mat: CMatrix) -> Self {
        IsometryMatrix { mat }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn d_in(&self) -> usize {
        self.mat.ncols()
    }

    pub fn d_out(&self) -> usize {
        self.mat.nrows()
    }

    /// `‖V†V − I‖∞` (largest entry).
    pub fn deviation(&self) -> f64 {
        let gram = self.mat.adjoint() * &self.mat;
        max_abs_diff(
            &gram,
            &CMatrix::identity(self.mat.ncols(), self.mat.ncols()),
        )
    }
}

/// Square isometry.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    mat: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(LabError::Dims("unitary must be square".into()));
        }
        let iso = IsometryMatrix::new(mat)?;
        Ok(UnitaryMatrix { mat: iso.mat })
    }

    pub(crate) fn new_unchecked(mat: CMatrix) -> Self {
        UnitaryMatrix { mat }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn as_isometry(&self) -> IsometryMatrix {
        IsometryMatrix {
            mat: self.mat.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_state_rejects_unnormalized() {
        let v = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(PureState::new(v.clone()).is_err());
        let s = PureState::normalized(v).unwrap();
        assert!((s.amplitudes().norm() - 1.0).abs() < TOL_STRUCT);
    }

    #[test]
    fn density_checks() {
        let bad = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.5, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, 1.0),
                C64::new(0.5, 0.0),
            ],
        );
        assert!(DensityMatrix::new(bad).is_err());
        let neg = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.5, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(-0.5, 0.0),
            ],
        );
        let d = DensityMatrix::new(neg).unwrap();
        assert!(d.check_psd().is_err());
        assert!(DensityMatrix::maximally_mixed(2)
            .unwrap()
            .check_psd()
            .is_ok());
    }

    #[test]
    fn isometry_checks() {
        let good = CMatrix::from_row_slice(2, 1, &[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        assert!(IsometryMatrix::new(good).is_ok());
        let bad = CMatrix::from_row_slice(2, 1, &[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(IsometryMatrix::new(bad).is_err());
        assert!(UnitaryMatrix::new(CMatrix::identity(2, 1)).is_err());
    }
}
