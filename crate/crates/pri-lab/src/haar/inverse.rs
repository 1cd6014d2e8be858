use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::qcore::linalg::{basis_vector, partial_trace, CMatrix, CVector};
use crate::qcore::{DensityMatrix, IsometryMatrix, UnitaryMatrix, TOL_STRUCT};

use super::sampling::gaussian_vector;

/// How the columns of a dilation outside the isometry's range are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DilationMode {
    /// Deterministic Gram-Schmidt over the computational basis.
    #[default]
    AnyConsistent,
    /// Gram-Schmidt over Gaussian vectors: for a Haar base this makes the
    /// dilation itself Haar distributed.
    HaarConditional,
}

/// `X ↦ Tr_aux(U† X U)` for a unitary `U` with `U (|x> ⊗ |0_aux>) = base |x>`.
/// The auxiliary register is the least significant factor.
#[derive(Clone, Debug)]
pub struct IsometryInverseChannel {
    base: IsometryMatrix,
    dilation: UnitaryMatrix,
    aux: usize,
}

impl IsometryInverseChannel {
    pub fn any_consistent(base: IsometryMatrix) -> Result<Self> {
        let d = base.d_out();
        Self::complete(base, (0..d).map(move |i| basis_vector(d, i)))
    }

    pub fn haar_conditional<R: Rng + ?Sized>(base: IsometryMatrix, rng: &mut R) -> Result<Self> {
        let d = base.d_out();
        Self::complete(
            base,
            std::iter::repeat_with(move || gaussian_vector(d, rng)),
        )
    }

    pub fn with_mode<R: Rng + ?Sized>(
        base: IsometryMatrix,
        mode: DilationMode,
        rng: &mut R,
    ) -> Result<Self> {
        match mode {
            DilationMode::AnyConsistent => Self::any_consistent(base),
            DilationMode::HaarConditional => Self::haar_conditional(base, rng),
        }
    }

    /// Uses `u` as the dilation; the base is read off its `|x>|0>` columns.
    pub fn from_unitary(u: UnitaryMatrix, d_in: usize) -> Result<Self> {
        let d = u.dim();
        if d_in == 0 || !d.is_multiple_of(d_in) {
            return Err(LabError::Dims(format!(
                "input dimension {d_in} does not divide {d}"
            )));
        }
        let aux = d / d_in;
        let cols: Vec<CVector> = (0..d_in)
            .map(|x| u.matrix().column(x * aux).into_owned())
            .collect();
        let base = IsometryMatrix::new_unchecked(CMatrix::from_columns(&cols));
        Ok(IsometryInverseChannel {
            base,
            dilation: u,
            aux,
        })
    }

    fn complete<I: Iterator<Item = CVector>>(base: IsometryMatrix, candidates: I) -> Result<Self> {
        let (d_out, d_in) = (base.d_out(), base.d_in());
        if d_out % d_in != 0 {
            return Err(LabError::Dims(format!(
                "input dimension {d_in} does not divide {d_out}"
            )));
        }
        if base.deviation() > TOL_STRUCT {
            return Err(LabError::Precondition("base is not an isometry".into()));
        }
        let aux = d_out / d_in;
        let basis: Vec<CVector> = (0..d_in)
            .map(|x| base.matrix().column(x).into_owned())
            .collect();
        let extra = crate::qcore::linalg::complete_orthonormal(&basis, d_out, candidates)?;
        let mut extra = extra.into_iter();
        let mut cols = Vec::with_capacity(d_out);
        for b in basis.iter().take(d_in) {
            cols.push(b.clone());
            for _ in 1..aux {
                cols.push(extra.next().expect("completion has d_out - d_in vectors"));
            }
        }
        let dilation = UnitaryMatrix::new_unchecked(CMatrix::from_columns(&cols));
        Ok(IsometryInverseChannel {
            base,
            dilation,
            aux,
        })
    }

    pub fn base(&self) -> &IsometryMatrix {
        &self.base
    }

    pub fn dilation(&self) -> &UnitaryMatrix {
        &self.dilation
    }

    pub fn aux_dim(&self) -> usize {
        self.aux
    }

    pub fn d_in(&self) -> usize {
        self.base.d_in()
    }

    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let d = self.dilation.dim();
        if x.nrows() != d || x.ncols() != d {
            return Err(LabError::Dims(format!(
                "inverse channel expects {d}x{d}, got {}x{}",
                x.nrows(),
                x.ncols()
            )));
        }
        let u = self.dilation.matrix();
        let y = u.adjoint() * x * u;
        partial_trace(&y, &[self.d_in(), self.aux], &[0])
    }
}

pub fn isometry_inverse_apply(
    ch: &IsometryInverseChannel,
    x: &DensityMatrix,
) -> Result<DensityMatrix> {
    DensityMatrix::from_channel_output(ch.apply(x.matrix())?)
}
