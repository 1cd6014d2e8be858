use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::qcore::dims::{check_dim_cap, StorageKind};
use crate::qcore::linalg::{CMatrix, CVector, C64};
use crate::qcore::{IsometryMatrix, PureState, UnitaryMatrix};

/// `rows x cols` matrix of independent standard complex Gaussians
/// (real and imaginary parts each N(0, 1/2)).
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // fill column-major so the draw order is fixed
    CMatrix::from_iterator(
        rows,
        cols,
        (0..rows * cols).map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re * s, im * s)
        }),
    )
}

pub fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let g = ginibre(dim, 1, rng);
    CVector::from_column_slice(g.as_slice())
}

/// Uniformly random unit vector in `C^d`.
pub fn sample_haar_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<PureState> {
    if d == 0 {
        return Err(LabError::Dims("dimension must be at least 1".into()));
    }
    check_dim_cap(d, StorageKind::Pure)?;
    PureState::normalized(gaussian_vector(d, rng))
}

/// Orthonormal columns of a Ginibre matrix by QR, with the phases of R's
/// diagonal moved into Q so the result is exactly Haar distributed.
fn haar_columns<R: Rng + ?Sized>(d_out: usize, d_in: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d_out, d_in, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..d_in {
        let rk = r[(k, k)];
        let phase = if rk.norm() > 0.0 {
            rk / rk.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..d_out {
            q[(i, k)] *= phase;
        }
    }
    q
}

pub fn sample_haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    if d == 0 {
        return Err(LabError::Dims("dimension must be at least 1".into()));
    }
    check_dim_cap(d, StorageKind::Density)?;
    Ok(UnitaryMatrix::new_unchecked(haar_columns(d, d, rng)))
}

/// Sequential sampler: each column is a fresh Gaussian vector projected onto
/// the orthogonal complement of the previous columns, then normalized.
pub fn sample_haar_unitary_columns<R: Rng + ?Sized>(
    d: usize,
    rng: &mut R,
) -> Result<UnitaryMatrix> {
    if d == 0 {
        return Err(LabError::Dims("dimension must be at least 1".into()));
    }
    check_dim_cap(d, StorageKind::Density)?;
    Ok(UnitaryMatrix::new_unchecked(sequential_columns(d, d, rng)))
}

fn sequential_columns<R: Rng + ?Sized>(d_out: usize, d_in: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<CVector> = Vec::with_capacity(d_in);
    while cols.len() < d_in {
        let mut v = gaussian_vector(d_out, rng);
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dotc(&v);
                v -= c * proj;
            }
        }
        let nrm = v.norm();
        // a Gaussian draw lands in the span with probability zero
        if nrm > 1e-8 {
            cols.push(v / C64::new(nrm, 0.0));
        }
    }
    CMatrix::from_columns(&cols)
}

/// First `d_in` columns of a Haar unitary on `C^{d_out}`.
pub fn sample_haar_isometry<R: Rng + ?Sized>(
    d_in: usize,
    d_out: usize,
    rng: &mut R,
) -> Result<IsometryMatrix> {
    if d_in == 0 || d_in > d_out {
        return Err(LabError::Dims(format!(
            "isometry needs 1 <= d_in <= d_out, got {d_in} -> {d_out}"
        )));
    }
    check_dim_cap(d_out, StorageKind::Density)?;
    Ok(IsometryMatrix::new_unchecked(haar_columns(
        d_out, d_in, rng,
    )))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HaarMethod {
    #[default]
    GinibreQr,
    ColumnByColumn,
}

/// Sampler with a fixed method; the RNG is supplied per call.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct HaarSampler {
    pub method: HaarMethod,
}

impl HaarSampler {
    pub fn new(method: HaarMethod) -> Self {
        HaarSampler { method }
    }

    pub fn unitary<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> Result<UnitaryMatrix> {
        match self.method {
            HaarMethod::GinibreQr => sample_haar_unitary(d, rng),
            HaarMethod::ColumnByColumn => sample_haar_unitary_columns(d, rng),
        }
    }

    pub fn isometry<R: Rng + ?Sized>(
        &self,
        d_in: usize,
        d_out: usize,
        rng: &mut R,
    ) -> Result<IsometryMatrix> {
        match self.method {
            HaarMethod::GinibreQr => sample_haar_isometry(d_in, d_out, rng),
            HaarMethod::ColumnByColumn => {
                if d_in == 0 || d_in > d_out {
                    return Err(LabError::Dims(format!(
                        "isometry needs 1 <= d_in <= d_out, got {d_in} -> {d_out}"
                    )));
                }
                check_dim_cap(d_out, StorageKind::Density)?;
                Ok(IsometryMatrix::new_unchecked(sequential_columns(
                    d_out, d_in, rng,
                )))
            }
        }
    }

    pub fn state<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> Result<PureState> {
        sample_haar_state(d, rng)
    }
}
