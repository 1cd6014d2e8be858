use itertools::Itertools;

use crate::error::{LabError, Result};

use super::dims::{check_cap, StorageKind};
use super::linalg::{self, CMatrix, ZERO};
use super::state::{DensityMatrix, PureState};

pub fn tensor_pure(a: &PureState, b: &PureState) -> Result<PureState> {
    a.tensor(b)
}

pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    a.tensor(b)
}

/// Keeps the listed qubits (0 is the most significant) and traces out the rest.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let dims = vec![2usize; rho.qubits()];
    let out = linalg::partial_trace(rho.matrix(), &dims, keep)?;
    DensityMatrix::from_channel_output(out)
}

/// Half the trace norm of `rho - sigma`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    trace_distance_raw(rho.matrix(), sigma.matrix())
}

pub fn trace_distance_raw(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(LabError::Dims(format!(
            "trace distance between {:?} and {:?}",
            rho.shape(),
            sigma.shape()
        )));
    }
    let diff = rho - sigma;
    Ok(0.5 * linalg::trace_norm_hermitian(&diff))
}

/// Probability that the SWAP test accepts: `(1 + Tr(ρσ)) / 2`.
pub fn swap_test_prob(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    swap_test_prob_raw(rho.matrix(), sigma.matrix())
}

pub fn swap_test_prob_raw(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(LabError::Dims("SWAP test needs equal dimensions".into()));
    }
    // Tr(ρσ) = Σ_ij ρ_ij σ_ji
    let mut acc = ZERO;
    for j in 0..rho.ncols() {
        for i in 0..rho.nrows() {
            acc += rho[(i, j)] * sigma[(j, i)];
        }
    }
    Ok(0.5 * (1.0 + acc.re))
}

/// Acceptance probability `Tr(Π_sym ρ)` of the permutation test on `t`
/// registers of dimension `d`.
pub fn permutation_test_prob(rho: &CMatrix, t: usize, d: usize) -> Result<f64> {
    let dim = d
        .checked_pow(t as u32)
        .ok_or_else(|| LabError::Dims("register size overflow".into()))?;
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(LabError::Dims(format!(
            "permutation test expects {t} registers of dim {d} ({dim}), got {}",
            rho.nrows()
        )));
    }
    let mut digits = vec![0usize; t];
    let mut permuted = vec![0usize; t];
    let mut total = 0.0;
    let mut count = 0usize;
    for sigma in (0..t).permutations(t) {
        // Tr(P_σ ρ) = Σ_x ρ[x, σ(x)], σ(x)[σ(j)] = x[j]
        let mut acc = ZERO;
        for x in 0..dim {
            let mut rem = x;
            for j in (0..t).rev() {
                digits[j] = rem % d;
                rem /= d;
            }
            for j in 0..t {
                permuted[sigma[j]] = digits[j];
            }
            let y = permuted.iter().fold(0usize, |a, &v| a * d + v);
            acc += rho[(x, y)];
        }
        total += acc.re;
        count += 1;
    }
    Ok(total / count as f64)
}

pub fn operator_norm(a: &CMatrix) -> f64 {
    linalg::operator_norm(a)
}

/// `|0...0><0...0|` style helper for basis projectors.
pub fn basis_density(qubits: usize, index: usize) -> Result<DensityMatrix> {
    check_cap(qubits, StorageKind::Density)?;
    Ok(PureState::basis(qubits, index)?.to_density())
}

/// Fidelity-style overlap `<ψ|ρ|ψ>`.
pub fn expectation(psi: &PureState, rho: &CMatrix) -> f64 {
    let v = psi.amplitudes();
    (v.adjoint() * rho * v)[(0, 0)].re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::C64;
    use approx::assert_abs_diff_eq;

    fn real(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn plus() -> PureState {
        PureState::plus(1).unwrap()
    }

    #[test]
    fn tensor_examples() {
        let z = PureState::basis(1, 0).unwrap();
        let o = PureState::basis(1, 1).unwrap();
        assert_eq!(
            tensor_pure(&z, &o).unwrap(),
            PureState::basis(2, 1).unwrap()
        );
        let mm = DensityMatrix::maximally_mixed(1).unwrap();
        let t = tensor(&mm, &mm).unwrap();
        assert!(
            linalg::max_abs_diff(
                t.matrix(),
                DensityMatrix::maximally_mixed(2).unwrap().matrix()
            ) < 1e-12
        );
        let pz = tensor_pure(&plus(), &z).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(pz.amplitudes()[0].re, h, epsilon = 1e-12);
        assert_abs_diff_eq!(pz.amplitudes()[2].re, h, epsilon = 1e-12);
        assert_abs_diff_eq!(
            pz.amplitudes()[1].norm() + pz.amplitudes()[3].norm(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn partial_trace_examples() {
        let r = basis_density(2, 1).unwrap();
        let a = partial_trace(&r, &[0]).unwrap();
        assert!(linalg::max_abs_diff(a.matrix(), basis_density(1, 0).unwrap().matrix()) < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(nalgebra::DVector::from_vec(vec![
            real(h),
            ZERO,
            ZERO,
            real(h),
        ]))
        .unwrap();
        let red = partial_trace(&bell.to_density(), &[0]).unwrap();
        assert!(
            linalg::max_abs_diff(
                red.matrix(),
                DensityMatrix::maximally_mixed(1).unwrap().matrix()
            ) < 1e-12
        );
    }

    #[test]
    fn trace_distance_examples() {
        let z = basis_density(1, 0).unwrap();
        let o = basis_density(1, 1).unwrap();
        assert_abs_diff_eq!(trace_distance(&z, &z).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(trace_distance(&z, &o).unwrap(), 1.0, epsilon = 1e-12);
        // |0><0| - |+><+| has eigenvalues ±1/√2
        assert_abs_diff_eq!(
            trace_distance(&z, &plus().to_density()).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-8
        );
    }

    #[test]
    fn swap_test_examples() {
        let z = basis_density(1, 0).unwrap();
        let o = basis_density(1, 1).unwrap();
        let mm = DensityMatrix::maximally_mixed(1).unwrap();
        assert_abs_diff_eq!(swap_test_prob(&z, &z).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(swap_test_prob(&z, &o).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(swap_test_prob(&mm, &mm).unwrap(), 0.75, epsilon = 1e-12);
    }

    #[test]
    fn permutation_test_examples() {
        let psi = PureState::normalized(nalgebra::DVector::from_vec(vec![
            C64::new(0.3, 0.1),
            C64::new(-0.2, 0.9),
        ]))
        .unwrap();
        let three = psi.tensor(&psi).unwrap().tensor(&psi).unwrap();
        assert_abs_diff_eq!(
            permutation_test_prob(three.to_density().matrix(), 3, 2).unwrap(),
            1.0,
            epsilon = 1e-10
        );
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = PureState::new(nalgebra::DVector::from_vec(vec![
            ZERO,
            real(h),
            real(-h),
            ZERO,
        ]))
        .unwrap();
        assert_abs_diff_eq!(
            permutation_test_prob(singlet.to_density().matrix(), 2, 2).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let r = basis_density(2, 1).unwrap();
        assert_abs_diff_eq!(
            permutation_test_prob(r.matrix(), 2, 2).unwrap(),
            0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn operator_norm_examples() {
        assert_abs_diff_eq!(
            operator_norm(&CMatrix::identity(3, 3)),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            operator_norm(&(CMatrix::identity(3, 3) * real(2.0))),
            2.0,
            epsilon = 1e-12
        );
    }
}
