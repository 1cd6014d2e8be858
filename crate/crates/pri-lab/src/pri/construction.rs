use crate::error::{LabError, Result};
use crate::haar::IsometryInverseChannel;
use crate::qcore::linalg::{apply_left, conjugate_many, CMatrix, C64};
use crate::qcore::{DensityMatrix, IsometryMatrix, PureState, RegisterLayout, UnitaryMatrix};

use super::spec::{PriSpec, ResolvedPri};

fn omega(p: u64, k: u64) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k % p) as f64 / p as f64)
}

/// `G|x> = 2^{-m/2} Σ_z ω_p^{f(x‖z)} |π(x‖z)>`.
pub fn pri_isometry(spec: &PriSpec) -> Result<IsometryMatrix> {
    Ok(IsometryMatrix::new_unchecked(isometry_matrix(
        &spec.resolve()?,
    )))
}

pub(crate) fn isometry_matrix(r: &ResolvedPri) -> CMatrix {
    let big_n = r.alphabet();
    let zs = 1usize << r.m;
    let amp = (zs as f64).sqrt().recip();
    let mut g = CMatrix::zeros(big_n, 1usize << r.n);
    for x in 0..(1usize << r.n) {
        for z in 0..zs {
            let y = x * zs + z;
            g[(r.perm[y], x)] = omega(r.p, r.phases[y]) * amp;
        }
    }
    g
}

/// `O_π O_f (I ⊗ H^{⊗m})`, whose `|x>|0^m>` columns are `G|x>`.
pub fn pri_dilation(spec: &PriSpec) -> Result<UnitaryMatrix> {
    let r = spec.resolve()?;
    let big_n = r.alphabet();
    let zs = 1usize << r.m;
    let amp = (zs as f64).sqrt().recip();
    let mut u = CMatrix::zeros(big_n, big_n);
    for x in 0..(1usize << r.n) {
        for a in 0..zs {
            for z in 0..zs {
                let y = x * zs + z;
                let sign = if (a & z).count_ones() % 2 == 0 {
                    amp
                } else {
                    -amp
                };
                u[(r.perm[y], x * zs + a)] = omega(r.p, r.phases[y]) * sign;
            }
        }
    }
    Ok(UnitaryMatrix::new_unchecked(u))
}

fn query_layout(spec: &PriSpec, q: usize, ell: usize) -> Result<RegisterLayout> {
    RegisterLayout::side_then_blocks(1usize << ell, q, 1usize << spec.n)
}

/// `(I_ℓ ⊗ G^{⊗q})|ψ>` for a pure state on `ell + q·n` qubits.
pub fn pri_apply_pure(spec: &PriSpec, psi: &PureState, q: usize, ell: usize) -> Result<PureState> {
    if psi.qubits() != ell + q * spec.n {
        return Err(LabError::Dims(format!(
            "state has {} qubits, layout wants {}",
            psi.qubits(),
            ell + q * spec.n
        )));
    }
    crate::qcore::check_cap(ell + q * (spec.n + spec.m), crate::qcore::StorageKind::Pure)?;
    let g = isometry_matrix(&spec.resolve()?);
    let mut dims: Vec<usize> = Vec::with_capacity(q + 1);
    dims.push(1usize << ell);
    dims.extend(std::iter::repeat_n(1usize << spec.n, q));
    let mut v = CMatrix::from_column_slice(psi.dim(), 1, psi.amplitudes().as_slice());
    for k in 1..=q {
        v = apply_left(&v, &dims, k, &g)?;
        dims[k] = g.nrows();
    }
    PureState::new(crate::qcore::CVector::from_column_slice(v.as_slice()))
}

/// `(I_ℓ ⊗ G^{⊗q}) ρ (I_ℓ ⊗ G^{⊗q})†` on raw matrices.
pub fn pri_apply_matrix(spec: &PriSpec, rho: &CMatrix, q: usize, ell: usize) -> Result<CMatrix> {
    let layout = query_layout(spec, q, ell)?;
    if rho.nrows() != layout.total_dim() || rho.ncols() != layout.total_dim() {
        return Err(LabError::Dims(format!(
            "state is {}x{}, layout wants {}",
            rho.nrows(),
            rho.ncols(),
            layout.total_dim()
        )));
    }
    layout.with_block_dim(spec.alphabet())?;
    let g = isometry_matrix(&spec.resolve()?);
    let targets = layout.twirled();
    let ops: Vec<&CMatrix> = targets.iter().map(|_| &g).collect();
    Ok(conjugate_many(rho, &layout.dims(), &targets, &ops)?.0)
}

pub fn pri_apply(
    spec: &PriSpec,
    rho: &DensityMatrix,
    q: usize,
    ell: usize,
) -> Result<DensityMatrix> {
    if rho.qubits() != ell + q * spec.n {
        return Err(LabError::Dims(format!(
            "state has {} qubits, layout wants {}",
            rho.qubits(),
            ell + q * spec.n
        )));
    }
    DensityMatrix::from_channel_output(pri_apply_matrix(spec, rho.matrix(), q, ell)?)
}

/// Undoes `O_π`, `O_f` and the Hadamards, then discards the appended register.
pub fn pri_invert(spec: &PriSpec, x: &DensityMatrix) -> Result<DensityMatrix> {
    if x.qubits() != spec.n + spec.m {
        return Err(LabError::Dims(format!(
            "tag has {} qubits, expected {}",
            x.qubits(),
            spec.n + spec.m
        )));
    }
    let ch = pri_inverse_channel(spec)?;
    DensityMatrix::from_channel_output(ch.apply(x.matrix())?)
}

pub fn pri_inverse_channel(spec: &PriSpec) -> Result<IsometryInverseChannel> {
    IsometryInverseChannel::from_unitary(pri_dilation(spec)?, 1usize << spec.n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::sample_haar_state;
    use crate::qcore::linalg::{kron, max_abs_diff, plus_column};
    use crate::qcore::ops::trace_distance_raw;
    use crate::rng::from_seed;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn worked_example() {
        // f = (0,1,2,3) on 00,01,10,11 with p = 4: G|0> = (|00> + i|01>)/√2
        let spec = PriSpec::from_tables(1, 1, 4, vec![0, 1, 2, 3], vec![0, 1, 2, 3]).unwrap();
        let g = pri_isometry(&spec).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let col: Vec<C64> = g.matrix().column(0).iter().copied().collect();
        let want = [c(h, 0.0), c(0.0, h), c(0.0, 0.0), c(0.0, 0.0)];
        for (a, b) in col.iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn zero_phase_identity_perm_appends_plus() {
        let spec = PriSpec::from_tables(2, 2, 4, vec![0; 16], (0..16).collect()).unwrap();
        let g = pri_isometry(&spec).unwrap();
        let want = kron(&CMatrix::identity(4, 4), &plus_column(2));
        assert!(max_abs_diff(g.matrix(), &want) < 1e-15);
    }

    #[test]
    fn random_specs_are_isometries_and_invert() {
        let mut rng = from_seed(3);
        for k in 0..30 {
            let (n, m) = (1 + k % 3, 1 + (k / 3) % 3);
            let spec = if k % 2 == 0 {
                PriSpec::sample(n, m, 8, &mut rng).unwrap()
            } else {
                PriSpec::keyed(n, m, 8, k as u64, 99).unwrap()
            };
            assert!(pri_isometry(&spec).unwrap().deviation() < 1e-10);
            let u = pri_dilation(&spec).unwrap();
            let d = u.dim();
            assert!(
                max_abs_diff(
                    &(u.matrix().adjoint() * u.matrix()),
                    &CMatrix::identity(d, d)
                ) < 1e-10
            );
            let psi = sample_haar_state(1 << n, &mut rng).unwrap().to_density();
            let back = pri_invert(&spec, &pri_apply(&spec, &psi, 1, 0).unwrap()).unwrap();
            assert!(trace_distance_raw(back.matrix(), psi.matrix()).unwrap() < 1e-10);
        }
    }

    #[test]
    fn folded_apply_matches_dense_oracle() {
        let mut rng = from_seed(4);
        let spec = PriSpec::sample(1, 1, 8, &mut rng).unwrap();
        let g = pri_isometry(&spec).unwrap().into_matrix();
        let big = kron(&CMatrix::identity(2, 2), &kron(&g, &g));
        let psi = sample_haar_state(8, &mut rng).unwrap();
        let rho = psi.to_density();
        let got = pri_apply(&spec, &rho, 2, 1).unwrap();
        let want = &big * rho.matrix() * big.adjoint();
        assert!(max_abs_diff(got.matrix(), &want) < 1e-12);
        let pure = pri_apply_pure(&spec, &psi, 2, 1).unwrap();
        assert!((&big * psi.amplitudes() - pure.amplitudes()).norm() < 1e-12);
        assert!((pure.amplitudes().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invert_off_range_keeps_trace() {
        let mut rng = from_seed(5);
        let spec = PriSpec::sample(1, 2, 4, &mut rng).unwrap();
        let phi = sample_haar_state(8, &mut rng).unwrap().to_density();
        let out = pri_invert(&spec, &phi).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-10);
        out.check_psd().unwrap();
    }
}
