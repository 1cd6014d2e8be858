use crate::error::{LabError, Result};
use crate::mc::{batched_sum, choose_batches, BatchSums, Estimate, DEFAULT_RESAMPLES};
use crate::qcore::linalg::{
    basis_vector, conjugate_many, kron, kron_vec, outer, CMatrix, CVector, C64,
};
use crate::qcore::ops::trace_distance_raw;
use crate::qcore::RegisterLayout;
use crate::rng::streams;
use crate::symtypes::{index_tuple, sym_state, tuple_index, PermElement};

use super::sampling::sample_haar_unitary;

/// Monte Carlo mean of a channel output plus the batch sums it came from.
#[derive(Clone, Debug)]
pub struct TwirlEstimate {
    pub mean: CMatrix,
    pub sums: BatchSums,
}

impl TwirlEstimate {
    pub fn entry_stderr(&self) -> nalgebra::DMatrix<f64> {
        self.sums.entry_stderr()
    }

    pub fn max_entry_stderr(&self) -> f64 {
        self.entry_stderr().iter().copied().fold(0.0, f64::max)
    }
}

fn check_square(rho: &CMatrix, layout: &RegisterLayout) -> Result<()> {
    let d = layout.total_dim();
    if rho.nrows() != d || rho.ncols() != d {
        return Err(LabError::Dims(format!(
            "state is {}x{}, layout wants {d}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    Ok(())
}

/// `(I_side ⊗ U^{⊗q}) ρ (I_side ⊗ U^{⊗q})†` for one Haar `U`.
pub fn haar_conjugate(rho: &CMatrix, layout: &RegisterLayout, u: &CMatrix) -> Result<CMatrix> {
    let targets = layout.twirled();
    let ops: Vec<&CMatrix> = targets.iter().map(|_| u).collect();
    Ok(conjugate_many(rho, &layout.dims(), &targets, &ops)?.0)
}

/// Estimates `E_U[(I_side ⊗ U^{⊗q}) ρ (·)†]` from `samples` Haar draws.
pub fn haar_twirl_mc(
    rho: &CMatrix,
    layout: &RegisterLayout,
    samples: usize,
    seed: u64,
) -> Result<TwirlEstimate> {
    check_square(rho, layout)?;
    let d = layout
        .block_dim()
        .ok_or_else(|| LabError::Dims("layout has no twirled blocks".into()))?;
    let batches = choose_batches(samples, layout.total_dim());
    let sums = batched_sum(samples, batches, seed, streams::TWIRL, |rng| {
        let u = sample_haar_unitary(d, rng)?;
        haar_conjugate(rho, layout, u.matrix())
    })?;
    Ok(TwirlEstimate {
        mean: sums.mean(),
        sums,
    })
}

/// `TD(ρ, twirl(ρ))` with a bootstrap error bar.
pub fn almost_invariance_deficit(
    rho: &CMatrix,
    layout: &RegisterLayout,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    let tw = haar_twirl_mc(rho, layout, samples, seed)?;
    tw.sums
        .bootstrap(DEFAULT_RESAMPLES, seed, |m| trace_distance_raw(rho, m))
}

/// Largest `k` for which the exact twirl enumerates `S_k` (720 terms).
pub const EXACT_TWIRL_MAX_COPIES: usize = 6;

/// Exact `E_U[U^{⊗k} X U^{†⊗k}]` for `X` on `k` registers of dimension `d`.
///
/// The average commutes with every `V^{⊗k}`, so it lies in the span of the
/// permutation operators `P_σ`; matching `Tr(P_τ† ·)` against `X` gives the
/// Gram system `G c = b` with `G_{στ} = Tr(P_σ† P_τ)`. `G` is invertible iff
/// `d >= k` (the `P_σ` are then linearly independent).
pub fn haar_twirl_exact(x: &CMatrix, d: usize, k: usize) -> Result<CMatrix> {
    haar_twirl_exact_side(x, 1, d, k)
}

/// As [`haar_twirl_exact`] with an untouched side system in front:
/// `X` acts on `side ⊗ (C^d)^{⊗k}` and the twirl is `I_side ⊗ U^{⊗k}`. The
/// result is `Σ_σ Y_σ ⊗ P_σ` with `Σ_σ G_{τσ} Y_σ = Tr_k[(I ⊗ P_τ†) X]`.
pub fn haar_twirl_exact_side(x: &CMatrix, side: usize, d: usize, k: usize) -> Result<CMatrix> {
    if k > EXACT_TWIRL_MAX_COPIES {
        return Err(LabError::Infeasible(format!(
            "exact twirl enumerates S_k; k = {k} > {EXACT_TWIRL_MAX_COPIES}"
        )));
    }
    if d < k {
        return Err(LabError::Infeasible(format!(
            "permutation operators are dependent for d = {d} < k = {k}"
        )));
    }
    let block = d
        .checked_pow(k as u32)
        .ok_or_else(|| LabError::Dims("dimension overflow".into()))?;
    let dim = side * block;
    if x.nrows() != dim || x.ncols() != dim {
        return Err(LabError::Dims(format!(
            "operator is {}x{}, want {dim}",
            x.nrows(),
            x.ncols()
        )));
    }
    // maps[σ][col] = row of the single 1 in column `col` of P_σ
    let maps: Vec<Vec<usize>> = PermElement::all(k)
        .iter()
        .map(|sigma| {
            (0..block)
                .map(|col| tuple_index(&sigma.apply(&index_tuple(col, d, k)), d))
                .collect()
        })
        .collect();
    let r = maps.len();
    let gram = CMatrix::from_fn(r, r, |a, b| {
        C64::new(
            maps[a].iter().zip(&maps[b]).filter(|(u, v)| u == v).count() as f64,
            0.0,
        )
    });
    let inv = gram
        .try_inverse()
        .ok_or_else(|| LabError::Invalid("singular permutation Gram matrix".into()))?;
    let z: Vec<CMatrix> = maps
        .iter()
        .map(|map| {
            CMatrix::from_fn(side, side, |a, a2| {
                map.iter()
                    .enumerate()
                    .map(|(col, &row)| x[(a * block + row, a2 * block + col)])
                    .sum()
            })
        })
        .collect();
    let mut out = CMatrix::zeros(dim, dim);
    for (s_idx, map) in maps.iter().enumerate() {
        let mut y = CMatrix::zeros(side, side);
        for (t_idx, zt) in z.iter().enumerate() {
            y += zt * inv[(s_idx, t_idx)];
        }
        for a in 0..side {
            for a2 in 0..side {
                let v = y[(a, a2)];
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                for (col, &row) in map.iter().enumerate() {
                    out[(a * block + row, a2 * block + col)] += v;
                }
            }
        }
    }
    Ok(out)
}

/// Exact counterpart of [`haar_orthogonal_columns_vs_iid`]: the orthogonal
/// side is the exact twirl of `⊗_j |j><j|^{⊗t}` and the iid side is
/// `(Π_sym / dim Sym^t)^{⊗s}`.
pub fn haar_orthogonal_columns_vs_iid_exact(
    n: usize,
    s: usize,
    t: usize,
) -> Result<(CMatrix, CMatrix)> {
    let d = 1usize << n;
    if s > d {
        return Err(LabError::Infeasible(format!(
            "{s} orthogonal columns need s <= 2^n = {d}"
        )));
    }
    RegisterLayout::blocks(s * t, d)?;
    let mut x = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for j in 0..s {
        x = kron(&x, &tensor_power(&outer(&basis_vector(d, j)), t));
    }
    let orthogonal = haar_twirl_exact(&x, d, s * t)?;
    let iid = tensor_power(&sym_state(d, t)?, s);
    Ok((orthogonal, iid))
}

/// Orthogonal columns versus independent Haar states.
#[derive(Clone, Debug)]
pub struct OrthVsIid {
    /// `E_U ⊗_j (U|j><j|U†)^{⊗t}`.
    pub orthogonal: CMatrix,
    /// `E ⊗_j (|ψ_j><ψ_j|)^{⊗t}` with independent Haar `ψ_j`.
    pub iid: CMatrix,
    pub td: Estimate,
}

/// Compares `s` columns of one Haar unitary with `s` independent Haar
/// states, `t` copies each, on `n` qubits per copy. The two sides are
/// coupled: the first iid state reuses the first column, so at `s = 1` the
/// samples coincide and the distance is exactly zero.
pub fn haar_orthogonal_columns_vs_iid(
    n: usize,
    s: usize,
    t: usize,
    samples: usize,
    seed: u64,
) -> Result<OrthVsIid> {
    let d = 1usize << n;
    if s > d {
        return Err(LabError::Infeasible(format!(
            "{s} orthogonal columns need s <= 2^n = {d}"
        )));
    }
    // validates the cap on the s*t registers
    let layout = RegisterLayout::blocks(s * t, d)?;
    let dim = layout.total_dim();
    let power = |v: &CVector| -> CVector {
        let mut out = CVector::from_element(1, C64::new(1.0, 0.0));
        for _ in 0..t {
            out = kron_vec(&out, v);
        }
        out
    };
    let batches = choose_batches(samples, 2 * dim);
    let sums = batched_sum(samples, batches, seed, streams::TWIRL, |rng| {
        let u = sample_haar_unitary(d, rng)?;
        let mut orth = CVector::from_element(1, C64::new(1.0, 0.0));
        let mut iid = orth.clone();
        for j in 0..s {
            let col = u.matrix() * basis_vector(d, j);
            orth = kron_vec(&orth, &power(&col));
            let fresh = if j == 0 {
                col
            } else {
                sample_haar_unitary(d, rng)?.matrix().column(0).into_owned()
            };
            iid = kron_vec(&iid, &power(&fresh));
        }
        let mut both = CMatrix::zeros(2 * dim, dim);
        both.rows_mut(0, dim).copy_from(&outer(&orth));
        both.rows_mut(dim, dim).copy_from(&outer(&iid));
        Ok(both)
    })?;
    let td = sums.bootstrap(DEFAULT_RESAMPLES, seed, |m| {
        let a = m.rows(0, dim).into_owned();
        let b = m.rows(dim, dim).into_owned();
        trace_distance_raw(&a, &b)
    })?;
    let mean = sums.mean();
    Ok(OrthVsIid {
        orthogonal: mean.rows(0, dim).into_owned(),
        iid: mean.rows(dim, dim).into_owned(),
        td,
    })
}

/// `σ^{⊗k}` as a dense matrix.
pub fn tensor_power(sigma: &CMatrix, k: usize) -> CMatrix {
    let mut out = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for _ in 0..k {
        out = kron(&out, sigma);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{max_abs_diff, partial_trace};
    use crate::symtypes::{permutation_operator, sym_state, PermElement};

    #[test]
    fn maximally_mixed_is_fixed() {
        let layout = RegisterLayout::side_then_blocks(2, 2, 2).unwrap();
        let rho = CMatrix::identity(8, 8) / C64::new(8.0, 0.0);
        let tw = haar_twirl_mc(&rho, &layout, 64, 1).unwrap();
        assert!(max_abs_diff(&tw.mean, &rho) < 1e-12);
    }

    #[test]
    fn single_block_goes_to_identity() {
        let layout = RegisterLayout::blocks(1, 4).unwrap();
        let mut rho = CMatrix::zeros(4, 4);
        rho[(0, 0)] = C64::new(1.0, 0.0);
        let tw = haar_twirl_mc(&rho, &layout, 4096, 2).unwrap();
        let want = CMatrix::identity(4, 4) / C64::new(4.0, 0.0);
        let se = tw.max_entry_stderr();
        assert!(se > 0.0);
        assert!(max_abs_diff(&tw.mean, &want) < 4.0 * se + 1e-3);
    }

    #[test]
    fn permutation_mixture_is_invariant() {
        let d = 2;
        let swap = permutation_operator(&PermElement::new(vec![1, 0]).unwrap(), d).unwrap();
        let rho = (CMatrix::identity(4, 4) * C64::new(0.7, 0.0) + swap * C64::new(0.3, 0.0))
            / C64::new(2.8 + 0.6, 0.0);
        let layout = RegisterLayout::blocks(2, d).unwrap();
        let tw = haar_twirl_mc(&rho, &layout, 2048, 3).unwrap();
        assert!(max_abs_diff(&tw.mean, &rho) < 1e-12);
    }

    #[test]
    fn twirl_of_basis_pair_is_sym_state_and_idempotent() {
        let layout = RegisterLayout::blocks(2, 2).unwrap();
        let mut rho = CMatrix::zeros(4, 4);
        rho[(0, 0)] = C64::new(1.0, 0.0);
        let tw = haar_twirl_mc(&rho, &layout, 4096, 4).unwrap();
        let want = sym_state(2, 2).unwrap();
        assert!(max_abs_diff(&tw.mean, &want) < 5.0 * tw.max_entry_stderr() + 1e-3);
        let again = haar_twirl_mc(&tw.mean, &layout, 1024, 5).unwrap();
        assert!(
            max_abs_diff(&again.mean, &tw.mean)
                < 5.0 * (tw.max_entry_stderr() + again.max_entry_stderr())
        );
    }

    #[test]
    fn side_register_untouched() {
        let layout = RegisterLayout::side_then_blocks(2, 1, 2).unwrap();
        let mut rho = CMatrix::zeros(4, 4);
        rho[(0, 0)] = C64::new(1.0, 0.0);
        let tw = haar_twirl_mc(&rho, &layout, 256, 6).unwrap();
        let side = partial_trace(&tw.mean, &[2, 2], &[0]).unwrap();
        assert!((side[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deficit_of_maximally_mixed_is_noise_free() {
        let layout = RegisterLayout::blocks(2, 4).unwrap();
        let rho = CMatrix::identity(16, 16) / C64::new(16.0, 0.0);
        let est = almost_invariance_deficit(&rho, &layout, 128, 7).unwrap();
        assert!(est.value < 1e-12);
    }

    #[test]
    fn orth_vs_iid_examples() {
        let one = haar_orthogonal_columns_vs_iid(2, 1, 2, 256, 1).unwrap();
        assert!(one.td.value < 1e-12 && one.td.stderr < 1e-12);
        // t = 1, s = 2: E[U|0><0|U† ⊗ U|1><1|U†] = (I - F/d)/(d²-1)
        let d = 4usize;
        let two = haar_orthogonal_columns_vs_iid(2, 2, 1, 4096, 2).unwrap();
        let f = permutation_operator(&PermElement::new(vec![1, 0]).unwrap(), d).unwrap();
        let want = (CMatrix::identity(d * d, d * d) - f / C64::new(d as f64, 0.0))
            / C64::new((d * d - 1) as f64, 0.0);
        assert!(max_abs_diff(&two.orthogonal, &want) < 0.01);
        assert!(
            max_abs_diff(
                &two.iid,
                &tensor_power(&(CMatrix::identity(d, d) / C64::new(d as f64, 0.0)), 2)
            ) < 0.01
        );
        // against I/d² the difference has eigenvalues -1/(d²(d+1)) on the
        // symmetric part and 1/(d²(d-1)) on the antisymmetric part: TD = 1/(2d)
        assert!(
            (two.td.value - 0.125).abs() < 0.05 + 3.0 * two.td.stderr,
            "{:?}",
            two.td
        );
    }

    #[test]
    fn exact_twirl_matches_monte_carlo() {
        let d = 2;
        let layout = RegisterLayout::blocks(2, d).unwrap();
        let mut x = CMatrix::zeros(4, 4);
        x[(1, 1)] = C64::new(0.6, 0.0);
        x[(2, 2)] = C64::new(0.4, 0.0);
        x[(1, 2)] = C64::new(0.1, 0.2);
        x[(2, 1)] = C64::new(0.1, -0.2);
        let exact = haar_twirl_exact(&x, d, 2).unwrap();
        let mc = haar_twirl_mc(&x, &layout, 4096, 8).unwrap();
        assert!(max_abs_diff(&exact, &mc.mean) < 5.0 * mc.max_entry_stderr() + 1e-3);
        // idempotent and trace preserving
        assert!(max_abs_diff(&haar_twirl_exact(&exact, d, 2).unwrap(), &exact) < 1e-12);
        assert!((exact.trace() - x.trace()).norm() < 1e-12);
    }

    #[test]
    fn exact_orth_vs_iid_closed_form() {
        let d = 4usize;
        let (orth, iid) = haar_orthogonal_columns_vs_iid_exact(2, 2, 1).unwrap();
        let f = permutation_operator(&PermElement::new(vec![1, 0]).unwrap(), d).unwrap();
        let want = (CMatrix::identity(d * d, d * d) - f / C64::new(d as f64, 0.0))
            / C64::new((d * d - 1) as f64, 0.0);
        assert!(max_abs_diff(&orth, &want) < 1e-12);
        assert!(
            max_abs_diff(
                &iid,
                &(CMatrix::identity(d * d, d * d) / C64::new((d * d) as f64, 0.0))
            ) < 1e-12
        );
        assert!(haar_twirl_exact(&orth, 1, 2).is_err());
    }
}
