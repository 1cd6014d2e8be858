//! Expectation channels over the PRI key `(f, π)`.
//!
//! With `f` uniform over `[N] → Z_p` and `q < p`, averaging the phases keeps
//! exactly the matrix entries whose twirled blocks carry equal multisets.
//! Averaging over uniform `π` then only sees the equality pattern of the
//! `2q` block values of each entry, so it reduces to spreading each
//! pattern's total weight evenly over its `(N)_k` injective relabelings.

use std::collections::HashMap;

use itertools::Itertools;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::haar::TwirlEstimate;
use crate::mc::{batched_sum, choose_batches, BatchSums};
use crate::qcore::linalg::{conjugate_many, kron, plus_column, CMatrix, C64};
use crate::qcore::RegisterLayout;
use crate::rng::streams;
use crate::symtypes::falling_factorial;

use super::construction::pri_apply_matrix;
use super::spec::PriSpec;

/// Largest alphabet the exact permutation twirl accepts.
pub const PERM_TWIRL_MAX_ALPHABET: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PermTwirlMode {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

/// Per-segment values of a flat index, first segment most significant.
fn decode(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
}

fn encode(vals: &[usize], dims: &[usize]) -> usize {
    vals.iter().zip(dims).fold(0, |acc, (&v, &d)| acc * d + v)
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

/// Multiset id of the twirled block values for every flat index.
fn block_multiset_ids(layout: &RegisterLayout) -> Vec<usize> {
    let dims = layout.dims();
    let tw = layout.twirled();
    let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut vals = vec![0usize; dims.len()];
    (0..layout.total_dim())
        .map(|i| {
            decode(i, &dims, &mut vals);
            let mut key: Vec<usize> = tw.iter().map(|&k| vals[k]).collect();
            key.sort_unstable();
            let next = ids.len();
            *ids.entry(key).or_insert(next)
        })
        .collect()
}

/// `E_f[(I ⊗ O_f^{⊗q}) ρ (·)†]` for uniform `f: [N] → Z_p`, as a mask.
pub fn phase_twirl_exact(rho: &CMatrix, layout: &RegisterLayout, p: u64) -> Result<CMatrix> {
    check_square(rho, layout)?;
    let q = layout.q();
    if q as u64 >= p {
        return Err(LabError::Precondition(format!(
            "phase twirl needs q < p, got q = {q}, p = {p}"
        )));
    }
    let ids = block_multiset_ids(layout);
    let d = layout.total_dim();
    Ok(CMatrix::from_fn(d, d, |i, j| {
        if ids[i] == ids[j] {
            rho[(i, j)]
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// First-occurrence relabeling of `vals`; returns the pattern and label count.
fn canonical_pattern(vals: &[usize]) -> (Vec<u8>, usize) {
    let mut seen: Vec<usize> = Vec::with_capacity(vals.len());
    let pat = vals
        .iter()
        .map(|v| match seen.iter().position(|s| s == v) {
            Some(k) => k as u8,
            None => {
                seen.push(*v);
                (seen.len() - 1) as u8
            }
        })
        .collect();
    (pat, seen.len())
}

/// `E_π[(I ⊗ O_π^{⊗q}) ρ (·)†]` for uniform `π ∈ S_N`, `N` the block dimension.
pub fn perm_twirl(
    rho: &CMatrix,
    layout: &RegisterLayout,
    mode: PermTwirlMode,
) -> Result<TwirlEstimate> {
    check_square(rho, layout)?;
    let big_n = layout
        .block_dim()
        .ok_or_else(|| LabError::Dims("layout has no twirled blocks".into()))?;
    match mode {
        PermTwirlMode::Exact => {
            let mean = perm_twirl_exact(rho, layout)?;
            let sums = BatchSums {
                sums: vec![mean.clone()],
                counts: vec![1],
            };
            Ok(TwirlEstimate { mean, sums })
        }
        PermTwirlMode::MonteCarlo { samples, seed } => {
            let dims = layout.dims();
            let tw = layout.twirled();
            let d = layout.total_dim();
            let batches = choose_batches(samples, d);
            let sums = batched_sum(samples, batches, seed, streams::PERM_TWIRL, |rng| {
                let mut pi: Vec<usize> = (0..big_n).collect();
                pi.shuffle(rng);
                let mut vals = vec![0usize; dims.len()];
                let map: Vec<usize> = (0..d)
                    .map(|i| {
                        decode(i, &dims, &mut vals);
                        for &k in &tw {
                            vals[k] = pi[vals[k]];
                        }
                        encode(&vals, &dims)
                    })
                    .collect();
                let mut out = CMatrix::zeros(d, d);
                for j in 0..d {
                    for i in 0..d {
                        out[(map[i], map[j])] = rho[(i, j)];
                    }
                }
                Ok(out)
            })?;
            Ok(TwirlEstimate {
                mean: sums.mean(),
                sums,
            })
        }
    }
}

fn perm_twirl_exact(rho: &CMatrix, layout: &RegisterLayout) -> Result<CMatrix> {
    let big_n = layout.block_dim().expect("checked by caller");
    if big_n > PERM_TWIRL_MAX_ALPHABET {
        return Err(LabError::Cap {
            needed: big_n,
            cap: PERM_TWIRL_MAX_ALPHABET,
        });
    }
    let dims = layout.dims();
    let tw = layout.twirled();
    let side = layout.side();
    let q = tw.len();
    let d = layout.total_dim();

    // total weight per (side values of row, side values of column, pattern)
    type Key = (Vec<usize>, Vec<usize>, Vec<u8>);
    let mut weights: HashMap<Key, (C64, usize)> = HashMap::new();
    let mut vi = vec![0usize; dims.len()];
    let mut vj = vec![0usize; dims.len()];
    let mut both = vec![0usize; 2 * q];
    for j in 0..d {
        decode(j, &dims, &mut vj);
        for i in 0..d {
            let x = rho[(i, j)];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            decode(i, &dims, &mut vi);
            for (slot, &k) in tw.iter().enumerate() {
                both[slot] = vi[k];
                both[q + slot] = vj[k];
            }
            let (pat, k) = canonical_pattern(&both);
            let key = (
                side.iter().map(|&s| vi[s]).collect(),
                side.iter().map(|&s| vj[s]).collect(),
                pat,
            );
            weights.entry(key).or_insert((C64::new(0.0, 0.0), k)).0 += x;
        }
    }

    let mut out = CMatrix::zeros(d, d);
    let mut keys: Vec<&Key> = weights.keys().collect();
    keys.sort();
    for key in keys {
        let (total, k) = weights[key];
        let (side_i, side_j, pat) = key;
        let w = total / C64::new(falling_factorial(big_n, k), 0.0);
        for labels in (0..big_n).permutations(k) {
            for (slot, &s) in side.iter().enumerate() {
                vi[s] = side_i[slot];
                vj[s] = side_j[slot];
            }
            for (slot, &t) in tw.iter().enumerate() {
                vi[t] = labels[pat[slot] as usize];
                vj[t] = labels[pat[q + slot] as usize];
            }
            out[(encode(&vi, &dims), encode(&vj, &dims))] += w;
        }
    }
    Ok(out)
}

/// `E_{(f,π)}[(I ⊗ G^{⊗q}) ρ (·)†]`: append `|+^m>` to each block, phase
/// twirl exactly, then permutation twirl. The input layout's blocks hold
/// `n` qubits each; the output blocks hold `n + m`.
pub fn g_twirl(
    query: &CMatrix,
    layout: &RegisterLayout,
    m: usize,
    p: u64,
    mode: PermTwirlMode,
) -> Result<TwirlEstimate> {
    check_square(query, layout)?;
    let d_in = layout
        .block_dim()
        .ok_or_else(|| LabError::Dims("layout has no twirled blocks".into()))?;
    let out_layout = layout.with_block_dim(d_in << m)?;
    let append = kron(&CMatrix::identity(d_in, d_in), &plus_column(m));
    let targets = layout.twirled();
    let ops: Vec<&CMatrix> = targets.iter().map(|_| &append).collect();
    let appended = conjugate_many(query, &layout.dims(), &targets, &ops)?.0;
    let phased = phase_twirl_exact(&appended, &out_layout, p)?;
    perm_twirl(&phased, &out_layout, mode)
}

/// Direct average of `(I ⊗ G^{⊗q}) ρ (·)†` over sampled keys. `keyed`
/// selects the seeded stand-in backends instead of explicit uniform tables.
#[allow(clippy::too_many_arguments)]
pub fn pri_channel_mc(
    query: &CMatrix,
    layout: &RegisterLayout,
    n: usize,
    m: usize,
    p: u64,
    samples: usize,
    seed: u64,
    keyed: bool,
) -> Result<TwirlEstimate> {
    check_square(query, layout)?;
    if layout.block_dim() != Some(1usize << n) {
        return Err(LabError::Dims("layout blocks must hold n qubits".into()));
    }
    let q = layout.q();
    let side = layout.total_dim() / (1usize << (n * q));
    let ell = side.trailing_zeros() as usize;
    if layout.side().len() > 1 || (side > 1 && layout.side() != vec![0]) {
        return Err(LabError::Dims(
            "direct PRI averaging needs a single leading side register".into(),
        ));
    }
    let out_dim = layout.with_block_dim(1usize << (n + m))?.total_dim();
    let batches = choose_batches(samples, out_dim);
    let sums = batched_sum(samples, batches, seed, streams::KEYS, |rng| {
        let spec = if keyed {
            use rand::Rng;
            PriSpec::keyed(n, m, p, rng.random(), rng.random())?
        } else {
            PriSpec::sample(n, m, p, rng)?
        };
        pri_apply_matrix(&spec, query, q, ell)
    })?;
    Ok(TwirlEstimate {
        mean: sums.mean(),
        sums,
    })
}
