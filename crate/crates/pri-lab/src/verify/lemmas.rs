//! Measurement routines, one per experiment. Each returns the measured
//! trace distance (or max-abs entry) with its error bar and a free-form
//! details object; fitting and verdicts live in the runner.

use itertools::Itertools;
use serde_json::{json, Value};

use crate::error::{LabError, Result};
use crate::haar::twirl::tensor_power;
use crate::haar::{
    almost_invariance_deficit, haar_orthogonal_columns_vs_iid,
    haar_orthogonal_columns_vs_iid_exact, haar_twirl_exact_side, sample_haar_isometry,
    sample_haar_state, EXACT_TWIRL_MAX_COPIES,
};
use crate::mc::{batched_sum, choose_batches, BatchSums, Estimate, DEFAULT_RESAMPLES};
use crate::pri::{g_twirl, PermTwirlMode, PERM_TWIRL_MAX_ALPHABET};
use crate::qcore::dims::ceil_log2;
use crate::qcore::linalg::{
    conjugate_many, kron, kron_vec, max_abs, outer, permute_subsystems, CMatrix, CVector, C64,
};
use crate::qcore::ops::trace_distance_raw;
use crate::qcore::{PureState, RegisterLayout, Segment, SegmentKind};
use crate::rng::{streams, substream};
use crate::symtypes::{
    binomial, falling_factorial, family_projector, index_tuple, rho_uni_matrix, sym_state, type_of,
    type_state_vec, RhoUniMode, SymBasis, TypeVector,
};

use super::report::ExperimentConfig;

/// Largest dense operator an experiment may build (2^12).
pub const MAX_WORK_DIM: usize = 4096;
const HAAR_INPUTS: usize = 5;
/// Leakage out of the symmetric subspace tolerated before compression is refused.
const LEAKAGE_TOL: f64 = 1e-9;
/// Cap on enumerated outer-product pairs; larger sets are subsampled.
const MAX_OUTER_PAIRS: usize = 512;

#[derive(Clone, Debug)]
pub struct Measurement {
    pub estimate: Estimate,
    pub details: Value,
}

fn check_work(dim: usize) -> Result<()> {
    if dim > MAX_WORK_DIM {
        return Err(LabError::Cap {
            needed: ceil_log2(dim),
            cap: ceil_log2(MAX_WORK_DIM),
        });
    }
    Ok(())
}

fn pow_dim(base: usize, exp: usize) -> Result<usize> {
    base.checked_pow(exp as u32)
        .ok_or_else(|| LabError::Dims("dimension overflow".into()))
}

fn perm_mode(big_n: usize, samples: usize, seed: u64) -> PermTwirlMode {
    if big_n <= PERM_TWIRL_MAX_ALPHABET {
        PermTwirlMode::Exact
    } else {
        PermTwirlMode::MonteCarlo { samples, seed }
    }
}

fn compress_checked(basis: &SymBasis, x: &CMatrix) -> Result<CMatrix> {
    let c = basis.compress(x)?;
    let leak = (x.trace() - c.trace()).norm();
    if leak > LEAKAGE_TOL {
        return Err(LabError::Invalid(format!(
            "operator leaves the symmetric subspace (leakage {leak:.3e})"
        )));
    }
    Ok(c)
}

/// TD of two operators supported on the subspace spanned by `basis`.
fn sym_td(basis: &SymBasis, a: &CMatrix, b: &CMatrix) -> Result<f64> {
    trace_distance_raw(&compress_checked(basis, a)?, &compress_checked(basis, b)?)
}

/// TD between a (possibly sampled) channel output and an exact reference.
/// Single-batch sums are exact; otherwise the batches are compressed and
/// bootstrapped.
fn sums_td(sums: &BatchSums, basis: &SymBasis, reference: &CMatrix, seed: u64) -> Result<Estimate> {
    let r = compress_checked(basis, reference)?;
    if sums.sums.len() == 1 {
        return Ok(Estimate::exact(trace_distance_raw(
            &compress_checked(basis, &sums.mean())?,
            &r,
        )?));
    }
    let small = BatchSums {
        sums: sums
            .sums
            .iter()
            .map(|s| basis.compress(s))
            .collect::<Result<_>>()?,
        counts: sums.counts.clone(),
    };
    compress_checked(basis, &sums.mean())?;
    small.bootstrap(DEFAULT_RESAMPLES, seed, |m| trace_distance_raw(m, &r))
}

fn product_state(parts: &[CMatrix]) -> CMatrix {
    parts
        .iter()
        .fold(CMatrix::from_element(1, 1, C64::new(1.0, 0.0)), |acc, p| {
            kron(&acc, p)
        })
}

/// `|φ>^{⊗k}`.
fn vec_power(v: &CVector, k: usize) -> CVector {
    (0..k).fold(CVector::from_element(1, C64::new(1.0, 0.0)), |acc, _| {
        kron_vec(&acc, v)
    })
}

fn reference_mode(cfg: &ExperimentConfig, seed: u64) -> RhoUniMode {
    RhoUniMode::Auto {
        samples: cfg.samples,
        seed,
    }
}

/// Twirled distinct-type family `{i: t}` (each type one repeated element) vs ρ_uni.
pub fn tdis_info(cfg: &ExperimentConfig, seed: u64) -> Result<Measurement> {
    let (n, m, s, t) = (cfg.n, cfg.m, cfg.s, cfg.t);
    let d_in = 1usize << n;
    let big_n = 1usize << (n + m);
    if s > d_in {
        return Err(LabError::Infeasible(format!(
            "distinct family needs s = {s} <= 2^n = {d_in}"
        )));
    }
    check_work(pow_dim(big_n, s * t)?)?;
    let fam: Vec<TypeVector> = (0..s)
        .map(|i| TypeVector::new(d_in, &[(i, t)]))
        .collect::<Result<_>>()?;
    let input = family_projector(&fam)?;
    let layout = RegisterLayout::blocks(s * t, d_in)?;
    let p = cfg.modulus(s * t);
    let out = g_twirl(&input, &layout, m, p, perm_mode(big_n, cfg.samples, seed))?;
    let reference = rho_uni_matrix(big_n, s, t, reference_mode(cfg, seed))?;
    let basis = SymBasis::new(&vec![(big_n, t); s])?;
    let estimate = sums_td(&out.sums, &basis, &reference, seed)?;
    Ok(Measurement {
        estimate,
        details: json!({ "input_family": "repeated", "p": p, "compressed_rank": basis.rank() }),
    })
}

/// Max-abs entry of the twirl of every cross-type outer product and every
/// distinct-type `|type_T><type_T'|`; equal-type pairs are a nonzero control.
pub fn outer_comp_query(cfg: &ExperimentConfig, seed: u64) -> Result<Measurement> {
    let (n, m, q) = (cfg.n, cfg.m, cfg.q);
    let d_in = 1usize << n;
    let big_n = 1usize << (n + m);
    if big_n > PERM_TWIRL_MAX_ALPHABET {
        return Err(LabError::Cap {
            needed: n + m,
            cap: ceil_log2(PERM_TWIRL_MAX_ALPHABET),
        });
    }
    check_work(pow_dim(big_n, q)?)?;
    let p = cfg.modulus(q);
    let layout = RegisterLayout::blocks(q, d_in)?;
    let dim = layout.total_dim();
    let twirl_max = |x: &CMatrix| -> Result<f64> {
        Ok(max_abs(
            &g_twirl(x, &layout, m, p, PermTwirlMode::Exact)?.mean,
        ))
    };
    let ty = |i: usize| type_of(&index_tuple(i, d_in, q), d_in);

    let mut cross = Vec::new();
    let mut same = Vec::new();
    for (i, j) in (0..dim).cartesian_product(0..dim) {
        if ty(i)? == ty(j)? {
            same.push((i, j));
        } else {
            cross.push((i, j));
        }
    }
    let cross_total = cross.len();
    if cross.len() > MAX_OUTER_PAIRS {
        let mut rng = substream(seed, streams::INPUTS, 0);
        cross = rand::seq::index::sample(&mut rng, cross.len(), MAX_OUTER_PAIRS)
            .into_iter()
            .map(|k| cross[k])
            .collect();
    }
    let unit = |i: usize, j: usize| {
        let mut x = CMatrix::zeros(dim, dim);
        x[(i, j)] = C64::new(1.0, 0.0);
        x
    };
    let mut cross_max = 0f64;
    for &(i, j) in &cross {
        cross_max = cross_max.max(twirl_max(&unit(i, j))?);
    }
    let mut control = 0f64;
    for &(i, j) in same.iter().take(MAX_OUTER_PAIRS) {
        control = control.max(twirl_max(&unit(i, j))?);
    }

    let types: Vec<TypeVector> = (0..d_in)
        .combinations_with_replacement(q)
        .map(|v| type_of(&v, d_in))
        .collect::<Result<_>>()?;
    let states: Vec<CVector> = types.iter().map(type_state_vec).collect::<Result<_>>()?;
    let mut type_max = 0f64;
    let mut type_pairs = 0usize;
    for (a, b) in (0..types.len())
        .cartesian_product(0..types.len())
        .filter(|(a, b)| a != b)
        .take(MAX_OUTER_PAIRS)
    {
        type_max = type_max.max(twirl_max(&(&states[a] * states[b].adjoint()))?);
        type_pairs += 1;
    }
    Ok(Measurement {
        estimate: Estimate::exact(cross_max.max(type_max)),
        details: json!({
            "p": p,
            "cross_pairs": cross.len(),
            "cross_pairs_total": cross_total,
            "cross_type_max_abs": cross_max,
            "type_outer_pairs": type_pairs,
            "type_outer_max_abs": type_max,
            "equal_type_control_max_abs": control,
        }),
    })
}

/// Worst TD over `|+^n>` and seeded Haar states, `q` copies each.
pub fn multicopy_info(cfg: &ExperimentConfig, seed: u64) -> Result<Measurement> {
    let (n, m, q) = (cfg.n, cfg.m, cfg.q);
    let d_in = 1usize << n;
    let big_n = 1usize << (n + m);
    check_work(pow_dim(big_n, q)?)?;
    let layout = RegisterLayout::blocks(q, d_in)?;
    let p = cfg.modulus(q);
    let reference = rho_uni_matrix(big_n, 1, q, reference_mode(cfg, seed))?;
    let basis = SymBasis::new(&[(big_n, q)])?;
    let mut rng = substream(seed, streams::INPUTS, 0);
    let mut inputs: Vec<(String, PureState)> = vec![("plus".into(), PureState::plus(n)?)];
    for k in 0..HAAR_INPUTS {
        inputs.push((format!("haar_{k}"), sample_haar_state(d_in, &mut rng)?));
    }
    let mut worst = Estimate::exact(0.0);
    let mut per_input = serde_json::Map::new();
    for (k, (label, phi)) in inputs.iter().enumerate() {
        let x = outer(&vec_power(phi.amplitudes(), q));
        let out = g_twirl(
            &x,
            &layout,
            m,
            p,
            perm_mode(big_n, cfg.samples, seed.wrapping_add(k as u64)),
        )?;
        let est = sums_td(&out.sums, &basis, &reference, seed)?;
        per_input.insert(label.clone(), json!(est.value));
        if est.value > worst.value {
            worst = est;
        }
    }
    Ok(Measurement {
        estimate: worst,
        details: json!({ "p": p, "per_input_td": per_input }),
    })
}

/// Per family member: `t` side registers then `t` twirled registers.
fn interleaved_layout(s: usize, t: usize, d_in: usize) -> Result<RegisterLayout> {
    let mut segs = Vec::with_capacity(2 * s * t);
    for _ in 0..s {
        segs.extend((0..t).map(|_| Segment {
            kind: SegmentKind::Side,
            dim: d_in,
        }));
        segs.extend((0..t).map(|_| Segment {
            kind: SegmentKind::Twirled,
            dim: d_in,
        }));
    }
    RegisterLayout::new(segs)
}

/// Reorders an interleaved output to all side registers first.
fn group_sides(x: &CMatrix, s: usize, t: usize, d_side: usize, d_tw: usize) -> Result<CMatrix> {
    let dims: Vec<usize> = (0..s)
        .flat_map(|_| std::iter::repeat_n(d_side, t).chain(std::iter::repeat_n(d_tw, t)))
        .collect();
    let order: Vec<usize> = (0..s)
        .flat_map(|i| (0..t).map(move |k| 2 * t * i + k))
        .chain((0..s).flat_map(|i| (0..t).map(move |k| 2 * t * i + t + k)))
        .collect();
    permute_subsystems(x, &dims, &order)
}

fn grouped_basis(s: usize, t: usize, d_side: usize, d_tw: usize) -> Result<SymBasis> {
    let groups: Vec<(usize, usize)> = std::iter::repeat_n((d_side, t), s)
        .chain(std::iter::repeat_n((d_tw, t), s))
        .collect();
    SymBasis::new(&groups)
}

/// Unique `2t`-types `T_i = {2ti, ..., 2ti + 2t - 1}`; the first `t`
/// registers of each are side information.
pub fn tuni_info(cfg: &ExperimentConfig, seed: u64) -> Result<Measurement> {
    let (n, m, s, t) = (cfg.n, cfg.m, cfg.s, cfg.t);
    let d_in = 1usize << n;
    let big_n = 1usize << (n + m);
    if 2 * s * t > d_in {
        return Err(LabError::Infeasible(format!(
            "unique 2t-types need 2st = {} <= 2^n = {d_in}",
            2 * s * t
        )));
    }
    check_work(pow_dim(d_in * big_n, s * t)?)?;
    let sets: Vec<Vec<usize>> = (0..s)
        .map(|i| (2 * t * i..2 * t * (i + 1)).collect())
        .collect();
    let fam: Vec<TypeVector> = sets
        .iter()
        .map(|set| TypeVector::from_set(d_in, set))
        .collect::<Result<_>>()?;
    let input = family_projector(&fam)?;
    let layout = interleaved_layout(s, t, d_in)?;
    let p = cfg.modulus(s * t);
    let out = g_twirl(&input, &layout, m, p, perm_mode(big_n, cfg.samples, seed))?;
    let grouped = BatchSums {
        sums: out
            .sums
            .sums
            .iter()
            .map(|x| group_sides(x, s, t, d_in, big_n))
            .collect::<Result<_>>()?,
        counts: out.sums.counts.clone(),
    };
    // σ_i: uniform over the size-t subsets of T_i
    let sigma_parts: Vec<CMatrix> = sets
        .iter()
        .map(|set| {
            let subs: Vec<Vec<usize>> = set.iter().copied().combinations(t).collect();
            let w = C64::new(1.0 / subs.len() as f64, 0.0);
            subs.iter().try_fold(
                CMatrix::zeros(pow_dim(d_in, t)?, pow_dim(d_in, t)?),
                |acc, sub| {
                    let v = type_state_vec(&TypeVector::from_set(d_in, sub)?)?;
                    Ok::<_, LabError>(acc + outer(&v) * w)
                },
            )
        })
        .collect::<Result<_>>()?;
    let reference = kron(
        &product_state(&sigma_parts),
        &rho_uni_matrix(big_n, s, t, reference_mode(cfg, seed))?,
    );
    let basis = grouped_basis(s, t, d_in, big_n)?;
    let estimate = sums_td(&grouped, &basis, &reference, seed)?;
    Ok(Measurement {
        estimate,
        details: json!({ "p": p, "family": sets, "compressed_rank": basis.rank() }),
    })
}

/// Haar inputs `|ϑ_i>^{⊗2t}` with the last `t` copies queried. The input
/// mixture is sampled; the key average is exact.
pub fn haar_info(cfg: &ExperimentConfig, seed: u64) -> Result<Measurement> {
    let (n, m, s, t) = (cfg.n, cfg.m, cfg.s, cfg.t);
    let d_in = 1usize << n;
    let big_n = 1usize << (n + m);
    if s * t > d_in {
        return Err(LabError::Infeasible(format!(
            "reference needs s*t = {} <= 2^n = {d_in}",
            s * t
        )));
    }
    if big_n > PERM_TWIRL_MAX_ALPHABET {
        return Err(LabError::Cap {
            needed: n + m,
            cap: ceil_log2(PERM_TWIRL_MAX_ALPHABET),
        });
    }
    check_work(pow_dim(d_in * big_n, s * t)?)?;
    let layout = interleaved_layout(s, t, d_in)?;
    let p = cfg.modulus(s * t);
    let basis = grouped_basis(s, t, d_in, big_n)?;
    let channel = |x: &CMatrix| -> Result<CMatrix> {
        let out = g_twirl(x, &layout, m, p, PermTwirlMode::Exact)?.mean;
        group_sides(&out, s, t, d_in, big_n)
    };
    let reference = kron(
        &rho_uni_matrix(d_in, s, t, reference_mode(cfg, seed))?,
        &rho_uni_matrix(big_n, s, t, reference_mode(cfg, seed))?,
    );
    let ref_c = compress_checked(&basis, &reference)?;

    let in_dim = layout.total_dim();
    let inputs = batched_sum(
        cfg.samples,
        choose_batches(cfg.samples, in_dim),
        seed,
        streams::INPUTS,
        |rng| {
            let mut v = CVector::from_element(1, C64::new(1.0, 0.0));
            for _ in 0..s {
                v = kron_vec(
                    &v,
                    &vec_power(sample_haar_state(d_in, rng)?.amplitudes(), 2 * t),
                );
            }
            Ok(outer(&v))
        },
    )?;
    // the channel is linear, so it can act on batch sums directly
    let outputs = BatchSums {
        sums: inputs
            .sums
            .iter()
            .map(|x| basis.compress(&channel(x)?))
            .collect::<Result<_>>()?,
        counts: inputs.counts.clone(),
    };
    let estimate = outputs.bootstrap(DEFAULT_RESAMPLES, seed, |x| trace_distance_raw(x, &ref_c))?;

    // exact counterparts: averaged Haar input, and the unique-type hybrid
    let haar_avg = tensor_power(&sym_state(d_in, 2 * t)?, s);
    let exact_td = trace_distance_raw(&compress_checked(&basis, &channel(&haar_avg)?)?, &ref_c)?;
    let (h12, h23) = if 2 * s * t <= d_in {
        let uni = rho_uni_matrix(d_in, s, 2 * t, reference_mode(cfg, seed))?;
        let h12 = trace_distance_raw(&uni, &haar_avg)?;
        let h23 = trace_distance_raw(&compress_checked(&basis, &channel(&uni)?)?, &ref_c)?;
        (Some(h12), Some(h23))
    } else {
        (None, None)
    };
    Ok(Measurement {
        estimate,
        details: json!({
            "p": p,
            "exact_input_td": exact_td,
            "hybrid_1_2_input_td": h12,
            "hybrid_2_3_td": h23,
            "compressed_rank": basis.rank(),
        }),
    })
}

/// Exact `TD(ρ_uni, ⊗ Π_sym/Tr)`.
pub fn tuni_haar_dis(cfg: &ExperimentConfig, seed: u64) -> Result<Measurement> {
    let (s, t) = (cfg.s, cfg.t);
    let big_n = 1usize << (cfg.n + cfg.m);
    check_work(pow_dim(big_n, s * t)?)?;
    let uni = rho_uni_matrix(big_n, s, t, reference_mode(cfg, seed))?;
    let hat = tensor_power(&sym_state(big_n, t)?, s);
    let basis = SymBasis::new(&vec![(big_n, t); s])?;
    let td = sym_td(&basis, &uni, &hat)?;
    Ok(Measurement {
        estimate: Estimate::exact(td),
        details: json!({ "compressed_rank": basis.rank() }),
    })
}

/// Haar-twirl deficit of ρ_uni, with the exact distance to the Haar
/// reference and a maximally mixed control.
pub fn tuni_invar(cfg: &ExperimentConfig, seed: u64) -> Result<Measurement> {
    let (s, t) = (cfg.s, cfg.t);
    let big_n = 1usize << (cfg.n + cfg.m);
    let dim = pow_dim(big_n, s * t)?;
    check_work(dim)?;
    let layout = RegisterLayout::blocks(s * t, big_n)?;
    let uni = rho_uni_matrix(big_n, s, t, reference_mode(cfg, seed))?;
    let deficit = almost_invariance_deficit(&uni, &layout, cfg.samples, seed)?;
    let mixed = CMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0);
    let control = almost_invariance_deficit(&mixed, &layout, cfg.samples.min(256), seed)?;
    let hat = tensor_power(&sym_state(big_n, t)?, s);
    let dis = trace_distance_raw(&uni, &hat)?;
    // for s = 1 the twirl of any state in the symmetric subspace is Π_sym/Tr
    let exact_deficit = if s == 1 { Some(dis) } else { None };
    Ok(Measurement {
        estimate: deficit,
        details: json!({
            "td_to_haar_reference": dis,
            "exact_deficit": exact_deficit,
            "control_deficit": control.value,
            "control_stderr": control.stderr,
        }),
    })
}

pub fn haar_perp_to_iid(cfg: &ExperimentConfig, seed: u64) -> Result<Measurement> {
    check_work(2 * pow_dim(1usize << cfg.n, cfg.s * cfg.t)?)?;
    let k = cfg.s * cfg.t;
    if k <= EXACT_TWIRL_MAX_COPIES && k <= 1usize << cfg.n {
        let (orth, iid) = haar_orthogonal_columns_vs_iid_exact(cfg.n, cfg.s, cfg.t)?;
        let td = trace_distance_raw(&orth, &iid)?;
        return Ok(Measurement {
            estimate: Estimate::exact(td),
            details: json!({ "method": "exact_commutant" }),
        });
    }
    let r = haar_orthogonal_columns_vs_iid(cfg.n, cfg.s, cfg.t, cfg.samples, seed)?;
    Ok(Measurement {
        estimate: r.td,
        details: json!({ "method": "monte_carlo_coupled" }),
    })
}

/// `C(2^n, t)·(2^n)_t / C(2^{2n} + t - 1, t)`: chance that a uniform size-t
/// type over `2n`-bit strings has distinct prefixes and distinct suffixes.
pub fn good_type_rate(n: usize, t: usize) -> f64 {
    let half = 1usize << n;
    binomial(half, t) * falling_factorial(half, t) / binomial(half * half + t - 1, t)
}

/// Haar isometry on the second `n` qubits of each copy of a Haar `2n`-qubit
/// state vs `t` copies of a Haar `(2n+m)`-qubit state.
pub fn length_extension(cfg: &ExperimentConfig, seed: u64) -> Result<Measurement> {
    let (n, m, t) = (cfg.n, cfg.m, cfg.t);
    let half = 1usize << n;
    let wide = 1usize << (2 * n + m);
    check_work(pow_dim(wide, t)?)?;
    let input = sym_state(half * half, t)?;
    let dims: Vec<usize> = std::iter::repeat_n(half, 2 * t).collect();
    let targets: Vec<usize> = (0..t).map(|k| 2 * k + 1).collect();
    let basis = SymBasis::new(&[(wide, t)])?;
    let good = good_type_rate(n, t);
    let details = |method: &str| {
        json!({
            "method": method,
            "good_type_rate": good,
            "collision_rate": 1.0 - good,
            "collision_scale_t2_over_2n": (t * t) as f64 / half as f64,
            "compressed_rank": basis.rank(),
        })
    };
    let ext = half << m;
    if t <= EXACT_TWIRL_MAX_COPIES && t <= ext {
        // group prefixes then suffixes, pad each suffix with |0^m>, twirl the
        // suffixes exactly, and restore the per-copy order
        let grouped: Vec<usize> = (0..t)
            .map(|k| 2 * k)
            .chain(targets.iter().copied())
            .collect();
        let x = permute_subsystems(&input, &dims, &grouped)?;
        let side = pow_dim(half, t)?;
        let block = pow_dim(ext, t)?;
        let pad = |i: usize| -> usize {
            let (a, b) = (i / side, i % side);
            a * block
                + index_tuple(b, half, t)
                    .iter()
                    .fold(0, |acc, &v| acc * ext + (v << m))
        };
        let mut padded = CMatrix::zeros(side * block, side * block);
        for i in 0..x.nrows() {
            for j in 0..x.ncols() {
                padded[(pad(i), pad(j))] = x[(i, j)];
            }
        }
        let twirled = haar_twirl_exact_side(&padded, side, ext, t)?;
        let mut out_dims = vec![half; t];
        out_dims.extend(std::iter::repeat_n(ext, t));
        let order: Vec<usize> = (0..t).flat_map(|k| [k, t + k]).collect();
        let out = permute_subsystems(&twirled, &out_dims, &order)?;
        let td = sym_td(&basis, &out, &sym_state(wide, t)?)?;
        return Ok(Measurement {
            estimate: Estimate::exact(td),
            details: details("exact_commutant"),
        });
    }
    let sums = batched_sum(
        cfg.samples,
        choose_batches(cfg.samples, basis.rank()),
        seed,
        streams::LENGTH_EXT,
        |rng| {
            let v = sample_haar_isometry(half, half << m, rng)?;
            let ops: Vec<&CMatrix> = targets.iter().map(|_| v.matrix()).collect();
            basis.compress(&conjugate_many(&input, &dims, &targets, &ops)?.0)
        },
    )?;
    let reference =
        CMatrix::identity(basis.rank(), basis.rank()) / C64::new(basis.rank() as f64, 0.0);
    let estimate = sums.bootstrap(DEFAULT_RESAMPLES, seed, |x| {
        trace_distance_raw(x, &reference)
    })?;
    Ok(Measurement {
        estimate,
        details: details("monte_carlo"),
    })
}

/// PRFSG: `t` copies of the PRI on each of `q` distinct classical inputs
/// vs `q` independent Haar `t`-copies; the single-input PRSG case goes in
/// the details.
pub fn pri_implies_prsg(cfg: &ExperimentConfig, seed: u64) -> Result<Measurement> {
    let (n, m, q, t) = (cfg.n, cfg.m, cfg.q, cfg.t);
    let d_in = 1usize << n;
    let big_n = 1usize << (n + m);
    if q > d_in {
        return Err(LabError::Infeasible(format!(
            "{q} distinct inputs need q <= 2^n = {d_in}"
        )));
    }
    check_work(pow_dim(big_n, q * t)?)?;
    let p = cfg.modulus(q * t);
    let basis_state = |x: usize| -> CMatrix {
        let mut b = CMatrix::zeros(d_in, d_in);
        b[(x, x)] = C64::new(1.0, 0.0);
        tensor_power(&b, t)
    };
    let haar_t = sym_state(big_n, t)?;

    let single = g_twirl(
        &basis_state(0),
        &RegisterLayout::blocks(t, d_in)?,
        m,
        p,
        perm_mode(big_n, cfg.samples, seed),
    )?;
    let single_basis = SymBasis::new(&[(big_n, t)])?;
    let prsg = sums_td(&single.sums, &single_basis, &haar_t, seed)?;

    let parts: Vec<CMatrix> = (0..q).map(basis_state).collect();
    let out = g_twirl(
        &product_state(&parts),
        &RegisterLayout::blocks(q * t, d_in)?,
        m,
        p,
        perm_mode(big_n, cfg.samples, seed),
    )?;
    let basis = SymBasis::new(&vec![(big_n, t); q])?;
    let estimate = sums_td(&out.sums, &basis, &tensor_power(&haar_t, q), seed)?;
    Ok(Measurement {
        estimate,
        details: json!({ "p": p, "prsg_td": prsg.value, "prsg_stderr": prsg.stderr }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, m: usize, s: usize, t: usize, q: usize) -> ExperimentConfig {
        ExperimentConfig {
            n,
            m,
            s,
            t,
            q,
            p: 0,
            samples: 512,
        }
    }

    #[test]
    fn tdis_repeated_pair_is_two_to_minus_m() {
        // |jj> twirls to a mixture whose distance to ρ_uni(1,2) is exactly 2^{-m}
        for m in 1..=3 {
            let r = tdis_info(&cfg(1, m, 1, 2, 2), 1).unwrap();
            assert!(
                (r.estimate.value - 0.5f64.powi(m as i32)).abs() < 1e-10,
                "m={m}: {}",
                r.estimate.value
            );
            assert_eq!(r.estimate.stderr, 0.0);
        }
        // a single basis state goes exactly to I/N
        assert!(tdis_info(&cfg(1, 2, 1, 1, 1), 1).unwrap().estimate.value < 1e-12);
    }

    #[test]
    fn outer_zero_and_control() {
        let r = outer_comp_query(
            &ExperimentConfig {
                p: 8,
                ..cfg(1, 1, 1, 2, 2)
            },
            1,
        )
        .unwrap();
        assert!(r.estimate.value <= 1e-12);
        assert!(r.details["equal_type_control_max_abs"].as_f64().unwrap() > 1e-3);
        assert_eq!(r.details["cross_pairs"], 10);
    }

    #[test]
    fn multicopy_plus_state() {
        let r = multicopy_info(&cfg(1, 3, 1, 2, 2), 3).unwrap();
        let plus = r.details["per_input_td"]["plus"].as_f64().unwrap();
        assert!((plus - 0.5f64.powi(3) / 2.0).abs() < 1e-10, "{plus}");
        assert!(r.estimate.value >= plus);
    }

    #[test]
    fn tuni_info_unique_types_are_exact() {
        let r = tuni_info(&cfg(2, 1, 1, 1, 1), 1).unwrap();
        assert!(r.estimate.value < 1e-10);
        let r = tuni_info(&cfg(2, 1, 1, 2, 2), 1).unwrap();
        assert!(r.estimate.value < 1e-10, "{}", r.estimate.value);
    }

    #[test]
    fn haar_info_single_copy() {
        let r = haar_info(&cfg(2, 2, 1, 1, 1), 5).unwrap();
        assert!(r.details["exact_input_td"].as_f64().unwrap() < 1e-10);
        assert!(
            r.estimate.value < 0.05 + 3.0 * r.estimate.stderr,
            "{:?}",
            r.estimate
        );
        assert!(r.details["hybrid_2_3_td"].as_f64().unwrap() < 1e-10);
    }

    #[test]
    fn haar_dis_two_copies() {
        // s = 1, t = 2: ρ_uni is Π_sym restricted to distinct pairs; TD = N/(N(N+1)/2) = 2/(N+1)
        for nm in 2..=3usize {
            let r = tuni_haar_dis(&cfg(1, nm - 1, 1, 2, 2), 1).unwrap();
            let big_n = (1usize << nm) as f64;
            assert!((r.estimate.value - 2.0 / (big_n + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn invariance_matches_exact_deficit() {
        let r = tuni_invar(
            &ExperimentConfig {
                samples: 2048,
                ..cfg(1, 1, 1, 2, 2)
            },
            2,
        )
        .unwrap();
        assert!(
            (r.estimate.value - 0.4).abs() < 0.05 + 3.0 * r.estimate.stderr,
            "{:?}",
            r.estimate
        );
        assert!(r.details["control_deficit"].as_f64().unwrap() < 1e-12);
    }

    #[test]
    fn perp_iid_two_columns_is_one_over_2d() {
        // E[|u1><u1| ⊗ |u2><u2|] = (I - SWAP/d)/(d^2 - 1); its distance to I/d^2 is 1/(2d)
        for n in 1..=4 {
            let r = haar_perp_to_iid(&cfg(n, 0, 2, 1, 2), 1).unwrap();
            assert!(
                (r.estimate.value - 0.5 / (1usize << n) as f64).abs() < 1e-10,
                "n={n}: {}",
                r.estimate.value
            );
        }
    }

    #[test]
    fn good_type_rate_small_case() {
        // n = 1, t = 2: 4 strings, 10 types; good types {00,11} and {01,10}
        assert!((good_type_rate(1, 2) - 0.2).abs() < 1e-12);
        assert_eq!(good_type_rate(3, 1), 1.0);
    }

    #[test]
    fn length_extension_single_copy_is_noise() {
        let r = length_extension(&cfg(1, 1, 1, 1, 1), 4).unwrap();
        assert!(
            r.estimate.value < 3.0 * r.estimate.stderr + 0.02,
            "{:?}",
            r.estimate
        );
    }

    #[test]
    fn prsg_exact_cases() {
        let one = pri_implies_prsg(&cfg(1, 1, 1, 1, 1), 1).unwrap();
        assert!(one.estimate.value < 1e-12);
        // two distinct inputs land on distinct outputs: TD to I/N ⊗ I/N is 1/N
        let two = pri_implies_prsg(&cfg(1, 2, 1, 1, 2), 1).unwrap();
        assert!(
            (two.estimate.value - 1.0 / 8.0).abs() < 1e-12,
            "{}",
            two.estimate.value
        );
    }
}
