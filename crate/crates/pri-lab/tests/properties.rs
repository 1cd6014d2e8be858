//! Randomized invariants across qcore, symtypes, pri and verify. The
//! SWAP and permutation test oracles simulate the circuits gate by gate.

mod common;

use itertools::Itertools;
use proptest::prelude::*;

use pri_lab::haar::sample_haar_unitary;
use pri_lab::pri::{g_twirl, pri_isometry, PermBackend, PermTwirlMode, PhaseFunction, PriSpec};
use pri_lab::qcore::linalg::{
    identity, kron, max_abs, max_abs_diff, outer, partial_trace as partial_trace_dims, CMatrix, C64,
};
use pri_lab::qcore::{
    operator_norm, partial_trace, permutation_test_prob, swap_test_prob, trace_distance,
    trace_distance_raw, DensityMatrix, RegisterLayout,
};
use pri_lab::rng::from_seed;
use pri_lab::symtypes::{
    permutation_operator, sym_projector, type_of, type_state_vec, PermElement,
};
use pri_lab::verify::{ExperimentConfig, ExperimentName, ExperimentReport};

use common::{random_density, random_density_rank, random_matrix};

const TOL: f64 = 1e-10;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn trace_distance_is_a_bounded_metric(q in 1usize..=3, a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), r in 1usize..=3) {
        let d = 1 << q;
        let x = random_density_rank(d, r.min(d), a);
        let y = random_density(d, b);
        let z = random_density_rank(d, 1, c);
        let xy = trace_distance(&x, &y).unwrap();
        prop_assert!((-TOL..=1.0 + TOL).contains(&xy));
        prop_assert!((xy - trace_distance(&y, &x).unwrap()).abs() < TOL);
        prop_assert!(trace_distance(&x, &x).unwrap() < TOL);
        let xz = trace_distance(&x, &z).unwrap();
        let zy = trace_distance(&z, &y).unwrap();
        prop_assert!(xy <= xz + zy + TOL);
    }

    #[test]
    fn partial_trace_contracts(qubits in 2usize..=4, a in any::<u64>(), b in any::<u64>(), keep_mask in 1u32..15) {
        let keep: Vec<usize> = (0..qubits).filter(|k| keep_mask & (1 << k) != 0).collect();
        prop_assume!(!keep.is_empty() && keep.len() < qubits);
        let x = random_density(1 << qubits, a);
        let y = random_density_rank(1 << qubits, 2, b);
        let before = trace_distance(&x, &y).unwrap();
        let after = trace_distance(&partial_trace(&x, &keep).unwrap(), &partial_trace(&y, &keep).unwrap()).unwrap();
        prop_assert!(after <= before + 1e-9);
    }

    #[test]
    fn isometry_conjugation_preserves_distance(q in 1usize..=2, extra in 1usize..=2, a in any::<u64>(), b in any::<u64>(), u in any::<u64>()) {
        let (d_in, d_out) = (1 << q, 1 << (q + extra));
        let v = pri_lab::haar::sample_haar_isometry(d_in, d_out, &mut from_seed(u)).unwrap();
        let x = random_density(d_in, a);
        let y = random_density(d_in, b);
        let vm = v.matrix();
        let before = trace_distance(&x, &y).unwrap();
        let after = trace_distance_raw(&(vm * x.matrix() * vm.adjoint()), &(vm * y.matrix() * vm.adjoint())).unwrap();
        prop_assert!(after <= before + 1e-9);
        prop_assert!((after - before).abs() < 1e-9);
    }

    #[test]
    fn operator_norm_after_partial_trace(da in 1usize..=4, db in 1usize..=4, seed in any::<u64>()) {
        let q = random_matrix(da * db, seed);
        let reduced = partial_trace_dims(&q, &[da, db], &[0]).unwrap();
        prop_assert!(operator_norm(&reduced) <= db as f64 * operator_norm(&q) * (1.0 + 1e-12));
    }

    #[test]
    fn swap_test_matches_circuit(a in any::<u64>(), b in any::<u64>(), ra in 1usize..=2) {
        let x = random_density_rank(2, ra, a);
        let y = random_density(2, b);
        let want = swap_test_circuit(x.matrix(), y.matrix(), 2);
        prop_assert!((swap_test_prob(&x, &y).unwrap() - want).abs() < TOL);
    }

    #[test]
    fn permutation_test_matches_circuit(t in 2usize..=3, a in any::<u64>(), r in 1usize..=4) {
        let dim = 1usize << t;
        let rho = random_density_rank(dim, r.min(dim), a);
        let want = permutation_test_circuit(rho.matrix(), t, 2);
        prop_assert!((permutation_test_prob(rho.matrix(), t, 2).unwrap() - want).abs() < TOL);
    }

    #[test]
    fn type_states_are_orthonormal(alphabet in 2usize..=4, t in 1usize..=3, xs in prop::collection::vec(0usize..4, 3), ys in prop::collection::vec(0usize..4, 3)) {
        let x: Vec<usize> = xs[..t].iter().map(|v| v % alphabet).collect();
        let y: Vec<usize> = ys[..t].iter().map(|v| v % alphabet).collect();
        let (tx, ty) = (type_of(&x, alphabet).unwrap(), type_of(&y, alphabet).unwrap());
        let (vx, vy) = (type_state_vec(&tx).unwrap(), type_state_vec(&ty).unwrap());
        prop_assert!((vx.norm() - 1.0).abs() < TOL);
        let overlap = vx.dotc(&vy).norm();
        let want = if tx == ty { 1.0 } else { 0.0 };
        prop_assert!((overlap - want).abs() < TOL);
    }

    #[test]
    fn permutations_commute_with_tensor_powers(d in 2usize..=3, t in 2usize..=3, seed in any::<u64>()) {
        let v = sample_haar_unitary(d, &mut from_seed(seed)).unwrap();
        let mut vt = v.matrix().clone();
        for _ in 1..t {
            vt = kron(&vt, v.matrix());
        }
        for sigma in PermElement::all(t) {
            let p = permutation_operator(&sigma, d).unwrap();
            prop_assert!(max_abs_diff(&(&p * &vt), &(&vt * &p)) < TOL);
        }
    }

    #[test]
    fn every_backend_pair_is_an_isometry(n in 1usize..=3, m in 1usize..=2, seed in any::<u64>(), keyed_f in any::<bool>(), keyed_pi in any::<bool>()) {
        let explicit = PriSpec::sample(n, m, 8, &mut from_seed(seed)).unwrap();
        let r = explicit.resolve().unwrap();
        let f = if keyed_f { PhaseFunction::Keyed { seed: seed ^ 1 } } else { PhaseFunction::Table { table: r.phases.clone() } };
        let pi = if keyed_pi { PermBackend::Feistel { seed: seed ^ 2 } } else { PermBackend::Array { array: r.perm.clone() } };
        let spec = PriSpec::new(n, m, 8, f, pi).unwrap();
        prop_assert!(pri_isometry(&spec).unwrap().deviation() < TOL);
    }

    #[test]
    fn distinct_type_outer_products_are_annihilated(n in 1usize..=2, m in 1usize..=2, q in 2usize..=3, xs in prop::collection::vec(0usize..4, 3), ys in prop::collection::vec(0usize..4, 3)) {
        prop_assume!(n + m + 1 < 5 || q == 2);
        let d = 1usize << n;
        let x: Vec<usize> = xs[..q].iter().map(|v| v % d).collect();
        let y: Vec<usize> = ys[..q].iter().map(|v| v % d).collect();
        let (tx, ty) = (type_of(&x, d).unwrap(), type_of(&y, d).unwrap());
        prop_assume!(tx != ty);
        let a = type_state_vec(&tx).unwrap();
        let b = type_state_vec(&ty).unwrap();
        let layout = RegisterLayout::blocks(q, d).unwrap();
        let out = g_twirl(&(&a * b.adjoint()), &layout, m, 8, PermTwirlMode::Exact).unwrap();
        prop_assert!(max_abs(&out.mean) <= 1e-12);
    }

    #[test]
    fn verdict_is_recomputed(measured in 0.0f64..1.0, stderr in 0.0f64..0.1, bound in 0.0f64..1.0) {
        let name = ExperimentName::TdisInfo;
        let report = ExperimentReport {
            name,
            config: ExperimentConfig::default(),
            measured,
            stderr,
            bound_expr: name.bound_expr().into(),
            bound_value: bound,
            fitted_c: None,
            seed: 0,
            runtime_ms: 0,
            samples: 0,
            details: serde_json::Value::Null,
        };
        let js = serde_json::to_value(&report).unwrap();
        let want = if measured <= bound + 3.0 * stderr { "pass" } else { "fail" };
        prop_assert_eq!(js["verdict"].as_str().unwrap(), want);
        let back: ExperimentReport = serde_json::from_value(js).unwrap();
        prop_assert_eq!(back.passed(), want == "pass");
    }

    #[test]
    fn dec_inverts_enc(n in 1usize..=2, m in 1usize..=2, copies in 1usize..=3, seed in any::<u64>()) {
        use pri_lab::apps::{dec, enc, EncScheme};
        let scheme = EncScheme::new(n, m, 8, seed ^ 0xabc);
        let mut rng = from_seed(seed);
        let psi = pri_lab::haar::sample_haar_state(1 << n, &mut rng).unwrap();
        let out = dec(&scheme, &enc(&scheme, &psi, copies, &mut rng).unwrap()).unwrap();
        prop_assert!(out.ok);
        for c in &out.copies {
            prop_assert!(trace_distance(c, &psi.to_density()).unwrap() < TOL);
        }
    }
}

/// Sum over all size-`t` types of the type-state projectors is `Π_sym`.
#[test]
fn type_projectors_resolve_the_symmetric_projector() {
    for alphabet in 2usize..=4 {
        for t in 1..=3 {
            let dim = alphabet.pow(t as u32);
            let mut acc = CMatrix::zeros(dim, dim);
            for multiset in (0..alphabet).combinations_with_replacement(t) {
                let v = type_state_vec(&type_of(&multiset, alphabet).unwrap()).unwrap();
                acc += outer(&v);
            }
            assert!(
                max_abs_diff(&acc, &sym_projector(alphabet, t).unwrap()) < TOL,
                "N = {alphabet}, t = {t}"
            );
        }
    }
}

/// Swaps the two `d`-dimensional registers of a `d²`-dimensional index.
fn swap_index(i: usize, d: usize) -> usize {
    (i % d) * d + i / d
}

fn hadamard_on_ancilla(rest: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(s, 0.0),
            C64::new(s, 0.0),
            C64::new(s, 0.0),
            C64::new(-s, 0.0),
        ],
    );
    kron(&h, &identity(rest))
}

/// Ancilla `|0>`, H, controlled-SWAP, H, probability of reading 0.
fn swap_test_circuit(rho: &CMatrix, sigma: &CMatrix, d: usize) -> f64 {
    let rest = d * d;
    let mut cswap = CMatrix::zeros(2 * rest, 2 * rest);
    for i in 0..rest {
        cswap[(i, i)] = C64::new(1.0, 0.0);
        cswap[(rest + swap_index(i, d), rest + i)] = C64::new(1.0, 0.0);
    }
    let mut anc = CMatrix::zeros(2, 2);
    anc[(0, 0)] = C64::new(1.0, 0.0);
    let state = kron(&anc, &kron(rho, sigma));
    let h = hadamard_on_ancilla(rest);
    let u = &h * &cswap * &h;
    let out = &u * state * u.adjoint();
    (0..rest).map(|i| out[(i, i)].re).sum()
}

/// Ancilla prepared in the uniform superposition over `S_t` by a DFT,
/// controlled register permutations, inverse DFT, probability of reading 0.
fn permutation_test_circuit(rho: &CMatrix, t: usize, d: usize) -> f64 {
    let perms: Vec<Vec<usize>> = (0..t).permutations(t).collect();
    let k = perms.len();
    let rest = d.pow(t as u32);
    let mut dft = CMatrix::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            let ang = 2.0 * std::f64::consts::PI * (a * b) as f64 / k as f64;
            dft[(a, b)] = C64::from_polar(1.0 / (k as f64).sqrt(), ang);
        }
    }
    let mut ctrl = CMatrix::zeros(k * rest, k * rest);
    for (c, perm) in perms.iter().enumerate() {
        for x in 0..rest {
            let digits: Vec<usize> = (0..t)
                .map(|j| (x / d.pow((t - 1 - j) as u32)) % d)
                .collect();
            let y = perm.iter().fold(0, |acc, &j| acc * d + digits[j]);
            ctrl[(c * rest + y, c * rest + x)] = C64::new(1.0, 0.0);
        }
    }
    let mut anc = CMatrix::zeros(k, k);
    anc[(0, 0)] = C64::new(1.0, 0.0);
    let prep = kron(&dft, &identity(rest));
    let u = prep.adjoint() * ctrl * &prep;
    let out = &u * kron(&anc, rho) * u.adjoint();
    (0..rest).map(|i| out[(i, i)].re).sum()
}

#[test]
fn circuit_oracles_on_pure_extremes() {
    let zero = DensityMatrix::new(outer(&pri_lab::qcore::linalg::basis_vector(2, 0))).unwrap();
    let one = DensityMatrix::new(outer(&pri_lab::qcore::linalg::basis_vector(2, 1))).unwrap();
    assert!((swap_test_circuit(zero.matrix(), zero.matrix(), 2) - 1.0).abs() < TOL);
    assert!((swap_test_circuit(zero.matrix(), one.matrix(), 2) - 0.5).abs() < TOL);
    // |01> has symmetric weight 1/2 for t = 2
    let v = pri_lab::qcore::linalg::basis_vector(4, 1);
    assert!((permutation_test_circuit(&outer(&v), 2, 2) - 0.5).abs() < TOL);
}
