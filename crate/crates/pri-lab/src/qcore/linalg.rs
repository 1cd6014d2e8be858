//! Dense kernels over matrices whose rows and columns index a tensor product
//! of subsystems. Subsystem 0 is the most significant digit of an index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{LabError, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn basis_vector(dim: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[i] = ONE;
    v
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

fn product(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Applies `op` (a_out x a_in) to subsystem `k` of the row space of `mat`.
/// Columns are untouched; the row count becomes `rows / a_in * a_out`.
pub fn apply_left(mat: &CMatrix, dims: &[usize], k: usize, op: &CMatrix) -> Result<CMatrix> {
    if k >= dims.len() {
        return Err(LabError::Dims(format!(
            "subsystem {k} out of range for {} subsystems",
            dims.len()
        )));
    }
    let rows = product(dims);
    if mat.nrows() != rows {
        return Err(LabError::Dims(format!(
            "matrix has {} rows, layout wants {rows}",
            mat.nrows()
        )));
    }
    let a_in = dims[k];
    if op.ncols() != a_in {
        return Err(LabError::Dims(format!(
            "operator has {} columns, subsystem has dim {a_in}",
            op.ncols()
        )));
    }
    let a_out = op.nrows();
    let hi = product(&dims[..k]);
    let lo = product(&dims[k + 1..]);
    let new_rows = hi * a_out * lo;
    let cols = mat.ncols();
    let mut out = CMatrix::zeros(new_rows, cols);
    let op_t: Vec<C64> = (0..a_in)
        .flat_map(|i| (0..a_out).map(move |o| (i, o)))
        .map(|(i, o)| op[(o, i)])
        .collect();
    let src_all = mat.as_slice();
    let dst_all = out.as_mut_slice();
    for c in 0..cols {
        let src = &src_all[c * rows..(c + 1) * rows];
        let dst = &mut dst_all[c * new_rows..(c + 1) * new_rows];
        for h in 0..hi {
            for i in 0..a_in {
                let src_base = (h * a_in + i) * lo;
                let coeffs = &op_t[i * a_out..(i + 1) * a_out];
                for (o, &w) in coeffs.iter().enumerate() {
                    if w == ZERO {
                        continue;
                    }
                    let dst_base = (h * a_out + o) * lo;
                    for l in 0..lo {
                        dst[dst_base + l] += w * src[src_base + l];
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Computes `V X V†` where `V` acts as `op` on subsystem `k` (square input).
pub fn conjugate_local(x: &CMatrix, dims: &[usize], k: usize, op: &CMatrix) -> Result<CMatrix> {
    let left = apply_left(x, dims, k, op)?;
    let left_adj = left.adjoint();
    let both = apply_left(&left_adj, dims, k, op)?;
    Ok(both.adjoint())
}

/// Conjugates by a product operator acting on several subsystems.
/// `ops[j]` acts on subsystem `targets[j]`; dims are updated as they grow.
pub fn conjugate_many(
    x: &CMatrix,
    dims: &[usize],
    targets: &[usize],
    ops: &[&CMatrix],
) -> Result<(CMatrix, Vec<usize>)> {
    let mut cur_dims = dims.to_vec();
    let mut a = x.clone();
    for (&k, op) in targets.iter().zip(ops) {
        a = apply_left(&a, &cur_dims, k, op)?;
        cur_dims[k] = op.nrows();
    }
    let mut b = a.adjoint();
    let mut col_dims = dims.to_vec();
    for (&k, op) in targets.iter().zip(ops) {
        b = apply_left(&b, &col_dims, k, op)?;
        col_dims[k] = op.nrows();
    }
    Ok((b.adjoint(), cur_dims))
}

/// Applies `op` to subsystem `k` of a vector.
pub fn apply_vec(v: &CVector, dims: &[usize], k: usize, op: &CMatrix) -> Result<CVector> {
    let m = CMatrix::from_column_slice(v.len(), 1, v.as_slice());
    let out = apply_left(&m, dims, k, op)?;
    Ok(CVector::from_column_slice(out.as_slice()))
}

/// Traces out every subsystem not in `keep`. The kept subsystems stay in
/// their original relative order.
pub fn partial_trace(rho: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let total = product(dims);
    if rho.nrows() != total || rho.ncols() != total {
        return Err(LabError::Dims(format!(
            "matrix is {}x{}, layout wants {total}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() || keep_sorted.iter().any(|&k| k >= dims.len()) {
        return Err(LabError::Dims(format!(
            "bad keep set {keep:?} for {} subsystems",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len())
        .filter(|k| !keep_sorted.contains(k))
        .collect();
    let strides = strides(dims);
    let keep_offsets = offsets(&keep_sorted, dims, &strides);
    let traced_offsets = offsets(&traced, dims, &strides);
    let kd = keep_offsets.len();
    let mut out = CMatrix::zeros(kd, kd);
    for (j, &cj) in keep_offsets.iter().enumerate() {
        for (i, &ri) in keep_offsets.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &traced_offsets {
                acc += rho[(ri + t, cj + t)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Full-index offsets contributed by every joint value of the listed subsystems,
/// enumerated with the first listed subsystem most significant.
fn offsets(subs: &[usize], dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &k in subs {
        let mut next = Vec::with_capacity(out.len() * dims[k]);
        for &base in &out {
            for v in 0..dims[k] {
                next.push(base + v * strides[k]);
            }
        }
        out = next;
    }
    out
}

/// Reorders subsystems: output subsystem `j` is input subsystem `order[j]`.
pub fn permute_subsystems(rho: &CMatrix, dims: &[usize], order: &[usize]) -> Result<CMatrix> {
    let map = subsystem_index_map(dims, order)?;
    let d = map.len();
    if rho.nrows() != d || rho.ncols() != d {
        return Err(LabError::Dims("matrix does not match layout".into()));
    }
    Ok(CMatrix::from_fn(d, d, |i, j| rho[(map[i], map[j])]))
}

pub fn permute_subsystems_vec(v: &CVector, dims: &[usize], order: &[usize]) -> Result<CVector> {
    let map = subsystem_index_map(dims, order)?;
    if v.len() != map.len() {
        return Err(LabError::Dims("vector does not match layout".into()));
    }
    Ok(CVector::from_fn(map.len(), |i, _| v[map[i]]))
}

/// `map[new_index] = old_index` for the reordering described above.
fn subsystem_index_map(dims: &[usize], order: &[usize]) -> Result<Vec<usize>> {
    let mut seen = vec![false; dims.len()];
    if order.len() != dims.len() {
        return Err(LabError::Dims(
            "order must list every subsystem once".into(),
        ));
    }
    for &o in order {
        if o >= dims.len() || seen[o] {
            return Err(LabError::Dims(format!("bad subsystem order {order:?}")));
        }
        seen[o] = true;
    }
    let old_strides = strides(dims);
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let mut map = vec![0usize; product(dims)];
    let mut digits = vec![0usize; dims.len()];
    for (idx, slot) in map.iter_mut().enumerate() {
        let mut rem = idx;
        for j in (0..new_dims.len()).rev() {
            digits[j] = rem % new_dims[j];
            rem /= new_dims[j];
        }
        *slot = order
            .iter()
            .zip(&digits)
            .map(|(&o, &dg)| dg * old_strides[o])
            .sum();
    }
    Ok(map)
}

/// Sum of absolute eigenvalues of a Hermitian matrix. The matrix is split
/// into the connected components of its nonzero pattern first, so the many
/// block-structured operators in this crate never pay for a dense solve.
pub fn trace_norm_hermitian(h: &CMatrix) -> f64 {
    let d = h.nrows();
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for j in 0..d {
        for i in 0..j {
            if h[(i, j)] != ZERO || h[(j, i)] != ZERO {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..d {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut total = 0.0;
    for idx in groups.values() {
        total += match idx.len() {
            1 => h[(idx[0], idx[0])].re.abs(),
            2 => {
                let a = h[(idx[0], idx[0])].re;
                let c = h[(idx[1], idx[1])].re;
                let b = h[(idx[0], idx[1])];
                let mean = 0.5 * (a + c);
                let rad = (0.25 * (a - c) * (a - c) + b.norm_sqr()).sqrt();
                (mean + rad).abs() + (mean - rad).abs()
            }
            k => {
                let sub = CMatrix::from_fn(k, k, |i, j| h[(idx[i], idx[j])]);
                hermitian_eigenvalues(&sub).iter().map(|e| e.abs()).sum()
            }
        };
    }
    total
}

/// Eigenvalues of a Hermitian matrix (the strictly lower triangle is trusted).
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let sym = symmetrize(h);
    sym.symmetric_eigenvalues().iter().copied().collect()
}

/// `(H + H†) / 2`.
pub fn symmetrize(h: &CMatrix) -> CMatrix {
    (h + h.adjoint()) * C64::new(0.5, 0.0)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// Largest singular value.
pub fn operator_norm(a: &CMatrix) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    a.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Hadamard transform on `m` qubits, normalized.
pub fn hadamard(m: usize) -> CMatrix {
    let d = 1usize << m;
    let scale = (d as f64).sqrt().recip();
    CMatrix::from_fn(d, d, |i, j| {
        let sign = if (i & j).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        C64::new(sign * scale, 0.0)
    })
}

/// The column `|+^m>` as a (2^m x 1) matrix.
pub fn plus_column(m: usize) -> CMatrix {
    let d = 1usize << m;
    CMatrix::from_element(d, 1, C64::new((d as f64).sqrt().recip(), 0.0))
}

/// The column `|0^m>` as a (2^m x 1) matrix.
pub fn zero_column(m: usize) -> CMatrix {
    let d = 1usize << m;
    let mut c = CMatrix::zeros(d, 1);
    c[(0, 0)] = ONE;
    c
}

/// Orthonormal completion: extends the orthonormal columns of `basis` with
/// vectors drawn from `candidates` (in order) by two-pass Gram-Schmidt.
pub fn complete_orthonormal<I: Iterator<Item = CVector>>(
    basis: &[CVector],
    dim: usize,
    candidates: I,
) -> Result<Vec<CVector>> {
    let mut cols: Vec<CVector> = basis.to_vec();
    for mut v in candidates {
        if cols.len() == dim {
            break;
        }
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dotc(&v);
                v -= c * proj;
            }
        }
        let nrm = v.norm();
        if nrm > 1e-8 {
            cols.push(v / C64::new(nrm, 0.0));
        }
    }
    if cols.len() != dim {
        return Err(LabError::Infeasible(
            "orthonormal completion ran out of candidates".into(),
        ));
    }
    Ok(cols.split_off(basis.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn apply_left_matches_kron() {
        let op = CMatrix::from_fn(3, 2, |i, j| C64::new(i as f64 + 1.0, j as f64 - 0.5));
        let x = CMatrix::from_fn(4, 4, |i, j| {
            C64::new((i * 4 + j) as f64, (i as f64) - (j as f64))
        });
        // subsystem 0 of dims [2,2]
        let full = kron(&op, &identity(2));
        let got = apply_left(&x, &[2, 2], 0, &op).unwrap();
        assert!(max_abs_diff(&got, &(&full * &x)) < 1e-12);
        let full = kron(&identity(2), &op);
        let got = apply_left(&x, &[2, 2], 1, &op).unwrap();
        assert!(max_abs_diff(&got, &(&full * &x)) < 1e-12);
    }

    #[test]
    fn conjugate_many_matches_dense() {
        let a = CMatrix::from_fn(2, 2, |i, j| C64::new(i as f64 - j as f64, 1.0));
        let b = CMatrix::from_fn(4, 2, |i, j| C64::new(0.3 * i as f64, j as f64));
        let x = CMatrix::from_fn(4, 4, |i, j| {
            C64::new((i + j) as f64, i as f64 * 0.1 - j as f64 * 0.2)
        });
        let (got, dims) = conjugate_many(&x, &[2, 2], &[0, 1], &[&a, &b]).unwrap();
        assert_eq!(dims, vec![2, 4]);
        let v = kron(&a, &b);
        let want = &v * &x * v.adjoint();
        assert!(max_abs_diff(&got, &want) < 1e-10);
    }

    #[test]
    fn partial_trace_of_product() {
        let r = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.75), C64::new(0.1, 0.2), C64::new(0.1, -0.2), c(0.25)],
        );
        let s = CMatrix::from_row_slice(2, 2, &[c(0.5), c(0.0), c(0.0), c(0.5)]);
        let rs = kron(&r, &s);
        assert!(max_abs_diff(&partial_trace(&rs, &[2, 2], &[0]).unwrap(), &r) < 1e-12);
        assert!(max_abs_diff(&partial_trace(&rs, &[2, 2], &[1]).unwrap(), &s) < 1e-12);
        let t = partial_trace(&rs, &[2, 2], &[]).unwrap();
        assert_abs_diff_eq!(t[(0, 0)].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn permute_swaps_factors() {
        let a = CMatrix::from_fn(2, 2, |i, j| c((i * 2 + j) as f64));
        let b = CMatrix::from_fn(3, 3, |i, j| C64::new(i as f64, j as f64));
        let ab = kron(&a, &b);
        let ba = permute_subsystems(&ab, &[2, 3], &[1, 0]).unwrap();
        assert!(max_abs_diff(&ba, &kron(&b, &a)) < 1e-12);
    }

    #[test]
    fn trace_norm_blocks_agree_with_dense() {
        let h = CMatrix::from_fn(5, 5, |i, j| {
            if (i < 2) == (j < 2) {
                C64::new(
                    (i + j) as f64 - 3.0,
                    if i == j { 0.0 } else { (i as f64) - (j as f64) },
                )
            } else {
                ZERO
            }
        });
        let dense: f64 = hermitian_eigenvalues(&h).iter().map(|e| e.abs()).sum();
        assert_abs_diff_eq!(trace_norm_hermitian(&h), dense, epsilon = 1e-10);
    }

    #[test]
    fn hadamard_is_unitary() {
        let h = hadamard(3);
        assert!(max_abs_diff(&(h.adjoint() * &h), &identity(8)) < 1e-12);
    }

    #[test]
    fn completion_spans_space() {
        let v = CVector::from_vec(vec![c(0.6), c(0.8), ZERO]);
        let extra = complete_orthonormal(
            std::slice::from_ref(&v),
            3,
            (0..3).map(|i| basis_vector(3, i)),
        )
        .unwrap();
        assert_eq!(extra.len(), 2);
        for e in &extra {
            assert_abs_diff_eq!(v.dotc(e).norm(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(e.norm(), 1.0, epsilon = 1e-12);
        }
    }
}
