//! Dense complex matrix helpers over flattened tensor-product bases.
//!
//! A matrix together with a list of factor dimensions `dims` is read in the
//! row-major lexicographic product basis: basis index `i` decomposes into
//! digits `(i_0, ..., i_{n-1})` with the *last* factor varying fastest.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Row-major strides for the given factor dims (last factor has stride 1).
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

pub fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

fn digits(mut i: usize, dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut d = vec![0usize; dims.len()];
    for k in 0..dims.len() {
        d[k] = i / strides[k];
        i %= strides[k];
    }
    d
}

/// Reorder tensor factors. `perm[new_pos] = old_pos`; returns the matrix over
/// the reordered basis (new dims are `old_dims[perm[k]]`).
pub fn permute_factors(m: &CMat, dims: &[usize], perm: &[usize]) -> CMat {
    let n = total_dim(dims);
    assert_eq!(m.nrows(), n);
    let old_strides = strides(dims);
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let new_strides = strides(&new_dims);
    // map new linear index -> old linear index
    let mut map = vec![0usize; n];
    for (i, entry) in map.iter_mut().enumerate() {
        let nd = digits(i, &new_dims, &new_strides);
        let mut old = 0usize;
        for (k, &p) in perm.iter().enumerate() {
            old += nd[k] * old_strides[p];
        }
        *entry = old;
    }
    CMat::from_fn(n, n, |i, j| m[(map[i], map[j])])
}

/// Trace out the factors with `keep[k] == false`.
pub fn partial_trace(m: &CMat, dims: &[usize], keep: &[bool]) -> CMat {
    assert_eq!(dims.len(), keep.len());
    let kept: Vec<usize> = (0..dims.len()).filter(|&k| keep[k]).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|&k| !keep[k]).collect();
    let st = strides(dims);
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let nk = total_dim(&kept_dims);
    let nt = total_dim(&traced_dims);
    let kept_strides = strides(&kept_dims);
    let traced_strides = strides(&traced_dims);
    let embed = |sub: usize, sub_dims: &[usize], sub_strides: &[usize], pos: &[usize]| {
        let d = digits(sub, sub_dims, sub_strides);
        d.iter().zip(pos).map(|(&v, &k)| v * st[k]).sum::<usize>()
    };
    let mut out = CMat::zeros(nk, nk);
    for i in 0..nk {
        let bi = embed(i, &kept_dims, &kept_strides, &kept);
        for j in 0..nk {
            let bj = embed(j, &kept_dims, &kept_strides, &kept);
            let mut acc = Complex64::default();
            for t in 0..nt {
                let bt = embed(t, &traced_dims, &traced_strides, &traced);
                acc += m[(bi + bt, bj + bt)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Transpose the factors with `mask[k] == true`, leaving the rest alone.
pub fn partial_transpose(m: &CMat, dims: &[usize], mask: &[bool]) -> CMat {
    assert_eq!(dims.len(), mask.len());
    let n = total_dim(dims);
    assert_eq!(m.nrows(), n);
    let st = strides(dims);
    CMat::from_fn(n, n, |i, j| {
        let di = digits(i, dims, &st);
        let dj = digits(j, dims, &st);
        let mut ii = 0usize;
        let mut jj = 0usize;
        for k in 0..dims.len() {
            if mask[k] {
                ii += dj[k] * st[k];
                jj += di[k] * st[k];
            } else {
                ii += di[k] * st[k];
                jj += dj[k] * st[k];
            }
        }
        m[(ii, jj)]
    })
}

pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

pub fn trace(m: &CMat) -> Complex64 {
    m.trace()
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Spectral-norm distance from the Hermitian cone: `||m - m†|| / 2`.
pub fn hermitian_deviation(m: &CMat) -> f64 {
    op_norm(&((m - m.adjoint()).scale(0.5)))
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix: eigenvalues ascending, matching
/// orthonormal eigenvectors as columns. The input is symmetrized first; callers
/// are expected to have checked Hermiticity to their own tolerance.
pub fn herm_eig(m: &CMat) -> (Vec<f64>, CMat) {
    let se = nalgebra::SymmetricEigen::new(hermitize(m));
    let mut idx: Vec<usize> = (0..se.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let vals: Vec<f64> = idx.iter().map(|&k| se.eigenvalues[k]).collect();
    let n = m.nrows();
    let vecs = CMat::from_fn(n, n, |i, j| se.eigenvectors[(i, idx[j])]);
    (vals, vecs)
}

/// Apply a real spectral function to a Hermitian matrix: `V f(Λ) V†`.
pub fn spectral_map(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = herm_eig(m);
    let n = m.nrows();
    let mut out = CMat::zeros(n, n);
    for (k, &v) in vals.iter().enumerate() {
        let fv = f(v);
        if fv != 0.0 {
            let col = vecs.column(k);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += col[i] * col[j].conj() * cr(fv);
                }
            }
        }
    }
    out
}
