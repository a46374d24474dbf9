//! Dense complex linear-algebra helpers shared by the Fock and spin layers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = hermitize(m);
    let eig = h.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = hermitize(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).camax()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    eigvalsh(m).iter().map(|v| v.abs()).sum()
}

/// Trace norm of an arbitrary square matrix (sum of singular values).
pub fn trace_norm(m: &CMatrix) -> f64 {
    m.singular_values().iter().sum()
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let (vals, vecs) = eigh(m);
    let diag = CVector::from_iterator(vals.len(), vals.iter().map(|&v| f(v)));
    &vecs * CMatrix::from_diagonal(&diag) * vecs.adjoint()
}

/// `exp(-i t H)` for Hermitian `H`; exactly unitary up to rounding.
pub fn unitary_exp(h: &CMatrix, t: f64) -> CMatrix {
    hermitian_function(h, |v| C64::from_polar(1.0, -t * v))
}

pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    hermitian_function(m, |v| C64::new(v.max(0.0).sqrt(), 0.0))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Max-norm distance of `u u^\dagger` from the identity.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    (u * u.adjoint() - identity(u.nrows())).camax()
}

/// Row-major strides for a tensor-product space with the given local dimensions.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Splits a flat index into per-subsystem digits.
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

/// Applies a local operator acting on the subsystems `targets` of a
/// tensor-product vector.
pub fn apply_local(dims: &[usize], targets: &[usize], op: &CMatrix, v: &CVector) -> CVector {
    let total: usize = dims.iter().product();
    debug_assert_eq!(v.len(), total);
    let st = strides(dims);
    let local_dims: Vec<usize> = targets.iter().map(|&t| dims[t]).collect();
    let local_total: usize = local_dims.iter().product();
    let local_offsets: Vec<usize> = (0..local_total)
        .map(|l| {
            digits(l, &local_dims)
                .iter()
                .zip(targets)
                .map(|(d, &t)| d * st[t])
                .sum()
        })
        .collect();
    let rest: Vec<usize> = (0..dims.len()).filter(|k| !targets.contains(k)).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&k| dims[k]).collect();
    let rest_total: usize = rest_dims.iter().product();
    let mut out = CVector::zeros(total);
    let mut buf = vec![ZERO; local_total];
    for r in 0..rest_total {
        let base: usize = digits(r, &rest_dims)
            .iter()
            .zip(&rest)
            .map(|(d, &k)| d * st[k])
            .sum();
        for (l, off) in local_offsets.iter().enumerate() {
            buf[l] = v[base + off];
        }
        for i in 0..local_total {
            let mut acc = ZERO;
            for j in 0..local_total {
                let b = buf[j];
                if b != ZERO {
                    acc += op[(i, j)] * b;
                }
            }
            out[base + local_offsets[i]] = acc;
        }
    }
    out
}

/// `U rho U^\dagger` for a local operator `U`.
pub fn conjugate_local(dims: &[usize], targets: &[usize], op: &CMatrix, rho: &CMatrix) -> CMatrix {
    let n = rho.nrows();
    let mut left = CMatrix::zeros(n, n);
    for j in 0..n {
        let col = apply_local(dims, targets, op, &rho.column(j).into_owned());
        left.set_column(j, &col);
    }
    let left_adj = left.adjoint();
    let mut out = CMatrix::zeros(n, n);
    for j in 0..n {
        let col = apply_local(dims, targets, op, &left_adj.column(j).into_owned());
        out.set_column(j, &col);
    }
    out.adjoint()
}

/// Partial trace keeping the (sorted) subsystems in `keep`.
pub fn partial_trace(dims: &[usize], keep: &[usize], rho: &CMatrix) -> CMatrix {
    let st = strides(dims);
    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let kt: usize = keep_dims.iter().product();
    let rest: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&k| dims[k]).collect();
    let rt: usize = rest_dims.iter().product();
    let keep_off: Vec<usize> = (0..kt)
        .map(|l| digits(l, &keep_dims).iter().zip(keep).map(|(d, &k)| d * st[k]).sum())
        .collect();
    let rest_off: Vec<usize> = (0..rt)
        .map(|l| digits(l, &rest_dims).iter().zip(&rest).map(|(d, &k)| d * st[k]).sum())
        .collect();
    let mut out = CMatrix::zeros(kt, kt);
    for i in 0..kt {
        for j in 0..kt {
            let mut acc = ZERO;
            for r in &rest_off {
                acc += rho[(keep_off[i] + r, keep_off[j] + r)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Reduced density matrix of a pure tensor-product vector.
pub fn partial_trace_pure(dims: &[usize], keep: &[usize], v: &CVector) -> CMatrix {
    partial_trace_outer(dims, keep, v, v)
}

/// `Tr_rest |u><v|` on the sorted subsystem set `keep`.
pub fn partial_trace_outer(dims: &[usize], keep: &[usize], u: &CVector, v: &CVector) -> CMatrix {
    let st = strides(dims);
    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let kt: usize = keep_dims.iter().product();
    let rest: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&k| dims[k]).collect();
    let rt: usize = rest_dims.iter().product();
    let keep_off: Vec<usize> = (0..kt)
        .map(|l| digits(l, &keep_dims).iter().zip(keep).map(|(d, &k)| d * st[k]).sum())
        .collect();
    let rest_off: Vec<usize> = (0..rt)
        .map(|l| digits(l, &rest_dims).iter().zip(&rest).map(|(d, &k)| d * st[k]).sum())
        .collect();
    // vectors as kt x rt matrices, result = M_u M_v^dagger
    let mu = CMatrix::from_fn(kt, rt, |i, r| u[keep_off[i] + rest_off[r]]);
    let mv = CMatrix::from_fn(kt, rt, |i, r| v[keep_off[i] + rest_off[r]]);
    &mu * mv.adjoint()
}

/// Shannon-style entropy of a spectrum in nats; entries below 1e-12 ignored.
pub fn spectral_entropy(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&p| p > 1e-12)
        .map(|&p| -p * p.ln())
        .sum::<f64>()
        .max(0.0)
}
