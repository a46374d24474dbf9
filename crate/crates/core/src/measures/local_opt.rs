//! Maximization of convex quadratic objectives over additive local observables.
//!
//! Both the variance of a pure state and the quantum Fisher information are
//! convex quadratic forms in the observable, so replacing each local part by
//! the maximizer of the linearized objective never decreases them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::spin::{pauli, AdditiveObservable, Axis, LocalTerm, SpinState};
use crate::C64;

pub const RESTARTS: usize = 8;
const MAX_ITER: usize = 5000;
const IMPROVE_TOL: f64 = 1e-9;

/// Two-point Pauli covariance `C[(k,a),(l,b)] = Re<s_a^k s_b^l> - <s_a^k><s_b^l>`.
pub fn bloch_covariance(state: &SpinState) -> CMatrix {
    let n = state.qubit_count();
    let dims = vec![2; n];
    let axes = [Axis::X, Axis::Y, Axis::Z];
    let rho = state.density();
    let mut c = CMatrix::zeros(3 * n, 3 * n);
    match state.vector() {
        Some(psi) => {
            let images: Vec<CVector> = (0..3 * n)
                .map(|i| linalg::apply_local(&dims, &[i / 3], &pauli(axes[i % 3]), psi))
                .collect();
            let means: Vec<f64> = images.iter().map(|v| psi.dotc(v).re).collect();
            for i in 0..3 * n {
                for j in 0..3 * n {
                    c[(i, j)] = C64::new(images[i].dotc(&images[j]).re - means[i] * means[j], 0.0);
                }
            }
        }
        None => {
            let ops: Vec<CMatrix> = (0..3 * n)
                .map(|i| left_local(&dims, i / 3, &pauli(axes[i % 3]), &rho))
                .collect();
            let means: Vec<f64> = ops.iter().map(|m| m.trace().re).collect();
            for i in 0..3 * n {
                for j in 0..3 * n {
                    let tr = left_local(&dims, i / 3, &pauli(axes[i % 3]), &ops[j]).trace();
                    c[(i, j)] = C64::new(tr.re - means[i] * means[j], 0.0);
                }
            }
        }
    }
    c
}

/// `op_site M`, acting on the row index of `m`.
fn left_local(dims: &[usize], site: usize, op: &CMatrix, m: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for j in 0..m.ncols() {
        out.set_column(j, &linalg::apply_local(dims, &[site], op, &m.column(j).into_owned()));
    }
    out
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if r > 1e-3 && r <= 1.0 {
            return [v[0] / r, v[1] / r, v[2] / r];
        }
    }
}

/// Largest variance of `sum_k n_k . sigma_k` over unit Bloch vectors.
#[derive(Debug, Clone)]
pub struct BlochOptimum {
    pub value: f64,
    pub directions: Vec<[f64; 3]>,
    pub restarts_agreeing: usize,
}

/// Block ascent `n_k <- normalize((C n)_k)` from deterministic and random starts.
pub fn max_local_variance(state: &SpinState, seed: u64) -> Result<BlochOptimum> {
    let n = state.qubit_count();
    let c = bloch_covariance(state).map(|z| z.re);
    let objective = |x: &[f64]| -> f64 {
        let v = nalgebra::DVector::from_column_slice(x);
        v.dot(&(&c * &v))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<Vec<f64>> = (0..3).map(|a| (0..3 * n).map(|i| if i % 3 == a { 1.0 } else { 0.0 }).collect()).collect();
    for _ in 0..RESTARTS {
        starts.push((0..n).flat_map(|_| random_unit(&mut rng)).collect());
    }
    let mut results = Vec::new();
    for mut x in starts {
        let mut f = objective(&x);
        let mut converged = false;
        for _ in 0..MAX_ITER {
            let g = &c * nalgebra::DVector::from_column_slice(&x);
            for k in 0..n {
                let b = [g[3 * k], g[3 * k + 1], g[3 * k + 2]];
                let r = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
                if r > 1e-14 {
                    for a in 0..3 {
                        x[3 * k + a] = b[a] / r;
                    }
                }
            }
            let next = objective(&x);
            let gain = next - f;
            f = next;
            if gain < IMPROVE_TOL * f.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if converged {
            results.push((f, x));
        }
    }
    if results.is_empty() {
        return Err(Error::Convergence("no restart of the Bloch ascent converged".into()));
    }
    results.sort_by(|a, b| b.0.total_cmp(&a.0));
    let best = results[0].0;
    let agreeing = results.iter().filter(|r| (r.0 - best).abs() < 1e-6 * best.abs().max(1.0)).count();
    let x = &results[0].1;
    Ok(BlochOptimum {
        value: best,
        directions: (0..n).map(|k| [x[3 * k], x[3 * k + 1], x[3 * k + 2]]).collect(),
        restarts_agreeing: agreeing,
    })
}

/// Largest variance of a collective `n . S` with `S = sum_k sigma_k`, the
/// largest eigenvalue of the 3x3 collective covariance.
pub fn max_collective_variance(state: &SpinState) -> f64 {
    let n = state.qubit_count();
    let c = bloch_covariance(state);
    let mut m = CMatrix::zeros(3, 3);
    for i in 0..3 * n {
        for j in 0..3 * n {
            m[(i % 3, j % 3)] += c[(i, j)];
        }
    }
    linalg::eigvalsh(&m).last().copied().unwrap_or(0.0)
}

/// `sign(G)`: eigenvalues mapped to `+-1`.
fn sign_of(g: &CMatrix) -> CMatrix {
    linalg::hermitian_function(&linalg::hermitize(g), |x| C64::new(if x >= 0.0 { 1.0 } else { -1.0 }, 0.0))
}

fn random_sign_matrix(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let h = CMatrix::from_fn(dim, dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    sign_of(&(&h + h.adjoint()))
}

/// Linearization of a convex quadratic objective `F(A) = Tr(A L(A))`.
pub trait QuadraticObjective {
    fn value(&self, a: &AdditiveObservable) -> Result<f64>;
    /// `Tr_{rest} L(A)` on `sites`.
    fn local_gradient(&self, a: &AdditiveObservable, sites: &[usize]) -> Result<CMatrix>;
}

#[derive(Debug, Clone)]
pub struct GroupOptimum {
    pub value: f64,
    pub observable: AdditiveObservable,
}

/// Group-wise ascent `A_k <- sign(G_k)` from random starts.
pub fn max_over_groups(
    n: usize,
    groups: &[Vec<usize>],
    objective: &impl QuadraticObjective,
    seed: u64,
) -> Result<GroupOptimum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<GroupOptimum> = None;
    let mut any_converged = false;
    for restart in 0..RESTARTS {
        let mut mats: Vec<CMatrix> = groups
            .iter()
            .map(|g| {
                if restart == 0 {
                    // parity along z as a deterministic start
                    let mut m = CMatrix::identity(1, 1);
                    for _ in g {
                        m = linalg::kron(&m, &pauli(Axis::Z));
                    }
                    sign_of(&m)
                } else {
                    random_sign_matrix(1 << g.len(), &mut rng)
                }
            })
            .collect();
        let build = |mats: &[CMatrix]| {
            AdditiveObservable::new(
                n,
                groups.iter().zip(mats).map(|(g, m)| LocalTerm { sites: g.clone(), matrix: m.clone() }).collect(),
            )
        };
        let mut obs = build(&mats)?;
        let mut f = objective.value(&obs)?;
        let mut converged = false;
        for _ in 0..MAX_ITER {
            for (k, g) in groups.iter().enumerate() {
                let grad = objective.local_gradient(&obs, g)?;
                if grad.iter().any(|z| z.norm() > 1e-14) {
                    mats[k] = sign_of(&grad);
                }
            }
            obs = build(&mats)?;
            let next = objective.value(&obs)?;
            let gain = next - f;
            f = next;
            if gain < IMPROVE_TOL * f.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        any_converged |= converged;
        if converged && best.as_ref().is_none_or(|b| f > b.value) {
            best = Some(GroupOptimum { value: f, observable: obs });
        }
    }
    if !any_converged {
        return Err(Error::Convergence("no restart of the group ascent converged".into()));
    }
    Ok(best.expect("a converged restart"))
}
