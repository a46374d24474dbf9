use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::report::MeasureReport;
use crate::spin::{AdditiveObservable, SpinState, MAX_QUBITS};

use super::local_opt::{max_local_variance, max_over_groups, QuadraticObjective};

/// Eigenvalue pairs with `pi_i + pi_j` below this are skipped.
const PAIR_FLOOR: f64 = 1e-12;

/// Quantum Fisher information of `state` for generator `obs`.
///
/// Pure representations use `4 Var(A)`; mixed ones the spectral sum
/// `2 sum_ij (pi_i - pi_j)^2 / (pi_i + pi_j) |<i|A|j>|^2`.
pub fn qfi(state: &SpinState, obs: &AdditiveObservable) -> Result<f64> {
    if obs.qubit_count() != state.qubit_count() {
        return Err(Error::DimensionMismatch { left: obs.qubit_count(), right: state.qubit_count() });
    }
    if state.is_pure_repr() {
        return Ok(4.0 * state.variance(obs)?);
    }
    let s = Spectral::new(state);
    Ok(s.value(obs))
}

struct Spectral {
    pi: Vec<f64>,
    u: CMatrix,
}

impl Spectral {
    fn new(state: &SpinState) -> Self {
        let (pi, u) = linalg::eigh(&state.density());
        Self { pi, u }
    }

    fn weight(&self, i: usize, j: usize) -> f64 {
        let s = self.pi[i] + self.pi[j];
        if s < PAIR_FLOOR {
            0.0
        } else {
            2.0 * (self.pi[i] - self.pi[j]).powi(2) / s
        }
    }

    /// `A` in the eigenbasis of `rho`.
    fn rotated(&self, obs: &AdditiveObservable) -> CMatrix {
        self.u.adjoint() * obs.apply_columns(&self.u)
    }

    fn value(&self, obs: &AdditiveObservable) -> f64 {
        let a = self.rotated(obs);
        let d = self.pi.len();
        let mut f = 0.0;
        for i in 0..d {
            for j in 0..d {
                f += self.weight(i, j) * a[(i, j)].norm_sqr();
            }
        }
        f
    }

    /// `L(A) = U (W o U^dagger A U) U^dagger`, so that `F = Tr A L(A)`.
    fn linear_part(&self, obs: &AdditiveObservable) -> CMatrix {
        let a = self.rotated(obs);
        let w = CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * self.weight(i, j));
        &self.u * w * self.u.adjoint()
    }
}

struct PureObjective<'a> {
    n: usize,
    psi: &'a CVector,
}

impl QuadraticObjective for PureObjective<'_> {
    fn value(&self, a: &AdditiveObservable) -> Result<f64> {
        let a_psi = a.apply(self.psi);
        let mean = self.psi.dotc(&a_psi).re;
        Ok(4.0 * (a_psi.norm_squared() - mean * mean))
    }

    fn local_gradient(&self, a: &AdditiveObservable, sites: &[usize]) -> Result<CMatrix> {
        // L = 2 (rho A + A rho) - 4 <A> rho
        let dims = vec![2; self.n];
        let a_psi = a.apply(self.psi);
        let mean = self.psi.dotc(&a_psi).re;
        let cross = linalg::partial_trace_outer(&dims, sites, self.psi, &a_psi);
        let base = linalg::partial_trace_outer(&dims, sites, self.psi, self.psi);
        Ok((&cross + cross.adjoint()).scale(2.0) - base.scale(4.0 * mean))
    }
}

struct MixedObjective {
    n: usize,
    spectral: Spectral,
}

impl QuadraticObjective for MixedObjective {
    fn value(&self, a: &AdditiveObservable) -> Result<f64> {
        Ok(self.spectral.value(a))
    }

    fn local_gradient(&self, a: &AdditiveObservable, sites: &[usize]) -> Result<CMatrix> {
        Ok(linalg::partial_trace(&vec![2; self.n], sites, &self.spectral.linear_part(a)))
    }
}

/// `max_A F(rho, A) / (4 n)` over additive observables whose `n` local parts
/// have spectrum in `[-1, 1]`. `groups` defaults to one group per qubit.
pub fn fisher_neff(state: &SpinState, groups: Option<&[Vec<usize>]>, seed: u64) -> Result<MeasureReport> {
    let n = state.qubit_count();
    if n > MAX_QUBITS {
        return Err(Error::Unsupported(format!("register of {n} qubits is too large")));
    }
    let singles: Vec<Vec<usize>> = (0..n).map(|k| vec![k]).collect();
    let groups = groups.unwrap_or(&singles);
    let mut seen = vec![false; n];
    for g in groups {
        for &k in g {
            if k >= n || seen[k] {
                return Err(Error::InvalidParameter("groups must partition the register".into()));
            }
            seen[k] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidParameter("groups must partition the register".into()));
    }
    let per_site = groups.iter().all(|g| g.len() == 1);
    let (f, method) = match state.vector() {
        Some(_) if per_site => (4.0 * max_local_variance(state, seed)?.value, "bloch-ascent"),
        Some(psi) => (max_over_groups(n, groups, &PureObjective { n, psi }, seed)?.value, "group-ascent"),
        None => {
            let obj = MixedObjective { n, spectral: Spectral::new(state) };
            (max_over_groups(n, groups, &obj, seed)?.value, "group-ascent")
        }
    };
    let k = groups.len() as f64;
    Ok(MeasureReport::new(f / (4.0 * k), method, 0.0)
        .with("max_fisher", format!("{f:.12e}"))
        .with("groups", groups.len())
        .with("local_spectrum", "[-1, 1]"))
}
