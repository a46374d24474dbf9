//! Dense N-qubit states. Site 0 is the most significant bit of a basis index.

mod observable;

pub use observable::{bloch_operator, pauli, AdditiveObservable, Axis, LocalTerm, ProjectorSpec};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, ONE};
use crate::C64;

/// Largest register handled by the dense representation.
pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Pure(CVector),
    Mixed(CMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    n: usize,
    repr: Repr,
}

fn check_qubits(n: usize, len: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidParameter(format!("qubit count {n} outside 1..={MAX_QUBITS}")));
    }
    if len != 1 << n {
        return Err(Error::DimensionMismatch { left: len, right: 1 << n });
    }
    Ok(())
}

/// Parses a computational-basis label such as `"0110"`.
pub fn parse_label(label: &str, n: usize) -> Result<usize> {
    if label.len() != n || !label.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::UnknownLabel(label.to_string()));
    }
    Ok(usize::from_str_radix(label, 2).expect("validated binary label"))
}

impl SpinState {
    pub fn pure(n: usize, v: CVector) -> Result<Self> {
        check_qubits(n, v.len())?;
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("norm {norm} differs from 1")));
        }
        Ok(Self { n, repr: Repr::Pure(v) })
    }

    pub fn pure_normalized(n: usize, v: CVector) -> Result<Self> {
        check_qubits(n, v.len())?;
        let norm = v.norm();
        if !(norm > 1e-300) {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Ok(Self { n, repr: Repr::Pure(v.unscale(norm)) })
    }

    pub fn mixed(n: usize, m: CMatrix) -> Result<Self> {
        check_qubits(n, m.nrows())?;
        if !m.is_square() {
            return Err(Error::DimensionMismatch { left: m.nrows(), right: m.ncols() });
        }
        if linalg::hermiticity_defect(&m) > 1e-10 {
            return Err(Error::InvalidState("density matrix not Hermitian".into()));
        }
        let tr = linalg::trace(&m);
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        Ok(Self { n, repr: Repr::Mixed(linalg::hermitize(&m)) })
    }

    /// Product of single-qubit vectors `[c0, c1]`, site 0 first.
    pub fn product(sites: &[[C64; 2]]) -> Result<Self> {
        let mut v = CVector::from_element(1, ONE);
        for s in sites {
            v = v.kronecker(&CVector::from_vec(s.to_vec()));
        }
        Self::pure_normalized(sites.len(), v)
    }

    pub fn basis(label: &str) -> Result<Self> {
        let n = label.len();
        check_qubits(n, 1 << n)?;
        let mut v = CVector::zeros(1 << n);
        v[parse_label(label, n)?] = ONE;
        Self::pure(n, v)
    }

    /// `(|0...0> + |1...1>)/sqrt 2`.
    pub fn ghz(n: usize) -> Result<Self> {
        check_qubits(n, 1 << n.min(63))?;
        let mut v = CVector::zeros(1 << n);
        let h = C64::new(0.5f64.sqrt(), 0.0);
        v[0] = h;
        v[(1 << n) - 1] = h;
        Self::pure(n, v)
    }

    pub fn plus_product(n: usize) -> Result<Self> {
        let h = C64::new(0.5f64.sqrt(), 0.0);
        Self::product(&vec![[h, h]; n])
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn is_pure_repr(&self) -> bool {
        matches!(self.repr, Repr::Pure(_))
    }

    pub fn vector(&self) -> Option<&CVector> {
        match &self.repr {
            Repr::Pure(v) => Some(v),
            Repr::Mixed(_) => None,
        }
    }

    pub fn density(&self) -> CMatrix {
        match &self.repr {
            Repr::Pure(v) => v * v.adjoint(),
            Repr::Mixed(m) => m.clone(),
        }
    }

    pub fn to_mixed(&self) -> SpinState {
        Self { n: self.n, repr: Repr::Mixed(self.density()) }
    }

    pub fn purity(&self) -> f64 {
        match &self.repr {
            Repr::Pure(_) => 1.0,
            Repr::Mixed(m) => m.iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    pub fn entropy(&self) -> f64 {
        match &self.repr {
            Repr::Pure(_) => 0.0,
            Repr::Mixed(m) => linalg::spectral_entropy(&linalg::eigvalsh(m)),
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        match &self.repr {
            Repr::Pure(_) => 0.0,
            Repr::Mixed(m) => linalg::eigvalsh(m)[0],
        }
    }

    /// Reduced state on the sorted site set `keep`.
    pub fn reduced_state(&self, keep: &[usize]) -> Result<SpinState> {
        crate::fock::check_keep(keep, self.n)?;
        let dims = vec![2; self.n];
        let m = match &self.repr {
            Repr::Pure(v) => linalg::partial_trace_pure(&dims, keep, v),
            Repr::Mixed(m) => linalg::partial_trace(&dims, keep, m),
        };
        Ok(Self { n: keep.len(), repr: Repr::Mixed(m) })
    }

    /// Reduced-state entropy in nats.
    pub fn subset_entropy(&self, keep: &[usize]) -> Result<f64> {
        Ok(self.reduced_state(keep)?.entropy())
    }

    /// `E(rho) = p0 rho + (1-p0) Z rho Z` on every qubit.
    pub fn dephase_each(&self, p0: f64) -> Result<SpinState> {
        if !(0.5..=1.0).contains(&p0) {
            return Err(Error::InvalidParameter(format!("p0={p0} outside [1/2, 1]")));
        }
        let mut m = self.density();
        dephase_matrix(&mut m, 2.0 * p0 - 1.0);
        Ok(Self { n: self.n, repr: Repr::Mixed(m) })
    }

    /// Trace norm of the coherence block `|a><a| rho |b><b|` between two
    /// computational-basis product states.
    pub fn offdiag_trace_norm(&self, block_a: &str, block_b: &str) -> Result<f64> {
        let a = parse_label(block_a, self.n)?;
        let b = parse_label(block_b, self.n)?;
        Ok(match &self.repr {
            Repr::Pure(v) => (v[a] * v[b].conj()).norm(),
            Repr::Mixed(m) => m[(a, b)].norm(),
        })
    }

    /// `Tr[rho M]` for a full-register matrix.
    pub fn expectation(&self, m: &CMatrix) -> Result<C64> {
        if m.nrows() != self.dim() {
            return Err(Error::DimensionMismatch { left: m.nrows(), right: self.dim() });
        }
        Ok(match &self.repr {
            Repr::Pure(v) => v.dotc(&(m * v)),
            Repr::Mixed(r) => (r * m).trace(),
        })
    }

    pub fn variance(&self, obs: &AdditiveObservable) -> Result<f64> {
        obs.check_qubits(self.n)?;
        let v = match &self.repr {
            Repr::Pure(psi) => {
                let a_psi = obs.apply(psi);
                let mean = psi.dotc(&a_psi).re;
                a_psi.norm_squared() - mean * mean
            }
            Repr::Mixed(rho) => {
                let a_rho = obs.apply_columns(rho);
                let mean = a_rho.trace().re;
                let a2 = obs.apply_columns(&a_rho).trace().re;
                a2 - mean * mean
            }
        };
        Ok(v)
    }

    pub fn mean(&self, obs: &AdditiveObservable) -> Result<f64> {
        obs.check_qubits(self.n)?;
        Ok(match &self.repr {
            Repr::Pure(psi) => psi.dotc(&obs.apply(psi)).re,
            Repr::Mixed(rho) => obs.apply_columns(rho).trace().re,
        })
    }

    /// Invariance under every transposition of neighbouring sites.
    pub fn is_permutation_symmetric(&self, tol: f64) -> bool {
        let d = self.dim();
        let perm = |i: usize, k: usize| -> usize {
            let hi = self.n - 1 - k;
            let lo = hi - 1;
            let b1 = (i >> hi) & 1;
            let b2 = (i >> lo) & 1;
            if b1 == b2 {
                i
            } else {
                i ^ (1 << hi) ^ (1 << lo)
            }
        };
        (0..self.n.saturating_sub(1)).all(|k| match &self.repr {
            Repr::Pure(v) => {
                // symmetric states may pick up no phase, compare overlap
                let ov: C64 = (0..d).map(|i| v[i].conj() * v[perm(i, k)]).sum();
                (ov.norm() - 1.0).abs() < tol && (ov.re - 1.0).abs() < tol
            }
            Repr::Mixed(m) => (0..d).all(|i| (0..d).all(|j| (m[(i, j)] - m[(perm(i, k), perm(j, k))]).norm() < tol)),
        })
    }

    /// Equal-weight or general convex mixture of states on the same register.
    pub fn mixture(parts: &[(f64, &SpinState)]) -> Result<SpinState> {
        let first = parts.first().ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?.1;
        let mut m = CMatrix::zeros(first.dim(), first.dim());
        let mut total = 0.0;
        for (w, s) in parts {
            if s.n != first.n {
                return Err(Error::DimensionMismatch { left: s.n, right: first.n });
            }
            m += s.density().scale(*w);
            total += w;
        }
        Self::mixed(first.n, m.unscale(total))
    }
}

/// Multiplies each element `rho_ij` by `factor^{popcount(i xor j)}`.
pub(crate) fn dephase_matrix(m: &mut CMatrix, factor: f64) {
    let d = m.nrows();
    let n = d.trailing_zeros() as usize;
    let pw: Vec<f64> = (0..=n).map(|k| factor.powi(k as i32)).collect();
    for j in 0..d {
        for i in 0..d {
            let k = (i ^ j).count_ones() as usize;
            if k > 0 {
                m[(i, j)] *= pw[k];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghz_coherence_and_dephasing() {
        let g = SpinState::ghz(4).unwrap();
        assert!((g.offdiag_trace_norm("0000", "1111").unwrap() - 0.5).abs() < 1e-14);
        let gt = 0.03f64;
        let p0 = 0.5 * (1.0 + (-gt).exp());
        let d = g.dephase_each(p0).unwrap();
        let v = d.offdiag_trace_norm("0000", "1111").unwrap();
        assert!((v - 0.5 * (-4.0 * gt).exp()).abs() < 1e-14);
        let full = g.dephase_each(0.5).unwrap();
        assert!(full.offdiag_trace_norm("0000", "1111").unwrap() < 1e-15);
        assert!(g.offdiag_trace_norm("000", "111").is_err());
        assert!(g.offdiag_trace_norm("00a0", "1111").is_err());
        assert!(g.dephase_each(0.3).is_err());
    }

    #[test]
    fn plus_fully_dephased_is_maximally_mixed() {
        let s = SpinState::plus_product(1).unwrap().dephase_each(0.5).unwrap();
        assert!((s.density() - CMatrix::identity(2, 2).scale(0.5)).camax() < 1e-15);
    }

    #[test]
    fn variances() {
        let z = AdditiveObservable::collective(6, Axis::Z);
        assert!((SpinState::ghz(6).unwrap().variance(&z).unwrap() - 36.0).abs() < 1e-12);
        assert!((SpinState::plus_product(6).unwrap().variance(&z).unwrap() - 6.0).abs() < 1e-12);
        let mixed = SpinState::ghz(6).unwrap().to_mixed();
        assert!((mixed.variance(&z).unwrap() - 36.0).abs() < 1e-12);
        assert!(SpinState::basis("0101").unwrap().variance(&AdditiveObservable::collective(4, Axis::Z)).unwrap().abs() < 1e-14);
    }

    #[test]
    fn reduced_ghz() {
        let r = SpinState::ghz(3).unwrap().reduced_state(&[0]).unwrap();
        assert!((r.density() - CMatrix::identity(2, 2).scale(0.5)).camax() < 1e-15);
    }

    #[test]
    fn symmetry_detection() {
        assert!(SpinState::ghz(5).unwrap().is_permutation_symmetric(1e-10));
        assert!(SpinState::plus_product(5).unwrap().to_mixed().is_permutation_symmetric(1e-10));
        assert!(!SpinState::basis("0110").unwrap().is_permutation_symmetric(1e-10));
    }

    #[test]
    fn size_bound() {
        assert!(SpinState::ghz(13).is_err());
        assert!(SpinState::ghz(0).is_err());
    }
}
