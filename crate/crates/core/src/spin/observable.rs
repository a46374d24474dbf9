use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, ONE, ZERO};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

pub fn pauli(axis: Axis) -> CMatrix {
    let i = C64::i();
    match axis {
        Axis::X => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        Axis::Y => CMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]),
        Axis::Z => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    }
}

/// `n . sigma` for a real 3-vector.
pub fn bloch_operator(n: [f64; 3]) -> CMatrix {
    pauli(Axis::X).scale(n[0]) + pauli(Axis::Y).scale(n[1]) + pauli(Axis::Z).scale(n[2])
}

/// One summand of an additive observable, acting on `sites`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTerm {
    pub sites: Vec<usize>,
    pub matrix: CMatrix,
}

/// `A = sum_k A_k` with each `A_k` supported on its own group of sites and
/// normalized to spectrum within `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveObservable {
    n: usize,
    terms: Vec<LocalTerm>,
}

impl AdditiveObservable {
    pub fn new(n: usize, terms: Vec<LocalTerm>) -> Result<Self> {
        let mut used = vec![false; n];
        for t in &terms {
            if t.sites.is_empty() || t.sites.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter("term sites must be nonempty and increasing".into()));
            }
            for &s in &t.sites {
                if s >= n {
                    return Err(Error::OutOfRange { index: s, count: n });
                }
                if used[s] {
                    return Err(Error::InvalidParameter(format!("site {s} appears in two terms")));
                }
                used[s] = true;
            }
            let d = 1 << t.sites.len();
            if t.matrix.nrows() != d || t.matrix.ncols() != d {
                return Err(Error::DimensionMismatch { left: t.matrix.nrows(), right: d });
            }
            if linalg::hermiticity_defect(&t.matrix) > 1e-12 {
                return Err(Error::InvalidParameter("local term not Hermitian".into()));
            }
            let ev = linalg::eigvalsh(&t.matrix);
            if ev[0] < -1.0 - 1e-12 || ev[d - 1] > 1.0 + 1e-12 {
                return Err(Error::InvalidParameter("local spectrum outside [-1, 1]".into()));
            }
        }
        Ok(Self { n, terms })
    }

    /// One 2x2 term per site.
    pub fn from_locals(locals: Vec<CMatrix>) -> Result<Self> {
        let n = locals.len();
        let terms = locals
            .into_iter()
            .enumerate()
            .map(|(k, m)| LocalTerm { sites: vec![k], matrix: m })
            .collect();
        Self::new(n, terms)
    }

    /// `sum_k n_k . sigma_k` for unit Bloch vectors.
    pub fn from_bloch(dirs: &[[f64; 3]]) -> Result<Self> {
        Self::from_locals(dirs.iter().map(|&d| bloch_operator(d)).collect())
    }

    /// Collective spin component `sum_k sigma_k^axis`.
    pub fn collective(n: usize, axis: Axis) -> Self {
        let terms = (0..n).map(|k| LocalTerm { sites: vec![k], matrix: pauli(axis) }).collect();
        Self { n, terms }
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    /// Site groups when any term spans more than one site.
    pub fn grouping(&self) -> Option<Vec<Vec<usize>>> {
        self.terms
            .iter()
            .any(|t| t.sites.len() > 1)
            .then(|| self.terms.iter().map(|t| t.sites.clone()).collect())
    }

    pub(crate) fn check_qubits(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: n });
        }
        Ok(())
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        let dims = vec![2; self.n];
        let mut out = CVector::zeros(v.len());
        for t in &self.terms {
            out += linalg::apply_local(&dims, &t.sites, &t.matrix, v);
        }
        out
    }

    /// `A M` column by column.
    pub fn apply_columns(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(m.nrows(), m.ncols());
        for j in 0..m.ncols() {
            out.set_column(j, &self.apply(&m.column(j).into_owned()));
        }
        out
    }

    pub fn to_matrix(&self) -> CMatrix {
        self.apply_columns(&CMatrix::identity(1 << self.n, 1 << self.n))
    }

    /// Diagonal of `A` when every term is diagonal in the computational basis.
    pub fn diagonal(&self) -> Option<Vec<f64>> {
        let diag_terms = self.terms.iter().all(|t| {
            let d = t.matrix.nrows();
            (0..d).all(|i| (0..d).all(|j| i == j || t.matrix[(i, j)].norm() < 1e-14))
        });
        if !diag_terms {
            return None;
        }
        let dim = 1 << self.n;
        Some(
            (0..dim)
                .map(|i| {
                    self.terms
                        .iter()
                        .map(|t| {
                            let mut local = 0;
                            for &s in &t.sites {
                                local = (local << 1) | ((i >> (self.n - 1 - s)) & 1);
                            }
                            t.matrix[(local, local)].re
                        })
                        .sum()
                })
                .collect(),
        )
    }
}

/// Hermitian idempotent on the full register.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorSpec {
    matrix: CMatrix,
}

impl ProjectorSpec {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { left: matrix.nrows(), right: matrix.ncols() });
        }
        if linalg::hermiticity_defect(&matrix) > 1e-9 {
            return Err(Error::InvalidParameter("projector not Hermitian".into()));
        }
        if (&matrix * &matrix - &matrix).camax() > 1e-9 {
            return Err(Error::InvalidParameter("projector not idempotent".into()));
        }
        Ok(Self { matrix })
    }

    /// `|v><v|` for a normalized `v`.
    pub fn from_vector(v: &CVector) -> Result<Self> {
        let nv = v.norm();
        if !(nv > 0.0) {
            return Err(Error::InvalidParameter("zero vector".into()));
        }
        let u = v.unscale(nv);
        Self::new(&u * u.adjoint())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}
