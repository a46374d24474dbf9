use crate::error::{Error, Result};
use crate::fock::{check_mode, ModeOperator};
use crate::linalg::{self, CMatrix, CVector, ZERO};
use crate::C64;

/// Normalized pure state on a product of truncated Fock spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct FockPureState {
    truncations: Vec<usize>,
    amplitudes: CVector,
}

fn check_truncations(truncations: &[usize], len: usize) -> Result<()> {
    if truncations.is_empty() || truncations.iter().any(|&t| t == 0) {
        return Err(Error::InvalidParameter("truncations must be nonempty and positive".into()));
    }
    let total: usize = truncations.iter().product();
    if total != len {
        return Err(Error::DimensionMismatch { left: total, right: len });
    }
    Ok(())
}

/// Mass held by the top two levels of `mode`, given the diagonal populations.
fn tail_from_populations(truncations: &[usize], mode: usize, pop: impl Iterator<Item = f64>) -> f64 {
    let st = linalg::strides(truncations);
    let c = truncations[mode];
    let lo = c.saturating_sub(2);
    pop.enumerate()
        .filter(|(i, _)| (i / st[mode]) % c >= lo)
        .map(|(_, p)| p)
        .sum()
}

impl FockPureState {
    /// Wraps an amplitude vector; the norm must be 1 within 1e-10.
    pub fn new(truncations: Vec<usize>, amplitudes: CVector) -> Result<Self> {
        check_truncations(&truncations, amplitudes.len())?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("norm {norm} differs from 1")));
        }
        Ok(Self { truncations, amplitudes })
    }

    /// Normalizes `amplitudes` before wrapping them.
    pub fn normalized(truncations: Vec<usize>, amplitudes: CVector) -> Result<Self> {
        check_truncations(&truncations, amplitudes.len())?;
        let norm = amplitudes.norm();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        Ok(Self { truncations, amplitudes: amplitudes.unscale(norm) })
    }

    pub fn vacuum(truncations: Vec<usize>) -> Result<Self> {
        Self::basis(truncations.clone(), &vec![0; truncations.len()])
    }

    /// Number state `|n_0, n_1, ...>`.
    pub fn basis(truncations: Vec<usize>, occupation: &[usize]) -> Result<Self> {
        if occupation.len() != truncations.len() {
            return Err(Error::DimensionMismatch { left: occupation.len(), right: truncations.len() });
        }
        for (&n, &c) in occupation.iter().zip(&truncations) {
            if n >= c {
                return Err(Error::Truncation { tail: 1.0, tol: 0.0 });
            }
        }
        let st = linalg::strides(&truncations);
        let total: usize = truncations.iter().product();
        let mut v = CVector::zeros(total);
        v[occupation.iter().zip(&st).map(|(n, s)| n * s).sum::<usize>()] = C64::new(1.0, 0.0);
        Self::new(truncations, v)
    }

    /// Product of single-mode states, mode 0 first.
    pub fn product(factors: &[FockPureState]) -> Result<Self> {
        let mut iter = factors.iter();
        let first = iter.next().ok_or_else(|| Error::InvalidParameter("empty product".into()))?;
        let mut truncations = first.truncations.clone();
        let mut amps = first.amplitudes.clone();
        for f in iter {
            truncations.extend_from_slice(&f.truncations);
            amps = amps.kronecker(&f.amplitudes);
        }
        Self::normalized(truncations, amps)
    }

    pub fn truncations(&self) -> &[usize] {
        &self.truncations
    }

    pub fn mode_count(&self) -> usize {
        self.truncations.len()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    /// Probability mass in the top two Fock levels of `mode`.
    pub fn tail_mass(&self, mode: usize) -> f64 {
        tail_from_populations(&self.truncations, mode, self.amplitudes.iter().map(|a| a.norm_sqr()))
    }

    /// Largest [`tail_mass`](Self::tail_mass) over modes with more than two
    /// levels; two-level modes are exact qubit-like subspaces.
    pub fn max_tail_mass(&self) -> f64 {
        (0..self.mode_count()).filter(|&m| self.truncations[m] > 2).map(|m| self.tail_mass(m)).fold(0.0, f64::max)
    }

    /// Fails when any mode's top-two-level mass reaches `tol`.
    pub fn check_tail(&self, tol: f64) -> Result<()> {
        let tail = self.max_tail_mass();
        if tail >= tol {
            return Err(Error::Truncation { tail, tol });
        }
        Ok(())
    }

    pub fn inner(&self, other: &FockPureState) -> Result<C64> {
        if self.truncations != other.truncations {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &FockPureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            truncations: self.truncations.clone(),
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }

    /// Populations of the photon number in `mode`.
    pub fn mode_populations(&self, mode: usize) -> Vec<f64> {
        let st = linalg::strides(&self.truncations);
        let c = self.truncations[mode];
        let mut p = vec![0.0; c];
        for (i, a) in self.amplitudes.iter().enumerate() {
            p[(i / st[mode]) % c] += a.norm_sqr();
        }
        p
    }

    /// Distribution of the total photon number over all modes.
    pub fn total_number_distribution(&self) -> Vec<f64> {
        let max: usize = self.truncations.iter().map(|c| c - 1).sum();
        let mut p = vec![0.0; max + 1];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let n: usize = linalg::digits(i, &self.truncations).iter().sum();
            p[n] += a.norm_sqr();
        }
        p
    }

    pub fn mode_mean_photon_number(&self, mode: usize) -> f64 {
        self.mode_populations(mode)
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    pub fn mean_photon_number(&self) -> f64 {
        (0..self.mode_count()).map(|m| self.mode_mean_photon_number(m)).sum()
    }

    /// `<a_mode>`.
    pub fn expect_annihilation(&self, mode: usize) -> C64 {
        let st = linalg::strides(&self.truncations);
        let c = self.truncations[mode];
        let s = st[mode];
        let mut acc = ZERO;
        for i in 0..self.dim() {
            let n = (i / s) % c;
            if n >= 1 {
                acc += self.amplitudes[i - s].conj() * self.amplitudes[i] * (n as f64).sqrt();
            }
        }
        acc
    }

    /// Applies an operator without renormalizing.
    pub fn apply_raw(&self, op: &ModeOperator) -> Result<CVector> {
        op.check_against(&self.truncations)?;
        Ok(linalg::apply_local(&self.truncations, op.acts_on(), op.matrix(), &self.amplitudes))
    }

    /// Applies an operator and renormalizes; fails if the result vanishes.
    pub fn apply(&self, op: &ModeOperator) -> Result<FockPureState> {
        let v = self.apply_raw(op)?;
        Self::normalized(self.truncations.clone(), v)
    }

    /// Reduced state on the sorted mode set `keep`.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityOperator> {
        check_keep(keep, self.mode_count())?;
        let m = linalg::partial_trace_pure(&self.truncations, keep, &self.amplitudes);
        Ok(DensityOperator { truncations: keep.iter().map(|&k| self.truncations[k]).collect(), matrix: m })
    }

    /// Re-embeds the state with new per-mode cutoffs, dropping (and
    /// renormalizing away) any amplitude above a reduced cutoff.
    /// Returns the discarded probability mass.
    pub fn resized(&self, truncations: &[usize]) -> Result<(FockPureState, f64)> {
        if truncations.len() != self.mode_count() {
            return Err(Error::DimensionMismatch { left: truncations.len(), right: self.mode_count() });
        }
        let st_new = linalg::strides(truncations);
        let total: usize = truncations.iter().product();
        let mut v = CVector::zeros(total);
        let mut lost = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let d = linalg::digits(i, &self.truncations);
            if d.iter().zip(truncations).all(|(n, c)| n < c) {
                v[d.iter().zip(&st_new).map(|(n, s)| n * s).sum::<usize>()] = *a;
            } else {
                lost += a.norm_sqr();
            }
        }
        Ok((Self::normalized(truncations.to_vec(), v)?, lost))
    }

    /// Global phase chosen so the largest amplitude is real and positive.
    pub fn phase_fixed(&self) -> FockPureState {
        let (imax, _) = self
            .amplitudes
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, a)| if a.norm() > acc.1 { (i, a.norm()) } else { acc });
        let ph = self.amplitudes[imax].conj() / self.amplitudes[imax].norm();
        FockPureState { truncations: self.truncations.clone(), amplitudes: self.amplitudes.map(|a| a * ph) }
    }
}

pub(crate) fn check_keep(keep: &[usize], count: usize) -> Result<()> {
    if keep.is_empty() {
        return Err(Error::InvalidParameter("keep set is empty".into()));
    }
    for (i, &k) in keep.iter().enumerate() {
        check_mode(k, count)?;
        if i > 0 && keep[i - 1] >= k {
            return Err(Error::InvalidParameter("keep set must be strictly increasing".into()));
        }
    }
    Ok(())
}

/// Mixed state on a product of truncated Fock spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    truncations: Vec<usize>,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates hermiticity (1e-10) and unit trace (1e-9).
    pub fn new(truncations: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { left: matrix.nrows(), right: matrix.ncols() });
        }
        check_truncations(&truncations, matrix.nrows())?;
        let herm = linalg::hermiticity_defect(&matrix);
        if herm > 1e-10 {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:.2e})")));
        }
        let tr = linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        Ok(Self { truncations, matrix: linalg::hermitize(&matrix) })
    }

    /// Hermitizes and rescales to unit trace before validation.
    pub fn normalized(truncations: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let tr = linalg::trace(&matrix).re;
        if !(tr > 1e-300) || !tr.is_finite() {
            return Err(Error::InvalidState("zero or non-finite trace".into()));
        }
        Self::new(truncations, linalg::hermitize(&matrix).unscale(tr))
    }

    /// Convex combination of states sharing truncations.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?.1;
        let mut m = CMatrix::zeros(first.dim(), first.dim());
        for (w, s) in parts {
            if s.truncations != first.truncations {
                return Err(Error::DimensionMismatch { left: s.dim(), right: first.dim() });
            }
            if *w < 0.0 {
                return Err(Error::InvalidParameter("negative mixture weight".into()));
            }
            m += s.matrix.scale(*w);
        }
        Self::normalized(first.truncations.clone(), m)
    }

    pub fn truncations(&self) -> &[usize] {
        &self.truncations
    }

    pub fn mode_count(&self) -> usize {
        self.truncations.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Smallest eigenvalue; PSD within tolerance when above -1e-9.
    pub fn min_eigenvalue(&self) -> f64 {
        linalg::eigvalsh(&self.matrix)[0]
    }

    pub fn check_psd(&self) -> Result<()> {
        let m = self.min_eigenvalue();
        if m < -1e-9 {
            return Err(Error::InvalidState(format!("negative eigenvalue {m:.3e}")));
        }
        Ok(())
    }

    pub fn tail_mass(&self, mode: usize) -> f64 {
        tail_from_populations(&self.truncations, mode, self.matrix.diagonal().iter().map(|d| d.re))
    }

    /// See [`FockPureState::max_tail_mass`].
    pub fn max_tail_mass(&self) -> f64 {
        (0..self.mode_count()).filter(|&m| self.truncations[m] > 2).map(|m| self.tail_mass(m)).fold(0.0, f64::max)
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        check_keep(keep, self.mode_count())?;
        let m = linalg::partial_trace(&self.truncations, keep, &self.matrix);
        Ok(DensityOperator { truncations: keep.iter().map(|&k| self.truncations[k]).collect(), matrix: m })
    }

    /// `U rho U^dagger`.
    pub fn conjugate(&self, op: &ModeOperator) -> Result<DensityOperator> {
        op.check_against(&self.truncations)?;
        let m = linalg::conjugate_local(&self.truncations, op.acts_on(), op.matrix(), &self.matrix);
        Ok(DensityOperator { truncations: self.truncations.clone(), matrix: linalg::hermitize(&m) })
    }

    /// Applies a (possibly non-unitary) operator and renormalizes, e.g. a
    /// measurement projector. Returns the state and the pre-normalization trace.
    pub fn project(&self, op: &ModeOperator) -> Result<(DensityOperator, f64)> {
        op.check_against(&self.truncations)?;
        let m = linalg::conjugate_local(&self.truncations, op.acts_on(), op.matrix(), &self.matrix);
        let p = linalg::trace(&m).re;
        Ok((Self::normalized(self.truncations.clone(), m)?, p))
    }

    pub fn mode_populations(&self, mode: usize) -> Vec<f64> {
        let st = linalg::strides(&self.truncations);
        let c = self.truncations[mode];
        let mut p = vec![0.0; c];
        for (i, d) in self.matrix.diagonal().iter().enumerate() {
            p[(i / st[mode]) % c] += d.re;
        }
        p
    }

    pub fn total_number_distribution(&self) -> Vec<f64> {
        let max: usize = self.truncations.iter().map(|c| c - 1).sum();
        let mut p = vec![0.0; max + 1];
        for (i, d) in self.matrix.diagonal().iter().enumerate() {
            let n: usize = linalg::digits(i, &self.truncations).iter().sum();
            p[n] += d.re;
        }
        p
    }

    pub fn mode_mean_photon_number(&self, mode: usize) -> f64 {
        self.mode_populations(mode)
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    pub fn expect_annihilation(&self, mode: usize) -> C64 {
        let st = linalg::strides(&self.truncations);
        let c = self.truncations[mode];
        let s = st[mode];
        let mut acc = ZERO;
        for i in 0..self.dim() {
            let n = (i / s) % c;
            if n + 1 < c {
                acc += self.matrix[(i + s, i)] * ((n + 1) as f64).sqrt();
            }
        }
        acc
    }

    /// Re-embeds with new cutoffs; see [`FockPureState::resized`].
    pub fn resized(&self, truncations: &[usize]) -> Result<(DensityOperator, f64)> {
        if truncations.len() != self.mode_count() {
            return Err(Error::DimensionMismatch { left: truncations.len(), right: self.mode_count() });
        }
        let st_new = linalg::strides(truncations);
        let total: usize = truncations.iter().product();
        let map: Vec<Option<usize>> = (0..self.dim())
            .map(|i| {
                let d = linalg::digits(i, &self.truncations);
                d.iter()
                    .zip(truncations)
                    .all(|(n, c)| n < c)
                    .then(|| d.iter().zip(&st_new).map(|(n, s)| n * s).sum())
            })
            .collect();
        let mut m = CMatrix::zeros(total, total);
        let mut lost = 0.0;
        for i in 0..self.dim() {
            match map[i] {
                Some(a) => {
                    for j in 0..self.dim() {
                        if let Some(b) = map[j] {
                            m[(a, b)] = self.matrix[(i, j)];
                        }
                    }
                }
                None => lost += self.matrix[(i, i)].re,
            }
        }
        Ok((Self::normalized(truncations.to_vec(), m)?, lost))
    }

    pub(crate) fn from_parts_unchecked(truncations: Vec<usize>, matrix: CMatrix) -> Self {
        Self { truncations, matrix }
    }
}

impl From<&FockPureState> for DensityOperator {
    fn from(s: &FockPureState) -> Self {
        s.to_density()
    }
}
