use crate::error::{Error, Result};
use crate::fock::{check_mode, TAIL_TOL};
use crate::linalg::{self, CMatrix, ZERO};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    Annihilate,
    Create,
}

/// Operator on a subset of modes, in the product basis of those modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperator {
    acts_on: Vec<usize>,
    local_dims: Vec<usize>,
    matrix: CMatrix,
}

impl ModeOperator {
    pub fn new(acts_on: Vec<usize>, local_dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        if acts_on.len() != local_dims.len() || acts_on.is_empty() {
            return Err(Error::InvalidParameter("mode list and dimensions disagree".into()));
        }
        for (i, a) in acts_on.iter().enumerate() {
            if acts_on[..i].contains(a) {
                return Err(Error::InvalidParameter(format!("mode {a} listed twice")));
            }
        }
        let d: usize = local_dims.iter().product();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch { left: matrix.nrows(), right: d });
        }
        Ok(Self { acts_on, local_dims, matrix })
    }

    pub fn acts_on(&self) -> &[usize] {
        &self.acts_on
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> ModeOperator {
        Self { matrix: self.matrix.adjoint(), ..self.clone() }
    }

    /// `self * other` for operators on the same modes.
    pub fn compose(&self, other: &ModeOperator) -> Result<ModeOperator> {
        if self.acts_on != other.acts_on || self.local_dims != other.local_dims {
            return Err(Error::InvalidParameter("operators act on different modes".into()));
        }
        Ok(Self { matrix: &self.matrix * &other.matrix, ..self.clone() })
    }

    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(&self.matrix)
    }

    pub(crate) fn check_against(&self, truncations: &[usize]) -> Result<()> {
        for (&m, &d) in self.acts_on.iter().zip(&self.local_dims) {
            check_mode(m, truncations.len())?;
            if truncations[m] != d {
                return Err(Error::DimensionMismatch { left: d, right: truncations[m] });
            }
        }
        Ok(())
    }
}

fn single_mode_dim(truncations: &[usize], mode: usize) -> Result<usize> {
    check_mode(mode, truncations.len())?;
    let c = truncations[mode];
    if c < 2 {
        return Err(Error::InvalidParameter("truncation must be at least 2".into()));
    }
    Ok(c)
}

fn annihilation_matrix(c: usize) -> CMatrix {
    let mut a = CMatrix::zeros(c, c);
    for n in 1..c {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn ladder(truncations: &[usize], mode: usize, kind: LadderKind) -> Result<ModeOperator> {
    let c = single_mode_dim(truncations, mode)?;
    let a = annihilation_matrix(c);
    let m = match kind {
        LadderKind::Annihilate => a,
        LadderKind::Create => a.adjoint(),
    };
    ModeOperator::new(vec![mode], vec![c], m)
}

pub fn number(truncations: &[usize], mode: usize) -> Result<ModeOperator> {
    check_mode(mode, truncations.len())?;
    let c = truncations[mode];
    let m = CMatrix::from_fn(c, c, |i, j| if i == j { C64::new(i as f64, 0.0) } else { ZERO });
    ModeOperator::new(vec![mode], vec![c], m)
}

/// Top-two-level mass of the first column, i.e. of `U|0>`.
fn vacuum_image_tail(u: &CMatrix) -> f64 {
    let c = u.nrows();
    (c.saturating_sub(2)..c).map(|i| u[(i, 0)].norm_sqr()).sum()
}

/// `D(alpha) = exp(alpha a^dagger - alpha^* a)` on the truncated space.
pub fn displace(truncations: &[usize], mode: usize, alpha: C64) -> Result<ModeOperator> {
    let c = single_mode_dim(truncations, mode)?;
    let a = annihilation_matrix(c);
    let g = a.adjoint() * alpha - &a * alpha.conj();
    // exp(G) = exp(-i H) with H = i G Hermitian
    let h = g * C64::i();
    let u = linalg::unitary_exp(&h, 1.0);
    let tail = vacuum_image_tail(&u);
    if tail >= TAIL_TOL {
        return Err(Error::Truncation { tail, tol: TAIL_TOL });
    }
    ModeOperator::new(vec![mode], vec![c], u)
}

/// `S(xi) = exp((xi^* a^2 - xi a^dagger^2)/2)`.
pub fn squeeze_complex(truncations: &[usize], mode: usize, xi: C64) -> Result<ModeOperator> {
    let c = single_mode_dim(truncations, mode)?;
    let a = annihilation_matrix(c);
    let a2 = &a * &a;
    let g = (&a2 * xi.conj() - a2.adjoint() * xi).scale(0.5);
    let h = g * C64::i();
    let u = linalg::unitary_exp(&h, 1.0);
    let tail = vacuum_image_tail(&u);
    if tail >= TAIL_TOL {
        return Err(Error::Truncation { tail, tol: TAIL_TOL });
    }
    ModeOperator::new(vec![mode], vec![c], u)
}

/// Real squeezing; `r > 0` reduces the variance of `x = a + a^dagger` to `e^{-2r}`.
pub fn squeeze(truncations: &[usize], mode: usize, r: f64) -> Result<ModeOperator> {
    squeeze_complex(truncations, mode, C64::new(r, 0.0))
}

/// `exp(theta (a^dagger b - a b^dagger))` with `cos^2 theta = transmissivity`.
///
/// Under this convention `|alpha>|beta>` maps to
/// `|alpha cos + beta sin>|beta cos - alpha sin>`.
pub fn beam_splitter(truncations: &[usize], modes: (usize, usize), transmissivity: f64) -> Result<ModeOperator> {
    let (i, j) = modes;
    check_mode(i, truncations.len())?;
    check_mode(j, truncations.len())?;
    if i == j {
        return Err(Error::InvalidParameter("beam splitter needs two distinct modes".into()));
    }
    if !(0.0..=1.0).contains(&transmissivity) {
        return Err(Error::InvalidParameter(format!("transmissivity {transmissivity} outside [0,1]")));
    }
    let c = truncations[i];
    if truncations[j] != c {
        return Err(Error::DimensionMismatch { left: c, right: truncations[j] });
    }
    let theta = transmissivity.sqrt().acos();
    let mut u = CMatrix::zeros(c * c, c * c);
    // block-diagonal in the total photon number
    for total in 0..=(2 * c - 2) {
        let lo = total.saturating_sub(c - 1);
        let hi = total.min(c - 1);
        let ks: Vec<usize> = (lo..=hi).collect();
        let b = ks.len();
        let mut h = CMatrix::zeros(b, b);
        for (p, &k) in ks.iter().enumerate() {
            let l = total - k;
            // a^dagger b |k,l> = sqrt((k+1) l) |k+1,l-1>
            if l >= 1 && k + 1 < c {
                let q = p + 1;
                let amp = theta * (((k + 1) * l) as f64).sqrt();
                // G[q,p] = amp, G[p,q] = -amp; H = iG
                h[(q, p)] = C64::new(0.0, amp);
                h[(p, q)] = C64::new(0.0, -amp);
            }
        }
        let blk = linalg::unitary_exp(&h, 1.0);
        for (p, &k) in ks.iter().enumerate() {
            for (q, &k2) in ks.iter().enumerate() {
                u[(k * c + total - k, k2 * c + total - k2)] = blk[(p, q)];
            }
        }
    }
    ModeOperator::new(vec![i, j], vec![c, c], u)
}
