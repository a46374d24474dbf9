use crate::error::{Error, Result};
use crate::fock::DensityOperator;
use crate::linalg::{self, CMatrix};
use crate::phase_space::special::displacement_matrix;
use crate::C64;

/// `chi(xi) = Tr[rho D(xi_1) x ... x D(xi_M)]`.
pub fn characteristic_function(state: &DensityOperator, xi: &[C64]) -> Result<C64> {
    let trunc = state.truncations();
    if xi.len() != trunc.len() {
        return Err(Error::DimensionMismatch { left: xi.len(), right: trunc.len() });
    }
    let ds: Vec<CMatrix> = xi.iter().zip(trunc).map(|(&x, &c)| displacement_matrix(x, c)).collect();
    let d = state.dim();
    let digits: Vec<Vec<usize>> = (0..d).map(|i| linalg::digits(i, trunc)).collect();
    let rho = state.matrix();
    let mut acc = C64::new(0.0, 0.0);
    // sum_{n,m} rho_{n m} prod_k D_k[m_k, n_k]
    for n in 0..d {
        for m in 0..d {
            let r = rho[(n, m)];
            if r.re == 0.0 && r.im == 0.0 {
                continue;
            }
            let mut f = r;
            for (k, dk) in ds.iter().enumerate() {
                f *= dk[(digits[m][k], digits[n][k])];
            }
            acc += f;
        }
    }
    Ok(acc)
}

/// Samples of the characteristic function at a list of multi-mode points.
#[derive(Debug, Clone)]
pub struct CharacteristicGrid {
    pub points: Vec<Vec<C64>>,
    pub values: Vec<C64>,
    pub extent: f64,
    pub spacing: f64,
}

impl CharacteristicGrid {
    /// Largest `|chi|`; a value above one signals a non-physical input.
    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Square grid in the phase space of `mode`, with all other `xi` set to zero.
pub fn characteristic_grid(state: &DensityOperator, mode: usize, extent: f64, points_per_axis: usize) -> Result<CharacteristicGrid> {
    crate::fock::check_keep(&[mode], state.mode_count())?;
    if points_per_axis < 2 || !(extent > 0.0) {
        return Err(Error::InvalidParameter("grid needs at least two points and positive extent".into()));
    }
    let reduced = state.partial_trace(&[mode])?;
    let spacing = 2.0 * extent / (points_per_axis - 1) as f64;
    let mut points = Vec::new();
    let mut values = Vec::new();
    for i in 0..points_per_axis {
        for j in 0..points_per_axis {
            let xi = C64::new(-extent + i as f64 * spacing, -extent + j as f64 * spacing);
            values.push(characteristic_function(&reduced, &[xi])?);
            let mut p = vec![C64::new(0.0, 0.0); state.mode_count()];
            p[mode] = xi;
            points.push(p);
        }
    }
    Ok(CharacteristicGrid { points, values, extent, spacing })
}
