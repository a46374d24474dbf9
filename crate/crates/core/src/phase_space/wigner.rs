use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fock::DensityOperator;
use crate::phase_space::special::{displacement_matrix, hermite_functions, trapezoid};
use crate::C64;

/// Wigner function of one mode on a rectangular `(x, p)` grid, normalized
/// so that it integrates to one over `dx dp` with `x = a + a^dagger`.
#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
    /// `values[i][j]` at `(xs[i], ps[j])`.
    pub values: Vec<Vec<f64>>,
}

impl WignerGrid {
    pub fn min(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn integral(&self) -> f64 {
        let rows: Vec<f64> = self.values.iter().map(|row| trapezoid(&self.ps, row)).collect();
        trapezoid(&self.xs, &rows)
    }
}

fn single_mode(state: &DensityOperator, mode: usize) -> Result<DensityOperator> {
    if state.mode_count() == 1 && mode == 0 {
        Ok(state.clone())
    } else {
        state.partial_trace(&[mode])
    }
}

fn check_coverage(rho: &DensityOperator, xs: &[f64], ps: &[f64]) -> Result<()> {
    for (angle, grid) in [(0.0, xs), (0.5 * PI, ps)] {
        if grid.len() < 2 {
            return Err(Error::InvalidParameter("grid needs at least two points".into()));
        }
        let fine = refine(grid);
        let dens = marginal_values(rho, angle, &fine);
        let mass = trapezoid(&fine, &dens);
        if 1.0 - mass > 1e-4 {
            return Err(Error::InvalidParameter(format!("grid too small: mass deficit {:.2e}", 1.0 - mass)));
        }
    }
    Ok(())
}

/// Uniform grid over the span of `grid` with spacing at most 0.05.
fn refine(grid: &[f64]) -> Vec<f64> {
    let lo = grid[0];
    let hi = grid[grid.len() - 1];
    let n = (((hi - lo) / 0.05).ceil() as usize).max(2);
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

fn wigner_value(m: &crate::CMatrix, x: f64, p: f64) -> f64 {
    let c = m.nrows();
    // D(beta) Pi D(beta)^dagger = D(2 beta) Pi, with 2 beta = x + i p
    let d = displacement_matrix(C64::new(x, p), c);
    let mut acc = 0.0;
    for k in 0..c {
        let mut s = C64::new(0.0, 0.0);
        for j in 0..c {
            s += m[(k, j)] * d[(j, k)];
        }
        acc += if k % 2 == 0 { s.re } else { -s.re };
    }
    acc / (2.0 * PI)
}

/// Wigner function via the displaced-parity formula, using exact
/// displacement matrix elements so no padding of the state is needed.
pub fn wigner(state: &DensityOperator, mode: usize, xs: &[f64], ps: &[f64]) -> Result<WignerGrid> {
    let rho = single_mode(state, mode)?;
    check_coverage(&rho, xs, ps)?;
    let m = rho.matrix();
    let values = xs.iter().map(|&x| ps.iter().map(|&p| wigner_value(m, x, p)).collect()).collect();
    Ok(WignerGrid { xs: xs.to_vec(), ps: ps.to_vec(), values })
}

/// Wigner function of one mode at scattered `(x, p)` points.
pub fn wigner_at(state: &DensityOperator, mode: usize, points: &[(f64, f64)]) -> Result<Vec<f64>> {
    let rho = single_mode(state, mode)?;
    Ok(points.iter().map(|&(x, p)| wigner_value(rho.matrix(), x, p)).collect())
}

/// Born-rule density of `x_phi = a e^{-i phi} + a^dagger e^{i phi}`.
#[derive(Debug, Clone)]
pub struct QuadratureDistribution {
    pub angle: f64,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
}

impl QuadratureDistribution {
    pub fn mass(&self) -> f64 {
        trapezoid(&self.grid, &self.density)
    }

    pub fn mean(&self) -> f64 {
        let f: Vec<f64> = self.grid.iter().zip(&self.density).map(|(x, p)| x * p).collect();
        trapezoid(&self.grid, &f)
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        let f: Vec<f64> = self.grid.iter().zip(&self.density).map(|(x, p)| (x - mu).powi(2) * p).collect();
        trapezoid(&self.grid, &f)
    }

    /// Grid positions of local maxima whose height exceeds `rel` times the global maximum.
    pub fn peaks(&self, rel: f64) -> Vec<f64> {
        let top = self.density.iter().copied().fold(0.0, f64::max);
        (1..self.density.len().saturating_sub(1))
            .filter(|&i| {
                let d = &self.density;
                d[i] >= d[i - 1] && d[i] > d[i + 1] && d[i] > rel * top
            })
            .map(|i| self.grid[i])
            .collect()
    }
}

fn marginal_values(rho: &DensityOperator, angle: f64, grid: &[f64]) -> Vec<f64> {
    let c = rho.dim();
    let m = rho.matrix();
    let phases: Vec<C64> = (0..c).map(|n| C64::from_polar(1.0, -angle * n as f64)).collect();
    grid.iter()
        .map(|&x| {
            let h = hermite_functions(x, c);
            let u: Vec<C64> = (0..c).map(|n| phases[n] * h[n]).collect();
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..c {
                if h[i] == 0.0 {
                    continue;
                }
                let mut row = C64::new(0.0, 0.0);
                for j in 0..c {
                    row += m[(i, j)] * u[j].conj();
                }
                acc += u[i] * row;
            }
            acc.re
        })
        .collect()
}

/// Grid wide enough to hold the marginal of `mode`: `+-(2 sqrt<n> + 8)`.
pub fn default_quadrature_grid(state: &DensityOperator, mode: usize, step: f64) -> Vec<f64> {
    let n = state.mode_mean_photon_number(mode).max(0.0);
    let half = 2.0 * n.sqrt() + 8.0;
    let k = (half / step).ceil() as i64;
    (-k..=k).map(|i| i as f64 * step).collect()
}

pub fn quadrature_distribution(state: &DensityOperator, mode: usize, angle: f64, grid: &[f64]) -> Result<QuadratureDistribution> {
    if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("grid must be strictly increasing with two or more points".into()));
    }
    let rho = single_mode(state, mode)?;
    let density = marginal_values(&rho, angle, grid);
    let q = QuadratureDistribution { angle, grid: grid.to_vec(), density };
    let deficit = 1.0 - q.mass();
    if deficit > 1e-4 {
        return Err(Error::InvalidParameter(format!("grid too small: mass deficit {deficit:.2e}")));
    }
    Ok(q)
}
