use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::fock::state::check_keep;
use crate::fock::DensityOperator;
use crate::linalg::{self, CMatrix};

/// Photon loss on `modes` for dimensionless time `tau`, solved exactly with
/// the binomial Kraus decomposition `K_k|n> = sqrt(C(n,k)(1-e^{-tau})^k e^{-tau(n-k)}) |n-k>`.
pub fn apply_loss(state: &DensityOperator, tau: f64, modes: &[usize]) -> Result<DensityOperator> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("tau must be finite and non-negative, got {tau}")));
    }
    if modes.is_empty() || tau == 0.0 {
        return Ok(state.clone());
    }
    check_keep(modes, state.mode_count())?;
    let trunc = state.truncations().to_vec();
    let st = linalg::strides(&trunc);
    let mut rho = state.matrix().clone();
    let eta = (-tau).exp();
    let (ln_eta, ln_loss) = (-tau, (-(-tau).exp_m1()).ln());
    for &m in modes {
        let c = trunc[m];
        let s = st[m];
        // sqrt of the binomial weights, table[n][k]
        let table: Vec<Vec<f64>> = (0..c)
            .map(|n| {
                (0..=n)
                    .map(|k| {
                        if eta == 1.0 {
                            return if k == 0 { 1.0 } else { 0.0 };
                        }
                        let lk = if k == 0 { 0.0 } else { k as f64 * ln_loss };
                        (0.5 * (ln_binomial(n as u64, k as u64) + lk + (n - k) as f64 * ln_eta)).exp()
                    })
                    .collect()
            })
            .collect();
        let d = rho.nrows();
        let mut out = CMatrix::zeros(d, d);
        for j in 0..d {
            let nj = (j / s) % c;
            for i in 0..d {
                let v = rho[(i, j)];
                if v.re == 0.0 && v.im == 0.0 {
                    continue;
                }
                let ni = (i / s) % c;
                for k in 0..=ni.min(nj) {
                    out[(i - k * s, j - k * s)] += v * (table[ni][k] * table[nj][k]);
                }
            }
        }
        rho = out;
    }
    Ok(DensityOperator::from_parts_unchecked(trunc, linalg::hermitize(&rho)))
}

/// Right-hand side `sum_m a rho a^dagger - {n, rho}/2` by index arithmetic.
fn lindblad_rhs(trunc: &[usize], modes: &[usize], rho: &CMatrix) -> CMatrix {
    let st = linalg::strides(trunc);
    let d = rho.nrows();
    let mut out = CMatrix::zeros(d, d);
    for &m in modes {
        let c = trunc[m];
        let s = st[m];
        for j in 0..d {
            let nj = (j / s) % c;
            for i in 0..d {
                let ni = (i / s) % c;
                let mut acc = rho[(i, j)] * (-0.5 * (ni + nj) as f64);
                if ni + 1 < c && nj + 1 < c {
                    acc += rho[(i + s, j + s)] * (((ni + 1) * (nj + 1)) as f64).sqrt();
                }
                out[(i, j)] += acc;
            }
        }
    }
    out
}

fn rk4_step(trunc: &[usize], modes: &[usize], rho: &CMatrix, h: f64) -> CMatrix {
    let k1 = lindblad_rhs(trunc, modes, rho);
    let k2 = lindblad_rhs(trunc, modes, &(rho + k1.scale(0.5 * h)));
    let k3 = lindblad_rhs(trunc, modes, &(rho + k2.scale(0.5 * h)));
    let k4 = lindblad_rhs(trunc, modes, &(rho + k3.scale(h)));
    rho + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0)
}

/// Direct integration of the loss master equation with step-doubling error
/// control. Slower than [`apply_loss`]; kept as an independent cross-check.
pub fn apply_loss_rk4(state: &DensityOperator, tau: f64, modes: &[usize], tol: f64) -> Result<DensityOperator> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("tau must be finite and non-negative, got {tau}")));
    }
    if modes.is_empty() || tau == 0.0 {
        return Ok(state.clone());
    }
    check_keep(modes, state.mode_count())?;
    let trunc = state.truncations().to_vec();
    let mut rho = state.matrix().clone();
    let mut t = 0.0;
    let mut h: f64 = 0.05f64.min(tau);
    while t < tau {
        h = h.min(tau - t);
        let full = rk4_step(&trunc, modes, &rho, h);
        let half = rk4_step(&trunc, modes, &rk4_step(&trunc, modes, &rho, 0.5 * h), 0.5 * h);
        let err = (&full - &half).camax();
        if err <= tol {
            rho = half;
            t += h;
            if err < tol / 32.0 {
                h *= 1.5;
            }
        } else {
            h *= 0.5;
            if h < 1e-10 {
                return Err(Error::Convergence(format!("loss integrator stalled at tau={t:.4}, local error {err:.2e}")));
            }
        }
    }
    let tr = linalg::trace(&rho).re;
    if (tr - 1.0).abs() > 1e-8 {
        return Err(Error::Convergence(format!("trace drifted to {tr}")));
    }
    Ok(DensityOperator::from_parts_unchecked(trunc, linalg::hermitize(&rho)))
}

/// Loss evolution sampled on a grid of `tau` values.
#[derive(Debug, Clone)]
pub struct LossTrajectory {
    pub tau_grid: Vec<f64>,
    pub states: Vec<DensityOperator>,
}

pub fn loss_trajectory(state: &DensityOperator, tau_grid: &[f64], modes: &[usize]) -> Result<LossTrajectory> {
    let states = tau_grid
        .iter()
        .map(|&t| apply_loss(state, t, modes))
        .collect::<Result<Vec<_>>>()?;
    Ok(LossTrajectory { tau_grid: tau_grid.to_vec(), states })
}
