use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::report::MeasureReport;
use crate::spin::MAX_QUBITS;
use crate::states::spin_builders::generalized_ghz_branches;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DurMode {
    Analytic,
    Simulated,
}

/// Largest register for the simulated fit.
pub const DUR_MAX_SIMULATED: usize = 10;

const FIT_POINTS: usize = 11;
/// Largest tolerated fit residual relative to the total log decay.
const FIT_RESIDUAL_TOL: f64 = 1e-2;

/// Effective size of `(|0>^N + |eps>^N)/sqrt K` from the decay rate of its
/// coherence under independent dephasing at rate `gamma`.
///
/// Analytic mode uses `N eps^2` for `eps <= 0.3` and `N sin^2 eps` beyond.
/// Simulated mode dephases the cross term `|0^N><eps^N|`, fits
/// `ln ||.||_1` against `t` on `[0, 0.01/gamma]` and returns `rate / gamma`.
pub fn dur_effective_size(n: usize, epsilon: f64, gamma: f64, mode: DurMode) -> Result<MeasureReport> {
    if !(epsilon > 0.0 && epsilon <= std::f64::consts::FRAC_PI_2 + 1e-12) {
        return Err(Error::InvalidParameter(format!("epsilon={epsilon} outside (0, pi/2]")));
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma={gamma} must be positive")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    match mode {
        DurMode::Analytic => {
            let nf = n as f64;
            let (v, form) = if (epsilon - std::f64::consts::FRAC_PI_2).abs() < 1e-12 {
                (nf, "N")
            } else if epsilon <= 0.3 {
                (nf * epsilon * epsilon, "N eps^2")
            } else {
                (nf * epsilon.sin().powi(2), "N sin^2 eps")
            };
            Ok(MeasureReport::new(v, "analytic", 0.0).with("form", form))
        }
        DurMode::Simulated => simulated(n, epsilon, gamma),
    }
}

fn simulated(n: usize, epsilon: f64, gamma: f64) -> Result<MeasureReport> {
    if n > DUR_MAX_SIMULATED.min(MAX_QUBITS) {
        return Err(Error::Unsupported(format!("simulated mode needs N <= {DUR_MAX_SIMULATED}")));
    }
    let (a, b) = generalized_ghz_branches(n, epsilon)?;
    let (va, vb) = (a.vector().expect("pure branch"), b.vector().expect("pure branch"));
    let cross: CMatrix = va * vb.adjoint();
    let t_max = 0.01 / gamma;
    let ts: Vec<f64> = (0..FIT_POINTS).map(|k| t_max * k as f64 / (FIT_POINTS - 1) as f64).collect();
    let mut logs = Vec::with_capacity(ts.len());
    for &t in &ts {
        let mut x = cross.clone();
        crate::spin::dephase_matrix(&mut x, (-gamma * t).exp());
        logs.push(linalg::trace_norm(&x).ln());
    }
    let (slope, intercept) = least_squares(&ts, &logs);
    let residual = ts
        .iter()
        .zip(&logs)
        .map(|(t, l)| (l - (intercept + slope * t)).abs())
        .fold(0.0, f64::max);
    let rate = -slope;
    let span = (logs[0] - logs[logs.len() - 1]).abs();
    if span > 1e-12 && residual / span > FIT_RESIDUAL_TOL {
        return Err(Error::Convergence(format!("dephasing fit residual {residual:.3e} too large")));
    }
    Ok(MeasureReport::new(rate / gamma, "simulated-dephasing-fit", residual / (gamma * t_max))
        .with("fit_window", format!("[0, {t_max:.6e}]"))
        .with("fit_points", FIT_POINTS)
        .with("max_log_residual", format!("{residual:.3e}")))
}

/// Ordinary least squares `y = intercept + slope x`.
pub(crate) fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
