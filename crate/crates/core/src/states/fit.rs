//! Matching scheme outputs to (squeezed) cat states.

use super::fock_builders::squeezed_cat;
use crate::error::{Error, Result};
use crate::fock::{DensityOperator, FockPureState};
use crate::optim::nelder_mead;
use crate::phase_space::{default_quadrature_grid, quadrature_distribution, wigner_at};
use crate::C64;

/// Best squeezed cat `S(s e^{2 i theta}) N(|beta e^{i theta}> + e^{i phi}|-beta e^{i theta}>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatFit {
    pub beta: f64,
    pub theta: f64,
    pub s: f64,
    pub phi: f64,
    pub fidelity: f64,
}

/// `<a^2>` of a single-mode state.
pub fn second_moment(state: &DensityOperator) -> C64 {
    let m = state.matrix();
    (0..state.dim().saturating_sub(2)).map(|k| m[(k + 2, k)] * (((k + 1) * (k + 2)) as f64).sqrt()).sum()
}

/// Orientation of the cat axis, `arg<a^2>/2`.
pub fn cat_axis(state: &DensityOperator) -> f64 {
    let m2 = second_moment(state);
    if m2.norm() < 1e-12 {
        0.0
    } else {
        0.5 * m2.arg()
    }
}

/// `<t|rho|t>` with both embedded in the larger cutoff.
pub fn overlap_fidelity(state: &DensityOperator, target: &FockPureState) -> Result<f64> {
    if state.mode_count() != 1 || target.mode_count() != 1 {
        return Err(Error::InvalidParameter("overlap_fidelity expects single-mode states".into()));
    }
    let c = state.dim().max(target.dim());
    let (rho, _) = state.resized(&[c])?;
    let (t, _) = target.resized(&[c])?;
    let v = t.amplitudes();
    Ok(v.dotc(&(rho.matrix() * v)).re)
}

/// Maximizes the fidelity over `beta` (and `s` when `squeezed`) along the
/// axis [`cat_axis`], for a fixed relative phase `phi`.
pub fn fit_cat(state: &DensityOperator, phi: f64, squeezed: bool) -> Result<CatFit> {
    if state.mode_count() != 1 {
        return Err(Error::InvalidParameter("fit_cat expects a single-mode state".into()));
    }
    let theta = cat_axis(state);
    let eval = |beta: f64, s: f64| -> f64 {
        match squeezed_cat(beta.abs(), theta, s, phi) {
            Ok(t) => overlap_fidelity(state, &t).unwrap_or(0.0),
            Err(_) => 0.0,
        }
    };
    let n = crate::fock::mean_photon_number(state).max(0.05);
    let beta0 = n.sqrt();
    let m = if squeezed {
        nelder_mead(|x| -eval(x[0], x[1]), &[beta0, 0.0], &[0.2, 0.1], 1e-12, 400)
    } else {
        nelder_mead(|x| -eval(x[0], 0.0), &[beta0], &[0.2], 1e-12, 200)
    };
    let beta = m.x[0].abs();
    let s = if squeezed { m.x[1] } else { 0.0 };
    Ok(CatFit { beta, theta, s, phi, fidelity: -m.value })
}

/// Squeezing `r` for which single-photon subtraction best reproduces the odd
/// cat of amplitude `i alpha`, and the fidelity reached.
pub fn subtraction_match(alpha: f64) -> Result<(f64, f64)> {
    let target = super::fock_builders::scs(C64::new(0.0, alpha), std::f64::consts::PI, None)?;
    let eval = |r: f64| -> f64 {
        match super::schemes::photon_subtraction(r.abs().max(1e-6), 1, 0.01) {
            Ok(o) => overlap_fidelity(&o.state, &target).unwrap_or(0.0),
            Err(_) => 0.0,
        }
    };
    // the matched squeezing grows roughly like alpha^2 / 3
    let r0 = (alpha * alpha / 3.0).max(0.05);
    let m = nelder_mead(|x| -eval(x[0]), &[r0], &[0.05], 1e-14, 200);
    Ok((m.x[0].abs(), -m.value))
}

/// Half the separation of the outermost peaks of the quadrature marginal
/// along `angle`, i.e. the cat amplitude read off phase space. `None` for a
/// single-peaked marginal.
pub fn peak_amplitude(state: &DensityOperator, angle: f64) -> Result<Option<f64>> {
    let grid = default_quadrature_grid(state, 0, 0.005);
    let q = quadrature_distribution(state, 0, angle, &grid)?;
    let peaks = q.peaks(0.05);
    if peaks.len() < 2 {
        return Ok(None);
    }
    Ok(Some((peaks[peaks.len() - 1] - peaks[0]) / 4.0))
}

/// Local maxima `(t, W)` of the Wigner function along the line
/// `(x, p) = t (cos angle, sin angle)`, `|t| <= extent`.
pub fn wigner_line_peaks(state: &DensityOperator, angle: f64, extent: f64, step: f64) -> Result<Vec<(f64, f64)>> {
    let k = (extent / step).ceil() as i64;
    let ts: Vec<f64> = (-k..=k).map(|i| i as f64 * step).collect();
    let pts: Vec<(f64, f64)> = ts.iter().map(|t| (t * angle.cos(), t * angle.sin())).collect();
    let w = wigner_at(state, 0, &pts)?;
    Ok((1..w.len() - 1)
        .filter(|&i| w[i] >= w[i - 1] && w[i] > w[i + 1])
        .map(|i| (ts[i], w[i]))
        .collect())
}
