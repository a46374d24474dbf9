//! Heralded preparation schemes for optical cat states.

use std::collections::BTreeMap;

use statrs::function::factorial::ln_factorial;

use super::fock_builders::{coherent, scs, squeezed_vacuum};
use crate::error::{Error, Result};
use crate::fock::{auto_cutoff, beam_splitter, DensityOperator, FockPureState, TAIL_TOL};
use crate::linalg::{CMatrix, CVector};
use crate::phase_space::special::{gauss_legendre, hermite_functions};
use crate::C64;

const MAX_CUTOFF: usize = 400;

/// Conditional output of a heralded scheme.
#[derive(Debug, Clone)]
pub struct SchemeOutcome {
    pub state: DensityOperator,
    /// Set when the conditional state is pure.
    pub pure: Option<FockPureState>,
    pub success_probability: f64,
    pub metadata: BTreeMap<String, String>,
}

impl SchemeOutcome {
    fn from_pure(state: FockPureState, p: f64) -> Self {
        SchemeOutcome { state: state.to_density(), pure: Some(state), success_probability: p, metadata: BTreeMap::new() }
    }

    fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }
}

fn grow(c: usize, tail: f64) -> Result<usize> {
    let next = c + c / 4 + 4;
    if next > MAX_CUTOFF {
        return Err(Error::Truncation { tail, tol: TAIL_TOL });
    }
    Ok(next)
}

fn check_subtraction(r: f64, n_sub: usize, reflectivity: f64) -> Result<()> {
    if n_sub == 0 {
        return Err(Error::InvalidParameter("n_sub must be at least 1".into()));
    }
    if !r.is_finite() {
        return Err(Error::InvalidParameter(format!("squeezing r={r} not finite")));
    }
    if !(reflectivity > 0.0 && reflectivity < 1.0) {
        return Err(Error::InvalidParameter(format!("reflectivity {reflectivity} outside (0,1)")));
    }
    Ok(())
}

/// `a^n S(r)|0>`, normalized, in the ideal low-reflectivity limit.
///
/// The success probability is `R^n <a^dagger^n a^n> / n!` for a tap of
/// reflectivity `R`; the bare weight `<a^dagger^n a^n>/n!` is kept in the metadata.
pub fn photon_subtraction(r: f64, n_sub: usize, reflectivity: f64) -> Result<SchemeOutcome> {
    check_subtraction(r, n_sub, reflectivity)?;
    if r == 0.0 {
        return Err(Error::InvalidState("photon subtraction from the vacuum has zero weight".into()));
    }
    let n = n_sub;
    let mut c = auto_cutoff((2 * n + 1) as f64 * r.sinh().powi(2) + n as f64) + n;
    loop {
        let sv = squeezed_vacuum(r, Some(c)).or_else(|e| match e {
            Error::Truncation { .. } => Ok(FockPureState::vacuum(vec![1])?),
            e => Err(e),
        })?;
        if sv.dim() == c {
            let psi = sv.amplitudes();
            let out_c = c - n;
            let mut v = CVector::zeros(out_c);
            for k in 0..out_c {
                // sqrt((k+n)!/k!)
                let f = (0.5 * (ln_factorial((k + n) as u64) - ln_factorial(k as u64))).exp();
                v[k] = psi[k + n] * f;
            }
            let weight = v.norm_squared() / (ln_factorial(n as u64)).exp();
            let out = FockPureState::normalized(vec![out_c], v)?;
            let tail = out.tail_mass(0);
            if tail < TAIL_TOL {
                let p = (reflectivity.powi(n as i32) * weight).min(1.0);
                return Ok(SchemeOutcome::from_pure(out, p)
                    .with("heralding_weight", format!("{weight:.12e}"))
                    .with("reflectivity", reflectivity)
                    .with("model", "ideal-ladder"));
            }
            c = grow(c, tail)?;
        } else {
            c = grow(c, 1.0)?;
        }
    }
}

/// Explicit version of [`photon_subtraction`]: a beam splitter of reflectivity
/// `R` taps the squeezed vacuum and the reflected arm is projected on `|n_sub>`.
pub fn photon_subtraction_bs(r: f64, n_sub: usize, reflectivity: f64) -> Result<SchemeOutcome> {
    check_subtraction(r, n_sub, reflectivity)?;
    let n = n_sub;
    let mut c = auto_cutoff((2 * n + 1) as f64 * r.sinh().powi(2) + n as f64) + n;
    loop {
        let Ok(sv) = squeezed_vacuum(r, Some(c)) else {
            c = grow(c, 1.0)?;
            continue;
        };
        let input = FockPureState::product(&[sv, FockPureState::vacuum(vec![c])?])?;
        let bs = beam_splitter(&[c, c], (0, 1), 1.0 - reflectivity)?;
        let mixed = input.apply_raw(&bs)?;
        let v = CVector::from_iterator(c, (0..c).map(|k| mixed[k * c + n]));
        let p = v.norm_squared();
        if p < 1e-300 {
            return Err(Error::InvalidState("heralding event has zero probability".into()));
        }
        let out = FockPureState::normalized(vec![c], v)?;
        let tail = out.tail_mass(0);
        if tail < TAIL_TOL {
            return Ok(SchemeOutcome::from_pure(out, p).with("reflectivity", reflectivity).with("model", "beam-splitter"));
        }
        c = grow(c, tail)?;
    }
}

/// Window operator `int_{-x0}^{x0} |x><x| dx` in the first `c` Fock states.
pub fn quadrature_window(c: usize, x0: f64) -> CMatrix {
    // Eigenfunctions up to n < c are negligible beyond this radius.
    let reach = 2.0 * (c as f64 + 1.0).sqrt() + 12.0;
    let half = x0.min(reach);
    let panels = ((2.0 * half) / 1.0).ceil().max(1.0) as usize;
    let width = 2.0 * half / panels as f64;
    let mut pi = CMatrix::zeros(c, c);
    for k in 0..panels {
        let a = -half + k as f64 * width;
        let (xs, ws) = gauss_legendre(40, a, a + width);
        for (x, w) in xs.iter().zip(&ws) {
            let h = hermite_functions(*x, c);
            for i in 0..c {
                let hi = w * h[i];
                for j in 0..c {
                    pi[(i, j)].re += hi * h[j];
                }
            }
        }
    }
    pi
}

/// Splits `|n>` with an optionally squeezed auxiliary vacuum on a balanced
/// beam splitter and keeps mode 0 when the `x` quadrature of mode 1 lands in
/// `|x| < x0`.
///
/// The conditional state is mixed for finite `x0`; the window probability is
/// the success probability.
pub fn homodyne_conditioning(n: usize, x0: f64, aux_squeeze: f64) -> Result<SchemeOutcome> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !(x0 > 0.0) {
        return Err(Error::InvalidParameter(format!("window half-width x0={x0} must be positive")));
    }
    let mut c = auto_cutoff(n as f64 + aux_squeeze.sinh().powi(2)).max(n + 4);
    loop {
        let aux = if aux_squeeze == 0.0 {
            FockPureState::vacuum(vec![c])?
        } else {
            match squeezed_vacuum(aux_squeeze, Some(c)) {
                Ok(s) => s,
                Err(Error::Truncation { tail, .. }) => {
                    c = grow(c, tail)?;
                    continue;
                }
                Err(e) => return Err(e),
            }
        };
        let input = FockPureState::product(&[FockPureState::basis(vec![c], &[n])?, aux])?;
        let bs = beam_splitter(&[c, c], (0, 1), 0.5)?;
        let split = input.apply(&bs)?;
        let tail = split.max_tail_mass();
        if tail >= TAIL_TOL {
            c = grow(c, tail)?;
            continue;
        }
        let psi = CMatrix::from_fn(c, c, |a, k| split.amplitudes()[a * c + k]);
        let window = quadrature_window(c, x0);
        let rho = &psi * window.transpose() * psi.adjoint();
        let p = rho.trace().re;
        if p < 1e-12 {
            return Err(Error::InvalidState(format!("window probability {p:.3e} below 1e-12")));
        }
        let state = DensityOperator::normalized(vec![c], rho)?;
        let pure = crate::fock::pure_state(&state);
        return Ok(SchemeOutcome { state, pure, success_probability: p.min(1.0), metadata: BTreeMap::new() }
            .with("window_probability", format!("{p:.12e}"))
            .with("x0", x0)
            .with("aux_squeeze", aux_squeeze));
    }
}

/// Mixes two `SCS(alpha)` on a balanced beam splitter, interferes one output
/// with an auxiliary `|sqrt2 alpha>` and heralds on clicks at both detectors.
///
/// Modes: 0 output, 1 tapped arm, 2 auxiliary. `alpha = 0` passes the vacuum
/// through with unit probability.
pub fn amplification(alpha: f64) -> Result<SchemeOutcome> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidParameter(format!("alpha={alpha} must be finite and non-negative")));
    }
    if alpha == 0.0 {
        return Ok(SchemeOutcome::from_pure(FockPureState::vacuum(vec![1])?, 1.0).with("passthrough", true));
    }
    let a = C64::new(alpha, 0.0);
    let mut c = auto_cutoff(4.0 * alpha * alpha);
    loop {
        let cat = scs(a, 0.0, Some(c));
        let aux = coherent(a * 2f64.sqrt(), Some(c));
        let (cat, aux) = match (cat, aux) {
            (Ok(x), Ok(y)) => (x, y),
            _ => {
                c = grow(c, 1.0)?;
                continue;
            }
        };
        let trunc = vec![c, c, c];
        let input = FockPureState::product(&[cat.clone(), cat, aux])?;
        let s1 = input.apply(&beam_splitter(&trunc, (0, 1), 0.5)?)?;
        let s2 = s1.apply(&beam_splitter(&trunc, (1, 2), 0.5)?)?;
        let tail = s2.max_tail_mass();
        if tail >= TAIL_TOL {
            c = grow(c, tail)?;
            continue;
        }
        let amps = s2.amplitudes();
        let mut psi = CMatrix::zeros(c, c * c);
        for o in 0..c {
            for j in 1..c {
                for k in 1..c {
                    psi[(o, j * c + k)] = amps[(o * c + j) * c + k];
                }
            }
        }
        let rho = &psi * psi.adjoint();
        let p = rho.trace().re;
        if p < 1e-300 {
            return Err(Error::InvalidState("heralding event has zero probability".into()));
        }
        let state = DensityOperator::normalized(vec![c], rho)?;
        let pure = crate::fock::pure_state(&state);
        return Ok(SchemeOutcome { state, pure, success_probability: p.min(1.0), metadata: BTreeMap::new() }
            .with("heralding", "on-off both arms"));
    }
}
