//! Multi-mode truncated Fock spaces.
//!
//! Mode 0 is the most significant digit of the flat basis index.

mod loss;
mod metrics;
mod ops;
mod state;

pub use loss::{apply_loss, apply_loss_rk4, loss_trajectory, LossTrajectory};
pub use metrics::{fidelity, mean_photon_number, pure_state, purity, trace_distance, von_neumann_entropy};
pub use ops::{beam_splitter, displace, ladder, number, squeeze, squeeze_complex, LadderKind, ModeOperator};
pub use state::{DensityOperator, FockPureState};
pub(crate) use state::check_keep;

/// Default bound on the mass held by the two highest Fock levels of any mode.
pub const TAIL_TOL: f64 = 1e-8;

/// Automatic per-mode cutoff for a mode with mean photon number `mean_n`.
pub fn auto_cutoff(mean_n: f64) -> usize {
    let n = mean_n.max(0.0);
    (n + 6.0 * n.sqrt() + 10.0).ceil() as usize
}

pub(crate) fn check_mode(mode: usize, count: usize) -> crate::Result<()> {
    if mode >= count {
        return Err(crate::Error::OutOfRange { index: mode, count });
    }
    Ok(())
}

/// Amplitudes `e^{-|alpha|^2/2} alpha^n / sqrt(n!)` for `n < cutoff`.
pub fn coherent_amplitudes(alpha: crate::C64, cutoff: usize) -> crate::CVector {
    let mut v = crate::CVector::zeros(cutoff);
    if cutoff == 0 {
        return v;
    }
    v[0] = crate::C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 1..cutoff {
        v[n] = v[n - 1] * alpha / (n as f64).sqrt();
    }
    v
}
