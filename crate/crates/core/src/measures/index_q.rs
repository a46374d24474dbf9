use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::report::MeasureReport;
use crate::spin::{AdditiveObservable, ProjectorSpec, SpinState};

/// Relative agreement demanded of the two evaluation routes.
const ROUTE_TOL: f64 = 1e-8;

/// `<[A, [A, eta]]>` evaluated twice: as `Tr rho (A^2 eta - 2 A eta A + eta A^2)`
/// and as `sum_ij (a_i - a_j)^2 <a_i|eta|a_j><a_j|rho|a_i>` in the eigenbasis of `A`.
pub fn index_q_correlator(state: &SpinState, obs: &AdditiveObservable, eta: &ProjectorSpec) -> Result<MeasureReport> {
    let n = state.qubit_count();
    if obs.qubit_count() != n {
        return Err(Error::DimensionMismatch { left: obs.qubit_count(), right: n });
    }
    if eta.dim() != state.dim() {
        return Err(Error::DimensionMismatch { left: eta.dim(), right: state.dim() });
    }
    let rho = state.density();
    let direct = commutator_route(&rho, obs, eta.matrix());
    let spectral = eigenbasis_route(&rho, obs, eta.matrix());
    let gap = (direct - spectral).abs();
    if gap > ROUTE_TOL * direct.abs().max(1.0) {
        return Err(Error::Convergence(format!(
            "commutator route {direct:.12e} and eigenbasis route {spectral:.12e} disagree"
        )));
    }
    Ok(MeasureReport::new(direct, "double-commutator", gap).with("eigenbasis_value", format!("{spectral:.12e}")))
}

fn commutator_route(rho: &CMatrix, obs: &AdditiveObservable, eta: &CMatrix) -> f64 {
    let a_eta = obs.apply_columns(eta);
    let aa_eta = obs.apply_columns(&a_eta);
    // eta A and eta A^2 through adjoints: (A eta)^dagger = eta A
    let eta_a = a_eta.adjoint();
    let eta_aa = aa_eta.adjoint();
    let a_eta_a = obs.apply_columns(&eta_a);
    let c = aa_eta - a_eta_a.scale(2.0) + eta_aa;
    (rho * c).trace().re
}

fn eigenbasis_route(rho: &CMatrix, obs: &AdditiveObservable, eta: &CMatrix) -> f64 {
    let sum = |a: &[f64], eta: &CMatrix, rho: &CMatrix| -> f64 {
        let d = a.len();
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                let w = (a[i] - a[j]).powi(2);
                if w != 0.0 {
                    acc += w * (eta[(i, j)] * rho[(j, i)]).re;
                }
            }
        }
        acc
    };
    match obs.diagonal() {
        Some(a) => sum(&a, eta, rho),
        None => {
            let (a, u) = linalg::eigh(&obs.to_matrix());
            let ud = u.adjoint();
            sum(&a, &(&ud * eta * &u), &(&ud * rho * &u))
        }
    }
}
