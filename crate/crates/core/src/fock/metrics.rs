use crate::error::{Error, Result};
use crate::fock::{DensityOperator, FockPureState};
use crate::linalg::{self, CVector};

pub fn purity(state: &DensityOperator) -> f64 {
    state.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// Entropy in nats.
pub fn von_neumann_entropy(state: &DensityOperator) -> f64 {
    linalg::spectral_entropy(&linalg::eigvalsh(state.matrix()))
}

fn same_space(a: &DensityOperator, b: &DensityOperator) -> Result<()> {
    if a.truncations() != b.truncations() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    Ok(())
}

pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    same_space(a, b)?;
    Ok(0.5 * linalg::trace_norm_hermitian(&(a.matrix() - b.matrix())))
}

/// If `rho` is pure within rounding, the state vector it projects on.
pub(crate) fn pure_vector(rho: &DensityOperator) -> Option<CVector> {
    if (purity(rho) - 1.0).abs() > 1e-12 {
        return None;
    }
    let m = rho.matrix();
    let (j, _) = m
        .diagonal()
        .iter()
        .enumerate()
        .fold((0, -1.0), |acc, (i, d)| if d.re > acc.1 { (i, d.re) } else { acc });
    let col = m.column(j).into_owned();
    let norm = col.norm();
    Some(col.unscale(norm))
}

/// The pure state `rho` projects on, with a fixed global phase, if it is pure within rounding.
pub fn pure_state(rho: &DensityOperator) -> Option<FockPureState> {
    let v = pure_vector(rho)?;
    FockPureState::new(rho.truncations().to_vec(), v).ok().map(|s| s.phase_fixed())
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(a) b sqrt(a)))^2`; equals `|<psi|phi>|^2` for pure states.
pub fn fidelity(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    same_space(a, b)?;
    for (p, q) in [(a, b), (b, a)] {
        if let Some(v) = pure_vector(p) {
            let f = v.dotc(&(q.matrix() * &v)).re;
            return Ok(f.clamp(0.0, 1.0));
        }
    }
    let sa = linalg::psd_sqrt(a.matrix());
    let inner = &sa * b.matrix() * &sa;
    let s: f64 = linalg::eigvalsh(&inner).iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok((s * s).clamp(0.0, 1.0))
}

pub fn mean_photon_number(state: &DensityOperator) -> f64 {
    (0..state.mode_count()).map(|m| state.mode_mean_photon_number(m)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_amplitudes, FockPureState};
    use crate::C64;

    fn coherent(alpha: f64, c: usize) -> DensityOperator {
        FockPureState::normalized(vec![c], coherent_amplitudes(C64::new(alpha, 0.0), c))
            .unwrap()
            .to_density()
    }

    #[test]
    fn vacuum_vs_coherent() {
        let v = coherent(0.0, 30);
        let c = coherent(1.0, 30);
        assert!((trace_distance(&v, &c).unwrap() - (1.0 - (-1f64).exp()).sqrt()).abs() < 1e-10);
        assert!((fidelity(&v, &c).unwrap() - (-1f64).exp()).abs() < 1e-12);
        assert!(von_neumann_entropy(&c).abs() < 1e-8);
        assert!((purity(&c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_fidelity_is_symmetric() {
        let a = DensityOperator::mixture(&[(0.3, &coherent(0.5, 20)), (0.7, &coherent(-0.5, 20))]).unwrap();
        let b = DensityOperator::mixture(&[(0.6, &coherent(0.2, 20)), (0.4, &coherent(1.0, 20))]).unwrap();
        let f1 = fidelity(&a, &b).unwrap();
        let f2 = fidelity(&b, &a).unwrap();
        assert!((f1 - f2).abs() < 1e-8);
        assert!(f1 > 0.0 && f1 < 1.0);
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn cat_mixture_purity() {
        let a = 2.0;
        let mix = DensityOperator::mixture(&[(0.5, &coherent(a, 40)), (0.5, &coherent(-a, 40))]).unwrap();
        let expected = 0.5 * (1.0 + (-2.0 * (2.0 * a) * (2.0 * a) / 2.0f64).exp());
        // Tr rho^2 = (1 + |<a|-a>|^2)/2 = (1 + e^{-4|a|^2})/2
        assert!((purity(&mix) - expected).abs() < 1e-10);
        assert!((von_neumann_entropy(&mix) - 2f64.ln()).abs() < 1e-6);
    }
}
