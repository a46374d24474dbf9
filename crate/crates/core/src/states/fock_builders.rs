//! Bosonic states: cats, entangled cats and micro-macro states.

use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::fock::{auto_cutoff, coherent_amplitudes, squeeze_complex, FockPureState, TAIL_TOL};
use crate::linalg::CVector;
use crate::phase_space::special::displacement_matrix;
use crate::C64;

const MAX_CUTOFF: usize = 600;

/// Builds with an automatic cutoff (grown until the tail check passes on
/// `checked` modes) or with a fixed override (tail check only).
fn with_cutoff(
    mean: f64,
    cutoff: Option<usize>,
    checked: &[usize],
    build: impl Fn(usize) -> Result<FockPureState>,
) -> Result<FockPureState> {
    let tail = |s: &FockPureState| checked.iter().map(|&m| s.tail_mass(m)).fold(0.0, f64::max);
    if let Some(c) = cutoff {
        let s = build(c)?;
        let t = tail(&s);
        if t >= TAIL_TOL {
            return Err(Error::Truncation { tail: t, tol: TAIL_TOL });
        }
        return Ok(s);
    }
    let mut c = auto_cutoff(mean);
    loop {
        let s = build(c)?;
        let t = tail(&s);
        if t < TAIL_TOL {
            return Ok(s);
        }
        c += c / 4 + 4;
        if c > MAX_CUTOFF {
            return Err(Error::Truncation { tail: t, tol: TAIL_TOL });
        }
    }
}

pub fn coherent(alpha: C64, cutoff: Option<usize>) -> Result<FockPureState> {
    with_cutoff(alpha.norm_sqr(), cutoff, &[0], |c| {
        FockPureState::normalized(vec![c], coherent_amplitudes(alpha, c))
    })
}

pub fn fock(n: usize) -> Result<FockPureState> {
    FockPureState::basis(vec![n + 3], &[n])
}

pub fn vacuum() -> Result<FockPureState> {
    fock(0)
}

fn cat_amplitudes(alpha: C64, phi: f64, c: usize) -> CVector {
    let a = coherent_amplitudes(alpha, c);
    let ph = C64::from_polar(1.0, phi);
    CVector::from_fn(c, |n, _| if n % 2 == 0 { a[n] * (1.0 + ph) } else { a[n] * (1.0 - ph) })
}

/// `N (|alpha> + e^{i phi} |-alpha>)`.
pub fn scs(alpha: C64, phi: f64, cutoff: Option<usize>) -> Result<FockPureState> {
    let ov = (-2.0 * alpha.norm_sqr()).exp();
    if 2.0 + 2.0 * phi.cos() * ov < 1e-12 {
        return Err(Error::InvalidParameter("odd cat with vanishing amplitude has no normalization".into()));
    }
    with_cutoff(alpha.norm_sqr() + 1.0, cutoff, &[0], |c| {
        FockPureState::normalized(vec![c], cat_amplitudes(alpha, phi, c))
    })
}

/// `N' (|alpha>|alpha> + e^{i phi} |-alpha>|-alpha>)`.
pub fn ecs(alpha: C64, phi: f64, cutoff: Option<usize>) -> Result<FockPureState> {
    let ov = (-4.0 * alpha.norm_sqr()).exp();
    if 2.0 + 2.0 * phi.cos() * ov < 1e-12 {
        return Err(Error::InvalidParameter("entangled cat with vanishing amplitude has no normalization".into()));
    }
    with_cutoff(alpha.norm_sqr() + 1.0, cutoff, &[0, 1], |c| {
        let a = coherent_amplitudes(alpha, c);
        let ph = C64::from_polar(1.0, phi);
        let v = CVector::from_fn(c * c, |i, _| {
            let (n1, n2) = (i / c, i % c);
            let sign = if (n1 + n2) % 2 == 0 { 1.0 + ph } else { 1.0 - ph };
            a[n1] * a[n2] * sign
        });
        FockPureState::normalized(vec![c, c], v)
    })
}

/// `(|0>|alpha> + |1>|-alpha>)/sqrt 2`, qubit-like mode first.
pub fn hybrid(alpha: C64, cutoff: Option<usize>) -> Result<FockPureState> {
    with_cutoff(alpha.norm_sqr(), cutoff, &[1], |c| {
        let p = coherent_amplitudes(alpha, c);
        let m = coherent_amplitudes(-alpha, c);
        let mut v = CVector::zeros(2 * c);
        v.rows_mut(0, c).copy_from(&p);
        v.rows_mut(c, c).copy_from(&m);
        FockPureState::normalized(vec![2, c], v)
    })
}

/// `(|1>|0> + |0>|1>)/sqrt 2` on two modes with cutoff `c` each.
fn spe_on(c: usize) -> Result<FockPureState> {
    let h = C64::new(0.5f64.sqrt(), 0.0);
    let mut v = CVector::zeros(c * c);
    v[c] = h;
    v[1] = h;
    FockPureState::new(vec![c, c], v)
}

pub fn single_photon_entanglement() -> Result<FockPureState> {
    spe_on(4)
}

/// Single-photon entanglement with mode B (and optionally A) displaced by
/// `alpha`. Displacements use exact matrix elements, so only the tail check
/// limits accuracy.
pub fn displaced_spe(alpha: C64, both_modes: bool, cutoff: Option<usize>) -> Result<FockPureState> {
    let checked: &[usize] = if both_modes { &[0, 1] } else { &[1] };
    with_cutoff(alpha.norm_sqr() + 1.0, cutoff, checked, |c| {
        let d = displacement_matrix(alpha, c);
        let ca = if both_modes { c } else { 2 };
        let h = 0.5f64.sqrt();
        // amplitude[(a, b)] = (|1>_A D|0>_B + |0>_A D|1>_B) with A optionally displaced too
        let col = |k: usize| d.column(k).into_owned();
        let a_vec = |k: usize| -> CVector {
            if both_modes {
                col(k)
            } else {
                let mut v = CVector::zeros(2);
                v[k] = C64::new(1.0, 0.0);
                v
            }
        };
        let v = (a_vec(1).kronecker(&col(0)) + a_vec(0).kronecker(&col(1))).scale(h);
        FockPureState::normalized(vec![ca, c], v)
    })
}

/// `S(r)|0>` from its closed form.
fn squeezed_vacuum_amplitudes(r: f64, c: usize) -> CVector {
    let t = -r.tanh();
    let mut v = CVector::zeros(c);
    let pref = 1.0 / r.cosh().sqrt();
    for m in 0..c.div_ceil(2) {
        let n = 2 * m;
        // (-tanh r)^m sqrt((2m)!) / (2^m m!)
        let mag = (0.5 * ln_factorial(n as u64) - m as f64 * 2f64.ln() - ln_factorial(m as u64)).exp();
        v[n] = C64::new(pref * t.powi(m as i32) * mag, 0.0);
    }
    v
}

/// `S(r)|1>` from its closed form.
fn squeezed_photon_amplitudes(r: f64, c: usize) -> CVector {
    let t = -r.tanh();
    let mut v = CVector::zeros(c);
    let pref = r.cosh().powf(-1.5);
    for m in 0..c / 2 {
        let n = 2 * m + 1;
        let mag = (0.5 * ln_factorial(n as u64) - m as f64 * 2f64.ln() - ln_factorial(m as u64)).exp();
        v[n] = C64::new(pref * t.powi(m as i32) * mag, 0.0);
    }
    v
}

pub fn squeezed_vacuum(r: f64, cutoff: Option<usize>) -> Result<FockPureState> {
    with_cutoff(r.sinh().powi(2), cutoff, &[0], |c| {
        FockPureState::normalized(vec![c], squeezed_vacuum_amplitudes(r, c))
    })
}

/// `(|1>_A S(r)|0>_B + |0>_A S(r)|1>_B)/sqrt 2`.
pub fn squeezed_spe(r: f64, cutoff: Option<usize>) -> Result<FockPureState> {
    with_cutoff(2.0 * r.sinh().powi(2) + 0.5, cutoff, &[1], |c| {
        let mut v = CVector::zeros(2 * c);
        let s0 = squeezed_vacuum_amplitudes(r, c);
        let s1 = squeezed_photon_amplitudes(r, c);
        let h = 0.5f64.sqrt();
        v.rows_mut(0, c).copy_from(&s1.scale(h));
        v.rows_mut(c, c).copy_from(&s0.scale(h));
        FockPureState::normalized(vec![2, c], v)
    })
}

/// Applies `S(xi)` to a single-mode state by exponentiating the generator on
/// a padded space and cropping back to an automatically sized cutoff.
pub fn squeeze_state(state: &FockPureState, xi: C64) -> Result<FockPureState> {
    if state.mode_count() != 1 {
        return Err(Error::InvalidParameter("squeeze_state expects a single mode".into()));
    }
    let c0 = state.dim();
    let mean = state.mean_photon_number();
    let s = xi.norm();
    let out_mean = mean * (2.0 * s).cosh() + s.sinh().powi(2) + 2.0 * mean.sqrt() * (2.0 * s).sinh();
    let mut c = auto_cutoff(out_mean).max(c0);
    loop {
        let work = c + c / 2 + 20;
        let (padded, _) = state.resized(&[work])?;
        let op = squeeze_complex(&[work], 0, xi);
        let out = match op {
            Ok(op) => padded.apply(&op)?,
            Err(Error::Truncation { .. }) => {
                c += c / 4 + 4;
                if c > MAX_CUTOFF {
                    return Err(Error::Truncation { tail: 1.0, tol: TAIL_TOL });
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        let (cropped, lost) = out.resized(&[c])?;
        if lost < 1e-12 && cropped.tail_mass(0) < TAIL_TOL {
            return Ok(cropped);
        }
        c += c / 4 + 4;
        if c > MAX_CUTOFF {
            return Err(Error::Truncation { tail: lost, tol: TAIL_TOL });
        }
    }
}

/// `S(s e^{2 i theta}) N (|beta e^{i theta}> + e^{i phi}|-beta e^{i theta}>)`.
pub fn squeezed_cat(beta: f64, theta: f64, s: f64, phi: f64) -> Result<FockPureState> {
    let cat = scs(C64::from_polar(beta, theta), phi, None)?;
    if s == 0.0 {
        return Ok(cat);
    }
    squeeze_state(&cat, C64::from_polar(s, 2.0 * theta))
}

/// `(|0> + |alpha>)`, normalized.
pub fn zero_plus_coherent(alpha: C64, cutoff: Option<usize>) -> Result<FockPureState> {
    with_cutoff(alpha.norm_sqr(), cutoff, &[0], |c| {
        let mut v = coherent_amplitudes(alpha, c);
        v[0] += C64::new(1.0, 0.0);
        FockPureState::normalized(vec![c], v)
    })
}

/// Coefficients `Delta_ij` of the amplified micro photon for `i, j <= cap`.
pub fn qiopa_coefficients(g: f64, cap: usize) -> Vec<Vec<f64>> {
    let t = 0.5 * g.tanh();
    let pref = g.cosh().powi(-2);
    (0..=cap)
        .map(|i| {
            (0..=cap)
                .map(|j| {
                    let lm = 0.5 * (ln_factorial((2 * i + 1) as u64) + ln_factorial((2 * j) as u64))
                        - ln_factorial(i as u64)
                        - ln_factorial(j as u64);
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    if t == 0.0 {
                        return if i == 0 && j == 0 { pref } else { 0.0 };
                    }
                    sign * pref * (lm + (i + j) as f64 * t.ln()).exp()
                })
                .collect()
        })
        .collect()
}

/// Micro-macro entanglement after phase-covariant amplification of one photon
/// of a polarization-entangled pair.
///
/// Modes: `[A_R, A_L, B_R, B_L]`. The micro photon is dual-rail (one photon in
/// two modes); each amplified polarization is a photon-number mode cut at `2 cap + 2`.
pub fn qiopa(g: f64, order_cap: usize) -> Result<FockPureState> {
    let delta = qiopa_coefficients(g, order_cap);
    let norm: f64 = delta.iter().flatten().map(|d| d * d).sum();
    if norm < 1.0 - 1e-8 {
        return Err(Error::Truncation { tail: 1.0 - norm, tol: 1e-8 });
    }
    let cb = 2 * order_cap + 2;
    let trunc = vec![2, 2, cb, cb];
    let mut v = CVector::zeros(4 * cb * cb);
    let h = 0.5f64.sqrt();
    let idx = |ar: usize, al: usize, br: usize, bl: usize| ((ar * 2 + al) * cb + br) * cb + bl;
    for (i, row) in delta.iter().enumerate() {
        for (j, &d) in row.iter().enumerate() {
            // |R>_A |Phi^L>_B: 2i+1 photons in L, 2j in R
            v[idx(1, 0, 2 * j, 2 * i + 1)] += C64::new(h * d, 0.0);
            // - |L>_A |Phi^R>_B
            v[idx(0, 1, 2 * i + 1, 2 * j)] -= C64::new(h * d, 0.0);
        }
    }
    FockPureState::normalized(trunc, v)
}

/// `|A> = |N>|0>` and `|B> = (cos theta a^dagger + sin theta b^dagger)^N |0> / sqrt(N!)`.
pub fn marquardt_pair(n: usize, theta: f64) -> Result<(FockPureState, FockPureState)> {
    if n == 0 || n > 200 {
        return Err(Error::InvalidParameter(format!("N={n} outside 1..=200")));
    }
    let c = n + 3;
    let a = FockPureState::basis(vec![c, c], &[n, 0])?;
    let mut v = CVector::zeros(c * c);
    let (co, si) = (theta.cos(), theta.sin());
    for k in 0..=n {
        // sqrt(C(N,k)) cos^k sin^{N-k} |k, N-k>
        let lb = 0.5 * (ln_factorial(n as u64) - ln_factorial(k as u64) - ln_factorial((n - k) as u64));
        v[k * c + (n - k)] = C64::new(lb.exp() * co.powi(k as i32) * si.powi((n - k) as i32), 0.0);
    }
    let b = FockPureState::normalized(vec![c, c], v)?;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{displace, squeeze};

    #[test]
    fn cat_normalization_and_parity() {
        let a = C64::new(2.0, 0.0);
        let s = scs(a, 0.0, None).unwrap();
        for n in (1..s.dim()).step_by(2) {
            assert!(s.amplitudes()[n].norm() < 1e-10);
        }
        let coh = coherent(a, Some(s.dim())).unwrap();
        // <alpha|SCS> = N (1 + e^{-2|a|^2})
        let nn = 1.0 / (2.0 + 2.0 * (-8.0f64).exp()).sqrt();
        assert!((coh.inner(&s).unwrap().norm() - nn * (1.0 + (-8.0f64).exp())).abs() < 1e-9);
        let v = scs(C64::new(0.0, 0.0), 0.0, None).unwrap();
        assert!((v.amplitudes()[0].norm() - 1.0).abs() < 1e-14);
        assert!(scs(C64::new(0.0, 0.0), std::f64::consts::PI, None).is_err());
    }

    #[test]
    fn analytic_in_truncation() {
        let a = C64::new(1.5, 0.3);
        let s1 = ecs(a, 0.4, None).unwrap();
        let c = s1.truncations()[0];
        let s2 = ecs(a, 0.4, Some(2 * c)).unwrap();
        let (back, _) = s2.resized(&[c, c]).unwrap();
        assert!((back.amplitudes() - s1.amplitudes()).camax() < 1e-10);
    }

    #[test]
    fn ecs_swap_symmetry() {
        let s = ecs(C64::new(1.0, 0.0), 0.0, None).unwrap();
        let c = s.truncations()[0];
        for i in 0..c {
            for j in 0..c {
                assert!((s.amplitudes()[i * c + j] - s.amplitudes()[j * c + i]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn hybrid_photons() {
        let s = hybrid(C64::new(3.0, 0.0), None).unwrap();
        assert!((s.mean_photon_number() - 9.5).abs() < 1e-9);
        let r = s.reduced(&[0]).unwrap();
        assert!((crate::fock::von_neumann_entropy(&r) - 2f64.ln()).abs() < 1e-4);
    }

    #[test]
    fn displaced_spe_factorizes() {
        let alpha = C64::new(1.2, -0.7);
        let s = displaced_spe(alpha, false, None).unwrap();
        let c = s.truncations()[1];
        let (spe, _) = single_photon_entanglement().unwrap().resized(&[2, c]).unwrap();
        let pad = c + 30;
        let (wide, _) = spe.resized(&[2, pad]).unwrap();
        let d = displace(&[2, pad], 1, alpha).unwrap();
        let (manual, _) = wide.apply(&d).unwrap().resized(&[2, c]).unwrap();
        assert!((manual.fidelity(&s).unwrap() - 1.0).abs() < 1e-9);
        assert!((s.mean_photon_number() - (alpha.norm_sqr() + 1.0)).abs() < 1e-9);
        let both = displaced_spe(alpha, true, None).unwrap();
        assert!((both.mean_photon_number() - (2.0 * alpha.norm_sqr() + 1.0)).abs() < 1e-9);
    }

    #[test]
    fn squeezed_states_match_expm() {
        let r = 0.6;
        let s = squeezed_vacuum(r, Some(90)).unwrap();
        assert!((s.mean_photon_number() - r.sinh().powi(2)).abs() < 1e-12);
        let c = s.dim();
        let work = c + 40;
        let op = squeeze(&[work], 0, r).unwrap();
        let v = FockPureState::vacuum(vec![work]).unwrap().apply(&op).unwrap();
        let (v, _) = v.resized(&[c]).unwrap();
        assert!((v.fidelity(&s).unwrap() - 1.0).abs() < 1e-10);
        let p1 = FockPureState::basis(vec![work], &[1]).unwrap().apply(&op).unwrap();
        let (p1, _) = p1.resized(&[c]).unwrap();
        let closed = FockPureState::normalized(vec![c], squeezed_photon_amplitudes(r, c)).unwrap();
        assert!((p1.fidelity(&closed).unwrap() - 1.0).abs() < 1e-9);
        assert!((closed.inner(&p1).unwrap().re - 1.0).abs() < 1e-9, "sign convention");
    }

    #[test]
    fn squeezed_spe_photons() {
        for r in [0.5, 1.0] {
            let s = squeezed_spe(r, Some(200)).unwrap();
            assert!((s.mean_photon_number() - (2.0 * r.sinh().powi(2) + 1.0)).abs() < 1e-11);
            // default cutoff leaves ~1e-8 of mass in the tail
            let auto = squeezed_spe(r, None).unwrap();
            assert!((auto.mean_photon_number() - (2.0 * r.sinh().powi(2) + 1.0)).abs() < 1e-6);
        }
    }

    #[test]
    fn qiopa_structure() {
        let s0 = qiopa(0.0, 3).unwrap();
        assert!((s0.mean_photon_number() - 2.0).abs() < 1e-14);
        let d = qiopa_coefficients(1.0, 40);
        let norm: f64 = d.iter().flatten().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-8);
        assert!(qiopa(1.0, 5).is_err());
    }

    #[test]
    fn marquardt_limits() {
        let (a, b) = marquardt_pair(5, 0.0).unwrap();
        assert!((a.fidelity(&b).unwrap() - 1.0).abs() < 1e-14);
        let (_, b) = marquardt_pair(4, 0.9).unwrap();
        assert!((b.mode_mean_photon_number(0) - 4.0 * 0.9f64.cos().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn squeezed_cat_reduces_to_cat() {
        let c = squeezed_cat(1.0, 0.0, 0.0, 0.0).unwrap();
        let s = scs(C64::new(1.0, 0.0), 0.0, None).unwrap();
        assert!((c.fidelity(&s).unwrap() - 1.0).abs() < 1e-14);
        let sq = squeezed_cat(1.0, 0.3, 0.4, 0.0).unwrap();
        assert!(sq.tail_mass(0) < TAIL_TOL);
    }
}
