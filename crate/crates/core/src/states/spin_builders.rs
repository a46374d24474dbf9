//! Qubit-register states.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::spin::{SpinState, MAX_QUBITS};
use crate::C64;

fn check_n(n: usize, min: usize) -> Result<()> {
    if n < min || n > MAX_QUBITS {
        return Err(Error::InvalidParameter(format!("N={n} outside {min}..={MAX_QUBITS}")));
    }
    Ok(())
}

pub fn ghz(n: usize) -> Result<SpinState> {
    SpinState::ghz(n)
}

pub fn product_plus(n: usize) -> Result<SpinState> {
    SpinState::plus_product(n)
}

/// `|0...0>` on `n` qubits.
pub fn product_zero(n: usize) -> Result<SpinState> {
    check_n(n, 1)?;
    SpinState::basis(&"0".repeat(n))
}

/// `(|0>^N + |eps>^N)/sqrt K` with `|eps> = cos eps |0> + sin eps |1>`,
/// `K = 2 (1 + cos^N eps)`.
pub fn generalized_ghz(n: usize, epsilon: f64) -> Result<SpinState> {
    check_n(n, 2)?;
    if !(epsilon > 0.0 && epsilon <= std::f64::consts::FRAC_PI_2 + 1e-15) {
        return Err(Error::InvalidParameter(format!("epsilon={epsilon} outside (0, pi/2]")));
    }
    let (c, s) = (epsilon.cos(), epsilon.sin());
    let k = 2.0 * (1.0 + c.powi(n as i32));
    let d = 1usize << n;
    let v = CVector::from_fn(d, |i, _| {
        let ones = i.count_ones() as i32;
        let eps_term = c.powi(n as i32 - ones) * s.powi(ones);
        let zero_term = if i == 0 { 1.0 } else { 0.0 };
        C64::new((zero_term + eps_term) / k.sqrt(), 0.0)
    });
    SpinState::pure(n, v)
}

/// `|0><0|^N + |1><1|^N + Gamma (|0><1|^N + h.c.)`, normalized.
pub fn mixed_ghz(n: usize, gamma: f64) -> Result<SpinState> {
    check_n(n, 1)?;
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("Gamma={gamma} outside [0, 1]")));
    }
    let d = 1usize << n;
    let mut m = CMatrix::zeros(d, d);
    m[(0, 0)] = C64::new(0.5, 0.0);
    m[(d - 1, d - 1)] = C64::new(0.5, 0.0);
    m[(0, d - 1)] = C64::new(0.5 * gamma, 0.0);
    m[(d - 1, 0)] = C64::new(0.5 * gamma, 0.0);
    SpinState::mixed(n, m)
}

fn ones_then_zeros(n: usize, k: usize) -> usize {
    // site 0 is the most significant bit
    ((1usize << k) - 1) << (n - k)
}

/// `|0>^N + sum_{k=0}^{N} |1>^k |0>^{N-k}`, normalized.
pub fn dn_state(n: usize) -> Result<SpinState> {
    check_n(n, 1)?;
    let mut v = CVector::zeros(1 << n);
    v[0] += C64::new(1.0, 0.0);
    for k in 0..=n {
        v[ones_then_zeros(n, k)] += C64::new(1.0, 0.0);
    }
    SpinState::pure_normalized(n, v)
}

/// Constituents of [`dn_state`]: `|0>^N` and the normalized staircase sum.
pub fn dn_branches(n: usize) -> Result<(SpinState, SpinState)> {
    check_n(n, 1)?;
    let mut v = CVector::zeros(1 << n);
    for k in 0..=n {
        v[ones_then_zeros(n, k)] += C64::new(1.0, 0.0);
    }
    Ok((product_zero(n)?, SpinState::pure_normalized(n, v)?))
}

/// `((|uu> + e^{i phi} |dd>)/sqrt 2)^{x N}` on `2N` qubits, pairs adjacent.
pub fn cooper_product(n_pairs: usize, phi: f64) -> Result<SpinState> {
    check_n(2 * n_pairs, 2)?;
    let h = 0.5f64.sqrt();
    let pair = CVector::from_vec(vec![
        C64::new(h, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::from_polar(h, phi),
    ]);
    let mut v = CVector::from_element(1, C64::new(1.0, 0.0));
    for _ in 0..n_pairs {
        v = v.kronecker(&pair);
    }
    SpinState::pure_normalized(2 * n_pairs, v)
}

/// Constituents `|0>^N` and `|eps>^N` of [`generalized_ghz`].
pub fn generalized_ghz_branches(n: usize, epsilon: f64) -> Result<(SpinState, SpinState)> {
    check_n(n, 1)?;
    let eps = [C64::new(epsilon.cos(), 0.0), C64::new(epsilon.sin(), 0.0)];
    Ok((product_zero(n)?, SpinState::product(&vec![eps; n])?))
}

/// GHZ constituents `|0>^N` and `|1>^N`.
pub fn ghz_branches(n: usize) -> Result<(SpinState, SpinState)> {
    check_n(n, 1)?;
    Ok((SpinState::basis(&"0".repeat(n))?, SpinState::basis(&"1".repeat(n))?))
}
