#![allow(dead_code)]

use macroq::fock::{DensityOperator, FockPureState};
use macroq::linalg::{self, CMatrix, CVector};
use macroq::spin::{AdditiveObservable, LocalTerm, ProjectorSpec, SpinState};
use macroq::C64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

/// Fixed-seed configuration so every run sees the same cases.
pub fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..Config::default() }
}

pub fn complex_vec(len: usize) -> impl Strategy<Value = CVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_filter("non-zero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| CVector::from_iterator(v.len(), v.into_iter().map(|(a, b)| C64::new(a, b))))
}

/// Random pure state supported on the lowest `support` levels of a `cutoff` space.
pub fn pure_fock(support: usize, cutoff: usize) -> impl Strategy<Value = FockPureState> {
    complex_vec(support).prop_map(move |v| {
        let mut full = CVector::zeros(cutoff);
        full.rows_mut(0, support).copy_from(&v);
        FockPureState::normalized(vec![cutoff], full).unwrap()
    })
}

/// Random density matrix of rank up to `rank` on the given truncations,
/// supported on the lowest `support` levels of each mode.
pub fn mixed_fock(trunc: Vec<usize>, support: usize, rank: usize) -> impl Strategy<Value = DensityOperator> {
    let d: usize = trunc.iter().product();
    let allowed: Vec<usize> = (0..d).filter(|&i| linalg::digits(i, &trunc).iter().all(|&n| n < support)).collect();
    prop::collection::vec(complex_vec(allowed.len()), 1..=rank).prop_map(move |cols| {
        let mut g = CMatrix::zeros(d, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (k, &i) in allowed.iter().enumerate() {
                g[(i, j)] = c[k];
            }
        }
        DensityOperator::normalized(trunc.clone(), &g * g.adjoint()).unwrap()
    })
}

pub fn pure_spin(n: usize) -> impl Strategy<Value = SpinState> {
    complex_vec(1 << n).prop_map(move |v| SpinState::pure_normalized(n, v).unwrap())
}

pub fn mixed_spin(n: usize, rank: usize) -> impl Strategy<Value = SpinState> {
    let d = 1 << n;
    prop::collection::vec(complex_vec(d), 1..=rank).prop_map(move |cols| {
        let mut g = CMatrix::zeros(d, cols.len());
        for (j, c) in cols.iter().enumerate() {
            g.set_column(j, c);
        }
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        SpinState::mixed(n, m.unscale(tr)).unwrap()
    })
}

/// Hermitian 2x2 rescaled so its spectrum lies in `[-1, 1]`.
pub fn local_matrix() -> impl Strategy<Value = CMatrix> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b, c, d)| {
        let m = CMatrix::from_row_slice(2, 2, &[C64::new(a, 0.0), C64::new(c, d), C64::new(c, -d), C64::new(b, 0.0)]);
        let top = linalg::eigvalsh(&m).iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if top > 1e-9 {
            m.unscale(top)
        } else {
            m
        }
    })
}

pub fn observable(n: usize) -> impl Strategy<Value = AdditiveObservable> {
    prop::collection::vec(local_matrix(), n).prop_map(|locals| AdditiveObservable::from_locals(locals).unwrap())
}

/// Rank-`k` projector onto the span of random vectors.
pub fn projector(n: usize, max_rank: usize) -> impl Strategy<Value = ProjectorSpec> {
    let d = 1 << n;
    prop::collection::vec(complex_vec(d), 1..=max_rank).prop_map(move |cols| {
        let mut g = CMatrix::zeros(d, cols.len());
        for (j, c) in cols.iter().enumerate() {
            g.set_column(j, c);
        }
        let q = g.qr().q();
        ProjectorSpec::new(&q * q.adjoint()).unwrap()
    })
}

pub fn single_terms(locals: &[CMatrix]) -> Vec<LocalTerm> {
    locals.iter().enumerate().map(|(k, m)| LocalTerm { sites: vec![k], matrix: m.clone() }).collect()
}

/// Hermitian, unit trace, positive semidefinite.
pub fn assert_physical(rho: &DensityOperator, tol: f64) {
    let m = rho.matrix();
    assert!(linalg::hermiticity_defect(m) < tol, "hermiticity");
    assert!((m.trace().re - 1.0).abs() < tol, "trace {}", m.trace());
    assert!(rho.min_eigenvalue() > -tol, "min eigenvalue {}", rho.min_eigenvalue());
}
