//! Exit criteria. Each test writes one `PASS`/`FAIL` line to stderr (outside
//! the test harness capture) and then asserts its verdict.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::time::Instant;

use macroq::fock::{apply_loss, displace, mean_photon_number, squeeze, DensityOperator, FockPureState};
use macroq::linalg::{self, CMatrix, CVector};
use macroq::measures::{self, CrOptions, DurMode};
use macroq::phase_space::{measure_i_algebraic, measure_i_integral, measure_i_pure, IOffset, IntegralOptions};
use macroq::spin::{AdditiveObservable, Axis, LocalTerm, ProjectorSpec, SpinState};
use macroq::states::fit::{fit_cat, peak_amplitude, subtraction_match, wigner_line_peaks};
use macroq::states::fock_builders as fb;
use macroq::states::schemes;
use macroq::states::spin_builders as sb;
use macroq::states::{Branches, StateSpec};
use macroq::C64;
use macroq_cli::{run, RunManifest, RunOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erf_inv;

struct Verdict {
    checks: Vec<(bool, String)>,
}

impl Verdict {
    fn new() -> Self {
        Self { checks: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.checks.push((ok, what.into()));
    }

    fn close(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let ok = (got - want).abs() <= tol;
        self.check(ok, format!("{label}: {got:.9} vs {want:.9} (tol {tol:.1e})"));
    }

    fn relative(&mut self, label: &str, got: f64, want: f64, rel: f64) {
        let gap = (got - want).abs() / want.abs();
        self.check(gap <= rel, format!("{label}: {got:.6} vs {want:.6} (gap {:.2}%, limit {:.0}%)", 100.0 * gap, 100.0 * rel));
    }

    fn finish(self, id: &str, title: &str, start: Instant) {
        let failed: Vec<&String> = self.checks.iter().filter(|c| !c.0).map(|c| &c.1).collect();
        let status = if failed.is_empty() { "PASS" } else { "FAIL" };
        let detail = if failed.is_empty() {
            format!("{} checks", self.checks.len())
        } else {
            failed.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("; ")
        };
        let line = format!("{status} criterion {id:<3} {title} [{:.1}s]: {detail}\n", start.elapsed().as_secs_f64());
        let _ = std::io::stderr().write_all(line.as_bytes());
        assert!(failed.is_empty(), "{line}");
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_cvec(r: &mut ChaCha8Rng, len: usize) -> CVector {
    CVector::from_fn(len, |_, _| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
}

/// Random density matrix on `trunc`, supported below `support` in every mode.
fn random_density(r: &mut ChaCha8Rng, trunc: &[usize], support: usize) -> DensityOperator {
    let d: usize = trunc.iter().product();
    let rank = r.random_range(1..=3);
    let mut g = CMatrix::zeros(d, rank);
    for i in 0..d {
        if linalg::digits(i, trunc).iter().all(|&n| n < support) {
            for j in 0..rank {
                g[(i, j)] = C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
            }
        }
    }
    DensityOperator::normalized(trunc.to_vec(), &g * g.adjoint()).unwrap()
}

fn random_pure_spin(r: &mut ChaCha8Rng, n: usize) -> SpinState {
    SpinState::pure_normalized(n, random_cvec(r, 1 << n)).unwrap()
}

/// Hermitian single-qubit operator with spectrum in `[-1, 1]`.
fn random_local(r: &mut ChaCha8Rng) -> CMatrix {
    let h = CMatrix::from_fn(2, 2, |_, _| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
    let h = linalg::hermitize(&(&h + h.adjoint()));
    let top = linalg::eigvalsh(&h).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    h.unscale(top.max(1e-12))
}

fn random_observable(r: &mut ChaCha8Rng, n: usize) -> AdditiveObservable {
    AdditiveObservable::new(n, (0..n).map(|k| LocalTerm { sites: vec![k], matrix: random_local(r) }).collect()).unwrap()
}

fn a(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[test]
fn criterion_01_measure_i_gallery() {
    let start = Instant::now();
    let mut v = Verdict::new();
    // (label, state, expected I, absolute tolerance)
    let mut cases: Vec<(String, FockPureState, f64, f64)> = Vec::new();
    for al in [0.0, 1.0, 2.0, 3.0] {
        cases.push((format!("coherent {al}"), fb::coherent(a(al), None).unwrap(), 0.0, 1e-6));
    }
    for al in [0.5f64, 1.0, 2.0, 3.0] {
        let e = (-2.0 * al * al).exp();
        let want = al * al * (1.0 - e) / (1.0 + e);
        cases.push((format!("scs {al}"), fb::scs(a(al), 0.0, None).unwrap(), want, 1e-5));
        let e4 = (-4.0 * al * al).exp();
        let want = 2.0 * al * al * (1.0 - e4) / (1.0 + e4);
        cases.push((format!("ecs {al}"), fb::ecs(a(al), 0.0, None).unwrap(), want, 1e-5));
    }
    for r in [0.5f64, 1.0] {
        cases.push((format!("squeezed spe {r}"), fb::squeezed_spe(r, None).unwrap(), 2.0 * r.sinh().powi(2) + 1.0, 1e-5));
    }
    let spe = fb::single_photon_entanglement().unwrap();
    let spe_i = measure_i_algebraic(&spe.to_density(), IOffset::Standard).value;
    v.close("single-photon entanglement", spe_i, 1.0, 1e-9);
    for al in [1.0, 5.0] {
        cases.push((format!("displaced spe {al}"), fb::displaced_spe(a(al), false, None).unwrap(), spe_i, 1e-6));
    }
    let hybrid = fb::hybrid(a(3.0), None).unwrap();

    for (label, psi, want, tol) in &cases {
        let rho = psi.to_density();
        let alg = measure_i_algebraic(&rho, IOffset::Standard);
        v.close(label, alg.value, *want, *tol);
        let int = measure_i_integral(&rho, &IntegralOptions::default()).unwrap();
        let tol = f64::max(1e-5, 3.0 * alg.error_estimate.max(int.error_estimate));
        v.close(&format!("{label} integral vs algebraic"), int.value, alg.value, tol);
    }

    let rho = hybrid.to_density();
    let alg = measure_i_algebraic(&rho, IOffset::Standard);
    v.relative("hybrid 3 vs |alpha|^2 + 1/2", alg.value, 9.5, 0.02);
    let int = measure_i_integral(&rho, &IntegralOptions::default()).unwrap();
    v.close("hybrid integral vs algebraic", int.value, alg.value, f64::max(1e-5, 3.0 * alg.error_estimate.max(int.error_estimate)));

    // four modes: the pure-state algebraic form only
    let phi = fb::qiopa(1.0, 40).unwrap();
    let delta = fb::qiopa_coefficients(1.0, 40);
    let mut closed = 1.0;
    for (i, row) in delta.iter().enumerate() {
        for (j, d) in row.iter().enumerate() {
            closed += d * d * (2 * i + 2 * j + 1) as f64;
        }
    }
    let i_phi = measure_i_pure(&phi, IOffset::Standard).value;
    v.close("qiopa g=1 vs closed form", i_phi, closed, 1e-4);
    v.close("qiopa g=1 vs mean photon number", i_phi, phi.mean_photon_number(), 1e-4);
    v.finish("1", "measure-I gallery", start);
}

#[test]
fn criterion_02_i_bounded_by_photon_number() {
    let start = Instant::now();
    let mut v = Verdict::new();
    let mut r = rng(2);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..50 {
        let rho = if k % 2 == 0 { random_density(&mut r, &[12], 10) } else { random_density(&mut r, &[6, 6], 5) };
        let gap = measure_i_algebraic(&rho, IOffset::Standard).value - mean_photon_number(&rho);
        worst = worst.max(gap);
    }
    v.check(worst <= 1e-6, format!("max I - <n> = {worst:.3e} over 50 states"));
    v.finish("2", "I <= mean photon number", start);
}

#[test]
fn criterion_03_cavalcanti_reid() {
    let start = Instant::now();
    let mut v = Verdict::new();
    let grid = measures::cavalcanti_reid::default_s_grid();
    let opts = CrOptions::default();
    let cat = fb::scs(a(3.0), 0.0, None).unwrap().to_density();
    let r = measures::scan_s_max(&cat, &grid, &opts).unwrap();
    v.check(r.metadata["violations"] != "0", format!("scs 3 violations: {}", r.metadata["violations"]));
    v.relative("scs 3 S_max vs 2 alpha", r.value, 6.0, 0.15);
    let vac = measures::scan_s_max(&fb::vacuum().unwrap().to_density(), &grid, &opts).unwrap();
    v.check(vac.value == 0.0, format!("vacuum S_max {} (min lhs {})", vac.value, vac.metadata["min_lhs"]));
    let plus = fb::coherent(a(3.0), None).unwrap().to_density();
    let minus = fb::coherent(a(-3.0), None).unwrap().to_density();
    let mix = DensityOperator::mixture(&[(0.5, &plus), (0.5, &minus)]).unwrap();
    let m = measures::scan_s_max(&mix, &grid, &opts).unwrap();
    v.check(m.value == 0.0, format!("mixture S_max {} (min lhs {})", m.value, m.metadata["min_lhs"]));
    v.finish("3", "Cavalcanti-Reid violations", start);
}

#[test]
fn criterion_04_disconnectivity() {
    let start = Instant::now();
    let mut v = Verdict::new();
    for n in 2..=6 {
        let d = measures::disconnectivity(&sb::ghz(n).unwrap()).unwrap().d;
        v.check(d == n, format!("ghz {n} -> {d}"));
        for (name, s) in [("product_plus", sb::product_plus(n)), ("product_zero", sb::product_zero(n))] {
            let d = measures::disconnectivity(&s.unwrap()).unwrap().d;
            v.check(d == 1, format!("{name} {n} -> {d}"));
        }
    }
    let d = measures::disconnectivity(&sb::generalized_ghz(4, 0.3).unwrap()).unwrap().d;
    v.check(d == 4, format!("generalized ghz (4, 0.3) -> {d}"));
    for gamma in [0.0, 0.5, 0.9, 0.99] {
        let d = measures::disconnectivity(&sb::mixed_ghz(4, gamma).unwrap()).unwrap().d;
        v.check(d == 1, format!("mixed ghz gamma {gamma} -> {d}"));
    }
    v.finish("4", "disconnectivity", start);
}

#[test]
fn criterion_05_dur() {
    let start = Instant::now();
    let mut v = Verdict::new();
    let r = measures::dur_effective_size(8, 0.1, 1.0, DurMode::Simulated).unwrap();
    v.relative("N=8 eps=0.1 vs N eps^2", r.value, 0.08, 0.05);
    let g = measures::dur_effective_size(8, FRAC_PI_2, 1.0, DurMode::Simulated).unwrap();
    v.close("N=8 eps=pi/2", g.value, 8.0, 1e-6);
    v.finish("5", "Dur effective size", start);
}

#[test]
fn criterion_06_korsbakken() {
    let start = Instant::now();
    let mut v = Verdict::new();
    let (ga, gb) = sb::ghz_branches(5).unwrap();
    for delta in [0.3, 0.1, 0.01] {
        let c = measures::korsbakken_size(&ga, &gb, delta).unwrap().value;
        v.close(&format!("ghz 5 delta {delta}"), c, 5.0, 1e-12);
    }
    let (da, db) = sb::dn_branches(9).unwrap();
    let c = measures::korsbakken_size(&da, &db, 0.05).unwrap().value;
    v.relative("D_9 delta 0.05 vs 2 delta (N+1)", c, 2.0 * 0.05 * 10.0, 0.25);
    v.finish("6", "Korsbakken size", start);
}

#[test]
fn criterion_07_marquardt() {
    let start = Instant::now();
    let mut v = Verdict::new();
    for (n, theta) in [(10usize, PI / 6.0), (10, PI / 2.0), (6, 1.0)] {
        let r = measures::marquardt_size(n, theta).unwrap();
        v.close(&format!("N={n} theta={theta:.4}"), r.value, n as f64 * theta.sin().powi(2), 1e-9);
    }
    v.finish("7", "Marquardt size", start);
}

#[test]
fn criterion_08_index_p() {
    let start = Instant::now();
    let mut v = Verdict::new();
    let sizes: Vec<usize> = (2..=9).collect();
    let g = measures::index_p_estimate(&StateSpec::Ghz { n: 2 }, &sizes, 8).unwrap();
    v.close("ghz exponent", g.value, 2.0, 0.05);
    let p = measures::index_p_estimate(&StateSpec::ProductPlus { n: 2 }, &sizes, 8).unwrap();
    v.close("product exponent", p.value, 1.0, 0.05);
    v.finish("8", "index p exponent", start);
}

#[test]
fn criterion_09_quantum_fisher() {
    let start = Instant::now();
    let mut v = Verdict::new();
    let mut r = rng(9);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let n = 2 + k % 3;
        let psi = random_pure_spin(&mut r, n);
        let obs = random_observable(&mut r, n);
        // spectral formula on the density matrix against the variance of the vector
        let f = measures::qfi(&psi.to_mixed(), &obs).unwrap();
        worst = worst.max((f - 4.0 * psi.variance(&obs).unwrap()).abs());
    }
    v.check(worst <= 1e-8, format!("max |F - 4 Var| = {worst:.3e} over 20 states"));
    for n in 3..=6 {
        let obs = AdditiveObservable::collective(n, Axis::Z);
        let fg = measures::qfi(&sb::ghz(n).unwrap(), &obs).unwrap();
        let fp = measures::qfi(&sb::product_plus(n).unwrap(), &obs).unwrap();
        v.close(&format!("F(ghz {n}) / F(product {n})"), fg / fp, n as f64, 1e-9);
    }
    v.finish("9", "quantum Fisher information", start);
}

fn sekatski_branches(spec: StateSpec) -> (FockPureState, FockPureState) {
    match spec.branches().unwrap().unwrap() {
        Branches::Fock(x, y) => (x, y),
        Branches::Spin(..) => unreachable!(),
    }
}

#[test]
fn criterion_10a_sekatski_zero_plus_coherent() {
    let start = Instant::now();
    let mut v = Verdict::new();
    let (x, y) = sekatski_branches(StateSpec::ZeroPlusCoherent { alpha: 10.0.into(), cutoff: None });
    for p_g in [0.6, 0.75] {
        let got = measures::sekatski_size(&x, &y, p_g).unwrap().value;
        let want = 100.0 - 2.0 * erf_inv(2.0 * p_g - 1.0).powi(2);
        v.relative(&format!("|0> + |10>, P_g {p_g}"), got, want, 0.02);
    }
    v.finish("10a", "Sekatski size of |0> + |alpha>", start);
}

#[test]
fn criterion_10b_sekatski_displaced_single_photon() {
    let start = Instant::now();
    let mut v = Verdict::new();
    let (x, y) = sekatski_branches(StateSpec::DisplacedSpe { alpha: 20.0.into(), both_modes: false, cutoff: None });
    let p_g: f64 = 0.6;
    let got = measures::sekatski_size(&x, &y, p_g).unwrap().value;
    let q = 2.0 * p_g - 1.0;
    let want = 2.0 * 20.0 * erf_inv(q) * (1.0 / (PI * q * q) - 2.0).sqrt();
    v.relative("D(20)|+-> branches, P_g 0.6", got, want, 0.05);
    v.finish("10b", "Sekatski size of displaced single-photon branches", start);
}

#[test]
fn criterion_11_generation_schemes() {
    let start = Instant::now();
    let mut v = Verdict::new();
    for al in [0.4, 0.6, 0.8, 1.0, 1.2] {
        let (r, f) = subtraction_match(al).unwrap();
        v.check(f > 0.99, format!("subtraction alpha {al}: F = {f:.6} at r = {r:.4}"));
    }
    let hom = schemes::homodyne_conditioning(2, 0.05, 0.0).unwrap();
    let fit = fit_cat(&hom.state, 0.0, true).unwrap();
    v.relative("homodyne n=2 fitted amplitude", fit.beta, 1.6, 0.15);
    let extent = 2.0 * fit.beta + 4.0;
    let peaks = wigner_line_peaks(&hom.state, fit.theta, extent, 0.05).unwrap();
    let outer = |side: f64| peaks.iter().filter(|&&(t, w)| t * side > 1.0 && w > 0.0).map(|p| p.0.abs()).fold(None, |m: Option<f64>, t| Some(m.map_or(t, |m| m.max(t))));
    let symmetric = match (outer(-1.0), outer(1.0)) {
        (Some(l), Some(r)) => (l - r).abs() <= 0.1,
        _ => false,
    };
    v.check(symmetric, format!("homodyne Wigner peaks along the cat axis: {peaks:?}"));
    let amp = schemes::amplification(1.0).unwrap();
    let fit = fit_cat(&amp.state, 0.0, false).unwrap();
    v.relative("amplification fitted amplitude", fit.beta, 2f64.sqrt(), 0.05);
    let peak = peak_amplitude(&amp.state, 0.0).unwrap().unwrap_or(0.0);
    v.relative("amplification peak amplitude", peak, 2f64.sqrt(), 0.05);
    v.finish("11", "generation schemes", start);
}

const DETERMINISM_MANIFEST: &str = r#"
seed = 21

[[states]]
id = "ghz"
kind = "ghz"
n = 4

[[states]]
id = "cooper"
kind = "cooper"
n = 2

[[states]]
id = "cat"
kind = "scs"
alpha = 1.0

[sweep]
param = "alpha"
values = [0.5, 1.5]
state = "cat"

[[measures]]
kind = "fisher_neff"
states = ["ghz", "cooper"]

[[measures]]
kind = "index_q"
states = ["ghz", "cooper"]

[[measures]]
kind = "measure_i"
states = ["cat"]
"#;

#[test]
fn criterion_12_property_suites() {
    let start = Instant::now();
    let mut v = Verdict::new();
    let mut r = rng(12);

    // loss channel: trace preserving and positive
    let mut worst_trace: f64 = 0.0;
    let mut worst_eig: f64 = 0.0;
    for _ in 0..10 {
        let rho = random_density(&mut r, &[6, 6], 4);
        let tau = r.random_range(0.0..2.0);
        let out = apply_loss(&rho, tau, &[0, 1]).unwrap();
        worst_trace = worst_trace.max((out.matrix().trace().re - 1.0).abs());
        worst_eig = worst_eig.min(out.min_eigenvalue());
    }
    v.check(worst_trace < 1e-10 && worst_eig > -1e-10, format!("loss channel trace {worst_trace:.1e}, min eigenvalue {worst_eig:.1e}"));

    // Gaussian unitaries on the low-lying block
    let mut worst_u: f64 = 0.0;
    for _ in 0..10 {
        let al = C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        let s = r.random_range(-0.5..0.5);
        for u in [displace(&[60], 0, al).unwrap(), squeeze(&[60], 0, s).unwrap()] {
            let m = u.matrix();
            let low = (m.adjoint() * m).view((0, 0), (20, 20)).into_owned();
            worst_u = worst_u.max((low - CMatrix::identity(20, 20)).camax());
        }
    }
    v.check(worst_u < 1e-8, format!("unitarity defect {worst_u:.1e}"));

    // displacement leaves I unchanged
    let mut worst_i: f64 = 0.0;
    for _ in 0..10 {
        let rho = random_density(&mut r, &[40], 5);
        let al = C64::new(r.random_range(-1.2..1.2), r.random_range(-1.2..1.2));
        let moved = rho.conjugate(&displace(&[40], 0, al).unwrap()).unwrap();
        let i0 = measure_i_algebraic(&rho, IOffset::Standard).value;
        let i1 = measure_i_algebraic(&moved, IOffset::Standard).value;
        worst_i = worst_i.max((i0 - i1).abs());
    }
    v.check(worst_i < 1e-6, format!("displacement changes I by {worst_i:.1e}"));

    // index q: commutator and eigenbasis routes
    let mut worst_q: f64 = 0.0;
    for k in 0..10 {
        let n = 2 + k % 3;
        let rho = random_pure_spin(&mut r, n);
        let rho = if k % 2 == 0 { rho.dephase_each(0.8).unwrap() } else { rho };
        let obs = random_observable(&mut r, n);
        let eta = ProjectorSpec::from_vector(&random_cvec(&mut r, 1 << n)).unwrap();
        let rep = measures::index_q_correlator(&rho, &obs, &eta).unwrap();
        let other: f64 = rep.metadata["eigenbasis_value"].parse().unwrap();
        worst_q = worst_q.max((rep.value - other).abs() / rep.value.abs().max(1.0));
    }
    v.check(worst_q < 1e-8, format!("index-q route gap {worst_q:.1e}"));

    // manifest determinism
    let m = RunManifest::from_toml_str(DETERMINISM_MANIFEST).unwrap();
    let runs: Vec<Vec<(Option<u64>, Option<String>)>> = [1, 4]
        .iter()
        .map(|&jobs| {
            run(&m, &RunOptions { jobs: Some(jobs), seed: None })
                .unwrap()
                .iter()
                .map(|row| (row.value.map(f64::to_bits), row.error.clone()))
                .collect()
        })
        .collect();
    v.check(runs[0] == runs[1] && runs[0].len() == 6, format!("manifest rows reproduce ({} rows)", runs[0].len()));
    v.check(runs[0].iter().all(|(_, e)| e.is_none()), "manifest rows without errors");
    v.finish("12", "property suites", start);
}
