use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{purity, DensityOperator, FockPureState};
use crate::linalg;
use crate::phase_space::special::{displacement_radial, gauss_laguerre};
use crate::report::MeasureReport;
use crate::C64;

/// Whether the `-1` inside the phase-space integrand is kept (coherent
/// states give zero) or dropped (value shifted by `M P / 2`, always positive).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IOffset {
    #[default]
    Standard,
    Positive,
}

impl IOffset {
    fn tag(self) -> &'static str {
        match self {
            IOffset::Standard => "standard",
            IOffset::Positive => "positive",
        }
    }
}

/// `sum_m (Tr[n_m rho^2] - Tr[a_m rho a_m^dagger rho])`, the purity decay
/// rate `-(1/2) dP/dtau` under uniform photon loss.
pub fn measure_i_algebraic(state: &DensityOperator, offset: IOffset) -> MeasureReport {
    let trunc = state.truncations();
    let st = linalg::strides(trunc);
    let rho = state.matrix();
    let d = state.dim();
    let mut value = 0.0;
    for (m, &c) in trunc.iter().enumerate() {
        let s = st[m];
        let mut n_rho2 = 0.0;
        let mut a_term = 0.0;
        for j in 0..d {
            let nj = (j / s) % c;
            for i in 0..d {
                let ni = (i / s) % c;
                n_rho2 += ni as f64 * rho[(i, j)].norm_sqr();
                if ni + 1 < c && nj + 1 < c {
                    let f = (((ni + 1) * (nj + 1)) as f64).sqrt();
                    a_term += f * (rho[(i + s, j + s)] * rho[(j, i)]).re;
                }
            }
        }
        value += n_rho2 - a_term;
    }
    let p = purity(state);
    if offset == IOffset::Positive {
        value += 0.5 * trunc.len() as f64 * p;
    }
    let max_c = trunc.iter().copied().max().unwrap_or(1) as f64;
    MeasureReport::new(value, "algebraic", state.max_tail_mass() * max_c)
        .with("offset", offset.tag())
        .with("truncations", format!("{trunc:?}"))
        .with("purity", p)
}

/// Pure-state form `sum_m (<n_m> - |<a_m>|^2)`.
pub fn measure_i_pure(state: &FockPureState, offset: IOffset) -> MeasureReport {
    let mut value: f64 = (0..state.mode_count())
        .map(|m| state.mode_mean_photon_number(m) - state.expect_annihilation(m).norm_sqr())
        .sum();
    if offset == IOffset::Positive {
        value += 0.5 * state.mode_count() as f64;
    }
    let max_c = state.truncations().iter().copied().max().unwrap_or(1) as f64;
    MeasureReport::new(value, "algebraic-pure", state.max_tail_mass() * max_c)
        .with("offset", offset.tag())
        .with("truncations", format!("{:?}", state.truncations()))
}

#[derive(Debug, Clone)]
pub struct IntegralOptions {
    /// Starting node count per mode; defaults to `max(cutoff + 4, 16)`.
    pub initial_nodes: Option<usize>,
    /// Accepted refinement delta (absolute, relaxed to 1e-9 relative).
    pub tolerance: f64,
    pub max_nodes: usize,
    pub offset: IOffset,
}

impl Default for IntegralOptions {
    fn default() -> Self {
        Self { initial_nodes: None, tolerance: 1e-7, max_nodes: 512, offset: IOffset::Standard }
    }
}

struct RadialRule {
    u: Vec<f64>,
    /// Gauss-Laguerre weights times `e^{u}`, since the integrand tables keep their Gaussian factor.
    w: Vec<f64>,
    tables: Vec<DMatrix<f64>>,
}

fn radial_rule(nodes: usize, c: usize) -> RadialRule {
    let (u, lw) = gauss_laguerre(nodes);
    let w = u.iter().zip(&lw).map(|(u, l)| (l + u).exp()).collect();
    let tables = u.iter().map(|&x| displacement_radial(x.sqrt(), c)).collect();
    RadialRule { u, w, tables }
}

/// Returns `(I_standard, I_positive, purity)` at the given node counts.
fn integrate(state: &DensityOperator, nodes: &[usize]) -> (f64, f64, f64) {
    let trunc = state.truncations();
    let rho = state.matrix();
    match trunc.len() {
        1 => {
            let c = trunc[0];
            let rule = radial_rule(nodes[0], c);
            let (mut i_std, mut i_pos, mut p) = (0.0, 0.0, 0.0);
            for k in 0..rule.u.len() {
                let g = &rule.tables[k];
                let mut coef = vec![C64::new(0.0, 0.0); 2 * c - 1];
                for n in 0..c {
                    for m in 0..c {
                        coef[m + c - 1 - n] += rho[(n, m)] * g[(m, n)];
                    }
                }
                let s: f64 = coef.iter().map(|z| z.norm_sqr()).sum();
                i_std += 0.5 * rule.w[k] * (rule.u[k] - 1.0) * s;
                i_pos += 0.5 * rule.w[k] * rule.u[k] * s;
                p += rule.w[k] * s;
            }
            (i_std, i_pos, p)
        }
        2 => {
            let (c1, c2) = (trunc[0], trunc[1]);
            let r1 = radial_rule(nodes[0], c1);
            let r2 = radial_rule(nodes[1], c2);
            let w2d = 2 * c2 - 1;
            let w1d = 2 * c1 - 1;
            let (mut i_std, mut i_pos, mut p) = (0.0, 0.0, 0.0);
            let mut partial = vec![C64::new(0.0, 0.0); c1 * c1 * w2d];
            let mut coef = vec![C64::new(0.0, 0.0); w1d * w2d];
            for j in 0..r2.u.len() {
                let g2 = &r2.tables[j];
                partial.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
                for n1 in 0..c1 {
                    for n2 in 0..c2 {
                        let row = n1 * c2 + n2;
                        for m1 in 0..c1 {
                            let base = (n1 * c1 + m1) * w2d;
                            for m2 in 0..c2 {
                                let r = rho[(row, m1 * c2 + m2)];
                                partial[base + m2 + c2 - 1 - n2] += r * g2[(m2, n2)];
                            }
                        }
                    }
                }
                for k in 0..r1.u.len() {
                    let g1 = &r1.tables[k];
                    coef.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
                    for n1 in 0..c1 {
                        for m1 in 0..c1 {
                            let f = g1[(m1, n1)];
                            if f == 0.0 {
                                continue;
                            }
                            let src = &partial[(n1 * c1 + m1) * w2d..(n1 * c1 + m1 + 1) * w2d];
                            let dst = &mut coef[(m1 + c1 - 1 - n1) * w2d..(m1 + c1 - n1) * w2d];
                            for (d, s) in dst.iter_mut().zip(src) {
                                *d += s * f;
                            }
                        }
                    }
                    let s: f64 = coef.iter().map(|z| z.norm_sqr()).sum();
                    let w = r1.w[k] * r2.w[j];
                    i_std += 0.5 * w * (r1.u[k] + r2.u[j] - 2.0) * s;
                    i_pos += 0.5 * w * (r1.u[k] + r2.u[j]) * s;
                    p += w * s;
                }
            }
            (i_std, i_pos, p)
        }
        _ => unreachable!("checked by caller"),
    }
}

/// Direct phase-space integral of `|chi|^2` weighted by `sum_m (|xi_m|^2 - 1)`.
///
/// The angular integrals are done exactly by expanding `chi` in angular
/// harmonics, and the radial ones with Gauss-Laguerre rules in `u = |xi|^2`,
/// doubling the node count until two levels agree.
pub fn measure_i_integral(state: &DensityOperator, opts: &IntegralOptions) -> Result<MeasureReport> {
    let trunc = state.truncations().to_vec();
    if trunc.len() > 2 {
        return Err(Error::Unsupported(format!(
            "integral route handles one or two modes, got {}",
            trunc.len()
        )));
    }
    let mut nodes: Vec<usize> = trunc
        .iter()
        .map(|&c| opts.initial_nodes.unwrap_or((c + 4).max(16)))
        .collect();
    let pick = |r: (f64, f64, f64)| match opts.offset {
        IOffset::Standard => r.0,
        IOffset::Positive => r.1,
    };
    let mut prev = integrate(state, &nodes);
    loop {
        let next_nodes: Vec<usize> = nodes.iter().map(|n| 2 * n).collect();
        if next_nodes.iter().any(|&n| n > opts.max_nodes) {
            return Err(Error::Convergence(format!(
                "refinement delta above tolerance at {nodes:?} radial nodes"
            )));
        }
        let cur = integrate(state, &next_nodes);
        let delta = (pick(cur) - pick(prev)).abs();
        let tol = opts.tolerance.max(1e-9 * pick(cur).abs());
        if delta <= tol {
            return Ok(MeasureReport::new(pick(cur), "integral", delta)
                .with("offset", opts.offset.tag())
                .with("radial_nodes", format!("{next_nodes:?}"))
                .with("angular", "exact-harmonic")
                .with("purity_check", cur.2)
                .with("truncations", format!("{trunc:?}")));
        }
        nodes = next_nodes;
        prev = cur;
    }
}
