use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::DensityOperator;
use crate::phase_space::special::trapezoid_window;
use crate::phase_space::{default_quadrature_grid, quadrature_distribution, QuadratureDistribution};
use crate::report::MeasureReport;

const VIOLATION_TOL: f64 = 1e-9;
const MASS_TOL: f64 = 1e-4;

/// Evaluation choices for the inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CrOptions {
    /// Centre `c` of the partition `x <= c - S/2 | middle | x >= c + S/2`.
    pub center: f64,
    /// Drop the lone `+S/2` inside `delta`.
    pub drop_s_term: bool,
}

impl Default for CrOptions {
    fn default() -> Self {
        Self { center: 0.0, drop_s_term: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityVerdict {
    pub lhs: f64,
    pub bound: f64,
    pub s: f64,
    pub violated: bool,
    pub p_plus: f64,
    pub p_minus: f64,
    pub p_zero: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub var_plus: f64,
    pub var_minus: f64,
    pub ave_var_x: f64,
    pub delta: f64,
    pub var_p: f64,
}

/// Mass, mean and variance of the density restricted to `[lo, hi]`;
/// a region without mass contributes zeros.
fn region(q: &QuadratureDistribution, lo: f64, hi: f64) -> (f64, f64, f64) {
    let g = &q.grid;
    let mass = trapezoid_window(g, &q.density, lo, hi);
    if mass <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let xf: Vec<f64> = g.iter().zip(&q.density).map(|(x, p)| x * p).collect();
    let mean = trapezoid_window(g, &xf, lo, hi) / mass;
    let vf: Vec<f64> = g.iter().zip(&q.density).map(|(x, p)| (x - mean).powi(2) * p).collect();
    let var = trapezoid_window(g, &vf, lo, hi) / mass;
    (mass, mean, var)
}

/// `(P_+ D_+ + P_- D_- + P_0 delta) Var(p) >= 1` for states without a
/// coherent superposition of outcomes separated by `S`, with
/// `delta = (mu_+ + S/2)^2 + (mu_- - S/2)^2 + S/2 + D_+ + D_-` (positions
/// relative to the partition centre).
pub fn cavalcanti_reid(
    px: &QuadratureDistribution,
    pp: &QuadratureDistribution,
    s: f64,
    opts: &CrOptions,
) -> Result<InequalityVerdict> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!("S={s} must be positive")));
    }
    for q in [px, pp] {
        let m = q.mass();
        if (m - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidParameter(format!("distribution mass {m:.6} is not normalized")));
        }
    }
    let c = opts.center;
    let h = 0.5 * s;
    let inf = f64::INFINITY;
    let (p_minus, mu_minus, var_minus) = region(px, -inf, c - h);
    let (p_plus, mu_plus, var_plus) = region(px, c + h, inf);
    let p_zero = (px.mass() - p_plus - p_minus).max(0.0);
    // means enter relative to the centre; empty regions were zeroed above
    let shift = |p: f64, mu: f64| if p > 0.0 { mu - c } else { 0.0 };
    let (m_plus, m_minus) = (shift(p_plus, mu_plus), shift(p_minus, mu_minus));
    let lone = if opts.drop_s_term { 0.0 } else { h };
    let delta = (m_plus + h).powi(2) + (m_minus - h).powi(2) + lone + var_plus + var_minus;
    let ave_var_x = p_plus * var_plus + p_minus * var_minus;
    let var_p = pp.variance();
    let lhs = (ave_var_x + p_zero * delta) * var_p;
    Ok(InequalityVerdict {
        lhs,
        bound: 1.0,
        s,
        violated: lhs < 1.0 - VIOLATION_TOL,
        p_plus,
        p_minus,
        p_zero,
        mu_plus,
        mu_minus,
        var_plus,
        var_minus,
        ave_var_x,
        delta,
        var_p,
    })
}

/// `S = 0.1, 0.2, ..., 12`.
pub fn default_s_grid() -> Vec<f64> {
    (1..=120).map(|k| k as f64 * 0.1).collect()
}

/// Largest `S` on `s_grid` at which the inequality is violated (0 if none),
/// from the `x` and `p` homodyne marginals of a single mode.
pub fn scan_s_max(state: &DensityOperator, s_grid: &[f64], opts: &CrOptions) -> Result<MeasureReport> {
    if state.mode_count() != 1 {
        return Err(Error::InvalidParameter("scan_s_max expects a single-mode state".into()));
    }
    let grid = default_quadrature_grid(state, 0, 0.01);
    let grid_lo = grid[0].min(opts.center - 8.0);
    let grid_hi = grid[grid.len() - 1].max(opts.center + 8.0);
    let k = ((grid_hi - grid_lo) / 0.01).ceil() as usize;
    let grid: Vec<f64> = (0..=k).map(|i| grid_lo + i as f64 * 0.01).collect();
    let px = quadrature_distribution(state, 0, 0.0, &grid)?;
    let pp = quadrature_distribution(state, 0, 0.5 * std::f64::consts::PI, &grid)?;
    let mut s_max = 0.0;
    let mut min_lhs = f64::INFINITY;
    let mut violations = 0;
    for &s in s_grid {
        let v = cavalcanti_reid(&px, &pp, s, opts)?;
        min_lhs = min_lhs.min(v.lhs);
        if v.violated {
            violations += 1;
            s_max = f64::max(s_max, s);
        }
    }
    Ok(MeasureReport::new(s_max, "s-grid-scan", 0.0)
        .with("violations", violations)
        .with("min_lhs", format!("{min_lhs:.9e}"))
        .with("drop_s_term", opts.drop_s_term)
        .with("center", opts.center)
        .with("quadrature", "x = a + a^dagger, vacuum variance 1"))
}
