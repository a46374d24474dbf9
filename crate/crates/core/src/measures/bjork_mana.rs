use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fock::{pure_state, DensityOperator};
use crate::linalg;
use crate::phase_space::{default_quadrature_grid, quadrature_distribution};
use crate::report::MeasureReport;
use crate::spin::{AdditiveObservable, SpinState};
use crate::C64;

/// `|O(theta)|` must fall below this for a zero to count.
pub const ZERO_TOL: f64 = 1e-4;
const SCAN_POINTS: usize = 4000;

/// A probability distribution over the spectrum of an observable, as point
/// masses (quadrature weights for continuous spectra), sorted by value.
#[derive(Debug, Clone)]
pub struct SpectralDistribution {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SpectralDistribution {
    fn overlap(&self, theta: f64) -> C64 {
        self.values.iter().zip(&self.weights).map(|(a, w)| C64::from_polar(*w, theta * a)).sum()
    }

    fn moments(&self, range: std::ops::Range<usize>) -> (f64, f64, f64) {
        let w: f64 = self.weights[range.clone()].iter().sum();
        let m: f64 = range.clone().map(|i| self.weights[i] * self.values[i]).sum::<f64>() / w;
        let v: f64 = range.map(|i| self.weights[i] * (self.values[i] - m).powi(2)).sum::<f64>() / w;
        (w, m, v)
    }

    /// Index at which the distribution is split into two branches: the lowest
    /// point between the two highest peaks, or the mean for a single peak.
    fn split(&self) -> usize {
        let d = &self.weights;
        let top = d.iter().copied().fold(0.0, f64::max);
        let mut peaks: Vec<usize> = (0..d.len())
            .filter(|&i| {
                let left = i == 0 || d[i] >= d[i - 1];
                let right = i + 1 == d.len() || d[i] > d[i + 1];
                left && right && d[i] > 1e-3 * top
            })
            .collect();
        if peaks.len() >= 2 {
            peaks.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
            let (lo, hi) = if peaks[0] < peaks[1] { (peaks[0], peaks[1]) } else { (peaks[1], peaks[0]) };
            return (lo..=hi).min_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap();
        }
        let (_, mean, _) = self.moments(0..d.len());
        self.values.iter().position(|&v| v >= mean).unwrap_or(d.len() / 2)
    }
}

/// Ratio `theta_sing / theta_sup` for a pure state with the given spectral
/// distribution.
///
/// `theta_sing = pi / dA`, with `dA` the spread of a single branch (the
/// heavier side of the split). `theta_sup` is the first local minimum of
/// `|<psi|e^{i theta A}|psi>|` in `(0, theta_sing]` lying below [`ZERO_TOL`].
/// Without such a zero, the value is 0 and `superposition_detected` is false.
pub fn bjork_mana(dist: &SpectralDistribution) -> Result<MeasureReport> {
    let total: f64 = dist.weights.iter().sum();
    if (total - 1.0).abs() > 1e-4 {
        return Err(Error::InvalidParameter(format!("distribution mass {total} differs from 1")));
    }
    let cut = dist.split();
    let n = dist.values.len();
    let lower = dist.moments(0..cut.max(1));
    let upper = dist.moments(cut.min(n - 1)..n);
    let (_, _, var) = if lower.0 >= upper.0 { lower } else { upper };
    let spread = var.sqrt();
    if spread < 1e-12 {
        return Err(Error::Unsupported("single-branch spread vanishes; the ratio is unbounded".into()));
    }
    let theta_sing = PI / spread;
    let abs_o = |t: f64| dist.overlap(t).norm();
    let step = theta_sing / SCAN_POINTS as f64;
    let samples: Vec<f64> = (0..=SCAN_POINTS).map(|k| abs_o(k as f64 * step)).collect();
    let half_drop = (1..=SCAN_POINTS).find(|&k| samples[k] <= 0.5).map(|k| k as f64 * step);
    let mut theta_sup = None;
    for k in 1..SCAN_POINTS {
        if samples[k] <= samples[k - 1] && samples[k] < samples[k + 1] {
            let (t, v) = golden_min(&abs_o, (k - 1) as f64 * step, (k + 1) as f64 * step);
            if v < ZERO_TOL {
                theta_sup = Some(t);
                break;
            }
        }
    }
    let mut report = match theta_sup {
        Some(t) => MeasureReport::new(theta_sing / t, "overlap-zero-scan", 0.0)
            .with("theta_sup", format!("{t:.9e}"))
            .with("superposition_detected", true),
        None => MeasureReport::new(0.0, "overlap-zero-scan", 0.0).with("superposition_detected", false),
    };
    report = report.with("theta_sing", format!("{theta_sing:.9e}")).with("branch_spread", format!("{spread:.9e}"));
    if let Some(h) = half_drop {
        report = report.with("half_drop_angle", format!("{h:.9e}"));
    }
    Ok(report)
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// Distribution of the quadrature `x_angle` for a pure single-mode state.
pub fn quadrature_spectrum(state: &DensityOperator, angle: f64) -> Result<SpectralDistribution> {
    if state.mode_count() != 1 {
        return Err(Error::InvalidParameter("quadrature spectrum needs a single mode".into()));
    }
    if pure_state(state).is_none() {
        return Err(Error::InvalidState("Bjork-Mana ratio is defined for pure states only".into()));
    }
    let step = 0.01;
    let grid = default_quadrature_grid(state, 0, step);
    let q = quadrature_distribution(state, 0, angle, &grid)?;
    let last = grid.len() - 1;
    let weights = q
        .density
        .iter()
        .enumerate()
        .map(|(i, p)| if i == 0 || i == last { 0.5 * step * p } else { step * p })
        .collect();
    Ok(SpectralDistribution { values: grid, weights })
}

/// Distribution of an additive observable's eigenvalues for a pure register,
/// restricted to eigenvalues carrying weight.
pub fn spin_spectrum(state: &SpinState, obs: &AdditiveObservable) -> Result<SpectralDistribution> {
    let psi = state
        .vector()
        .ok_or_else(|| Error::InvalidState("Bjork-Mana ratio is defined for pure states only".into()))?;
    if obs.qubit_count() != state.qubit_count() {
        return Err(Error::DimensionMismatch { left: obs.qubit_count(), right: state.qubit_count() });
    }
    let pairs: Vec<(f64, f64)> = match obs.diagonal() {
        Some(diag) => diag.iter().zip(psi.iter()).map(|(a, c)| (*a, c.norm_sqr())).collect(),
        None => {
            let (vals, vecs) = linalg::eigh(&obs.to_matrix());
            let coeffs = vecs.adjoint() * psi;
            vals.into_iter().zip(coeffs.iter()).map(|(a, c)| (a, c.norm_sqr())).collect()
        }
    };
    // merge degenerate eigenvalues
    let mut sorted = pairs;
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut values: Vec<f64> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for (a, w) in sorted.into_iter().filter(|p| p.1 > 1e-15) {
        match values.last() {
            Some(&last) if (a - last).abs() < 1e-9 => *weights.last_mut().unwrap() += w,
            _ => {
                values.push(a);
                weights.push(w);
            }
        }
    }
    Ok(SpectralDistribution { values, weights })
}
