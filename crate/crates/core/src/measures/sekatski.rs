use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf_inv, erfc};

use crate::error::{Error, Result};
use crate::fock::FockPureState;
use crate::report::MeasureReport;

const SIGMA_TOL: f64 = 1e-3;
const SUPPORT_SIGMAS: f64 = 8.0;
const TAIL_LIMIT: f64 = 1e-6;

/// Gaussian pointer of width `sigma` read against the reference success
/// probability `p_g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub sigma: f64,
    pub p_g: f64,
}

impl DetectorModel {
    pub fn new(sigma: f64, p_g: f64) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!("sigma={sigma} must be non-negative")));
        }
        if !(p_g > 0.5 && p_g < 1.0) {
            return Err(Error::InvalidParameter(format!("P_g={p_g} outside (1/2, 1)")));
        }
        Ok(Self { sigma, p_g })
    }
}

fn pad(mut v: Vec<f64>, len: usize) -> Vec<f64> {
    v.resize(len, 0.0);
    v
}

/// Success probability `(1 + D)/2` of telling apart the pointer
/// distributions left by the photon-number distributions `pa`, `pb`.
///
/// The sign changes of `p_A - p_B` are located on a grid of spacing
/// `min(0.1, sigma/10)` and refined by bisection; between them the
/// difference is integrated exactly through the Gaussian CDF.
pub fn discrimination_probability(pa: &[f64], pb: &[f64], sigma: f64) -> f64 {
    let len = pa.len().max(pb.len());
    let (pa, pb) = (pad(pa.to_vec(), len), pad(pb.to_vec(), len));
    let w: Vec<f64> = pa.iter().zip(&pb).map(|(a, b)| a - b).collect();
    if sigma == 0.0 {
        return 0.5 * (1.0 + 0.5 * w.iter().map(|x| x.abs()).sum::<f64>());
    }
    let reach = SUPPORT_SIGMAS * sigma;
    let density = |x: f64| -> f64 {
        let first = (x - reach).ceil().max(0.0) as usize;
        let last = ((x + reach).floor() as usize).min(len - 1);
        if x + reach < 0.0 || first > last {
            return 0.0;
        }
        (first..=last).map(|n| w[n] * (-(x - n as f64).powi(2) / (2.0 * sigma * sigma)).exp()).sum()
    };
    let cdf = |x: f64| -> f64 {
        w.iter()
            .enumerate()
            .map(|(n, wn)| wn * 0.5 * erfc(-(x - n as f64) / (sigma * std::f64::consts::SQRT_2)))
            .sum()
    };
    let h = (sigma / 10.0).min(0.1);
    let lo = -6.0 * sigma;
    let hi = (len - 1) as f64 + 6.0 * sigma;
    let k = ((hi - lo) / h).ceil() as usize;
    let mut roots = Vec::new();
    let mut prev = (lo, density(lo));
    for i in 1..=k {
        let x = lo + i as f64 * h;
        let f = density(x);
        if f == 0.0 {
            continue;
        }
        if prev.1 != 0.0 && prev.1.signum() != f.signum() {
            let (mut a, mut b, fa) = (prev.0, x, prev.1);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if density(m).signum() == fa.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev = (x, f);
    }
    let total: f64 = w.iter().sum();
    let mut d = 0.0;
    let mut left = 0.0;
    for r in roots {
        let c = cdf(r);
        d += (c - left).abs();
        left = c;
    }
    d += (total - left).abs();
    0.5 * (1.0 + 0.5 * d)
}

/// Size from the largest pointer width `sigma_max` still giving success
/// probability `p_g`, reported in photon-number units as
/// `2 sqrt 2 erf^{-1}(2 P_g - 1) sigma_max`.
pub fn sekatski_size(a: &FockPureState, b: &FockPureState, p_g: f64) -> Result<MeasureReport> {
    DetectorModel::new(0.0, p_g)?;
    let tail = a.max_tail_mass().max(b.max_tail_mass());
    if tail > TAIL_LIMIT {
        return Err(Error::Truncation { tail, tol: TAIL_LIMIT });
    }
    let pa = a.total_number_distribution();
    let pb = b.total_number_distribution();
    let p0 = discrimination_probability(&pa, &pb, 0.0);
    let scale = 2.0 * std::f64::consts::SQRT_2 * erf_inv(2.0 * p_g - 1.0);
    if p0 < p_g {
        return Ok(MeasureReport::new(0.0, "sigma-bisection", 0.0)
            .with("distinguishable", false)
            .with("p_ideal", format!("{p0:.9e}")));
    }
    let p = |s: f64| discrimination_probability(&pa, &pb, s);
    let mut lo = 0.0;
    let mut hi = 1.0;
    while p(hi) >= p_g {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Convergence("pointer width grows without bound".into()));
        }
    }
    while hi - lo > SIGMA_TOL {
        let mid = 0.5 * (lo + hi);
        if p(mid) >= p_g {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sigma_max = 0.5 * (lo + hi);
    Ok(MeasureReport::new(scale * sigma_max, "sigma-bisection", scale * 0.5 * (hi - lo))
        .with("sigma_max", format!("{sigma_max:.9e}"))
        .with("distinguishable", true)
        .with("p_ideal", format!("{p0:.9e}")))
}
