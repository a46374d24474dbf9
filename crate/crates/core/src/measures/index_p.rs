use crate::error::{Error, Result};
use crate::report::MeasureReport;
use crate::spin::MAX_QUBITS;
use crate::states::StateSpec;

use super::dur::least_squares;
use super::local_opt::{max_collective_variance, max_local_variance};

/// Exponent `p` of `max_A Var(A) ~ N^p` over additive local observables,
/// fitted on a log-log scale across the family sizes in `sizes`.
///
/// Permutation-symmetric members use the collective optimum; others the
/// per-site Bloch ascent with random restarts.
pub fn index_p_estimate(family: &StateSpec, sizes: &[usize], seed: u64) -> Result<MeasureReport> {
    let mut ns: Vec<usize> = sizes.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(Error::InvalidParameter("the exponent fit needs at least 3 distinct sizes".into()));
    }
    let mut xs = Vec::with_capacity(ns.len());
    let mut ys = Vec::with_capacity(ns.len());
    let mut listed = Vec::with_capacity(ns.len());
    let mut routes = Vec::new();
    for &n in &ns {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::OutOfRange { index: n, count: MAX_QUBITS + 1 });
        }
        let spec = family
            .with_size(n)
            .ok_or_else(|| Error::InvalidParameter(format!("`{}` is not a sized register family", family.kind())))?;
        let built = spec.build()?;
        let state = built.spin().ok_or_else(|| Error::InvalidParameter("family must be a qubit register".into()))?;
        if !state.is_pure_repr() {
            return Err(Error::InvalidState("index p is defined here for pure families".into()));
        }
        let v = if state.is_permutation_symmetric(1e-10) {
            routes.push("collective");
            max_collective_variance(state)
        } else {
            routes.push("bloch-ascent");
            max_local_variance(state, seed)?.value
        };
        if !(v > 0.0) {
            return Err(Error::InvalidState(format!("maximal variance vanishes at N={}", state.qubit_count())));
        }
        xs.push((state.qubit_count() as f64).ln());
        ys.push(v.ln());
        listed.push(format!("{}:{v:.9e}", state.qubit_count()));
    }
    let (slope, intercept) = least_squares(&xs, &ys);
    let m = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (rss / (m - 2.0) / sxx).sqrt();
    routes.dedup();
    Ok(MeasureReport::new(slope, "log-log-fit", stderr)
        .with("max_variance_by_n", listed.join(","))
        .with("optimizer", routes.join("+")))
}
