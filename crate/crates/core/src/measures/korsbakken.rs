use crate::error::{Error, Result};
use crate::linalg;
use crate::report::MeasureReport;
use crate::spin::SpinState;

/// Largest register for the exhaustive subset search on asymmetric branches.
pub const KORSBAKKEN_MAX_EXHAUSTIVE: usize = 10;

/// `N / n_min`, with `n_min` the fewest particles whose joint measurement
/// tells the branches apart with probability at least `1 - delta`.
///
/// The success probability on a block is the Helstrom value
/// `1/2 + ||rho_A - rho_B||_1 / 4` of the reduced states. Symmetric branches
/// use the first `n` sites; otherwise the worst `n`-subset counts, so that any
/// choice of `n_min` particles suffices.
pub fn korsbakken_size(a: &SpinState, b: &SpinState, delta: f64) -> Result<MeasureReport> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidParameter(format!("delta={delta} outside (0, 1/2)")));
    }
    let n = a.qubit_count();
    if b.qubit_count() != n {
        return Err(Error::DimensionMismatch { left: n, right: b.qubit_count() });
    }
    let symmetric = a.is_permutation_symmetric(1e-10) && b.is_permutation_symmetric(1e-10);
    if !symmetric && n > KORSBAKKEN_MAX_EXHAUSTIVE {
        return Err(Error::Unsupported(format!(
            "asymmetric branches need N <= {KORSBAKKEN_MAX_EXHAUSTIVE} for the subset search"
        )));
    }
    let success = |keep: &[usize]| -> Result<f64> {
        let d = a.reduced_state(keep)?.density() - b.reduced_state(keep)?.density();
        Ok(0.5 + 0.25 * linalg::trace_norm_hermitian(&d))
    };
    let mut profile = Vec::with_capacity(n);
    for m in 1..=n {
        let p = if symmetric {
            success(&(0..m).collect::<Vec<_>>())?
        } else {
            let mut worst = f64::INFINITY;
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize == m {
                    let keep: Vec<usize> = (0..n).filter(|k| mask >> (n - 1 - k) & 1 == 1).collect();
                    worst = worst.min(success(&keep)?);
                }
            }
            worst
        };
        profile.push(p);
    }
    let policy = if symmetric { "first-n (permutation symmetric)" } else { "worst n-subset" };
    let listed: Vec<String> = profile.iter().map(|p| format!("{p:.6}")).collect();
    let report = match profile.iter().position(|&p| p >= 1.0 - delta - 1e-12) {
        Some(i) => MeasureReport::new(n as f64 / (i + 1) as f64, "helstrom-reduced", 0.0)
            .with("n_min", i + 1)
            .with("defined", true),
        None => MeasureReport::new(0.0, "helstrom-reduced", 0.0).with("defined", false),
    };
    Ok(report.with("policy", policy).with("success_by_n", listed.join(",")))
}
