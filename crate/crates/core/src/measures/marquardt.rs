use crate::error::Result;
use crate::report::MeasureReport;
use crate::states::fock_builders::marquardt_pair;

/// `sum_d |beta_d|^2 d`, the mean number of photons moved into mode `b` by
/// the rotation of `|N, 0>`, read from the amplitudes of the rotated branch.
pub fn marquardt_size(n: usize, theta: f64) -> Result<MeasureReport> {
    let (_, b) = marquardt_pair(n, theta)?;
    let c = b.truncations()[1];
    let amps = b.amplitudes();
    let value: f64 = (0..=n).map(|d| amps[(n - d) * c + d].norm_sqr() * d as f64).sum();
    // same quantity as a mode-b occupation
    let check = b.mode_mean_photon_number(1);
    Ok(MeasureReport::new(value, "branch-amplitudes", (value - check).abs())
        .with("closed_form", format!("{:.12e}", n as f64 * theta.sin().powi(2))))
}
