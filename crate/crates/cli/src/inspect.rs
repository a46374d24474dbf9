use std::fmt;
use std::io::Write;

use macroq::fock::{mean_photon_number, purity, DensityOperator};
use macroq::phase_space::{wigner, WignerGrid};
use macroq::states::{BuiltState, StateSpec};

use crate::{CliError, Result};

/// Points per axis of the Wigner grid.
pub const WIGNER_POINTS: usize = 121;

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSummary {
    pub mode: usize,
    pub mean_photon_number: f64,
    pub wigner_min: f64,
    pub wigner_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inspection {
    pub kind: &'static str,
    pub purity: f64,
    pub mean_photon_number: Option<f64>,
    pub qubits: Option<usize>,
    pub truncations: Vec<usize>,
    pub modes: Vec<ModeSummary>,
}

impl fmt::Display for Inspection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kind                {}", self.kind)?;
        if let Some(q) = self.qubits {
            writeln!(f, "qubits              {q}")?;
        }
        if !self.truncations.is_empty() {
            writeln!(f, "truncations         {:?}", self.truncations)?;
        }
        if let Some(n) = self.mean_photon_number {
            writeln!(f, "mean photon number  {n:.9e}")?;
        }
        writeln!(f, "purity              {:.9e}", self.purity)?;
        for m in &self.modes {
            writeln!(
                f,
                "mode {}  <n> = {:.6e}  W min = {:.6e}  W max = {:.6e}",
                m.mode, m.mean_photon_number, m.wigner_min, m.wigner_max
            )?;
        }
        Ok(())
    }
}

/// Square grid centred on the origin, as wide as the default quadrature grid.
pub fn single_mode_wigner(single: &DensityOperator) -> Result<WignerGrid> {
    let extent = 2.0 * mean_photon_number(single).max(0.0).sqrt() + 8.0;
    let axis: Vec<f64> = (0..WIGNER_POINTS)
        .map(|k| -extent + 2.0 * extent * k as f64 / (WIGNER_POINTS - 1) as f64)
        .collect();
    Ok(wigner(single, 0, &axis, &axis)?)
}

/// Reduced state of one mode without forming the full density matrix of a
/// pure state.
fn reduced_mode(built: &BuiltState, mode: usize) -> Result<DensityOperator> {
    Ok(match built {
        BuiltState::Fock(p) if p.mode_count() == 1 => p.to_density(),
        BuiltState::Fock(p) => p.reduced(&[mode])?,
        BuiltState::FockMixed(r) if r.mode_count() == 1 => r.clone(),
        BuiltState::FockMixed(r) => r.partial_trace(&[mode])?,
        BuiltState::Spin(_) => {
            return Err(CliError::State(macroq::Error::Unsupported("phase space needs a bosonic state".into())))
        }
    })
}

pub fn inspect(spec: &StateSpec) -> Result<Inspection> {
    let built = spec.build()?;
    let (purity, mean, truncations) = match &built {
        BuiltState::Spin(s) => {
            return Ok(Inspection {
                kind: spec.kind(),
                purity: s.purity(),
                mean_photon_number: None,
                qubits: Some(s.qubit_count()),
                truncations: Vec::new(),
                modes: Vec::new(),
            })
        }
        BuiltState::Fock(p) => (p.amplitudes().norm_squared().powi(2), p.mean_photon_number(), p.truncations().to_vec()),
        BuiltState::FockMixed(r) => (purity(r), mean_photon_number(r), r.truncations().to_vec()),
    };
    let modes = (0..truncations.len())
        .map(|m| {
            let single = reduced_mode(&built, m)?;
            let w = single_mode_wigner(&single)?;
            Ok(ModeSummary {
                mode: m,
                mean_photon_number: mean_photon_number(&single),
                wigner_min: w.min(),
                wigner_max: w.max(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Inspection { kind: spec.kind(), purity, mean_photon_number: Some(mean), qubits: None, truncations, modes })
}

/// Writes `x,p,value` rows of the Wigner function of `mode`.
pub fn write_wigner_csv(spec: &StateSpec, mode: usize, out: impl Write) -> Result<()> {
    let built = spec.build()?;
    let modes = match &built {
        BuiltState::Fock(p) => p.mode_count(),
        BuiltState::FockMixed(r) => r.mode_count(),
        BuiltState::Spin(_) => 0,
    };
    if mode >= modes && modes > 0 {
        return Err(CliError::State(macroq::Error::OutOfRange { index: mode, count: modes }));
    }
    let w = single_mode_wigner(&reduced_mode(&built, mode)?)?;
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["x", "p", "value"])?;
    for (i, x) in w.xs.iter().enumerate() {
        for (j, p) in w.ps.iter().enumerate() {
            wr.write_record([format!("{x:.8e}"), format!("{p:.8e}"), format!("{:.8e}", w.values[i][j])])?;
        }
    }
    wr.flush()?;
    Ok(())
}

/// A state spec from a TOML file, or from the argument itself when no such
/// file exists (`kind = "scs"\nalpha = 2`).
pub fn parse_state_arg(arg: &str) -> Result<StateSpec> {
    let path = std::path::Path::new(arg);
    let text = if path.is_file() { std::fs::read_to_string(path)? } else { arg.to_string() };
    toml::from_str(&text).map_err(|e| CliError::Manifest(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use macroq::states::Amplitude;

    #[test]
    fn vacuum_summary() {
        let i = inspect(&StateSpec::Vacuum).unwrap();
        assert!((i.purity - 1.0).abs() < 1e-12);
        assert!(i.mean_photon_number.unwrap().abs() < 1e-12);
        let w = &i.modes[0];
        assert!((w.wigner_max - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-9);
        assert!(w.wigner_min > -1e-12);
    }

    #[test]
    fn cat_has_negative_wigner() {
        let i = inspect(&StateSpec::Scs { alpha: Amplitude::Real(2.0), phi: std::f64::consts::PI, cutoff: None }).unwrap();
        assert!(i.modes[0].wigner_min < -0.1);
    }

    #[test]
    fn inline_state() {
        let s = parse_state_arg("kind = \"ghz\"\nn = 4").unwrap();
        let i = inspect(&s).unwrap();
        assert_eq!(i.qubits, Some(4));
        assert!(i.to_string().contains("ghz"));
    }
}
