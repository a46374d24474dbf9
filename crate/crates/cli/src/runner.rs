use std::time::Instant;

use rayon::prelude::*;

use crate::manifest::{Point, RunManifest};
use crate::measure::{evaluate, Prepared};
use crate::report::ReportRow;
use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the rayon default.
    pub jobs: Option<usize>,
    /// Overrides the manifest seed.
    pub seed: Option<u64>,
}

fn run_point(manifest: &RunManifest, point: &Point, seed: u64) -> Vec<ReportRow> {
    let prepared = Prepared::new(&point.spec);
    manifest
        .measures
        .iter()
        .filter(|m| m.applies_to(&point.state_id))
        .map(|m| {
            let start = Instant::now();
            let result = evaluate(&m.spec, &prepared, seed);
            let seconds = start.elapsed().as_secs_f64();
            let mut row = ReportRow {
                state_id: point.state_id.clone(),
                param_name: point.param_name.clone(),
                param_value: point.param_value,
                measure: m.name(),
                value: None,
                error_estimate: None,
                method: String::new(),
                seconds,
                error: None,
                metadata: Default::default(),
            };
            match result {
                Ok(r) => {
                    row.value = Some(r.value);
                    row.error_estimate = Some(r.error_estimate);
                    row.method = r.method;
                    row.metadata = r.metadata;
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect()
}

/// Evaluates every measure on every (state, sweep point). Rows come back in
/// (state, sweep point, measure) order whatever the completion order.
pub fn run(manifest: &RunManifest, opts: &RunOptions) -> Result<Vec<ReportRow>> {
    let points = manifest.points()?;
    let seed = opts.seed.unwrap_or(manifest.seed);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = opts.jobs {
        if j == 0 {
            return Err(CliError::Manifest("--jobs must be positive".into()));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    let nested: Vec<Vec<ReportRow>> =
        pool.install(|| points.par_iter().map(|p| run_point(manifest, p, seed)).collect());
    Ok(nested.into_iter().flatten().collect())
}
