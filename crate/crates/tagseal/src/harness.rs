//! Parallel curve sweeps.

use rayon::prelude::*;
use tagseal_core::lab::{run_cell, CorrelationReport, CurveConfig, LabError};

/// [`tagseal_core::lab::run_curve_experiment`] with cells spread over the
/// rayon pool. Each cell seeds its own generator, so the report is identical
/// to the sequential one, row order included.
pub fn run_curve_parallel(config: &CurveConfig) -> Result<CorrelationReport, LabError> {
    config.validate()?;
    let rows = config
        .cells()?
        .par_iter()
        .map(run_cell)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CorrelationReport { rows })
}
