use std::time::{Duration, Instant};

use avatar_core::tracer::{
    experiment_path, trace, ExperimentEntry, ExperimentSummary, TraceRecord, AVATAR,
};
use avatar_core::treepath::{pole_scan, PoleScan};
use avatar_core::zeta::ZeroList;
use rayon::prelude::*;

use crate::{AvatarError, Config};

/// One trace with its wall time.
#[derive(Clone, Debug)]
pub struct TimedTrace {
    pub entry: ExperimentEntry,
    pub wall: Duration,
}

impl TimedTrace {
    pub fn record(&self) -> Option<&TraceRecord> {
        self.entry.result.as_ref().ok()
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentRun {
    pub theta_c: f64,
    pub reverse: bool,
    pub scan: PoleScan,
    pub traces: Vec<TimedTrace>,
    pub wall: Duration,
}

impl ExperimentRun {
    pub fn summary(&self) -> ExperimentSummary {
        ExperimentSummary::from_entries(self.traces.iter().map(|t| t.entry.clone()).collect())
    }

    pub fn slowest(&self) -> Duration {
        self.traces.iter().map(|t| t.wall).max().unwrap_or_default()
    }
}

/// Traces `m = 1..=max_m` in parallel, one `EtaContext` per worker.
///
/// The path is pole-scanned for `Z₄₁` first; a blocked path is an error.
pub fn run_parallel(
    cfg: &Config,
    theta_c: f64,
    zeros: &ZeroList,
    max_m: usize,
    reverse: bool,
) -> Result<ExperimentRun, AvatarError> {
    let started = Instant::now();
    if max_m > 0 && zeros.len() < max_m + 1 {
        return Err(AvatarError::TooFewZeros {
            needed: max_m + 1,
            available: zeros.len(),
        });
    }
    let path = experiment_path(theta_c, reverse);
    let scan = pole_scan(&cfg.context(), &path, AVATAR, cfg.samples, cfg.pole_cap)?;
    let opts = cfg.trace_options(reverse);
    let traces = (1..=max_m)
        .into_par_iter()
        .map_init(
            || cfg.context(),
            |ctx, m| {
                let t0 = Instant::now();
                let result = trace(ctx, m, &path, zeros, &opts);
                TimedTrace {
                    entry: ExperimentEntry { m, result },
                    wall: t0.elapsed(),
                }
            },
        )
        .collect();
    Ok(ExperimentRun {
        theta_c,
        reverse,
        scan,
        traces,
        wall: started.elapsed(),
    })
}
