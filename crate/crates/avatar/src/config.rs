use std::path::PathBuf;

use avatar_core::eta_engine::EtaContext;
use avatar_core::tracer::TraceOptions;
use avatar_core::treepath::{DEFAULT_POLE_CAP, DEFAULT_SAMPLES};
use avatar_core::zeta::{find_zeros, ZeroList};

use crate::{zeros::load_zeros, AvatarError};

/// Where zero ordinates come from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum ZeroSource {
    #[default]
    Computed,
    File(PathBuf),
}

/// Tolerances, sample counts and IO locations for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    /// Truncation threshold of the eta q-series.
    pub series_eps: f64,
    /// Cap on the scaled identity residuals reported by `eval`.
    pub tol_residual: f64,
    pub pole_cap: f64,
    pub match_tol: f64,
    /// Nominal steps along a tree path.
    pub samples: usize,
    pub zeros: ZeroSource,
    pub emit: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        let ctx = EtaContext::new();
        let opts = TraceOptions::default();
        Config {
            series_eps: ctx.series_eps,
            tol_residual: 1e-8,
            pole_cap: DEFAULT_POLE_CAP,
            match_tol: opts.match_tol,
            samples: DEFAULT_SAMPLES,
            zeros: ZeroSource::Computed,
            emit: None,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), AvatarError> {
        let positive = [
            ("series_eps", self.series_eps),
            ("tol_residual", self.tol_residual),
            ("pole_cap", self.pole_cap),
            ("match_tol", self.match_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(AvatarError::Config(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.samples == 0 {
            return Err(AvatarError::Config("samples must be positive".into()));
        }
        Ok(())
    }

    pub fn context(&self) -> EtaContext {
        let mut ctx = EtaContext::new();
        ctx.series_eps = self.series_eps;
        ctx
    }

    pub fn trace_options(&self, reverse: bool) -> TraceOptions {
        TraceOptions {
            samples: self.samples,
            pole_cap: self.pole_cap,
            match_tol: self.match_tol,
            reverse,
            ..TraceOptions::default()
        }
    }

    /// At least `count` zeros, computed or read from the configured file.
    /// Computed lists carry one extra zero so the last target still has a
    /// neighbour above it for the dominance test.
    pub fn zeros(&self, count: usize) -> Result<ZeroList, AvatarError> {
        let list = match &self.zeros {
            ZeroSource::Computed => find_zeros(count + 1)?,
            ZeroSource::File(path) => load_zeros(path)?,
        };
        if list.len() < count {
            return Err(AvatarError::TooFewZeros {
                needed: count,
                available: list.len(),
            });
        }
        Ok(list)
    }
}
