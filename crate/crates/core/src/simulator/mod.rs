//! Monte Carlo simulation of the Matérn cluster process.
//!
//! Each run draws its own realization from a ChaCha8 stream selected by
//! `(seed, run index)`, so results are identical whether runs execute
//! sequentially or on any number of threads.

mod ecdf;
mod sampling;
mod validation;

pub use ecdf::{ks_distance, ks_statistic, EmpiricalCdf, MAX_CENSORED_FRACTION};
pub use sampling::{
    kth_distances, run_rng, sample_mcp, sample_mcp_palm, sample_uniform_ball, PointSample,
};
pub use validation::{
    count_frequencies, default_observation_radius, dkw_threshold, simulate_distances, validate,
    DistanceTable, KsRow, SampleKind, ValidationReport,
};

use crate::analytic::McpParams;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: McpParams,
    /// Distances are only trusted up to this radius.
    pub observation_radius: f64,
    pub samples: usize,
    pub seed: u64,
    pub max_k: usize,
}

impl SimConfig {
    pub fn new(
        params: McpParams,
        observation_radius: f64,
        samples: usize,
        seed: u64,
        max_k: usize,
    ) -> Result<Self> {
        let cfg = SimConfig {
            params,
            observation_radius,
            samples,
            seed,
            max_k,
        };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.observation_radius.is_finite() && self.observation_radius > 0.0) {
            return Err(invalid("observation radius must be positive"));
        }
        if self.samples == 0 {
            return Err(invalid("samples must be at least 1"));
        }
        if self.max_k == 0 {
            return Err(invalid("max_k must be at least 1"));
        }
        Ok(())
    }

    /// Radius of the ball in which parents are generated.
    pub fn parent_window(&self) -> f64 {
        self.observation_radius + self.params.cluster_radius()
    }
}
