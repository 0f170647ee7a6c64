use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Quantile};
use crate::solver::{Algorithm, Run};

/// Machine-readable summary of one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algorithm: String,
    pub n: usize,
    pub d: usize,
    pub tau: f64,
    pub seed: u64,
    pub beta: Vec<f64>,
    pub objective: f64,
    pub support_ids: Vec<usize>,
    pub wall_time_ms: f64,
    pub vertices_visited: u64,
    pub perturb_magnitude: f64,
}

impl RunReport {
    pub fn new(algo: Algorithm, ds: &Dataset, tau: Quantile, seed: u64, run: &Run) -> Self {
        let sol = &run.solution;
        RunReport {
            algorithm: algo.name().to_owned(),
            n: ds.n(),
            d: ds.d(),
            tau: tau.value(),
            seed,
            beta: sol.beta.clone(),
            objective: sol.objective,
            support_ids: sol.support_ids.clone(),
            wall_time_ms: sol.stats.wall_time.as_secs_f64() * 1e3,
            vertices_visited: sol.stats.vertices_visited,
            perturb_magnitude: run.perturb_magnitude,
        }
    }
}
