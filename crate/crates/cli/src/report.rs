//! Machine-readable reports. Every report carries the library version and
//! the tolerance settings in effect so runs can be reproduced.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    /// Relative rank cutoff actually used.
    pub rank_tol: f64,
    pub verdict_tol: f64,
    pub pmf_tol: f64,
    pub lp_tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub total_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub version: String,
    pub direction: String,
    pub holds: bool,
    /// One of `rank_mismatch`, `negative_h_star`, `h_star_zero`.
    pub reason: String,
    pub rank_a: usize,
    pub rank_aug: usize,
    /// `zero` or `negative`; absent when the rank test already failed.
    pub h_star_sign: Option<String>,
    pub h_star: Option<f64>,
    pub m: usize,
    pub n: usize,
    pub reduction_used: bool,
    pub lp_iterations: usize,
    pub timings: Timings,
    pub tolerances: Tolerances,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttackReport {
    pub version: String,
    pub direction: String,
    pub rows: usize,
    pub cols: usize,
    /// Row-major channel, one row per Z symbol.
    pub channel: Vec<Vec<f64>>,
    pub objective: f64,
    pub cost: Vec<f64>,
    pub timings: Timings,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttackRefusal {
    pub version: String,
    pub direction: String,
    pub error: String,
    /// Farkas dual over the stacked constraints.
    pub farkas_certificate: Vec<f64>,
    pub tolerances: Tolerances,
}
