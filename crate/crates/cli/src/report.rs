//! Report documents written by the commands. All are JSON; reals are
//! written in shortest round-trip form and parsed back exactly.

use serde::{Deserialize, Serialize};
use steppursuit::{
    verify::SuiteReport, ExpansionTerm, GreedyExpansion, KMeansResult, PursuitConfig, StopReason,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDescriptor {
    pub path: String,
    pub column: String,
    pub rows: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub start: usize,
    pub length: usize,
    pub coefficient: f64,
    pub level: f64,
    pub iteration: usize,
}

impl From<&ExpansionTerm> for TermRecord {
    fn from(t: &ExpansionTerm) -> Self {
        Self {
            start: t.atom.start,
            length: t.atom.length,
            coefficient: t.coefficient,
            level: t.level,
            iteration: t.iteration,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub input: InputDescriptor,
    pub config: PursuitConfig,
    pub breakpoint_threshold: f64,
    pub terms: Vec<TermRecord>,
    /// Entry `m` is the residual norm after `m` terms.
    pub residual_norms: Vec<f64>,
    pub reconstruction: Vec<f64>,
    pub residual: Vec<f64>,
    /// Boundary `b` lies between cells `b` and `b + 1`.
    pub breakpoints: Vec<usize>,
    pub shift: f64,
    pub stop_reason: StopReason,
    pub elapsed_seconds: f64,
}

impl RunReport {
    pub fn new(
        input: InputDescriptor,
        config: PursuitConfig,
        exp: &GreedyExpansion,
        breakpoint_threshold: f64,
        elapsed_seconds: f64,
    ) -> Self {
        Self {
            input,
            config,
            breakpoint_threshold,
            terms: exp.terms.iter().map(TermRecord::from).collect(),
            residual_norms: exp.norm_history.clone(),
            reconstruction: steppursuit::reconstruct(exp).values().to_vec(),
            residual: exp.residual.values().to_vec(),
            breakpoints: steppursuit::breakpoints(exp, breakpoint_threshold),
            shift: exp.shift.shift,
            stop_reason: exp.stop_reason,
            elapsed_seconds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansSummary {
    pub k: usize,
    pub seed: u64,
    pub centers: Vec<f64>,
    pub assignments: Vec<usize>,
    pub iterations: usize,
    /// MSE of the per-point cluster centre against the true mean.
    pub mse: f64,
}

impl KMeansSummary {
    pub fn new(k: usize, seed: u64, result: KMeansResult, mse: f64) -> Self {
        Self {
            k,
            seed,
            centers: result.centers,
            assignments: result.assignments,
            iterations: result.iterations,
            mse,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub input: InputDescriptor,
    pub truth_column: String,
    pub config: PursuitConfig,
    pub terms: usize,
    /// MSE of the pursuit reconstruction against the true mean.
    pub pursuit_mse: f64,
    /// MSE of the raw values against the true mean.
    pub raw_mse: f64,
    pub kmeans: KMeansSummary,
    pub breakpoints: Vec<usize>,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: SuiteReport,
    pub elapsed_seconds: f64,
}
