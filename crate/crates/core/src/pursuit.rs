//! Matching pursuit over cell-aligned rectangular atoms.
//!
//! Each iteration picks the best window of the current residual, records the
//! signed inner product as the expansion coefficient and subtracts the window
//! average from the covered cells. The subtracted step is the projection of
//! the residual onto the atom, so the residual energy drops by exactly the
//! squared coefficient.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maximizer::{best_window, WindowAtom};
use crate::sequence::{make_step_function, shift_mean, ScalarSequence, ShiftRecord, StepFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTerm {
    pub atom: WindowAtom,
    /// Signed `<R^m f, G>`, i.e. window sum over `sqrt(length)`.
    pub coefficient: f64,
    /// Window average; the height subtracted from each covered cell.
    pub level: f64,
    pub iteration: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxIterations,
    ResidualBelowEpsilon,
    CoefficientBelowEpsilon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PursuitConfig {
    pub max_iterations: usize,
    /// Stop once the residual L2 norm falls below this.
    pub residual_epsilon: f64,
    /// Stop when the best available |coefficient| is below this, or zero.
    pub coefficient_epsilon: f64,
    /// Constant added to the input before the first iteration.
    pub pre_shift: Option<f64>,
}

impl PursuitConfig {
    pub fn new(max_iterations: usize) -> Result<Self> {
        if max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
        }
        Ok(Self {
            max_iterations,
            residual_epsilon: 0.0,
            coefficient_epsilon: 0.0,
            pre_shift: None,
        })
    }

    pub fn with_residual_epsilon(mut self, eps: f64) -> Result<Self> {
        check_epsilon("residual_epsilon", eps)?;
        self.residual_epsilon = eps;
        Ok(self)
    }

    pub fn with_coefficient_epsilon(mut self, eps: f64) -> Result<Self> {
        check_epsilon("coefficient_epsilon", eps)?;
        self.coefficient_epsilon = eps;
        Ok(self)
    }

    pub fn with_pre_shift(mut self, shift: Option<f64>) -> Result<Self> {
        if let Some(c) = shift {
            if !c.is_finite() {
                return Err(Error::InvalidParameter(format!("pre_shift must be finite, got {c}")));
            }
        }
        self.pre_shift = shift;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
        }
        check_epsilon("residual_epsilon", self.residual_epsilon)?;
        check_epsilon("coefficient_epsilon", self.coefficient_epsilon)?;
        if let Some(c) = self.pre_shift {
            if !c.is_finite() {
                return Err(Error::InvalidParameter(format!("pre_shift must be finite, got {c}")));
            }
        }
        Ok(())
    }
}

fn check_epsilon(name: &str, eps: f64) -> Result<()> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} must be finite and >= 0, got {eps}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyExpansion {
    pub terms: Vec<ExpansionTerm>,
    pub residual: ScalarSequence,
    /// Residual L2 norms; entry `m` is the norm after `m` terms, so entry 0 is
    /// the norm of the (shifted) input.
    pub norm_history: Vec<f64>,
    pub shift: ShiftRecord,
    pub stop_reason: StopReason,
}

impl GreedyExpansion {
    pub fn len(&self) -> usize {
        self.residual.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn residual_norm(&self) -> f64 {
        *self.norm_history.last().expect("history holds the initial norm")
    }
}

/// One greedy step. Returns the chosen term (iteration 0) and the updated
/// residual; a zero best value leaves the residual untouched.
pub fn pursuit_step(residual: &ScalarSequence) -> Result<(ExpansionTerm, ScalarSequence)> {
    let best = best_window(residual);
    let level = best.mean();
    let term = ExpansionTerm {
        atom: best.atom,
        coefficient: best.coefficient(),
        level,
        iteration: 0,
    };
    let mut next = residual.values().to_vec();
    if level != 0.0 {
        for v in &mut next[best.atom.range()] {
            *v -= level;
        }
    }
    Ok((term, ScalarSequence::new(next)?))
}

pub fn run_pursuit(seq: &ScalarSequence, config: &PursuitConfig) -> Result<GreedyExpansion> {
    config.validate()?;
    let (mut residual, shift) = match config.pre_shift {
        Some(c) => shift_mean(seq, c)?,
        None => (seq.clone(), ShiftRecord::default()),
    };
    let mut terms = Vec::new();
    let mut norm_history = vec![residual.sum_of_squares().sqrt()];
    let mut stop_reason = StopReason::MaxIterations;

    for iteration in 0..config.max_iterations {
        let norm = *norm_history.last().unwrap();
        if norm < config.residual_epsilon {
            stop_reason = StopReason::ResidualBelowEpsilon;
            break;
        }
        let (mut term, next) = pursuit_step(&residual)?;
        let magnitude = term.coefficient.abs();
        if magnitude == 0.0 || magnitude < config.coefficient_epsilon {
            stop_reason = StopReason::CoefficientBelowEpsilon;
            break;
        }
        term.iteration = iteration;
        terms.push(term);
        residual = next;
        norm_history.push(residual.sum_of_squares().sqrt());
    }
    if stop_reason == StopReason::MaxIterations
        && *norm_history.last().unwrap() < config.residual_epsilon
    {
        stop_reason = StopReason::ResidualBelowEpsilon;
    }

    Ok(GreedyExpansion {
        terms,
        residual,
        norm_history,
        shift,
        stop_reason,
    })
}

/// Sum of the fitted steps with the pre-shift undone, on cells `1..=N`.
pub fn reconstruct(exp: &GreedyExpansion) -> StepFunction {
    let mut values = vec![0.0; exp.len()];
    for term in &exp.terms {
        for v in &mut values[term.atom.range()] {
            *v += term.level;
        }
    }
    for v in &mut values {
        *v -= exp.shift.shift;
    }
    make_step_function(ScalarSequence::new(values).expect("finite steps over a non-empty range"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub iteration: usize,
    pub coefficient_sq: f64,
    pub residual_norm_sq_before: f64,
    pub residual_norm_sq_after: f64,
}

impl LedgerRow {
    /// `|before - after - coefficient^2|` relative to `before`.
    pub fn relative_defect(&self) -> f64 {
        let defect = (self.residual_norm_sq_before - self.residual_norm_sq_after - self.coefficient_sq).abs();
        if self.residual_norm_sq_before == 0.0 {
            defect
        } else {
            defect / self.residual_norm_sq_before
        }
    }
}

pub fn energy_ledger(exp: &GreedyExpansion) -> Vec<LedgerRow> {
    exp.terms
        .iter()
        .enumerate()
        .map(|(m, term)| LedgerRow {
            iteration: term.iteration,
            coefficient_sq: term.coefficient * term.coefficient,
            residual_norm_sq_before: exp.norm_history[m].powi(2),
            residual_norm_sq_after: exp.norm_history[m + 1].powi(2),
        })
        .collect()
}

/// Cell boundaries where the reconstruction jumps by more than `threshold`.
/// Boundary `b` separates cells `b` and `b + 1`.
pub fn breakpoints(exp: &GreedyExpansion, threshold: f64) -> Vec<usize> {
    let recon = reconstruct(exp);
    recon
        .values()
        .windows(2)
        .enumerate()
        .filter(|(_, pair)| (pair[1] - pair[0]).abs() > threshold)
        .map(|(i, _)| i + 1)
        .collect()
}
