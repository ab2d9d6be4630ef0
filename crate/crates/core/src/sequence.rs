//! Real sequences, the step functions they define, and constant shifts.
//!
//! A sequence `a_1..a_N` defines `f(x) = sum_j a_j * rect(x - j)`, so cell `j`
//! covers `[j - 1/2, j + 1/2]` and every cell has unit width.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Non-empty list of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ScalarSequence(Vec<f64>);

impl ScalarSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(values))
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![0.0; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 1-based access; indices outside `1..=N` read as zero.
    pub fn get_or_zero(&self, index: i64) -> f64 {
        if index < 1 {
            return 0.0;
        }
        self.0.get(index as usize - 1).copied().unwrap_or(0.0)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn is_single_signed(&self) -> bool {
        self.0.iter().all(|&v| v >= 0.0) || self.0.iter().all(|&v| v <= 0.0)
    }

    /// Multiply every value by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|v| v * c).collect())
    }
}

impl TryFrom<Vec<f64>> for ScalarSequence {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<ScalarSequence> for Vec<f64> {
    fn from(seq: ScalarSequence) -> Self {
        seq.0
    }
}

impl AsRef<[f64]> for ScalarSequence {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Piecewise-constant function on unit cells starting at `origin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    pub coefficients: ScalarSequence,
    pub origin: i64,
}

impl StepFunction {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        self.coefficients.values()
    }

    pub fn l2_norm(&self) -> f64 {
        l2_norm(self)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        evaluate(self, x)
    }
}

pub fn make_step_function(seq: ScalarSequence) -> StepFunction {
    StepFunction {
        coefficients: seq,
        origin: 1,
    }
}

/// `sqrt(sum a_j^2)`; cells have unit width so no quadrature weight appears.
pub fn l2_norm(f: &StepFunction) -> f64 {
    f.coefficients.sum_of_squares().sqrt()
}

/// Cells are half-open `[j - 1/2, j + 1/2)`; the right edge of the last cell
/// is included so the whole support `[origin - 1/2, origin + N - 1/2]` is
/// covered.
pub fn evaluate(f: &StepFunction, x: f64) -> f64 {
    if !x.is_finite() {
        return 0.0;
    }
    let n = f.len();
    let left = f.origin as f64 - 0.5;
    let right = left + n as f64;
    if x < left || x > right {
        return 0.0;
    }
    let offset = ((x - left).floor() as usize).min(n - 1);
    f.values()[offset]
}

/// Constant added to every value of a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ShiftRecord {
    pub shift: f64,
}

impl ShiftRecord {
    pub fn apply(&self, seq: &ScalarSequence) -> Result<ScalarSequence> {
        ScalarSequence::new(seq.values().iter().map(|v| v + self.shift).collect())
    }

    pub fn remove(&self, seq: &ScalarSequence) -> Result<ScalarSequence> {
        ScalarSequence::new(seq.values().iter().map(|v| v - self.shift).collect())
    }
}

pub fn shift_mean(seq: &ScalarSequence, c: f64) -> Result<(ScalarSequence, ShiftRecord)> {
    if !c.is_finite() {
        return Err(Error::InvalidParameter(format!("shift must be finite, got {c}")));
    }
    let record = ShiftRecord { shift: c };
    Ok((record.apply(seq)?, record))
}
