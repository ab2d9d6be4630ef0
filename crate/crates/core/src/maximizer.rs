//! Best cell-aligned wavelet atom for a sequence.
//!
//! Over unmodulated rectangular atoms the modulus `|<f, G>|` is maximized on a
//! window of whole cells, where it equals `|sum of the window| / sqrt(length)`.
//! [`best_window`] scans every window with one prefix-sum table, O(N^2);
//! [`brute_force_best`] and [`three_term_max`] are independent checks.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dictionary::WaveformAtom;
use crate::error::{Error, Result};
use crate::sequence::ScalarSequence;

/// Below this many cells the scan stays on the calling thread.
const PARALLEL_MIN_LEN: usize = 2048;

/// Window over cells `start..start + length` (1-based, inclusive start).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WindowAtom {
    pub start: usize,
    pub length: usize,
}

impl WindowAtom {
    pub fn new(start: usize, length: usize, n: usize) -> Result<Self> {
        if start < 1 || length < 1 || start + length - 1 > n {
            return Err(Error::InvalidParameter(format!(
                "window (start {start}, length {length}) does not fit in {n} cells"
            )));
        }
        Ok(Self { start, length })
    }

    /// Last covered cell, 1-based.
    pub fn end(&self) -> usize {
        self.start + self.length - 1
    }

    /// 0-based half-open index range into the sequence.
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start - 1..self.start - 1 + self.length
    }

    /// Same atom in `(t, xi, u)` form: `t = L`, `xi = 0`, `u` at the window
    /// centre (a half-integer when `L` is even).
    pub fn to_waveform(&self) -> WaveformAtom {
        WaveformAtom {
            t: self.length as f64,
            xi: 0.0,
            u: self.start as f64 + 0.5 * (self.length as f64 - 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredAtom {
    pub atom: WindowAtom,
    /// `|signed_sum| / sqrt(length)`.
    pub value: f64,
    pub signed_sum: f64,
}

impl ScoredAtom {
    fn new(start: usize, length: usize, signed_sum: f64, value: f64) -> Self {
        Self {
            atom: WindowAtom { start, length },
            value,
            signed_sum,
        }
    }

    /// Signed inner product with the window atom, `signed_sum / sqrt(length)`.
    pub fn coefficient(&self) -> f64 {
        self.signed_sum / (self.atom.length as f64).sqrt()
    }

    /// Window average, the height of the fitted step.
    pub fn mean(&self) -> f64 {
        self.signed_sum / self.atom.length as f64
    }

    /// Selection order: larger value, then shorter window, then earlier start.
    /// `Less` means `self` is preferred.
    fn rank(&self, other: &Self) -> Ordering {
        other
            .value
            .total_cmp(&self.value)
            .then(self.atom.length.cmp(&other.atom.length))
            .then(self.atom.start.cmp(&other.atom.start))
    }

    fn prefer(self, other: Self) -> Self {
        if other.rank(&self) == Ordering::Less {
            other
        } else {
            self
        }
    }
}

fn prefix_sums(values: &[f64]) -> Vec<f64> {
    let mut prefix = Vec::with_capacity(values.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in values {
        acc += v;
        prefix.push(acc);
    }
    prefix
}

/// Best window starting at 0-based `i`, over every admissible length.
fn best_from(prefix: &[f64], roots: &[f64], i: usize) -> ScoredAtom {
    let n = prefix.len() - 1;
    let base = prefix[i];
    let mut best = ScoredAtom::new(i + 1, 1, prefix[i + 1] - base, 0.0);
    best.value = best.signed_sum.abs() / roots[1];
    for len in 2..=n - i {
        let sum = prefix[i + len] - base;
        let value = sum.abs() / roots[len];
        // Lengths ascend, so only a strictly larger value wins.
        if value > best.value {
            best = ScoredAtom::new(i + 1, len, sum, value);
        }
    }
    best
}

/// Window maximizing `|sum| / sqrt(length)` over all contiguous windows.
///
/// Ties go to the shorter window, then the earlier start. The reduction is a
/// total order, so the result does not depend on how the scan is split
/// across threads.
pub fn best_window(seq: &ScalarSequence) -> ScoredAtom {
    let values = seq.values();
    let n = values.len();
    let prefix = prefix_sums(values);
    let roots: Vec<f64> = (0..=n).map(|l| (l as f64).sqrt()).collect();
    if n < PARALLEL_MIN_LEN {
        (0..n)
            .map(|i| best_from(&prefix, &roots, i))
            .reduce(ScoredAtom::prefer)
            .expect("sequence is non-empty")
    } else {
        (0..n)
            .into_par_iter()
            .map(|i| best_from(&prefix, &roots, i))
            .reduce_with(ScoredAtom::prefer)
            .expect("sequence is non-empty")
    }
}

/// [`best_window`] for sequences with no sign change, where the modulus is
/// maximized without needing the absolute value.
pub fn best_window_single_signed(seq: &ScalarSequence) -> Result<ScoredAtom> {
    if !seq.is_single_signed() {
        return Err(Error::MixedSign);
    }
    Ok(best_window(seq))
}

/// Direct summation of every window; O(N^3). Test oracle for [`best_window`].
pub fn brute_force_best(seq: &ScalarSequence) -> ScoredAtom {
    let values = seq.values();
    let n = values.len();
    let mut best: Option<ScoredAtom> = None;
    for len in 1..=n {
        for start in 0..=n - len {
            let sum: f64 = values[start..start + len].iter().sum();
            let value = sum.abs() / (len as f64).sqrt();
            if best.is_none_or(|b| value > b.value) {
                best = Some(ScoredAtom::new(start + 1, len, sum, value));
            }
        }
    }
    best.expect("sequence is non-empty")
}

/// Maximum over `0 <= k <= N-1`, `1 <= n <= N-k` of the three quantities
///
/// ```text
/// |a_n + ... + a_{n+k}| / sqrt(k+1)
/// |a_n + ... + a_{n+k-1}| / sqrt(k)        (k >= 1)
/// |a_{n-1} + ... + a_{n+k-1}| / sqrt(k+1)
/// ```
///
/// with `a_0` read as zero.
pub fn three_term_max(seq: &ScalarSequence) -> f64 {
    let n_cells = seq.len() as i64;
    let mut best = 0.0f64;
    for n in 1..=n_cells {
        // Running sums over k: full = a_n..a_{n+k}, inner = a_n..a_{n+k-1},
        // shifted = a_{n-1}..a_{n+k-1}.
        let prev = seq.get_or_zero(n - 1);
        let mut inner = 0.0;
        for k in 0..=(n_cells - n) {
            let next = seq.get_or_zero(n + k);
            let full = inner + next;
            let shifted = prev + inner;
            let kf = k as f64;
            best = best.max(full.abs() / (kf + 1.0).sqrt());
            if k >= 1 {
                best = best.max(inner.abs() / kf.sqrt());
            }
            best = best.max(shifted.abs() / (kf + 1.0).sqrt());
            inner = full;
        }
    }
    best
}
