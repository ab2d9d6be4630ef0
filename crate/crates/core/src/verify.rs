//! Grid sweeps checking the closed-form maximizer against direct evaluation
//! of the waveform inner product.
//!
//! Grids are built from integer indices divided by a points-per-unit count,
//! so integer and half-integer parameters are hit exactly.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dictionary::{alternating_modulus, h_value, inner_product, psi_from_parts, psi_vertices, WaveformAtom};
use crate::error::{Error, Result};
use crate::maximizer::best_window;
use crate::pursuit::{energy_ledger, run_pursuit, PursuitConfig};
use crate::sequence::{make_step_function, ScalarSequence, StepFunction};

/// Slack allowed between a grid maximum and the closed-form maximum.
pub const GRID_TOLERANCE: f64 = 1e-6;
/// Slack for the triangle-vertex and two-cell bounds.
pub const BOUND_TOLERANCE: f64 = 1e-9;
/// Agreement between the alternating-sequence formula and the inner product.
pub const REMARK_TOLERANCE: f64 = 1e-10;
/// Relative defect allowed in the energy identity.
pub const ENERGY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Modulated grid over non-negative sequences.
    Theorem1,
    /// Unmodulated grid over arbitrary sequences.
    Theorem2,
    /// Atoms no wider than one cell.
    Lemma1,
    /// Triangle vertices bound the partial-window function.
    Lemma2,
    /// Two-cell alternating sequence.
    Remark,
    /// Energy bookkeeping of the pursuit loop.
    Energy,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Theorem1,
        Suite::Theorem2,
        Suite::Lemma1,
        Suite::Lemma2,
        Suite::Remark,
        Suite::Energy,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2 => "theorem2",
            Suite::Lemma1 => "lemma1",
            Suite::Lemma2 => "lemma2",
            Suite::Remark => "remark",
            Suite::Energy => "energy",
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            Suite::Theorem1 | Suite::Theorem2 | Suite::Lemma1 => GRID_TOLERANCE,
            Suite::Lemma2 => BOUND_TOLERANCE,
            Suite::Remark => REMARK_TOLERANCE,
            Suite::Energy => ENERGY_TOLERANCE,
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite '{s}'")))
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub trials: usize,
    /// Largest sequence length drawn (grid suites) or the fixed length (energy).
    pub max_len: usize,
    /// Spacing of the `t` and `u` grids.
    pub grid_step: f64,
    /// Spacing of the modulation grid on `[-xi_max, xi_max]`.
    pub xi_step: f64,
    pub xi_max: f64,
    pub seed: u64,
}

impl SweepConfig {
    /// Defaults for each suite.
    pub fn for_suite(suite: Suite) -> Self {
        let base = Self {
            trials: 50,
            max_len: 12,
            grid_step: 0.02,
            xi_step: 0.05,
            xi_max: 2.0,
            seed: 0,
        };
        match suite {
            Suite::Theorem1 => Self { max_len: 10, ..base },
            Suite::Theorem2 | Suite::Lemma1 => base,
            Suite::Lemma2 => Self {
                trials: 100,
                grid_step: 1.0 / 199.0,
                ..base
            },
            Suite::Remark => Self { trials: 1000, ..base },
            Suite::Energy => Self {
                trials: 100,
                max_len: 256,
                ..base
            },
        }
    }

    fn points_per_unit(step: f64) -> Result<usize> {
        if !(step > 0.0 && step <= 1.0) {
            return Err(Error::InvalidParameter(format!("grid step must be in (0, 1], got {step}")));
        }
        Ok((1.0 / step).round() as usize)
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.max_len == 0 {
            return Err(Error::InvalidParameter("trials and max_len must be positive".into()));
        }
        Self::points_per_unit(self.grid_step)?;
        if !(self.xi_step > 0.0) || !(self.xi_max >= 0.0) {
            return Err(Error::InvalidParameter("xi grid must have positive step and non-negative range".into()));
        }
        Ok(())
    }

    /// `xi` values `i * xi_step` covering `[-xi_max, xi_max]`, zero included.
    pub fn xi_grid(&self) -> Vec<f64> {
        let half = (self.xi_max / self.xi_step + 1e-9).floor() as i64;
        (-half..=half).map(|i| i as f64 * self.xi_step).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub config: SweepConfig,
    pub trials: usize,
    pub checks: usize,
    /// Largest observed excess over the bound being checked.
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// First few failing cases, for diagnosis.
    pub failures: Vec<String>,
}

struct Tally {
    checks: usize,
    max_violation: f64,
    all_within: bool,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self {
            checks: 0,
            max_violation: f64::NEG_INFINITY,
            all_within: true,
            failures: Vec::new(),
        }
    }

    /// Record one check: `violation` must not exceed `tolerance`. NaN fails.
    fn record(&mut self, violation: f64, tolerance: f64, describe: impl FnOnce() -> String) {
        self.checks += 1;
        let violation = if violation.is_nan() { f64::INFINITY } else { violation };
        self.max_violation = self.max_violation.max(violation);
        if !(violation <= tolerance) {
            self.all_within = false;
            if self.failures.len() < 10 {
                self.failures.push(describe());
            }
        }
    }

    fn flag(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.all_within = false;
            self.max_violation = f64::INFINITY;
            if self.failures.len() < 10 {
                self.failures.push(describe());
            }
        }
    }

    fn finish(self, suite: Suite, config: &SweepConfig) -> SuiteReport {
        SuiteReport {
            suite,
            config: config.clone(),
            trials: config.trials,
            checks: self.checks,
            max_violation: self.max_violation,
            tolerance: suite.tolerance(),
            passed: self.all_within,
            failures: self.failures,
        }
    }
}

/// Largest `|<f, G>|` found on a grid, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMax {
    pub value: f64,
    pub atom: WaveformAtom,
}

/// Parameter grid over `t in t_range`, `u in [0, N + 1]` and the listed `xi`.
///
/// `t_range` and the `u` grid are given as integer index ranges divided by
/// `per_unit`.
pub fn grid_max(f: &StepFunction, per_unit: usize, t_indices: std::ops::RangeInclusive<usize>, xi_values: &[f64]) -> GridMax {
    let m = per_unit as f64;
    let u_last = per_unit * (f.len() + 1);
    let candidates: Vec<usize> = t_indices.collect();
    candidates
        .par_iter()
        .map(|&ti| {
            let t = ti as f64 / m;
            let mut best = (f64::NEG_INFINITY, WaveformAtom { t, xi: 0.0, u: 0.0 });
            for ui in 0..=u_last {
                let u = ui as f64 / m;
                for &xi in xi_values {
                    let atom = WaveformAtom { t, xi, u };
                    let v = inner_product(f, &atom).norm();
                    if v > best.0 {
                        best = (v, atom);
                    }
                }
            }
            best
        })
        .reduce_with(|a, b| if b.0 > a.0 { b } else { a })
        .map(|(value, atom)| GridMax { value, atom })
        .expect("t grid is non-empty")
}

fn random_sequence(rng: &mut ChaCha8Rng, max_len: usize, lo: f64, hi: f64) -> ScalarSequence {
    let n = rng.random_range(1..=max_len);
    ScalarSequence::new((0..n).map(|_| rng.random_range(lo..=hi)).collect()).expect("finite draws")
}

fn describe(seq: &ScalarSequence) -> String {
    format!("{:?}", seq.values())
}

pub fn run_suite(suite: Suite, config: &SweepConfig) -> Result<SuiteReport> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut tally = Tally::new();
    match suite {
        Suite::Theorem1 | Suite::Theorem2 => {
            let per_unit = SweepConfig::points_per_unit(config.grid_step)?;
            let xi_values = if suite == Suite::Theorem1 { config.xi_grid() } else { vec![0.0] };
            let lo = if suite == Suite::Theorem1 { 0.0 } else { -1.0 };
            for _ in 0..config.trials {
                let seq = random_sequence(&mut rng, config.max_len, lo, 1.0);
                let f = make_step_function(seq.clone());
                let best = best_window(&seq);
                let found = grid_max(&f, per_unit, 1..=per_unit * (seq.len() + 1), &xi_values);
                tally.record(found.value - best.value, GRID_TOLERANCE, || {
                    format!("{}: grid {} at {:?} > closed form {}", describe(&seq), found.value, found.atom, best.value)
                });
                // The closed-form value is attained by the window atom itself.
                let attained = inner_product(&f, &best.atom.to_waveform()).norm();
                let gap = (attained - best.value).abs() / best.value.max(f64::MIN_POSITIVE);
                tally.flag(gap <= 1e-12, || {
                    format!("{}: window atom gives {attained}, expected {}", describe(&seq), best.value)
                });
            }
        }
        Suite::Lemma1 => {
            let per_unit = SweepConfig::points_per_unit(config.grid_step)?;
            let xi_values = config.xi_grid();
            for _ in 0..config.trials {
                let seq = random_sequence(&mut rng, config.max_len, -1.0, 1.0);
                let f = make_step_function(seq.clone());
                let (n0, peak) = seq
                    .values()
                    .iter()
                    .map(|v| v.abs())
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
                let found = grid_max(&f, per_unit, 1..=per_unit, &xi_values);
                tally.record((found.value - peak).abs(), GRID_TOLERANCE, || {
                    format!("{}: grid {} at {:?}, max |a_j| {peak}", describe(&seq), found.value, found.atom)
                });
                let at_cell = inner_product(&f, &WaveformAtom { t: 1.0, xi: 0.0, u: (n0 + 1) as f64 }).norm();
                tally.record((at_cell - peak).abs(), GRID_TOLERANCE, || {
                    format!("{}: (1, 0, {}) gives {at_cell}, expected {peak}", describe(&seq), n0 + 1)
                });
                // Two-cell model function never exceeds the larger scalar.
                let (a_prev, a_n) = (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
                let bound = f64::max(f64::abs(a_prev), f64::abs(a_n));
                let steps = 20;
                let mut worst = f64::NEG_INFINITY;
                for ti in 1..=steps {
                    let t = ti as f64 / steps as f64;
                    for si in 0..=ti {
                        let s = si as f64 / steps as f64;
                        for &xi in &xi_values {
                            worst = worst.max(h_value(xi, s, t, a_prev, a_n)? - bound);
                        }
                    }
                }
                tally.record(worst, BOUND_TOLERANCE, || {
                    format!("h({a_prev}, {a_n}) exceeds max scalar by {worst}")
                });
            }
        }
        Suite::Lemma2 => {
            let steps = SweepConfig::points_per_unit(config.grid_step)?;
            for k in 1..=4u32 {
                for _ in 0..config.trials {
                    let a_prev = rng.random_range(-1.0..=1.0);
                    let middle = rng.random_range(-(k as f64)..=k as f64);
                    let a_next = rng.random_range(-1.0..=1.0);
                    let vertex_max = psi_vertices(k)
                        .iter()
                        .map(|&(s, t)| psi_from_parts(s, t, k, a_prev, middle, a_next))
                        .collect::<Result<Vec<_>>>()?
                        .into_iter()
                        .fold(f64::NEG_INFINITY, f64::max);
                    let mut grid = f64::NEG_INFINITY;
                    for ti in 0..=steps {
                        let t = k as f64 + ti as f64 / steps as f64;
                        let width = t - k as f64;
                        for si in 0..=steps {
                            let s = width * (si as f64 / steps as f64);
                            grid = grid.max(psi_from_parts(s, t, k, a_prev, middle, a_next)?);
                        }
                    }
                    tally.record(grid - vertex_max, BOUND_TOLERANCE, || {
                        format!("k = {k}, ({a_prev}, {middle}, {a_next}): grid {grid} > vertices {vertex_max}")
                    });
                }
            }
        }
        Suite::Remark => {
            let a = 1.0;
            let alt = make_step_function(ScalarSequence::new(vec![-a, a])?);
            // Full coverage: no modulation cancels exactly.
            let zero = inner_product(&alt, &WaveformAtom::new(2.0, 0.0, 1.5)?).norm();
            tally.record(zero, 1e-12, || format!("full-coverage modulus at xi = 0 is {zero}"));
            let xi: f64 = 0.25;
            let closed = 2.0 * a / 2f64.sqrt() * (PI * xi).sin().powi(2) / (PI * xi).abs();
            let direct = inner_product(&alt, &WaveformAtom::new(2.0, xi, 1.5)?).norm();
            tally.record((direct - closed).abs(), REMARK_TOLERANCE, || format!("xi = 0.25: {direct} vs {closed}"));
            tally.flag(direct > 0.1, || format!("xi = 0.25 modulus {direct} not above 0.1"));
            for _ in 0..config.trials {
                let t = rng.random_range(0.05..=4.0);
                let reach = 0.5 * (t + 1.0);
                let delta = rng.random_range(-reach..=reach);
                let xi = rng.random_range(-3.0..=3.0);
                let formula = alternating_modulus(a, t, delta, xi)?;
                let direct = inner_product(&alt, &WaveformAtom::new(t, xi, 1.0 + delta)?).norm();
                tally.record((formula - direct).abs(), REMARK_TOLERANCE, || {
                    format!("(t {t}, delta {delta}, xi {xi}): formula {formula} vs inner product {direct}")
                });
            }
        }
        Suite::Energy => {
            let config_pursuit = PursuitConfig::new(20)?;
            for _ in 0..config.trials {
                let seq = ScalarSequence::new((0..config.max_len).map(|_| rng.random_range(-1.0..=1.0)).collect())?;
                let exp = run_pursuit(&seq, &config_pursuit)?;
                let total = seq.sum_of_squares();
                let mut explained = 0.0;
                for (m, row) in energy_ledger(&exp).iter().enumerate() {
                    explained += row.coefficient_sq;
                    let residual_sq = exp.norm_history[m + 1].powi(2);
                    let defect = (total - explained - residual_sq).abs() / total;
                    tally.record(defect, ENERGY_TOLERANCE, || format!("iteration {m}: relative energy defect {defect}"));
                    let rise = exp.norm_history[m + 1] - exp.norm_history[m];
                    tally.flag(rise <= 0.0, || {
                        format!("iteration {m}: residual norm rose by {rise}")
                    });
                }
            }
        }
    }
    Ok(tally.finish(suite, config))
}
