//! Synthetic series and a k-means baseline.
//!
//! Every generator draws from a ChaCha8 stream seeded from one `u64`, so a
//! seed fixes the output on every platform.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::ScalarSequence;

const ROW_SUM_TOLERANCE: f64 = 1e-9;

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_len(t: usize) -> Result<()> {
    if t == 0 {
        return Err(Error::InvalidParameter("series length must be at least 1".into()));
    }
    Ok(())
}

/// Gaussian series whose mean is selected by a hidden Markov chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub means: Vec<f64>,
    /// Shared noise variance. Zero gives the noiseless mean path.
    pub variance: f64,
    /// Row `i` is the distribution of the next state given state `i`.
    pub transitions: Vec<Vec<f64>>,
}

impl RegimeSpec {
    pub fn new(means: Vec<f64>, variance: f64, transitions: Vec<Vec<f64>>) -> Result<Self> {
        let k = means.len();
        if k == 0 {
            return Err(Error::InvalidParameter("at least one regime is required".into()));
        }
        if means.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidParameter("regime means must be finite".into()));
        }
        if !(variance >= 0.0) || !variance.is_finite() {
            return Err(Error::InvalidParameter(format!("variance must be finite and >= 0, got {variance}")));
        }
        if transitions.len() != k {
            return Err(Error::InvalidParameter(format!(
                "transition matrix has {} rows for {k} regimes",
                transitions.len()
            )));
        }
        for (row, probs) in transitions.iter().enumerate() {
            if probs.len() != k {
                return Err(Error::InvalidParameter(format!("transition row {row} has {} entries", probs.len())));
            }
            let sum: f64 = probs.iter().sum();
            if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::NotStochastic { row, sum });
            }
        }
        Ok(Self {
            means,
            variance,
            transitions,
        })
    }

    pub fn states(&self) -> usize {
        self.means.len()
    }

    /// Symmetric chain staying put with probability `persistence`.
    pub fn symmetric(means: Vec<f64>, variance: f64, persistence: f64) -> Result<Self> {
        let k = means.len();
        let leave = if k > 1 { (1.0 - persistence) / (k - 1) as f64 } else { 0.0 };
        let transitions = (0..k)
            .map(|i| (0..k).map(|j| if i == j { if k > 1 { persistence } else { 1.0 } } else { leave }).collect())
            .collect();
        Self::new(means, variance, transitions)
    }
}

/// Autoregression `y_t = sum_p coefficients[p] * y_{t-1-p} + noise_sd * e_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ARSpec {
    pub coefficients: Vec<f64>,
    pub noise_sd: f64,
    /// Values before the first output, most recent first. Missing lags are 0.
    #[serde(default)]
    pub initial_history: Vec<f64>,
}

impl ARSpec {
    pub fn new(coefficients: Vec<f64>, noise_sd: f64) -> Result<Self> {
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("AR coefficients must be finite".into()));
        }
        if !(noise_sd >= 0.0) || !noise_sd.is_finite() {
            return Err(Error::InvalidParameter(format!("noise_sd must be finite and >= 0, got {noise_sd}")));
        }
        Ok(Self {
            coefficients,
            noise_sd,
            initial_history: Vec::new(),
        })
    }

    pub fn with_initial_history(mut self, history: Vec<f64>) -> Result<Self> {
        if history.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("initial history must be finite".into()));
        }
        self.initial_history = history;
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOutput {
    pub values: ScalarSequence,
    /// 1-based regime labels; empty for non-regime generators.
    pub states: Vec<usize>,
    /// Conditional mean of each value given the past (and the regime).
    pub true_means: ScalarSequence,
    pub seed: u64,
    /// Leading values produced from the artificial initial history.
    pub burn_in: usize,
}

impl SimulationOutput {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn draw_next(rng: &mut ChaCha8Rng, row: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (j, p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return j;
        }
    }
    // Rounding left u above the accumulated total: take the last reachable state.
    row.iter().rposition(|&p| p > 0.0).unwrap_or(row.len() - 1)
}

pub fn simulate_regime(spec: &RegimeSpec, t: usize, seed: u64) -> Result<SimulationOutput> {
    check_len(t)?;
    let mut rng = rng_for(seed);
    let sd = spec.variance.sqrt();
    let mut state = rng.random_range(0..spec.states());
    let mut values = Vec::with_capacity(t);
    let mut states = Vec::with_capacity(t);
    let mut means = Vec::with_capacity(t);
    for _ in 0..t {
        let mean = spec.means[state];
        let z: f64 = rng.sample(StandardNormal);
        values.push(mean + sd * z);
        means.push(mean);
        states.push(state + 1);
        state = draw_next(&mut rng, &spec.transitions[state]);
    }
    Ok(SimulationOutput {
        values: ScalarSequence::new(values)?,
        states,
        true_means: ScalarSequence::new(means)?,
        seed,
        burn_in: 0,
    })
}

pub fn simulate_ar(spec: &ARSpec, t: usize, seed: u64) -> Result<SimulationOutput> {
    check_len(t)?;
    let mut rng = rng_for(seed);
    let p = spec.order();
    // history[0] is y_{t-1}.
    let mut history: Vec<f64> = (0..p).map(|i| spec.initial_history.get(i).copied().unwrap_or(0.0)).collect();
    let mut values = Vec::with_capacity(t);
    let mut means = Vec::with_capacity(t);
    for _ in 0..t {
        let mean: f64 = spec.coefficients.iter().zip(&history).map(|(c, y)| c * y).sum();
        let z: f64 = rng.sample(StandardNormal);
        let y = mean + spec.noise_sd * z;
        values.push(y);
        means.push(mean);
        if p > 0 {
            history.rotate_right(1);
            history[0] = y;
        }
    }
    Ok(SimulationOutput {
        values: ScalarSequence::new(values)?,
        states: Vec::new(),
        true_means: ScalarSequence::new(means)?,
        seed,
        burn_in: p.min(t),
    })
}

pub fn simulate_iid_normal(mean: f64, variance: f64, t: usize, seed: u64) -> Result<SimulationOutput> {
    check_len(t)?;
    if !mean.is_finite() || !(variance >= 0.0) || !variance.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need finite mean and variance >= 0, got mean {mean}, variance {variance}"
        )));
    }
    let mut rng = rng_for(seed);
    let sd = variance.sqrt();
    let values = (0..t)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            mean + sd * z
        })
        .collect();
    Ok(SimulationOutput {
        values: ScalarSequence::new(values)?,
        states: Vec::new(),
        true_means: ScalarSequence::new(vec![mean; t])?,
        seed,
        burn_in: 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    /// Ascending.
    pub centers: Vec<f64>,
    /// Index into `centers` for every input value.
    pub assignments: Vec<usize>,
    pub iterations: usize,
}

impl KMeansResult {
    /// Each value replaced by its cluster centre.
    pub fn center_path(&self) -> Vec<f64> {
        self.assignments.iter().map(|&c| self.centers[c]).collect()
    }
}

const KMEANS_MAX_ITERATIONS: usize = 10_000;

/// Index of the closest centre; `current` wins ties so stable points do not
/// flip between equidistant centres.
fn nearest(centers: &[f64], x: f64, current: Option<usize>) -> usize {
    let mut best = current.unwrap_or(0);
    let mut best_d = (x - centers[best]).abs();
    for (i, c) in centers.iter().enumerate() {
        let d = (x - c).abs();
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

fn plus_plus_seeds(values: &[f64], k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut centers = vec![values[rng.random_range(0..values.len())]];
    let mut dist2: Vec<f64> = values.iter().map(|x| (x - centers[0]).powi(2)).collect();
    while centers.len() < k {
        let total: f64 = dist2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, d) in dist2.iter().enumerate() {
                acc += d;
                if acc > target {
                    chosen = Some(i);
                    break;
                }
            }
            chosen.unwrap_or_else(|| dist2.iter().rposition(|&d| d > 0.0).unwrap())
        } else {
            rng.random_range(0..values.len())
        };
        let c = values[pick];
        centers.push(c);
        for (d, x) in dist2.iter_mut().zip(values) {
            *d = d.min((x - c).powi(2));
        }
    }
    centers
}

/// Lloyd's algorithm on scalars with k-means++ seeding, run to a fixed point.
///
/// A cluster left empty takes the point farthest from its centre among
/// clusters with at least two members. Centres are returned sorted with
/// assignments relabelled to match.
pub fn kmeans_1d(values: &ScalarSequence, k: usize, seed: u64) -> Result<KMeansResult> {
    let x = values.values();
    if k == 0 || k > x.len() {
        return Err(Error::InvalidParameter(format!("k must be in 1..={}, got {k}", x.len())));
    }
    let mut rng = rng_for(seed);
    let mut centers = plus_plus_seeds(x, k, &mut rng);
    let mut assignments: Vec<usize> = x.iter().map(|&v| nearest(&centers, v, None)).collect();
    let mut iterations = 0;

    loop {
        iterations += 1;
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (&v, &a) in x.iter().zip(&assignments) {
            sums[a] += v;
            counts[a] += 1;
        }
        if let Some(empty) = counts.iter().position(|&c| c == 0) {
            // k <= N, so some cluster has two or more members.
            let far = (0..x.len())
                .filter(|&i| counts[assignments[i]] >= 2)
                .max_by(|&i, &j| {
                    let di = (x[i] - centers[assignments[i]]).abs();
                    let dj = (x[j] - centers[assignments[j]]).abs();
                    di.total_cmp(&dj).then(j.cmp(&i))
                })
                .expect("a cluster with two members exists");
            assignments[far] = empty;
            centers[empty] = x[far];
            continue;
        }
        for c in 0..k {
            centers[c] = sums[c] / counts[c] as f64;
        }
        let next: Vec<usize> = x
            .iter()
            .zip(&assignments)
            .map(|(&v, &a)| nearest(&centers, v, Some(a)))
            .collect();
        if next == assignments || iterations >= KMEANS_MAX_ITERATIONS {
            break;
        }
        assignments = next;
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| centers[a].total_cmp(&centers[b]).then(a.cmp(&b)));
    let mut relabel = vec![0; k];
    for (new, &old) in order.iter().enumerate() {
        relabel[old] = new;
    }
    Ok(KMeansResult {
        centers: order.iter().map(|&c| centers[c]).collect(),
        assignments: assignments.iter().map(|&a| relabel[a]).collect(),
        iterations,
    })
}

/// Mean squared difference.
pub fn mse(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64)
}

/// Named experiment configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    /// Three regimes, means (-0.5, 0.1, 0.5), variance 0.01.
    Sim1ThreeState,
    /// Four regimes, means (-0.4, -0.1, 0.1, 0.4), variance 0.01.
    Sim2FourState,
    /// I.i.d. Normal(2, 1).
    NormalMean2,
    /// I.i.d. Normal(0, 1).
    NormalStd,
    /// AR(2) with both lags 0.3 and standard normal noise.
    Ar2,
    /// Two symmetric regimes at +-0.2, persistence 0.97, variance 0.01.
    KMeansTwoState,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Sim1ThreeState,
        Preset::Sim2FourState,
        Preset::NormalMean2,
        Preset::NormalStd,
        Preset::Ar2,
        Preset::KMeansTwoState,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Sim1ThreeState => "sim1-3state",
            Preset::Sim2FourState => "sim2-4state",
            Preset::NormalMean2 => "normal-mean2",
            Preset::NormalStd => "normal-std",
            Preset::Ar2 => "ar2",
            Preset::KMeansTwoState => "kmeans-2state",
        }
    }

    pub fn default_len(&self) -> usize {
        match self {
            Preset::Sim1ThreeState => 250,
            Preset::Sim2FourState => 600,
            Preset::NormalMean2 | Preset::NormalStd => 500,
            Preset::Ar2 => 100,
            Preset::KMeansTwoState => 500,
        }
    }

    /// Pursuit iterations used with this preset's experiment.
    pub fn default_iterations(&self) -> usize {
        match self {
            Preset::Sim1ThreeState => 11,
            Preset::Sim2FourState => 21,
            Preset::NormalMean2 | Preset::NormalStd => 1,
            Preset::Ar2 => 17,
            Preset::KMeansTwoState => 21,
        }
    }

    /// Regime parameters, when the preset is a regime chain.
    ///
    /// The printed first rows of the three- and four-state matrices read
    /// `0.98, 0.2, 0, ...`, which sums to 1.18; `0.02` is the only single-entry
    /// change that makes them stochastic.
    pub fn regime_spec(&self) -> Option<RegimeSpec> {
        let spec = match self {
            Preset::Sim1ThreeState => RegimeSpec::new(
                vec![-0.5, 0.1, 0.5],
                0.01,
                vec![vec![0.98, 0.02, 0.0], vec![0.005, 0.98, 0.015], vec![0.02, 0.08, 0.90]],
            ),
            Preset::Sim2FourState => RegimeSpec::new(
                vec![-0.4, -0.1, 0.1, 0.4],
                0.01,
                vec![
                    vec![0.98, 0.02, 0.0, 0.0],
                    vec![0.02, 0.95, 0.03, 0.0],
                    vec![0.0, 0.02, 0.97, 0.01],
                    vec![0.01, 0.0, 0.02, 0.97],
                ],
            ),
            Preset::KMeansTwoState => RegimeSpec::symmetric(vec![0.2, -0.2], 0.01, 0.97),
            _ => return None,
        };
        Some(spec.expect("preset parameters are valid"))
    }

    pub fn generate(&self, t: usize, seed: u64) -> Result<SimulationOutput> {
        if let Some(spec) = self.regime_spec() {
            return simulate_regime(&spec, t, seed);
        }
        match self {
            Preset::NormalMean2 => simulate_iid_normal(2.0, 1.0, t, seed),
            Preset::NormalStd => simulate_iid_normal(0.0, 1.0, t, seed),
            Preset::Ar2 => simulate_ar(&ARSpec::new(vec![0.3, 0.3], 1.0)?, t, seed),
            _ => unreachable!("regime presets handled above"),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown preset '{s}'")))
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
