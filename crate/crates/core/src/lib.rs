//! Step-function approximation of real sequences by matching pursuit over
//! the rectangular-window wavelet dictionary.
//!
//! The best atom at every iteration is the contiguous window maximizing
//! `|window sum| / sqrt(window length)`, found by an O(N^2) prefix-sum scan.
//! [`dictionary`] evaluates inner products against the full modulated
//! dictionary in closed form and [`verify`] uses it to check that no atom off
//! the cell grid does better.

// `!(x >= 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dictionary;
pub mod error;
pub mod maximizer;
pub mod pursuit;
pub mod sequence;
pub mod simulate;
pub mod verify;

pub use dictionary::{
    alternating_modulus, h_value, inner_product, overlap_interval, phi, psi_from_parts, psi_k, ComplexValue,
    Overlap, OverlapCase, WaveformAtom,
};
pub use error::{Error, Result};
pub use maximizer::{best_window, best_window_single_signed, brute_force_best, three_term_max, ScoredAtom, WindowAtom};
pub use pursuit::{
    breakpoints, energy_ledger, pursuit_step, reconstruct, run_pursuit, ExpansionTerm, GreedyExpansion, LedgerRow,
    PursuitConfig, StopReason,
};
pub use sequence::{evaluate, l2_norm, make_step_function, shift_mean, ScalarSequence, ShiftRecord, StepFunction};
pub use simulate::{
    kmeans_1d, mse, simulate_ar, simulate_iid_normal, simulate_regime, ARSpec, KMeansResult, Preset, RegimeSpec,
    SimulationOutput,
};
