//! Inner products against rectangular-window waveform atoms.
//!
//! An atom `G(t, xi, u)(x) = t^{-1/2} * rect((x - u) / t) * exp(2 pi i xi x)`
//! has unit L2 norm for every `t > 0`. Against a step function every inner
//! product reduces to a sum of integrals of `exp(2 pi i xi x)` over the overlap
//! of one unit cell with the atom's support, which have a closed form. Nothing
//! in this module integrates numerically.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::{ScalarSequence, StepFunction};

pub type ComplexValue = Complex64;

/// Dictionary parameter `(t, xi, u)`: scale, modulation frequency in cycles
/// per unit, translation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveformAtom {
    pub t: f64,
    pub xi: f64,
    pub u: f64,
}

impl WaveformAtom {
    pub fn new(t: f64, xi: f64, u: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("atom scale must be positive, got {t}")));
        }
        if !xi.is_finite() || !u.is_finite() {
            return Err(Error::InvalidParameter("atom parameters must be finite".into()));
        }
        Ok(Self { t, xi, u })
    }

    /// Wavelet (unmodulated) atom.
    pub fn wavelet(t: f64, u: f64) -> Result<Self> {
        Self::new(t, 0.0, u)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.u - 0.5 * self.t, self.u + 0.5 * self.t)
    }

    /// Value of the atom at `x`, with the support taken as closed.
    pub fn eval(&self, x: f64) -> ComplexValue {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(1.0 / self.t.sqrt(), 2.0 * PI * self.xi * x)
    }
}

/// How the supports of cell `j` and of the atom intersect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OverlapCase {
    /// The whole cell lies inside the atom support.
    CellInsideAtom,
    /// The whole atom support lies strictly inside the cell.
    AtomInsideCell,
    /// The atom covers the cell's left edge and ends inside the cell.
    LeftEdge,
    /// The atom starts inside the cell and covers its right edge.
    RightEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    pub lo: f64,
    pub hi: f64,
    pub case: OverlapCase,
}

impl Overlap {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Intersection of `[j - 1/2, j + 1/2]` with the atom support; `None` when
/// the intersection has zero length.
pub fn overlap_interval(j: i64, atom: &WaveformAtom) -> Option<Overlap> {
    let cell_lo = j as f64 - 0.5;
    let cell_hi = j as f64 + 0.5;
    let (atom_lo, atom_hi) = atom.support();
    let lo = cell_lo.max(atom_lo);
    let hi = cell_hi.min(atom_hi);
    if !(hi > lo) {
        return None;
    }
    let case = match (atom_lo <= cell_lo, atom_hi >= cell_hi) {
        (true, true) => OverlapCase::CellInsideAtom,
        (false, false) => OverlapCase::AtomInsideCell,
        (true, false) => OverlapCase::LeftEdge,
        (false, true) => OverlapCase::RightEdge,
    };
    Some(Overlap { lo, hi, case })
}

/// `sin(z) / z` with the removable singularity filled in.
fn sinc(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        z.sin() / z
    }
}

/// `int_lo^hi exp(2 pi i xi x) dx`.
///
/// Written as `exp(pi i xi (lo + hi)) * (hi - lo) * sinc(pi xi (hi - lo))`
/// rather than `(exp(2 pi i xi hi) - exp(2 pi i xi lo)) / (2 pi i xi)`: the
/// difference quotient loses every significant digit as `xi -> 0`, this form
/// keeps full relative precision, so only an exact zero takes the
/// unmodulated branch.
pub fn modulated_integral(lo: f64, hi: f64, xi: f64) -> ComplexValue {
    let len = hi - lo;
    if xi == 0.0 {
        return Complex64::new(len, 0.0);
    }
    let magnitude = len * sinc(PI * xi * len);
    Complex64::from_polar(1.0, PI * xi * (lo + hi)) * magnitude
}

/// Integral of the unnormalized atom over cell `j`.
pub fn phi(j: i64, atom: &WaveformAtom) -> ComplexValue {
    match overlap_interval(j, atom) {
        Some(ov) => modulated_integral(ov.lo, ov.hi, atom.xi),
        None => Complex64::new(0.0, 0.0),
    }
}

/// Cells of `f` whose support can meet the atom support.
fn touched_cells(f: &StepFunction, atom: &WaveformAtom) -> std::ops::RangeInclusive<i64> {
    let first = f.origin;
    let last = f.origin + f.len() as i64 - 1;
    let (lo, hi) = atom.support();
    // Cell j meets [lo, hi] only if j + 1/2 > lo and j - 1/2 < hi.
    let from = ((lo - 0.5).floor() as i64).max(first);
    let to = ((hi + 0.5).ceil() as i64).min(last);
    from..=to
}

/// `<f, G>` = `t^{-1/2} * sum_j a_j * phi(j, atom)`.
pub fn inner_product(f: &StepFunction, atom: &WaveformAtom) -> ComplexValue {
    let values = f.values();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in touched_cells(f, atom) {
        let a = values[(j - f.origin) as usize];
        if a != 0.0 {
            acc += phi(j, atom) * a;
        }
    }
    acc / atom.t.sqrt()
}

/// The two-cell model function on `0 <= s <= t <= 1`: an atom of width `t`
/// covering a length `s` of the cell holding `a_prev` and `t - s` of the cell
/// holding `a_n`, modulated at `xi`.
pub fn h_value(xi: f64, s: f64, t: f64, a_prev: f64, a_n: f64) -> Result<f64> {
    if !(0.0 <= s && s <= t && t <= 1.0 && t > 0.0) {
        return Err(Error::OutsideModelRegion(format!(
            "need 0 <= s <= t <= 1 and t > 0, got s = {s}, t = {t}"
        )));
    }
    if xi == 0.0 {
        return Ok((a_prev * s + a_n * (t - s)).abs() / t.sqrt());
    }
    let w = PI * xi;
    let left = Complex64::new(a_prev * (w * s).sin() / w, 0.0);
    let right = Complex64::from_polar(1.0, PI * t * xi) * (a_n * (w * (t - s)).sin() / w);
    Ok((left + right).norm() / t.sqrt())
}

/// `|a_prev * s + middle + a_next * (t - s - k)| / sqrt(t)` on the triangle
/// bounded by `s = 0`, `s = t - k` and `t = k + 1`.
///
/// `middle` is the sum of the `k` fully covered cells.
pub fn psi_from_parts(s: f64, t: f64, k: u32, a_prev: f64, middle: f64, a_next: f64) -> Result<f64> {
    let kf = k as f64;
    if !(t > 0.0 && kf <= t && t <= kf + 1.0 && 0.0 <= s && s <= t - kf) {
        return Err(Error::OutsideModelRegion(format!(
            "need k <= t <= k + 1, t > 0 and 0 <= s <= t - k, got s = {s}, t = {t}, k = {k}"
        )));
    }
    Ok((a_prev * s + middle + a_next * (t - s - kf)).abs() / t.sqrt())
}

/// [`psi_from_parts`] with the scalars read from `seq` around 1-based index `n`.
/// Indices outside `1..=N` contribute zero.
pub fn psi_k(s: f64, t: f64, n: i64, k: u32, seq: &ScalarSequence) -> Result<f64> {
    let a_prev = seq.get_or_zero(n - 1);
    let middle: f64 = (n..n + k as i64).map(|j| seq.get_or_zero(j)).sum();
    let a_next = seq.get_or_zero(n + k as i64);
    psi_from_parts(s, t, k, a_prev, middle, a_next)
}

/// The three vertices `(s, t)` of the triangle `T_k`.
pub fn psi_vertices(k: u32) -> [(f64, f64); 3] {
    let kf = k as f64;
    [(0.0, kf), (0.0, kf + 1.0), (1.0, kf + 1.0)]
}

/// `|<f, G(t, xi, u)>|` for the two-cell alternating function `f = {-a, a}`
/// on cells 1 and 2, with `u = 1 + delta`.
///
/// Each cell's overlap is picked from the three translation ranges (entering
/// from the left, fully covered or fully covering, leaving to the right) for
/// `t >= 1` and `t <= 1`. A cell overlapped over length `l` centred at `m`
/// contributes `exp(2 pi i xi m) * sin(pi xi l) / (pi xi)`, and the two
/// contributions of opposite sign combine by the law of cosines, written as
/// `(s1 - s2)^2 + 4 s1 s2 sin^2(pi xi (m2 - m1))` to avoid cancellation.
/// With both cells covered this is `2 |a| t^{-1/2} sin^2(pi xi) / |pi xi|`.
///
/// `delta` must satisfy `|delta| <= (t + 1) / 2`, i.e. the atom meets cell 1.
pub fn alternating_modulus(a: f64, t: f64, delta: f64, xi: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() || !a.is_finite() || !xi.is_finite() {
        return Err(Error::InvalidParameter(format!("need finite a, xi and t > 0, got t = {t}")));
    }
    let reach = 0.5 * (t + 1.0);
    if !(delta.abs() <= reach) {
        return Err(Error::OutsideModelRegion(format!(
            "delta = {delta} outside [-{reach}, {reach}] for t = {t}"
        )));
    }
    let s1 = cell_term(1.0, 1.0 + delta, t);
    let s2 = cell_term(2.0, 1.0 + delta, t);
    let (len1, mid1) = s1.unwrap_or((0.0, 1.0));
    let (len2, mid2) = s2.unwrap_or((0.0, 2.0));
    let w1 = scaled_sinc_len(len1, xi);
    let w2 = scaled_sinc_len(len2, xi);
    let half_angle = (PI * xi * (mid2 - mid1)).sin();
    let sq = (w1 - w2).powi(2) + 4.0 * w1 * w2 * half_angle * half_angle;
    Ok(a.abs() / t.sqrt() * sq.max(0.0).sqrt())
}

/// `sin(pi xi l) / (pi xi)`, equal to `l` at `xi = 0`.
fn scaled_sinc_len(len: f64, xi: f64) -> f64 {
    len * sinc(PI * xi * len)
}

/// Overlap (length, midpoint) of the cell centred at `j` with an atom of
/// width `t` centred at `u`, selected by `d = u - j`.
fn cell_term(j: f64, u: f64, t: f64) -> Option<(f64, f64)> {
    let d = u - j;
    let reach = 0.5 * (t + 1.0);
    if d.abs() >= reach {
        return None;
    }
    let edge = 0.5 * (t - 1.0).abs();
    let (lo, hi) = if d <= -edge {
        // Atom's right end lies inside the cell.
        (j - 0.5, u + 0.5 * t)
    } else if d >= edge {
        // Atom's left end lies inside the cell.
        (u - 0.5 * t, j + 0.5)
    } else if t >= 1.0 {
        (j - 0.5, j + 0.5)
    } else {
        (u - 0.5 * t, u + 0.5 * t)
    };
    Some((hi - lo, 0.5 * (lo + hi)))
}
