//! Local gradient of the action phase against classical momenta.
//!
//! For a real bound state the KD phase along `x` is piecewise constant: the
//! two classical momentum branches `+f_p` and `-f_p` interfere with equal
//! weight and the product only changes sign at nodes. Each branch is
//! therefore isolated first by keeping the positive or negative half of the
//! momentum spectrum of the state, and the phase is taken from the
//! single-branch KD entry. The branch whose gradient sits closer to its own
//! prediction is reported per row, alongside the gradient of the unresolved
//! phase.

use num_complex::Complex;
use serde::Serialize;

use super::classical::{classical_momentum_branch, turning_points};
use super::propagator::free_ccp_analytic;
use crate::ccp::{block_mass, principal_arg};
use crate::error::{LabError, Result};
use crate::hilbert::{fourier, HilbertSpec, StateVector};
use crate::scalar::{count, lit, to_f64, Scalar};

/// Fraction of the half-width between the turning points kept by the mask.
pub const MASK_FRACTION: f64 = 0.7;

#[derive(Debug, Clone, Serialize)]
pub struct GradientRow<T> {
    pub x: T,
    /// Unwrapped action phase on the reported branch.
    pub phase: T,
    pub gradient: T,
    pub prediction: T,
    pub relative_error: T,
    /// `+1` or `-1`; `0` when there is a single branch.
    pub branch: i8,
    /// Finite-difference gradient of the phase without branch separation.
    pub raw_gradient: T,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradientReport<T> {
    pub rows: Vec<GradientRow<T>>,
    /// Admissible-region mask over the sampled positions.
    pub mask: Vec<bool>,
    pub turning_points: (T, T),
    pub momentum: T,
}

impl<T: Scalar> GradientReport<T> {
    pub fn median_relative_error(&self) -> T {
        median(self.rows.iter().map(|r| r.relative_error).collect())
    }

    pub fn max_abs_error(&self) -> T {
        self.rows.iter().map(|r| (r.gradient - r.prediction).abs()).fold(T::zero(), T::max)
    }
}

fn median<T: Scalar>(mut v: Vec<T>) -> T {
    if v.is_empty() {
        return T::nan();
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / lit(2.0)
    }
}

/// Removes `2 pi hbar` jumps: whenever consecutive values differ by more
/// than `pi hbar`, the remainder of the sequence is shifted back.
pub fn unwrap_phase<T: Scalar>(phases: &[T], hbar: T) -> Vec<T> {
    let period = T::TAU() * hbar;
    let half = T::PI() * hbar;
    let mut out = Vec::with_capacity(phases.len());
    let mut shift = T::zero();
    for (i, &s) in phases.iter().enumerate() {
        if i > 0 {
            let mut diff = s + shift - out[i - 1];
            while diff > half {
                shift = shift - period;
                diff = diff - period;
            }
            while diff < -half {
                shift = shift + period;
                diff = diff + period;
            }
        }
        out.push(s + shift);
    }
    out
}

/// Splits a state into its positive- and negative-momentum parts. The zero
/// and Nyquist slots are shared equally.
pub fn momentum_branches<T: Scalar>(state: &StateVector<T>) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
    let space = state.space();
    let c = state.momentum_amplitudes();
    let half = lit::<T>(0.5);
    let mut plus = vec![Complex::new(T::zero(), T::zero()); c.len()];
    let mut minus = plus.clone();
    for (k, z) in c.iter().enumerate() {
        let f = space.signed_frequency(k);
        let nyquist = 2 * k == space.dim;
        if f == 0 || nyquist {
            plus[k] = z * half;
            minus[k] = z * half;
        } else if f > 0 {
            plus[k] = *z;
        } else {
            minus[k] = *z;
        }
    }
    (fourier::from_momentum(&plus), fourier::from_momentum(&minus))
}

/// KD entries `<p_k|x_j><x_j|psi><psi|p_k>` along `x` for raw amplitudes `psi`.
fn kd_column<T: Scalar>(amplitudes: &[Complex<T>], k: usize, space: &HilbertSpec<T>) -> Vec<Complex<T>> {
    let d = space.dim;
    let scale = count::<T>(d).sqrt().recip();
    let c = fourier::to_momentum(amplitudes)[k];
    // A vanishing <psi|p> only contributes a constant phase.
    let tail = if c.norm() > T::epsilon() { c.conj() } else { Complex::new(T::one(), T::zero()) };
    amplitudes
        .iter()
        .enumerate()
        .map(|(j, a)| Complex::from_polar(scale, -T::TAU() * count::<T>((j * k) % d) / count::<T>(d)) * a * tail)
        .collect()
}

fn phases<T: Scalar>(values: &[Complex<T>], hbar: T) -> Vec<T> {
    let raw: Vec<T> = values.iter().map(|z| hbar * principal_arg(*z)).collect();
    unwrap_phase(&raw, hbar)
}

fn central_difference<T: Scalar>(s: &[T], i: usize, h: T) -> T {
    (s[i + 1] - s[i - 1]) / (lit::<T>(2.0) * h)
}

/// Contiguous index range of grid points with `|x - c| <= 0.7 h`.
fn admissible<T: Scalar>(space: &HilbertSpec<T>, turning: (T, T)) -> (Vec<bool>, Vec<usize>) {
    let centre = (turning.0 + turning.1) / lit(2.0);
    let reach = lit::<T>(MASK_FRACTION) * (turning.1 - turning.0) / lit(2.0);
    let mask: Vec<bool> = space.positions().iter().map(|&x| (x - centre).abs() <= reach).collect();
    let idx = mask.iter().enumerate().filter(|(_, &m)| m).map(|(j, _)| j).collect();
    (mask, idx)
}

/// Compares finite-difference gradients of the action phase of an energy
/// eigenstate with `+-f_p(x, E) - p` in the masked region.
pub fn gradient_check<T: Scalar, V: Fn(T) -> T>(
    e_state: &StateVector<T>,
    e_value: T,
    k_p: usize,
    potential: &V,
    space: &HilbertSpec<T>,
) -> Result<GradientReport<T>> {
    if e_state.dim() != space.dim {
        return Err(LabError::DimensionMismatch { expected: space.dim, found: e_state.dim() });
    }
    if k_p >= space.dim {
        return Err(LabError::IndexOutOfRange { index: k_p, dim: space.dim });
    }
    let turning = turning_points(potential, e_value, space)?;
    let (mask, idx) = admissible(space, turning);
    if idx.len() < 3 {
        return Err(LabError::NoAdmissibleRegion);
    }
    let p = space.momentum(k_p);
    let f_max = idx
        .iter()
        .map(|&j| classical_momentum_branch(potential, e_value, space.position(j), 1, space))
        .collect::<Result<Vec<T>>>()?
        .into_iter()
        .fold(T::zero(), T::max);
    if !(p.abs() < f_max) {
        return Err(LabError::InvalidParameter(format!(
            "momentum {p} must satisfy |p| < max f_p = {f_max} inside the admissible region"
        )));
    }

    let hbar = space.hbar;
    let (plus, minus) = momentum_branches(e_state);
    let pick = |values: Vec<Complex<T>>| idx.iter().map(|&j| values[j]).collect::<Vec<_>>();
    let s_plus = phases(&pick(kd_column(&plus, k_p, space)), hbar);
    let s_minus = phases(&pick(kd_column(&minus, k_p, space)), hbar);
    let s_raw = phases(&pick(kd_column(e_state.amplitudes(), k_p, space)), hbar);

    let dx = space.dx();
    let floor = space.dp();
    let mut rows = Vec::with_capacity(idx.len() - 2);
    for i in 1..idx.len() - 1 {
        let x = space.position(idx[i]);
        let f = classical_momentum_branch(potential, e_value, x, 1, space)?;
        let candidates = [
            (1i8, central_difference(&s_plus, i, dx), f - p, s_plus[i]),
            (-1, central_difference(&s_minus, i, dx), -f - p, s_minus[i]),
        ];
        let (branch, gradient, prediction, phase) = candidates
            .into_iter()
            .min_by(|a, b| (a.1 - a.2).abs().partial_cmp(&(b.1 - b.2).abs()).unwrap_or(std::cmp::Ordering::Equal))
            .expect("two candidates");
        rows.push(GradientRow {
            x,
            phase,
            gradient,
            prediction,
            relative_error: (gradient - prediction).abs() / prediction.abs().max(floor),
            branch,
            raw_gradient: central_difference(&s_raw, i, dx),
        });
    }
    Ok(GradientReport { rows, mask, turning_points: turning, momentum: p })
}

/// The same diagnostic for the free-particle weak value `P(x_t|x_0,p_0)`,
/// sampled at `count` points spaced `step` apart from `x_start`. The phase
/// gradient there equals `m (x_t - x_0) / t - p_0` exactly.
pub fn free_gradient_check<T: Scalar>(
    x_0: T,
    p_0: T,
    t: T,
    x_start: T,
    step: T,
    samples: usize,
    space: &HilbertSpec<T>,
) -> Result<GradientReport<T>> {
    if samples < 3 {
        return Err(LabError::NoAdmissibleRegion);
    }
    if !(step > T::zero() && step.is_finite()) {
        return Err(LabError::InvalidParameter(format!("step must be positive, got {step}")));
    }
    let xs: Vec<T> = (0..samples).map(|i| x_start + step * count::<T>(i)).collect();
    let values = xs.iter().map(|&x| free_ccp_analytic(x, x_0, p_0, t, space)).collect::<Result<Vec<_>>>()?;
    let s = phases(&values, space.hbar);
    let floor = space.dp();
    let rows = (1..samples - 1)
        .map(|i| {
            let gradient = central_difference(&s, i, step);
            let prediction = space.mass * (xs[i] - x_0) / t - p_0;
            GradientRow {
                x: xs[i],
                phase: s[i],
                gradient,
                prediction,
                relative_error: (gradient - prediction).abs() / prediction.abs().max(floor),
                branch: 0,
                raw_gradient: gradient,
            }
        })
        .collect();
    Ok(GradientReport { rows, mask: vec![true; samples], turning_points: (xs[0], xs[samples - 1]), momentum: p_0 })
}

#[derive(Debug, Clone, Serialize)]
pub struct CoarseGrainReport<T> {
    /// Block length in grid points.
    pub window: usize,
    pub window_width: T,
    /// `min |f_p - p|` over the admissible region.
    pub min_momentum_gap: T,
    pub fine_mass: T,
    pub coarse_mass: T,
    /// `fine_mass / coarse_mass`.
    pub ratio: T,
    /// First grid index and number of points used.
    pub region: (usize, usize),
}

/// Total absolute mass of `rho(x, p|E)` over the admissible region before and
/// after block-averaging over windows with `min |f_p - p| * width >= action_ratio * hbar`.
pub fn coarse_grain_decay<T: Scalar, V: Fn(T) -> T>(
    e_state: &StateVector<T>,
    e_value: T,
    k_p: usize,
    potential: &V,
    space: &HilbertSpec<T>,
    action_ratio: T,
) -> Result<CoarseGrainReport<T>> {
    if !(action_ratio > T::zero()) {
        return Err(LabError::InvalidParameter(format!("action ratio must be positive, got {action_ratio}")));
    }
    if k_p >= space.dim {
        return Err(LabError::IndexOutOfRange { index: k_p, dim: space.dim });
    }
    let turning = turning_points(potential, e_value, space)?;
    let (_, idx) = admissible(space, turning);
    if idx.is_empty() {
        return Err(LabError::NoAdmissibleRegion);
    }
    let p = space.momentum(k_p);
    let gap = idx
        .iter()
        .map(|&j| {
            classical_momentum_branch(potential, e_value, space.position(j), 1, space).map(|f| (f - p.abs()).abs())
        })
        .collect::<Result<Vec<T>>>()?
        .into_iter()
        .fold(T::infinity(), T::min);
    let dx = space.dx();
    let needed = (action_ratio * space.hbar / (gap * dx)).ceil();
    let window = needed.to_usize().filter(|&w| w >= 1 && w <= idx.len()).ok_or_else(|| {
        LabError::InvalidParameter(format!(
            "window of {} points (gap {}) does not fit the admissible region of {} points",
            to_f64(needed),
            to_f64(gap),
            idx.len()
        ))
    })?;
    let used = idx.len() / window * window;
    let column = kd_column(e_state.amplitudes(), k_p, space);
    let values = &column[idx[0]..idx[0] + used];
    let fine_mass = block_mass(values, 1)?;
    let coarse_mass = block_mass(values, window)?;
    Ok(CoarseGrainReport {
        window,
        window_width: count::<T>(window) * dx,
        min_momentum_gap: gap,
        fine_mass,
        coarse_mass,
        ratio: fine_mass / coarse_mass,
        region: (idx[0], used),
    })
}
