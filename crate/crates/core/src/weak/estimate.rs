use num_complex::Complex;
use serde::Serialize;

use super::sim::{simulate, MeasurementRecord, WeakSimConfig};
use crate::ccp::DEFAULT_EPS_OVERLAP;
use crate::error::{LabError, Result};
use crate::hilbert::StateVector;
use crate::scalar::{count, lit, to_f64, Scalar};

/// Fewest accepted trials an estimate is formed from.
pub const MIN_ACCEPTED: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeakValueEstimate<T> {
    pub re: T,
    pub im: T,
    pub stderr_re: T,
    pub stderr_im: T,
    pub trials_used: usize,
}

impl<T: Scalar> WeakValueEstimate<T> {
    pub fn value(&self) -> Complex<T> {
        Complex::new(self.re, self.im)
    }

    /// `sqrt(stderr_re^2 + stderr_im^2)`.
    pub fn combined_stderr(&self) -> T {
        self.stderr_re.hypot(self.stderr_im)
    }
}

fn mean_and_stderr<T: Scalar>(samples: &[T]) -> (T, T) {
    let n = count::<T>(samples.len());
    let mean = samples.iter().copied().sum::<T>() / n;
    let var = samples.iter().map(|&s| (s - mean) * (s - mean)).sum::<T>() / (n - T::one());
    (mean, (var / n).sqrt())
}

/// First-order pointer-shift estimators for the Gaussian meter:
/// `Re = <q> / g` and `Im = 2 sigma^2 <p> / (g hbar)`.
pub fn estimate_weak_value<T: Scalar>(record: &MeasurementRecord<T>) -> Result<WeakValueEstimate<T>> {
    if record.accepted_trials < MIN_ACCEPTED {
        return Err(LabError::TooFewAccepted { accepted: record.accepted_trials, required: MIN_ACCEPTED });
    }
    let g = record.config.coupling;
    if !(g > T::zero()) {
        return Err(LabError::InvalidParameter("coupling must be positive to form an estimate".into()));
    }
    let sigma = record.config.pointer_width;
    let (q, se_q) = mean_and_stderr(&record.position_samples);
    let (p, se_p) = mean_and_stderr(&record.momentum_samples);
    let im_scale = lit::<T>(2.0) * sigma * sigma / (g * record.config.hbar);
    Ok(WeakValueEstimate {
        re: q / g,
        im: p * im_scale,
        stderr_re: se_q / g,
        stderr_im: se_p * im_scale,
        trials_used: record.accepted_trials,
    })
}

/// `<b|A|a> / <b|a>`, the value the estimators converge to as `g -> 0`.
pub fn analytic_weak_value<T: Scalar>(config: &WeakSimConfig<T>) -> Result<Complex<T>> {
    let den = config.post.inner(&config.pre)?;
    if den.norm() < lit(DEFAULT_EPS_OVERLAP) {
        return Err(LabError::OrthogonalConditions { overlap: to_f64(den.norm()), eps: DEFAULT_EPS_OVERLAP });
    }
    let applied = config.observable.apply(config.pre.amplitudes());
    let num = config
        .post
        .amplitudes()
        .iter()
        .zip(&applied)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (b, a)| acc + b.conj() * a);
    Ok(num / den)
}

#[derive(Debug, Clone, Serialize)]
pub struct BiasRow<T> {
    pub coupling: T,
    pub estimate: WeakValueEstimate<T>,
    /// `|estimate - analytic|`.
    pub deviation: T,
    /// Deviation change against the previous row lies within two combined
    /// standard errors.
    pub indistinguishable_from_previous: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BiasScan<T> {
    pub analytic: Complex<T>,
    pub rows: Vec<BiasRow<T>>,
}

impl<T: Scalar> BiasScan<T> {
    /// No row's deviation exceeds the previous one by more than two combined
    /// standard errors of the pair.
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| {
            let band = lit::<T>(2.0) * w[0].estimate.combined_stderr().hypot(w[1].estimate.combined_stderr());
            w[1].deviation <= w[0].deviation + band
        })
    }
}

/// Reruns `base` at each coupling (descending, all positive) with the same
/// seed and tabulates the distance to the analytic weak value.
pub fn bias_scan<T: Scalar>(base: &WeakSimConfig<T>, couplings: &[T]) -> Result<BiasScan<T>> {
    if couplings.is_empty() {
        return Err(LabError::EmptyInput);
    }
    if couplings.iter().any(|&g| !(g > T::zero() && g.is_finite())) {
        return Err(LabError::InvalidParameter("couplings must be positive".into()));
    }
    if couplings.windows(2).any(|w| w[1] >= w[0]) {
        return Err(LabError::InvalidParameter("couplings must be sorted in descending order".into()));
    }
    let analytic = analytic_weak_value(base)?;
    let mut rows: Vec<BiasRow<T>> = Vec::with_capacity(couplings.len());
    for &g in couplings {
        let config = WeakSimConfig { coupling: g, ..base.clone() };
        let estimate = estimate_weak_value(&simulate(&config)?)?;
        let deviation = (estimate.value() - analytic).norm();
        let indistinguishable_from_previous = rows.last().is_some_and(|prev| {
            let band = lit::<T>(2.0) * prev.estimate.combined_stderr().hypot(estimate.combined_stderr());
            (deviation - prev.deviation).abs() <= band
        });
        rows.push(BiasRow { coupling: g, estimate, deviation, indistinguishable_from_previous });
    }
    Ok(BiasScan { analytic, rows })
}

/// Convenience for tests and scenarios: a projector observable onto `m`.
pub fn projector_config<T: Scalar>(
    pre: StateVector<T>,
    post: StateVector<T>,
    m: &StateVector<T>,
    coupling: T,
    pointer_width: T,
    trials: usize,
    master_seed: u64,
) -> WeakSimConfig<T> {
    WeakSimConfig {
        pre,
        post,
        observable: crate::hilbert::OperatorMatrix::projector(m),
        coupling,
        pointer_width,
        trials,
        master_seed,
    }
}
