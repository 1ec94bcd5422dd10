use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ccp::DEFAULT_EPS_OVERLAP;
use crate::error::{LabError, Result};
use crate::hilbert::{eigensystem, OperatorMatrix, StateVector};
use crate::scalar::{lit, to_f64, Scalar};

/// Von Neumann measurement of `A` on a Gaussian pointer, followed by
/// post-selection.
///
/// The pointer starts as `exp(-q^2 / (4 sigma^2))`, so `sigma` is its
/// position spread, and the interaction is `exp(-i g A (x) P / hbar)`.
#[derive(Debug, Clone)]
pub struct WeakSimConfig<T> {
    pub pre: StateVector<T>,
    pub post: StateVector<T>,
    pub observable: OperatorMatrix<T>,
    pub coupling: T,
    pub pointer_width: T,
    pub trials: usize,
    pub master_seed: u64,
}

/// Scalar parameters of a run, echoed into its record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfigEcho<T> {
    pub coupling: T,
    pub pointer_width: T,
    pub trials: usize,
    pub master_seed: u64,
    pub hbar: T,
    /// Exact post-selection probability of one trial.
    pub acceptance_probability: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementRecord<T> {
    pub accepted_trials: usize,
    pub total_trials: usize,
    /// Pointer positions of accepted trials with even acceptance rank.
    pub position_samples: Vec<T>,
    /// Pointer momenta of accepted trials with odd acceptance rank.
    pub momentum_samples: Vec<T>,
    pub config: ConfigEcho<T>,
}

impl<T: Scalar> MeasurementRecord<T> {
    pub fn acceptance_fraction(&self) -> T {
        T::from_usize(self.accepted_trials).unwrap_or_else(T::zero)
            / T::from_usize(self.total_trials.max(1)).unwrap_or_else(T::one)
    }
}

impl<T: Scalar> WeakSimConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.pre.dim() != self.post.dim() || self.pre.dim() != self.observable.entries().dim() {
            return Err(LabError::DimensionMismatch { expected: self.pre.dim(), found: self.post.dim() });
        }
        if !(self.coupling >= T::zero() && self.coupling.is_finite()) {
            return Err(LabError::InvalidParameter(format!("coupling must be non-negative, got {}", self.coupling)));
        }
        if !(self.pointer_width > T::zero() && self.pointer_width.is_finite()) {
            return Err(LabError::InvalidParameter(format!(
                "pointer width must be positive, got {}",
                self.pointer_width
            )));
        }
        if self.trials == 0 {
            return Err(LabError::InvalidParameter("trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// Branch amplitudes `c_i = <b|i><i|a>` and shifts `g lambda_i`.
#[derive(Debug, Clone)]
struct Branches<T> {
    weights: Vec<Complex<T>>,
    shifts: Vec<T>,
    /// `sum_i |c_i|`.
    total: T,
    acceptance: T,
    sigma: T,
    hbar: T,
}

impl<T: Scalar> Branches<T> {
    fn new(config: &WeakSimConfig<T>) -> Result<Self> {
        let overlap = config.post.inner(&config.pre)?;
        if overlap.norm() < lit(DEFAULT_EPS_OVERLAP) {
            return Err(LabError::OrthogonalConditions { overlap: to_f64(overlap.norm()), eps: DEFAULT_EPS_OVERLAP });
        }
        let system = eigensystem(&config.observable)?;
        let mut weights = Vec::new();
        let mut shifts = Vec::new();
        for (lambda, v) in system.energies.iter().zip(system.states.vectors()) {
            let c = config.post.inner(v)? * v.inner(&config.pre)?;
            if c.norm() > T::zero() {
                weights.push(c);
                shifts.push(config.coupling * *lambda);
            }
        }
        let sigma = config.pointer_width;
        let eight_s2 = lit::<T>(8.0) * sigma * sigma;
        let mut acceptance = T::zero();
        for (ci, si) in weights.iter().zip(&shifts) {
            for (cj, sj) in weights.iter().zip(&shifts) {
                let d = *si - *sj;
                acceptance = acceptance + (ci.conj() * cj).re * (-d * d / eight_s2).exp();
            }
        }
        let total = weights.iter().map(|c| c.norm()).sum();
        Ok(Branches { weights, shifts, total, acceptance, sigma, hbar: config.pre.space().hbar })
    }

    /// Post-selected pointer position sample, exact by rejection from the
    /// Gaussian mixture `sum_i |c_i| N(g lambda_i, sigma)`.
    fn sample_position<R: rand::Rng>(&self, rng: &mut R) -> T {
        let four_s2 = lit::<T>(4.0) * self.sigma * self.sigma;
        loop {
            let mut pick = T::unit_uniform(rng) * self.total;
            let mut branch = self.weights.len() - 1;
            for (i, c) in self.weights.iter().enumerate() {
                if pick < c.norm() {
                    branch = i;
                    break;
                }
                pick = pick - c.norm();
            }
            let q = self.shifts[branch] + self.sigma * T::standard_normal(rng);
            let mut amp = Complex::new(T::zero(), T::zero());
            let mut envelope = T::zero();
            for (c, s) in self.weights.iter().zip(&self.shifts) {
                let e = (-(q - *s) * (q - *s) / four_s2).exp();
                amp = amp + c * e;
                envelope = envelope + c.norm() * e * e;
            }
            if T::unit_uniform(rng) * self.total * envelope <= amp.norm_sqr() {
                return q;
            }
        }
    }

    /// Post-selected pointer momentum sample; the unshifted momentum profile
    /// is `N(0, hbar / (2 sigma))` and the branches only add phases.
    fn sample_momentum<R: rand::Rng>(&self, rng: &mut R) -> T {
        let spread = self.hbar / (lit::<T>(2.0) * self.sigma);
        let bound = self.total * self.total;
        loop {
            let p = spread * T::standard_normal(rng);
            let amp = self.weights.iter().zip(&self.shifts).fold(Complex::new(T::zero(), T::zero()), |acc, (c, s)| {
                acc + c * Complex::from_polar(T::one(), -p * *s / self.hbar)
            });
            if T::unit_uniform(rng) * bound <= amp.norm_sqr() {
                return p;
            }
        }
    }
}

/// Random stream of one trial: the master key with the trial index as stream id.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Runs every trial. Accepted trials draw both pointer readings from their
/// own stream; the record keeps the position for even acceptance rank and the
/// momentum for odd rank, so the outcome is independent of scheduling.
pub fn simulate<T: Scalar>(config: &WeakSimConfig<T>) -> Result<MeasurementRecord<T>> {
    config.validate()?;
    let branches = Branches::new(config)?;
    let outcomes: Vec<Option<(T, T)>> = (0..config.trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(config.master_seed, i);
            if T::unit_uniform(&mut rng) >= branches.acceptance {
                return None;
            }
            let q = branches.sample_position(&mut rng);
            let p = branches.sample_momentum(&mut rng);
            Some((q, p))
        })
        .collect();
    let mut position_samples = Vec::new();
    let mut momentum_samples = Vec::new();
    for (rank, (q, p)) in outcomes.into_iter().flatten().enumerate() {
        if rank % 2 == 0 {
            position_samples.push(q);
        } else {
            momentum_samples.push(p);
        }
    }
    Ok(MeasurementRecord {
        accepted_trials: position_samples.len() + momentum_samples.len(),
        total_trials: config.trials,
        position_samples,
        momentum_samples,
        config: ConfigEcho {
            coupling: config.coupling,
            pointer_width: config.pointer_width,
            trials: config.trials,
            master_seed: config.master_seed,
            hbar: branches.hbar,
            acceptance_probability: branches.acceptance,
        },
    })
}
