use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::hilbert::{dot_amplitudes, eigensystem, fourier, Eigensystem, HilbertSpec, OperatorMatrix, StateVector};
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionMethod {
    #[default]
    ExactSpectral,
}

#[derive(Debug, Clone)]
pub struct EvolutionSpec<T> {
    pub hamiltonian: OperatorMatrix<T>,
    pub time: T,
    pub method: EvolutionMethod,
}

/// `exp(-i H t / hbar)` from a cached spectral decomposition.
///
/// The cache is built once and only read afterwards, so a propagator can be
/// shared across threads.
#[derive(Debug, Clone)]
pub enum Propagator<T> {
    Dense {
        space: HilbertSpec<T>,
        system: Eigensystem<T>,
    },
    /// Free particle: diagonal in the DFT momentum basis.
    Free {
        space: HilbertSpec<T>,
    },
}

impl<T: Scalar> Propagator<T> {
    pub fn from_hamiltonian(h: &OperatorMatrix<T>) -> Result<Self> {
        Ok(Propagator::Dense { space: *h.space(), system: eigensystem(h)? })
    }

    pub fn free(space: HilbertSpec<T>) -> Result<Self> {
        space.validate()?;
        Ok(Propagator::Free { space })
    }

    pub fn space(&self) -> &HilbertSpec<T> {
        match self {
            Propagator::Dense { space, .. } | Propagator::Free { space } => space,
        }
    }

    /// Applies the propagator to raw position amplitudes (no renormalization).
    pub fn apply(&self, amplitudes: &[Complex<T>], t: T) -> Result<Vec<Complex<T>>> {
        if !t.is_finite() {
            return Err(LabError::InvalidTime(t.to_f64().unwrap_or(f64::NAN)));
        }
        let space = self.space();
        if amplitudes.len() != space.dim {
            return Err(LabError::DimensionMismatch { expected: space.dim, found: amplitudes.len() });
        }
        let hbar = space.hbar;
        Ok(match self {
            Propagator::Dense { system, .. } => {
                let mut out = vec![Complex::new(T::zero(), T::zero()); space.dim];
                for (e, v) in system.energies.iter().zip(system.states.vectors()) {
                    let c = dot_amplitudes(v.amplitudes(), amplitudes) * Complex::from_polar(T::one(), -*e * t / hbar);
                    for (o, a) in out.iter_mut().zip(v.amplitudes()) {
                        *o = *o + c * a;
                    }
                }
                out
            }
            Propagator::Free { space } => {
                let mut c = fourier::to_momentum(amplitudes);
                apply_free_phases(&mut c, space, t);
                fourier::from_momentum(&c)
            }
        })
    }

    pub fn evolve(&self, psi: &StateVector<T>, t: T) -> Result<StateVector<T>> {
        let out = self.apply(psi.amplitudes(), t)?;
        StateVector::new(out, *psi.space(), psi.label().to_owned())
    }
}

/// Multiplies momentum amplitudes by `exp(-i p_k^2 t / (2 m hbar))`.
pub(crate) fn apply_free_phases<T: Scalar>(c: &mut [Complex<T>], space: &HilbertSpec<T>, t: T) {
    let scale = t / (lit::<T>(2.0) * space.mass * space.hbar);
    for (k, z) in c.iter_mut().enumerate() {
        let p = space.momentum(k);
        *z = *z * Complex::from_polar(T::one(), -p * p * scale);
    }
}

pub fn evolve<T: Scalar>(psi: &StateVector<T>, spec: &EvolutionSpec<T>) -> Result<StateVector<T>> {
    match spec.method {
        EvolutionMethod::ExactSpectral => Propagator::from_hamiltonian(&spec.hamiltonian)?.evolve(psi, spec.time),
    }
}
