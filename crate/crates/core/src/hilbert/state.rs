use num_complex::Complex;
use rand::Rng;

use super::fourier;
use super::space::HilbertSpec;
use crate::error::{LabError, Result};
use crate::scalar::{count, Scalar};

/// A unit ket in position representation.
///
/// Construction always normalizes; the zero vector is rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    amplitudes: Vec<Complex<T>>,
    space: HilbertSpec<T>,
    label: String,
}

impl<T: Scalar> StateVector<T> {
    pub fn new(amplitudes: Vec<Complex<T>>, space: HilbertSpec<T>, label: impl Into<String>) -> Result<Self> {
        if amplitudes.len() != space.dim {
            return Err(LabError::DimensionMismatch { expected: space.dim, found: amplitudes.len() });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LabError::NonFinite("state amplitude".into()));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(LabError::ZeroVector);
        }
        let amplitudes = amplitudes.into_iter().map(|z| z / norm).collect();
        Ok(StateVector { amplitudes, space, label: label.into() })
    }

    pub fn from_real(values: &[T], space: HilbertSpec<T>, label: impl Into<String>) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex::new(v, T::zero())).collect(), space, label)
    }

    /// Grid delta at index `j`.
    pub fn position_eigenstate(space: HilbertSpec<T>, j: usize) -> Result<Self> {
        if j >= space.dim {
            return Err(LabError::IndexOutOfRange { index: j, dim: space.dim });
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); space.dim];
        amps[j] = Complex::new(T::one(), T::zero());
        Ok(StateVector { amplitudes: amps, space, label: format!("x[{j}]") })
    }

    /// Plane wave for DFT slot `k`: `<x_j|p_k> = exp(2 pi i j k / D) / sqrt(D)`.
    pub fn momentum_eigenstate(space: HilbertSpec<T>, k: usize) -> Result<Self> {
        if k >= space.dim {
            return Err(LabError::IndexOutOfRange { index: k, dim: space.dim });
        }
        let d = space.dim;
        let scale = count::<T>(d).sqrt().recip();
        let amps =
            (0..d).map(|j| Complex::from_polar(scale, T::TAU() * count::<T>((j * k) % d) / count::<T>(d))).collect();
        Ok(StateVector { amplitudes: amps, space, label: format!("p[{}]", space.signed_frequency(k)) })
    }

    /// State whose momentum amplitudes `<p_k|psi>` are `coefficients` (normalized afterwards).
    pub fn from_momentum_amplitudes(
        coefficients: &[Complex<T>],
        space: HilbertSpec<T>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if coefficients.len() != space.dim {
            return Err(LabError::DimensionMismatch { expected: space.dim, found: coefficients.len() });
        }
        Self::new(fourier::from_momentum(coefficients), space, label)
    }

    /// Haar-random state from complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(space: HilbertSpec<T>, rng: &mut R) -> Self {
        loop {
            let amps: Vec<Complex<T>> =
                (0..space.dim).map(|_| Complex::new(T::standard_normal(rng), T::standard_normal(rng))).collect();
            if let Ok(s) = Self::new(amps, space, "random") {
                return s;
            }
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn space(&self) -> &HilbertSpec<T> {
        &self.space
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> T {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        inner(self, other)
    }

    /// Momentum amplitudes `<p_k|psi>` in DFT slot order.
    pub fn momentum_amplitudes(&self) -> Vec<Complex<T>> {
        fourier::to_momentum(&self.amplitudes)
    }
}

/// Bracket `<u|v>`.
pub fn inner<T: Scalar>(u: &StateVector<T>, v: &StateVector<T>) -> Result<Complex<T>> {
    if u.dim() != v.dim() {
        return Err(LabError::DimensionMismatch { expected: u.dim(), found: v.dim() });
    }
    Ok(dot(&u.amplitudes, &v.amplitudes))
}

/// `sum_j conj(u_j) v_j` for raw amplitude slices of equal length.
pub(crate) fn dot<T: Scalar>(u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
    u.iter().zip(v).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
}
