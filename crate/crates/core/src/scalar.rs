//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! The physics is written once against [`Scalar`]; `f32` and `f64` plug in
//! through the two backend hooks (dense Hermitian eigensolver and FFT) that
//! need concrete types.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating-point type the laboratory can run on.
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static {
    /// Type name used in result envelopes.
    const NAME: &'static str;

    /// Eigen-decomposition of a dense Hermitian matrix given row-major.
    ///
    /// Returns unsorted eigenvalues and the eigenvectors as columns of a
    /// row-major `dim x dim` matrix. Only the lower triangle is read.
    fn hermitian_eigen(dim: usize, entries: &[Complex<Self>]) -> (Vec<Self>, Vec<Complex<Self>>);

    /// In-place unnormalized DFT. `inverse = false` uses the `exp(-i...)` kernel.
    fn fft_in_place(buffer: &mut [Complex<Self>], inverse: bool);

    /// Sample from the standard normal distribution.
    fn standard_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> Self;

    /// Sample uniformly from `[0, 1)`.
    fn unit_uniform<R: rand::Rng + ?Sized>(rng: &mut R) -> Self;
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Converts a count or index into `T`.
#[inline]
pub fn count<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// Lossy conversion for diagnostics and error payloads.
#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

macro_rules! impl_scalar {
    ($t:ty, $name:literal) => {
        impl Scalar for $t {
            const NAME: &'static str = $name;

            fn hermitian_eigen(dim: usize, entries: &[Complex<Self>]) -> (Vec<Self>, Vec<Complex<Self>>) {
                assert_eq!(entries.len(), dim * dim);
                let real = entries.iter().all(|z| z.im == 0.0);
                if real {
                    let m = nalgebra::DMatrix::<$t>::from_fn(dim, dim, |r, c| entries[r * dim + c].re);
                    let eig = m.symmetric_eigen();
                    let mut vecs = vec![Complex::new(0.0, 0.0); dim * dim];
                    for r in 0..dim {
                        for c in 0..dim {
                            vecs[r * dim + c] = Complex::new(eig.eigenvectors[(r, c)], 0.0);
                        }
                    }
                    (eig.eigenvalues.iter().copied().collect(), vecs)
                } else {
                    let m = nalgebra::DMatrix::<Complex<$t>>::from_fn(dim, dim, |r, c| entries[r * dim + c]);
                    let eig = m.symmetric_eigen();
                    let mut vecs = vec![Complex::new(0.0, 0.0); dim * dim];
                    for r in 0..dim {
                        for c in 0..dim {
                            vecs[r * dim + c] = eig.eigenvectors[(r, c)];
                        }
                    }
                    (eig.eigenvalues.iter().copied().collect(), vecs)
                }
            }

            fn fft_in_place(buffer: &mut [Complex<Self>], inverse: bool) {
                let mut planner = rustfft::FftPlanner::<$t>::new();
                let fft = if inverse {
                    planner.plan_fft_inverse(buffer.len())
                } else {
                    planner.plan_fft_forward(buffer.len())
                };
                fft.process(buffer);
            }

            fn standard_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
                rand_distr::Distribution::<$t>::sample(&rand_distr::StandardNormal, rng)
            }

            fn unit_uniform<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
                rng.random::<$t>()
            }
        }
    };
}

impl_scalar!(f32, "f32");
impl_scalar!(f64, "f64");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_hook_handles_real_and_complex_input() {
        let real = [Complex::new(2.0, 0.0), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)];
        let (mut vals, _) = f64::hermitian_eigen(2, &real);
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(vals, vec![1.0, 2.0]);

        // Pauli-Y has eigenvalues -1, 1.
        let y = [Complex::new(0.0, 0.0), Complex::new(0.0, -1.0), Complex::new(0.0, 1.0), Complex::new(0.0, 0.0)];
        let (mut vals, _) = f64::hermitian_eigen(2, &y);
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fft_round_trip_f32() {
        let mut buf: Vec<Complex<f32>> = (0..8).map(|j| Complex::new(j as f32, 1.0)).collect();
        let orig = buf.clone();
        f32::fft_in_place(&mut buf, false);
        f32::fft_in_place(&mut buf, true);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a / 8.0 - b).norm() < 1e-5);
        }
    }
}
