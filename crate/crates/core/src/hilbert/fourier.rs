//! Unitary position <-> momentum transforms on the ring.
//!
//! `<x_j|p_k> = exp(2 pi i j k / D) / sqrt(D)`, so momentum amplitudes are a
//! forward DFT scaled by `1/sqrt(D)` and the inverse is the backward DFT with
//! the same scale.

use num_complex::Complex;

use crate::scalar::{count, Scalar};

pub fn to_momentum<T: Scalar>(position: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut buf = position.to_vec();
    T::fft_in_place(&mut buf, false);
    let scale = count::<T>(buf.len()).sqrt().recip();
    buf.iter_mut().for_each(|z| *z = *z * scale);
    buf
}

pub fn from_momentum<T: Scalar>(momentum: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut buf = momentum.to_vec();
    T::fft_in_place(&mut buf, true);
    let scale = count::<T>(buf.len()).sqrt().recip();
    buf.iter_mut().for_each(|z| *z = *z * scale);
    buf
}
