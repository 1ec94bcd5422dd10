use num_complex::Complex;

use crate::error::{LabError, Result};
use crate::scalar::{count, Scalar};

use super::value::CCPValue;

/// Non-overlapping block averages; a trailing partial block is dropped.
pub fn coarse_grain<T: Scalar>(values: &[Complex<T>], window: usize) -> Result<Vec<Complex<T>>> {
    if values.is_empty() {
        return Err(LabError::EmptyInput);
    }
    if window == 0 || window > values.len() {
        return Err(LabError::InvalidParameter(format!("window must lie in [1, {}], got {window}", values.len())));
    }
    let w = count::<T>(window);
    Ok(values
        .chunks_exact(window)
        .map(|block| block.iter().fold(Complex::new(T::zero(), T::zero()), |a, b| a + b) / w)
        .collect())
}

pub fn coarse_grain_ccp<T: Scalar>(values: &[CCPValue<T>], window: usize) -> Result<Vec<Complex<T>>> {
    let raw: Vec<Complex<T>> = values.iter().map(|v| v.value).collect();
    coarse_grain(&raw, window)
}

/// Total absolute mass `sum_blocks |sum_{x in block} v(x)|` at a given window.
///
/// At `window = 1` this is `sum |v|`; cancellations inside blocks lower it.
/// Only the cells covered by whole blocks are counted.
pub fn block_mass<T: Scalar>(values: &[Complex<T>], window: usize) -> Result<T> {
    let w = count::<T>(window);
    Ok(coarse_grain(values, window)?.iter().map(|z| z.norm() * w).sum())
}
