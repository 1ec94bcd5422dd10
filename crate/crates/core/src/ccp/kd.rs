use num_complex::Complex;

use crate::error::{LabError, Result};
use crate::hilbert::{BasisSet, ComplexMatrix, StateVector};
use crate::scalar::Scalar;

/// Kirkwood-Dirac quasiprobability `rho(x,p|E) = <p|x><x|E><E|p>`.
///
/// Rows follow the position basis, columns the momentum basis.
#[derive(Debug, Clone)]
pub struct KDDistribution<T> {
    pub matrix: ComplexMatrix<T>,
    pub generating_state: String,
    pub x_labels: Vec<T>,
    pub p_labels: Vec<T>,
}

impl<T: Scalar> KDDistribution<T> {
    pub fn total(&self) -> Complex<T> {
        self.matrix.as_slice().iter().fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    pub fn row_sums(&self) -> Vec<Complex<T>> {
        let n = self.matrix.dim();
        (0..n).map(|r| self.matrix.row(r).iter().fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)).collect()
    }

    pub fn column_sums(&self) -> Vec<Complex<T>> {
        let n = self.matrix.dim();
        (0..n).map(|c| (0..n).fold(Complex::new(T::zero(), T::zero()), |a, r| a + self.matrix[(r, c)])).collect()
    }
}

/// Overlap tables shared by the distribution and the ergodicity report.
pub(crate) struct Overlaps<T> {
    /// `<x_j|p_k>`
    pub xp: ComplexMatrix<T>,
    /// `<x_j|E>`
    pub xe: Vec<Complex<T>>,
    /// `<p_k|E>`
    pub pe: Vec<Complex<T>>,
}

pub(crate) fn overlaps<T: Scalar>(e: &StateVector<T>, xb: &BasisSet<T>, pb: &BasisSet<T>) -> Result<Overlaps<T>> {
    if xb.dim() != e.dim() || pb.dim() != e.dim() {
        return Err(LabError::DimensionMismatch { expected: e.dim(), found: xb.dim().max(pb.dim()) });
    }
    Ok(Overlaps { xp: xb.transition(pb)?, xe: xb.coefficients(e)?, pe: pb.coefficients(e)? })
}

pub fn kd_distribution<T: Scalar>(e: &StateVector<T>, xb: &BasisSet<T>, pb: &BasisSet<T>) -> Result<KDDistribution<T>> {
    let ov = overlaps(e, xb, pb)?;
    let n = e.dim();
    let matrix = ComplexMatrix::from_fn(n, |j, k| ov.xp[(j, k)].conj() * ov.xe[j] * ov.pe[k].conj());
    Ok(KDDistribution {
        matrix,
        generating_state: e.label().to_owned(),
        x_labels: xb.labels().to_vec(),
        p_labels: pb.labels().to_vec(),
    })
}
