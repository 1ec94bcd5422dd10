use num_complex::Complex;

use super::fourier;
use super::matrix::ComplexMatrix;
use super::space::HilbertSpec;
use super::state::StateVector;
use crate::error::{LabError, Result};
use crate::scalar::{count, lit, Scalar};

/// Threshold below which a matrix is flagged Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct OperatorMatrix<T> {
    entries: ComplexMatrix<T>,
    space: HilbertSpec<T>,
    hermitian: bool,
}

impl<T: Scalar> OperatorMatrix<T> {
    pub fn new(entries: ComplexMatrix<T>, space: HilbertSpec<T>) -> Result<Self> {
        if entries.dim() != space.dim {
            return Err(LabError::DimensionMismatch { expected: space.dim, found: entries.dim() });
        }
        if entries.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LabError::NonFinite("operator entry".into()));
        }
        let hermitian = entries.hermitian_residual() < lit(HERMITIAN_TOLERANCE);
        Ok(OperatorMatrix { entries, space, hermitian })
    }

    pub fn identity(space: HilbertSpec<T>) -> Self {
        OperatorMatrix { entries: ComplexMatrix::identity(space.dim), space, hermitian: true }
    }

    /// `|m><m|`.
    pub fn projector(state: &StateVector<T>) -> Self {
        let a = state.amplitudes();
        let entries = ComplexMatrix::from_fn(a.len(), |r, c| a[r] * a[c].conj());
        OperatorMatrix { entries, space: *state.space(), hermitian: true }
    }

    pub fn entries(&self) -> &ComplexMatrix<T> {
        &self.entries
    }

    pub fn space(&self) -> &HilbertSpec<T> {
        &self.space
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn hermitian_residual(&self) -> T {
        self.entries.hermitian_residual()
    }

    pub(crate) fn require_hermitian(&self) -> Result<()> {
        if self.hermitian {
            Ok(())
        } else {
            let residual = self.hermitian_residual().to_f64().unwrap_or(f64::NAN);
            Err(LabError::NonHermitian { residual })
        }
    }

    pub fn apply(&self, psi: &[Complex<T>]) -> Vec<Complex<T>> {
        self.entries.apply(psi)
    }
}

/// `p^2/2m` built spectrally in the DFT basis plus `V(x_j)` on the diagonal.
///
/// The kinetic block is circulant with first column `IDFT(p_k^2 / 2m) / D`;
/// its spectrum is even in the signed frequency so the block is real.
pub fn discretize_hamiltonian<T: Scalar>(
    space: HilbertSpec<T>,
    potential: impl Fn(T) -> T,
) -> Result<OperatorMatrix<T>> {
    space.validate()?;
    let d = space.dim;
    let values: Vec<T> = space.positions().into_iter().map(&potential).collect();
    if let Some(j) = values.iter().position(|v| !v.is_finite()) {
        return Err(LabError::NonFinite(format!("potential at x = {}", space.position(j))));
    }
    let two_m = lit::<T>(2.0) * space.mass;
    let spectrum: Vec<Complex<T>> =
        (0..d).map(|k| Complex::new(space.momentum(k).powi(2) / two_m, T::zero())).collect();
    // from_momentum scales by 1/sqrt(D); the circulant column needs 1/D overall.
    let column: Vec<T> = fourier::from_momentum(&spectrum).into_iter().map(|z| z.re / count::<T>(d).sqrt()).collect();
    let entries = ComplexMatrix::from_fn(d, |r, c| {
        let mut v = column[(r + d - c) % d];
        if r == c {
            v = v + values[r];
        }
        Complex::new(v, T::zero())
    });
    Ok(OperatorMatrix { entries, space, hermitian: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projector_is_idempotent() {
        let space = HilbertSpec::<f64>::new(3, 1.0).unwrap();
        let m =
            StateVector::new(vec![Complex::new(1.0, 0.0), Complex::new(0.0, 1.0), Complex::new(0.5, -0.5)], space, "m")
                .unwrap();
        let p = OperatorMatrix::projector(&m);
        let pp = p.entries().matmul(p.entries());
        assert!(pp.max_abs_diff(p.entries()) < 1e-15);
        assert!(p.is_hermitian());
    }

    #[test]
    fn non_hermitian_flag() {
        let space = HilbertSpec::<f64>::new(2, 1.0).unwrap();
        let m = ComplexMatrix::from_row_major(2, vec![0.0.into(), 1.0.into(), 0.0.into(), 0.0.into()]);
        let op = OperatorMatrix::new(m, space).unwrap();
        assert!(!op.is_hermitian());
        assert!(matches!(op.require_hermitian(), Err(LabError::NonHermitian { .. })));
    }

    #[test]
    fn hamiltonian_rejects_non_finite_potential() {
        let space = HilbertSpec::<f64>::new(4, 4.0).unwrap();
        let err = discretize_hamiltonian(space, |x| 1.0 / x).unwrap_err();
        assert!(matches!(err, LabError::NonFinite(_)));
    }

    #[test]
    fn hamiltonian_is_hermitian_for_arbitrary_potential() {
        for d in [2usize, 5, 32, 101] {
            let space = HilbertSpec::<f64>::new(d, 7.0).unwrap();
            let h = discretize_hamiltonian(space, |x| x.sin() * 3.0 + x.powi(4)).unwrap();
            assert!(h.hermitian_residual() < 1e-10);
        }
    }
}
