use std::cmp::Ordering;

use num_complex::Complex;

use super::basis::{BasisKind, BasisSet};
use super::matrix::ComplexMatrix;
use super::operator::OperatorMatrix;
use super::state::StateVector;
use crate::error::Result;
use crate::scalar::{lit, Scalar};

/// Relative width of the magnitude band treated as a tie when fixing phases.
const PHASE_TIE_TOLERANCE: f64 = 1e-8;
/// Relative gap below which consecutive eigenvalues form one degenerate cluster.
const DEGENERACY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Eigensystem<T> {
    pub energies: Vec<T>,
    pub states: BasisSet<T>,
}

impl<T: Scalar> Eigensystem<T> {
    /// `sum_n E_n |E_n><E_n|`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let n = self.energies.len();
        let mut m = ComplexMatrix::zeros(n);
        for (e, v) in self.energies.iter().zip(self.states.vectors()) {
            let a = v.amplitudes();
            for r in 0..n {
                let ar = a[r] * *e;
                for c in 0..n {
                    m[(r, c)] = m[(r, c)] + ar * a[c].conj();
                }
            }
        }
        m
    }

    /// `max |H v - E v|` over all pairs.
    pub fn residual(&self, h: &OperatorMatrix<T>) -> T {
        self.energies
            .iter()
            .zip(self.states.vectors())
            .map(|(e, v)| {
                h.apply(v.amplitudes())
                    .iter()
                    .zip(v.amplitudes())
                    .map(|(hv, a)| (hv - a * *e).norm())
                    .fold(T::zero(), T::max)
            })
            .fold(T::zero(), T::max)
    }
}

/// Ascending spectrum with deterministic eigenvector phases.
///
/// Each eigenvector is rotated so that its largest-magnitude component is
/// real and positive; the lowest index wins among components within a
/// relative `1e-8` of the maximum. Degenerate clusters are ordered
/// lexicographically by their phase-fixed amplitudes.
pub fn eigensystem<T: Scalar>(h: &OperatorMatrix<T>) -> Result<Eigensystem<T>> {
    h.require_hermitian()?;
    let space = *h.space();
    let n = space.dim;
    let (values, vectors) = T::hermitian_eigen(n, h.entries().as_slice());

    let mut pairs: Vec<(T, Vec<Complex<T>>)> = (0..n)
        .map(|c| {
            let col: Vec<Complex<T>> = (0..n).map(|r| vectors[r * n + c]).collect();
            (values[c], fix_phase(col))
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));

    let scale = pairs.iter().map(|p| p.0.abs()).fold(T::one(), T::max);
    let tol = lit::<T>(DEGENERACY_TOLERANCE) * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pairs[end].0 - pairs[end - 1].0 <= tol {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| lexicographic(&a.1, &b.1));
        }
        start = end;
    }

    let mut energies = Vec::with_capacity(n);
    let mut states = Vec::with_capacity(n);
    for (i, (e, v)) in pairs.into_iter().enumerate() {
        energies.push(e);
        states.push(StateVector::new(v, space, format!("E[{i}]"))?);
    }
    let basis = BasisSet::from_parts_unchecked(states, energies.clone(), BasisKind::Energy);
    Ok(Eigensystem { energies, states: basis })
}

fn fix_phase<T: Scalar>(mut v: Vec<Complex<T>>) -> Vec<Complex<T>> {
    let max = v.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    if max == T::zero() {
        return v;
    }
    let floor = max * (T::one() - lit(PHASE_TIE_TOLERANCE));
    let pivot = v.iter().position(|z| z.norm() >= floor).unwrap_or(0);
    let z = v[pivot];
    let rot = z.conj() / z.norm();
    for a in v.iter_mut() {
        *a = *a * rot;
    }
    v[pivot] = Complex::new(v[pivot].norm(), T::zero());
    v
}

fn lexicographic<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.partial_cmp(&y.re).unwrap_or(Ordering::Equal);
        if o != Ordering::Equal {
            return o;
        }
        let o = x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal);
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{discretize_hamiltonian, HilbertSpec};
    use crate::LabError;

    #[test]
    fn diagonal_matrix_sorted() {
        let space = HilbertSpec::<f64>::new(2, 2.0).unwrap();
        let m = ComplexMatrix::from_row_major(2, vec![2.0.into(), 0.0.into(), 0.0.into(), 1.0.into()]);
        let sys = eigensystem(&OperatorMatrix::new(m, space).unwrap()).unwrap();
        assert_eq!(sys.energies, vec![1.0, 2.0]);
        assert_eq!(sys.states.vectors()[0].amplitudes(), &[Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)]);
        assert_eq!(sys.states.vectors()[1].amplitudes(), &[Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)]);
        assert_eq!(sys.states.kind(), BasisKind::Energy);
    }

    #[test]
    fn rejects_non_hermitian() {
        let space = HilbertSpec::<f64>::new(2, 2.0).unwrap();
        let m = ComplexMatrix::from_row_major(2, vec![0.0.into(), 1.0.into(), 0.0.into(), 0.0.into()]);
        let err = eigensystem(&OperatorMatrix::new(m, space).unwrap()).unwrap_err();
        assert!(matches!(err, LabError::NonHermitian { .. }));
    }

    #[test]
    fn free_two_site_spectrum() {
        let space = HilbertSpec::<f64>::new(2, 2.0).unwrap();
        let h = discretize_hamiltonian(space, |_| 0.0).unwrap();
        let sys = eigensystem(&h).unwrap();
        let dp = space.dp();
        assert!(sys.energies[0].abs() < 1e-14);
        assert!((sys.energies[1] - dp * dp / 2.0).abs() < 1e-13);
    }

    #[test]
    fn phase_convention_is_deterministic() {
        let space = HilbertSpec::<f64>::new(6, 3.0).unwrap();
        let m = ComplexMatrix::from_fn(6, |r, c| {
            let base = Complex::new((r + c) as f64 * 0.3, (r as f64 - c as f64) * 0.7);
            if r == c {
                Complex::new(r as f64, 0.0)
            } else {
                base
            }
        });
        let op = OperatorMatrix::new(m, space).unwrap();
        let a = eigensystem(&op).unwrap();
        let b = eigensystem(&op).unwrap();
        for (u, v) in a.states.vectors().iter().zip(b.states.vectors()) {
            assert_eq!(u.amplitudes(), v.amplitudes());
            let max = u.amplitudes().iter().map(|z| z.norm()).fold(0.0, f64::max);
            let pivot = u.amplitudes().iter().find(|z| z.norm() >= max * (1.0 - 1e-8)).unwrap();
            assert_eq!(pivot.im, 0.0);
            assert!(pivot.re > 0.0);
        }
        assert!(a.residual(&op) < 1e-8);
        assert!(a.states.orthonormality_residual() < 1e-9);
    }

    #[test]
    fn degenerate_identity_is_ordered() {
        let space = HilbertSpec::<f64>::new(3, 3.0).unwrap();
        let sys = eigensystem(&OperatorMatrix::identity(space)).unwrap();
        for w in sys.states.vectors().windows(2) {
            assert_ne!(lexicographic(w[0].amplitudes(), w[1].amplitudes()), Ordering::Greater);
        }
    }
}
