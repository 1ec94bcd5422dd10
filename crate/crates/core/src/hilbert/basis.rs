use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use super::space::HilbertSpec;
use super::state::{dot, StateVector};
use crate::error::{LabError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Position,
    Momentum,
    Energy,
    Custom,
}

/// Orthonormal family of states with one physical label per member.
#[derive(Debug, Clone)]
pub struct BasisSet<T> {
    vectors: Vec<StateVector<T>>,
    labels: Vec<T>,
    kind: BasisKind,
}

impl<T: Scalar> BasisSet<T> {
    /// User-supplied basis; checked for orthonormality within `1e-10`.
    pub fn custom(vectors: Vec<StateVector<T>>, labels: Vec<T>) -> Result<Self> {
        Self::checked(vectors, labels, BasisKind::Custom)
    }

    pub(crate) fn checked(vectors: Vec<StateVector<T>>, labels: Vec<T>, kind: BasisKind) -> Result<Self> {
        let dim = vectors.first().map(|v| v.dim()).ok_or(LabError::EmptyInput)?;
        if vectors.len() != dim || labels.len() != dim {
            return Err(LabError::DimensionMismatch { expected: dim, found: vectors.len().min(labels.len()) });
        }
        if vectors.iter().any(|v| v.dim() != dim) {
            return Err(LabError::DimensionMismatch { expected: dim, found: vectors.len() });
        }
        let basis = BasisSet { vectors, labels, kind };
        let residual = basis.orthonormality_residual();
        if !(residual < crate::scalar::lit(1e-10)) {
            return Err(LabError::InvalidParameter(format!("basis is not orthonormal (residual {residual})")));
        }
        Ok(basis)
    }

    pub(crate) fn from_parts_unchecked(vectors: Vec<StateVector<T>>, labels: Vec<T>, kind: BasisKind) -> Self {
        BasisSet { vectors, labels, kind }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    pub fn space(&self) -> &HilbertSpec<T> {
        self.vectors[0].space()
    }

    pub fn vectors(&self) -> &[StateVector<T>] {
        &self.vectors
    }

    pub fn labels(&self) -> &[T] {
        &self.labels
    }

    pub fn get(&self, i: usize) -> Result<&StateVector<T>> {
        self.vectors.get(i).ok_or(LabError::IndexOutOfRange { index: i, dim: self.len() })
    }

    /// All overlaps `<b_i|psi>`.
    pub fn coefficients(&self, psi: &StateVector<T>) -> Result<Vec<Complex<T>>> {
        if psi.dim() != self.dim() {
            return Err(LabError::DimensionMismatch { expected: self.dim(), found: psi.dim() });
        }
        Ok(match self.kind {
            BasisKind::Position => psi.amplitudes().to_vec(),
            BasisKind::Momentum => psi.momentum_amplitudes(),
            _ => self.vectors.iter().map(|b| dot(b.amplitudes(), psi.amplitudes())).collect(),
        })
    }

    /// `M[i][k] = <self_i|other_k>`.
    pub fn transition(&self, other: &BasisSet<T>) -> Result<ComplexMatrix<T>> {
        if other.dim() != self.dim() {
            return Err(LabError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n);
        for k in 0..n {
            let col = self.coefficients(&other.vectors[k])?;
            for (i, z) in col.into_iter().enumerate() {
                m[(i, k)] = z;
            }
        }
        Ok(m)
    }

    /// Matrix whose column `k` holds the position amplitudes of member `k`.
    pub fn change_of_basis(&self) -> ComplexMatrix<T> {
        let n = self.dim();
        ComplexMatrix::from_fn(n, |j, k| self.vectors[k].amplitudes()[j])
    }

    /// `max |<b_i|b_k> - delta_ik|`.
    pub fn orthonormality_residual(&self) -> T {
        let n = self.vectors.len();
        let mut worst = T::zero();
        for i in 0..n {
            for k in i..n {
                let g = dot(self.vectors[i].amplitudes(), self.vectors[k].amplitudes());
                let target = if i == k { T::one() } else { T::zero() };
                worst = worst.max((g - Complex::new(target, T::zero())).norm());
            }
        }
        worst
    }
}

/// Standard unit vectors labelled by `x_j = -L/2 + j dx`.
pub fn make_position_basis<T: Scalar>(space: HilbertSpec<T>) -> Result<BasisSet<T>> {
    space.validate()?;
    let vectors = (0..space.dim).map(|j| StateVector::position_eigenstate(space, j)).collect::<Result<Vec<_>>>()?;
    Ok(BasisSet::from_parts_unchecked(vectors, space.positions(), BasisKind::Position))
}

/// DFT plane waves in slot order; slot 0 is the zero-momentum state.
pub fn make_momentum_basis<T: Scalar>(space: HilbertSpec<T>) -> Result<BasisSet<T>> {
    space.validate()?;
    let vectors = (0..space.dim).map(|k| StateVector::momentum_eigenstate(space, k)).collect::<Result<Vec<_>>>()?;
    Ok(BasisSet::from_parts_unchecked(vectors, space.momenta(), BasisKind::Momentum))
}
