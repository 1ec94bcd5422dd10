use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::scalar::{count, lit, Scalar};

/// A periodic 1-D grid of `dim` points over a ring of length `length`.
///
/// Natural units are the default (`hbar = mass = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HilbertSpec<T> {
    pub dim: usize,
    pub length: T,
    pub hbar: T,
    pub mass: T,
}

impl<T: Scalar> HilbertSpec<T> {
    pub fn new(dim: usize, length: T) -> Result<Self> {
        Self::with_units(dim, length, T::one(), T::one())
    }

    pub fn with_units(dim: usize, length: T, hbar: T, mass: T) -> Result<Self> {
        let spec = HilbertSpec { dim, length, hbar, mass };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(LabError::InvalidSpace(format!("D ≥ 2 required, got D = {}", self.dim)));
        }
        let positive = |v: T| v.is_finite() && v > T::zero();
        if !positive(self.length) {
            return Err(LabError::InvalidSpace(format!("L > 0 required, got L = {}", self.length)));
        }
        if !positive(self.hbar) {
            return Err(LabError::InvalidSpace(format!("hbar > 0 required, got hbar = {}", self.hbar)));
        }
        if !positive(self.mass) {
            return Err(LabError::InvalidSpace(format!("mass > 0 required, got mass = {}", self.mass)));
        }
        Ok(())
    }

    /// Grid spacing `L / D`.
    pub fn dx(&self) -> T {
        self.length / count(self.dim)
    }

    /// Momentum spacing `2 pi hbar / L`.
    pub fn dp(&self) -> T {
        lit::<T>(2.0) * T::PI() * self.hbar / self.length
    }

    /// Largest representable momentum, `pi hbar D / L`.
    pub fn p_max(&self) -> T {
        T::PI() * self.hbar * count(self.dim) / self.length
    }

    /// Position label `x_j = -L/2 + j dx`.
    pub fn position(&self, j: usize) -> T {
        -self.length / lit(2.0) + count::<T>(j) * self.dx()
    }

    /// Signed frequency index in `(-D/2, D/2]` for DFT slot `k`.
    pub fn signed_frequency(&self, k: usize) -> i64 {
        if 2 * k <= self.dim {
            k as i64
        } else {
            k as i64 - self.dim as i64
        }
    }

    /// Momentum label `p_k = k~ dp`.
    pub fn momentum(&self, k: usize) -> T {
        T::from_i64(self.signed_frequency(k)).expect("frequency fits scalar") * self.dp()
    }

    /// DFT slot whose signed frequency is `freq` (taken modulo `D`).
    pub fn momentum_index(&self, freq: i64) -> usize {
        freq.rem_euclid(self.dim as i64) as usize
    }

    /// Grid index closest to position `x`, wrapped onto the ring.
    pub fn nearest_index(&self, x: T) -> usize {
        let offset = ((x + self.length / lit(2.0)) / self.dx()).round();
        let i = offset.to_i64().unwrap_or(0);
        i.rem_euclid(self.dim as i64) as usize
    }

    /// Shortest signed displacement from `from` to `to` on the ring.
    pub fn ring_displacement(&self, from: T, to: T) -> T {
        let mut d = (to - from) % self.length;
        let half = self.length / lit(2.0);
        if d > half {
            d = d - self.length;
        } else if d <= -half {
            d = d + self.length;
        }
        d
    }

    pub fn positions(&self) -> Vec<T> {
        (0..self.dim).map(|j| self.position(j)).collect()
    }

    pub fn momenta(&self) -> Vec<T> {
        (0..self.dim).map(|k| self.momentum(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_specs() {
        let err = HilbertSpec::<f64>::new(1, 1.0).unwrap_err();
        assert!(err.to_string().contains("D ≥ 2"));
        assert!(HilbertSpec::<f64>::new(4, 0.0).is_err());
        assert!(HilbertSpec::<f64>::with_units(4, 1.0, -1.0, 1.0).is_err());
        assert!(HilbertSpec::<f64>::with_units(4, 1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn grid_arithmetic() {
        let s = HilbertSpec::<f64>::new(4, 4.0).unwrap();
        assert_eq!(s.positions(), vec![-2.0, -1.0, 0.0, 1.0]);
        assert_eq!(s.dx(), 1.0);
        assert!((s.dp() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let freqs: Vec<i64> = (0..4).map(|k| s.signed_frequency(k)).collect();
        assert_eq!(freqs, vec![0, 1, 2, -1]);
        let odd = HilbertSpec::<f64>::new(5, 5.0).unwrap();
        let freqs: Vec<i64> = (0..5).map(|k| odd.signed_frequency(k)).collect();
        assert_eq!(freqs, vec![0, 1, 2, -2, -1]);
        assert_eq!(s.momentum_index(-1), 3);
    }

    #[test]
    fn ring_displacement_wraps() {
        let s = HilbertSpec::<f64>::new(8, 10.0).unwrap();
        assert!((s.ring_displacement(4.0, -4.0) - 2.0).abs() < 1e-12);
        assert!((s.ring_displacement(-4.0, 4.0) + 2.0).abs() < 1e-12);
        assert_eq!(s.nearest_index(-5.0), 0);
        assert_eq!(s.nearest_index(0.0), 4);
    }
}
