//! Free-particle propagator weak values: continuum closed forms and their
//! lattice counterparts.
//!
//! A raw lattice delta `|x_j>` carries every momentum up to `p_max`, and in a
//! time of order one the fast components circle the ring many times. The
//! numeric routines therefore use band-limited position states: the momentum
//! amplitudes of a delta multiplied by a smooth filter that is flat up to
//! `flat * p_max` and vanishes beyond `zero * p_max`. As long as every
//! stationary momentum sits inside the flat part and every periodic image
//! sits outside the support, the lattice value reproduces the continuum one
//! up to super-polynomially small corrections.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::evolution::apply_free_phases;
use crate::error::{LabError, Result};
use crate::hilbert::{fourier, HilbertSpec};
use crate::scalar::{count, lit, to_f64, Scalar};

pub(crate) fn check_time<T: Scalar>(t: T) -> Result<()> {
    if !(t.is_finite() && t > T::zero()) {
        return Err(LabError::InvalidTime(to_f64(t)));
    }
    Ok(())
}

/// Momentum filter, as fractions of `p_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandLimit<T> {
    pub flat: T,
    pub zero: T,
}

impl<T: Scalar> Default for BandLimit<T> {
    fn default() -> Self {
        BandLimit { flat: lit(0.4), zero: lit(0.6) }
    }
}

impl<T: Scalar> BandLimit<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.flat > T::zero() && self.flat < self.zero && self.zero <= T::one()) {
            return Err(LabError::InvalidParameter(format!(
                "band limit needs 0 < flat < zero <= 1, got flat = {}, zero = {}",
                self.flat, self.zero
            )));
        }
        Ok(())
    }

    /// Filter value at momentum `p`; `C^infinity` in `p`.
    pub fn weight(&self, p: T, p_max: T) -> T {
        let a = self.flat * p_max;
        let b = self.zero * p_max;
        let q = p.abs();
        if q <= a {
            return T::one();
        }
        if q >= b {
            return T::zero();
        }
        let u = (q - a) / (b - a);
        let bump = |s: T| if s > T::zero() { (-s.recip()).exp() } else { T::zero() };
        let (up, down) = (bump(T::one() - u), bump(u));
        up / (up + down)
    }

    fn flat_edge(&self, space: &HilbertSpec<T>) -> T {
        self.flat * space.p_max()
    }

    fn zero_edge(&self, space: &HilbertSpec<T>) -> T {
        self.zero * space.p_max()
    }
}

/// Width of the stationary-phase region in momentum for elapsed time `t`.
fn phase_margin<T: Scalar>(space: &HilbertSpec<T>, t: T) -> T {
    lit::<T>(6.0) * (space.mass * space.hbar / t).sqrt()
}

/// Checks that the kernel for displacement `d` over time `t` is resolved:
/// the direct stationary momentum lies in the flat band and the nearest
/// periodic image lies outside the support.
fn check_kernel<T: Scalar>(space: &HilbertSpec<T>, band: &BandLimit<T>, d: T, t: T) -> Result<()> {
    let margin = phase_margin(space, t);
    let p_s = space.mass * d / t;
    let flat = band.flat_edge(space);
    if p_s.abs() + margin > flat {
        return Err(LabError::OutsideBand { momentum: to_f64(p_s), lower: to_f64(-flat), upper: to_f64(flat) });
    }
    let image = space.mass * (space.length - d.abs()) / t;
    if image - margin < band.zero_edge(space) {
        return Err(LabError::OutsideBand {
            momentum: to_f64(image),
            lower: to_f64(-band.zero_edge(space)),
            upper: to_f64(band.zero_edge(space)),
        });
    }
    Ok(())
}

fn check_displacement<T: Scalar>(d: T, limit: T) -> Result<()> {
    if !(d.abs() < limit) {
        return Err(LabError::WrapAround { displacement: to_f64(d), limit: to_f64(limit) });
    }
    Ok(())
}

fn check_index<T: Scalar>(space: &HilbertSpec<T>, j: usize) -> Result<()> {
    if j >= space.dim {
        return Err(LabError::IndexOutOfRange { index: j, dim: space.dim });
    }
    Ok(())
}

/// Unnormalized momentum amplitudes of the band-limited delta at `x_j`.
pub fn band_limited_position_momenta<T: Scalar>(
    space: &HilbertSpec<T>,
    j: usize,
    band: &BandLimit<T>,
) -> Result<Vec<Complex<T>>> {
    check_index(space, j)?;
    band.validate()?;
    let d = space.dim;
    let scale = count::<T>(d).sqrt().recip();
    let p_max = space.p_max();
    Ok((0..d)
        .map(|k| {
            let w = band.weight(space.momentum(k), p_max) * scale;
            Complex::from_polar(w, -T::TAU() * count::<T>((j * k) % d) / count::<T>(d))
        })
        .collect())
}

/// `U(t)` applied to the band-limited delta at `x_j`, in position amplitudes.
fn evolved_delta<T: Scalar>(space: &HilbertSpec<T>, j: usize, band: &BandLimit<T>, t: T) -> Result<Vec<Complex<T>>> {
    let mut c = band_limited_position_momenta(space, j, band)?;
    apply_free_phases(&mut c, space, t);
    Ok(fourier::from_momentum(&c))
}

/// `sqrt(-i m / (2 pi hbar t)) exp(i m delta^2 / (2 hbar t))` with
/// `delta = x_t - x_0 - p_0 t / m`.
pub fn free_ccp_analytic<T: Scalar>(x_t: T, x_0: T, p_0: T, t: T, space: &HilbertSpec<T>) -> Result<Complex<T>> {
    check_time(t)?;
    let (m, hbar) = (space.mass, space.hbar);
    let delta = x_t - x_0 - p_0 * t / m;
    let prefactor = Complex::new(T::zero(), -m / (T::TAU() * hbar * t)).sqrt();
    Ok(prefactor * Complex::from_polar(T::one(), m * delta * delta / (lit::<T>(2.0) * hbar * t)))
}

/// `sqrt(-i m / (pi hbar T)) exp(i m (x_m - (x_i + x_f)/2)^2 / (hbar T))`.
pub fn midpoint_ccp_analytic<T: Scalar>(x_m: T, x_i: T, x_f: T, t: T, space: &HilbertSpec<T>) -> Result<Complex<T>> {
    check_time(t)?;
    let (m, hbar) = (space.mass, space.hbar);
    let delta = x_m - (x_i + x_f) / lit(2.0);
    let prefactor = Complex::new(T::zero(), -m / (T::PI() * hbar * t)).sqrt();
    Ok(prefactor * Complex::from_polar(T::one(), m * delta * delta / (hbar * t)))
}

/// Lattice weak values `P(x_j | x_0, p_0)` after free evolution for time `t`,
/// divided by `dx`. Built once per `(j_0, k_0, t)` and queried per `j_t`.
#[derive(Debug, Clone)]
pub struct FreeCcpNumeric<T> {
    space: HilbertSpec<T>,
    band: BandLimit<T>,
    j_0: usize,
    k_0: usize,
    t: T,
    values: Vec<Complex<T>>,
}

impl<T: Scalar> FreeCcpNumeric<T> {
    pub fn new(j_0: usize, k_0: usize, t: T, space: HilbertSpec<T>, band: BandLimit<T>) -> Result<Self> {
        space.validate()?;
        check_time(t)?;
        check_index(&space, j_0)?;
        check_index(&space, k_0)?;
        let p_0 = space.momentum(k_0);
        check_displacement(p_0 * t / space.mass, space.length / lit(4.0))?;
        let flat = band.flat_edge(&space);
        if p_0.abs() > flat {
            return Err(LabError::OutsideBand { momentum: to_f64(p_0), lower: to_f64(-flat), upper: to_f64(flat) });
        }

        let d = space.dim;
        let psi = evolved_delta(&space, j_0, &band, t)?;
        let scale = count::<T>(d).sqrt().recip();
        // <p_0|a>; the filter is 1 at p_0.
        let den = Complex::from_polar(scale, -T::TAU() * count::<T>((j_0 * k_0) % d) / count::<T>(d));
        // <p_0|U^dagger(t)|x_j> = exp(i E_0 t / hbar) conj(<x_j|p_0>)
        let e_phase = p_0 * p_0 * t / (lit::<T>(2.0) * space.mass * space.hbar);
        let dx = space.dx();
        let values = psi
            .iter()
            .enumerate()
            .map(|(j, amp)| {
                let bra = Complex::from_polar(scale, e_phase - T::TAU() * count::<T>((j * k_0) % d) / count::<T>(d));
                bra * amp / den / dx
            })
            .collect();
        Ok(FreeCcpNumeric { space, band, j_0, k_0, t, values })
    }

    /// Guarded value at grid point `j_t`.
    pub fn at(&self, j_t: usize) -> Result<Complex<T>> {
        check_index(&self.space, j_t)?;
        let raw = self.space.position(j_t) - self.space.position(self.j_0);
        check_displacement(raw, self.space.length / lit(2.0))?;
        check_kernel(&self.space, &self.band, raw, self.t)?;
        Ok(self.values[j_t])
    }

    /// Every grid value, without the per-point guard.
    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn momentum_index(&self) -> usize {
        self.k_0
    }
}

/// Single guarded lattice value with the default band.
pub fn free_ccp_numeric<T: Scalar>(
    j_t: usize,
    j_0: usize,
    k_0: usize,
    t: T,
    space: &HilbertSpec<T>,
) -> Result<Complex<T>> {
    FreeCcpNumeric::new(j_0, k_0, t, *space, BandLimit::default())?.at(j_t)
}

/// Lattice weak values `P(x_m | x_i, x_f)` for two legs of duration `T`,
/// divided by `dx`.
#[derive(Debug, Clone)]
pub struct MidpointCcpNumeric<T> {
    space: HilbertSpec<T>,
    band: BandLimit<T>,
    j_i: usize,
    j_f: usize,
    t: T,
    values: Vec<Complex<T>>,
}

impl<T: Scalar> MidpointCcpNumeric<T> {
    pub fn new(j_i: usize, j_f: usize, t: T, space: HilbertSpec<T>, band: BandLimit<T>) -> Result<Self> {
        space.validate()?;
        check_time(t)?;
        check_index(&space, j_i)?;
        check_index(&space, j_f)?;
        let total = space.position(j_f) - space.position(j_i);
        check_displacement(total, space.length / lit(4.0))?;
        check_kernel(&space, &band, total, t + t)?;

        let forward = evolved_delta(&space, j_i, &band, t)?;
        // <x_f|U(T)|x_m> = conj(<x_m|U(-T)|x_f>)
        let backward = evolved_delta(&space, j_f, &band, -t)?;
        let mut a = band_limited_position_momenta(&space, j_i, &band)?;
        let b = band_limited_position_momenta(&space, j_f, &band)?;
        apply_free_phases(&mut a, &space, t + t);
        let den = b.iter().zip(&a).fold(Complex::new(T::zero(), T::zero()), |acc, (u, v)| acc + u.conj() * v);
        if den.norm() < lit(crate::ccp::DEFAULT_EPS_OVERLAP) {
            return Err(LabError::OrthogonalConditions {
                overlap: to_f64(den.norm()),
                eps: crate::ccp::DEFAULT_EPS_OVERLAP,
            });
        }
        let dx = space.dx();
        let values = forward.iter().zip(&backward).map(|(f, b)| b.conj() * f / den / dx).collect();
        Ok(MidpointCcpNumeric { space, band, j_i, j_f, t, values })
    }

    /// Guarded value at grid point `j_m`.
    pub fn at(&self, j_m: usize) -> Result<Complex<T>> {
        check_index(&self.space, j_m)?;
        let x_m = self.space.position(j_m);
        let first = x_m - self.space.position(self.j_i);
        let second = self.space.position(self.j_f) - x_m;
        for leg in [first, second] {
            check_displacement(leg, self.space.length / lit(2.0))?;
            check_kernel(&self.space, &self.band, leg, self.t)?;
        }
        Ok(self.values[j_m])
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    /// `sum_m P(x_m|x_i,x_f) dx`; equal to one by construction of the ratio.
    pub fn completeness(&self) -> Complex<T> {
        let dx = self.space.dx();
        self.values.iter().fold(Complex::new(T::zero(), T::zero()), |acc, v| acc + v * dx)
    }
}

pub fn midpoint_ccp_numeric<T: Scalar>(
    j_m: usize,
    j_i: usize,
    j_f: usize,
    t: T,
    space: &HilbertSpec<T>,
) -> Result<Complex<T>> {
    MidpointCcpNumeric::new(j_i, j_f, t, *space, BandLimit::default())?.at(j_m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn grid() -> HilbertSpec<f64> {
        HilbertSpec::new(2048, 80.0).unwrap()
    }

    fn rel(a: Complex<f64>, b: Complex<f64>) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn analytic_free_values() {
        let s = HilbertSpec::<f64>::new(16, 10.0).unwrap();
        let on = free_ccp_analytic(1.5, 0.5, 1.0, 1.0, &s).unwrap();
        assert!((on - Complex::from_polar((0.5 / PI).sqrt(), -FRAC_PI_4)).norm() < 1e-15);
        let off = free_ccp_analytic(2.5, 0.5, 1.0, 1.0, &s).unwrap();
        assert!((off / on - Complex::from_polar(1.0, 0.5)).norm() < 1e-15);
        let heavy = HilbertSpec::with_units(16, 10.0, 1.0, 2.0).unwrap();
        assert!(
            (free_ccp_analytic(0.0, 0.0, 0.0, 0.5, &heavy).unwrap().norm() - 0.797_884_560_802_865_4_f64).abs() < 1e-15
        );
        assert!(matches!(free_ccp_analytic(0.0, 0.0, 0.0, 0.0, &s), Err(LabError::InvalidTime(_))));
    }

    #[test]
    fn analytic_midpoint_values() {
        let s = HilbertSpec::<f64>::new(16, 10.0).unwrap();
        let mid = midpoint_ccp_analytic(1.0, -1.0, 3.0, 1.0, &s).unwrap();
        assert!((mid - Complex::from_polar((1.0 / PI).sqrt(), -FRAC_PI_4)).norm() < 1e-15);
        let off = midpoint_ccp_analytic(2.0, -1.0, 3.0, 1.0, &s).unwrap();
        assert!((off / mid - Complex::from_polar(1.0, 1.0)).norm() < 1e-15);
        assert!(
            (midpoint_ccp_analytic(0.0, 0.0, 0.0, 2.0, &s).unwrap().norm() - 0.398_942_280_401_432_7_f64).abs() < 1e-15
        );
        assert!(midpoint_ccp_analytic(0.0, 0.0, 0.0, -1.0, &s).is_err());
    }

    #[test]
    fn filter_shape() {
        let b = BandLimit::<f64>::default();
        assert_eq!(b.weight(0.3, 1.0), 1.0);
        assert_eq!(b.weight(-0.7, 1.0), 0.0);
        assert!((b.weight(0.5, 1.0) - 0.5).abs() < 1e-15);
        assert!(BandLimit { flat: 0.6, zero: 0.4 }.validate().is_err());
    }

    #[test]
    fn numeric_free_matches_analytic_on_trajectory() {
        let s = grid();
        let j0 = 1024;
        let k0 = s.momentum_index(5);
        let p0 = s.momentum(k0);
        let grid = FreeCcpNumeric::new(j0, k0, 1.0, s, BandLimit::default()).unwrap();
        let x0 = s.position(j0);
        let jt = s.nearest_index(x0 + p0);
        let analytic = free_ccp_analytic(s.position(jt), x0, p0, 1.0, &s).unwrap();
        assert!(rel(grid.at(jt).unwrap(), analytic) < 1e-3);
    }

    #[test]
    fn guards_fire() {
        let s = grid();
        let k_fast = s.momentum_index(300);
        assert!(matches!(
            FreeCcpNumeric::new(1024, k_fast, 1.0, s, BandLimit::default()),
            Err(LabError::WrapAround { .. })
        ));
        let g = FreeCcpNumeric::new(1024, 0, 1.0, s, BandLimit::default()).unwrap();
        assert!(matches!(g.at(1024 + 900), Err(LabError::OutsideBand { .. })));
        assert!(matches!(
            MidpointCcpNumeric::new(100, 1500, 1.0, s, BandLimit::default()),
            Err(LabError::WrapAround { .. })
        ));
    }

    #[test]
    fn midpoint_numeric_and_completeness() {
        // The 2T image needs a longer ring than the single-leg comparison.
        let s = HilbertSpec::<f64>::new(2048, 100.0).unwrap();
        let (ji, jf) = (1024 - 82, 1024 + 82);
        let m = MidpointCcpNumeric::new(ji, jf, 1.0, s, BandLimit::default()).unwrap();
        assert!((m.completeness() - 1.0).norm() < 1e-6);
        let analytic = midpoint_ccp_analytic(s.position(1024), s.position(ji), s.position(jf), 1.0, &s).unwrap();
        assert!(rel(m.at(1024).unwrap(), analytic) < 1e-3);
        let (a, b) = (m.at(1024 - 40).unwrap(), m.at(1024 + 40).unwrap());
        assert!((a - b).norm() < 1e-6 * a.norm());
    }
}
