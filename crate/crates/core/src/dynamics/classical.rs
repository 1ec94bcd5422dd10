use serde::Serialize;

use super::quadrature::integrate;
use crate::ccp::{ergodicity_from_probabilities, ErgodicityReport};
use crate::error::{LabError, Result};
use crate::hilbert::HilbertSpec;
use crate::scalar::{count, lit, to_f64, Scalar};

const CELL_TOLERANCE: f64 = 1e-12;
const BRANCH_PIECES: usize = 32;
/// Relative kinetic energy below which the turning-point linearization applies.
const SHELL: f64 = 1e-8;

/// Microcanonical density `delta(E - H) / T` of a closed 1-D orbit, reduced
/// to its position marginal on the grid.
#[derive(Debug, Clone, Serialize)]
pub struct ClassicalDensity<T> {
    pub energy: T,
    pub period: T,
    pub turning_points: (T, T),
    /// Cell-averaged `P(x_j|E)`, so that `sum_j marginal[j] * dx = 1`.
    pub marginal: Vec<T>,
    /// Probability of finding the particle in the cell centred on `x_j`.
    pub cell_mass: Vec<T>,
}

fn kinetic<T: Scalar, V: Fn(T) -> T>(potential: &V, energy: T, x: T) -> T {
    energy - potential(x)
}

/// Bisects `E - V` between an allowed point `inside` and a forbidden point `outside`.
fn bisect<T: Scalar, V: Fn(T) -> T>(potential: &V, energy: T, mut inside: T, mut outside: T) -> T {
    for _ in 0..200 {
        let mid = (inside + outside) / lit(2.0);
        if mid == inside || mid == outside {
            break;
        }
        if kinetic(potential, energy, mid) > T::zero() {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    (inside + outside) / lit(2.0)
}

/// Turning points of the orbit through the grid minimum of `V`.
pub fn turning_points<T: Scalar, V: Fn(T) -> T>(potential: &V, energy: T, space: &HilbertSpec<T>) -> Result<(T, T)> {
    space.validate()?;
    if !energy.is_finite() {
        return Err(LabError::NonFinite("energy".into()));
    }
    let xs = space.positions();
    let (j_min, v_min) =
        xs.iter()
            .map(|&x| potential(x))
            .enumerate()
            .fold((0, T::infinity()), |best, (j, v)| if v < best.1 { (j, v) } else { best });
    if !(energy > v_min) {
        return Err(LabError::NoAllowedRegion { energy: to_f64(energy) });
    }
    let right = (j_min + 1..xs.len()).find(|&j| kinetic(potential, energy, xs[j]) <= T::zero());
    let left = (0..j_min).rev().find(|&j| kinetic(potential, energy, xs[j]) <= T::zero());
    let (Some(r), Some(l)) = (right, left) else {
        return Err(LabError::OpenOrbit { energy: to_f64(energy) });
    };
    Ok((bisect(potential, energy, xs[l + 1], xs[l]), bisect(potential, energy, xs[r - 1], xs[r])))
}

/// `f_p(x, E) = sign * sqrt(2 m (E - V(x)))`.
pub fn classical_momentum_branch<T: Scalar, V: Fn(T) -> T>(
    potential: &V,
    energy: T,
    x: T,
    sign: i8,
    space: &HilbertSpec<T>,
) -> Result<T> {
    let v = potential(x);
    let mut k = energy - v;
    // Rounding at a turning point is not a forbidden region.
    let slack = lit::<T>(8.0) * T::epsilon() * energy.abs().max(v.abs());
    if !(k >= -slack) {
        return Err(LabError::ForbiddenRegion { x: to_f64(x), energy: to_f64(energy) });
    }
    k = k.max(T::zero());
    let magnitude = (lit::<T>(2.0) * space.mass * k).sqrt();
    Ok(if sign < 0 { -magnitude } else { magnitude })
}

/// Orbit geometry in the angle variable `x = c + h sin(theta)`, which removes
/// the inverse square-root singularity at both turning points.
struct Orbit<'a, T, V> {
    potential: &'a V,
    energy: T,
    centre: T,
    half_width: T,
    mass: T,
    /// `|V'|` at the left and right turning points.
    slopes: (T, T),
    /// `E - min V` over the orbit.
    depth: T,
}

impl<T: Scalar, V: Fn(T) -> T> Orbit<'_, T, V> {
    fn x(&self, theta: T) -> T {
        self.centre + self.half_width * theta.sin()
    }

    fn theta(&self, x: T) -> T {
        let s = ((x - self.centre) / self.half_width).max(-T::one()).min(T::one());
        s.asin()
    }

    /// `dx/dtheta / v(x(theta))`.
    ///
    /// Within a thin shell around each turning point `E - V` is replaced by
    /// its linearization `|V'| * dist`, with `dist = h cos^2 / (1 + |sin|)`
    /// free of cancellation. This removes the rounding boundary layer left by
    /// a turning point that is only known to the last ulp.
    fn integrand(&self, theta: T) -> T {
        let (s, c) = theta.sin_cos();
        let k = kinetic(self.potential, self.energy, self.centre + self.half_width * s);
        if k < lit::<T>(SHELL) * self.depth {
            let slope = if theta < T::zero() { self.slopes.0 } else { self.slopes.1 };
            return (self.half_width * self.mass * (T::one() + s.abs()) / (lit::<T>(2.0) * slope)).sqrt();
        }
        self.half_width * c / (lit::<T>(2.0) * k / self.mass).sqrt()
    }

    fn time_between(&self, lo: T, hi: T) -> Result<T> {
        if hi <= lo {
            return Ok(T::zero());
        }
        integrate(|th| self.integrand(th), lo, hi, lit(CELL_TOLERANCE))
    }
}

impl<T: Scalar> ClassicalDensity<T> {
    /// Pointwise `P(x|E) = 2 / (T |v(x)|)`; zero outside the orbit.
    pub fn density_at<V: Fn(T) -> T>(&self, potential: &V, x: T, space: &HilbertSpec<T>) -> T {
        let k = kinetic(potential, self.energy, x);
        if !(k > T::zero()) {
            return T::zero();
        }
        lit::<T>(2.0) / (self.period * (lit::<T>(2.0) * k / space.mass).sqrt())
    }

    /// Joint cell probabilities `rho[j][k]` over position cells and DFT momentum
    /// slots. Each position cell is split into short arcs on both momentum
    /// branches, and each arc's time fraction is assigned to the slot nearest
    /// its mid-arc momentum.
    pub fn phase_space_cells<V: Fn(T) -> T>(&self, potential: &V, space: &HilbertSpec<T>) -> Result<Vec<Vec<T>>> {
        let orbit = self.orbit(potential, space);
        let n = space.dim;
        let dx = space.dx();
        let dp = space.dp();
        let mut rho = vec![vec![T::zero(); n]; n];
        for (j, row) in rho.iter_mut().enumerate() {
            let xj = space.position(j);
            let lo = orbit.theta(xj - dx / lit(2.0));
            let hi = orbit.theta(xj + dx / lit(2.0));
            if hi <= lo {
                continue;
            }
            let step = (hi - lo) / count(BRANCH_PIECES);
            for piece in 0..BRANCH_PIECES {
                let a = lo + step * count(piece);
                let frac = orbit.time_between(a, a + step)? / self.period;
                let mid = orbit.x(a + step / lit(2.0));
                for sign in [1i8, -1] {
                    let p = classical_momentum_branch(potential, self.energy, mid, sign, space).unwrap_or(T::zero());
                    let freq = (p / dp).round().to_i64().unwrap_or(0);
                    row[space.momentum_index(freq)] = row[space.momentum_index(freq)] + frac;
                }
            }
        }
        Ok(rho)
    }

    fn orbit<'a, V: Fn(T) -> T>(&self, potential: &'a V, space: &HilbertSpec<T>) -> Orbit<'a, T, V> {
        let (a, b) = self.turning_points;
        let slope = |x: T| {
            let h = lit::<T>(1e-6) * x.abs().max(T::one());
            ((potential(x + h) - potential(x - h)) / (h + h)).abs()
        };
        Orbit {
            potential,
            energy: self.energy,
            centre: (a + b) / lit(2.0),
            half_width: (b - a) / lit(2.0),
            mass: space.mass,
            slopes: (slope(a), slope(b)),
            depth: (self.energy - potential((a + b) / lit(2.0))).abs().max(T::epsilon()),
        }
    }
}

pub fn classical_density<T: Scalar, V: Fn(T) -> T>(
    potential: &V,
    energy: T,
    space: &HilbertSpec<T>,
) -> Result<ClassicalDensity<T>> {
    let turning = turning_points(potential, energy, space)?;
    let mut density = ClassicalDensity {
        energy,
        period: T::zero(),
        turning_points: turning,
        marginal: Vec::new(),
        cell_mass: Vec::new(),
    };
    let orbit = density.orbit(potential, space);
    let half_pi = T::FRAC_PI_2();
    let period = lit::<T>(2.0) * orbit.time_between(-half_pi, half_pi)?;
    let dx = space.dx();
    let cell_mass: Vec<T> = (0..space.dim)
        .map(|j| {
            let xj = space.position(j);
            let lo = orbit.theta(xj - dx / lit(2.0));
            let hi = orbit.theta(xj + dx / lit(2.0));
            Ok(lit::<T>(2.0) * orbit.time_between(lo, hi)? / period)
        })
        .collect::<Result<_>>()?;
    density.period = period;
    density.marginal = cell_mass.iter().map(|&m| m / dx).collect();
    density.cell_mass = cell_mass;
    Ok(density)
}

/// Both sides of the ergodicity law with the classical density standing in
/// for `|P(x|E,p)|^2 P(p|E)` and `P(x|E)`, against the lattice `P(p|x) = 1/D`.
pub fn classical_ergodicity_report<T: Scalar, V: Fn(T) -> T>(
    density: &ClassicalDensity<T>,
    potential: &V,
    space: &HilbertSpec<T>,
) -> Result<ErgodicityReport<T>> {
    let rho = density.phase_space_cells(potential, space)?;
    let n = space.dim;
    let p_given_e: Vec<T> = (0..n).map(|k| rho.iter().map(|row| row[k]).sum()).collect();
    let cond_sq = rho
        .iter()
        .map(|row| {
            row.iter().zip(&p_given_e).map(|(&r, &pe)| if pe > T::zero() { r / pe } else { T::zero() }).collect()
        })
        .collect();
    let uniform = count::<T>(n).recip();
    ergodicity_from_probabilities(cond_sq, p_given_e, vec![vec![uniform; n]; n], density.cell_mass.clone(), T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    fn harmonic(x: f64) -> f64 {
        0.5 * x * x
    }

    fn space() -> HilbertSpec<f64> {
        HilbertSpec::new(256, 16.0).unwrap()
    }

    #[test]
    fn quartic_period_matches_reference() {
        // 4 * sqrt(2) * int_0^1 dx / sqrt(1 - x^4), 50-digit reference quadrature.
        let d = classical_density(&|x: f64| 0.25 * x.powi(4), 1.0, &space()).unwrap();
        assert!((d.period - 5.244115108584239).abs() < 1e-6, "{}", d.period);
        assert!((d.turning_points.1 - SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn oscillator_period_and_centre_density() {
        let s = space();
        let d = classical_density(&harmonic, 1.0, &s).unwrap();
        assert!((d.period - 2.0 * PI).abs() < 1e-9);
        assert!((d.density_at(&harmonic, 0.0, &s) - 1.0 / (PI * SQRT_2)).abs() < 1e-12);
        assert!((d.turning_points.0 + SQRT_2).abs() < 1e-12 && (d.turning_points.1 - SQRT_2).abs() < 1e-12);
        let total: f64 = d.marginal.iter().map(|p| p * s.dx()).sum();
        assert!((total - 1.0).abs() < 1e-6);
        assert!(d.marginal.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn turning_points_scale_with_energy() {
        let s = space();
        for e in [0.1, 2.0, 7.5] {
            let (a, b) = turning_points(&harmonic, e, &s).unwrap();
            assert!((b - (2.0 * e).sqrt()).abs() < 1e-12);
            assert!((a + (2.0 * e).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn errors_for_bad_energies() {
        let s = space();
        assert!(matches!(classical_density(&harmonic, -1.0, &s), Err(LabError::NoAllowedRegion { .. })));
        assert!(matches!(classical_density(&harmonic, 100.0, &s), Err(LabError::OpenOrbit { .. })));
        assert!(matches!(classical_momentum_branch(&harmonic, 1.0, 3.0, 1, &s), Err(LabError::ForbiddenRegion { .. })));
    }

    #[test]
    fn momentum_branch_values() {
        let s = space();
        assert!((classical_momentum_branch(&harmonic, 1.0, 0.0, 1, &s).unwrap() - SQRT_2).abs() < 1e-15);
        assert_eq!(classical_momentum_branch(&harmonic, 1.0, SQRT_2, -1, &s).unwrap().abs(), 0.0);
        for x in [-1.2, -0.3, 0.0, 0.77, 1.39] {
            let p = classical_momentum_branch(&harmonic, 1.0, x, -1, &s).unwrap();
            assert!((p * p / 2.0 + harmonic(x) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn phase_space_cells_recover_the_marginal() {
        let s = HilbertSpec::new(64, 8.0).unwrap();
        let d = classical_density(&harmonic, 1.0, &s).unwrap();
        let rho = d.phase_space_cells(&harmonic, &s).unwrap();
        for (row, m) in rho.iter().zip(&d.cell_mass) {
            assert!((row.iter().sum::<f64>() - m).abs() < 1e-10);
        }
    }
}
