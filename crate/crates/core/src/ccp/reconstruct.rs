use num_complex::Complex;

use crate::error::{LabError, Result};
use crate::hilbert::{BasisSet, StateVector};
use crate::scalar::{lit, Scalar};

use super::value::{ccp_with_eps, ratio, CCPValue, Context, DEFAULT_EPS_OVERLAP};

/// `P(x|E,p)` together with the Born-probability form of its magnitude,
/// `sqrt(P(p|x) P(x|E) / P(p|E))`.
#[derive(Debug, Clone)]
pub struct ActionPhaseDecomposition<T> {
    pub ccp: CCPValue<T>,
    pub born_magnitude: T,
}

pub fn action_phase_decompose<T: Scalar>(
    e: &StateVector<T>,
    x: &StateVector<T>,
    p: &StateVector<T>,
) -> Result<ActionPhaseDecomposition<T>> {
    let ccp = ccp_with_eps(x, e, p, lit(DEFAULT_EPS_OVERLAP))?;
    let p_x = p.inner(x)?.norm_sqr();
    let x_e = x.inner(e)?.norm_sqr();
    let p_e = p.inner(e)?.norm_sqr();
    let born_magnitude = (p_x * x_e / p_e).sqrt();
    Ok(ActionPhaseDecomposition { ccp, born_magnitude })
}

/// Wavefunction rebuilt from the conditional probabilities of one reference
/// momentum: `psi(x) = sqrt(P(p0|E) / P(p0|x)) P(x|E,p0)`.
#[derive(Debug, Clone)]
pub struct Reconstruction<T> {
    /// Amplitudes exactly as the formula yields them.
    pub raw: Vec<Complex<T>>,
    pub normalized: StateVector<T>,
    pub reference_index: usize,
}

pub fn reconstruct_wavefunction<T: Scalar>(
    e: &StateVector<T>,
    xb: &BasisSet<T>,
    pb: &BasisSet<T>,
    ref_index: usize,
) -> Result<Reconstruction<T>> {
    let eps = lit::<T>(DEFAULT_EPS_OVERLAP);
    let p0 = pb.get(ref_index)?;
    let p0_e = p0.inner(e)?;
    if p0_e.norm() < eps {
        return Err(LabError::ZeroReferenceOverlap { overlap: p0_e.norm().to_f64().unwrap_or(0.0) });
    }
    let x_e = xb.coefficients(e)?;
    let x_p0 = xb.coefficients(p0)?;
    let p_e = p0_e.norm_sqr();
    let raw = x_e
        .iter()
        .zip(&x_p0)
        .map(|(xe, xp)| {
            let p0_x = xp.conj();
            let cond = ratio(p0_x * xe, p0_e, eps)?;
            if p0_x.norm() < eps {
                return Err(LabError::OrthogonalConditions {
                    overlap: p0_x.norm().to_f64().unwrap_or(0.0),
                    eps: DEFAULT_EPS_OVERLAP,
                });
            }
            Ok(cond * (p_e / p0_x.norm_sqr()).sqrt())
        })
        .collect::<Result<Vec<_>>>()?;
    let normalized = StateVector::new(raw.clone(), *e.space(), format!("rec({})", e.label()))?;
    Ok(Reconstruction { raw, normalized, reference_index: ref_index })
}

/// Phase `phi` maximizing the overlap of `e^{i phi} target` with `candidate`.
pub fn optimal_global_phase<T: Scalar>(candidate: &[Complex<T>], target: &[Complex<T>]) -> T {
    let s = candidate.iter().zip(target).fold(Complex::new(T::zero(), T::zero()), |acc, (c, t)| acc + c * t.conj());
    s.im.atan2(s.re)
}

/// `max_x |candidate(x) - e^{i phi} target(x)|` at the optimal `phi`.
pub fn deviation_up_to_phase<T: Scalar>(candidate: &[Complex<T>], target: &[Complex<T>]) -> T {
    let rot = Complex::from_polar(T::one(), optimal_global_phase(candidate, target));
    candidate.iter().zip(target).map(|(c, t)| (c - rot * t).norm()).fold(T::zero(), T::max)
}

/// `sum_x P(m|x,p0) P(x|E,p0)`, which telescopes to `P(m|E,p0)`.
pub fn chain_rule_compose<T: Scalar>(
    m: &StateVector<T>,
    e: &StateVector<T>,
    xb: &BasisSet<T>,
    p0: &StateVector<T>,
) -> Result<Complex<T>> {
    let eps = lit::<T>(DEFAULT_EPS_OVERLAP);
    let p0_e = p0.inner(e)?;
    let p0_m = p0.inner(m)?;
    let x_e = xb.coefficients(e)?;
    let x_m = xb.coefficients(m)?;
    let x_p0 = xb.coefficients(p0)?;
    let mut sum = Complex::new(T::zero(), T::zero());
    for j in 0..x_e.len() {
        let p0_x = x_p0[j].conj();
        // P(m|x,p0) = <p0|m><m|x>/<p0|x>,  P(x|E,p0) = <p0|x><x|E>/<p0|E>
        let m_given = ratio(p0_m * x_m[j].conj(), p0_x, eps)?;
        let x_given = ratio(p0_x * x_e[j], p0_e, eps)?;
        sum = sum + m_given * x_given;
    }
    Ok(sum)
}

/// Conditional probabilities `P(x_j|E,p)` for every member of `xb`.
pub fn conditional_profile<T: Scalar>(
    e: &StateVector<T>,
    xb: &BasisSet<T>,
    p: &StateVector<T>,
) -> Result<Vec<CCPValue<T>>> {
    let eps = lit::<T>(DEFAULT_EPS_OVERLAP);
    let p_e = p.inner(e)?;
    let x_e = xb.coefficients(e)?;
    let x_p = xb.coefficients(p)?;
    let hbar = e.space().hbar;
    x_e.iter()
        .zip(&x_p)
        .zip(xb.vectors())
        .map(|((xe, xp), xv)| {
            let value = ratio(xp.conj() * xe, p_e, eps)?;
            let context = Context { m: xv.label().to_owned(), a: e.label().to_owned(), b: p.label().to_owned() };
            Ok(CCPValue::from_parts(value, hbar, context, p_e))
        })
        .collect()
}
