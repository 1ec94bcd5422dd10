use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::hilbert::StateVector;
use crate::scalar::{lit, Scalar};

/// Default guard on denominators `|<b|a>|`.
pub const DEFAULT_EPS_OVERLAP: f64 = 1e-12;

/// Labels of the three states entering `P(m|a,b)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Context {
    pub m: String,
    pub a: String,
    pub b: String,
}

/// One complex conditional probability and its polar form.
///
/// `value = magnitude * exp(i S / hbar)` with `S` on the principal branch
/// `(-pi hbar, pi hbar]`. A vanishing value carries `S = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CCPValue<T> {
    pub value: Complex<T>,
    pub magnitude: T,
    pub action_phase: T,
    pub hbar: T,
    pub context: Context,
    pub denominator_overlap: Complex<T>,
}

impl<T: Scalar> CCPValue<T> {
    pub fn from_parts(value: Complex<T>, hbar: T, context: Context, denominator_overlap: Complex<T>) -> Self {
        CCPValue {
            value,
            magnitude: value.norm(),
            action_phase: hbar * principal_arg(value),
            hbar,
            context,
            denominator_overlap,
        }
    }

    /// Rebuilds the value from magnitude and action phase.
    pub fn polar(&self) -> Complex<T> {
        Complex::from_polar(self.magnitude, self.action_phase / self.hbar)
    }
}

/// `arg z` mapped onto `(-pi, pi]`, with `arg 0 = 0`.
pub fn principal_arg<T: Scalar>(z: Complex<T>) -> T {
    if z.re == T::zero() && z.im == T::zero() {
        return T::zero();
    }
    let a = z.im.atan2(z.re);
    if a <= -T::PI() {
        T::PI()
    } else {
        a
    }
}

/// `P(m|a,b) = <b|m><m|a> / <b|a>` with the default overlap guard.
pub fn ccp<T: Scalar>(m: &StateVector<T>, a: &StateVector<T>, b: &StateVector<T>) -> Result<CCPValue<T>> {
    ccp_with_eps(m, a, b, lit(DEFAULT_EPS_OVERLAP))
}

pub fn ccp_with_eps<T: Scalar>(
    m: &StateVector<T>,
    a: &StateVector<T>,
    b: &StateVector<T>,
    eps: T,
) -> Result<CCPValue<T>> {
    let ba = b.inner(a)?;
    let bm = b.inner(m)?;
    let ma = m.inner(a)?;
    let value = ratio(bm * ma, ba, eps)?;
    let context = Context { m: m.label().to_owned(), a: a.label().to_owned(), b: b.label().to_owned() };
    Ok(CCPValue::from_parts(value, a.space().hbar, context, ba))
}

/// `numerator / denominator`, refusing denominators below `eps` in modulus.
pub(crate) fn ratio<T: Scalar>(numerator: Complex<T>, denominator: Complex<T>, eps: T) -> Result<Complex<T>> {
    let overlap = denominator.norm();
    if !(overlap >= eps) {
        return Err(LabError::OrthogonalConditions {
            overlap: overlap.to_f64().unwrap_or(0.0),
            eps: eps.to_f64().unwrap_or(0.0),
        });
    }
    Ok(numerator / denominator)
}
