use crate::error::{LabError, Result};
use crate::hilbert::{BasisSet, StateVector};
use crate::scalar::{lit, Scalar};

use super::kd::overlaps;
use super::value::DEFAULT_EPS_OVERLAP;

/// Residuals of `|P(x|E,p)|^2 P(p|E) = P(p|x) P(x|E)` over the `(x, p)` grid.
///
/// Columns whose momentum has vanishing probability in `E` are excluded;
/// their residuals are reported as zero and listed in `excluded_columns`.
#[derive(Debug, Clone)]
pub struct ErgodicityReport<T> {
    /// `residual[j][k]`, rows over x, columns over p.
    pub residual: Vec<Vec<T>>,
    pub max_residual: T,
    pub p_given_e: Vec<T>,
    /// `p_given_x[j][k] = P(p_k|x_j)`.
    pub p_given_x: Vec<Vec<T>>,
    pub x_given_e: Vec<T>,
    pub excluded_columns: Vec<usize>,
}

pub fn ergodicity_check<T: Scalar>(
    e: &StateVector<T>,
    xb: &BasisSet<T>,
    pb: &BasisSet<T>,
) -> Result<ErgodicityReport<T>> {
    ergodicity_check_with_eps(e, xb, pb, lit(DEFAULT_EPS_OVERLAP))
}

pub fn ergodicity_check_with_eps<T: Scalar>(
    e: &StateVector<T>,
    xb: &BasisSet<T>,
    pb: &BasisSet<T>,
    eps: T,
) -> Result<ErgodicityReport<T>> {
    let ov = overlaps(e, xb, pb)?;
    let n = e.dim();
    let p_given_e: Vec<T> = ov.pe.iter().map(|z| z.norm_sqr()).collect();
    let x_given_e: Vec<T> = ov.xe.iter().map(|z| z.norm_sqr()).collect();
    let p_given_x: Vec<Vec<T>> = (0..n).map(|j| (0..n).map(|k| ov.xp[(j, k)].norm_sqr()).collect()).collect();
    let mut cond_sq = vec![vec![T::zero(); n]; n];
    for k in 0..n {
        if ov.pe[k].norm() < eps {
            continue;
        }
        for (j, row) in cond_sq.iter_mut().enumerate() {
            // P(x|E,p) = <p|x><x|E>/<p|E>
            row[k] = (ov.xp[(j, k)].conj() * ov.xe[j] / ov.pe[k]).norm_sqr();
        }
    }
    let excluded: Vec<bool> = ov.pe.iter().map(|z| z.norm() < eps).collect();
    Ok(assemble(cond_sq, p_given_e, p_given_x, x_given_e, &excluded))
}

/// Evaluates both sides of the ergodicity law from externally supplied
/// probability tables, e.g. a classical phase-space density standing in for
/// `|P(x|E,p)|^2`. Columns with `P(p|E) <= exclusion` are excluded.
pub fn ergodicity_from_probabilities<T: Scalar>(
    cond_sq: Vec<Vec<T>>,
    p_given_e: Vec<T>,
    p_given_x: Vec<Vec<T>>,
    x_given_e: Vec<T>,
    exclusion: T,
) -> Result<ErgodicityReport<T>> {
    let n = x_given_e.len();
    if n == 0 {
        return Err(LabError::EmptyInput);
    }
    let square = |m: &Vec<Vec<T>>| m.len() == n && m.iter().all(|r| r.len() == p_given_e.len());
    if !square(&cond_sq) || !square(&p_given_x) {
        return Err(LabError::DimensionMismatch { expected: n, found: cond_sq.len().min(p_given_x.len()) });
    }
    let excluded: Vec<bool> = p_given_e.iter().map(|&p| p <= exclusion).collect();
    Ok(assemble(cond_sq, p_given_e, p_given_x, x_given_e, &excluded))
}

fn assemble<T: Scalar>(
    cond_sq: Vec<Vec<T>>,
    p_given_e: Vec<T>,
    p_given_x: Vec<Vec<T>>,
    x_given_e: Vec<T>,
    excluded: &[bool],
) -> ErgodicityReport<T> {
    let mut max_residual = T::zero();
    let residual: Vec<Vec<T>> = cond_sq
        .iter()
        .enumerate()
        .map(|(j, row)| {
            row.iter()
                .enumerate()
                .map(|(k, &c)| {
                    if excluded[k] {
                        return T::zero();
                    }
                    let r = (c * p_given_e[k] - p_given_x[j][k] * x_given_e[j]).abs();
                    max_residual = max_residual.max(r);
                    r
                })
                .collect()
        })
        .collect();
    let excluded_columns = excluded.iter().enumerate().filter(|(_, &x)| x).map(|(k, _)| k).collect();
    ErgodicityReport { residual, max_residual, p_given_e, p_given_x, x_given_e, excluded_columns }
}
