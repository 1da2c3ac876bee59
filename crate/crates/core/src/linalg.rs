//! Small dense linear-algebra helpers over `nalgebra`.
//!
//! Everything in the toolkit works with tiny matrices (a handful of
//! antennas), so these helpers favour clarity over blocking tricks. Inverses
//! of Hermitian matrices go through the eigendecomposition, which also gives
//! the condition number for free.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

/// Condition numbers above this are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Negative eigenvalues of a PSD matrix within this relative distance of
/// zero are round-off and get clamped.
pub const PSD_CLAMP_TOL: f64 = 1e-12;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// Eigen-decomposition `A = V diag(values) Vᴴ` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

pub fn hermitian_spectrum(a: &CMatrix) -> Result<HermitianSpectrum> {
    if !a.is_square() {
        return Err(Error::Numerical(format!(
            "eigendecomposition of non-square {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.nrows() == 1 {
        return Ok(HermitianSpectrum {
            values: DVector::from_element(1, a[(0, 0)].re),
            vectors: CMatrix::identity(1, 1),
        });
    }
    let eig = SymmetricEigen::try_new(a.clone(), EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numerical("Hermitian eigen-solver did not converge".into()))?;
    Ok(HermitianSpectrum {
        values: eig.eigenvalues,
        vectors: eig.eigenvectors,
    })
}

/// `V diag(f(λ)) Vᴴ` for a Hermitian spectrum.
pub fn spectral_map(spectrum: &HermitianSpectrum, f: impl Fn(f64) -> f64) -> CMatrix {
    let mut scaled = spectrum.vectors.clone();
    for (j, &lambda) in spectrum.values.iter().enumerate() {
        let w = f(lambda);
        scaled.column_mut(j).scale_mut(w);
    }
    &scaled * spectrum.vectors.adjoint()
}

/// `Hᴴ H`.
pub fn gram(h: &CMatrix) -> CMatrix {
    h.adjoint() * h
}

/// Eigenvalues of a PSD Hermitian matrix, with round-off negatives clamped
/// to zero. Genuinely negative eigenvalues are an error.
pub fn psd_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    let spectrum = hermitian_spectrum(a)?;
    clamp_psd(spectrum.values.as_slice())
}

pub(crate) fn clamp_psd(values: &[f64]) -> Result<Vec<f64>> {
    let scale = values.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    values
        .iter()
        .map(|&v| {
            if v >= 0.0 {
                Ok(v)
            } else if v >= -PSD_CLAMP_TOL * scale {
                Ok(0.0)
            } else {
                Err(Error::Numerical(format!(
                    "Gram matrix has negative eigenvalue {v:e}"
                )))
            }
        })
        .collect()
}

/// Inverse of a Hermitian positive-definite matrix, rejecting matrices whose
/// condition number exceeds [`MAX_CONDITION`].
pub fn hermitian_inverse(a: &CMatrix) -> Result<CMatrix> {
    let spectrum = hermitian_spectrum(a)?;
    check_condition(spectrum.values.as_slice())?;
    Ok(spectral_map(&spectrum, |l| 1.0 / l))
}

/// Fails unless every value is positive and `max/min <= MAX_CONDITION`.
pub fn check_condition(values: &[f64]) -> Result<()> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !(lo > 0.0) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Numerical(format!(
            "matrix is not positive definite (smallest eigenvalue {lo:e})"
        )));
    }
    let cond = hi / lo;
    if cond > MAX_CONDITION {
        return Err(Error::Numerical(format!(
            "condition number {cond:e} exceeds {MAX_CONDITION:e}"
        )));
    }
    Ok(())
}

/// `log2 det(A)` for Hermitian positive-definite `A`.
pub fn log2_det_hpd(a: &CMatrix) -> Result<f64> {
    let chol = Cholesky::new(a.clone())
        .ok_or_else(|| Error::Numerical("matrix is not positive definite".into()))?;
    let l = chol.l_dirty();
    let ln_det: f64 = (0..a.nrows()).map(|i| l[(i, i)].re.ln()).sum::<f64>() * 2.0;
    Ok(ln_det / std::f64::consts::LN_2)
}

/// `log2 det(A)` for real symmetric positive-definite `A`.
pub fn log2_det_spd(a: &RMatrix) -> Result<f64> {
    let chol = Cholesky::new(a.clone())
        .ok_or_else(|| Error::Numerical("matrix is not positive definite".into()))?;
    let l = chol.l_dirty();
    let ln_det: f64 = (0..a.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0;
    Ok(ln_det / std::f64::consts::LN_2)
}

/// Solve `A X = B` for real symmetric positive-definite `A`.
pub fn spd_solve(a: &RMatrix, b: &RMatrix) -> Result<RMatrix> {
    let chol = Cholesky::new(a.clone())
        .ok_or_else(|| Error::Numerical("matrix is not positive definite".into()))?;
    Ok(chol.solve(b))
}

/// Real part of the trace of a complex matrix.
pub fn trace_re(a: &CMatrix) -> f64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)].re).sum()
}

/// Sum in a fixed binary tree. Floating-point addition is monotone, and a
/// fixed tree keeps that property for the whole sum: if `a[i] <= b[i]` for
/// every `i` then `pairwise_sum(a) <= pairwise_sum(b)`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise reduction over arbitrary values with a caller-provided `add`.
pub(crate) fn pairwise_reduce<T: Clone>(xs: &[T], add: &impl Fn(&T, &T) -> T) -> Option<T> {
    match xs.len() {
        0 => None,
        1 => Some(xs[0].clone()),
        n => {
            let mid = n / 2;
            let l = pairwise_reduce(&xs[..mid], add)?;
            let r = pairwise_reduce(&xs[mid..], add)?;
            Some(add(&l, &r))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hermitian_inverse_matches_direct_inverse() {
        let a = CMatrix::from_row_slice(2, 2, &[c(4.0, 0.0), c(1.0, 1.0), c(1.0, -1.0), c(3.0, 0.0)]);
        let inv = hermitian_inverse(&a).unwrap();
        let prod = &a * &inv;
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - c(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn ill_conditioned_inverse_is_rejected() {
        let a = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(1e-14, 0.0)]));
        assert!(matches!(hermitian_inverse(&a), Err(Error::Numerical(_))));
        let singular = CMatrix::zeros(2, 2);
        assert!(hermitian_inverse(&singular).is_err());
    }

    #[test]
    fn log2_det_of_diagonal() {
        let a = CMatrix::from_diagonal(&DVector::from_vec(vec![c(2.0, 0.0), c(8.0, 0.0)]));
        assert!((log2_det_hpd(&a).unwrap() - 4.0).abs() < 1e-14);
        let r = RMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 4.0]));
        assert!((log2_det_spd(&r).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn clamp_rejects_real_negatives() {
        assert_eq!(clamp_psd(&[-1e-15, 2.0]).unwrap(), vec![0.0, 2.0]);
        assert!(clamp_psd(&[-1e-3, 2.0]).is_err());
    }

    #[test]
    fn pairwise_sum_is_exact_on_integers() {
        let xs: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}
