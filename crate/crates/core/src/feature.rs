//! Fréchet distance between Gaussians fitted to sentence feature vectors.
//!
//! Each corpus is embedded into a fixed-width feature space (one row per
//! sentence), summarized by its mean and covariance, and compared with
//!
//! ```text
//! d = sqrt(|m1 - m2|^2 + Tr(C1 + C2 - 2 (C1 C2)^{1/2}))
//! ```
//!
//! Note the outer square root: the usual FID convention reports `d^2`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Row-major matrix of per-sentence feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    dim: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    /// Fails if `data.len() != rows * dim` or any entry is not finite.
    pub fn new(rows: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        let expected = rows.checked_mul(dim).ok_or(Error::DimensionMismatch(rows, dim))?;
        if data.len() != expected {
            return Err(Error::DimensionMismatch(data.len(), expected));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: i / dim.max(1),
                col: i % dim.max(1),
            });
        }
        Ok(Self { rows, dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch(bad.len(), dim));
        }
        Self::new(rows.len(), dim, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

/// Mean vector and covariance matrix of a feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStats {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl GaussianStats {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Column means and unbiased (`rows - 1`) covariance, symmetrized.
pub fn fit_gaussian(features: &FeatureMatrix) -> Result<GaussianStats> {
    if features.rows < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            got: features.rows,
        });
    }
    let x = DMatrix::from_row_slice(features.rows, features.dim, &features.data);
    let mean = x.row_mean().transpose();
    let mut centered = x;
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let cov = centered.tr_mul(&centered) / (features.rows - 1) as f64;
    let cov = (&cov + cov.transpose()) * 0.5;
    Ok(GaussianStats { mean, cov })
}

/// Numerical settings for the matrix square root.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SqrtOptions {
    /// Fixed diagonal jitter to use instead of `1e-6 * mean(diag)`.
    pub jitter: Option<f64>,
}

/// Eigenvalues below `-NEG_TOLERANCE * λ_max` trigger one jittered retry.
const NEG_TOLERANCE: f64 = 1e-6;
const RELATIVE_JITTER: f64 = 1e-6;

fn eigen(m: DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let dim = m.nrows();
    SymmetricEigen::try_new(m, f64::EPSILON, 1000 * dim.max(10)).ok_or(Error::EigenFailure)
}

/// Square root of a symmetric PSD matrix; negative round-off eigenvalues are
/// clamped to 0.
pub fn psd_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = eigen(m.clone())?;
    let roots = eig.eigenvalues.map(|l| libm::sqrt(l.max(0.0)));
    let v = &eig.eigenvectors;
    let root = v * DMatrix::from_diagonal(&roots) * v.transpose();
    Ok((&root + root.transpose()) * 0.5)
}

/// The symmetric matrix `√C1 · C2 · √C1`, whose square root has the same
/// trace as `(C1 C2)^{1/2}`.
pub fn sandwich(c1: &DMatrix<f64>, c2: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_square(c1, c2)?;
    let s1 = psd_sqrt(c1)?;
    let m = &s1 * c2 * &s1;
    Ok((&m + m.transpose()) * 0.5)
}

fn check_square(c1: &DMatrix<f64>, c2: &DMatrix<f64>) -> Result<()> {
    if !c1.is_square() {
        return Err(Error::DimensionMismatch(c1.nrows(), c1.ncols()));
    }
    if !c2.is_square() {
        return Err(Error::DimensionMismatch(c2.nrows(), c2.ncols()));
    }
    if c1.nrows() != c2.nrows() {
        return Err(Error::DimensionMismatch(c1.nrows(), c2.nrows()));
    }
    Ok(())
}

/// `(trace of sqrt, min eigenvalue, max eigenvalue)` of the sandwich.
fn sqrt_trace_once(c1: &DMatrix<f64>, c2: &DMatrix<f64>) -> Result<(f64, f64, f64)> {
    let eig = eigen(sandwich(c1, c2)?)?;
    let values = eig.eigenvalues;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let trace = values.iter().map(|&l| libm::sqrt(l.max(0.0))).sum();
    Ok((trace, lo, hi))
}

/// `Tr((C1 C2)^{1/2})` for symmetric PSD `c1`, `c2`.
pub fn trace_sqrt_product(c1: &DMatrix<f64>, c2: &DMatrix<f64>) -> Result<f64> {
    trace_sqrt_product_with(c1, c2, SqrtOptions::default())
}

/// [`trace_sqrt_product`] with explicit jitter settings.
///
/// If the decomposition fails, or yields an eigenvalue below
/// `-1e-6 * λ_max`, `ε·I` is added to both matrices and the computation is
/// retried once; remaining small negatives are clamped to 0.
pub fn trace_sqrt_product_with(c1: &DMatrix<f64>, c2: &DMatrix<f64>, opts: SqrtOptions) -> Result<f64> {
    check_square(c1, c2)?;
    if c1.nrows() == 0 {
        return Ok(0.0);
    }
    match sqrt_trace_once(c1, c2) {
        Ok((trace, lo, hi)) if lo >= -NEG_TOLERANCE * hi.abs() => return Ok(trace),
        Ok(_) | Err(Error::EigenFailure) => {}
        Err(e) => return Err(e),
    }
    let eps = opts.jitter.unwrap_or_else(|| {
        let diag_sum = c1.diagonal().sum() + c2.diagonal().sum();
        RELATIVE_JITTER * diag_sum / (2 * c1.nrows()) as f64
    });
    let offset = DMatrix::<f64>::identity(c1.nrows(), c1.ncols()) * eps;
    let (trace, _, _) = sqrt_trace_once(&(c1 + &offset), &(c2 + &offset))?;
    Ok(trace)
}

/// Fréchet (2-Wasserstein) distance between two Gaussians.
pub fn frechet_distance(g1: &GaussianStats, g2: &GaussianStats) -> Result<f64> {
    frechet_distance_with(g1, g2, SqrtOptions::default())
}

pub fn frechet_distance_with(g1: &GaussianStats, g2: &GaussianStats, opts: SqrtOptions) -> Result<f64> {
    if g1.dim() != g2.dim() {
        return Err(Error::DimensionMismatch(g1.dim(), g2.dim()));
    }
    let diff = &g1.mean - &g2.mean;
    let cross = trace_sqrt_product_with(&g1.cov, &g2.cov, opts)?;
    let radicand = diff.norm_squared() + g1.cov.trace() + g2.cov.trace() - 2.0 * cross;
    Ok(libm::sqrt(radicand.max(0.0)))
}

/// Fréchet distance between Gaussians fitted to two feature matrices.
pub fn fbd(a: &FeatureMatrix, b: &FeatureMatrix) -> Result<f64> {
    fbd_with(a, b, SqrtOptions::default())
}

pub fn fbd_with(a: &FeatureMatrix, b: &FeatureMatrix, opts: SqrtOptions) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    frechet_distance_with(&fit_gaussian(a)?, &fit_gaussian(b)?, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn gauss(mean: &[f64], diag: &[f64]) -> GaussianStats {
        GaussianStats {
            mean: DVector::from_column_slice(mean),
            cov: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        }
    }

    #[test]
    fn identical_rows_have_zero_covariance() {
        let f = FeatureMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        let g = fit_gaussian(&f).unwrap();
        assert_eq!(g.mean.as_slice(), &[1.0, 2.0]);
        assert!(g.cov.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn two_point_variance_is_unbiased() {
        let f = FeatureMatrix::from_rows(&[vec![0.0], vec![2.0]]).unwrap();
        let g = fit_gaussian(&f).unwrap();
        assert_eq!(g.mean[0], 1.0);
        assert_eq!(g.cov[(0, 0)], 2.0);
    }

    #[test]
    fn fit_needs_two_rows() {
        let f = FeatureMatrix::from_rows(&[vec![1.0]]).unwrap();
        assert_eq!(fit_gaussian(&f), Err(Error::TooFewRows { needed: 2, got: 1 }));
    }

    #[test]
    fn non_finite_rejected() {
        assert_eq!(
            FeatureMatrix::new(2, 2, vec![0.0, 1.0, f64::NAN, 0.0]),
            Err(Error::NonFinite { row: 1, col: 0 })
        );
        assert!(FeatureMatrix::new(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn trace_sqrt_of_equal_matrices_is_trace() {
        let c = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let t = trace_sqrt_product(&c, &c).unwrap();
        assert!((t - 3.0).abs() < 1e-12);
    }

    #[test]
    fn commuting_diagonals() {
        let t = trace_sqrt_product(&DMatrix::from_element(1, 1, 4.0), &DMatrix::from_element(1, 1, 1.0)).unwrap();
        assert!((t - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let a = DMatrix::<f64>::identity(2, 2);
        let b = DMatrix::<f64>::identity(3, 3);
        assert_eq!(trace_sqrt_product(&a, &b), Err(Error::DimensionMismatch(2, 3)));
        assert!(frechet_distance(&gauss(&[0.0], &[1.0]), &gauss(&[0.0, 0.0], &[1.0, 1.0])).is_err());
    }

    #[test]
    fn closed_form_distances() {
        let same = gauss(&[1.0, -1.0], &[2.0, 3.0]);
        assert!(frechet_distance(&same, &same).unwrap() < 1e-7);
        let d = frechet_distance(&gauss(&[0.0], &[1.0]), &gauss(&[3.0], &[1.0])).unwrap();
        assert!((d - 3.0).abs() < 1e-12);
        let d = frechet_distance(&gauss(&[0.0], &[4.0]), &gauss(&[0.0], &[1.0])).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_covariances_do_not_produce_nan() {
        // Rank-one covariances with many duplicate rows.
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![(i % 2) as f64, (i % 2) as f64, 0.0]).collect();
        let f = FeatureMatrix::from_rows(&rows).unwrap();
        let d = fbd(&f, &f).unwrap();
        assert!(d.is_finite() && d < 1e-6);
    }
}
