//! Spectral primitives: Hermitian eigendecomposition, full SVD, and matrix
//! functions restricted to the support of a positive semidefinite matrix.
//!
//! Everything here is dense and deterministic. Eigenvalues and singular
//! values are reported in non-increasing order; support cutoffs are decided
//! by [`Tolerances::ranktol`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Eigendecomposition of a Hermitian matrix, `M = U diag(eigenvalues) U*`.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    /// Real eigenvalues, sorted non-increasing.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub eigenvectors: Matrix,
}

impl HermitianSpectrum {
    /// Rebuild `U diag(g(lambda)) U*` from a scalar map over the eigenvalues.
    pub fn assemble(&self, g: impl Fn(f64) -> f64) -> Matrix {
        let u = self.eigenvectors.na();
        let n = self.eigenvalues.len();
        let diag = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(g(self.eigenvalues[i]), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Matrix::from_na(u * diag * u.adjoint())
    }
}

/// Full singular value decomposition `x = left diag(singulars) right*`
/// with square unitary factors on both sides.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    /// m x m unitary.
    pub left: Matrix,
    /// min(m, n) singular values, sorted non-increasing.
    pub singulars: Vec<f64>,
    /// n x n unitary.
    pub right: Matrix,
    /// Count of singular values above `ranktol`.
    pub rank: usize,
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Fails with [`Error::NotHermitian`] when `max |M - M*|` exceeds
/// `tol.spectol`, and with [`Error::NonFinite`] on NaN or infinite entries.
pub fn hermitian_eigen(m: &Matrix, tol: &Tolerances) -> Result<HermitianSpectrum> {
    m.check_finite()?;
    let defect = m.hermitian_defect();
    if defect > tol.spectol {
        return Err(Error::NotHermitian(defect));
    }
    // Symmetrize so the decomposition sees an exactly Hermitian input.
    let n = m.rows();
    let sym = DMatrix::from_fn(n, n, |i, j| {
        let a = m.na()[(i, j)];
        let b = m.na()[(j, i)].conj();
        if i == j {
            Complex64::new(a.re, 0.0)
        } else {
            (a + b) * Complex64::new(0.5, 0.0)
        }
    });
    let eig = nalgebra::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .expect("finite eigenvalues")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(HermitianSpectrum {
        eigenvalues,
        eigenvectors: Matrix::from_na(vectors),
    })
}

/// Full SVD with rank detection.
///
/// The thin factors from the underlying decomposition are completed to
/// square unitaries so that callers can change bases on the whole space.
pub fn svd(x: &Matrix, tol: &Tolerances) -> Result<SvdFactors> {
    x.check_finite()?;
    let (m, n) = (x.rows(), x.cols());
    let k = m.min(n);
    let dec = nalgebra::SVD::new_unordered(x.na().clone(), true, true);
    let u_thin = dec.u.expect("requested U");
    let v_t_thin = dec.v_t.expect("requested V^t");

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        dec.singular_values[j]
            .partial_cmp(&dec.singular_values[i])
            .expect("finite singular values")
    });
    let singulars: Vec<f64> = order.iter().map(|&i| dec.singular_values[i]).collect();

    let mut left = DMatrix::zeros(m, k);
    let mut right = DMatrix::zeros(n, k);
    for (dst, &src) in order.iter().enumerate() {
        left.set_column(dst, &u_thin.column(src));
        right.set_column(dst, &v_t_thin.row(src).adjoint());
    }

    let left = complete_unitary(left);
    let right = complete_unitary(right);
    let rank = singulars.iter().filter(|&&s| s > tol.ranktol).count();
    Ok(SvdFactors {
        left: Matrix::from_na(left),
        singulars,
        right: Matrix::from_na(right),
        rank,
    })
}

/// Extend `k` orthonormal columns to a full square unitary by orthogonalizing
/// standard basis vectors against them.
fn complete_unitary(cols: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = cols.nrows();
    let k = cols.ncols();
    let mut full = DMatrix::zeros(n, n);
    for j in 0..k {
        full.set_column(j, &cols.column(j));
    }
    let mut filled = k;
    for cand in 0..n {
        if filled == n {
            break;
        }
        let mut v = DVector::<Complex64>::zeros(n);
        v[cand] = Complex64::new(1.0, 0.0);
        // Two Gram-Schmidt passes keep the completion orthonormal.
        for _ in 0..2 {
            for j in 0..filled {
                let col = full.column(j);
                let coeff: Complex64 = col.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for i in 0..n {
                    v[i] -= coeff * full[(i, j)];
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for i in 0..n {
                full[(i, filled)] = v[i] / Complex64::new(norm, 0.0);
            }
            filled += 1;
        }
    }
    assert_eq!(filled, n, "unitary completion ran out of candidates");
    full
}

/// Apply a scalar function to a Hermitian PSD matrix on its support only:
/// eigenvalues above `ranktol` map through `g`, the kernel maps to zero.
///
/// Eigenvalues in `[-spectol, 0)` are clamped to zero first; anything below
/// `-spectol` is a genuine PSD violation.
pub fn apply_on_support(a: &Matrix, tol: &Tolerances, g: impl Fn(f64) -> f64) -> Result<Matrix> {
    let spec = hermitian_eigen(a, tol)?;
    if let Some(&min) = spec.eigenvalues.last() {
        if min < -tol.spectol {
            return Err(Error::NotPsd(min));
        }
    }
    Ok(spec.assemble(|lam| {
        let lam = lam.max(0.0);
        if lam > tol.ranktol {
            g(lam)
        } else {
            0.0
        }
    }))
}

/// Natural logarithm on the support of a PSD matrix (zero on the kernel).
pub fn log_on_support(a: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    apply_on_support(a, tol, f64::ln)
}

/// Moore-Penrose style inverse on the support of a PSD matrix.
pub fn inverse_on_support(a: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    apply_on_support(a, tol, |lam| 1.0 / lam)
}

/// Orthogonal projector onto the support of a PSD matrix.
pub fn support_projector(a: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    apply_on_support(a, tol, |_| 1.0)
}

/// Kronecker (tensor) product of two matrices.
pub fn tensor(x1: &Matrix, x2: &Matrix) -> Result<Matrix> {
    x1.check_finite()?;
    x2.check_finite()?;
    Ok(x1.kron(x2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Field;
    use num_complex::Complex64;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigen_identity() {
        let spec = hermitian_eigen(&Matrix::identity(2), &tol()).unwrap();
        assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((spec.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_diagonal_sorted() {
        let spec = hermitian_eigen(&Matrix::diagonal(&[0.1, 0.9]), &tol()).unwrap();
        assert!((spec.eigenvalues[0] - 0.9).abs() < 1e-14);
        assert!((spec.eigenvalues[1] - 0.1).abs() < 1e-14);
    }

    #[test]
    fn eigen_rank_one_projector() {
        // Characteristic polynomial by hand: trace 1, det 0 -> eigenvalues 1, 0.
        let m = Matrix::from_real_rows(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let spec = hermitian_eigen(&m, &tol()).unwrap();
        assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!(spec.eigenvalues[1].abs() < 1e-12);
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let m = Matrix::from_real_rows(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            hermitian_eigen(&m, &tol()),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn eigen_rejects_non_finite() {
        let m = Matrix::from_real_rows(1, 1, &[f64::NAN]).unwrap();
        assert!(matches!(hermitian_eigen(&m, &tol()), Err(Error::NonFinite)));
    }

    #[test]
    fn svd_rank_detection() {
        let f = svd(&Matrix::diagonal(&[1.0, 0.0]), &tol()).unwrap();
        assert!((f.singulars[0] - 1.0).abs() < 1e-14);
        assert!(f.singulars[1].abs() < 1e-14);
        assert_eq!(f.rank, 1);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let f2 = svd(&Matrix::identity(2).scale(s), &tol()).unwrap();
        assert!((f2.singulars[0] - s).abs() < 1e-14);
        assert!((f2.singulars[1] - s).abs() < 1e-14);
        assert_eq!(f2.rank, 2);

        let f3 = svd(&Matrix::from_real_rows(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap(), &tol()).unwrap();
        assert!((f3.singulars[0] - 1.0).abs() < 1e-14);
        assert_eq!(f3.rank, 1);
    }

    #[test]
    fn svd_rectangular_reconstructs() {
        let x = Matrix::from_complex_rows(
            3,
            2,
            &[c(0.3, 0.4), c(-1.0, 0.0), c(0.0, 0.2), c(0.5, -0.5), c(2.0, 1.0), c(0.0, 0.0)],
        )
        .unwrap();
        let f = svd(&x, &tol()).unwrap();
        let mut sigma = Matrix::zeros(3, 2);
        for (i, &s) in f.singulars.iter().enumerate() {
            sigma.set(i, i, c(s, 0.0));
        }
        let rebuilt = f.left.mul(&sigma).mul(&f.right.adjoint());
        assert!(rebuilt.sub(&x).max_abs() < 1e-12);
        // Both factors are square unitaries.
        assert!(f.left.gram().sub(&Matrix::identity(3)).max_abs() < 1e-12);
        assert!(f.right.gram().sub(&Matrix::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn log_on_support_examples() {
        let t = tol();
        assert!(log_on_support(&Matrix::identity(2), &t).unwrap().max_abs() < 1e-14);

        let e = std::f64::consts::E;
        let l = log_on_support(&Matrix::diagonal(&[e, 1.0]), &t).unwrap();
        assert!(l.sub(&Matrix::diagonal(&[1.0, 0.0])).max_abs() < 1e-14);

        // Support restriction zeroes the kernel.
        let l2 = log_on_support(&Matrix::diagonal(&[0.5, 0.0]), &t).unwrap();
        assert!(l2.sub(&Matrix::diagonal(&[-(2.0f64.ln()), 0.0])).max_abs() < 1e-14);
    }

    #[test]
    fn inverse_on_support_examples() {
        let t = tol();
        let i2 = Matrix::identity(2);
        assert!(inverse_on_support(&i2, &t).unwrap().sub(&i2).max_abs() < 1e-14);
        let inv = inverse_on_support(&Matrix::diagonal(&[0.5, 0.5]), &t).unwrap();
        assert!(inv.sub(&Matrix::diagonal(&[2.0, 2.0])).max_abs() < 1e-14);
        let pinv = inverse_on_support(&Matrix::diagonal(&[0.5, 0.0]), &t).unwrap();
        assert!(pinv.sub(&Matrix::diagonal(&[2.0, 0.0])).max_abs() < 1e-14);
    }

    #[test]
    fn psd_clamp_and_rejection() {
        let t = tol();
        // Slightly negative eigenvalue within spectol is clamped.
        let nearly = Matrix::diagonal(&[1.0, -0.5e-10]);
        assert!(log_on_support(&nearly, &t).is_ok());
        let bad = Matrix::diagonal(&[1.0, -1.0]);
        assert!(matches!(log_on_support(&bad, &t), Err(Error::NotPsd(_))));
    }

    #[test]
    fn tensor_examples() {
        let i2 = Matrix::identity(2);
        assert!(tensor(&i2, &i2).unwrap().sub(&Matrix::identity(4)).max_abs() < 1e-15);
        let d = Matrix::diagonal(&[1.0, 0.0]);
        let dd = tensor(&d, &d).unwrap();
        assert!(dd.sub(&Matrix::diagonal(&[1.0, 0.0, 0.0, 0.0])).max_abs() < 1e-15);
        assert_eq!(dd.field(), Field::Real);
    }
}
