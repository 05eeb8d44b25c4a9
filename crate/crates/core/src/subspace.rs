//! Matrix subspaces: orthonormal bases, tangent complements, tensor
//! products, the canonical block form of a pair `(x, y)`, and the local
//! commutativity test.
//!
//! A [`Subspace`] stores an orthonormal basis under `<u, v> = Tr[u v*]` and a
//! scalar-field tag. Over the reals the basis matrices are real and only
//! real coefficients are admitted; this matters for tangent spaces (no `i y`
//! directions) and for the orthogonal-subspace constructions.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::entropy::MatrixPoint;
use crate::error::{Error, Result};
use crate::matrix::{Field, Matrix};
use crate::spectral::svd;

/// A finite-dimensional subspace of `m x n` matrices with an orthonormal basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SubspaceJson", into = "SubspaceJson")]
pub struct Subspace {
    ambient: (usize, usize),
    field: Field,
    basis: Vec<Matrix>,
}

#[derive(Serialize, Deserialize)]
struct SubspaceJson {
    ambient: [usize; 2],
    field: Field,
    basis: Vec<Matrix>,
}

impl From<Subspace> for SubspaceJson {
    fn from(s: Subspace) -> SubspaceJson {
        SubspaceJson {
            ambient: [s.ambient.0, s.ambient.1],
            field: s.field,
            basis: s.basis,
        }
    }
}

impl TryFrom<SubspaceJson> for Subspace {
    type Error = Error;

    fn try_from(raw: SubspaceJson) -> Result<Subspace> {
        let tol = Tolerances::default();
        let s = Subspace {
            ambient: (raw.ambient[0], raw.ambient[1]),
            field: raw.field,
            basis: raw.basis,
        };
        s.validate(&tol)?;
        Ok(s)
    }
}

impl Subspace {
    pub fn ambient(&self) -> (usize, usize) {
        self.ambient
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    /// Check shapes, field tags, and pairwise orthonormality (to 1e-10).
    pub fn validate(&self, _tol: &Tolerances) -> Result<()> {
        if self.basis.is_empty() {
            return Err(Error::EmptyBasis);
        }
        for b in &self.basis {
            if (b.rows(), b.cols()) != self.ambient {
                return Err(Error::ShapeMismatch {
                    expected: format!("{}x{}", self.ambient.0, self.ambient.1),
                    got: format!("{}x{}", b.rows(), b.cols()),
                });
            }
            if self.field == Field::Real && b.field() != Field::Real {
                return Err(Error::FieldMismatch);
            }
        }
        for i in 0..self.basis.len() {
            for j in i..self.basis.len() {
                let g = self.basis[i].hs_inner(&self.basis[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                if (g - Complex64::new(target, 0.0)).norm() > 1e-10 {
                    return Err(Error::InvalidFormat(format!(
                        "basis not orthonormal: <b{i}, b{j}> = {g}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Assemble the element with the given coefficients (complex field) or
    /// real parts only (real field).
    pub fn element(&self, coeffs: &[Complex64]) -> Result<Matrix> {
        if coeffs.len() != self.dim() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} coefficients", self.dim()),
                got: format!("{}", coeffs.len()),
            });
        }
        let mut acc = Matrix::zeros(self.ambient.0, self.ambient.1);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            acc = acc.add(&b.scale_complex(*c));
        }
        if self.field == Field::Real {
            acc.into_real()
        } else {
            Ok(acc)
        }
    }

    /// Coefficients of `m` in the basis, plus the residual norm of the part
    /// outside the span (over the declared scalar field).
    pub fn project(&self, m: &Matrix) -> (Vec<Complex64>, f64) {
        let mut coeffs = Vec::with_capacity(self.dim());
        let mut residual = m.clone();
        for b in &self.basis {
            let mut c = m.hs_inner(b);
            if self.field == Field::Real {
                c = Complex64::new(c.re, 0.0);
            }
            coeffs.push(c);
            residual = residual.sub(&b.scale_complex(c));
        }
        (coeffs, residual.hs_norm())
    }

    /// Membership check against `tol` (projection residual).
    pub fn contains(&self, m: &Matrix, tol: f64) -> bool {
        self.project(m).1 <= tol
    }
}

/// Gram-Schmidt with re-orthogonalization. Vectors whose residual drops
/// below `tol.ranktol` are discarded as dependent.
///
/// For a real subspace every input must be a real matrix.
pub fn orthonormalize(raw: &[Matrix], field: Field, tol: &Tolerances) -> Result<Subspace> {
    if raw.is_empty() {
        return Err(Error::EmptyBasis);
    }
    let ambient = (raw[0].rows(), raw[0].cols());
    let mut basis: Vec<Matrix> = Vec::new();
    for v in raw {
        v.check_finite()?;
        if (v.rows(), v.cols()) != ambient {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{}", ambient.0, ambient.1),
                got: format!("{}x{}", v.rows(), v.cols()),
            });
        }
        if field == Field::Real && v.field() != Field::Real {
            return Err(Error::FieldMismatch);
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let mut c = w.hs_inner(b);
                if field == Field::Real {
                    c = Complex64::new(c.re, 0.0);
                }
                w = w.sub(&b.scale_complex(c));
            }
        }
        let norm = w.hs_norm();
        if norm >= tol.ranktol {
            basis.push(w.scale(1.0 / norm));
        }
    }
    if basis.is_empty() {
        return Err(Error::EmptyBasis);
    }
    Ok(Subspace {
        ambient,
        field,
        basis,
    })
}

/// Span construction that trusts nothing: normalizes and orthogonalizes.
pub fn span(raw: &[Matrix], field: Field, tol: &Tolerances) -> Result<Subspace> {
    orthonormalize(raw, field, tol)
}

/// Orthonormal basis of `x^perp = {y in K : Tr[x y*] = 0}`.
///
/// The complement is taken in coefficient space with a Householder
/// reflection, so exactly `dim K - 1` directions come back.
pub fn orthogonal_complement_at(k: &Subspace, x: &MatrixPoint, tol: &Tolerances) -> Result<Vec<Matrix>> {
    let (coeffs, residual) = k.project(x.matrix());
    if residual > 1e-9 {
        return Err(Error::NotInSubspace(residual));
    }
    let dim = k.dim();
    if dim == 1 {
        return Ok(Vec::new());
    }
    let c = DVector::from_vec(coeffs);
    // Householder vector sending c to a multiple of e1.
    let alpha = {
        let c0 = c[0];
        let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if c0.norm() > 0.0 {
            -(c0 / Complex64::new(c0.norm(), 0.0)) * norm
        } else {
            Complex64::new(norm, 0.0)
        }
    };
    let mut w = c.clone();
    w[0] -= alpha;
    let wnorm2: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    let mut out = Vec::with_capacity(dim - 1);
    for j in 1..dim {
        // Column j of the Householder unitary H = I - 2 w w* / |w|^2;
        // columns 2..dim are orthonormal and orthogonal to c.
        let mut col = DVector::<Complex64>::zeros(dim);
        col[j] = Complex64::new(1.0, 0.0);
        if wnorm2 > 0.0 {
            let coeff = 2.0 * w[j].conj() / Complex64::new(wnorm2, 0.0);
            for i in 0..dim {
                col[i] -= coeff * w[i];
            }
        }
        let coeffs: Vec<Complex64> = col.iter().copied().collect();
        out.push(k.element(&coeffs)?);
    }
    let _ = tol;
    Ok(out)
}

/// Tensor product subspace with basis `{b_i (x) c_j}` in `i`-major order.
pub fn tensor_subspace(k1: &Subspace, k2: &Subspace) -> Result<Subspace> {
    if k1.field != k2.field {
        return Err(Error::FieldMismatch);
    }
    let mut basis = Vec::with_capacity(k1.dim() * k2.dim());
    for b in &k1.basis {
        for c in &k2.basis {
            basis.push(b.kron(c));
        }
    }
    Ok(Subspace {
        ambient: (k1.ambient.0 * k2.ambient.0, k1.ambient.1 * k2.ambient.1),
        field: k1.field,
        basis,
    })
}

/// The pair `(x, y)` after the SVD-aligned change of bases: `u x v` is
/// diagonal with the singular values of `x` in the leading `r x r` block,
/// and `u y v` is partitioned at `r = rank x`.
#[derive(Debug, Clone, Serialize)]
pub struct CanonicalBlocks {
    pub rank: usize,
    /// `r x r` diagonal of singular values `d_1 >= ... >= d_r > 0`.
    pub x11: Matrix,
    pub y11: Matrix,
    /// `r x (n - r)`; may be empty.
    pub y12: Matrix,
    /// `(m - r) x r`; may be empty.
    pub y21: Matrix,
    /// `(m - r) x (n - r)`; may be empty. Nonzero entries here are exactly
    /// the directions along which the second derivative of the entropy
    /// blows up.
    pub y22: Matrix,
    /// Left change of basis (`u x v` is the diagonal form).
    pub u: Matrix,
    /// Right change of basis.
    pub v: Matrix,
}

/// Compute the canonical block form of `(x, y)` from the SVD of `x`.
pub fn canonical_blocks(x: &MatrixPoint, y: &Matrix, tol: &Tolerances) -> Result<CanonicalBlocks> {
    y.check_finite()?;
    let xm = x.matrix();
    if (y.rows(), y.cols()) != (xm.rows(), xm.cols()) {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", xm.rows(), xm.cols()),
            got: format!("{}x{}", y.rows(), y.cols()),
        });
    }
    let f = svd(xm, tol)?;
    let r = f.rank;
    if r == 0 {
        return Err(Error::ZeroMatrix);
    }
    let u = f.left.adjoint();
    let v = f.right;
    let (m, n) = (xm.rows(), xm.cols());
    let w = u.mul(y).mul(&v);
    let mut x11 = Matrix::zeros(r, r);
    for i in 0..r {
        x11.set(i, i, Complex64::new(f.singulars[i], 0.0));
    }
    Ok(CanonicalBlocks {
        rank: r,
        x11,
        y11: w.block(0, r, 0, r),
        y12: w.block(0, r, r, n),
        y21: w.block(r, m, 0, r),
        y22: w.block(r, m, r, n),
        u,
        v,
    })
}

/// Whether the second directional derivative of the von Neumann entropy at
/// `x` along `y` stays finite: true exactly when the `y22` block vanishes.
pub fn second_derivative_finite(x: &MatrixPoint, y: &Matrix, tol: &Tolerances) -> Result<bool> {
    let blocks = canonical_blocks(x, y, tol)?;
    Ok(blocks.y22.max_abs() <= tol.ranktol)
}

/// One violating direction in a commutativity report.
#[derive(Debug, Clone, Serialize)]
pub struct CommutativityWitness {
    /// Index into the tangent basis of `x^perp`.
    pub index: usize,
    /// `max |x x* . x y* - x y* . x x*|` for that direction.
    pub commutator_norm: f64,
}

/// Outcome of [`local_commutativity_check`].
#[derive(Debug, Clone, Serialize)]
pub struct CommutativityReport {
    pub holds: bool,
    pub witnesses: Vec<CommutativityWitness>,
    /// Per-direction diagnostics from the canonical block form: the
    /// equivalent conditions `y21 = 0` and `[x11 x11*, x11 y11*] = 0`.
    pub block_diagnostics: Vec<BlockCommutativity>,
}

/// Block-form view of the commutativity condition for one direction.
#[derive(Debug, Clone, Serialize)]
pub struct BlockCommutativity {
    pub index: usize,
    pub y21_max: f64,
    pub block_commutator_norm: f64,
}

/// Test whether `x x*` commutes with `x y*` for every tangent direction `y`
/// of `x^perp` in `K`, in max-entry norm against `tol.comtol`.
///
/// The block diagnostics report the equivalent conditions obtained from the
/// canonical form (`y21 = 0` plus commutation of the leading blocks).
pub fn local_commutativity_check(
    k: &Subspace,
    x: &MatrixPoint,
    tol: &Tolerances,
) -> Result<CommutativityReport> {
    let directions = orthogonal_complement_at(k, x, tol)?;
    let gram = x.matrix().gram();
    let mut witnesses = Vec::new();
    let mut block_diagnostics = Vec::new();
    for (index, y) in directions.iter().enumerate() {
        let xy = x.matrix().mul(&y.adjoint());
        let norm = Matrix::commutator_norm(&gram, &xy);
        if norm > tol.comtol {
            witnesses.push(CommutativityWitness {
                index,
                commutator_norm: norm,
            });
        }
        let blocks = canonical_blocks(x, y, tol)?;
        let x11x11 = blocks.x11.gram();
        let x11y11 = blocks.x11.mul(&blocks.y11.adjoint());
        block_diagnostics.push(BlockCommutativity {
            index,
            y21_max: blocks.y21.max_abs(),
            block_commutator_norm: Matrix::commutator_norm(&x11x11, &x11y11),
        });
    }
    Ok(CommutativityReport {
        holds: witnesses.is_empty(),
        witnesses,
        block_diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerances;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_complex_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Matrix {
        let entries: Vec<Complex64> = (0..m * n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Matrix::from_complex_rows(m, n, &entries).unwrap()
    }

    #[test]
    fn orthonormalize_drops_dependent() {
        let t = tol();
        let i2 = Matrix::identity(2);
        let k = orthonormalize(&[i2.clone(), i2.scale(2.0)], Field::Complex, &t).unwrap();
        assert_eq!(k.dim(), 1);
    }

    #[test]
    fn orthonormalize_keeps_orthogonal_pair() {
        let t = tol();
        let i2 = Matrix::identity(2);
        let j = Matrix::from_real_rows(2, 2, &[0.0, 1.0, -1.0, 0.0]).unwrap();
        let k = orthonormalize(&[i2, j], Field::Real, &t).unwrap();
        assert_eq!(k.dim(), 2);
        k.validate(&t).unwrap();
    }

    #[test]
    fn five_random_2x2_span_dimension_four() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let raw: Vec<Matrix> = (0..5).map(|_| random_complex_matrix(&mut rng, 2, 2)).collect();
        // Gram-matrix oracle: the span has dimension rank of the Gram matrix.
        let mut gram = Matrix::zeros(5, 5);
        for i in 0..5 {
            for j in 0..5 {
                gram.set(i, j, raw[i].hs_inner(&raw[j]));
            }
        }
        let spec = crate::spectral::hermitian_eigen(&gram, &t).unwrap();
        let gram_rank = spec.eigenvalues.iter().filter(|&&l| l > 1e-9).count();
        let k = orthonormalize(&raw, Field::Complex, &t).unwrap();
        assert_eq!(k.dim(), gram_rank);
        assert_eq!(k.dim(), 4);
    }

    #[test]
    fn complement_simple_cases() {
        let t = tol();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let i2 = Matrix::identity(2).scale(s);
        let j = Matrix::from_real_rows(2, 2, &[0.0, 1.0, -1.0, 0.0])
            .unwrap()
            .scale(s);
        let k = orthonormalize(&[i2.clone(), j.clone()], Field::Real, &t).unwrap();
        let x = MatrixPoint::normalized(i2.clone()).unwrap();
        let comp = orthogonal_complement_at(&k, &x, &t).unwrap();
        assert_eq!(comp.len(), 1);
        // Up to sign this is J/sqrt(2).
        let overlap = comp[0].hs_inner(&j).norm();
        assert!((overlap - 1.0).abs() < 1e-12);

        let k1 = orthonormalize(&[i2.clone()], Field::Real, &t).unwrap();
        assert!(orthogonal_complement_at(&k1, &x, &t).unwrap().is_empty());
    }

    #[test]
    fn complement_random_dims() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let raw: Vec<Matrix> = (0..4).map(|_| random_complex_matrix(&mut rng, 3, 3)).collect();
        let k = orthonormalize(&raw, Field::Complex, &t).unwrap();
        assert_eq!(k.dim(), 4);
        let coeffs: Vec<Complex64> = (0..4)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let x = MatrixPoint::normalized(k.element(&coeffs).unwrap()).unwrap();
        let comp = orthogonal_complement_at(&k, &x, &t).unwrap();
        assert_eq!(comp.len(), 3);
        for (i, a) in comp.iter().enumerate() {
            assert!(a.hs_inner(x.matrix()).norm() < 1e-10);
            for b in comp.iter().skip(i + 1) {
                assert!(a.hs_inner(b).norm() < 1e-10);
            }
            assert!((a.hs_norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn complement_rejects_outsiders() {
        let t = tol();
        let k = orthonormalize(&[Matrix::identity(2)], Field::Complex, &t).unwrap();
        let outside = MatrixPoint::normalized(Matrix::diagonal(&[1.0, -1.0])).unwrap();
        assert!(matches!(
            orthogonal_complement_at(&k, &outside, &t),
            Err(Error::NotInSubspace(_))
        ));
    }

    #[test]
    fn tensor_subspace_dims_and_identity() {
        let t = tol();
        let i2 = Matrix::identity(2);
        let j = Matrix::from_real_rows(2, 2, &[0.0, 1.0, -1.0, 0.0]).unwrap();
        let k2 = orthonormalize(&[i2.clone(), j], Field::Real, &t).unwrap();
        let k4 = tensor_subspace(&k2, &k2).unwrap();
        assert_eq!(k4.dim(), 4);
        k4.validate(&t).unwrap();

        let k1 = orthonormalize(&[i2], Field::Real, &t).unwrap();
        let kk = tensor_subspace(&k1, &k1).unwrap();
        assert_eq!(kk.dim(), 1);
        let overlap = kk.basis()[0].hs_inner(&Matrix::identity(4).scale(0.5)).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_subspace_field_mismatch() {
        let t = tol();
        let real = orthonormalize(&[Matrix::identity(2)], Field::Real, &t).unwrap();
        let cplx = orthonormalize(&[Matrix::identity(2)], Field::Complex, &t).unwrap();
        assert!(matches!(tensor_subspace(&real, &cplx), Err(Error::FieldMismatch)));
    }

    #[test]
    fn canonical_blocks_examples() {
        let t = tol();
        let x = MatrixPoint::normalized(Matrix::diagonal(&[1.0, 0.0])).unwrap();

        let blocks = canonical_blocks(&x, &Matrix::from_real_rows(2, 2, &[0.0, 0.0, 0.0, 1.0]).unwrap(), &t)
            .unwrap();
        assert_eq!(blocks.rank, 1);
        assert!((blocks.y22.max_abs() - 1.0).abs() < 1e-12);

        let swap = Matrix::from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let blocks2 = canonical_blocks(&x, &swap, &t).unwrap();
        assert!((blocks2.y12.max_abs() - 1.0).abs() < 1e-12);
        assert!((blocks2.y21.max_abs() - 1.0).abs() < 1e-12);
        assert!(blocks2.y22.max_abs() < 1e-12);

        // Full-rank x: y22 is empty, the second derivative is always finite.
        let full = MatrixPoint::normalized(Matrix::identity(2)).unwrap();
        let blocks3 = canonical_blocks(&full, &swap, &t).unwrap();
        assert!(blocks3.y22.is_empty());
        assert!(second_derivative_finite(&full, &swap, &t).unwrap());
    }

    #[test]
    fn canonical_blocks_round_trip() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let m = rng.gen_range(2..=4);
            let n = rng.gen_range(2..=4);
            let x = MatrixPoint::normalized(random_complex_matrix(&mut rng, m, n)).unwrap();
            let y = random_complex_matrix(&mut rng, m, n);
            let b = canonical_blocks(&x, &y, &t).unwrap();
            let r = b.rank;

            // u x v reproduces the diagonal form.
            let uxv = b.u.mul(x.matrix()).mul(&b.v);
            let mut expected = Matrix::zeros(m, n);
            for i in 0..r {
                expected.set(i, i, b.x11.get(i, i));
            }
            assert!(uxv.sub(&expected).max_abs() < 1e-9);

            // Reassembling the blocks gives u y v; pulling back gives y.
            let mut w = Matrix::zeros(m, n).into_complex();
            for i in 0..m {
                for j in 0..n {
                    let v = if i < r && j < r {
                        b.y11.get(i, j)
                    } else if i < r {
                        b.y12.get(i, j - r)
                    } else if j < r {
                        b.y21.get(i - r, j)
                    } else {
                        b.y22.get(i - r, j - r)
                    };
                    w.set(i, j, v);
                }
            }
            let back = b.u.adjoint().mul(&w).mul(&b.v.adjoint());
            assert!(back.sub(&y).max_abs() < 1e-12);
        }
    }

    #[test]
    fn second_derivative_finite_cases() {
        let t = tol();
        let x = MatrixPoint::normalized(Matrix::diagonal(&[1.0, 0.0])).unwrap();
        assert!(!second_derivative_finite(&x, &Matrix::diagonal(&[0.0, 1.0]), &t).unwrap());
        let swap = Matrix::from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(second_derivative_finite(&x, &swap, &t).unwrap());
    }

    #[test]
    fn commutativity_diagonal_subspace_holds() {
        let t = tol();
        let e1 = Matrix::diagonal(&[1.0, 0.0]);
        let e2 = Matrix::diagonal(&[0.0, 1.0]);
        let k = orthonormalize(&[e1, e2], Field::Complex, &t).unwrap();
        let x = MatrixPoint::normalized(Matrix::diagonal(&[0.9f64.sqrt(), 0.1f64.sqrt()])).unwrap();
        let report = local_commutativity_check(&k, &x, &t).unwrap();
        assert!(report.holds);
        assert!(report.witnesses.is_empty());
    }

    #[test]
    fn commutativity_flat_spectrum_degenerate_case() {
        // x x* is proportional to the identity, so it commutes with anything:
        // the check holds even though the subspace looks asymmetric.
        let t = tol();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let i2 = Matrix::identity(2).scale(s);
        let e12 = Matrix::from_real_rows(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let k = orthonormalize(&[i2.clone(), e12], Field::Complex, &t).unwrap();
        let x = MatrixPoint::normalized(i2).unwrap();
        let report = local_commutativity_check(&k, &x, &t).unwrap();
        assert!(report.holds);
        assert!(report.witnesses.is_empty());
    }

    #[test]
    fn commutativity_structured_family_holds() {
        // Directions with diagonal y11, zero y21, arbitrary y12 commute.
        let t = tol();
        let x = MatrixPoint::normalized(Matrix::diagonal(&[0.9f64.sqrt(), 0.1f64.sqrt(), 0.0])).unwrap();
        let d1 = Matrix::diagonal(&[1.0, 0.0, 0.0]);
        let d2 = Matrix::diagonal(&[0.0, 1.0, 0.0]);
        let mut e13 = Matrix::zeros(3, 3);
        e13.set(0, 2, c(1.0, 0.0));
        let mut e23 = Matrix::zeros(3, 3);
        e23.set(1, 2, c(1.0, 0.0));
        let k = orthonormalize(&[d1, d2, e13, e23], Field::Complex, &t).unwrap();
        assert_eq!(k.dim(), 4);
        let report = local_commutativity_check(&k, &x, &t).unwrap();
        assert!(report.holds, "witnesses: {:?}", report.witnesses);
        for d in &report.block_diagnostics {
            assert!(d.y21_max < 1e-10);
            assert!(d.block_commutator_norm < 1e-10);
        }
    }

    #[test]
    fn lemma_block_equivalence_random_instances() {
        // Commutator test and block test agree for rank-deficient x.
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut agree = 0usize;
        let total = 1000usize;
        for iter in 0..total {
            let m = rng.gen_range(2..=4usize);
            let n = rng.gen_range(2..=4usize);
            let r = rng.gen_range(1..m.min(n).max(2)).min(m.min(n) - 1).max(1);
            // Build x of rank r < min(m, n).
            let a = random_complex_matrix(&mut rng, m, r);
            let b = random_complex_matrix(&mut rng, r, n);
            let x = MatrixPoint::normalized(a.mul(&b)).unwrap();
            // Half the instances get a commuting-by-construction direction.
            let y = if iter % 2 == 0 {
                random_complex_matrix(&mut rng, m, n)
            } else {
                let blocks = canonical_blocks(&x, &random_complex_matrix(&mut rng, m, n), &t).unwrap();
                // Diagonal y11, zero y21 in canonical coordinates.
                let mut w = Matrix::zeros(m, n).into_complex();
                for i in 0..blocks.rank {
                    w.set(i, i, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                }
                for i in 0..blocks.rank {
                    for j in blocks.rank..n {
                        w.set(i, j, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                    }
                }
                blocks.u.adjoint().mul(&w).mul(&blocks.v.adjoint())
            };
            let gram = x.matrix().gram();
            let xy = x.matrix().mul(&y.adjoint());
            let commutes = Matrix::commutator_norm(&gram, &xy) <= t.comtol;

            let blocks = canonical_blocks(&x, &y, &t).unwrap();
            let x11x11 = blocks.x11.gram();
            let x11y11 = blocks.x11.mul(&blocks.y11.adjoint());
            let block_ok = blocks.y21.max_abs() <= t.comtol
                && Matrix::commutator_norm(&x11x11, &x11y11) <= t.comtol;
            if commutes == block_ok {
                agree += 1;
            }
        }
        assert_eq!(agree, total);
    }

    #[test]
    fn subspace_json_round_trip() {
        let t = tol();
        let i2 = Matrix::identity(2);
        let j = Matrix::from_real_rows(2, 2, &[0.0, 1.0, -1.0, 0.0]).unwrap();
        let k = orthonormalize(&[i2, j], Field::Real, &t).unwrap();
        let s = serde_json::to_string(&k).unwrap();
        let back: Subspace = serde_json::from_str(&s).unwrap();
        assert_eq!(back.dim(), 2);
        assert_eq!(back.field(), Field::Real);
        // Non-orthonormal bases are rejected on input.
        let bad = r#"{"ambient":[2,2],"field":"real","basis":[
            {"rows":2,"cols":2,"field":"real","re":[1.0,0.0,0.0,1.0]},
            {"rows":2,"cols":2,"field":"real","re":[1.0,0.0,0.0,1.0]}]}"#;
        assert!(serde_json::from_str::<Subspace>(bad).is_err());
    }
}
