//! Dense complex/real matrices with the Hilbert-Schmidt inner product.
//!
//! A [`Matrix`] is a dense complex matrix plus a scalar-field tag; a matrix
//! tagged [`Field::Real`] must have exactly zero imaginary parts. The tag
//! decides which scalars may multiply the matrix when it is a member of a
//! subspace basis (complex subspaces admit complex coefficients, real
//! subspaces only real ones).
//!
//! The exchange format is JSON:
//! `{"rows": m, "cols": n, "field": "complex"|"real", "re": [...], "im": [...]}`
//! with entries in row-major order and `"im"` omitted for real matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar field over which a matrix (or subspace) is considered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Complex,
    Real,
}

impl Field {
    /// Field of a product or sum: complex wins.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Real && other == Field::Real {
            Field::Real
        } else {
            Field::Complex
        }
    }
}

/// Dense matrix over the complex numbers, optionally tagged as real.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    data: DMatrix<Complex64>,
    field: Field,
}

impl Matrix {
    /// Wrap an `nalgebra` matrix, inferring the field tag from the entries.
    pub fn from_na(data: DMatrix<Complex64>) -> Matrix {
        let field = if data.iter().all(|z| z.im == 0.0) {
            Field::Real
        } else {
            Field::Complex
        };
        Matrix { data, field }
    }

    /// Wrap an `nalgebra` matrix with an explicit complex tag.
    pub fn from_na_complex(data: DMatrix<Complex64>) -> Matrix {
        Matrix {
            data,
            field: Field::Complex,
        }
    }

    pub fn from_complex_rows(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Matrix> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: format!("{} entries", rows * cols),
                got: format!("{}", entries.len()),
            });
        }
        Ok(Matrix::from_na(DMatrix::from_row_slice(rows, cols, entries)))
    }

    pub fn from_real_rows(rows: usize, cols: usize, entries: &[f64]) -> Result<Matrix> {
        let complex: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Matrix::from_complex_rows(rows, cols, &complex)
    }

    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            data: DMatrix::zeros(rows, cols),
            field: Field::Real,
        }
    }

    pub fn identity(n: usize) -> Matrix {
        Matrix {
            data: DMatrix::identity(n, n),
            field: Field::Real,
        }
    }

    pub fn diagonal(entries: &[f64]) -> Matrix {
        let n = entries.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &d) in entries.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        Matrix {
            data: m,
            field: Field::Real,
        }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_empty(&self) -> bool {
        self.rows() == 0 || self.cols() == 0
    }

    pub fn na(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[(i, j)] = v;
        if v.im != 0.0 {
            self.field = Field::Complex;
        }
    }

    /// Retag as complex (no entry change).
    pub fn into_complex(mut self) -> Matrix {
        self.field = Field::Complex;
        self
    }

    /// Retag as real; fails when some imaginary part is nonzero.
    pub fn into_real(mut self) -> Result<Matrix> {
        let worst = self
            .data
            .iter()
            .map(|z| z.im.abs())
            .fold(0.0f64, f64::max);
        if worst > 0.0 {
            return Err(Error::NotReal(worst));
        }
        self.field = Field::Real;
        Ok(self)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        Matrix {
            data: &self.data + &other.data,
            field: self.field.join(other.field),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        Matrix {
            data: &self.data - &other.data,
            field: self.field.join(other.field),
        }
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            data: &self.data * Complex64::new(s, 0.0),
            field: self.field,
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Matrix {
        Matrix {
            data: &self.data * s,
            field: if s.im == 0.0 { self.field } else { Field::Complex },
        }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        Matrix {
            data: &self.data * &other.data,
            field: self.field.join(other.field),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        Matrix {
            data: self.data.adjoint(),
            field: self.field,
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix {
            data: self.data.transpose(),
            field: self.field,
        }
    }

    pub fn trace(&self) -> Complex64 {
        let mut t = Complex64::new(0.0, 0.0);
        for i in 0..self.rows().min(self.cols()) {
            t += self.data[(i, i)];
        }
        t
    }

    /// Hilbert-Schmidt inner product `Tr[self other*]`.
    pub fn hs_inner(&self, other: &Matrix) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            acc += a * b.conj();
        }
        acc
    }

    /// Squared Hilbert-Schmidt norm `Tr[self self*]`.
    pub fn hs_norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hs_norm(&self) -> f64 {
        self.hs_norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0f64, f64::max)
    }

    /// Kronecker product, `(m1 m2) x (n1 n2)`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        Matrix {
            data: self.data.kronecker(&other.data),
            field: self.field.join(other.field),
        }
    }

    /// `self self*`, which is Hermitian positive semidefinite.
    pub fn gram(&self) -> Matrix {
        let adj = self.data.adjoint();
        Matrix {
            data: &self.data * adj,
            field: self.field,
        }
    }

    /// `self* self` (column Gram matrix).
    pub fn cogram(&self) -> Matrix {
        let adj = self.data.adjoint();
        Matrix {
            data: adj * &self.data,
            field: self.field,
        }
    }

    /// Max-entry norm of the commutator `AB - BA`.
    pub fn commutator_norm(a: &Matrix, b: &Matrix) -> f64 {
        (&a.data * &b.data - &b.data * &a.data)
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max)
    }

    /// Extract the block with rows `r0..r1` and columns `c0..c1` (may be empty).
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        let data = DMatrix::from_fn(r1 - r0, c1 - c0, |i, j| self.data[(r0 + i, c0 + j)]);
        Matrix {
            data,
            field: self.field,
        }
    }

    /// Max deviation from Hermitian symmetry, `max |M - M*|`.
    pub fn hermitian_defect(&self) -> f64 {
        if self.rows() != self.cols() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows() {
            for j in i..self.cols() {
                let d = self.data[(i, j)] - self.data[(j, i)].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }
}

/// Serde shape of the matrix exchange format.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    field: Field,
    re: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    im: Option<Vec<f64>>,
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut re = Vec::with_capacity(self.rows() * self.cols());
        let mut im = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                let z = self.data[(i, j)];
                re.push(z.re);
                im.push(z.im);
            }
        }
        MatrixJson {
            rows: self.rows(),
            cols: self.cols(),
            field: self.field,
            re,
            im: match self.field {
                Field::Real => None,
                Field::Complex => Some(im),
            },
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Matrix, D::Error> {
        use serde::de::Error as DeError;
        let raw = MatrixJson::deserialize(deserializer)?;
        Matrix::try_from_json(raw).map_err(D::Error::custom)
    }
}

impl Matrix {
    fn try_from_json(raw: MatrixJson) -> Result<Matrix> {
        if raw.rows == 0 || raw.cols == 0 {
            return Err(Error::InvalidFormat(
                "rows and cols must be positive".into(),
            ));
        }
        let n = raw.rows * raw.cols;
        if raw.re.len() != n {
            return Err(Error::InvalidFormat(format!(
                "expected {n} entries in \"re\", got {}",
                raw.re.len()
            )));
        }
        let im = match (&raw.field, raw.im) {
            (Field::Real, None) => vec![0.0; n],
            (Field::Real, Some(im)) => {
                if im.iter().any(|&x| x != 0.0) {
                    return Err(Error::InvalidFormat(
                        "matrix tagged real has nonzero \"im\" entries".into(),
                    ));
                }
                if im.len() != n {
                    return Err(Error::InvalidFormat(format!(
                        "expected {n} entries in \"im\", got {}",
                        im.len()
                    )));
                }
                im
            }
            (Field::Complex, Some(im)) => {
                if im.len() != n {
                    return Err(Error::InvalidFormat(format!(
                        "expected {n} entries in \"im\", got {}",
                        im.len()
                    )));
                }
                im
            }
            (Field::Complex, None) => vec![0.0; n],
        };
        let entries: Vec<Complex64> = raw
            .re
            .iter()
            .zip(im.iter())
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        let m = Matrix {
            data: DMatrix::from_row_slice(raw.rows, raw.cols, &entries),
            field: raw.field,
        };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_json_str(s: &str) -> Result<Matrix> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("matrix serialization cannot fail")
    }
}
