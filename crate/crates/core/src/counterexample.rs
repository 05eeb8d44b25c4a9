//! Real orthogonal subspaces and the additivity violation they produce.
//!
//! A subspace of real `m x m` matrices is *orthogonal* when every nonzero
//! element is a scalar multiple of an orthogonal matrix. Containing the
//! identity, such a subspace is spanned by `I` together with a family of
//! skew-symmetric orthogonal pairwise-anticommuting matrices, and its
//! maximal dimension is the Radon-Hurwitz number `rho(m)`. Every unit
//! element has a flat singular spectrum, so the minimum entropy over the
//! subspace is exactly `ln m` - which is what makes products of two such
//! subspaces beat additivity by `ln 2`.
//!
//! The generators are built from the classical Clifford tensor recursion
//! over the 2x2 seeds
//!
//! ```text
//! R = [[0, 1], [-1, 0]]   S = [[1, 0], [0, -1]]   T = [[0, 1], [1, 0]]
//! ```
//!
//! with the period-8 step `fam(16 m) = {I (x) E_j} U {Q (x) W}` where `E` is
//! the eight-generator family on R^16 and `W = E_1 ... E_8`. All entries are
//! in `{-1, 0, 1}` and the family invariants are validated exactly.

use serde::Serialize;

use crate::config::Tolerances;
use crate::entropy::{vn_entropy, MatrixPoint};
use crate::error::{Error, Result};
use crate::matrix::{Field, Matrix};
use crate::optimize::{optimize_entropy, OptimizerConfig};
use crate::subspace::{orthonormalize, tensor_subspace, Subspace};

/// Radon-Hurwitz number `rho(m) = 2^d + 8c` where `m = 2^b odd` and
/// `b = 4c + d` with `d` in `{0, 1, 2, 3}`.
pub fn radon_hurwitz(m: usize) -> usize {
    assert!(m >= 1, "m must be positive");
    let b = m.trailing_zeros() as usize;
    let c = b / 4;
    let d = b % 4;
    (1 << d) + 8 * c
}

/// A family of `k - 1` skew-symmetric orthogonal pairwise-anticommuting
/// real `m x m` matrices (the generators of a `k`-dimensional orthogonal
/// subspace once the identity is added).
#[derive(Debug, Clone)]
pub struct OrthogonalFamily {
    pub m: usize,
    pub generators: Vec<Matrix>,
}

impl OrthogonalFamily {
    /// Validate the defining invariants exactly up to 1e-12 (the entries are
    /// signed integers, so these hold to machine precision by construction).
    pub fn validate(&self) -> Result<()> {
        let id = Matrix::identity(self.m);
        for (i, q) in self.generators.iter().enumerate() {
            if (q.rows(), q.cols()) != (self.m, self.m) {
                return Err(Error::InvalidFamily(format!("generator {i} has wrong shape")));
            }
            if q.field() != Field::Real {
                return Err(Error::InvalidFamily(format!("generator {i} is not real")));
            }
            let orth = q.mul(&q.transpose()).sub(&id).max_abs();
            if orth > 1e-12 {
                return Err(Error::InvalidFamily(format!(
                    "generator {i} is not orthogonal (defect {orth:.3e})"
                )));
            }
            let skew = q.transpose().add(q).max_abs();
            if skew > 1e-12 {
                return Err(Error::InvalidFamily(format!(
                    "generator {i} is not skew-symmetric (defect {skew:.3e})"
                )));
            }
            for (j, p) in self.generators.iter().enumerate().skip(i + 1) {
                let anti = q.mul(p).add(&p.mul(q)).max_abs();
                if anti > 1e-12 {
                    return Err(Error::InvalidFamily(format!(
                        "generators {i} and {j} do not anticommute (defect {anti:.3e})"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn seed_r() -> Matrix {
    Matrix::from_real_rows(2, 2, &[0.0, 1.0, -1.0, 0.0]).unwrap()
}

fn seed_s() -> Matrix {
    Matrix::diagonal(&[1.0, -1.0])
}

fn seed_t() -> Matrix {
    Matrix::from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
}

/// Maximal generator family on dimension `2^b`; yields `rho(2^b) - 1`
/// generators for every `b`.
fn power_of_two_family(b: usize) -> Vec<Matrix> {
    let (r, s, t) = (seed_r(), seed_s(), seed_t());
    match b {
        0 => Vec::new(),
        1 => vec![r],
        2 => vec![r.kron(&s), r.kron(&t), Matrix::identity(2).kron(&r)],
        3 => {
            // Two mutually commuting anticommuting triples on R^4 (left and
            // right quaternion multiplications) glued with the 2x2 seeds.
            let left = [r.kron(&s), r.kron(&t), Matrix::identity(2).kron(&r)];
            let right = [s.kron(&r), t.kron(&r), r.kron(&Matrix::identity(2))];
            let mut out = vec![r.kron(&Matrix::identity(4))];
            out.extend(left.iter().map(|q| s.kron(q)));
            out.extend(right.iter().map(|q| t.kron(q)));
            out
        }
        4 => {
            let mut out = vec![r.kron(&Matrix::identity(8))];
            out.extend(power_of_two_family(3).iter().map(|q| s.kron(q)));
            out
        }
        _ => {
            // Period-8 step: eight fresh generators on the R^16 factor plus
            // the smaller family tensored with the volume element W, which
            // is symmetric, orthogonal, squares to +I, and anticommutes
            // with each E_j.
            let e = power_of_two_family(4);
            let mut w = Matrix::identity(16);
            for q in &e {
                w = w.mul(q);
            }
            let small_dim = 1usize << (b - 4);
            let mut out: Vec<Matrix> = e
                .iter()
                .map(|q| Matrix::identity(small_dim).kron(q))
                .collect();
            out.extend(power_of_two_family(b - 4).iter().map(|q| q.kron(&w)));
            out
        }
    }
}

/// Construct `k - 1` anticommuting skew-symmetric orthogonal `m x m`
/// matrices. Requires `m` even and `2 <= k <= rho(m)`.
pub fn anticommuting_family(m: usize, k: usize) -> Result<OrthogonalFamily> {
    if m == 0 || m % 2 == 1 {
        return Err(Error::OddDimension(m));
    }
    let rho = radon_hurwitz(m);
    if k < 2 || k > rho {
        return Err(Error::DimensionTooSmall {
            m,
            requested: k,
            limit: rho,
        });
    }
    let b = m.trailing_zeros() as usize;
    let odd = m >> b;
    let pow_family = power_of_two_family(b);
    debug_assert_eq!(pow_family.len(), rho - 1);
    let generators: Vec<Matrix> = pow_family
        .into_iter()
        .take(k - 1)
        .map(|q| {
            if odd == 1 {
                q
            } else {
                q.kron(&Matrix::identity(odd))
            }
        })
        .collect();
    let family = OrthogonalFamily { m, generators };
    family.validate()?;
    Ok(family)
}

/// The orthogonal subspace `span{I, Q_1, ..., Q_{k-1}} / sqrt(m)` spanned by
/// a validated family. Every unit element has all singular values equal to
/// `1/sqrt(m)`, so its entropy is `ln m`.
pub fn orthogonal_subspace(family: &OrthogonalFamily) -> Result<Subspace> {
    family.validate()?;
    let scale = 1.0 / (family.m as f64).sqrt();
    let mut raw = vec![Matrix::identity(family.m).scale(scale)];
    raw.extend(family.generators.iter().map(|q| q.scale(scale)));
    let tol = Tolerances::default();
    let k = orthonormalize(&raw, Field::Real, &tol)?;
    if k.dim() != family.generators.len() + 1 {
        return Err(Error::InvalidFamily(format!(
            "family spans dimension {} instead of {}",
            k.dim(),
            family.generators.len() + 1
        )));
    }
    Ok(k)
}

/// Report of [`real_gap_demo`].
#[derive(Debug, Clone, Serialize)]
pub struct GapDemoReport {
    pub m1: usize,
    pub m2: usize,
    /// `ln m1`, the exact minimum entropy of the first orthogonal subspace.
    pub h1: f64,
    /// `ln m2` for the second.
    pub h2: f64,
    /// Entropy of the explicit witness, `ln(m1 m2 / 2)`.
    pub upper_bound_h12: f64,
    /// Optimizer estimate over the tensor subspace (an upper bound too).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer_h12: Option<f64>,
    /// `h1 + h2 - min(upper_bound_h12, optimizer_h12)`, at least `ln 2`.
    pub gap: f64,
    pub witness: Matrix,
}

/// Demonstrate the real additivity violation for a pair of even dimensions.
///
/// Builds `K_i = span{I, Q_i} / sqrt(m_i)` from single skew orthogonal
/// generators and evaluates the witness
/// `x = (Q_1 (x) Q_2 + I) / sqrt(2 m_1 m_2)`, which is unit-norm with
/// `m_1 m_2 / 2` nonzero singular values all equal to `sqrt(2 / (m_1 m_2))`,
/// hence entropy `ln(m_1 m_2 / 2)`. With `H(K_i) = ln m_i` the additivity
/// gap is at least `ln 2`. Optionally cross-checks with the optimizer.
pub fn real_gap_demo(
    m1: usize,
    m2: usize,
    optimizer: Option<&OptimizerConfig>,
    tol: &Tolerances,
) -> Result<GapDemoReport> {
    let fam1 = anticommuting_family(m1, 2)?;
    let fam2 = anticommuting_family(m2, 2)?;
    let q1 = &fam1.generators[0];
    let q2 = &fam2.generators[0];

    let n = m1 * m2;
    let witness_raw = q1.kron(q2).add(&Matrix::identity(n));
    let witness = witness_raw.scale(1.0 / ((2 * n) as f64).sqrt());
    let norm = witness.hs_norm_sq();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized {
            what: "Tr[x x*]",
            value: norm,
            expected: 1.0,
        });
    }
    // Spectrum check: Q1 (x) Q2 is symmetric with eigenvalues +-1 in equal
    // multiplicity, so the witness has n/2 singular values sqrt(2/n) and
    // n/2 zeros.
    let expected_sv = (2.0 / n as f64).sqrt();
    let svd = crate::spectral::svd(&witness, tol)?;
    for (i, &s) in svd.singulars.iter().enumerate() {
        let target = if i < n / 2 { expected_sv } else { 0.0 };
        if (s - target).abs() > 1e-10 {
            return Err(Error::InvalidFamily(format!(
                "witness singular value {i} is {s}, expected {target}"
            )));
        }
    }

    let point = MatrixPoint::from_unit(witness.clone(), tol)?;
    let upper_bound_h12 = vn_entropy(&point, tol)?;

    let h1 = (m1 as f64).ln();
    let h2 = (m2 as f64).ln();

    let optimizer_h12 = match optimizer {
        Some(cfg) => {
            let k1 = orthogonal_subspace(&fam1)?;
            let k2 = orthogonal_subspace(&fam2)?;
            let k12 = tensor_subspace(&k1, &k2)?;
            Some(optimize_entropy(&k12, cfg, tol)?.best_value)
        }
        None => None,
    };

    let h12 = match optimizer_h12 {
        Some(o) => o.min(upper_bound_h12),
        None => upper_bound_h12,
    };
    Ok(GapDemoReport {
        m1,
        m2,
        h1,
        h2,
        upper_bound_h12,
        optimizer_h12,
        gap: h1 + h2 - h12,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn radon_hurwitz_values() {
        // 2^d + 8c for m = 2^(4c+d) odd.
        let cases = [
            (1, 1),
            (2, 2),
            (3, 1),
            (4, 4),
            (6, 2),
            (8, 8),
            (12, 4),
            (16, 9),
            (32, 10),
            (64, 12),
            (128, 16),
            (256, 17),
        ];
        for (m, rho) in cases {
            assert_eq!(radon_hurwitz(m), rho, "rho({m})");
        }
    }

    #[test]
    fn family_m2_is_rotation() {
        let fam = anticommuting_family(2, 2).unwrap();
        assert_eq!(fam.generators.len(), 1);
        assert!(fam.generators[0].sub(&seed_r()).max_abs() < 1e-15);
    }

    #[test]
    fn family_m4_full() {
        let fam = anticommuting_family(4, 4).unwrap();
        assert_eq!(fam.generators.len(), 3);
        fam.validate().unwrap();
    }

    #[test]
    fn family_limits() {
        assert!(matches!(
            anticommuting_family(2, 3),
            Err(Error::DimensionTooSmall { limit: 2, .. })
        ));
        assert!(matches!(anticommuting_family(3, 2), Err(Error::OddDimension(3))));
        assert!(matches!(anticommuting_family(6, 3), Err(Error::DimensionTooSmall { .. })));
    }

    #[test]
    fn families_reach_radon_hurwitz_bound() {
        // The construction achieves k = rho(m) for every tested size,
        // including the period-8 step at m = 32 and an odd factor at m = 6.
        for m in [2usize, 4, 6, 8, 12, 16, 32] {
            let k = radon_hurwitz(m);
            let fam = anticommuting_family(m, k).unwrap();
            assert_eq!(fam.generators.len(), k - 1, "m = {m}");
            fam.validate().unwrap();
            for q in &fam.generators {
                for v in 0..q.rows() {
                    for w in 0..q.cols() {
                        let e = q.get(v, w).re;
                        assert!(e == 0.0 || e == 1.0 || e == -1.0);
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonal_subspace_flat_entropy() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in [2usize, 4, 8] {
            let fam = anticommuting_family(m, radon_hurwitz(m)).unwrap();
            let k = orthogonal_subspace(&fam).unwrap();
            k.validate(&tol).unwrap();
            for _ in 0..10 {
                let coeffs: Vec<Complex64> = (0..k.dim())
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
                    .collect();
                let x = MatrixPoint::normalized(k.element(&coeffs).unwrap()).unwrap();
                let h = vn_entropy(&x, &tol).unwrap();
                assert!((h - (m as f64).ln()).abs() < 1e-10, "m = {m}, h = {h}");
            }
        }
    }

    #[test]
    fn tensor_of_skews_is_symmetric_with_split_spectrum() {
        let tol = Tolerances::default();
        let q1 = anticommuting_family(2, 2).unwrap().generators[0].clone();
        let q2 = anticommuting_family(4, 2).unwrap().generators[0].clone();
        let qq = q1.kron(&q2);
        assert!(qq.sub(&qq.transpose()).max_abs() < 1e-12);
        let spec = crate::spectral::hermitian_eigen(&qq, &tol).unwrap();
        let plus = spec.eigenvalues.iter().filter(|&&l| (l - 1.0).abs() < 1e-10).count();
        let minus = spec.eigenvalues.iter().filter(|&&l| (l + 1.0).abs() < 1e-10).count();
        assert_eq!(plus, 4);
        assert_eq!(minus, 4);
    }

    #[test]
    fn gap_demo_2x2() {
        let tol = Tolerances::default();
        let report = real_gap_demo(2, 2, None, &tol).unwrap();
        let ln2 = 2f64.ln();
        assert!((report.h1 - ln2).abs() < 1e-12);
        assert!((report.h2 - ln2).abs() < 1e-12);
        assert!((report.upper_bound_h12 - ln2).abs() < 1e-10);
        assert!(report.gap >= ln2 - 1e-9);
        // Witness singular values: {1/sqrt(2), 1/sqrt(2), 0, 0}.
        let svd = crate::spectral::svd(&report.witness, &tol).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((svd.singulars[0] - s).abs() < 1e-12);
        assert!((svd.singulars[1] - s).abs() < 1e-12);
        assert!(svd.singulars[2].abs() < 1e-12);
        assert!(svd.singulars[3].abs() < 1e-12);
    }

    #[test]
    fn gap_demo_larger_sizes() {
        let tol = Tolerances::default();
        let ln2 = 2f64.ln();
        for (m1, m2) in [(2usize, 4usize), (4, 4), (2, 8), (8, 8), (4, 6)] {
            let report = real_gap_demo(m1, m2, None, &tol).unwrap();
            assert!((report.upper_bound_h12 - ((m1 * m2) as f64 / 2.0).ln()).abs() < 1e-10);
            assert!(report.gap >= ln2 - 1e-9, "gap {} at ({m1},{m2})", report.gap);
        }
        assert!(matches!(real_gap_demo(3, 2, None, &tol), Err(Error::OddDimension(3))));
    }
}
