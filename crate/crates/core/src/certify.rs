//! Derivative certificates: criticality, strong local minima of the von
//! Neumann entropy under local commutativity, strong local maxima of the
//! 2-norm entropy, and the second-order perturbation checks that back them.
//!
//! The certificates are margin-based: a verdict is only issued when the
//! strict inequality it rests on holds by more than `tol.certmargin`, so
//! repeated runs give reproducible answers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Tolerances;
use crate::entropy::{
    first_directional_derivative, relative_entropy, MatrixPoint, RelativeEntropy, SpectralFunction,
};
use crate::error::{Error, Result};
use crate::matrix::{Field, Matrix};
use crate::spectral::{hermitian_eigen, inverse_on_support, log_on_support, tensor};
use crate::subspace::{
    local_commutativity_check, orthogonal_complement_at, second_derivative_finite, Subspace,
};

/// The four trace terms deciding the sign of the second derivative of the
/// von Neumann entropy along a commuting direction:
///
/// - `a = |Tr[(x x*)^-1 (x y*)^2]|`
/// - `b = Tr[(x x*)^-1 x y* y x*]`
/// - `c = Tr[x x* ln x x*]`
/// - `d = Tr[y y* ln x x*]`
///
/// The derivative is positive exactly when `a + b < c - d`. Inverse and
/// logarithm are taken on the support of `x x*`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VnCertificateTerms {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl VnCertificateTerms {
    /// Certification margin `(c - d) - (a + b)`; positive means the second
    /// derivative is positive for every phase of the direction.
    pub fn margin(&self) -> f64 {
        (self.c - self.d) - (self.a + self.b)
    }
}

/// The four trace terms of the 2-norm criterion `F = -a + b + c + d`:
///
/// - `a = Tr[(x x*)^2]`
/// - `b = |Tr[(x y*)^2]|`
/// - `c = Tr[x x* y y*]`
/// - `d = Tr[x* x y* y]`
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TwoNormCertificateTerms {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl TwoNormCertificateTerms {
    pub fn f_value(&self) -> f64 {
        -self.a + self.b + self.c + self.d
    }

    /// Certification margin `-F`; positive means `F < 0` at worst phase.
    pub fn margin(&self) -> f64 {
        -self.f_value()
    }
}

/// Verdict of a certificate run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Critical,
    StrongLocalMin,
    StrongLocalMax,
    Violated,
    Inapplicable,
}

/// Per-direction evidence inside a [`CertificateReport`].
#[derive(Debug, Clone, Serialize)]
pub struct DirectionEntry {
    /// Index into the evaluated direction list (tangent basis first, then
    /// sampled directions).
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    /// Certification margin; `None` along directions where the second
    /// derivative is unbounded (those count as positive).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    /// First directional derivative, where the check is about criticality.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derivative: Option<f64>,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub infinite_second_derivative: bool,
}

impl DirectionEntry {
    fn empty(index: usize) -> DirectionEntry {
        DirectionEntry {
            index,
            a: None,
            b: None,
            c: None,
            d: None,
            margin: None,
            derivative: None,
            infinite_second_derivative: false,
        }
    }
}

/// Outcome of a certificate operation, serializable as JSON.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub verdict: Verdict,
    pub directions: Vec<DirectionEntry>,
    pub notes: String,
}

impl CertificateReport {
    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }
}

/// Knobs for the certificate operations that sample extra directions.
#[derive(Debug, Clone, Copy)]
pub struct CertificateOptions {
    /// Random unit directions of `x^perp` checked in addition to the basis.
    pub samples: usize,
    pub seed: u64,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions {
            samples: 100,
            seed: 0,
        }
    }
}

fn check_unit(y: &Matrix, tol: &Tolerances) -> Result<()> {
    let n = y.hs_norm_sq();
    if (n - 1.0).abs() > tol.normtol.max(1e-10) {
        return Err(Error::NotNormalized {
            what: "Tr[y y*]",
            value: n,
            expected: 1.0,
        });
    }
    Ok(())
}

/// Raw evaluation of the von Neumann certificate terms without the
/// orthogonality/normalization preconditions or the bound post-checks.
/// Useful for identities such as `a(x, x) = b(x, x) = 1`.
pub fn vn_terms_unchecked(x: &MatrixPoint, y: &Matrix, tol: &Tolerances) -> Result<VnCertificateTerms> {
    y.check_finite()?;
    let gram = x.matrix().gram();
    let ginv = inverse_on_support(&gram, tol)?;
    let glog = log_on_support(&gram, tol)?;
    let xy = x.matrix().mul(&y.adjoint());
    let a = ginv.mul(&xy).mul(&xy).trace().norm();
    let b = ginv.mul(&xy).mul(&xy.adjoint()).trace().re;
    let c = gram.mul(&glog).trace().re;
    let d = y.gram().mul(&glog).trace().re;
    Ok(VnCertificateTerms { a, b, c, d })
}

/// Von Neumann certificate terms for a unit tangent direction.
///
/// Preconditions: `Tr[y y*] = 1` and `Tr[x y*] = 0`. The bounds
/// `b in [0, 1]`, `a <= b`, `c <= 0` are enforced as post-checks; note that
/// `a <= b` is only guaranteed when `x x*` and `x y*` commute, which is the
/// regime the certificate uses these terms in.
pub fn vn_terms(x: &MatrixPoint, y: &Matrix, tol: &Tolerances) -> Result<VnCertificateTerms> {
    check_unit(y, tol)?;
    let overlap = x.matrix().hs_inner(y).norm();
    if overlap > tol.normtol.max(1e-10) {
        return Err(Error::NotOrthogonal(overlap));
    }
    let terms = vn_terms_unchecked(x, y, tol)?;
    let slack = 1e-8;
    if !(-slack..=1.0 + slack).contains(&terms.b) {
        return Err(Error::InvalidFormat(format!(
            "term bound violated: b = {} outside [0, 1]",
            terms.b
        )));
    }
    if terms.a > terms.b + slack {
        return Err(Error::InvalidFormat(format!(
            "term bound violated: a = {} > b = {}",
            terms.a, terms.b
        )));
    }
    if terms.c > 1e-10 {
        return Err(Error::InvalidFormat(format!(
            "term bound violated: c = {} > 0",
            terms.c
        )));
    }
    Ok(terms)
}

/// Closed-form second directional derivative of the normalized von Neumann
/// entropy along a commuting direction:
///
/// `D2 = 2 Tr[x x* ln x x*] - 2 Tr[y y* ln x x*] - Tr[(x y* + y x*)^2 (x x*)^-1]`
///
/// with the last trace over the support of `x x*`. Preconditions:
/// `max |[x x*, x y*]| <= tol.comtol` (else [`Error::NotCommuting`]),
/// `Tr[y y*] = 1` and `Tr[x y* + y x*] = 0`. Along directions whose
/// kernel-kernel block is nonzero the true second derivative is unbounded
/// and this finite value does not apply; the certificate handles those
/// directions separately.
pub fn vn_second_derivative_commuting(x: &MatrixPoint, y: &Matrix, tol: &Tolerances) -> Result<f64> {
    check_unit(y, tol)?;
    let gram = x.matrix().gram();
    let xy = x.matrix().mul(&y.adjoint());
    let tangent = (xy.trace() + xy.trace().conj()).norm();
    if tangent > tol.normtol.max(1e-10) {
        return Err(Error::NotNormalized {
            what: "Tr[x y* + y x*]",
            value: tangent,
            expected: 0.0,
        });
    }
    let comm = Matrix::commutator_norm(&gram, &xy);
    if comm > tol.comtol {
        return Err(Error::NotCommuting(comm));
    }
    let glog = log_on_support(&gram, tol)?;
    let ginv = inverse_on_support(&gram, tol)?;
    let b = xy.add(&xy.adjoint());
    let term1 = gram.mul(&glog).trace().re;
    let term2 = y.gram().mul(&glog).trace().re;
    let term3 = b.mul(&b).mul(&ginv).trace().re;
    Ok(2.0 * term1 - 2.0 * term2 - term3)
}

/// Closed-form second directional derivative of the normalized 2-norm
/// entropy: `2 Tr[(x y* + y x*)^2] + 4 Tr[x x* y y*] - 4 Tr[(x x*)^2]`.
///
/// Preconditions: `Tr[y y*] = 1`, `Tr[x y* + y x*] = 0`.
pub fn two_norm_second_derivative(x: &MatrixPoint, y: &Matrix, tol: &Tolerances) -> Result<f64> {
    check_unit(y, tol)?;
    let xy = x.matrix().mul(&y.adjoint());
    let tangent = (xy.trace() + xy.trace().conj()).norm();
    if tangent > tol.normtol.max(1e-10) {
        return Err(Error::NotNormalized {
            what: "Tr[x y* + y x*]",
            value: tangent,
            expected: 0.0,
        });
    }
    let b = xy.add(&xy.adjoint());
    let gram = x.matrix().gram();
    let t1 = b.mul(&b).trace().re;
    let t2 = gram.mul(&y.gram()).trace().re;
    let t3 = gram.mul(&gram).trace().re;
    Ok(2.0 * t1 + 4.0 * t2 - 4.0 * t3)
}

/// 2-norm certificate terms for a unit direction. Only normalization of `y`
/// is required; the bounds `0 <= b <= min(c, d)` and `a in [0, 1]` are
/// checked unconditionally.
pub fn two_norm_terms(x: &MatrixPoint, y: &Matrix, tol: &Tolerances) -> Result<TwoNormCertificateTerms> {
    check_unit(y, tol)?;
    y.check_finite()?;
    let gram = x.matrix().gram();
    let xy = x.matrix().mul(&y.adjoint());
    let a = gram.mul(&gram).trace().re;
    let b = xy.mul(&xy).trace().norm();
    let c = gram.mul(&y.gram()).trace().re;
    let d = x.matrix().cogram().mul(&y.cogram()).trace().re;
    let slack = 1e-8;
    if a < -slack || a > 1.0 + slack {
        return Err(Error::InvalidFormat(format!(
            "term bound violated: a = {a} outside [0, 1]"
        )));
    }
    if b > c + slack || b > d + slack || b < -slack {
        return Err(Error::InvalidFormat(format!(
            "term bound violated: b = {b} outside [0, min(c, d) = min({c}, {d})]"
        )));
    }
    Ok(TwoNormCertificateTerms { a, b, c, d })
}

/// The 2-norm criterion value `F(x, y) = -a + b + c + d`; strong local
/// maxima are characterized by `F < 0` in every tangent direction.
pub fn two_norm_f(x: &MatrixPoint, y: &Matrix, tol: &Tolerances) -> Result<f64> {
    Ok(two_norm_terms(x, y, tol)?.f_value())
}

/// Sample a unit direction in the span of `dirs` (complex coefficients over
/// a complex field, real otherwise).
fn sample_direction(dirs: &[Matrix], field: Field, rng: &mut ChaCha8Rng) -> Option<Matrix> {
    use rand_distr::{Distribution, StandardNormal};
    if dirs.is_empty() {
        return None;
    }
    let (m, n) = (dirs[0].rows(), dirs[0].cols());
    loop {
        let mut acc = Matrix::zeros(m, n);
        for d in dirs {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = if field == Field::Complex {
                StandardNormal.sample(rng)
            } else {
                0.0
            };
            acc = acc.add(&d.scale_complex(num_complex::Complex64::new(re, im)));
        }
        let norm = acc.hs_norm();
        if norm > 1e-8 {
            return Some(acc.scale(1.0 / norm));
        }
    }
}

/// Criticality test: `x` is critical when the first directional derivative
/// vanishes along every direction of `x^perp` (and along `i y` over a
/// complex field). The verdict is [`Verdict::Critical`] when every
/// `|D_y f(x)| <= tol.crittol`.
pub fn criticality_check(
    k: &Subspace,
    x: &MatrixPoint,
    fspec: SpectralFunction,
    tol: &Tolerances,
) -> Result<CertificateReport> {
    fspec.validate()?;
    let basis = orthogonal_complement_at(k, x, tol)?;
    let mut directions: Vec<Matrix> = basis;
    if k.field() == Field::Complex {
        let imag: Vec<Matrix> = directions
            .iter()
            .map(|y| y.scale_complex(num_complex::Complex64::new(0.0, 1.0)))
            .collect();
        directions.extend(imag);
    }
    let mut entries = Vec::with_capacity(directions.len());
    let mut worst: f64 = 0.0;
    for (index, y) in directions.iter().enumerate() {
        let d = first_directional_derivative(fspec, x, y, tol)?;
        worst = worst.max(d.abs());
        let mut e = DirectionEntry::empty(index);
        e.derivative = Some(d);
        e.margin = Some(tol.crittol - d.abs());
        entries.push(e);
    }
    let critical = worst <= tol.crittol;
    let half = entries.len() / 2;
    let notes = if k.field() == Field::Complex {
        format!(
            "max |D_y| = {worst:.3e} over {half} tangent directions and their i-multiples (crittol {:.1e})",
            tol.crittol
        )
    } else {
        format!(
            "max |D_y| = {worst:.3e} over {} tangent directions (crittol {:.1e})",
            entries.len(),
            tol.crittol
        )
    };
    let verdict = if critical {
        Verdict::Critical
    } else {
        Verdict::Violated
    };
    let directions = if critical {
        entries
    } else {
        entries
            .into_iter()
            .filter(|e| e.margin.is_some_and(|m| m < 0.0))
            .collect()
    };
    Ok(CertificateReport {
        verdict,
        directions,
        notes,
    })
}

/// Strong-local-minimum certificate for the von Neumann entropy.
///
/// Runs in three stages:
/// 1. every tangent direction must commute with `x` in the sense
///    `[x x*, x y*] = 0`, otherwise the closed form does not apply and the
///    verdict is [`Verdict::Inapplicable`];
/// 2. `x` must be critical;
/// 3. along each tangent direction (basis of `x^perp` plus
///    `opts.samples` random unit directions) either the kernel-kernel block
///    of the direction is nonzero, in which case the second derivative is
///    unbounded above and counts as positive, or the margin
///    `(c - d) - (a + b)` must exceed `tol.certmargin`.
pub fn vn_local_min_certificate(
    k: &Subspace,
    x: &MatrixPoint,
    tol: &Tolerances,
    opts: &CertificateOptions,
) -> Result<CertificateReport> {
    let commutativity = local_commutativity_check(k, x, tol)?;
    if !commutativity.holds {
        let indices: Vec<String> = commutativity
            .witnesses
            .iter()
            .map(|w| format!("{} (|[.,.]| = {:.3e})", w.index, w.commutator_norm))
            .collect();
        return Ok(CertificateReport {
            verdict: Verdict::Inapplicable,
            directions: Vec::new(),
            notes: format!(
                "local commutativity fails along tangent directions {}; closed-form certificate not applicable",
                indices.join(", ")
            ),
        });
    }

    let criticality = criticality_check(k, x, SpectralFunction::VonNeumann, tol)?;
    if criticality.verdict != Verdict::Critical {
        return Ok(CertificateReport {
            verdict: Verdict::Violated,
            directions: criticality.directions,
            notes: format!("not a critical point: {}", criticality.notes),
        });
    }

    let basis = orthogonal_complement_at(k, x, tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut directions = basis.clone();
    for _ in 0..opts.samples {
        match sample_direction(&basis, k.field(), &mut rng) {
            Some(y) => directions.push(y),
            None => break,
        }
    }

    let mut entries = Vec::with_capacity(directions.len());
    let mut infinite = 0usize;
    let mut worst_margin = f64::INFINITY;
    for (index, y) in directions.iter().enumerate() {
        let mut e = DirectionEntry::empty(index);
        if !second_derivative_finite(x, y, tol)? {
            e.infinite_second_derivative = true;
            infinite += 1;
        } else {
            let terms = vn_terms(x, y, tol)?;
            e.a = Some(terms.a);
            e.b = Some(terms.b);
            e.c = Some(terms.c);
            e.d = Some(terms.d);
            let margin = terms.margin();
            e.margin = Some(margin);
            worst_margin = worst_margin.min(margin);
        }
        entries.push(e);
    }

    let all_positive = worst_margin == f64::INFINITY || worst_margin > tol.certmargin;
    let notes = format!(
        "{} basis + {} sampled directions; {} with unbounded second derivative (positive); worst margin {}",
        basis.len(),
        directions.len() - basis.len(),
        infinite,
        if worst_margin == f64::INFINITY {
            "n/a".to_string()
        } else {
            format!("{worst_margin:.6e}")
        }
    );
    if all_positive {
        Ok(CertificateReport {
            verdict: Verdict::StrongLocalMin,
            directions: entries,
            notes,
        })
    } else {
        let witnesses = entries
            .into_iter()
            .filter(|e| e.margin.is_some_and(|m| m <= tol.certmargin))
            .collect();
        Ok(CertificateReport {
            verdict: Verdict::Violated,
            directions: witnesses,
            notes,
        })
    }
}

/// Strong-local-maximum certificate for the 2-norm entropy.
///
/// Requires `Tr[x x* x y*] = 0` (2-norm criticality) and `F(x, y) < 0` with
/// margin along every tangent direction; the modulus in the `b` term already
/// accounts for the worst phase of `y`.
pub fn two_norm_local_max_certificate(
    k: &Subspace,
    x: &MatrixPoint,
    tol: &Tolerances,
    opts: &CertificateOptions,
) -> Result<CertificateReport> {
    let basis = orthogonal_complement_at(k, x, tol)?;
    let gram = x.matrix().gram();

    let mut crit_violations = Vec::new();
    let mut worst_crit: f64 = 0.0;
    for (index, y) in basis.iter().enumerate() {
        let xy = x.matrix().mul(&y.adjoint());
        let v = gram.mul(&xy).trace().norm();
        worst_crit = worst_crit.max(v);
        if v > tol.crittol {
            let mut e = DirectionEntry::empty(index);
            e.derivative = Some(v);
            e.margin = Some(tol.crittol - v);
            crit_violations.push(e);
        }
    }
    if !crit_violations.is_empty() {
        return Ok(CertificateReport {
            verdict: Verdict::Violated,
            directions: crit_violations,
            notes: format!(
                "not a 2-norm critical point: max |Tr[x x* x y*]| = {worst_crit:.3e} (crittol {:.1e})",
                tol.crittol
            ),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut directions = basis.clone();
    for _ in 0..opts.samples {
        match sample_direction(&basis, k.field(), &mut rng) {
            Some(y) => directions.push(y),
            None => break,
        }
    }

    let mut entries = Vec::with_capacity(directions.len());
    let mut worst_margin = f64::INFINITY;
    for (index, y) in directions.iter().enumerate() {
        let terms = two_norm_terms(x, y, tol)?;
        let mut e = DirectionEntry::empty(index);
        e.a = Some(terms.a);
        e.b = Some(terms.b);
        e.c = Some(terms.c);
        e.d = Some(terms.d);
        let margin = terms.margin();
        e.margin = Some(margin);
        worst_margin = worst_margin.min(margin);
        entries.push(e);
    }

    let notes = format!(
        "{} basis + {} sampled directions; worst margin (-F) = {}",
        basis.len(),
        directions.len() - basis.len(),
        if worst_margin == f64::INFINITY {
            "n/a".to_string()
        } else {
            format!("{worst_margin:.6e}")
        }
    );
    if worst_margin == f64::INFINITY || worst_margin > tol.certmargin {
        Ok(CertificateReport {
            verdict: Verdict::StrongLocalMax,
            directions: entries,
            notes,
        })
    } else {
        let witnesses = entries
            .into_iter()
            .filter(|e| e.margin.is_some_and(|m| m <= tol.certmargin))
            .collect();
        Ok(CertificateReport {
            verdict: Verdict::Violated,
            directions: witnesses,
            notes,
        })
    }
}

fn entropy_of_psd(m: &Matrix, tol: &Tolerances) -> Result<f64> {
    let spec = hermitian_eigen(m, tol)?;
    Ok(-spec
        .eigenvalues
        .iter()
        .map(|&l| {
            let l = l.max(0.0);
            if l > tol.ranktol {
                l * l.ln()
            } else {
                0.0
            }
        })
        .sum::<f64>())
}

fn require_full_rank(gram: &Matrix, tol: &Tolerances) -> Result<()> {
    let spec = hermitian_eigen(gram, tol)?;
    let rank = spec.eigenvalues.iter().filter(|&&l| l > tol.ranktol).count();
    if rank < gram.rows() {
        return Err(Error::NotFullRank {
            rank,
            dim: gram.rows(),
        });
    }
    Ok(())
}

/// Residual of the second-order expansion of the entropy of the quadratic
/// path against the affine path:
///
/// `| S(A(eps)/Tr A(eps)) - S(A1(eps)) - eps^2 Tr[(x x* - y y*) ln x x*] |`
///
/// where `A(eps) = (x + eps y)(x + eps y)*` and
/// `A1(eps) = x x* + eps (x y* + y x*)`. The residual is `O(eps^3)`; callers
/// verify the cubic scaling by halving `eps`.
///
/// Preconditions: `x x*` invertible, `Tr[y y*] = 1`, `Tr[x y* + y x*] = 0`.
pub fn affine_expansion_check(x: &MatrixPoint, y: &Matrix, eps: f64, tol: &Tolerances) -> Result<f64> {
    check_unit(y, tol)?;
    let gram = x.matrix().gram();
    require_full_rank(&gram, tol)?;
    let xy = x.matrix().mul(&y.adjoint());
    let tangent = (xy.trace() + xy.trace().conj()).norm();
    if tangent > tol.normtol.max(1e-10) {
        return Err(Error::NotNormalized {
            what: "Tr[x y* + y x*]",
            value: tangent,
            expected: 0.0,
        });
    }

    let shifted = x.matrix().add(&y.scale(eps));
    let a_eps = shifted.gram();
    let tr = a_eps.trace().re;
    let normalized = a_eps.scale(1.0 / tr);
    let s_quad = entropy_of_psd(&normalized, tol)?;

    let b = xy.add(&xy.adjoint());
    let a1 = gram.add(&b.scale(eps));
    let s_affine = entropy_of_psd(&a1, tol)?;

    let glog = log_on_support(&gram, tol)?;
    let correction = gram.sub(&y.gram()).mul(&glog).trace().re;

    Ok((s_quad - s_affine - eps * eps * correction).abs())
}

/// Output of [`necessary_condition`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NecessaryCondition {
    /// `Tr[(x x* - y y*) ln x x*]`; strictly positive along every tangent
    /// direction at a local minimum.
    pub value: f64,
    /// `|value - (S(y y*) - S(x x*) + S(y y* || x x*))|`, evaluated through
    /// the independent relative-entropy route.
    pub identity_residual: f64,
}

/// Second-order necessary condition for a local minimum, together with its
/// relative-entropy identity residual.
pub fn necessary_condition(x: &MatrixPoint, y: &Matrix, tol: &Tolerances) -> Result<NecessaryCondition> {
    check_unit(y, tol)?;
    let gram = x.matrix().gram();
    require_full_rank(&gram, tol)?;
    let glog = log_on_support(&gram, tol)?;
    let ygram = y.gram();
    let value = gram.sub(&ygram).mul(&glog).trace().re;

    let s_x = entropy_of_psd(&gram, tol)?;
    let s_y = entropy_of_psd(&ygram, tol)?;
    let rel = match relative_entropy(&ygram, &gram, tol)? {
        RelativeEntropy::Finite(v) => v,
        RelativeEntropy::Infinite => {
            return Err(Error::NotFullRank {
                rank: 0,
                dim: gram.rows(),
            })
        }
    };
    let identity_residual = (value - (s_y - s_x + rel)).abs();
    Ok(NecessaryCondition {
        value,
        identity_residual,
    })
}

/// One step of the eigenvalue perturbation check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PerturbationRow {
    pub eps: f64,
    /// `max_i | lambda_i(eps) - mu_i(eps) - eps^2 f_ii |`.
    pub max_residual: f64,
}

/// Report of [`eigenvalue_perturbation_check`].
#[derive(Debug, Clone, Serialize)]
pub struct PerturbationReport {
    pub rows: Vec<PerturbationRow>,
    /// Residual ratios between consecutive schedule steps; approximately 8
    /// for a halving schedule when the error is cubic in `eps`.
    pub ratios: Vec<f64>,
    pub min_gap: f64,
}

/// Verify the second-order eigenvalue expansion
/// `lambda_i(eps) = mu_i(eps) + eps^2 f_ii + O(eps^3)` where `lambda_i` are
/// the sorted eigenvalues of `A + eps B + eps^2 C`, `mu_i` those of
/// `A + eps B`, and `f_ii` the diagonal of `C` in the eigenbasis of `A`.
///
/// `A` must be PSD with a simple spectrum; an eigenvalue gap below 1e-6
/// yields [`Error::DegenerateSpectrum`] because the diagonal `f_ii` is
/// basis-dependent under degeneracy.
pub fn eigenvalue_perturbation_check(
    a: &Matrix,
    b: &Matrix,
    c: &Matrix,
    schedule: &[f64],
    tol: &Tolerances,
) -> Result<PerturbationReport> {
    let spec_a = hermitian_eigen(a, tol)?;
    if let Some(&min) = spec_a.eigenvalues.last() {
        if min < -tol.spectol {
            return Err(Error::NotPsd(min));
        }
    }
    let mut min_gap = f64::INFINITY;
    for w in spec_a.eigenvalues.windows(2) {
        min_gap = min_gap.min(w[0] - w[1]);
    }
    if spec_a.eigenvalues.len() > 1 && min_gap < 1e-6 {
        return Err(Error::DegenerateSpectrum(min_gap));
    }
    hermitian_eigen(b, tol)?;
    let u = spec_a.eigenvectors.adjoint();
    let f = u.mul(c).mul(&spec_a.eigenvectors);

    let mut rows = Vec::with_capacity(schedule.len());
    for &eps in schedule {
        let quad = a.add(&b.scale(eps)).add(&c.scale(eps * eps));
        let affine = a.add(&b.scale(eps));
        let lam = hermitian_eigen(&quad, tol)?.eigenvalues;
        let mu = hermitian_eigen(&affine, tol)?.eigenvalues;
        let mut worst: f64 = 0.0;
        for i in 0..lam.len() {
            let predicted = mu[i] + eps * eps * f.get(i, i).re;
            worst = worst.max((lam[i] - predicted).abs());
        }
        rows.push(PerturbationRow {
            eps,
            max_residual: worst,
        });
    }
    let ratios = rows
        .windows(2)
        .map(|w| w[0].max_residual / w[1].max_residual.max(f64::MIN_POSITIVE))
        .collect();
    Ok(PerturbationReport {
        rows,
        ratios,
        min_gap,
    })
}

/// Default halving schedule for [`eigenvalue_perturbation_check`].
pub const PERTURBATION_SCHEDULE: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Tensor identity helper used by the closure tests: terms of a pure tensor
/// pair from the factor terms (`a`, `b` multiply; `c`, `d` add).
pub fn vn_terms_tensor(t1: &VnCertificateTerms, t2: &VnCertificateTerms) -> VnCertificateTerms {
    VnCertificateTerms {
        a: t1.a * t2.a,
        b: t1.b * t2.b,
        c: t1.c + t2.c,
        d: t1.d + t2.d,
    }
}

/// Kronecker pair helper: the tensor of two points stays a unit point.
pub fn tensor_point(x1: &MatrixPoint, x2: &MatrixPoint, tol: &Tolerances) -> Result<MatrixPoint> {
    MatrixPoint::from_unit(tensor(x1.matrix(), x2.matrix())?, tol)
}
