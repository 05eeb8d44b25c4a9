use crate::error::{Error, Result};

/// Numerical tolerances shared across the library.
///
/// The defaults are chosen for unit-scale inputs (everything downstream is
/// normalized to unit Hilbert-Schmidt norm). All of them can be overridden,
/// e.g. from the CLI via `--tol name=value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Hermiticity and decomposition-reconstruction tolerance.
    pub spectol: f64,
    /// Rank / support cutoff: eigenvalues and singular values at or below
    /// this are treated as exactly zero.
    pub ranktol: f64,
    /// Unit-norm and trace-orthogonality tolerance for normalized inputs.
    pub normtol: f64,
    /// Commutator tolerance (max-entry norm) for the local commutativity test.
    pub comtol: f64,
    /// First-derivative threshold below which a point counts as critical.
    pub crittol: f64,
    /// Strict margin required before a min/max certificate is issued.
    pub certmargin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            spectol: 1e-10,
            ranktol: 1e-9,
            normtol: 1e-12,
            comtol: 1e-9,
            crittol: 1e-8,
            certmargin: 1e-8,
        }
    }
}

impl Tolerances {
    /// Override one tolerance by name. Names match the field names.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidFormat(format!(
                "tolerance {name} must be a finite non-negative number, got {value}"
            )));
        }
        match name {
            "spectol" => self.spectol = value,
            "ranktol" => self.ranktol = value,
            "normtol" => self.normtol = value,
            "comtol" => self.comtol = value,
            "crittol" => self.crittol = value,
            "certmargin" => self.certmargin = value,
            _ => return Err(Error::UnknownTolerance(name.to_string())),
        }
        Ok(())
    }
}
