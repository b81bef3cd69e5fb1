//! Numerical tolerances shared by every module.

/// Tolerance record. [`Tolerances::DEFAULT`] is what the library uses
/// internally; callers can build their own for looser validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Density-matrix validity: hermiticity, unit trace, eigenvalue floor,
    /// ket normalization and Kraus completeness.
    pub validity: f64,
    /// Algebraic identities that hold exactly in real arithmetic.
    pub algebraic: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        validity: 1e-10,
        algebraic: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Absolute bisection width for threshold searches on `[0, 1/2]`.
pub const ROOT_ALPHA_TOL: f64 = 1e-6;

/// Crossover routes must agree to this.
pub const ROUTE_AGREEMENT_TOL: f64 = 1e-6;

/// `D` below this is treated as zero by the sensitivity-cutoff search.
pub const ZERO_DEVIATION: f64 = 1e-12;

/// Table reproduction compares against three reported decimals.
pub const TABLE_TOL: f64 = 1e-3;
