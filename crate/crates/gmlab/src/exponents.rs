//! Reaction exponents and their validity condition.
//!
//! The four exponents `(p, q, r, s)` of the activator-inhibitor kinetics
//! `u^p/v^q`, `u^r/v^s` are admissible when
//!
//! ```text
//! 0 < (p - 1) / r < q / (s + 1)
//! ```
//!
//! with both inequalities strict. Everything downstream (constant states,
//! threshold curves, bifurcation values) assumes a validated [`Exponents`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Why a candidate exponent quadruple was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ExponentError {
    /// `r = 0` (or negative): the left ratio `(p-1)/r` is undefined.
    #[error("r must be positive, the ratio (p-1)/r is undefined otherwise")]
    ZeroR,
    /// `p <= 1`: the left inequality `0 < (p-1)/r` fails.
    #[error("p must exceed 1, got the left inequality 0 < (p-1)/r non-strict")]
    NonPositiveLeft,
    /// `(p-1)/r >= q/(s+1)`: the right inequality fails.
    #[error("(p-1)/r < q/(s+1) must hold strictly")]
    NonStrictRight,
}

/// A validated set of nonnegative reaction exponents.
///
/// Immutable after construction; all invariants are checked in
/// [`Exponents::new`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    p: f64,
    q: f64,
    r: f64,
    s: f64,
}

impl Exponents {
    /// Validates `0 < (p-1)/r < q/(s+1)` and wraps the quadruple.
    pub fn new(p: f64, q: f64, r: f64, s: f64) -> Result<Self, ExponentError> {
        if !(r > 0.0) {
            return Err(ExponentError::ZeroR);
        }
        if !(p > 1.0) {
            return Err(ExponentError::NonPositiveLeft);
        }
        if !((p - 1.0) / r < q / (s + 1.0)) {
            return Err(ExponentError::NonStrictRight);
        }
        Ok(Self { p, q, r, s })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Right endpoint `(s+1)/r` of the lambda range used by the threshold
    /// curve and the admissible sets.
    pub fn lambda_max(&self) -> f64 {
        (self.s + 1.0) / self.r
    }

    /// `qr - (p-1)(s+1)`, strictly positive for valid exponents.
    ///
    /// This combination controls the strength of the cross coupling and
    /// appears in every explicit bound exponent.
    pub fn coupling_gap(&self) -> f64 {
        self.q * self.r - (self.p - 1.0) * (self.s + 1.0)
    }

    /// `p - qr/(s+1)`, the net exponent of the scalar equation satisfied by
    /// the constant activator level.
    pub fn reduced_power(&self) -> f64 {
        self.p - self.q * self.r / (self.s + 1.0)
    }

    /// Both equations share the same reaction quotient (`p = r`, `q = s`).
    pub fn is_common_source(&self) -> bool {
        self.p == self.r && self.q == self.s
    }
}
