//! The spatially homogeneous steady state.
//!
//! For any source level `sigma >= 0` the system has exactly one constant
//! solution: the activator level solves the scalar equation
//!
//! ```text
//! -u + u^(p - qr/(s+1)) + sigma = 0,
//! ```
//!
//! and the inhibitor level is `v = u^(r/(s+1))` (so that `v^(s+1) = u^r`).
//! At `sigma = 0` the state is exactly `(1, 1)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exponents::Exponents;

/// Residual target for the scalar root solve, relative to `max(1, u)`.
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SteadyStateError {
    /// The bracketing/bisection budget was exhausted. The root always exists
    /// and is unique, so this signals an internal bug, not a bad input.
    #[error("constant-state root iteration failed to converge")]
    NoConvergence,
}

/// The unique constant steady state for a given exponent set and source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantState {
    /// Activator level `u*`.
    pub u: f64,
    /// Inhibitor level `v*`.
    pub v: f64,
    /// Source level this state belongs to.
    pub sigma: f64,
}

/// Scalar equation whose unique positive root is the constant activator
/// level: `g(u) = u^(p - qr/(s+1)) + sigma - u`.
fn scalar_residual(exps: &Exponents, sigma: f64, u: f64) -> f64 {
    u.powf(exps.reduced_power()) + sigma - u
}

/// Solves for the constant steady state.
///
/// Bisection on an expanding bracket (the root is unique and `g(1) = sigma
/// >= 0`, `g -> -inf`), then a few Newton polish steps.
pub fn constant_state(exps: &Exponents, sigma: f64) -> Result<ConstantState, SteadyStateError> {
    if sigma == 0.0 {
        return Ok(ConstantState {
            u: 1.0,
            v: 1.0,
            sigma,
        });
    }

    // g(1) = sigma >= 0, and the root is >= 1; expand until the sign flips.
    let mut lo = 1.0;
    let mut hi = (2.0f64).max(1.0 + sigma).max((1.0 + sigma) * (1.0 + sigma));
    let mut grow = 0;
    while scalar_residual(exps, sigma, hi) > 0.0 {
        hi *= 2.0;
        grow += 1;
        if grow > 1024 {
            return Err(SteadyStateError::NoConvergence);
        }
    }

    let mut iter = 0;
    while hi - lo > 1e-14 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if scalar_residual(exps, sigma, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iter += 1;
        if iter > 400 {
            return Err(SteadyStateError::NoConvergence);
        }
    }

    let mut u = 0.5 * (lo + hi);
    let m = exps.reduced_power();
    for _ in 0..3 {
        let g = scalar_residual(exps, sigma, u);
        let dg = m * u.powf(m - 1.0) - 1.0;
        if dg.abs() > 1e-300 {
            let next = u - g / dg;
            if next > 0.0 && next.is_finite() {
                u = next;
            }
        }
    }

    if scalar_residual(exps, sigma, u).abs() > ROOT_TOL * u.max(1.0) {
        return Err(SteadyStateError::NoConvergence);
    }

    Ok(ConstantState {
        u,
        v: u.powf(exps.r() / (exps.s() + 1.0)),
        sigma,
    })
}

/// Sensitivity of the constant activator level to the source:
///
/// ```text
/// du*/dsigma = 1 / (1 + (qr/(s+1) - p) (u*)^(p - 1 - qr/(s+1)))
/// ```
///
/// Strictly positive for all valid exponents and `sigma >= 0`.
pub fn du_dsigma(exps: &Exponents, sigma: f64) -> Result<f64, SteadyStateError> {
    let state = constant_state(exps, sigma)?;
    let expo = exps.reduced_power() - 1.0;
    Ok(1.0 / (1.0 + (exps.q() * exps.r() / (exps.s() + 1.0) - exps.p()) * state.u.powf(expo)))
}
