//! Explicit a priori amplitude bounds and the optimal-bound certificate.
//!
//! At zero source, every admissible `lambda` yields a closed-form bound on
//! the solution amplitude in terms of the diffusion ratio `d2/d1`. The bound
//! equals one exactly when `lambda d1/d2` matches the Young-inequality
//! weight, which is what makes the thresholds of [`crate::threshold`]
//! optimal.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exponents::Exponents;
use crate::steady::constant_state;
use crate::threshold::{admissible_set, k_thresholds, AdmissibleKind, ThresholdError};

/// Full parameter set of the stationary system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub exponents: Exponents,
    /// Source level, `>= 0`.
    pub sigma: f64,
    /// Activator diffusion.
    pub d1: f64,
    /// Inhibitor diffusion.
    pub d2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("parameters out of range: {0}")]
    InvalidParams(&'static str),
    /// `lambda` violates the admissibility needed by the bound formula.
    #[error("lambda outside the admissible range for this bound")]
    PreconditionViolated,
}

impl ModelParams {
    pub fn new(exponents: Exponents, sigma: f64, d1: f64, d2: f64) -> Result<Self, BoundsError> {
        if !(sigma >= 0.0) {
            return Err(BoundsError::InvalidParams("sigma must be >= 0"));
        }
        if !(d1 > 0.0 && d2 > 0.0) {
            return Err(BoundsError::InvalidParams("d1, d2 must be > 0"));
        }
        Ok(Self {
            exponents,
            sigma,
            d1,
            d2,
        })
    }

    pub fn ratio(&self) -> f64 {
        self.d2 / self.d1
    }
}

/// The Young-inequality weights attached to a `lambda`:
///
/// ```text
/// a  = (q - lambda(p-1)) / (s+1 - lambda r),   b  = 1/a,
/// a0 = lambda / (s+1 - lambda r),              b0 = 1/a0.
/// ```
///
/// `a`/`b` pair the two reaction quotients, `a0`/`b0` pair the inhibitor
/// quotient with `1/u` in the positive-source estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoungWeights {
    pub a: f64,
    pub b: f64,
    pub a0: f64,
    pub b0: f64,
}

pub fn young_weights(exps: &Exponents, lambda: f64) -> YoungWeights {
    let a = weight_a(exps, lambda);
    let a0 = lambda / (exps.s() + 1.0 - lambda * exps.r());
    YoungWeights {
        a,
        b: 1.0 / a,
        a0,
        b0: 1.0 / a0,
    }
}

/// Young-inequality weight `a = (q - lambda(p-1)) / (s+1 - lambda r)`.
fn weight_a(exps: &Exponents, lambda: f64) -> f64 {
    (exps.q() - lambda * (exps.p() - 1.0)) / (exps.s() + 1.0 - lambda * exps.r())
}

/// `t^t (1-t)^(1-t)` with the `0^0 = 1` convention at the endpoints.
fn entropy_weight(t: f64) -> f64 {
    t.powf(t) * (1.0 - t).powf(1.0 - t)
}

/// Explicit zero-source upper bound on the activator maximum:
///
/// ```text
/// u_max <= [ (1-a)^(1-a) a^a / ((1 - m)^(1-a) m^a) ]^((s+1)/(qr-(p-1)(s+1)))
/// ```
///
/// with `m = lambda d1/d2`. Requires `sigma = 0`, `lambda` interior to the
/// upper admissible set, and `lambda < d2/d1`; the value is always `>= 1`,
/// with equality exactly at `m = a`.
pub fn upper_amplitude_bound(params: &ModelParams, lambda: f64) -> Result<f64, BoundsError> {
    if params.sigma != 0.0 {
        return Err(BoundsError::PreconditionViolated);
    }
    let exps = &params.exponents;
    let set = admissible_set(exps, AdmissibleKind::UpperZeroSource)
        .map_err(|_| BoundsError::PreconditionViolated)?;
    let iv = set.interval();
    let m = lambda * params.d1 / params.d2;
    if !(lambda > iv.lo && lambda < iv.hi && m < 1.0) {
        return Err(BoundsError::PreconditionViolated);
    }
    let a = weight_a(exps, lambda);
    if !(0.0 < a && a < 1.0) {
        return Err(BoundsError::PreconditionViolated);
    }
    let base = entropy_weight(a) / ((1.0 - m).powf(1.0 - a) * m.powf(a));
    Ok(base.powf((exps.s() + 1.0) / exps.coupling_gap()))
}

/// Explicit zero-source lower bound on the activator minimum:
///
/// ```text
/// u_min >= [ w^b (1-w)^(1-b) / (b^b (1-b)^(1-b)) ]^((1/b)(s+1)/(qr-(p-1)(s+1)))
/// ```
///
/// with `b = 1/a` and `w = d2/(lambda d1)`. Requires `sigma = 0`, `lambda`
/// interior to the lower admissible set, and `lambda > d2/d1`; the value is
/// always in `(0, 1]`, with equality exactly at `w = b`.
pub fn lower_amplitude_bound(params: &ModelParams, lambda: f64) -> Result<f64, BoundsError> {
    if params.sigma != 0.0 {
        return Err(BoundsError::PreconditionViolated);
    }
    let exps = &params.exponents;
    let set = admissible_set(exps, AdmissibleKind::LowerZeroSource)
        .map_err(|_| BoundsError::PreconditionViolated)?;
    let iv = set.interval();
    let w = params.d2 / (lambda * params.d1);
    if !(lambda > iv.lo && lambda < iv.hi && w < 1.0) {
        return Err(BoundsError::PreconditionViolated);
    }
    let b = 1.0 / weight_a(exps, lambda);
    if !(0.0 < b && b < 1.0) {
        return Err(BoundsError::PreconditionViolated);
    }
    let base = w.powf(b) * (1.0 - w).powf(1.0 - b) / entropy_weight(b);
    Ok(base.powf((exps.s() + 1.0) / exps.coupling_gap() / b))
}

/// Which optimal bounds the diffusion ratio certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCertificate {
    /// `u <= u*`, `v <= v*` holds for every positive solution.
    pub upper_holds: bool,
    /// `u >= u*`, `v >= v*` holds for every positive solution.
    pub lower_holds: bool,
    /// Both hold, so the constant state is the only solution.
    pub unique_constant: bool,
}

/// Decides the optimal-bound regimes by comparing `d2/d1` against the
/// thresholds, with a `1e-12` comparison slack.
pub fn bound_certificate(params: &ModelParams) -> Result<BoundCertificate, ThresholdError> {
    let rep = k_thresholds(&params.exponents, params.sigma)?;
    let ratio = params.ratio();
    let holds = |k: Option<crate::threshold::Supremum>| match k {
        Some(sup) => ratio <= sup.value + 1e-12,
        None => false,
    };
    let upper_holds = holds(rep.k1);
    let lower_holds = holds(rep.k2);
    Ok(BoundCertificate {
        upper_holds,
        lower_holds,
        unique_constant: upper_holds && lower_holds,
    })
}

/// Reference-quality evaluation of the two bound formulas, used by tests and
/// the verifier report for cross-checking.
pub fn bound_diagnostics(params: &ModelParams, lambda: f64) -> Option<(f64, f64)> {
    let a = weight_a(&params.exponents, lambda);
    let st = constant_state(&params.exponents, params.sigma).ok()?;
    Some((a, st.u))
}
