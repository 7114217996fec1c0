//! Parity-based existence prediction for nontrivial steady states.
//!
//! Odd total multiplicity of the active bifurcation modes forces a nonzero
//! topological degree away from the constant state, provided the deformation
//! family admits uniform a priori bounds. The bound hypotheses checked here
//! are sufficient conditions, not necessary ones: a positive source gives
//! them outright, while at zero source a one-parameter family of integral
//! estimates must admit a feasible exponent `delta`.

use serde::{Deserialize, Serialize};

use crate::bounds::{bound_certificate, ModelParams};
use crate::exponents::Exponents;
use crate::spectrum::{parity, Domain, SpectrumError};

/// Outcome of the feasibility scan for the zero-source bound family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaFeasibility {
    pub feasible: bool,
    /// First feasible `delta` on a 10^4-point grid of `(0, 1]`, if any.
    pub delta: Option<f64>,
}

/// Scans `delta in (0, 1]` for the conditions that make the zero-source
/// lower bounds uniform in the deformation parameter:
///
/// - `r < n/(n-2)` (vacuous for `n <= 2`),
/// - `0 < (1-delta)/r + delta/p < 1`,
/// - `[((1-delta)/r) s + delta q/p] / [(r-1+delta)/r - delta/p]` below
///   `n/(n-2)` or at most `s+1`.
pub fn delta_feasibility(exps: &Exponents, dim: u32) -> DeltaFeasibility {
    assert!(dim >= 1);
    let (p, q, r, s) = (exps.p(), exps.q(), exps.r(), exps.s());
    let sobolev_cap = if dim <= 2 {
        f64::INFINITY
    } else {
        dim as f64 / (dim as f64 - 2.0)
    };
    if r >= sobolev_cap {
        return DeltaFeasibility {
            feasible: false,
            delta: None,
        };
    }

    const GRID: usize = 10_000;
    for k in 1..=GRID {
        let delta = k as f64 / GRID as f64;
        let alpha = (1.0 - delta) / r + delta / p;
        if !(alpha > 0.0 && alpha < 1.0) {
            continue;
        }
        let ratio = ((1.0 - delta) / r * s + delta * q / p) / (1.0 - alpha);
        if ratio < sobolev_cap || ratio <= s + 1.0 {
            return DeltaFeasibility {
                feasible: true,
                delta: Some(delta),
            };
        }
    }
    DeltaFeasibility {
        feasible: false,
        delta: None,
    }
}

/// The individual clauses backing an existence prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionReasons {
    /// Total multiplicity of active bifurcation modes.
    pub parity_count: usize,
    pub parity_odd: bool,
    /// `d1` sits inside the resonance window of some bifurcation value.
    pub resonant: bool,
    /// `(p-1)/r < 1`, needed for the uniform upper bounds.
    pub subcritical: bool,
    pub sigma_positive: bool,
    /// Zero-source bound family feasibility (only consulted when
    /// `sigma = 0`).
    pub delta_feasible: Option<DeltaFeasibility>,
    /// The diffusion ratio already certifies uniqueness of the constant
    /// state, which rules out a nontrivial solution regardless of parity.
    pub uniqueness_certified: bool,
}

/// An existence prediction together with the clauses it rests on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExistencePrediction {
    pub predicted: bool,
    pub reasons: PredictionReasons,
}

/// Predicts whether a nontrivial steady state exists at these parameters.
///
/// True exactly when the parity count is odd, `d1` is non-resonant, the
/// a priori bound hypotheses hold (`sigma > 0`, or `sigma = 0` with a
/// feasible `delta`), `(p-1)/r < 1`, and the diffusion ratio does not
/// already certify uniqueness.
pub fn existence_prediction(
    exps: &Exponents,
    sigma: f64,
    d1: f64,
    d2: f64,
    domain: &Domain,
    dim: u32,
    mode_count: usize,
) -> Result<ExistencePrediction, SpectrumError> {
    let set = parity(exps, sigma, d1, d2, domain, mode_count)?;
    let subcritical = (exps.p() - 1.0) / exps.r() < 1.0;
    let sigma_positive = sigma > 0.0;
    let delta = if sigma_positive {
        None
    } else {
        Some(delta_feasibility(exps, dim))
    };
    let bounds_ok = sigma_positive || delta.map(|d| d.feasible).unwrap_or(false);

    let uniqueness_certified = ModelParams::new(*exps, sigma, d1, d2)
        .ok()
        .and_then(|p| bound_certificate(&p).ok())
        .map(|c| c.unique_constant)
        .unwrap_or(false);

    let predicted = set.parity_is_odd()
        && !set.is_resonant
        && subcritical
        && bounds_ok
        && !uniqueness_certified;

    Ok(ExistencePrediction {
        predicted,
        reasons: PredictionReasons {
            parity_count: set.parity_count,
            parity_odd: set.parity_is_odd(),
            resonant: set.is_resonant,
            subcritical,
            sigma_positive,
            delta_feasible: delta,
            uniqueness_certified,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::threshold::sigma_bifurcation_cutoff;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn dimension_two_always_feasible() {
        for exps in [
            Exponents::new(2.0, 4.0, 2.0, 4.0).unwrap(),
            Exponents::new(2.0, 1.0, 2.0, 0.0).unwrap(),
            Exponents::new(5.0, 9.0, 3.0, 1.0).unwrap(),
        ] {
            for dim in [1, 2] {
                let f = delta_feasibility(&exps, dim);
                assert!(f.feasible, "{exps:?} dim={dim}");
                assert!(f.delta.is_some());
            }
        }
    }

    #[test]
    fn delta_one_reduces_to_simple_conditions() {
        // n=3, (2,1,2,0): r = 2 < 3, delta = 1 gives q/(p-1) = 1 <= s+1 = 1.
        let e = Exponents::new(2.0, 1.0, 2.0, 0.0).unwrap();
        let f = delta_feasibility(&e, 3);
        assert!(f.feasible);
        // Direct evaluation of the delta = 1 clauses.
        let (p, q, s) = (2.0, 1.0, 0.0);
        let alpha: f64 = 1.0 / p;
        assert!(alpha > 0.0 && alpha < 1.0);
        let ratio = (q / p) / (1.0 - alpha);
        assert!(ratio <= s + 1.0);
    }

    #[test]
    fn sobolev_cap_blocks_large_r() {
        // n=4: cap = 2; r = 3 >= 2 infeasible regardless of delta.
        let e = Exponents::new(2.0, 2.0, 3.0, 1.0).unwrap();
        let f = delta_feasibility(&e, 4);
        assert!(!f.feasible);
    }

    #[test]
    fn reference_prediction_true() {
        // (2,1,2,0), sigma=0.01, 1D: one active odd mode, sigma > 0,
        // (p-1)/r = 1/2 < 1.
        let e = Exponents::new(2.0, 1.0, 2.0, 0.0).unwrap();
        let pred = existence_prediction(
            &e,
            0.01,
            0.5,
            10.0,
            &Domain::Interval { length: PI },
            1,
            50,
        )
        .unwrap();
        assert!(pred.predicted);
        assert_eq!(pred.reasons.parity_count, 1);
        assert!(pred.reasons.sigma_positive);
        assert!(!pred.reasons.uniqueness_certified);
    }

    #[test]
    fn large_sigma_empties_parity() {
        let e = Exponents::new(2.0, 1.0, 2.0, 0.0).unwrap();
        let sigma = sigma_bifurcation_cutoff(&e) + 0.5;
        let pred = existence_prediction(
            &e,
            sigma,
            0.5,
            10.0,
            &Domain::Interval { length: PI },
            1,
            50,
        )
        .unwrap();
        assert!(!pred.predicted);
        assert_eq!(pred.reasons.parity_count, 0);
    }

    #[test]
    fn uniqueness_regime_blocks_prediction() {
        // Common-source reference exponents with d2/d1 <= k = 1: even if a
        // mode were active, uniqueness wins.
        let e = Exponents::new(2.0, 4.0, 2.0, 4.0).unwrap();
        let pred = existence_prediction(
            &e,
            0.0,
            0.01,
            0.009,
            &Domain::Interval { length: 1.0 },
            1,
            4000,
        )
        .unwrap();
        assert!(pred.reasons.uniqueness_certified);
        assert!(!pred.predicted);
    }
}
