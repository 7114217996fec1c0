//! The diffusion-ratio threshold curve and its admissible lambda sets.
//!
//! For each exponent set and source level the curve
//!
//! ```text
//! f(lambda) = lambda (s+1 - lambda r)
//!             / [ (q - lambda(p-1)) u*^(-(qr-(p-1)(s+1))/(s+1)) + lambda sigma / u* ]
//! ```
//!
//! maps `lambda in [0, (s+1)/r]` to a diffusion ratio `d2/d1`. It vanishes at
//! both endpoints and has a single interior maximum. Its range over four
//! admissible subsets of the lambda interval yields the thresholds `k1`, `k2`
//! below which the pointwise bounds `u <= u*` (resp. `u >= u*`) become
//! optimal, and `k = min(k1, k2)` below which the constant state is the only
//! solution.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exponents::Exponents;
use crate::numeric::golden_max;
use crate::steady::{constant_state, ConstantState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ThresholdError {
    /// `lambda` outside `[0, (s+1)/r]`.
    #[error("lambda outside the admissible range [0, (s+1)/r]")]
    DomainError,
    /// The hypothesis under which the requested set is defined fails
    /// (`q < s+1` for the upper sets, `r < s+1` for the lower sets).
    #[error("set hypothesis violated: requires {requirement}")]
    AssumptionViolated {
        requirement: &'static str,
    },
    #[error("constant state solve failed")]
    SteadyState,
}

/// Threshold curve value at `lambda`, for source level `sigma`.
///
/// Exactly zero at both interval endpoints. At `sigma = 0` this reduces to
/// `lambda (s+1 - lambda r) / (q - lambda (p-1))`.
pub fn threshold_function(
    exps: &Exponents,
    sigma: f64,
    lambda: f64,
) -> Result<f64, ThresholdError> {
    let state = constant_state(exps, sigma).map_err(|_| ThresholdError::SteadyState)?;
    threshold_function_at(exps, &state, lambda)
}

/// Same as [`threshold_function`] with the constant state precomputed;
/// used by the supremum searches to avoid re-solving the scalar root.
pub fn threshold_function_at(
    exps: &Exponents,
    state: &ConstantState,
    lambda: f64,
) -> Result<f64, ThresholdError> {
    let lmax = exps.lambda_max();
    if !(0.0..=lmax).contains(&lambda) {
        return Err(ThresholdError::DomainError);
    }
    if lambda == 0.0 || lambda == lmax {
        return Ok(0.0);
    }
    let (p, q, r, s) = (exps.p(), exps.q(), exps.r(), exps.s());
    let numer = lambda * (s + 1.0 - lambda * r);
    let weight = state.u.powf(-exps.coupling_gap() / (s + 1.0));
    let denom = (q - lambda * (p - 1.0)) * weight + lambda * state.sigma / state.u;
    Ok(numer / denom)
}

/// The unique interior maximizer of the zero-source threshold curve:
///
/// ```text
/// lambda* = ((s+1)/r) / (1 + sqrt(1 - (p-1)(s+1)/(qr)))
/// ```
///
/// This form is numerically stable as `p -> 1` (the equivalent
/// `q/(p-1) (1 - sqrt(...))` form cancels catastrophically there).
pub fn critical_lambda(exps: &Exponents) -> f64 {
    let disc = 1.0 - (exps.p() - 1.0) * (exps.s() + 1.0) / (exps.q() * exps.r());
    exps.lambda_max() / (1.0 + disc.sqrt())
}

/// Which admissible lambda set, by the bound it certifies and the source
/// regime it applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdmissibleKind {
    /// Upper bounds, zero source. `(0,1] ∩ (0, (s+1-q)/(r-(p-1))]`.
    UpperZeroSource,
    /// Lower bounds, zero source. `{λ ∈ [1,(s+1)/r) : (s+1-λr)/(q-λ(p-1)) ≤ 1}`.
    LowerZeroSource,
    /// Upper bounds, positive source. The zero-source set further capped at
    /// `(s+1)/(r+1)`.
    UpperPositiveSource,
    /// Lower bounds, positive source. The zero-source set further truncated
    /// from the left at `(s+1)/(r+1)`.
    LowerPositiveSource,
}

impl AdmissibleKind {
    pub fn is_upper(self) -> bool {
        matches!(
            self,
            AdmissibleKind::UpperZeroSource | AdmissibleKind::UpperPositiveSource
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            AdmissibleKind::UpperZeroSource => "upper (sigma=0)",
            AdmissibleKind::LowerZeroSource => "lower (sigma=0)",
            AdmissibleKind::UpperPositiveSource => "upper (sigma>0)",
            AdmissibleKind::LowerPositiveSource => "lower (sigma>0)",
        }
    }
}

/// One lambda interval with endpoint openness flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl LambdaInterval {
    pub fn contains(&self, x: f64) -> bool {
        let left = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let right = if self.hi_closed { x <= self.hi } else { x < self.hi };
        left && right
    }
}

impl std::fmt::Display for LambdaInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' },
        )
    }
}

/// An admissible lambda set. All four kinds are single intervals inside
/// `[0, (s+1)/r]`; the `intervals` vector is kept sorted and disjoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleSet {
    pub kind: AdmissibleKind,
    pub intervals: Vec<LambdaInterval>,
}

impl AdmissibleSet {
    pub fn interval(&self) -> &LambdaInterval {
        &self.intervals[0]
    }
}

/// Right endpoint of the upper-bound sets: `(s+1-q)/(r-(p-1))`.
///
/// Well defined whenever `q < s+1` (then `p-1 < r` follows from validity).
fn upper_cap(exps: &Exponents) -> f64 {
    (exps.s() + 1.0 - exps.q()) / (exps.r() - (exps.p() - 1.0))
}

/// Left threshold of the lower-bound sets: the smallest lambda with
/// `(s+1-λr)/(q-λ(p-1)) ≤ 1`, or `-inf` when the constraint is inactive.
fn lower_floor(exps: &Exponents) -> f64 {
    if exps.r() > exps.p() - 1.0 {
        upper_cap(exps)
    } else {
        f64::NEG_INFINITY
    }
}

/// Builds the requested admissible set.
pub fn admissible_set(
    exps: &Exponents,
    kind: AdmissibleKind,
) -> Result<AdmissibleSet, ThresholdError> {
    let (q, r, s) = (exps.q(), exps.r(), exps.s());
    let lmax = exps.lambda_max();
    let interval = match kind {
        AdmissibleKind::UpperZeroSource | AdmissibleKind::UpperPositiveSource => {
            if q >= s + 1.0 {
                return Err(ThresholdError::AssumptionViolated {
                    requirement: "q < s+1",
                });
            }
            let mut hi = 1.0f64.min(upper_cap(exps));
            if kind == AdmissibleKind::UpperPositiveSource {
                hi = hi.min((s + 1.0) / (r + 1.0));
            }
            LambdaInterval {
                lo: 0.0,
                hi,
                lo_closed: false,
                hi_closed: true,
            }
        }
        AdmissibleKind::LowerZeroSource | AdmissibleKind::LowerPositiveSource => {
            if r >= s + 1.0 {
                return Err(ThresholdError::AssumptionViolated {
                    requirement: "r < s+1",
                });
            }
            let mut lo = 1.0f64.max(lower_floor(exps));
            if kind == AdmissibleKind::LowerPositiveSource {
                lo = lo.max((s + 1.0) / (r + 1.0));
            }
            LambdaInterval {
                lo,
                hi: lmax,
                lo_closed: true,
                hi_closed: false,
            }
        }
    };
    Ok(AdmissibleSet {
        kind,
        intervals: vec![interval],
    })
}

/// A supremum of the threshold curve over an admissible set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Supremum {
    /// The supremum value.
    pub value: f64,
    /// Where it is achieved on the closure of the set.
    pub arg: f64,
    /// False when the maximizer sits at an excluded open endpoint, in which
    /// case `value` is a supremum, not an attained maximum.
    pub attained: bool,
}

/// Supremum of the threshold curve over the closure of an admissible set.
///
/// The curve is continuous, so the supremum over the set equals the maximum
/// over its closure; golden section handles the interior, endpoint values
/// are checked explicitly.
pub fn sup_threshold(
    exps: &Exponents,
    state: &ConstantState,
    set: &AdmissibleSet,
) -> Supremum {
    let iv = set.interval();
    let f = |lambda: f64| threshold_function_at(exps, state, lambda).unwrap_or(0.0);
    let width = iv.hi - iv.lo;
    let xtol = (width * 1e-12).max(1e-13);
    let (x_in, f_in) = golden_max(f, iv.lo, iv.hi, xtol);
    let candidates = [(iv.lo, f(iv.lo)), (x_in, f_in), (iv.hi, f(iv.hi))];
    let (mut arg, mut value) = candidates[0];
    for &(x, fx) in &candidates[1..] {
        if fx > value {
            arg = x;
            value = fx;
        }
    }
    let at_open_lo = !iv.lo_closed && (arg - iv.lo).abs() <= 2.0 * xtol;
    let at_open_hi = !iv.hi_closed && (iv.hi - arg).abs() <= 2.0 * xtol;
    Supremum {
        value,
        arg,
        attained: !(at_open_lo || at_open_hi),
    }
}

/// The thresholds report: `k1` governs the optimal upper bound, `k2` the
/// optimal lower bound, `k = min` the uniqueness regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub exponents: Exponents,
    pub sigma: f64,
    /// Supremum over the upper-bound set; absent when `q >= s+1`.
    pub k1: Option<Supremum>,
    /// Supremum over the lower-bound set; absent when `r >= s+1`.
    pub k2: Option<Supremum>,
    /// `min` of the available thresholds; absent when both are.
    pub k: Option<f64>,
    /// Maximizer of the zero-source curve (closed form).
    pub lambda_star: f64,
    pub upper_set: Option<AdmissibleSet>,
    pub lower_set: Option<AdmissibleSet>,
}

/// Computes `k1`, `k2` and `k` for the given source level. The zero-source
/// sets are used at `sigma = 0`, the capped sets at `sigma > 0`.
pub fn k_thresholds(exps: &Exponents, sigma: f64) -> Result<ThresholdReport, ThresholdError> {
    let state = constant_state(exps, sigma).map_err(|_| ThresholdError::SteadyState)?;
    let (upper_kind, lower_kind) = if sigma > 0.0 {
        (
            AdmissibleKind::UpperPositiveSource,
            AdmissibleKind::LowerPositiveSource,
        )
    } else {
        (
            AdmissibleKind::UpperZeroSource,
            AdmissibleKind::LowerZeroSource,
        )
    };

    let upper_set = admissible_set(exps, upper_kind).ok();
    let lower_set = admissible_set(exps, lower_kind).ok();
    let k1 = upper_set.as_ref().map(|s| sup_threshold(exps, &state, s));
    let k2 = lower_set.as_ref().map(|s| sup_threshold(exps, &state, s));
    let k = match (&k1, &k2) {
        (Some(a), Some(b)) => Some(a.value.min(b.value)),
        (Some(a), None) => Some(a.value),
        (None, Some(b)) => Some(b.value),
        (None, None) => None,
    };

    Ok(ThresholdReport {
        exponents: *exps,
        sigma,
        k1,
        k2,
        k,
        lambda_star: critical_lambda(exps),
        upper_set,
        lower_set,
    })
}

/// Source level at or above which every bifurcation value is negative:
///
/// ```text
/// sigma >= (p-1) p^((s+1)/(qr-(p-1)(s+1)) - 1)
/// ```
///
/// implies `p u*^(p-1-qr/(s+1)) <= 1`, emptying the bifurcation set for
/// every `d1 > 0`.
pub fn sigma_bifurcation_cutoff(exps: &Exponents) -> f64 {
    (exps.p() - 1.0) * exps.p().powf((exps.s() + 1.0) / exps.coupling_gap() - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference() -> Exponents {
        Exponents::new(2.0, 4.0, 2.0, 4.0).unwrap()
    }

    #[test]
    fn vanishes_at_endpoints_exactly() {
        for (exps, sigma) in [
            (reference(), 0.0),
            (reference(), 3.0),
            (Exponents::new(2.0, 1.0, 3.0, 0.0).unwrap(), 0.5),
        ] {
            assert_eq!(threshold_function(&exps, sigma, 0.0).unwrap(), 0.0);
            assert_eq!(
                threshold_function(&exps, sigma, exps.lambda_max()).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn rejects_lambda_outside_range() {
        let e = reference();
        assert_eq!(
            threshold_function(&e, 0.0, -0.1),
            Err(ThresholdError::DomainError)
        );
        assert_eq!(
            threshold_function(&e, 0.0, 2.6),
            Err(ThresholdError::DomainError)
        );
    }

    #[test]
    fn zero_source_closed_form() {
        // f0(1) = 1 * (5 - 2) / (4 - 1) = 1
        let e = reference();
        assert_relative_eq!(
            threshold_function(&e, 0.0, 1.0).unwrap(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn critical_lambda_reference_values() {
        // 10 / (4 + sqrt(6))
        let e = reference();
        assert_relative_eq!(
            critical_lambda(&e),
            10.0 / (4.0 + 6.0f64.sqrt()),
            max_relative = 1e-14
        );
        // peak value 11 - 4 sqrt(6)
        assert_relative_eq!(
            threshold_function(&e, 0.0, critical_lambda(&e)).unwrap(),
            11.0 - 4.0 * 6.0f64.sqrt(),
            max_relative = 1e-12
        );
        // (2,1,2,0): 1 - 1/sqrt(2)
        let e2 = Exponents::new(2.0, 1.0, 2.0, 0.0).unwrap();
        assert_relative_eq!(
            critical_lambda(&e2),
            1.0 - 1.0 / 2.0f64.sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn critical_lambda_is_interior_max() {
        for exps in [reference(), Exponents::new(2.0, 1.0, 2.0, 0.0).unwrap()] {
            let ls = critical_lambda(&exps);
            assert!(ls > 0.0 && ls < exps.lambda_max());
            let f = |l| threshold_function(&exps, 0.0, l).unwrap();
            assert!(f(ls) >= f(ls - 1e-4));
            assert!(f(ls) >= f(ls + 1e-4));
            // cross-check against golden-section maximization (argument
            // accuracy near a smooth peak is sqrt(machine eps))
            let (num, _) = golden_max(f, 0.0, exps.lambda_max(), 1e-12);
            assert_relative_eq!(ls, num, epsilon = 1e-6);
        }
    }

    #[test]
    fn admissible_sets_reference() {
        let e = reference();
        let l1 = admissible_set(&e, AdmissibleKind::UpperZeroSource).unwrap();
        let iv = *l1.interval();
        assert_eq!((iv.lo, iv.hi, iv.lo_closed, iv.hi_closed), (0.0, 1.0, false, true));

        let l2 = admissible_set(&e, AdmissibleKind::LowerZeroSource).unwrap();
        let iv = *l2.interval();
        assert_eq!((iv.lo, iv.hi, iv.lo_closed, iv.hi_closed), (1.0, 2.5, true, false));

        // L3 = (0,1] ∩ (0,1] ∩ (0,5/3] = (0,1]
        let l3 = admissible_set(&e, AdmissibleKind::UpperPositiveSource).unwrap();
        let iv = *l3.interval();
        assert_eq!((iv.lo, iv.hi), (0.0, 1.0));

        // L4 = [max(1, 5/3, 1), 5/2)
        let l4 = admissible_set(&e, AdmissibleKind::LowerPositiveSource).unwrap();
        let iv = *l4.interval();
        assert_relative_eq!(iv.lo, 5.0 / 3.0, max_relative = 1e-15);
        assert_eq!(iv.hi, 2.5);
    }

    #[test]
    fn admissible_set_hypotheses() {
        // q = 4 >= s+1 = 1: upper sets unavailable; r = 2 >= 1: lower too.
        let e = Exponents::new(2.0, 4.0, 2.0, 0.0).unwrap();
        assert!(matches!(
            admissible_set(&e, AdmissibleKind::UpperZeroSource),
            Err(ThresholdError::AssumptionViolated { .. })
        ));
        assert!(matches!(
            admissible_set(&e, AdmissibleKind::LowerPositiveSource),
            Err(ThresholdError::AssumptionViolated { .. })
        ));
    }

    #[test]
    fn intervals_inside_lambda_range() {
        for exps in [
            reference(),
            Exponents::new(2.0, 3.0, 2.0, 3.0).unwrap(),
            Exponents::new(3.0, 7.0, 1.0, 2.0).unwrap(),
        ] {
            for kind in [
                AdmissibleKind::UpperZeroSource,
                AdmissibleKind::LowerZeroSource,
                AdmissibleKind::UpperPositiveSource,
                AdmissibleKind::LowerPositiveSource,
            ] {
                if let Ok(set) = admissible_set(&exps, kind) {
                    let iv = set.interval();
                    assert!(iv.lo >= 0.0 && iv.hi <= exps.lambda_max());
                    assert!(iv.lo < iv.hi, "degenerate {kind:?} for {exps:?}");
                }
            }
        }
    }

    #[test]
    fn reference_thresholds() {
        let rep = k_thresholds(&reference(), 0.0).unwrap();
        let k1 = rep.k1.unwrap();
        let k2 = rep.k2.unwrap();
        assert_relative_eq!(k1.value, 1.0, epsilon = 1e-12);
        assert!(k1.attained);
        assert_relative_eq!(k2.value, 11.0 - 4.0 * 6.0f64.sqrt(), epsilon = 1e-10);
        assert!(k2.attained);
        assert_relative_eq!(rep.k.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn common_source_equal_orders_pins_k_at_one() {
        // p = r, q = s, s = r: k stays exactly 1 for every source level.
        let e = Exponents::new(2.0, 2.0, 2.0, 2.0).unwrap();
        for sigma in [0.0, 0.1, 1.0, 2.0, 10.0] {
            let rep = k_thresholds(&e, sigma).unwrap();
            assert_relative_eq!(rep.k.unwrap(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn sigma_cutoff_values() {
        let e = Exponents::new(2.0, 1.0, 2.0, 0.0).unwrap();
        assert_relative_eq!(sigma_bifurcation_cutoff(&e), 1.0, epsilon = 1e-14);
        // At the cutoff, p u*^(p-1-qr/(s+1)) = 2/(1+1) = 1.
        let st = constant_state(&e, 1.0).unwrap();
        let growth = e.p() * st.u.powf(e.reduced_power() - 1.0);
        assert_relative_eq!(growth, 1.0, max_relative = 1e-12);

        assert_relative_eq!(
            sigma_bifurcation_cutoff(&reference()),
            2f64.powf(2.0 / 3.0),
            max_relative = 1e-14
        );
    }
}
