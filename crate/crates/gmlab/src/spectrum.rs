//! Neumann Laplacian spectra on model domains, bifurcation values, and the
//! mode-count parity that drives the degree-theoretic existence argument.
//!
//! On an interval `[0, L]` the Neumann eigenvalues are `(i pi / L)^2`; on a
//! rectangle they are sums of two such terms over integer mode pairs, merged
//! by multiplicity. The linearization around the constant state is singular
//! on mode `i` exactly when the activator diffusion hits
//!
//! ```text
//! d1 = d1i = (1/lambda_i) [ p u*^(p-1-qr/(s+1)) - 1
//!                           - qr u*^(p-1-qr/(s+1)) / (s+1 + d2 lambda_i) ].
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exponents::Exponents;
use crate::steady::{constant_state, SteadyStateError};

/// A model domain with an exactly computable Neumann spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Interval { length: f64 },
    Rectangle { lx: f64, ly: f64 },
}

impl Domain {
    pub fn measure(&self) -> f64 {
        match *self {
            Domain::Interval { length } => length,
            Domain::Rectangle { lx, ly } => lx * ly,
        }
    }

    pub fn validate(&self) -> Result<(), SpectrumError> {
        let ok = match *self {
            Domain::Interval { length } => length > 0.0 && length.is_finite(),
            Domain::Rectangle { lx, ly } => {
                lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(SpectrumError::InvalidDomain)
        }
    }
}

/// One distinct Neumann eigenvalue with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    /// Index among distinct eigenvalues, starting at 0 for the constant mode.
    pub index: usize,
    pub lambda: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SpectrumError {
    #[error("domain lengths must be positive and finite")]
    InvalidDomain,
    /// The computed window of bifurcation values cannot certify that all
    /// later ones lie below the probed diffusion; increase `count`.
    #[error("bifurcation tail not certified below d1; increase the eigenvalue count")]
    TruncationUnsafe,
    #[error("constant state solve failed")]
    SteadyState(#[from] SteadyStateError),
}

/// First `count` distinct Neumann eigenvalues with multiplicities, in
/// increasing order starting from `lambda_0 = 0`.
///
/// Rectangle eigenvalues that agree within a relative `1e-12` are merged
/// into one entry with summed multiplicity.
pub fn neumann_eigenvalues(domain: &Domain, count: usize) -> Result<Vec<SpectrumEntry>, SpectrumError> {
    domain.validate()?;
    assert!(count >= 1);
    match *domain {
        Domain::Interval { length } => Ok((0..count)
            .map(|i| {
                let k = i as f64 * std::f64::consts::PI / length;
                SpectrumEntry {
                    index: i,
                    lambda: k * k,
                    multiplicity: 1,
                }
            })
            .collect()),
        Domain::Rectangle { lx, ly } => Ok(rectangle_spectrum(lx, ly, count)),
    }
}

fn rectangle_spectrum(lx: f64, ly: f64, count: usize) -> Vec<SpectrumEntry> {
    let pi = std::f64::consts::PI;
    let kx = |i: usize| {
        let k = i as f64 * pi / lx;
        k * k
    };
    let ky = |j: usize| {
        let k = j as f64 * pi / ly;
        k * k
    };

    // Enumerate mode pairs up to an axis cap, growing the cap until the
    // count-th distinct value is provably below anything the cap excludes.
    let mut cap = count.max(4);
    loop {
        let mut values: Vec<f64> = Vec::with_capacity((cap + 1) * (cap + 1));
        for i in 0..=cap {
            for j in 0..=cap {
                values.push(kx(i) + ky(j));
            }
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let mut merged: Vec<(f64, usize)> = Vec::new();
        for v in values {
            match merged.last_mut() {
                Some((rep, m)) if (v - *rep).abs() <= 1e-12 * rep.max(1.0) => *m += 1,
                _ => merged.push((v, 1)),
            }
        }

        if merged.len() >= count {
            let last = merged[count - 1].0;
            // Any excluded pair has one index > cap, hence eigenvalue at
            // least min(kx, ky) at cap+1.
            let excluded_min = kx(cap + 1).min(ky(cap + 1));
            if excluded_min > last {
                return merged
                    .into_iter()
                    .take(count)
                    .enumerate()
                    .map(|(index, (lambda, multiplicity))| SpectrumEntry {
                        index,
                        lambda,
                        multiplicity,
                    })
                    .collect();
            }
        }
        cap *= 2;
    }
}

/// `f_u` at the constant state: `p u*^(p-1-qr/(s+1)) - 1`, the activator
/// self-amplification rate of the linearization.
pub fn activator_growth_rate(exps: &Exponents, sigma: f64) -> Result<f64, SpectrumError> {
    let st = constant_state(exps, sigma)?;
    Ok(exps.p() * st.u.powf(exps.reduced_power() - 1.0) - 1.0)
}

/// Bifurcation value on the `i`-th nonconstant mode.
fn d1_value(exps: &Exponents, u_star: f64, d2: f64, lambda_i: f64) -> f64 {
    let w = u_star.powf(exps.reduced_power() - 1.0);
    (exps.p() * w
        - 1.0
        - exps.q() * exps.r() * w / (exps.s() + 1.0 + d2 * lambda_i))
        / lambda_i
}

/// Bifurcation values `d1i` for modes `i = 1..=count`.
///
/// At `sigma = 0` this reduces to `(p - 1 - qr/(s+1+d2 lambda_i)) / lambda_i`.
pub fn bifurcation_values(
    exps: &Exponents,
    sigma: f64,
    d2: f64,
    domain: &Domain,
    count: usize,
) -> Result<Vec<f64>, SpectrumError> {
    let st = constant_state(exps, sigma)?;
    let spectrum = neumann_eigenvalues(domain, count + 1)?;
    Ok(spectrum[1..]
        .iter()
        .map(|e| d1_value(exps, st.u, d2, e.lambda))
        .collect())
}

/// One mode of the bifurcation table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BifurcationEntry {
    pub index: usize,
    pub lambda: f64,
    pub multiplicity: usize,
    pub d1i: f64,
}

/// The bifurcation set at a given `d1`: which modes are still above `d1`,
/// and their total multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationSet {
    pub entries: Vec<BifurcationEntry>,
    /// Indices `i >= 1` with `d1 < d1i`.
    pub active: Vec<usize>,
    /// Total multiplicity of the active modes.
    pub parity_count: usize,
    pub d1: f64,
    pub d2: f64,
    /// `d1` sits within `1e-9 * max(1, d1)` of some bifurcation value, where
    /// the linearization is singular and the parity count is unreliable.
    pub is_resonant: bool,
}

impl BifurcationSet {
    pub fn parity_is_odd(&self) -> bool {
        self.parity_count % 2 == 1
    }
}

/// Computes the bifurcation set over the first `count` nonconstant modes.
///
/// The tail is certified by the decay bound `d1i <= f_u / lambda_i`: once
/// `f_u / lambda_count < d1`, no excluded mode can be active. Errors with
/// [`SpectrumError::TruncationUnsafe`] otherwise.
pub fn parity(
    exps: &Exponents,
    sigma: f64,
    d1: f64,
    d2: f64,
    domain: &Domain,
    count: usize,
) -> Result<BifurcationSet, SpectrumError> {
    let st = constant_state(exps, sigma)?;
    let spectrum = neumann_eigenvalues(domain, count + 1)?;
    let entries: Vec<BifurcationEntry> = spectrum[1..]
        .iter()
        .map(|e| BifurcationEntry {
            index: e.index,
            lambda: e.lambda,
            multiplicity: e.multiplicity,
            d1i: d1_value(exps, st.u, d2, e.lambda),
        })
        .collect();

    let growth = exps.p() * st.u.powf(exps.reduced_power() - 1.0) - 1.0;
    let last_lambda = entries.last().expect("count >= 1").lambda;
    let tail_certified = growth <= 0.0 || growth / last_lambda < d1;
    if !tail_certified {
        return Err(SpectrumError::TruncationUnsafe);
    }

    let active: Vec<usize> = entries
        .iter()
        .filter(|e| d1 < e.d1i)
        .map(|e| e.index)
        .collect();
    let parity_count = entries
        .iter()
        .filter(|e| d1 < e.d1i)
        .map(|e| e.multiplicity)
        .sum();
    let is_resonant = entries
        .iter()
        .any(|e| (d1 - e.d1i).abs() < 1e-9 * d1.max(1.0));

    Ok(BifurcationSet {
        entries,
        active,
        parity_count,
        d1,
        d2,
        is_resonant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn interval_spectrum_exact() {
        let sp = neumann_eigenvalues(&Domain::Interval { length: PI }, 4).unwrap();
        let lambdas: Vec<f64> = sp.iter().map(|e| e.lambda).collect();
        for (got, want) in lambdas.iter().zip([0.0, 1.0, 4.0, 9.0]) {
            assert_relative_eq!(got, &want, epsilon = 1e-12);
        }
        assert!(sp.iter().all(|e| e.multiplicity == 1));
    }

    #[test]
    fn unit_square_multiplicities() {
        // Brute-force oracle: i^2 + j^2 = 25 has solutions (0,5),(5,0),(3,4),(4,3).
        let mut oracle = 0;
        for i in 0..=10u32 {
            for j in 0..=10u32 {
                if i * i + j * j == 25 {
                    oracle += 1;
                }
            }
        }
        assert_eq!(oracle, 4);

        let sp = neumann_eigenvalues(&Domain::Rectangle { lx: 1.0, ly: 1.0 }, 40).unwrap();
        let target = PI * PI * 25.0;
        let entry = sp
            .iter()
            .find(|e| (e.lambda - target).abs() < 1e-9 * target)
            .expect("eigenvalue 25 pi^2 within the first 40 distinct");
        assert_eq!(entry.multiplicity, oracle);
    }

    #[test]
    fn rectangle_first_nonzero_mode() {
        // (pi, pi/2): lambda_1 = min(1, 4) = 1 from mode (1,0).
        let sp = neumann_eigenvalues(
            &Domain::Rectangle {
                lx: PI,
                ly: PI / 2.0,
            },
            2,
        )
        .unwrap();
        assert_relative_eq!(sp[1].lambda, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rectangle_matches_brute_force() {
        // Independent enumeration over a large fixed index window.
        let (lx, ly) = (1.7, 0.9);
        let mut all: Vec<f64> = Vec::new();
        for i in 0..100usize {
            for j in 0..100usize {
                let v = (i as f64 * PI / lx).powi(2) + (j as f64 * PI / ly).powi(2);
                all.push(v);
            }
        }
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut merged: Vec<(f64, usize)> = Vec::new();
        for v in all {
            match merged.last_mut() {
                Some((rep, m)) if (v - *rep).abs() <= 1e-12 * rep.max(1.0) => *m += 1,
                _ => merged.push((v, 1)),
            }
        }

        let sp = neumann_eigenvalues(&Domain::Rectangle { lx, ly }, 30).unwrap();
        for (e, (lam, mult)) in sp.iter().zip(merged.iter()) {
            assert_relative_eq!(e.lambda, lam, max_relative = 1e-12);
            assert_eq!(e.multiplicity, *mult);
        }
    }

    #[test]
    fn bifurcation_value_reference() {
        // (2,1,2,0), sigma=0, d2=10, interval pi: d11 = 1 - 2/11 = 9/11.
        let e = Exponents::new(2.0, 1.0, 2.0, 0.0).unwrap();
        let vals =
            bifurcation_values(&e, 0.0, 10.0, &Domain::Interval { length: PI }, 2).unwrap();
        assert_relative_eq!(vals[0], 9.0 / 11.0, epsilon = 1e-13);
        assert_relative_eq!(vals[1], 0.25 * (1.0 - 2.0 / 41.0), epsilon = 1e-13);
    }

    #[test]
    fn general_formula_reduces_at_zero_source() {
        let e = Exponents::new(2.5, 3.0, 2.0, 1.5).unwrap();
        let domain = Domain::Interval { length: 1.3 };
        let vals = bifurcation_values(&e, 0.0, 7.0, &domain, 6).unwrap();
        let sp = neumann_eigenvalues(&domain, 7).unwrap();
        for (v, entry) in vals.iter().zip(&sp[1..]) {
            let reduced = (e.p() - 1.0
                - e.q() * e.r() / (e.s() + 1.0 + 7.0 * entry.lambda))
                / entry.lambda;
            assert_relative_eq!(v, &reduced, epsilon = 1e-14);
        }
    }

    #[test]
    fn large_d2_limit() {
        let e = Exponents::new(2.0, 1.0, 2.0, 0.0).unwrap();
        let domain = Domain::Interval { length: PI };
        let vals = bifurcation_values(&e, 0.0, 1e12, &domain, 3).unwrap();
        let sp = neumann_eigenvalues(&domain, 4).unwrap();
        for (v, entry) in vals.iter().zip(&sp[1..]) {
            assert_relative_eq!(v, &((e.p() - 1.0) / entry.lambda), max_relative = 1e-9);
        }
    }

    #[test]
    fn parity_reference_case() {
        let e = Exponents::new(2.0, 1.0, 2.0, 0.0).unwrap();
        let set = parity(&e, 0.0, 0.5, 10.0, &Domain::Interval { length: PI }, 50).unwrap();
        assert_eq!(set.active, vec![1]);
        assert_eq!(set.parity_count, 1);
        assert!(!set.is_resonant);
        assert!(set.parity_is_odd());
    }

    #[test]
    fn parity_empty_above_all_values() {
        let e = Exponents::new(2.0, 1.0, 2.0, 0.0).unwrap();
        let set = parity(&e, 0.0, 2.0, 10.0, &Domain::Interval { length: PI }, 50).unwrap();
        assert_eq!(set.parity_count, 0);
        assert!(set.active.is_empty());
    }

    #[test]
    fn parity_resonance_flag() {
        let e = Exponents::new(2.0, 1.0, 2.0, 0.0).unwrap();
        let set = parity(
            &e,
            0.0,
            9.0 / 11.0,
            10.0,
            &Domain::Interval { length: PI },
            50,
        )
        .unwrap();
        assert!(set.is_resonant);
    }

    #[test]
    fn truncation_guard_rejects_small_windows() {
        // d1 tiny: the tail bound f_u / lambda_count stays above d1 for a
        // short window.
        let e = Exponents::new(2.0, 1.0, 2.0, 0.0).unwrap();
        let err = parity(&e, 0.0, 1e-6, 10.0, &Domain::Interval { length: PI }, 50);
        assert!(matches!(err, Err(SpectrumError::TruncationUnsafe)));
        // A large enough window certifies.
        let ok = parity(&e, 0.0, 1e-6, 10.0, &Domain::Interval { length: PI }, 1200);
        assert!(ok.is_ok());
    }

    #[test]
    fn no_positive_values_at_or_above_sigma_cutoff() {
        let e = Exponents::new(2.0, 1.0, 2.0, 0.0).unwrap();
        let cutoff = crate::threshold::sigma_bifurcation_cutoff(&e);
        for sigma in [cutoff, cutoff + 0.5, cutoff * 3.0] {
            let vals =
                bifurcation_values(&e, sigma, 10.0, &Domain::Interval { length: PI }, 30)
                    .unwrap();
            assert!(vals.iter().all(|&v| v <= 1e-13), "sigma={sigma}: {vals:?}");
        }
    }
}
