//! Estimate verification against computed solutions.
//!
//! Every check is normalized to `lhs <= rhs` with `slack = rhs - lhs`; an
//! entry passes when `slack >= -tol`. Identities are emitted as a forward
//! and a reverse inequality sharing one tolerance. The estimates hold
//! exactly for the continuous system; a discrete solution violates them by
//! truncation error, so each tolerance carries an `h^2`-scaled term that is
//! measured from the field itself (discrete second differences for the
//! pointwise checks, the spread between two second-order quadrature rules
//! for the integral checks) and must vanish under grid refinement.

use serde::Serialize;
use thiserror::Error;

use crate::bounds::{
    bound_certificate, lower_amplitude_bound, upper_amplitude_bound, ModelParams,
};
use crate::field::SolutionField;
use crate::grid::Grid;
use crate::numeric::{golden_max, golden_min};
use crate::quad::{midpoint, trapezoid_of};
use crate::solver::{
    initial_guess, newton_solve, pseudo_time_march, residual, residual_norm, GuessKind,
    NewtonOptions,
};
use crate::spectrum::Domain;
use crate::steady::constant_state;
use crate::threshold::{admissible_set, AdmissibleKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("solution is not converged enough to grade estimates against")]
    NotConverged,
}

/// One verified estimate.
#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub check_name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; the entry passes iff `slack >= -tol`.
    pub slack: f64,
    pub tol: f64,
    pub passed: bool,
    /// Stable identifier of the estimate family this entry instantiates.
    pub anchor: &'static str,
}

fn entry(name: String, anchor: &'static str, lhs: f64, rhs: f64, tol: f64) -> CheckEntry {
    let slack = rhs - lhs;
    CheckEntry {
        check_name: name,
        lhs,
        rhs,
        slack,
        tol,
        passed: slack >= -tol,
        anchor,
    }
}

/// Emits an identity `lhs = rhs` as the two one-sided entries.
fn identity_entries(
    out: &mut Vec<CheckEntry>,
    name: &str,
    anchor: &'static str,
    lhs: f64,
    rhs: f64,
    tol: f64,
) {
    out.push(entry(format!("{name}/fwd"), anchor, lhs, rhs, tol));
    out.push(entry(format!("{name}/rev"), anchor, rhs, lhs, tol));
}

/// A full verification report.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub entries: Vec<CheckEntry>,
    pub overall: bool,
    /// Human-readable summary of the tolerance model in force.
    pub tolerances: String,
}

impl BoundsReport {
    pub fn from_entries(entries: Vec<CheckEntry>, tolerances: String) -> Self {
        let overall = entries.iter().all(|e| e.passed);
        Self {
            entries,
            overall,
            tolerances,
        }
    }

    pub fn to_text_table(&self) -> String {
        let mut out = String::new();
        out.push_str("status  slack          tol            lhs                rhs                check\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{}  {:<13.6e} {:<13.6e} {:<18.12e} {:<18.12e} {}\n",
                if e.passed { "PASS " } else { "FAIL " },
                e.slack,
                e.tol,
                e.lhs,
                e.rhs,
                e.check_name,
            ));
        }
        out.push_str(&format!(
            "overall: {}   ({})\n",
            if self.overall { "PASS" } else { "FAIL" },
            self.tolerances
        ));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Verifier convergence gate: a notch looser than the solver's own target.
fn require_converged(sol: &SolutionField) -> Result<(), VerifyError> {
    if sol.residual_norm <= 1e-8 * (1.0 + sol.scale()) {
        Ok(())
    } else {
        Err(VerifyError::NotConverged)
    }
}

/// Largest discrete second difference over both fields, the curvature scale
/// entering the pointwise tolerance model.
fn curvature_scale(sol: &SolutionField) -> f64 {
    let lap_u = sol.grid.laplacian(&sol.u);
    let lap_v = sol.grid.laplacian(&sol.v);
    lap_u
        .iter()
        .chain(lap_v.iter())
        .fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

fn h_squared(grid: &Grid) -> f64 {
    let h = if grid.is_1d() { grid.hx } else { grid.hx.max(grid.hy) };
    h * h
}

/// Pointwise extremal estimates.
///
/// The four basic inequalities relate the extremes of `u` and `v`; the
/// chain entries relate them further through `u / v^lambda` on an interior
/// lambda grid. At positive source the maximum principle also gives the
/// floor estimates `u > sigma`, `v > sigma^(r/(s+1))`.
pub fn check_pointwise(sol: &SolutionField) -> Result<Vec<CheckEntry>, VerifyError> {
    require_converged(sol)?;
    let params = &sol.params;
    let e = &params.exponents;
    let ex = sol.extremes();
    let (r, s) = (e.r(), e.s());
    let pw = r / (s + 1.0);
    let tol_base = curvature_scale(sol) * h_squared(&sol.grid);
    let tol = |scale: f64| 1e-9 * scale.max(1.0) + tol_base;

    let mut out = Vec::new();
    out.push(entry(
        "peak/v-vs-u".into(),
        "max-principle/inhibitor-peak",
        ex.v_max,
        ex.u_max.powf(pw),
        tol(ex.v_max),
    ));
    out.push(entry(
        "floor/v-vs-u".into(),
        "max-principle/inhibitor-floor",
        ex.u_min.powf(pw),
        ex.v_min,
        tol(ex.v_min),
    ));
    let act_floor = ex.u_min.powf(e.p()) / ex.v_max.powf(e.q()) + params.sigma;
    out.push(entry(
        "floor/u-reaction".into(),
        "max-principle/activator-floor",
        act_floor,
        ex.u_min,
        tol(ex.u_min.max(act_floor)),
    ));
    let act_peak = ex.u_max.powf(e.p()) / ex.v_min.powf(e.q()) + params.sigma;
    out.push(entry(
        "peak/u-reaction".into(),
        "max-principle/activator-peak",
        ex.u_max,
        act_peak,
        tol(ex.u_max.max(act_peak)),
    ));

    if params.sigma > 0.0 {
        out.push(entry(
            "floor/u-source".into(),
            "max-principle/source-floor",
            params.sigma,
            ex.u_min,
            tol(ex.u_min),
        ));
        out.push(entry(
            "floor/v-source".into(),
            "max-principle/source-floor",
            params.sigma.powf(pw),
            ex.v_min,
            tol(ex.v_min),
        ));
    }

    // Sandwich chain through u / v^lambda on an interior lambda grid.
    let lmax = e.lambda_max();
    let ratio = |lam: f64| {
        sol.u
            .iter()
            .zip(&sol.v)
            .map(|(&u, &v)| u / v.powf(lam))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
                (lo.min(t), hi.max(t))
            })
    };
    for frac in (1..10).map(|i| i as f64 / 10.0) {
        let lam = frac * lmax;
        let (inf_r, sup_r) = ratio(lam);
        let left = ex.u_min.powf(1.0 - pw * lam);
        let vl = ex.v_min.powf(1.0 / pw - lam);
        let vh = ex.v_max.powf(1.0 / pw - lam);
        let right = ex.u_max.powf(1.0 - pw * lam);
        let scale = sup_r.max(right).max(1.0);
        let chain = [
            (inf_r, left, "chain/inf-vs-ufloor"),
            (left, vl, "chain/ufloor-vs-vfloor"),
            (vl, vh, "chain/vfloor-vs-vpeak"),
            (vh, right, "chain/vpeak-vs-upeak"),
            (right, sup_r, "chain/upeak-vs-sup"),
        ];
        for (lhs, rhs, anchor) in chain {
            out.push(entry(
                format!("{anchor} lambda={lam:.3}"),
                "extremes-chain",
                lhs,
                rhs,
                tol(scale),
            ));
        }
    }
    Ok(out)
}

/// Integral identities and inequalities.
///
/// Integrals are evaluated with the midpoint rule on the linear
/// interpolant; the spread against the nodal trapezoid rule serves as the
/// per-entry quadrature error estimate, which scales like `h^2` and
/// vanishes on constant states.
pub fn check_integrals(sol: &SolutionField) -> Result<Vec<CheckEntry>, VerifyError> {
    require_converged(sol)?;
    let params = &sol.params;
    let e = &params.exponents;
    let (p, q, r, s) = (e.p(), e.q(), e.r(), e.s());
    let sigma = params.sigma;
    let grid = &sol.grid;
    let omega = grid.domain.measure();

    // midpoint value and embedded quadrature-error estimate
    let int = |phi: &dyn Fn(f64, f64) -> f64| {
        let m = midpoint(grid, &sol.u, &sol.v, phi);
        let t = trapezoid_of(grid, &sol.u, &sol.v, phi);
        (m, (m - t).abs())
    };
    let tol_of = |spreads: &[f64], scale: f64| 1.2 * spreads.iter().sum::<f64>() + 1e-9 * scale.max(1.0);

    let mut out = Vec::new();

    // (1) integral balance of the activator equation
    let (act, act_err) = int(&|u, v| u.powf(p) / v.powf(q));
    let (mean_u, mean_u_err) = int(&|u, _| u);
    identity_entries(
        &mut out,
        "integral/u-balance",
        "integral-identity/activator",
        act + sigma * omega,
        mean_u,
        tol_of(&[act_err, mean_u_err], mean_u.abs() + act.abs()),
    );

    // (2) damped activator mass
    let (lhs2, e2a) = int(&|u, v| u.powf(p - 1.0) / v.powf(q));
    let (inv_u, e2b) = if sigma > 0.0 {
        int(&|u, _| 1.0 / u)
    } else {
        (0.0, 0.0)
    };
    out.push(entry(
        "integral/damped-activator".into(),
        "integral-inequality/damped-activator",
        lhs2 + sigma * inv_u,
        omega,
        tol_of(&[e2a, sigma * e2b], omega),
    ));

    // (3) reciprocal masses
    let (lhs3a, e3a) = int(&|_, v| 1.0 / v.powf(q));
    let (lhs3b, e3b) = if sigma > 0.0 {
        int(&|u, _| 1.0 / u.powf(p))
    } else {
        (0.0, 0.0)
    };
    let (rhs3, e3c) = int(&|u, _| 1.0 / u.powf(p - 1.0));
    out.push(entry(
        "integral/reciprocal".into(),
        "integral-inequality/reciprocal",
        lhs3a + sigma * lhs3b,
        rhs3,
        tol_of(&[e3a, sigma * e3b, e3c], rhs3.abs()),
    ));

    // (4) integral balance of the inhibitor equation
    let (inh, inh_err) = int(&|u, v| u.powf(r) / v.powf(s));
    let (mean_v, mean_v_err) = int(&|_, v| v);
    identity_entries(
        &mut out,
        "integral/v-balance",
        "integral-identity/inhibitor",
        inh,
        mean_v,
        tol_of(&[inh_err, mean_v_err], mean_v.abs() + inh.abs()),
    );

    // (5) saturated inhibitor quotient
    let (lhs5, e5) = int(&|u, v| u.powf(r) / v.powf(s + 1.0));
    out.push(entry(
        "integral/quotient-mass".into(),
        "integral-inequality/quotient-mass",
        lhs5,
        omega,
        tol_of(&[e5], omega),
    ));

    // (6) inhibitor power mass
    let (lhs6, e6a) = int(&|_, v| v.powf(s + 1.0));
    let (rhs6, e6b) = int(&|u, _| u.powf(r));
    out.push(entry(
        "integral/inhibitor-power".into(),
        "integral-inequality/inhibitor-power",
        lhs6,
        rhs6,
        tol_of(&[e6a, e6b], rhs6.abs()),
    ));

    Ok(out)
}

/// Optimal and explicit amplitude bounds, gated on the certificate.
///
/// Only regimes the certificate grants are asserted. At zero source the
/// free-lambda explicit bounds are optimized by golden section and checked
/// against the computed extremes.
pub fn check_theorem_bounds(sol: &SolutionField) -> Result<Vec<CheckEntry>, VerifyError> {
    require_converged(sol)?;
    let params = &sol.params;
    let ex = sol.extremes();
    let st = constant_state(&params.exponents, params.sigma).map_err(|_| VerifyError::NotConverged)?;
    let tol_b = 1e-6 + curvature_scale(sol) * h_squared(&sol.grid);

    let mut out = Vec::new();
    let cert = match bound_certificate(params) {
        Ok(c) => c,
        Err(_) => {
            return Ok(out);
        }
    };

    if cert.upper_holds {
        out.push(entry(
            "optimal/u-upper".into(),
            "optimal-bound/upper",
            ex.u_max,
            st.u,
            tol_b * st.u,
        ));
        out.push(entry(
            "optimal/v-upper".into(),
            "optimal-bound/upper",
            ex.v_max,
            st.v,
            tol_b * st.v,
        ));
    }
    if cert.lower_holds {
        out.push(entry(
            "optimal/u-lower".into(),
            "optimal-bound/lower",
            st.u,
            ex.u_min,
            tol_b * st.u,
        ));
        out.push(entry(
            "optimal/v-lower".into(),
            "optimal-bound/lower",
            st.v,
            ex.v_min,
            tol_b * st.v,
        ));
    }

    // Free-lambda explicit bounds at zero source.
    if params.sigma == 0.0 {
        if let Ok(set) = admissible_set(&params.exponents, AdmissibleKind::UpperZeroSource) {
            let iv = set.interval();
            let hi = iv.hi.min(params.ratio());
            if hi > 1e-9 {
                let pad = 1e-7 * hi;
                let (_, best) = golden_min(
                    |lam| upper_amplitude_bound(params, lam).unwrap_or(f64::INFINITY),
                    pad,
                    hi - pad,
                    1e-8,
                );
                if best.is_finite() {
                    out.push(entry(
                        "explicit/u-upper".into(),
                        "explicit-bound/upper",
                        ex.u_max,
                        best,
                        tol_b * best,
                    ));
                }
            }
        }
        if let Ok(set) = admissible_set(&params.exponents, AdmissibleKind::LowerZeroSource) {
            let iv = set.interval();
            let lo = iv.lo.max(params.ratio());
            if lo < iv.hi - 1e-9 {
                let pad = 1e-7 * (iv.hi - lo);
                let (_, best) = golden_max(
                    |lam| lower_amplitude_bound(params, lam).unwrap_or(0.0),
                    lo + pad,
                    iv.hi - pad,
                    1e-8,
                );
                if best > 0.0 {
                    out.push(entry(
                        "explicit/u-lower".into(),
                        "explicit-bound/lower",
                        best,
                        ex.u_min,
                        tol_b * best.max(1.0),
                    ));
                }
            }
        }
    }

    Ok(out)
}

/// Runs all applicable checks and assembles the report.
pub fn full_report(sol: &SolutionField) -> Result<BoundsReport, VerifyError> {
    let mut entries = check_pointwise(sol)?;
    entries.extend(check_integrals(sol)?);
    entries.extend(check_theorem_bounds(sol)?);
    let h2 = h_squared(&sol.grid);
    Ok(BoundsReport::from_entries(
        entries,
        format!(
            "pointwise tol = 1e-9*scale + C_h*h^2 with measured C_h; integral tol = 1.2*(midpoint-trapezoid spread) + 1e-9*scale; h^2 = {h2:.3e}"
        ),
    ))
}

/// One cell of a nonexistence scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub d1: f64,
    pub d2: f64,
    pub runs: usize,
    pub converged: usize,
    pub nonconstant: usize,
    /// Extremes of the last nonconstant solution found, or of a converged
    /// constant state when every run collapsed to it.
    pub u_max: Option<f64>,
    pub u_min: Option<f64>,
    pub v_max: Option<f64>,
    pub v_min: Option<f64>,
}

/// Result of sweeping `d1` and probing for nonconstant steady states.
#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    /// Smallest grid value such that every cell from it onward collapsed to
    /// the constant state; `None` when the top cell still found patterns.
    pub empirical_cutoff: Option<f64>,
}

/// Probes one parameter cell with `seeds` randomized guesses (alternating
/// perturbed and spike shapes), each globalized by a short march and
/// polished by Newton. Degenerate floor collapses are not counted as
/// converged. Deterministic in `(base_seed, cell)`.
pub fn scan_cell(
    params: &ModelParams,
    grid_n: usize,
    domain: &Domain,
    seeds: usize,
    base_seed: u64,
    cell: usize,
) -> ScanRow {
    assert!(seeds >= 1);
    let opts = NewtonOptions::default();
    let grid = Grid::from_domain(domain, grid_n, grid_n);
    let mut converged = 0usize;
    let mut nonconstant = 0usize;
    let mut last_pattern: Option<crate::field::Extremes> = None;
    let mut last_constant: Option<crate::field::Extremes> = None;

    for run in 0..seeds {
        let seed = base_seed
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add((cell * 1024 + run) as u64);
        let guess = if run % 2 == 0 {
            initial_guess(GuessKind::Perturbed { eps: 0.1, seed }, &grid, params)
        } else {
            let frac = (run % 4) as f64 / 4.0;
            initial_guess(
                GuessKind::Spike {
                    amplitude: f64::NAN,
                    width: (3 + run % 3) as f64 * grid.hx,
                    center: (frac, 0.0),
                },
                &grid,
                params,
            )
        };
        // globalize, then polish
        let mut dt = 0.2;
        let mut marched = None;
        for _ in 0..4 {
            match pseudo_time_march(&guess, None, dt, 150) {
                Ok(f) => {
                    marched = Some(f);
                    break;
                }
                Err(_) => dt *= 0.25,
            }
        }
        let start = marched.unwrap_or_else(|| guess.clone());
        if let Ok(res) = newton_solve(&start, None, &opts) {
            if res.field.is_collapsed() {
                continue;
            }
            converged += 1;
            if res.field.is_constant(1e-6) {
                last_constant = Some(res.field.extremes());
            } else {
                nonconstant += 1;
                last_pattern = Some(res.field.extremes());
            }
        }
    }

    let ex = last_pattern.or(last_constant);
    ScanRow {
        d1: params.d1,
        d2: params.d2,
        runs: seeds,
        converged,
        nonconstant,
        u_max: ex.map(|e| e.u_max),
        u_min: ex.map(|e| e.u_min),
        v_max: ex.map(|e| e.v_max),
        v_min: ex.map(|e| e.v_min),
    }
}

/// Sweeps `d1`, solving from several randomized perturbed and spike initial
/// guesses per cell, and records where nonconstant solutions stop appearing.
///
/// Failures to converge are recorded, never fatal.
pub fn nonexistence_scan(
    params_for: impl Fn(f64) -> ModelParams,
    d1_grid: &[f64],
    grid_n: usize,
    domain: &Domain,
    seeds: usize,
    base_seed: u64,
) -> ScanReport {
    let rows: Vec<ScanRow> = d1_grid
        .iter()
        .enumerate()
        .map(|(cell, &d1)| scan_cell(&params_for(d1), grid_n, domain, seeds, base_seed, cell))
        .collect();

    // The cutoff is the start of the maximal all-constant suffix; none if
    // the top cell still found patterns.
    let cutoff = if rows.last().map(|r| r.nonconstant > 0).unwrap_or(true) {
        None
    } else {
        let mut c = None;
        for row in rows.iter().rev() {
            if row.nonconstant == 0 {
                c = Some(row.d1);
            } else {
                break;
            }
        }
        c
    };

    ScanReport {
        rows,
        empirical_cutoff: cutoff,
    }
}

/// Convenience driver: guess, march, polish. Used by the CLI and tests.
pub fn solve_steady(
    params: &ModelParams,
    grid: &Grid,
    kind: GuessKind,
    march_steps: usize,
    dt: f64,
) -> Result<crate::solver::NewtonResult, crate::solver::SolverError> {
    let guess = initial_guess(kind, grid, params);
    let start = if march_steps > 0 {
        let mut dt = dt;
        let mut out = None;
        for _ in 0..4 {
            match pseudo_time_march(&guess, None, dt, march_steps) {
                Ok(f) => {
                    out = Some(f);
                    break;
                }
                Err(_) => dt *= 0.25,
            }
        }
        out.unwrap_or(guess)
    } else {
        guess
    };
    newton_solve(&start, None, &NewtonOptions::default())
}

/// Recomputes the residual norm of a (possibly deserialized) field.
pub fn recompute_residual(sol: &mut SolutionField) -> Result<(), crate::solver::SolverError> {
    let (ru, rv) = residual(sol, None)?;
    sol.residual_norm = residual_norm(&ru, &rv);
    Ok(())
}
