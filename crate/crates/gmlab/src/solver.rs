//! Steady-state solver: discrete residual, analytic Jacobian, damped Newton
//! iteration, semi-implicit pseudo-time marching, and homotopy continuation
//! along the deformation family.
//!
//! The deformation family interpolates between a trivially solvable system
//! at `tau = 0` (unique solution: both fields constant at `rho`) and the
//! full stationary system at `tau = 1`:
//!
//! ```text
//! d1 lap(u) - u + tau (u^p/v^q + sigma) + (1 - tau) rho = 0
//! d2 lap(v) - v + tau u^r/v^s + (1 - chi_tau) rho = 0,   chi_tau = min(2 tau, 1)
//! ```

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bounds::ModelParams;
use crate::field::SolutionField;
use crate::grid::Grid;
use crate::linalg::{BandLu, BandMatrix};
use crate::numeric::fpow;
use crate::steady::constant_state;

/// Positivity floor: Newton steps may not take any nodal value below this,
/// and the march clamps at it.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

/// Newton succeeds when the residual max-norm drops below
/// `NEWTON_TOL * (1 + field scale)` plus the evaluation noise floor.
pub const NEWTON_TOL: f64 = 1e-10;

/// Attainable floor of the discrete residual in `f64`.
///
/// Nodal values are quantized at one ulp, and the diffusion term maps a
/// one-ulp change of a node into a residual change of `d * eps * |f| / h^2`.
/// Corrections the equations demand below that granularity are not
/// representable, so no iteration can push the residual under this level;
/// on fine grids with large `d2` it exceeds `NEWTON_TOL * scale`.
pub fn residual_noise_floor(field: &SolutionField) -> f64 {
    let grid = &field.grid;
    let lap_amp = if grid.is_1d() {
        1.0 / (grid.hx * grid.hx)
    } else {
        1.0 / (grid.hx * grid.hx) + 1.0 / (grid.hy * grid.hy)
    };
    let peak = |xs: &[f64]| xs.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let params = &field.params;
    let amp = (params.d1 * peak(&field.u) + params.d2 * peak(&field.v)) * lap_amp;
    4.0 * f64::EPSILON * (amp + 1.0 + params.sigma + field.scale())
}

/// Deformation parameters: `tau` moves from the trivial system to the full
/// one, `rho` is the constant source of the trivial system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomotopyParams {
    pub tau: f64,
    pub rho: f64,
}

impl HomotopyParams {
    /// The switch `chi_tau = min(2 tau, 1)`: the inhibitor source ramps out
    /// twice as fast and is gone from `tau = 1/2` on.
    pub fn chi(&self) -> f64 {
        (2.0 * self.tau).min(1.0)
    }
}

#[derive(Debug, Clone, Error)]
pub enum SolverError {
    #[error("field has a non-positive entry")]
    NonPositiveField,
    #[error("linear solve failed (singular Jacobian, likely at a bifurcation point)")]
    LinearSolveFailure,
    #[error("Newton did not converge: best residual {best_residual:.3e}")]
    NoConvergence {
        best: Box<SolutionField>,
        best_residual: f64,
    },
    #[error("pseudo-time march blew up at step {step}")]
    BlowUp { step: usize },
    /// The march decayed to the positivity floor everywhere. The zero state
    /// solves the equations but is excluded by positivity; reaching it means
    /// the dynamics left the basin of any positive steady state.
    #[error("pseudo-time march collapsed to the positivity floor at step {step}")]
    Extinction { step: usize },
    #[error("homotopy path failed at tau = {tau}")]
    PathFailure { tau: f64 },
}

/// Reaction terms of the (possibly deformed) system at a single node.
#[inline]
fn reaction(params: &ModelParams, hom: Option<&HomotopyParams>, u: f64, v: f64) -> (f64, f64) {
    let e = &params.exponents;
    let act = fpow(u, e.p()) / fpow(v, e.q());
    let inh = fpow(u, e.r()) / fpow(v, e.s());
    match hom {
        None => (act + params.sigma, inh),
        Some(h) => (
            h.tau * (act + params.sigma) + (1.0 - h.tau) * h.rho,
            h.tau * inh + (1.0 - h.chi()) * h.rho,
        ),
    }
}

/// Discrete residual of the stationary (or deformed) system.
///
/// Returns the two nodal residual vectors. Errors when the field touches
/// zero or below, where the reaction quotients are undefined.
pub fn residual(
    field: &SolutionField,
    hom: Option<&HomotopyParams>,
) -> Result<(Vec<f64>, Vec<f64>), SolverError> {
    if !field.is_positive() {
        return Err(SolverError::NonPositiveField);
    }
    let params = &field.params;
    let lap_u = field.grid.laplacian(&field.u);
    let lap_v = field.grid.laplacian(&field.v);
    let n = field.grid.node_count();
    let mut ru = vec![0.0; n];
    let mut rv = vec![0.0; n];
    for k in 0..n {
        let (fu, fv) = reaction(params, hom, field.u[k], field.v[k]);
        ru[k] = params.d1 * lap_u[k] - field.u[k] + fu;
        rv[k] = params.d2 * lap_v[k] - field.v[k] + fv;
    }
    Ok((ru, rv))
}

/// Max-norm over both residual components.
pub fn residual_norm(ru: &[f64], rv: &[f64]) -> f64 {
    ru.iter()
        .chain(rv.iter())
        .fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

/// Assembles the analytic Jacobian as a banded matrix with the unknowns
/// interleaved per node (`u_k -> 2k`, `v_k -> 2k+1`).
///
/// Reaction derivatives: `d(u^p/v^q)/du = p u^(p-1)/v^q`,
/// `d(u^p/v^q)/dv = -q u^p/v^(q+1)`, and likewise for `u^r/v^s`.
pub fn jacobian(
    field: &SolutionField,
    hom: Option<&HomotopyParams>,
) -> Result<BandMatrix, SolverError> {
    if !field.is_positive() {
        return Err(SolverError::NonPositiveField);
    }
    let params = &field.params;
    let e = &params.exponents;
    let grid = &field.grid;
    let n = grid.node_count();
    let bw = 2 * grid.stencil_stride();
    let mut jac = BandMatrix::new(2 * n, bw, bw);
    let tau = hom.map(|h| h.tau).unwrap_or(1.0);
    let diag = grid.laplacian_diag();

    for k in 0..n {
        let (u, v) = (field.u[k], field.v[k]);
        let act_du = e.p() * fpow(u, e.p() - 1.0) / fpow(v, e.q());
        let act_dv = -e.q() * fpow(u, e.p()) / fpow(v, e.q() + 1.0);
        let inh_du = e.r() * fpow(u, e.r() - 1.0) / fpow(v, e.s());
        let inh_dv = -e.s() * fpow(u, e.r()) / fpow(v, e.s() + 1.0);

        let (ru, rv) = (2 * k, 2 * k + 1);
        jac.set(ru, ru, params.d1 * diag - 1.0 + tau * act_du);
        jac.set(ru, rv, tau * act_dv);
        jac.set(rv, rv, params.d2 * diag - 1.0 + tau * inh_dv);
        jac.set(rv, ru, tau * inh_du);
        grid.for_each_neighbor(k, |idx, w| {
            jac.add(ru, 2 * idx, params.d1 * w);
            jac.add(rv, 2 * idx + 1, params.d2 * w);
        });
    }
    Ok(jac)
}

/// Options for the damped Newton iteration.
#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub max_iter: usize,
    pub max_backtracks: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iter: 100,
            max_backtracks: 30,
        }
    }
}

/// A converged Newton solve with its iteration record.
#[derive(Debug, Clone)]
pub struct NewtonResult {
    pub field: SolutionField,
    pub iterations: usize,
    /// Residual max-norm after each iteration, starting with the initial one.
    pub residual_history: Vec<f64>,
}

/// Damped Newton with backtracking on the residual max-norm.
///
/// Steps are halved until the norm decreases (up to `max_backtracks`
/// halvings); any step that would push a nodal value to the positivity
/// floor or below is likewise shrunk. Success means
/// `residual < NEWTON_TOL * (1 + scale)`.
pub fn newton_solve(
    initial: &SolutionField,
    hom: Option<&HomotopyParams>,
    opts: &NewtonOptions,
) -> Result<NewtonResult, SolverError> {
    let mut field = initial.clone();
    let n = field.grid.node_count();

    let (mut ru, mut rv) = residual(&field, hom)?;
    let mut norm = residual_norm(&ru, &rv);
    let mut history = vec![norm];

    let mut best = field.clone();
    let mut best_norm = norm;

    for iter in 0..opts.max_iter {
        if norm < NEWTON_TOL * (1.0 + field.scale()) + residual_noise_floor(&field) {
            field.residual_norm = norm;
            return Ok(NewtonResult {
                field,
                iterations: iter,
                residual_history: history,
            });
        }

        let mut jac = jacobian(&field, hom)?;
        let row_scales = jac.equilibrate_rows();
        let mut rhs0 = vec![0.0; 2 * n];
        for k in 0..n {
            rhs0[2 * k] = -ru[k] / row_scales[2 * k];
            rhs0[2 * k + 1] = -rv[k] / row_scales[2 * k + 1];
        }

        // Plain Newton first; if no step on the ladder decreases the norm,
        // retry with an escalating Levenberg shift on the equilibrated
        // diagonal. Near a spike the Jacobian carries an almost-null
        // translation mode that amplifies the raw step until second-order
        // terms regenerate the residual; the shift caps that amplification.
        let mut accepted = false;
        let mut levenberg = 0.0f64;
        'regularize: for _ in 0..6 {
            let mut shifted = jac.clone();
            if levenberg > 0.0 {
                for i in 0..2 * n {
                    shifted.add(i, i, levenberg);
                }
            }
            let lu: BandLu = match shifted.factor() {
                Ok(lu) => lu,
                Err(_) if levenberg == 0.0 => {
                    // singular at a bifurcation point: report only if the
                    // regularized solve cannot proceed either
                    levenberg = 1e-8;
                    continue 'regularize;
                }
                Err(_) => return Err(SolverError::LinearSolveFailure),
            };
            let mut step = rhs0.clone();
            lu.solve_in_place(&mut step);
            if step.iter().any(|x| !x.is_finite()) {
                return Err(SolverError::LinearSolveFailure);
            }

            // Step ladder: a full step that halves the norm is taken at
            // once (the usual quadratic phase); otherwise the whole ladder
            // is scanned and the best decrease wins.
            let mut alpha = 1.0;
            let mut best_trial: Option<(SolutionField, Vec<f64>, Vec<f64>, f64)> = None;
            for bt in 0..=opts.max_backtracks {
                let mut trial = field.clone();
                for k in 0..n {
                    trial.u[k] = field.u[k] + alpha * step[2 * k];
                    trial.v[k] = field.v[k] + alpha * step[2 * k + 1];
                }
                let positive = trial
                    .u
                    .iter()
                    .chain(trial.v.iter())
                    .all(|&x| x > POSITIVITY_FLOOR);
                if positive {
                    if let Ok((tu, tv)) = residual(&trial, hom) {
                        let tnorm = residual_norm(&tu, &tv);
                        if bt == 0 && tnorm <= 0.5 * norm {
                            best_trial = Some((trial, tu, tv, tnorm));
                            break;
                        }
                        if tnorm < best_trial.as_ref().map(|b| b.3).unwrap_or(norm) {
                            best_trial = Some((trial, tu, tv, tnorm));
                        }
                    }
                }
                alpha *= 0.5;
            }
            if let Some((trial, tu, tv, tnorm)) = best_trial {
                field = trial;
                ru = tu;
                rv = tv;
                norm = tnorm;
                accepted = true;
                break 'regularize;
            }
            levenberg = if levenberg == 0.0 { 1e-10 } else { levenberg * 100.0 };
        }
        history.push(norm);
        if norm < best_norm {
            best = field.clone();
            best_norm = norm;
        }
        if !accepted {
            best.residual_norm = best_norm;
            return Err(SolverError::NoConvergence {
                best: Box::new(best),
                best_residual: best_norm,
            });
        }
    }

    if norm < NEWTON_TOL * (1.0 + field.scale()) + residual_noise_floor(&field) {
        field.residual_norm = norm;
        let iterations = history.len() - 1;
        return Ok(NewtonResult {
            field,
            iterations,
            residual_history: history,
        });
    }
    best.residual_norm = best_norm;
    Err(SolverError::NoConvergence {
        best: Box::new(best),
        best_residual: best_norm,
    })
}

/// Semi-implicit pseudo-time marching toward a steady state.
///
/// Diffusion and the linear decay are treated implicitly (one banded
/// factorization per component, reused across steps), the reaction terms
/// explicitly. Fields are clamped at the positivity floor. This is a
/// globalization device: the result is meant to seed Newton, not to be
/// converged in itself.
pub fn pseudo_time_march(
    initial: &SolutionField,
    hom: Option<&HomotopyParams>,
    dt: f64,
    steps: usize,
) -> Result<SolutionField, SolverError> {
    assert!(dt > 0.0);
    if !initial.is_positive() {
        return Err(SolverError::NonPositiveField);
    }
    let mut field = initial.clone();
    let grid = field.grid;
    let n = grid.node_count();
    let params = field.params;

    let implicit_matrix = |d: f64| {
        let stride = grid.stencil_stride();
        let mut m = BandMatrix::new(n, stride, stride);
        let diag = grid.laplacian_diag();
        for k in 0..n {
            m.set(k, k, 1.0 + dt - dt * d * diag);
            grid.for_each_neighbor(k, |idx, w| m.add(k, idx, -dt * d * w));
        }
        m.factor().expect("implicit march matrix is SPD")
    };
    let mu = implicit_matrix(params.d1);
    let mv = implicit_matrix(params.d2);

    let mut bu = vec![0.0; n];
    let mut bv = vec![0.0; n];
    for step in 0..steps {
        for k in 0..n {
            let (fu, fv) = reaction(&params, hom, field.u[k], field.v[k]);
            bu[k] = field.u[k] + dt * fu;
            bv[k] = field.v[k] + dt * fv;
        }
        mu.solve_in_place(&mut bu);
        mv.solve_in_place(&mut bv);
        let mut peak = 0.0f64;
        for k in 0..n {
            field.u[k] = bu[k].max(POSITIVITY_FLOOR);
            field.v[k] = bv[k].max(POSITIVITY_FLOOR);
            peak = peak.max(field.u[k]).max(field.v[k]);
        }
        if !peak.is_finite() || peak > 1e12 {
            return Err(SolverError::BlowUp { step });
        }
        if peak <= 100.0 * POSITIVITY_FLOOR {
            return Err(SolverError::Extinction { step });
        }
    }

    let (ru, rv) = residual(&field, hom)?;
    field.residual_norm = residual_norm(&ru, &rv);
    Ok(field)
}

/// Initial-guess shapes for the steady solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GuessKind {
    /// The constant steady state.
    Constant,
    /// Constant state times `1 + eps * uniform(-1, 1)` nodewise.
    Perturbed { eps: f64, seed: u64 },
    /// Constant state plus a Gaussian bump on the activator:
    /// `u += amplitude * exp(-dist^2 / width^2)` centered at `center`
    /// (fractions of the domain lengths).
    Spike {
        amplitude: f64,
        width: f64,
        center: (f64, f64),
    },
}

impl GuessKind {
    /// Spike with the default heuristics: amplitude `10 u*`, width `5 h`,
    /// centered at the domain corner.
    pub fn default_spike() -> Self {
        GuessKind::Spike {
            amplitude: f64::NAN, // resolved to 10 u* in initial_guess
            width: f64::NAN,     // resolved to 5 h
            center: (0.0, 0.0),
        }
    }
}

/// Builds an initial guess on the grid.
pub fn initial_guess(kind: GuessKind, grid: &Grid, params: &ModelParams) -> SolutionField {
    let st = constant_state(&params.exponents, params.sigma)
        .expect("constant state exists for valid exponents");
    let n = grid.node_count();
    let mut u = vec![st.u; n];
    let mut v = vec![st.v; n];
    match kind {
        GuessKind::Constant => {}
        GuessKind::Perturbed { eps, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for x in u.iter_mut().chain(v.iter_mut()) {
                *x *= 1.0 + eps * rng.gen_range(-1.0..1.0);
            }
        }
        GuessKind::Spike {
            amplitude,
            width,
            center,
        } => {
            let amplitude = if amplitude.is_nan() { 10.0 * st.u } else { amplitude };
            let width = if width.is_nan() { 5.0 * grid.hx } else { width };
            let (lx, ly) = match grid.domain {
                crate::spectrum::Domain::Interval { length } => (length, 0.0),
                crate::spectrum::Domain::Rectangle { lx, ly } => (lx, ly),
            };
            let (cx, cy) = (center.0 * lx, center.1 * ly);
            for k in 0..n {
                let (x, y) = grid.coords(k);
                let d2 = (x - cx).powi(2) + (y - cy).powi(2);
                u[k] += amplitude * (-d2 / (width * width)).exp();
            }
            // Constant inhibitor level balancing its equation against the
            // bump in the mean: v^(s+1) = avg(u^r). A zero-amplitude spike
            // keeps v* exactly.
            if amplitude != 0.0 {
                let e = &params.exponents;
                let mean_ur = crate::quad::trapezoid(grid, |k| fpow(u[k], e.r()))
                    / crate::quad::trapezoid(grid, |_| 1.0);
                let v_bal = mean_ur.powf(1.0 / (e.s() + 1.0));
                for x in v.iter_mut() {
                    *x = v_bal;
                }
            }
        }
    }
    let mut field = SolutionField {
        grid: *grid,
        u,
        v,
        residual_norm: 0.0,
        params: *params,
    };
    let (ru, rv) = residual(&field, None).expect("guess is positive");
    field.residual_norm = residual_norm(&ru, &rv);
    field
}

/// Solves the deformation family from `tau = 0` to `tau = 1`, warm-starting
/// each solve from the previous solution.
///
/// The path starts at the exact solution `(rho, rho)` of the trivial system.
/// On a Newton failure the step is halved, up to four refinements; past
/// that the failing `tau` is reported.
pub fn homotopy_continuation(
    params: &ModelParams,
    rho: f64,
    n_steps: usize,
    grid: &Grid,
    opts: &NewtonOptions,
) -> Result<Vec<SolutionField>, SolverError> {
    assert!(rho > 0.0 && n_steps >= 1);
    let n = grid.node_count();
    let start = SolutionField {
        grid: *grid,
        u: vec![rho; n],
        v: vec![rho; n],
        residual_norm: 0.0,
        params: *params,
    };
    let mut path = vec![start];
    let mut tau = 0.0;
    let base_step = 1.0 / n_steps as f64;
    let mut step = base_step;
    let mut refinements = 0;

    while tau < 1.0 {
        let target = (tau + step).min(1.0);
        let hom = HomotopyParams {
            tau: target,
            rho,
        };
        match newton_solve(path.last().unwrap(), Some(&hom), opts) {
            Ok(res) => {
                path.push(res.field);
                tau = target;
                step = base_step;
            }
            Err(_) => {
                refinements += 1;
                if refinements > 4 {
                    return Err(SolverError::PathFailure { tau: target });
                }
                step *= 0.5;
            }
        }
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::Exponents;
    use approx::assert_relative_eq;

    fn reference_params(d1: f64, d2: f64, sigma: f64) -> ModelParams {
        ModelParams::new(Exponents::new(2.0, 1.0, 2.0, 0.0).unwrap(), sigma, d1, d2).unwrap()
    }

    #[test]
    fn constant_state_has_zero_residual() {
        for sigma in [0.0, 0.5, 2.0] {
            let params = reference_params(0.1, 1.0, sigma);
            let grid = Grid::interval(1.0, 21);
            let field = initial_guess(GuessKind::Constant, &grid, &params);
            assert!(
                field.residual_norm <= 1e-12 * (1.0 + sigma),
                "residual {} at sigma {}",
                field.residual_norm,
                sigma
            );
        }
    }

    #[test]
    fn trivial_system_solved_by_rho() {
        // tau = 0: residual vanishes iff u = v = rho.
        let params = reference_params(0.1, 1.0, 0.0);
        let grid = Grid::interval(1.0, 11);
        let rho = 0.7;
        let hom = HomotopyParams { tau: 0.0, rho };
        let mut field = SolutionField {
            grid,
            u: vec![rho; 11],
            v: vec![rho; 11],
            residual_norm: 0.0,
            params,
        };
        let (ru, rv) = residual(&field, Some(&hom)).unwrap();
        assert!(residual_norm(&ru, &rv) < 1e-14);
        // any other constant leaves a residual
        field.u = vec![rho * 2.0; 11];
        let (ru2, rv2) = residual(&field, Some(&hom)).unwrap();
        assert!(residual_norm(&ru2, &rv2) > 0.1);
    }

    #[test]
    fn chi_switch() {
        assert_eq!(HomotopyParams { tau: 0.25, rho: 1.0 }.chi(), 0.5);
        assert_eq!(HomotopyParams { tau: 0.5, rho: 1.0 }.chi(), 1.0);
        assert_eq!(HomotopyParams { tau: 0.9, rho: 1.0 }.chi(), 1.0);
    }

    #[test]
    fn rejects_non_positive_fields() {
        let params = reference_params(0.1, 1.0, 0.0);
        let grid = Grid::interval(1.0, 5);
        let mut field = initial_guess(GuessKind::Constant, &grid, &params);
        field.u[2] = 0.0;
        assert!(matches!(
            residual(&field, None),
            Err(SolverError::NonPositiveField)
        ));
        assert!(matches!(
            jacobian(&field, None),
            Err(SolverError::NonPositiveField)
        ));
    }

    #[test]
    fn manufactured_solution_order_two() {
        // u = 2 + cos(pi x / L), v = 3 + cos(pi x / L) with analytic forcing:
        // the discrete residual of the sampled exact pair converges at O(h^2).
        let params = reference_params(0.3, 2.0, 0.5);
        let e = &params.exponents;
        let length = 1.0;
        let pi = std::f64::consts::PI;
        let uex = |x: f64| 2.0 + (pi * x / length).cos();
        let vex = |x: f64| 3.0 + (pi * x / length).cos();
        let lap = |x: f64| -(pi / length).powi(2) * (pi * x / length).cos();

        let mut errs = Vec::new();
        for n in [51usize, 101, 201] {
            let grid = Grid::interval(length, n);
            let u: Vec<f64> = (0..n).map(|k| uex(grid.coords(k).0)).collect();
            let v: Vec<f64> = (0..n).map(|k| vex(grid.coords(k).0)).collect();
            let field = SolutionField {
                grid,
                u,
                v,
                residual_norm: 0.0,
                params,
            };
            let (ru, rv) = residual(&field, None).unwrap();
            // subtract the analytic residual (the manufactured forcing)
            let mut err = 0.0f64;
            for k in 0..n {
                let x = field.grid.coords(k).0;
                let exact_ru = params.d1 * lap(x) - uex(x)
                    + uex(x).powf(e.p()) / vex(x).powf(e.q())
                    + params.sigma;
                let exact_rv =
                    params.d2 * lap(x) - vex(x) + uex(x).powf(e.r()) / vex(x).powf(e.s());
                err = err.max((ru[k] - exact_ru).abs()).max((rv[k] - exact_rv).abs());
            }
            errs.push(err);
        }
        let r1 = errs[0] / errs[1];
        let r2 = errs[1] / errs[2];
        assert!((3.5..4.5).contains(&r1), "ratios {errs:?}");
        assert!((3.5..4.5).contains(&r2), "ratios {errs:?}");
    }

    #[test]
    fn jacobian_matches_matrix_on_constant_modes() {
        // At the constant state, acting on the eigenmode cos(i pi x / L)
        // reproduces the 2x2 linearization with the discrete eigenvalue.
        let params = reference_params(0.05, 3.0, 0.4);
        let e = &params.exponents;
        let grid = Grid::interval(1.0, 41);
        let n = grid.node_count();
        let field = initial_guess(GuessKind::Constant, &grid, &params);
        let st = constant_state(e, params.sigma).unwrap();

        let w = st.u.powf(e.reduced_power() - 1.0);
        let fu = e.p() * w - 1.0;
        let fv = -e.q() * st.u.powf(e.p() - (e.q() + 1.0) * e.r() / (e.s() + 1.0));
        let gu = e.r() * st.u.powf(e.r() / (e.s() + 1.0) - 1.0);
        let gv = -e.s() - 1.0;

        let jac = jacobian(&field, None).unwrap();
        for mode in [0usize, 1, 4] {
            let mu = grid.discrete_axis_eigenvalue(mode, false);
            let cosv: Vec<f64> = (0..n)
                .map(|k| (mode as f64 * std::f64::consts::PI * grid.coords(k).0).cos())
                .collect();
            // perturb u only
            let mut x = vec![0.0; 2 * n];
            for k in 0..n {
                x[2 * k] = cosv[k];
            }
            let y = jac.matvec(&x);
            for k in 0..n {
                assert_relative_eq!(
                    y[2 * k],
                    (fu - params.d1 * mu) * cosv[k],
                    epsilon = 1e-9 * (1.0 + mu)
                );
                assert_relative_eq!(y[2 * k + 1], gu * cosv[k], epsilon = 1e-9 * (1.0 + mu));
            }
            // perturb v only
            let mut x = vec![0.0; 2 * n];
            for k in 0..n {
                x[2 * k + 1] = cosv[k];
            }
            let y = jac.matvec(&x);
            for k in 0..n {
                assert_relative_eq!(y[2 * k], fv * cosv[k], epsilon = 1e-9 * (1.0 + mu));
                assert_relative_eq!(
                    y[2 * k + 1],
                    (gv - params.d2 * mu) * cosv[k],
                    epsilon = 1e-9 * (1.0 + mu)
                );
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        // Directional finite differences at randomized positive states.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..20 {
            let params = reference_params(
                10f64.powf(rng.gen_range(-3.0..0.0)),
                10f64.powf(rng.gen_range(-1.0..1.5)),
                if trial % 2 == 0 { 0.0 } else { 0.3 },
            );
            let grid = Grid::interval(1.0, 31);
            let n = grid.node_count();
            let mut field = initial_guess(GuessKind::Constant, &grid, &params);
            for x in field.u.iter_mut().chain(field.v.iter_mut()) {
                *x *= rng.gen_range(0.5..2.0);
            }
            let jac = jacobian(&field, None).unwrap();

            let dir: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let scale = field.scale();
            let eps = 1e-7 * scale;
            let mut plus = field.clone();
            let mut minus = field.clone();
            for k in 0..n {
                plus.u[k] += eps * dir[2 * k];
                plus.v[k] += eps * dir[2 * k + 1];
                minus.u[k] -= eps * dir[2 * k];
                minus.v[k] -= eps * dir[2 * k + 1];
            }
            let (rup, rvp) = residual(&plus, None).unwrap();
            let (rum, rvm) = residual(&minus, None).unwrap();
            let jv = jac.matvec(&dir);
            let mut num = 0.0f64;
            let mut den = 0.0f64;
            for k in 0..n {
                let fd_u = (rup[k] - rum[k]) / (2.0 * eps);
                let fd_v = (rvp[k] - rvm[k]) / (2.0 * eps);
                num = num.max((jv[2 * k] - fd_u).abs()).max((jv[2 * k + 1] - fd_v).abs());
                den = den.max(fd_u.abs()).max(fd_v.abs());
            }
            assert!(num <= 1e-5 * den.max(1.0), "rel err {} at trial {trial}", num / den);
        }
    }

    #[test]
    fn newton_fixed_point_at_constant_state() {
        let params = reference_params(0.1, 1.0, 0.5);
        let grid = Grid::interval(1.0, 41);
        let field = initial_guess(GuessKind::Constant, &grid, &params);
        let res = newton_solve(&field, None, &NewtonOptions::default()).unwrap();
        assert!(res.iterations <= 1);
        assert!(res.field.is_constant(1e-9));
    }

    #[test]
    fn newton_recovers_constant_from_perturbation() {
        // d2/d1 = 0.9 <= k = 1 for (2,4,2,4): the constant state is the only
        // solution, so Newton must land on it.
        let params =
            ModelParams::new(Exponents::new(2.0, 4.0, 2.0, 4.0).unwrap(), 0.0, 0.1, 0.09)
                .unwrap();
        let grid = Grid::interval(1.0, 41);
        let guess = initial_guess(GuessKind::Perturbed { eps: 0.1, seed: 3 }, &grid, &params);
        let res = newton_solve(&guess, None, &NewtonOptions::default()).unwrap();
        assert!(res.field.is_constant(1e-7));
        let err = res
            .field
            .u
            .iter()
            .fold(0.0f64, |acc, &x| acc.max((x - 1.0).abs()));
        assert!(err < 1e-8, "max|u-1| = {err}");
    }

    #[test]
    fn march_keeps_equilibrium() {
        let params = reference_params(0.1, 1.0, 0.3);
        let grid = Grid::interval(1.0, 21);
        let field = initial_guess(GuessKind::Constant, &grid, &params);
        let out = pseudo_time_march(&field, None, 0.2, 50).unwrap();
        let st = constant_state(&params.exponents, params.sigma).unwrap();
        for k in 0..grid.node_count() {
            assert_relative_eq!(out.u[k], st.u, max_relative = 1e-10);
            assert_relative_eq!(out.v[k], st.v, max_relative = 1e-10);
        }
    }

    #[test]
    fn march_reduces_residual_from_rough_start() {
        let params = reference_params(1e-3, 10.0, 0.0);
        let grid = Grid::interval(1.0, 101);
        let guess = initial_guess(GuessKind::default_spike(), &grid, &params);
        let start_norm = guess.residual_norm;
        let out = pseudo_time_march(&guess, None, 0.05, 100).unwrap();
        assert!(out.residual_norm < start_norm);
    }

    #[test]
    fn degenerate_guesses_reduce_to_constant() {
        let params = reference_params(0.1, 1.0, 0.0);
        let grid = Grid::interval(1.0, 21);
        let constant = initial_guess(GuessKind::Constant, &grid, &params);
        let eps0 = initial_guess(GuessKind::Perturbed { eps: 0.0, seed: 9 }, &grid, &params);
        assert_eq!(constant.u, eps0.u);
        let flat_spike = initial_guess(
            GuessKind::Spike {
                amplitude: 0.0,
                width: 0.1,
                center: (0.0, 0.0),
            },
            &grid,
            &params,
        );
        assert_eq!(constant.u, flat_spike.u);
        assert_eq!(constant.v, flat_spike.v);
    }

    #[test]
    fn homotopy_reaches_constant_in_uniqueness_regime() {
        // ratio 0.5 <= k = 1 for (2,4,2,4)
        let params =
            ModelParams::new(Exponents::new(2.0, 4.0, 2.0, 4.0).unwrap(), 0.0, 0.5, 0.25)
                .unwrap();
        let grid = Grid::interval(1.0, 41);
        let path =
            homotopy_continuation(&params, 1.0, 20, &grid, &NewtonOptions::default()).unwrap();
        let end = path.last().unwrap();
        assert!(end.is_constant(1e-7));
        // endpoint truly solves the undeformed system
        let (ru, rv) = residual(end, None).unwrap();
        assert!(residual_norm(&ru, &rv) < 1e-9);
    }
}
