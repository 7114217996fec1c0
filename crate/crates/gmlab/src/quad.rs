//! Quadrature on the solver grids.
//!
//! Two second-order rules are provided: nodal trapezoid, and the midpoint
//! rule applied to the linear interpolant of the fields. The verifier uses
//! the midpoint rule for its integral checks (whose error against the
//! discrete solution genuinely scales like `h^2`) and the spread between
//! the two rules as a self-scaling quadrature error estimate.

use crate::grid::Grid;

/// Tensor trapezoid weight of node `k` (half on faces, quarter on corners).
fn trapezoid_weight(grid: &Grid, k: usize) -> f64 {
    let i = k % grid.nx;
    let j = k / grid.nx;
    let wx = if i == 0 || i == grid.nx - 1 { 0.5 } else { 1.0 };
    if grid.is_1d() {
        wx * grid.hx
    } else {
        let wy = if j == 0 || j == grid.ny - 1 { 0.5 } else { 1.0 };
        wx * wy * grid.hx * grid.hy
    }
}

/// Trapezoid rule over a nodal integrand.
pub fn trapezoid(grid: &Grid, f: impl Fn(usize) -> f64) -> f64 {
    (0..grid.node_count()).map(|k| trapezoid_weight(grid, k) * f(k)).sum()
}

/// Midpoint rule on the linear interpolant of the two fields: the integrand
/// is evaluated at cell-averaged `(u, v)` values.
pub fn midpoint(grid: &Grid, u: &[f64], v: &[f64], phi: impl Fn(f64, f64) -> f64) -> f64 {
    assert_eq!(u.len(), grid.node_count());
    assert_eq!(v.len(), grid.node_count());
    if grid.is_1d() {
        let mut acc = 0.0;
        for i in 0..grid.nx - 1 {
            let um = 0.5 * (u[i] + u[i + 1]);
            let vm = 0.5 * (v[i] + v[i + 1]);
            acc += grid.hx * phi(um, vm);
        }
        acc
    } else {
        let mut acc = 0.0;
        for j in 0..grid.ny - 1 {
            for i in 0..grid.nx - 1 {
                let k = j * grid.nx + i;
                let corners = [k, k + 1, k + grid.nx, k + grid.nx + 1];
                let um = corners.iter().map(|&c| u[c]).sum::<f64>() / 4.0;
                let vm = corners.iter().map(|&c| v[c]).sum::<f64>() / 4.0;
                acc += grid.hx * grid.hy * phi(um, vm);
            }
        }
        acc
    }
}

/// Trapezoid rule over a pointwise function of the two fields.
pub fn trapezoid_of(grid: &Grid, u: &[f64], v: &[f64], phi: impl Fn(f64, f64) -> f64) -> f64 {
    trapezoid(grid, |k| phi(u[k], v[k]))
}
