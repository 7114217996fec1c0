//! Uniform vertex-centered grids with no-flux boundaries.
//!
//! The discrete Laplacian is the second-order central stencil; the Neumann
//! condition is closed with ghost points by mirror reflection, which keeps
//! the operator symmetric and second-order accurate at the boundary. On the
//! boundary nodes the stencil therefore doubles the weight toward the
//! single interior neighbor.

use serde::{Deserialize, Serialize};

use crate::spectrum::Domain;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub domain: Domain,
    pub nx: usize,
    /// 1 for interval grids.
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
}

impl Grid {
    pub fn interval(length: f64, n: usize) -> Self {
        assert!(length > 0.0 && n >= 3);
        Self {
            domain: Domain::Interval { length },
            nx: n,
            ny: 1,
            hx: length / (n - 1) as f64,
            hy: 0.0,
        }
    }

    pub fn rectangle(lx: f64, ly: f64, nx: usize, ny: usize) -> Self {
        assert!(lx > 0.0 && ly > 0.0 && nx >= 3 && ny >= 3);
        Self {
            domain: Domain::Rectangle { lx, ly },
            nx,
            ny,
            hx: lx / (nx - 1) as f64,
            hy: ly / (ny - 1) as f64,
        }
    }

    pub fn from_domain(domain: &Domain, nx: usize, ny: usize) -> Self {
        match *domain {
            Domain::Interval { length } => Self::interval(length, nx),
            Domain::Rectangle { lx, ly } => Self::rectangle(lx, ly, nx, ny),
        }
    }

    pub fn is_1d(&self) -> bool {
        self.ny == 1
    }

    pub fn node_count(&self) -> usize {
        self.nx * self.ny
    }

    /// Coordinates of node `k = j * nx + i`.
    pub fn coords(&self, k: usize) -> (f64, f64) {
        let i = k % self.nx;
        let j = k / self.nx;
        (i as f64 * self.hx, j as f64 * self.hy)
    }

    /// Largest node-index offset of a stencil neighbor (1 in 1D, `nx` in 2D).
    pub fn stencil_stride(&self) -> usize {
        if self.is_1d() {
            1
        } else {
            self.nx
        }
    }

    /// Diagonal coefficient of the discrete Laplacian (the same at every
    /// node under the mirror closure).
    pub fn laplacian_diag(&self) -> f64 {
        if self.is_1d() {
            -2.0 / (self.hx * self.hx)
        } else {
            -2.0 / (self.hx * self.hx) - 2.0 / (self.hy * self.hy)
        }
    }

    /// Visits the off-diagonal stencil entries of row `k`: `(index, weight)`
    /// pairs with mirror-doubled weights on the boundary.
    pub fn for_each_neighbor(&self, k: usize, mut emit: impl FnMut(usize, f64)) {
        let i = k % self.nx;
        let j = k / self.nx;
        let wx = 1.0 / (self.hx * self.hx);
        // x-direction
        if i == 0 {
            emit(k + 1, 2.0 * wx);
        } else if i == self.nx - 1 {
            emit(k - 1, 2.0 * wx);
        } else {
            emit(k - 1, wx);
            emit(k + 1, wx);
        }
        // y-direction
        if !self.is_1d() {
            let wy = 1.0 / (self.hy * self.hy);
            if j == 0 {
                emit(k + self.nx, 2.0 * wy);
            } else if j == self.ny - 1 {
                emit(k - self.nx, 2.0 * wy);
            } else {
                emit(k - self.nx, wy);
                emit(k + self.nx, wy);
            }
        }
    }

    /// Applies the discrete Laplacian to a nodal field.
    ///
    /// The stencil is applied to `f - mean(f)`; every stencil row sums to
    /// zero, so this is exact in real arithmetic, but it removes the
    /// constant-mode cancellation that otherwise amplifies rounding by
    /// `1/h^2` on fields with small relative variation.
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.node_count());
        let mean = f.iter().sum::<f64>() / f.len() as f64;
        let diag = self.laplacian_diag();
        let mut out = vec![0.0; f.len()];
        for k in 0..f.len() {
            let mut acc = diag * (f[k] - mean);
            self.for_each_neighbor(k, |idx, w| acc += w * (f[idx] - mean));
            out[k] = acc;
        }
        out
    }

    /// Eigenvalue of the *discrete* negative Laplacian on the axis mode
    /// `cos(i pi x / L)`: `(4/h^2) sin^2(i pi h / (2 L))`.
    pub fn discrete_axis_eigenvalue(&self, mode: usize, along_y: bool) -> f64 {
        let (h, length) = if along_y {
            (
                self.hy,
                match self.domain {
                    Domain::Rectangle { ly, .. } => ly,
                    Domain::Interval { .. } => panic!("no y axis on an interval grid"),
                },
            )
        } else {
            (
                self.hx,
                match self.domain {
                    Domain::Rectangle { lx, .. } => lx,
                    Domain::Interval { length } => length,
                },
            )
        };
        let t = (mode as f64 * std::f64::consts::PI * h / (2.0 * length)).sin();
        4.0 / (h * h) * t * t
    }
}
