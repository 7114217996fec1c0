//! Discrete solution pairs and their on-disk text format.
//!
//! Solutions serialize to a columnar text file: header lines carrying the
//! geometry, grid size and parameters, then one row per node with `x [y] u v`
//! in 17-significant-digit scientific notation, which round-trips `f64`
//! bit-exactly.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::bounds::ModelParams;
use crate::exponents::Exponents;
use crate::grid::Grid;
use crate::spectrum::Domain;

/// A discrete positive pair `(u, v)` on a grid, with the residual norm of
/// the stationary system at this state.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub grid: Grid,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Max-norm of the discrete residual at `(u, v)`.
    pub residual_norm: f64,
    pub params: ModelParams,
}

/// Pointwise extremes of a solution pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes {
    pub u_max: f64,
    pub u_min: f64,
    pub v_max: f64,
    pub v_min: f64,
}

impl SolutionField {
    pub fn extremes(&self) -> Extremes {
        let fold = |xs: &[f64]| {
            xs.iter()
                .fold((f64::NEG_INFINITY, f64::INFINITY), |(mx, mn), &x| {
                    (mx.max(x), mn.min(x))
                })
        };
        let (u_max, u_min) = fold(&self.u);
        let (v_max, v_min) = fold(&self.v);
        Extremes {
            u_max,
            u_min,
            v_max,
            v_min,
        }
    }

    /// Field magnitude used to scale residual tolerances.
    pub fn scale(&self) -> f64 {
        let e = self.extremes();
        e.u_max.max(e.v_max)
    }

    pub fn is_positive(&self) -> bool {
        self.u.iter().chain(self.v.iter()).all(|&x| x > 0.0)
    }

    /// The field has decayed to (a neighborhood of) the zero state, which
    /// solves the equations but is excluded by positivity.
    pub fn is_collapsed(&self) -> bool {
        self.scale() <= 1e-6
    }

    /// True when both components are flat to `rtol` relative to their means.
    pub fn is_constant(&self, rtol: f64) -> bool {
        let flat = |xs: &[f64]| {
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &x in xs {
                lo = lo.min(x);
                hi = hi.max(x);
            }
            hi - lo <= rtol * mean.abs()
        };
        flat(&self.u) && flat(&self.v)
    }

    /// Serializes to the columnar text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# gmlab solution 1\n");
        match self.grid.domain {
            Domain::Interval { length } => {
                let _ = writeln!(out, "geometry interval {}", fmt(length));
                let _ = writeln!(out, "grid {}", self.grid.nx);
            }
            Domain::Rectangle { lx, ly } => {
                let _ = writeln!(out, "geometry rectangle {} {}", fmt(lx), fmt(ly));
                let _ = writeln!(out, "grid {} {}", self.grid.nx, self.grid.ny);
            }
        }
        let e = &self.params.exponents;
        let _ = writeln!(
            out,
            "exponents {} {} {} {}",
            fmt(e.p()),
            fmt(e.q()),
            fmt(e.r()),
            fmt(e.s())
        );
        let _ = writeln!(out, "sigma {}", fmt(self.params.sigma));
        let _ = writeln!(out, "d1 {}", fmt(self.params.d1));
        let _ = writeln!(out, "d2 {}", fmt(self.params.d2));
        let _ = writeln!(out, "residual {}", fmt(self.residual_norm));
        if self.grid.is_1d() {
            out.push_str("columns x u v\n");
            for k in 0..self.grid.node_count() {
                let (x, _) = self.grid.coords(k);
                let _ = writeln!(out, "{} {} {}", fmt(x), fmt(self.u[k]), fmt(self.v[k]));
            }
        } else {
            out.push_str("columns x y u v\n");
            for k in 0..self.grid.node_count() {
                let (x, y) = self.grid.coords(k);
                let _ = writeln!(
                    out,
                    "{} {} {} {}",
                    fmt(x),
                    fmt(y),
                    fmt(self.u[k]),
                    fmt(self.v[k])
                );
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, FieldParseError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let magic = lines.next().ok_or(FieldParseError::Truncated)?;
        if !magic.starts_with("# gmlab solution") {
            return Err(FieldParseError::BadHeader("missing magic line"));
        }

        let mut geometry: Option<Domain> = None;
        let mut dims: Option<(usize, usize)> = None;
        let mut exps: Option<Exponents> = None;
        let mut sigma: Option<f64> = None;
        let mut d1: Option<f64> = None;
        let mut d2: Option<f64> = None;
        let mut residual: Option<f64> = None;
        let mut columns: Option<usize> = None;

        for line in lines.by_ref() {
            let mut it = line.split_whitespace();
            let key = it.next().ok_or(FieldParseError::Truncated)?;
            match key {
                "geometry" => match it.next() {
                    Some("interval") => {
                        geometry = Some(Domain::Interval {
                            length: parse_f64(it.next())?,
                        })
                    }
                    Some("rectangle") => {
                        geometry = Some(Domain::Rectangle {
                            lx: parse_f64(it.next())?,
                            ly: parse_f64(it.next())?,
                        })
                    }
                    _ => return Err(FieldParseError::BadHeader("unknown geometry")),
                },
                "grid" => {
                    let nx = parse_usize(it.next())?;
                    let ny = match it.next() {
                        Some(tok) => tok.parse().map_err(|_| FieldParseError::BadNumber)?,
                        None => 1,
                    };
                    dims = Some((nx, ny));
                }
                "exponents" => {
                    let p = parse_f64(it.next())?;
                    let q = parse_f64(it.next())?;
                    let r = parse_f64(it.next())?;
                    let s = parse_f64(it.next())?;
                    exps = Some(
                        Exponents::new(p, q, r, s)
                            .map_err(|_| FieldParseError::BadHeader("invalid exponents"))?,
                    );
                }
                "sigma" => sigma = Some(parse_f64(it.next())?),
                "d1" => d1 = Some(parse_f64(it.next())?),
                "d2" => d2 = Some(parse_f64(it.next())?),
                "residual" => residual = Some(parse_f64(it.next())?),
                "columns" => {
                    columns = Some(it.count());
                    break;
                }
                _ => return Err(FieldParseError::BadHeader("unknown header key")),
            }
        }

        let geometry = geometry.ok_or(FieldParseError::BadHeader("geometry missing"))?;
        let (nx, ny) = dims.ok_or(FieldParseError::BadHeader("grid missing"))?;
        let grid = Grid::from_domain(&geometry, nx, ny);
        let params = ModelParams::new(
            exps.ok_or(FieldParseError::BadHeader("exponents missing"))?,
            sigma.ok_or(FieldParseError::BadHeader("sigma missing"))?,
            d1.ok_or(FieldParseError::BadHeader("d1 missing"))?,
            d2.ok_or(FieldParseError::BadHeader("d2 missing"))?,
        )
        .map_err(|_| FieldParseError::BadHeader("invalid parameters"))?;
        let ncols = columns.ok_or(FieldParseError::BadHeader("columns missing"))?;
        let expected_cols = if grid.is_1d() { 3 } else { 4 };
        if ncols != expected_cols {
            return Err(FieldParseError::BadHeader("column count mismatch"));
        }

        let mut u = Vec::with_capacity(grid.node_count());
        let mut v = Vec::with_capacity(grid.node_count());
        for line in lines {
            let vals: Result<Vec<f64>, _> = line
                .split_whitespace()
                .map(|t| f64::from_str(t).map_err(|_| FieldParseError::BadNumber))
                .collect();
            let vals = vals?;
            if vals.len() != ncols {
                return Err(FieldParseError::BadNumber);
            }
            u.push(vals[ncols - 2]);
            v.push(vals[ncols - 1]);
        }
        if u.len() != grid.node_count() {
            return Err(FieldParseError::Truncated);
        }

        Ok(SolutionField {
            grid,
            u,
            v,
            residual_norm: residual.ok_or(FieldParseError::BadHeader("residual missing"))?,
            params,
        })
    }
}

/// 17 significant digits: enough to reproduce any `f64` exactly.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(tok: Option<&str>) -> Result<f64, FieldParseError> {
    f64::from_str(tok.ok_or(FieldParseError::Truncated)?).map_err(|_| FieldParseError::BadNumber)
}

fn parse_usize(tok: Option<&str>) -> Result<usize, FieldParseError> {
    tok.ok_or(FieldParseError::Truncated)?
        .parse()
        .map_err(|_| FieldParseError::BadNumber)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FieldParseError {
    #[error("solution file ended early")]
    Truncated,
    #[error("bad header: {0}")]
    BadHeader(&'static str),
    #[error("malformed number in solution file")]
    BadNumber,
}
