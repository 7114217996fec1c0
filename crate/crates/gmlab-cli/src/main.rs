//! Command-line front end: closed-form thresholds, steady-state solves,
//! parameter sweeps, bifurcation tables, and verification of saved
//! solutions.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use gmlab::bounds::ModelParams;
use gmlab::existence::existence_prediction;
use gmlab::exponents::Exponents;
use gmlab::field::SolutionField;
use gmlab::grid::Grid;
use gmlab::numeric::logspace;
use gmlab::solver::{homotopy_continuation, GuessKind, NewtonOptions, SolverError};
use gmlab::spectrum::{neumann_eigenvalues, parity, Domain, SpectrumError};
use gmlab::steady::{constant_state, du_dsigma};
use gmlab::threshold::{k_thresholds, sigma_bifurcation_cutoff};
use gmlab::verify::{full_report, recompute_residual, scan_cell, solve_steady, ScanRow};

use config::Config;

/// Exit code for invalid parameters (exponents, geometry).
const EXIT_INVALID: u8 = 2;
/// Exit code for solver non-convergence.
const EXIT_NO_CONVERGENCE: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "gmlab",
    about = "Steady-state laboratory for activator-inhibitor systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Diffusion-ratio thresholds, admissible sets, and the source cutoff
    Thresholds(ThresholdsCmd),
    /// Constant steady state and its source sensitivity
    Steady(SteadyCmd),
    /// Solve the discretized system and verify the result
    Solve(SolveCmd),
    /// Sweep diffusion parameters and emit one CSV row per cell
    Sweep(SweepCmd),
    /// Neumann spectrum, bifurcation values, and mode-count parity
    Bifurcations(BifurcationsCmd),
    /// Re-check a saved solution file against the estimates
    Verify(VerifyCmd),
}

/// Flags shared by every command; a config file provides defaults and flags
/// override it.
#[derive(Args, Debug, Clone)]
struct CommonArgs {
    #[arg(short = 'p', long)]
    p: Option<f64>,
    #[arg(short = 'q', long)]
    q: Option<f64>,
    #[arg(short = 'r', long)]
    r: Option<f64>,
    #[arg(short = 's', long)]
    s: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    d1: Option<f64>,
    #[arg(long)]
    d2: Option<f64>,
    /// Diffusion ratio d2/d1 (alternative to --d2)
    #[arg(long)]
    ratio: Option<f64>,
    /// Domain kind: interval | rectangle
    #[arg(long)]
    geometry: Option<String>,
    /// Domain length(s): one value for an interval, two for a rectangle
    #[arg(long, num_args = 1..=2)]
    length: Option<Vec<f64>>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (solution, CSV, or report depending on the command)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format for structured data: text | csv | json
    #[arg(long)]
    format: Option<String>,
    /// Worker threads for sweeps (default: available parallelism)
    #[arg(long)]
    workers: Option<usize>,
    /// key=value config file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the fully resolved configuration to this file
    #[arg(long)]
    save_config: Option<PathBuf>,
}

/// Fully resolved common parameters.
struct Resolved {
    exponents: Exponents,
    sigma: f64,
    d1: Option<f64>,
    d2: Option<f64>,
    domain: Domain,
    nx: usize,
    ny: usize,
    seed: u64,
    out: Option<PathBuf>,
    format: String,
    workers: usize,
}

impl CommonArgs {
    fn resolve(&self) -> Result<Resolved> {
        let file = match &self.config {
            Some(path) => Config::from_file(path)?,
            None => Config::default(),
        };
        let f64_of = |flag: Option<f64>, key: &str| -> Result<Option<f64>> {
            Ok(flag.or(file.get_f64(key)?))
        };

        let p = f64_of(self.p, "p")?.ok_or_else(|| anyhow!("missing exponent p"))?;
        let q = f64_of(self.q, "q")?.ok_or_else(|| anyhow!("missing exponent q"))?;
        let r = f64_of(self.r, "r")?.ok_or_else(|| anyhow!("missing exponent r"))?;
        let s = f64_of(self.s, "s")?.ok_or_else(|| anyhow!("missing exponent s"))?;
        let exponents = Exponents::new(p, q, r, s)
            .map_err(|e| anyhow!("invalid exponents (p={p}, q={q}, r={r}, s={s}): {e}"))?;

        let sigma = f64_of(self.sigma, "sigma")?.unwrap_or(0.0);
        if sigma < 0.0 {
            bail!("invalid sigma {sigma}: must be >= 0");
        }
        let d1 = f64_of(self.d1, "d1")?;
        let ratio = f64_of(self.ratio, "ratio")?;
        let mut d2 = f64_of(self.d2, "d2")?;
        if d2.is_none() {
            if let (Some(d1), Some(ratio)) = (d1, ratio) {
                d2 = Some(ratio * d1);
            }
        }

        let geometry = self
            .geometry
            .clone()
            .or_else(|| file.get("geometry").map(str::to_string))
            .unwrap_or_else(|| "interval".to_string());
        let lengths = self.length.clone().unwrap_or_else(|| {
            let lx = file.get_f64("length").ok().flatten().unwrap_or(1.0);
            match file.get_f64("ly").ok().flatten() {
                Some(ly) => vec![lx, ly],
                None => vec![lx],
            }
        });
        let domain = match geometry.as_str() {
            "interval" => Domain::Interval { length: lengths[0] },
            "rectangle" => Domain::Rectangle {
                lx: lengths[0],
                ly: *lengths.get(1).unwrap_or(&lengths[0]),
            },
            other => bail!("invalid geometry {other:?}: expected interval or rectangle"),
        };
        domain
            .validate()
            .map_err(|e| anyhow!("invalid geometry: {e}"))?;

        let nx = self.nx.or(file.get_usize("nx")?).unwrap_or(match domain {
            Domain::Interval { .. } => 401,
            Domain::Rectangle { .. } => 129,
        });
        let ny = self.ny.or(file.get_usize("ny")?).unwrap_or(nx);
        let seed = self
            .seed
            .or(file.get_usize("seed")?.map(|x| x as u64))
            .unwrap_or(0);
        let format = self
            .format
            .clone()
            .or_else(|| file.get("format").map(str::to_string))
            .unwrap_or_else(|| "text".to_string());
        let workers = self.workers.or(file.get_usize("workers")?).unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });

        if let Some(path) = &self.save_config {
            let mut cfg = Config::default();
            cfg.set("p", p);
            cfg.set("q", q);
            cfg.set("r", r);
            cfg.set("s", s);
            cfg.set("sigma", sigma);
            if let Some(d1) = d1 {
                cfg.set("d1", d1);
            }
            if let Some(d2) = d2 {
                cfg.set("d2", d2);
            }
            cfg.set("geometry", &geometry);
            cfg.set("length", lengths[0]);
            if let Some(ly) = lengths.get(1) {
                cfg.set("ly", ly);
            }
            cfg.set("nx", nx);
            cfg.set("ny", ny);
            cfg.set("seed", seed);
            cfg.set("format", &format);
            cfg.set("workers", workers);
            std::fs::write(path, cfg.to_text())
                .with_context(|| format!("writing {}", path.display()))?;
        }

        Ok(Resolved {
            exponents,
            sigma,
            d1,
            d2,
            domain,
            nx,
            ny,
            seed,
            out: self.out.clone(),
            format,
            workers,
        })
    }
}

/// 17 significant digits, reproducible across runs.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// thresholds

#[derive(Args, Debug)]
struct ThresholdsCmd {
    #[command(flatten)]
    common: CommonArgs,
    /// Also print a k-threshold table over these source levels
    #[arg(long, value_delimiter = ',')]
    sigma_sweep: Option<Vec<f64>>,
}

fn cmd_thresholds(cmd: &ThresholdsCmd) -> Result<String> {
    let rs = cmd.common.resolve()?;
    let rep = k_thresholds(&rs.exponents, rs.sigma)
        .map_err(|e| anyhow!("threshold computation failed: {e}"))?;

    if rs.format == "json" {
        let mut doc = serde_json::to_value(&rep)?;
        doc["sigma_cutoff"] = serde_json::to_value(sigma_bifurcation_cutoff(&rs.exponents))?;
        return Ok(format!("{}\n", serde_json::to_string_pretty(&doc)?));
    }

    let mut out = String::new();
    let e = &rs.exponents;
    out.push_str(&format!(
        "exponents p={} q={} r={} s={}  sigma={}\n",
        e.p(),
        e.q(),
        e.r(),
        e.s(),
        rs.sigma
    ));
    out.push_str(&format!("lambda_star = {}\n", num(rep.lambda_star)));
    for set in [&rep.upper_set, &rep.lower_set].into_iter().flatten() {
        out.push_str(&format!(
            "admissible {}: {}\n",
            set.kind.label(),
            set.interval()
        ));
    }
    for (name, sup) in [("k1", &rep.k1), ("k2", &rep.k2)] {
        match sup {
            Some(s) => out.push_str(&format!(
                "{name} = {} ({} at lambda = {})\n",
                num(s.value),
                if s.attained { "attained" } else { "supremum" },
                num(s.arg)
            )),
            None => out.push_str(&format!("{name} = absent (hypothesis fails)\n")),
        }
    }
    match rep.k {
        Some(k) => out.push_str(&format!("k = {}\n", num(k))),
        None => out.push_str("k = absent (both hypotheses fail)\n"),
    }
    out.push_str(&format!(
        "sigma cutoff (no positive bifurcation values at or above) = {}\n",
        num(sigma_bifurcation_cutoff(e))
    ));

    if let Some(sweep) = &cmd.sigma_sweep {
        out.push_str("sigma_sweep:\nsigma,k1,k2,k\n");
        for &sg in sweep {
            let r = k_thresholds(e, sg).map_err(|e| anyhow!("sweep at sigma={sg}: {e}"))?;
            out.push_str(&format!(
                "{},{},{},{}\n",
                num(sg),
                r.k1.map(|s| num(s.value)).unwrap_or_else(|| "absent".into()),
                r.k2.map(|s| num(s.value)).unwrap_or_else(|| "absent".into()),
                r.k.map(num).unwrap_or_else(|| "absent".into()),
            ));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// steady

#[derive(Args, Debug)]
struct SteadyCmd {
    #[command(flatten)]
    common: CommonArgs,
}

fn cmd_steady(cmd: &SteadyCmd) -> Result<String> {
    let rs = cmd.common.resolve()?;
    let st =
        constant_state(&rs.exponents, rs.sigma).map_err(|e| anyhow!("constant state: {e}"))?;
    let sens = du_dsigma(&rs.exponents, rs.sigma).map_err(|e| anyhow!("sensitivity: {e}"))?;
    if rs.format == "json" {
        let doc = serde_json::json!({
            "u_star": st.u,
            "v_star": st.v,
            "sigma": st.sigma,
            "du_dsigma": sens,
        });
        Ok(format!("{}\n", serde_json::to_string_pretty(&doc)?))
    } else {
        Ok(format!(
            "u_star = {}\nv_star = {}\ndu_dsigma = {}\n",
            num(st.u),
            num(st.v),
            num(sens)
        ))
    }
}

// ---------------------------------------------------------------------------
// solve

#[derive(Args, Debug)]
struct SolveCmd {
    #[command(flatten)]
    common: CommonArgs,
    /// Initial guess: constant | perturbed | spike
    #[arg(long, default_value = "constant")]
    guess: String,
    /// Perturbation size for --guess perturbed
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Spike amplitude (default 10 u*)
    #[arg(long)]
    amplitude: Option<f64>,
    /// Spike width (default 5 grid spacings)
    #[arg(long)]
    width: Option<f64>,
    /// Spike center as domain fractions
    #[arg(long, num_args = 1..=2, default_values_t = [0.0])]
    center: Vec<f64>,
    /// Pseudo-time steps before the Newton polish
    #[arg(long, default_value_t = 0)]
    march_steps: usize,
    /// Pseudo-time step size
    #[arg(long, default_value_t = 0.2)]
    dt: f64,
    /// Solve along the deformation path from the trivial system instead
    #[arg(long)]
    homotopy: bool,
    /// Constant source of the trivial system (homotopy start)
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Number of deformation steps
    #[arg(long, default_value_t = 40)]
    steps: usize,
    /// Write the verification report here (text table)
    #[arg(long)]
    report: Option<PathBuf>,
}

fn cmd_solve(cmd: &SolveCmd) -> Result<(String, Option<u8>)> {
    let rs = cmd.common.resolve()?;
    let d1 = rs.d1.ok_or_else(|| anyhow!("missing --d1"))?;
    let d2 = rs.d2.ok_or_else(|| anyhow!("missing --d2 (or --ratio)"))?;
    let params = ModelParams::new(rs.exponents, rs.sigma, d1, d2)
        .map_err(|e| anyhow!("invalid parameters: {e}"))?;
    let grid = Grid::from_domain(&rs.domain, rs.nx, rs.ny);

    let outcome = if cmd.homotopy {
        homotopy_continuation(&params, cmd.rho, cmd.steps, &grid, &NewtonOptions::default())
            .map(|path| {
                let field = path.into_iter().last().expect("path nonempty");
                gmlab::solver::NewtonResult {
                    field,
                    iterations: 0,
                    residual_history: Vec::new(),
                }
            })
    } else {
        let kind = match cmd.guess.as_str() {
            "constant" => GuessKind::Constant,
            "perturbed" => GuessKind::Perturbed {
                eps: cmd.eps,
                seed: rs.seed,
            },
            "spike" => GuessKind::Spike {
                amplitude: cmd.amplitude.unwrap_or(f64::NAN),
                width: cmd.width.unwrap_or(f64::NAN),
                center: (
                    cmd.center.first().copied().unwrap_or(0.0),
                    cmd.center.get(1).copied().unwrap_or(0.0),
                ),
            },
            other => bail!("invalid guess kind {other:?}"),
        };
        solve_steady(&params, &grid, kind, cmd.march_steps, cmd.dt)
    };

    match outcome {
        Ok(res) => {
            let field = res.field;
            if let Some(path) = &rs.out {
                std::fs::write(path, field.to_text())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let report = full_report(&field).map_err(|e| anyhow!("verify: {e}"))?;
            if let Some(path) = &cmd.report {
                std::fs::write(path, report.to_text_table())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let ex = field.extremes();
            let shape = if field.is_constant(1e-6) {
                "constant"
            } else {
                "nonconstant"
            };
            let line = format!(
                "{shape} residual={:.3e} u=[{:.6e}, {:.6e}] v=[{:.6e}, {:.6e}] checks={}\n",
                field.residual_norm,
                ex.u_min,
                ex.u_max,
                ex.v_min,
                ex.v_max,
                if report.overall { "pass" } else { "FAIL" }
            );
            Ok((line, None))
        }
        Err(SolverError::NoConvergence {
            best,
            best_residual,
        }) => {
            if let Some(path) = &rs.out {
                std::fs::write(path, best.to_text())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok((
                format!(
                    "NOT CONVERGED best_residual={best_residual:.3e} (best iterate {})\n",
                    rs.out
                        .as_ref()
                        .map(|p| format!("written to {}", p.display()))
                        .unwrap_or_else(|| "discarded".into())
                ),
                Some(EXIT_NO_CONVERGENCE),
            ))
        }
        Err(e) => Err(anyhow!("solve failed: {e}")),
    }
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Args, Debug)]
struct SweepCmd {
    #[command(flatten)]
    common: CommonArgs,
    /// d1 grid: lo,hi,count (log-spaced)
    #[arg(long, value_delimiter = ',')]
    d1_grid: Vec<f64>,
    /// Source levels to sweep (default: the single --sigma value)
    #[arg(long, value_delimiter = ',')]
    sigma_list: Option<Vec<f64>>,
    /// Randomized initial guesses per cell
    #[arg(long, default_value_t = 8)]
    seeds: usize,
    /// Grid points per axis for the solves
    #[arg(long)]
    n: Option<usize>,
}

fn cmd_sweep(cmd: &SweepCmd) -> Result<String> {
    let rs = cmd.common.resolve()?;
    if cmd.d1_grid.len() != 3 {
        bail!("--d1-grid needs lo,hi,count");
    }
    let ratio = match (rs.d1, rs.d2) {
        (Some(d1), Some(d2)) => d2 / d1,
        _ => cmd
            .common
            .ratio
            .ok_or_else(|| anyhow!("missing --ratio (or both --d1 and --d2)"))?,
    };
    let d1_grid = logspace(cmd.d1_grid[0], cmd.d1_grid[1], cmd.d1_grid[2] as usize);
    let sigmas = cmd.sigma_list.clone().unwrap_or_else(|| vec![rs.sigma]);
    let grid_n = cmd.n.unwrap_or(rs.nx);
    let dim = match rs.domain {
        Domain::Interval { .. } => 1,
        Domain::Rectangle { .. } => 2,
    };

    let cells: Vec<(usize, f64, f64)> = sigmas
        .iter()
        .flat_map(|&sg| d1_grid.iter().map(move |&d1| (sg, d1)))
        .enumerate()
        .map(|(i, (sg, d1))| (i, sg, d1))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(rs.workers)
        .build()
        .context("building worker pool")?;

    use rayon::prelude::*;
    let exps = rs.exponents;
    let domain = rs.domain;
    let seed = rs.seed;
    let seeds = cmd.seeds;
    let mut rows: Vec<(usize, f64, ScanRow, Option<(usize, bool)>)> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(index, sg, d1)| {
                let params =
                    ModelParams::new(exps, sg, d1, ratio * d1).expect("validated parameters");
                let row = scan_cell(&params, grid_n, &domain, seeds, seed, index);
                // parity and prediction, growing the mode window until the
                // tail certifies
                let mut prediction = None;
                let mut count = 64;
                while count <= 1 << 20 {
                    match existence_prediction(&exps, sg, d1, ratio * d1, &domain, dim, count) {
                        Ok(p) => {
                            prediction = Some((p.reasons.parity_count, p.predicted));
                            break;
                        }
                        Err(SpectrumError::TruncationUnsafe) => count *= 4,
                        Err(_) => break,
                    }
                }
                (index, sg, row, prediction)
            })
            .collect()
    });
    rows.sort_by_key(|r| r.0);

    let mut out = String::new();
    out.push_str("d1,d2,sigma,found_nonconstant,u_max,u_min,v_max,v_min,n_parity,predicted\n");
    for (_, sg, row, prediction) in rows {
        let fmt_opt = |x: Option<f64>| x.map(num).unwrap_or_else(|| "nan".into());
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            num(row.d1),
            num(row.d2),
            num(sg),
            row.nonconstant > 0,
            fmt_opt(row.u_max),
            fmt_opt(row.u_min),
            fmt_opt(row.v_max),
            fmt_opt(row.v_min),
            prediction
                .map(|(n, _)| n.to_string())
                .unwrap_or_else(|| "nan".into()),
            prediction
                .map(|(_, p)| p.to_string())
                .unwrap_or_else(|| "nan".into()),
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// bifurcations

#[derive(Args, Debug)]
struct BifurcationsCmd {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of nonconstant modes to tabulate
    #[arg(long, default_value_t = 16)]
    modes: usize,
}

fn cmd_bifurcations(cmd: &BifurcationsCmd) -> Result<String> {
    let rs = cmd.common.resolve()?;
    let d2 = rs
        .d2
        .ok_or_else(|| anyhow!("missing --d2 (or --d1 with --ratio)"))?;
    let mut out = String::new();

    if let Some(d1) = rs.d1 {
        // full parity analysis at this d1
        let mut count = cmd.modes.max(64);
        let set = loop {
            match parity(&rs.exponents, rs.sigma, d1, d2, &rs.domain, count) {
                Ok(set) => break set,
                Err(SpectrumError::TruncationUnsafe) if count < (1 << 22) => count *= 4,
                Err(e) => return Err(anyhow!("parity: {e}")),
            }
        };
        if rs.format == "json" {
            return Ok(format!("{}\n", serde_json::to_string_pretty(&set)?));
        }
        out.push_str("i,lambda_i,m_i,d1i\n");
        for e in set.entries.iter().take(cmd.modes) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.index,
                num(e.lambda),
                e.multiplicity,
                num(e.d1i)
            ));
        }
        out.push_str(&format!(
            "active_modes = {:?}\nparity_count = {}\n",
            set.active, set.parity_count
        ));
        if set.is_resonant {
            out.push_str(
                "warning: d1 sits inside the resonance window of a bifurcation value\n",
            );
        }
    } else {
        // table only
        let spectrum = neumann_eigenvalues(&rs.domain, cmd.modes + 1)
            .map_err(|e| anyhow!("spectrum: {e}"))?;
        let values = gmlab::spectrum::bifurcation_values(
            &rs.exponents,
            rs.sigma,
            d2,
            &rs.domain,
            cmd.modes,
        )
        .map_err(|e| anyhow!("bifurcation values: {e}"))?;
        out.push_str("i,lambda_i,m_i,d1i\n");
        for (e, v) in spectrum[1..].iter().zip(values) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.index,
                num(e.lambda),
                e.multiplicity,
                num(v)
            ));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// verify

#[derive(Args, Debug)]
struct VerifyCmd {
    /// Solution file written by `gmlab solve`
    file: PathBuf,
    /// Output format: text | json
    #[arg(long, default_value = "text")]
    format: String,
}

fn cmd_verify(cmd: &VerifyCmd) -> Result<(String, Option<u8>)> {
    let text = std::fs::read_to_string(&cmd.file)
        .with_context(|| format!("reading {}", cmd.file.display()))?;
    let mut field = SolutionField::from_text(&text)
        .map_err(|e| anyhow!("parsing {}: {e}", cmd.file.display()))?;
    recompute_residual(&mut field).map_err(|e| anyhow!("residual: {e}"))?;
    match full_report(&field) {
        Ok(report) => {
            let body = if cmd.format == "json" {
                format!("{}\n", report.to_json())
            } else {
                report.to_text_table()
            };
            Ok((body, None))
        }
        Err(e) => Ok((
            format!(
                "cannot verify: {e} (recomputed residual {:.3e})\n",
                field.residual_norm
            ),
            Some(EXIT_NO_CONVERGENCE),
        )),
    }
}

// ---------------------------------------------------------------------------

fn run() -> Result<Option<u8>> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Thresholds(c) => {
            let text = cmd_thresholds(c)?;
            write_or_print(&c.common.out, &text)?;
            Ok(None)
        }
        Command::Steady(c) => {
            let text = cmd_steady(c)?;
            write_or_print(&c.common.out, &text)?;
            Ok(None)
        }
        Command::Solve(c) => {
            let (line, code) = cmd_solve(c)?;
            print!("{line}");
            Ok(code)
        }
        Command::Sweep(c) => {
            let text = cmd_sweep(c)?;
            write_or_print(&c.common.out, &text)?;
            Ok(None)
        }
        Command::Bifurcations(c) => {
            let text = cmd_bifurcations(c)?;
            write_or_print(&c.common.out, &text)?;
            Ok(None)
        }
        Command::Verify(c) => {
            let (text, code) = cmd_verify(c)?;
            print!("{text}");
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(code)) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
