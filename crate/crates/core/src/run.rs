//! Run orchestration: dispatch a configuration to a solver and write the
//! CSV artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use crate::applications::kpp::{front_arrival, JUMP};
use crate::applications::presets::{ExactFn, Reference};
use crate::applications::{
    cell_problem_effective_h, kpp_front_times, kpp_solve_variational, CellProblemParams, KppParams,
};
use crate::config::{LimiterName, LimiterSpec, RunConfig, SchemeSpec};
use crate::dp::{value_iteration, DpOptions, PolicyMode};
use crate::error::{Error, Result};
use crate::grid::{GridStack, TimeGrid};
use crate::hamiltonian::FluxLimiter;
use crate::pde::{
    evolution_steps, kirchhoff_bracket, residual_check, solve_evolution, solve_vanishing_viscosity, Evolution,
    JunctionCondition, ResidualKind, ViscousConfig,
};
use crate::problem::JunctionProblem;

/// Radius of the region where sup errors are measured.
pub const ERROR_RADIUS: f64 = 2.0;

/// Slices kept when `grid.save_every` is left at `0`.
const AUTO_SLICES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Explicit monotone scheme with the configured junction condition.
    Solve,
    /// Semi-Lagrangian dynamic programming.
    Value,
    /// Parabolic regularization.
    Vanish,
    /// KPP rate function and front times.
    Kpp,
    /// Discounted cell problem.
    Cell,
}

/// Files written and one-line findings of a run.
#[derive(Clone, Debug, Default)]
pub struct RunOutcome {
    pub summary: Vec<String>,
    pub files: Vec<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub dx: f64,
    pub sup_error: f64,
    /// `log(e_prev / e) / log(dx_prev / dx)`; `None` on the first row.
    pub rate: Option<f64>,
}

/// Sup errors over a strictly decreasing list of grid sizes.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn from_errors(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.windows(2).any(|w| w[1].0 >= w[0].0) {
            return Err(Error::validation("grid.dx_list", "must decrease strictly"));
        }
        let rows = pairs
            .iter()
            .enumerate()
            .map(|(k, &(dx, sup_error))| ConvergenceRow {
                dx,
                sup_error,
                rate: (k > 0 && pairs[k - 1].1 > ROUNDING && sup_error > ROUNDING).then(|| {
                    let (dx0, e0) = pairs[k - 1];
                    (e0 / sup_error).ln() / (dx0 / dx).ln()
                }),
            })
            .collect();
        Ok(ConvergenceReport { rows })
    }

    pub fn rows(&self) -> &[ConvergenceRow] {
        &self.rows
    }

    /// Least-squares slope of `log e` against `log dx` over the rows whose
    /// error is above rounding level.
    pub fn observed_rate(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> =
            self.rows.iter().filter(|r| r.sup_error > ROUNDING).map(|r| (r.dx.ln(), r.sup_error.ln())).collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["dx", "sup_error", "rate"])?;
        for r in &self.rows {
            w.serialize((r.dx, r.sup_error, r.rate))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Errors at or below this are treated as exact and carry no rate.
pub const ROUNDING: f64 = 1e-12;

/// Largest `|u - reference|` over stored slices and `|x| <= radius`, skipping
/// points where the reference is undefined (`NaN`).
pub fn sup_error_where_defined(stack: &GridStack, radius: f64, reference: &dyn Fn(f64, f64) -> f64) -> f64 {
    stack.sup_error(radius, reference)
}

fn auto_save_every(configured: usize, steps: usize) -> usize {
    if configured > 0 {
        configured
    } else {
        (steps / AUTO_SLICES).max(1)
    }
}

fn limiter_is(config: &RunConfig, name: LimiterName) -> bool {
    matches!(&config.scheme, SchemeSpec::FluxLimited { limiter: LimiterSpec::Named(n) } if *n == name)
}

/// Reference solution matching the run, restricted to where it is known.
fn reference_for(config: &RunConfig, command: Command) -> Option<ExactFn> {
    if !config.output.exact {
        return None;
    }
    let preset = config.preset()?;
    match preset.exact? {
        Reference::Single(f) => Some(f),
        Reference::Pair { minus, plus } => {
            let minimal = match command {
                Command::Value => config.value.mode == PolicyMode::AllStrategies,
                Command::Solve => limiter_is(config, LimiterName::Ht),
                _ => false,
            };
            let f = if minimal { minus } else { plus };
            Some(std::sync::Arc::new(move |x: f64, t: f64| if x.abs() + t <= 1.0 + 1e-12 { f(x, t) } else { f64::NAN }))
        }
    }
}

/// Junction condition whose Hamiltonian the trace reports.
fn trace_condition(config: &RunConfig, command: Command, problem: &JunctionProblem) -> Option<JunctionCondition> {
    match command {
        Command::Value if problem.left.is_some() => Some(JunctionCondition::FluxLimited(match config.value.mode {
            PolicyMode::AllStrategies => FluxLimiter::TangentialHt,
            PolicyMode::RegularOnly => FluxLimiter::TangentialHtReg,
        })),
        _ => config.scheme().ok().map(|s| s.condition),
    }
}

fn steps_for(config: &RunConfig, command: Command, problem: &JunctionProblem, dx: f64) -> Result<TimeGrid> {
    let h = problem.horizon;
    match command {
        Command::Solve => evolution_steps(problem, &problem.grid(dx)?, h, config.grid.cfl),
        Command::Value => TimeGrid::covering(h, problem.stable_dt(dx, config.value.cfl)),
        Command::Vanish => TimeGrid::covering(h, viscous(config).stable_dt(problem, dx)),
        Command::Kpp | Command::Cell => Err(Error::Config("no time stepping for this command".into())),
    }
}

fn viscous(config: &RunConfig) -> ViscousConfig {
    config.viscous.unwrap_or_else(|| ViscousConfig::new(0.05))
}

/// Runs the evolution solver named by `command` on `problem` at grid size `dx`.
pub fn solve_stack(
    config: &RunConfig,
    command: Command,
    problem: &JunctionProblem,
    dx: f64,
    save_every: usize,
) -> Result<GridStack> {
    let grid = problem.grid(dx)?;
    match command {
        Command::Solve => solve_evolution(problem, &config.scheme()?, grid, problem.horizon, save_every),
        Command::Value => {
            value_iteration(problem, config.value.mode, dx, DpOptions { cfl: config.value.cfl, save_every })
        }
        Command::Vanish => solve_vanishing_viscosity(problem, &viscous(config), grid, problem.horizon, save_every),
        Command::Kpp | Command::Cell => Err(Error::Config("not an evolution command".into())),
    }
}

fn write_trace(path: &Path, stack: &GridStack, evo: Option<&Evolution>, exact: Option<&ExactFn>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["t", "u0", "G"];
    if exact.is_some() {
        header.push("exact");
    }
    w.write_record(&header)?;
    let j = stack.grid.junction();
    for (&t, s) in stack.times.iter().zip(&stack.slices) {
        let g = match evo {
            Some(e) => Some(e.junction_hamiltonian(s)?),
            None => None,
        };
        match exact {
            Some(f) => w.serialize((t, s[j], g, f(0.0, t)))?,
            None => w.serialize((t, s[j], g))?,
        }
    }
    w.flush()?;
    Ok(())
}

fn write_residuals(path: &Path, rows: &[(&str, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["check", "value"])?;
    for (name, v) in rows {
        w.serialize((name, v))?;
    }
    w.flush()?;
    Ok(())
}

fn evolution_run(config: &RunConfig, command: Command, out: &mut RunOutcome) -> Result<()> {
    let problem = config.build_problem()?;
    let dir = &config.output.dir;
    let exact = reference_for(config, command);
    let dx = config.grid.dx;
    let tg = steps_for(config, command, &problem, dx)?;
    let save_every = if config.output.residual { 1 } else { auto_save_every(config.grid.save_every, tg.steps) };
    let stack = solve_stack(config, command, &problem, dx, save_every)?;
    let j = stack.grid.junction();
    let last = stack.len() - 1;
    out.summary.push(format!(
        "{}: {} nodes, {} steps, u(0, {}) = {:.6}",
        problem.name,
        stack.grid.len(),
        tg.steps,
        stack.times[last],
        stack.slices[last][j]
    ));
    if let Some(f) = &exact {
        out.summary.push(format!(
            "sup error on |x| <= {ERROR_RADIUS} where a reference is known: {:.6}",
            sup_error_where_defined(&stack, ERROR_RADIUS, f.as_ref())
        ));
    }
    if config.output.solution {
        let path = dir.join("solution.csv");
        stack.save_csv(&path, exact.as_ref().map(|f| f.as_ref() as &dyn Fn(f64, f64) -> f64))?;
        out.files.push(path);
    }
    if config.output.junction_trace {
        let evo = match trace_condition(config, command, &problem) {
            Some(c) => Some(Evolution::new(&problem, stack.grid, tg.dt, c)?),
            None => None,
        };
        let path = dir.join("junction_trace.csv");
        write_trace(&path, &stack, evo.as_ref(), exact.as_ref())?;
        out.files.push(path);
    }
    if config.output.residual {
        let mut rows = vec![
            ("subsolution", residual_check(&stack, &problem, ResidualKind::Subsolution)?),
            ("supersolution", residual_check(&stack, &problem, ResidualKind::Supersolution)?),
        ];
        if problem.left.is_some() {
            rows.push(("kirchhoff_bracket", kirchhoff_bracket(&stack, &problem)?));
        }
        for (name, v) in &rows {
            out.summary.push(format!("{name} defect: {v:.3e}"));
        }
        let path = dir.join("residual.csv");
        write_residuals(&path, &rows)?;
        out.files.push(path);
    }
    if let Some(list) = &config.grid.dx_list {
        let f = exact.ok_or_else(|| Error::Config("a convergence study needs a preset with a reference".into()))?;
        let report = convergence_study(config, command, &problem, list, f.as_ref())?;
        if let Some(rate) = report.observed_rate() {
            out.summary.push(format!("observed convergence rate: {rate:.3}"));
        } else {
            out.summary.push("observed convergence rate: undefined, errors at rounding level".into());
        }
        let path = dir.join("convergence.csv");
        report.save_csv(&path)?;
        out.files.push(path);
    }
    Ok(())
}

/// Sup errors against `reference` over a list of grid sizes, one solve at a time.
pub fn convergence_study(
    config: &RunConfig,
    command: Command,
    problem: &JunctionProblem,
    dx_list: &[f64],
    reference: &dyn Fn(f64, f64) -> f64,
) -> Result<ConvergenceReport> {
    let mut pairs = Vec::with_capacity(dx_list.len());
    for &dx in dx_list {
        let stack = solve_stack(config, command, problem, dx, 1)?;
        pairs.push((dx, sup_error_where_defined(&stack, ERROR_RADIUS, reference)));
    }
    ConvergenceReport::from_errors(&pairs)
}

fn kpp_run(config: &RunConfig, out: &mut RunOutcome) -> Result<()> {
    let params: KppParams = config.kpp.unwrap_or_default();
    let horizon = config.horizon();
    let dx = config.grid.dx;
    let stack = kpp_solve_variational(&params, dx, horizon, 1)?;
    let ft = kpp_front_times(&params);
    let numeric = front_arrival(&stack, JUMP);
    out.summary.push(format!(
        "t1 = {:.4}, t2 = {}, first arrival = {:.4}, numerical arrival = {}",
        ft.t1,
        ft.t2.map_or("none".into(), |t| format!("{t:.4}")),
        ft.first_arrival,
        numeric.map_or("not reached".into(), |t| format!("{t:.4}"))
    ));
    let dir = &config.output.dir;
    if config.output.solution {
        let path = dir.join("rate_function.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["t", "x", "u"])?;
        let every = auto_save_every(config.grid.save_every, stack.len());
        for (n, (&t, s)) in stack.times.iter().zip(&stack.slices).enumerate() {
            if n % every != 0 && n + 1 != stack.len() {
                continue;
            }
            for (i, &v) in s.iter().enumerate() {
                w.serialize((t, stack.grid.x(i) + JUMP, v))?;
            }
        }
        w.flush()?;
        out.files.push(path);
    }
    let path = dir.join("front.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["t1", "t2", "first_arrival", "new_front", "numerical_arrival"])?;
    w.serialize((ft.t1, ft.t2, ft.first_arrival, ft.new_front, numeric))?;
    w.flush()?;
    out.files.push(path);
    Ok(())
}

fn cell_run(config: &RunConfig, out: &mut RunOutcome) -> Result<()> {
    let params = config.cell.unwrap_or_else(|| CellProblemParams::new(1.0, 2.0, [0.0, 1.0]));
    let hbar = cell_problem_effective_h(&params)?;
    out.summary.push(format!("effective Hamiltonian at p = ({}, {}): {hbar:.6}", params.p[0], params.p[1]));
    let path = config.output.dir.join("effective_hamiltonian.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["m", "big_m", "p1", "p2", "alpha", "hbar"])?;
    w.serialize((params.m, params.big_m, params.p[0], params.p[1], params.alpha, hbar))?;
    w.flush()?;
    out.files.push(path);
    Ok(())
}

/// Runs `command` on a validated configuration, writing into `output.dir`.
pub fn run(config: &RunConfig, command: Command) -> Result<RunOutcome> {
    config.validate()?;
    fs::create_dir_all(&config.output.dir)?;
    let mut out = RunOutcome::default();
    match command {
        Command::Solve | Command::Value | Command::Vanish => evolution_run(config, command, &mut out)?,
        Command::Kpp => kpp_run(config, &mut out)?,
        Command::Cell => cell_run(config, &mut out)?,
    }
    Ok(out)
}
