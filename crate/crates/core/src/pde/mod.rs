//! Explicit monotone finite differences for the junction problem.
//!
//! Away from the junction each node uses the upwind flux
//! `max(H_nd(D^- u), H_ni(D^+ u))`, where `H_nd` (`H_ni`) is the part of the
//! side Hamiltonian driven by velocities pointing left (right). The junction
//! node applies the selected junction condition to its one-sided differences.

pub mod residual;
pub mod viscous;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction, GridStack, TimeGrid};
use crate::hamiltonian::{FluxLimiter, JunctionData, JunctionFunction, LocalHamiltonian};
use crate::problem::JunctionProblem;

pub use residual::{consistency_error, kirchhoff_bracket, residual_check, ResidualKind};
pub use viscous::{solve_vanishing_viscosity, ViscousConfig};

/// Junction condition used at the junction node.
#[derive(Clone, Debug)]
pub enum JunctionCondition {
    FluxLimited(FluxLimiter),
    /// Balanced normal derivatives, imposed through the flux limiter it
    /// reduces to; the junction's own controls stay available.
    Kirchhoff,
    /// Minimum of the two side Hamiltonians. Not monotone; kept as a
    /// reference for studying non-uniqueness.
    IshiiRelaxed,
}

#[derive(Clone, Debug)]
pub struct JunctionScheme {
    pub condition: JunctionCondition,
    /// Courant factor in `(0, 1]`.
    pub cfl: f64,
}

impl JunctionScheme {
    pub fn new(condition: JunctionCondition, cfl: f64) -> Result<Self> {
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(Error::validation("grid.cfl", format!("must lie in (0, 1], got {cfl}")));
        }
        Ok(JunctionScheme { condition, cfl })
    }

    pub fn flux_limited(limiter: FluxLimiter) -> Self {
        JunctionScheme { condition: JunctionCondition::FluxLimited(limiter), cfl: 0.5 }
    }
}

/// Upwind flux of one side Hamiltonian.
#[inline]
pub fn numerical_hamiltonian(h: &LocalHamiltonian, r: f64, d_minus: f64, d_plus: f64) -> f64 {
    h.nondecreasing(r, 0.0, d_minus).max(h.nonincreasing(r, 0.0, d_plus))
}

/// Upwind flux at any node off the junction. At a window end the term that
/// would read from outside the window is dropped, which keeps the update
/// monotone.
#[inline]
pub(crate) fn one_sided_flux(h: &LocalHamiltonian, r: f64, d_minus: Option<f64>, d_plus: Option<f64>) -> f64 {
    match (d_minus, d_plus) {
        (Some(a), Some(b)) => numerical_hamiltonian(h, r, a, b),
        (Some(a), None) => h.nondecreasing(r, 0.0, a),
        (None, Some(b)) => h.nonincreasing(r, 0.0, b),
        (None, None) => h.eval(r, 0.0, 0.0),
    }
}

/// One-sided differences at node `i`; `None` past a window end.
#[inline]
pub(crate) fn differences(u: &[f64], i: usize, dx: f64) -> (Option<f64>, Option<f64>) {
    let dm = (i > 0).then(|| (u[i] - u[i - 1]) / dx);
    let dp = (i + 1 < u.len()).then(|| (u[i + 1] - u[i]) / dx);
    (dm, dp)
}

/// Precomputed explicit scheme for one problem, grid and time step.
#[derive(Clone, Debug)]
pub struct Evolution {
    grid: Grid,
    dt: f64,
    nodes: Vec<LocalHamiltonian>,
    junction: JunctionData,
    condition: JunctionCondition,
}

impl Evolution {
    pub fn new(problem: &JunctionProblem, grid: Grid, dt: f64, condition: JunctionCondition) -> Result<Self> {
        let rate = problem.lipschitz() / grid.dx + problem.discount_bound();
        if !(dt > 0.0) || dt * rate > 1.0 + 1e-12 {
            return Err(Error::Config(format!("time step {dt} violates the CFL bound {}", 1.0 / rate)));
        }
        Ok(Evolution {
            grid,
            dt,
            nodes: problem.node_hamiltonians(&grid),
            junction: problem.junction_data(),
            condition,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn junction_data(&self) -> &JunctionData {
        &self.junction
    }

    /// Updated value at a node other than the junction.
    #[inline]
    pub fn interior_value(&self, u: &[f64], i: usize) -> f64 {
        let (dm, dp) = differences(u, i, self.grid.dx);
        u[i] - self.dt * one_sided_flux(&self.nodes[i], u[i], dm, dp)
    }

    /// Junction Hamiltonian of the selected condition at the current data.
    pub fn junction_hamiltonian(&self, u: &[f64]) -> Result<f64> {
        let j = self.grid.junction();
        let r = u[j];
        let (dm, dp) = differences(u, j, self.grid.dx);
        let dp = dp.ok_or_else(|| Error::Config("the junction needs a right neighbour".into()))?;
        let jd = &self.junction;
        let leaving = || {
            let right = jd.right.moving_right(r, 0.0, dp);
            let left = match (&jd.left, dm) {
                (Some(l), Some(dm)) => l.moving_left(r, 0.0, dm),
                _ => f64::NEG_INFINITY,
            };
            right.max(left)
        };
        Ok(match &self.condition {
            JunctionCondition::FluxLimited(lim) => jd.limiter(lim, r, 0.0)?.max(leaving()),
            JunctionCondition::Kirchhoff => {
                let g = jd.limiter(&FluxLimiter::General(JunctionFunction::Kirchhoff), r, 0.0)?;
                g.max(jd.own_value(r, 0.0)).max(leaving())
            }
            JunctionCondition::IshiiRelaxed => {
                let h1 = jd.right.eval(r, 0.0, dp);
                let h2 = match (&jd.left, dm) {
                    (Some(l), Some(dm)) => l.eval(r, 0.0, dm),
                    _ => f64::INFINITY,
                };
                h1.min(h2)
            }
        })
    }

    pub fn junction_value(&self, u: &[f64]) -> Result<f64> {
        Ok(u[self.grid.junction()] - self.dt * self.junction_hamiltonian(u)?)
    }

    /// Updated value at any node.
    pub fn update_node(&self, u: &[f64], i: usize) -> Result<f64> {
        if i == self.grid.junction() {
            self.junction_value(u)
        } else {
            Ok(self.interior_value(u, i))
        }
    }

    /// One full step into `out`.
    pub fn step(&self, u: &[f64], out: &mut Vec<f64>) -> Result<()> {
        let j = self.grid.junction();
        (0..u.len())
            .into_par_iter()
            .map(|i| if i == j { u[i] } else { self.interior_value(u, i) })
            .collect_into_vec(out);
        out[j] = self.junction_value(u)?;
        Ok(())
    }

    /// Runs `tg.steps` steps from `u0`, clipping from below by `floor` when given.
    pub(crate) fn run(&self, u0: Vec<f64>, tg: TimeGrid, save_every: usize, floor: Option<f64>) -> Result<GridStack> {
        let save_every = save_every.max(1);
        let mut stack = GridStack::new(self.grid);
        let mut u = u0;
        stack.push(0.0, u.clone());
        let mut next = Vec::with_capacity(u.len());
        for n in 1..=tg.steps {
            self.step(&u, &mut next)?;
            if let Some(f) = floor {
                next.iter_mut().for_each(|v| *v = v.max(f));
            }
            std::mem::swap(&mut u, &mut next);
            if n % save_every == 0 || n == tg.steps {
                stack.push(tg.time(n), u.clone());
            }
        }
        Ok(stack)
    }
}

/// One step at every node except the junction, which keeps its value.
pub fn step_interior(u: &GridFunction, problem: &JunctionProblem, dt: f64) -> Result<GridFunction> {
    let evo = Evolution::new(problem, u.grid, dt, JunctionCondition::IshiiRelaxed)?;
    let j = u.grid.junction();
    let values =
        (0..u.values.len()).map(|i| if i == j { u.values[i] } else { evo.interior_value(&u.values, i) }).collect();
    Ok(GridFunction { grid: u.grid, values })
}

/// Updated junction value under `scheme`.
pub fn junction_update(u: &GridFunction, scheme: &JunctionScheme, problem: &JunctionProblem, dt: f64) -> Result<f64> {
    Evolution::new(problem, u.grid, dt, scheme.condition.clone())?.junction_value(&u.values)
}

/// Forward evolution from the initial data up to `horizon`, keeping every
/// `save_every`-th slice and the last one.
pub fn solve_evolution(
    problem: &JunctionProblem,
    scheme: &JunctionScheme,
    grid: Grid,
    horizon: f64,
    save_every: usize,
) -> Result<GridStack> {
    problem.validate()?;
    let scheme = JunctionScheme::new(scheme.condition.clone(), scheme.cfl)?;
    let tg = TimeGrid::covering(horizon, problem.stable_dt(grid.dx, scheme.cfl))?;
    let evo = Evolution::new(problem, grid, tg.dt, scheme.condition)?;
    let u0 = grid.nodes().map(|x| problem.initial.eval(x)).collect();
    evo.run(u0, tg, save_every, None)
}

/// Number of steps `solve_evolution` takes.
pub fn evolution_steps(problem: &JunctionProblem, grid: &Grid, horizon: f64, cfl: f64) -> Result<TimeGrid> {
    TimeGrid::covering(horizon, problem.stable_dt(grid.dx, cfl))
}
