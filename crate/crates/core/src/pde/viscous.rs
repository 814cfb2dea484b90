//! Parabolic regularization `u_t - eps u_xx + H(x, u, u_x) = 0` with no
//! junction condition: diffusion couples the two sides.
//!
//! Diffusion is theta-implicit with zero-flux ends; the Hamiltonian is
//! explicit and upwind. At the junction node the two side fluxes are
//! averaged.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridStack, TimeGrid};
use crate::problem::JunctionProblem;

use super::{differences, one_sided_flux};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViscousConfig {
    pub epsilon: f64,
    /// Implicit weight of the diffusion in `[0, 1]`.
    #[serde(default = "one")]
    pub theta: f64,
    #[serde(default = "half")]
    pub cfl: f64,
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

impl ViscousConfig {
    pub fn new(epsilon: f64) -> Self {
        ViscousConfig { epsilon, theta: 1.0, cfl: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::validation("viscous.epsilon", format!("must be positive, got {}", self.epsilon)));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::validation("viscous.theta", format!("must lie in [0, 1], got {}", self.theta)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::validation("grid.cfl", format!("must lie in (0, 1], got {}", self.cfl)));
        }
        Ok(())
    }

    /// Step keeping the explicit part monotone.
    pub fn stable_dt(&self, problem: &JunctionProblem, dx: f64) -> f64 {
        let rate =
            problem.lipschitz() / dx + problem.discount_bound() + 2.0 * (1.0 - self.theta) * self.epsilon / (dx * dx);
        self.cfl / rate
    }
}

/// Solves the tridiagonal system with constant off-diagonal `-k`, diagonal
/// `1 + 2k` and `1 + k` in the end rows.
fn solve_diffusion(k: f64, rhs: &mut [f64], scratch: &mut Vec<f64>) {
    let n = rhs.len();
    if n == 1 {
        return;
    }
    scratch.clear();
    scratch.resize(n, 0.0);
    let diag = |i: usize| if i == 0 || i == n - 1 { 1.0 + k } else { 1.0 + 2.0 * k };
    let mut denom = diag(0);
    scratch[0] = -k / denom;
    rhs[0] /= denom;
    for i in 1..n {
        denom = diag(i) + k * scratch[i - 1];
        scratch[i] = -k / denom;
        rhs[i] = (rhs[i] + k * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
}

/// Runs `tg.steps` steps; errors when the explicit part is not monotone.
pub fn solve_vanishing_viscosity_with_steps(
    problem: &JunctionProblem,
    cfg: &ViscousConfig,
    grid: Grid,
    tg: TimeGrid,
    save_every: usize,
) -> Result<GridStack> {
    cfg.validate()?;
    let dt = tg.dt;
    let dx = grid.dx;
    let rate = problem.lipschitz() / dx + problem.discount_bound() + 2.0 * (1.0 - cfg.theta) * cfg.epsilon / (dx * dx);
    if dt * rate > 1.0 + 1e-12 {
        return Err(Error::Config(format!("time step {dt} exceeds the explicit stability bound {}", 1.0 / rate)));
    }
    let nodes = problem.node_hamiltonians(&grid);
    let jd = problem.junction_data();
    let j = grid.junction();
    let k = cfg.epsilon * dt / (dx * dx);
    let save_every = save_every.max(1);
    let mut u: Vec<f64> = grid.nodes().map(|x| problem.initial.eval(x)).collect();
    let mut stack = GridStack::new(grid);
    stack.push(0.0, u.clone());
    let mut rhs = Vec::with_capacity(u.len());
    let mut scratch = Vec::new();
    let last = u.len() - 1;
    for n in 1..=tg.steps {
        (0..u.len())
            .into_par_iter()
            .map(|i| {
                let (dm, dp) = differences(&u, i, dx);
                let h = if i == j {
                    let right = one_sided_flux(&jd.right, u[i], dm, dp);
                    match &jd.left {
                        Some(l) => 0.5 * (right + one_sided_flux(l, u[i], dm, dp)),
                        None => right,
                    }
                } else {
                    one_sided_flux(&nodes[i], u[i], dm, dp)
                };
                let lap = match i {
                    0 => u[1] - u[0],
                    i if i == last => u[i - 1] - u[i],
                    _ => u[i - 1] - 2.0 * u[i] + u[i + 1],
                };
                u[i] - dt * h + (1.0 - cfg.theta) * k * lap
            })
            .collect_into_vec(&mut rhs);
        if cfg.theta > 0.0 {
            solve_diffusion(cfg.theta * k, &mut rhs, &mut scratch);
        }
        std::mem::swap(&mut u, &mut rhs);
        if n % save_every == 0 || n == tg.steps {
            stack.push(tg.time(n), u.clone());
        }
    }
    Ok(stack)
}

/// Solves up to `horizon` with the largest monotone step.
pub fn solve_vanishing_viscosity(
    problem: &JunctionProblem,
    cfg: &ViscousConfig,
    grid: Grid,
    horizon: f64,
    save_every: usize,
) -> Result<GridStack> {
    problem.validate()?;
    cfg.validate()?;
    let tg = TimeGrid::covering(horizon, cfg.stable_dt(problem, grid.dx))?;
    solve_vanishing_viscosity_with_steps(problem, cfg, grid, tg, save_every)
}
