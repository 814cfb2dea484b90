//! Front propagation for KPP reaction with a rate that jumps at `x = 1`:
//! `c = c1` on `x < 1` and `c = c2` beyond, fronts starting from
//! `(-inf, edge]`. The rate function solves the variational inequality
//! `min(I_t + I_x^2 / 2 + c, I) = 0`.
//!
//! Numerical work happens in coordinates shifted by one, so the rate jump
//! sits at the junction `0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridStack};
use crate::hamiltonian::{AnalyticProfile, FluxLimiter, Side, SideHamiltonian};
use crate::pde::{evolution_steps, Evolution, JunctionCondition};
use crate::problem::{InitialData, JunctionProblem};
use crate::scalar::golden_section;

/// Position of the rate jump in original coordinates.
pub const JUMP: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KppParams {
    pub c1: f64,
    pub c2: f64,
    /// Right end of the initial support `(-inf, edge]`.
    #[serde(default)]
    pub edge: f64,
    /// Finite stand-in for the infinite initial data; `None` means
    /// `10 max(c1, c2) horizon`.
    #[serde(default)]
    pub cap: Option<f64>,
    /// Slopes beyond this continue linearly, bounding propagation speed.
    #[serde(default = "default_velocity_cap")]
    pub velocity_cap: f64,
}

fn default_velocity_cap() -> f64 {
    6.0
}

impl Default for KppParams {
    fn default() -> Self {
        KppParams { c1: 0.5, c2: 2.0, edge: 0.0, cap: None, velocity_cap: default_velocity_cap() }
    }
}

impl KppParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c1 > 0.0 && self.c2 > 0.0) {
            return Err(Error::validation("kpp", format!("rates must be positive, got {} and {}", self.c1, self.c2)));
        }
        if self.edge >= JUMP {
            return Err(Error::validation("kpp.edge", "initial support must end before the rate jump"));
        }
        if !(self.velocity_cap > 0.0) {
            return Err(Error::validation("kpp.velocity_cap", "must be positive"));
        }
        Ok(())
    }

    pub fn cap_for(&self, horizon: f64) -> f64 {
        self.cap.unwrap_or(10.0 * self.c1.max(self.c2) * horizon)
    }

    /// Shifted junction problem on `[-3, 3]` (original `[-2, 4]`).
    pub fn problem(&self, horizon: f64) -> JunctionProblem {
        let side = |side, c| {
            SideHamiltonian::analytic(
                side,
                AnalyticProfile::Quadratic { offset: c, velocity_cap: self.velocity_cap, discount: 0.0 },
            )
        };
        JunctionProblem {
            name: "kpp".into(),
            right: side(Side::Right, self.c2),
            left: Some(side(Side::Left, self.c1)),
            junction: None,
            initial: InitialData::Indicator { edge: self.edge - JUMP, cap: self.cap_for(horizon) },
            horizon,
            window: (-3.0, 3.0),
        }
    }
}

/// `J(x, t)`: least action `int |y'|^2 / 2 - c(y)` over paths from the
/// initial support to `x` in time `t`. Paths may rest at the jump to pick up
/// the larger rate.
pub fn kpp_action_j(x: f64, t: f64, params: &KppParams) -> Result<f64> {
    params.validate()?;
    if !(t > 0.0) {
        return Err(Error::validation("t", format!("must be positive, got {t}")));
    }
    let (c1, c2) = (params.c1, params.c2);
    let d = (x - params.edge).max(0.0);
    let tol = 1e-12 * (1.0 + t);
    if x <= JUMP {
        let straight = d * d / (2.0 * t) - c1 * t;
        if c2 <= c1 {
            return Ok(straight);
        }
        if x == JUMP {
            return Ok(kpp_action_at_jump(t, params));
        }
        // via the jump: distance (1 - edge) + (1 - x) travelled at constant speed, rest h at the jump
        let via = (JUMP - params.edge) + (JUMP - x);
        let f = |h: f64| via * via / (2.0 * (t - h)) - c1 * (t - h) - c2 * h;
        let best = golden_section(f, 0.0, t * (1.0 - 1e-9), tol);
        return Ok(straight.min(best.value));
    }
    // beyond the jump: reach it at time s, then run at the rate c2
    let a = JUMP - params.edge;
    let b = x - JUMP;
    let f = |s: f64| a * a / (2.0 * s) - c1 * s + b * b / (2.0 * (t - s)) - c2 * (t - s);
    Ok(golden_section(f, t * 1e-9, t * (1.0 - 1e-9), tol).value)
}

/// Closed form of `J` at the jump for fronts starting at `edge = 0`.
fn kpp_action_at_jump(t: f64, params: &KppParams) -> f64 {
    let (c1, c2) = (params.c1, params.c2);
    let a = JUMP - params.edge;
    if c2 <= c1 {
        return a * a / (2.0 * t) - c1 * t;
    }
    let rest_from = a / (2.0 * (c2 - c1)).sqrt();
    if t <= rest_from {
        a * a / (2.0 * t) - c1 * t
    } else {
        a * (2.0 * (c2 - c1)).sqrt() - c2 * t
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrontTimes {
    /// Arrival at the jump without resting: `1 / sqrt(2 c1)`.
    pub t1: f64,
    /// Zero of the resting branch `sqrt(2 (c2 - c1)) - c2 t`; `None` unless `c2 > c1`.
    pub t2: Option<f64>,
    pub first_arrival: f64,
    /// The resting branch reaches zero first, which happens iff `c2 > 2 c1`.
    pub new_front: bool,
}

/// Arrival times of the front at the jump for the initial support `(-inf, 0]`.
pub fn kpp_front_times(params: &KppParams) -> FrontTimes {
    let (c1, c2) = (params.c1, params.c2);
    let t1 = 1.0 / (2.0 * c1).sqrt();
    let t2 = (c2 > c1).then(|| std::f64::consts::SQRT_2 * (c2 - c1).sqrt() / c2);
    let new_front = c2 > 2.0 * c1;
    let first_arrival = match t2 {
        Some(t2) if new_front => t2,
        _ => t1,
    };
    FrontTimes { t1, t2, first_arrival, new_front }
}

/// Rate function on the shifted grid: explicit upwind steps with the
/// tangential junction Hamiltonian, clipped below by the obstacle `0`.
pub fn kpp_solve_variational(params: &KppParams, dx: f64, horizon: f64, save_every: usize) -> Result<GridStack> {
    params.validate()?;
    let problem = params.problem(horizon);
    problem.validate()?;
    let grid: Grid = problem.grid(dx)?;
    let tg = evolution_steps(&problem, &grid, horizon, 0.5)?;
    let evo = Evolution::new(&problem, grid, tg.dt, JunctionCondition::FluxLimited(FluxLimiter::TangentialHt))?;
    let u0 = grid.nodes().map(|x| problem.initial.eval(x).max(0.0)).collect();
    evo.run(u0, tg, save_every, Some(0.0))
}

/// First stored time at which the rate function vanishes at original
/// position `x`, linearly interpolated between slices.
pub fn front_arrival(stack: &GridStack, x: f64) -> Option<f64> {
    let y = x - JUMP;
    let vals: Vec<f64> = stack.slices.iter().map(|s| stack.grid.interpolate(s, y)).collect();
    let k = vals.iter().position(|&v| v <= 0.0)?;
    if k == 0 {
        return Some(stack.times[0]);
    }
    // the last positive stretch decays linearly in time near the arrival
    let (t0, t1) = (stack.times[k - 1], stack.times[k]);
    let v0 = vals[k - 1];
    let slope = if k >= 2 { (vals[k - 2] - v0) / (stack.times[k - 1] - stack.times[k - 2]) } else { 0.0 };
    Some(if slope > 0.0 { (t0 + v0 / slope).min(t1) } else { t1 })
}
