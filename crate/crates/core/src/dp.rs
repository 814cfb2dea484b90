//! Semi-Lagrangian dynamic programming for the value functions over all
//! strategies and over regular strategies only.
//!
//! One backward step at node `x` minimizes, over the admissible facets,
//! the exact running cost of the step plus the discounted value at the foot
//! `x + b dt`, read by linear interpolation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridStack, TimeGrid};
use crate::hamiltonian::{ControlFacet, FacetFamily, LocalHamiltonian};
use crate::problem::JunctionProblem;
use crate::trajectory::{run_cost, Control, Policy};

/// Which strategies may hold a trajectory at the junction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyMode {
    /// Every tangential mixture of the two sides.
    #[default]
    AllStrategies,
    /// Only mixtures where each side pushes toward the junction.
    RegularOnly,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DpOptions {
    /// Courant factor in `(0, 1]`.
    pub cfl: f64,
    /// Keep every `save_every`-th slice (the last one is always kept).
    pub save_every: usize,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions { cfl: 1.0, save_every: 1 }
    }
}

/// Admissible controls at every node: the side facets away from the
/// junction, and at the junction the tangential mixtures for `mode`, the
/// junction's own controls and the facets leaving into either side.
#[derive(Clone, Debug)]
pub struct ControlSets {
    grid: Grid,
    nodes: Vec<FacetFamily>,
    junction: FacetFamily,
}

impl ControlSets {
    pub fn new(problem: &JunctionProblem, grid: Grid, mode: PolicyMode) -> Result<Self> {
        if !problem.has_facets() {
            return Err(Error::Config("value iteration needs facet data on both sides".into()));
        }
        let data = problem.junction_data();
        let tangential = data
            .tangential_family(mode == PolicyMode::RegularOnly)
            .ok_or_else(|| Error::Config("no tangential family at the junction".into()))?;
        let mut junction: Vec<ControlFacet> = tangential.facets().to_vec();
        if let Some(own) = &data.own {
            junction.extend(own.iter().copied());
        }
        if let LocalHamiltonian::Facets { moving_right, .. } = &data.right {
            junction.extend(moving_right.iter().copied());
        }
        if let Some(LocalHamiltonian::Facets { moving_left, .. }) = &data.left {
            junction.extend(moving_left.iter().copied());
        }
        let nodes = (0..grid.len())
            .map(|i| {
                let x = grid.x(i);
                problem.side_at(x).at(x).family().cloned().unwrap_or_default()
            })
            .collect();
        Ok(ControlSets { grid, nodes, junction: FacetFamily::new(junction) })
    }

    pub fn junction(&self) -> &FacetFamily {
        &self.junction
    }

    fn at_node(&self, i: usize) -> &FacetFamily {
        if i == self.grid.junction() {
            &self.junction
        } else {
            &self.nodes[i]
        }
    }
}

/// Cost of following `f` for `dt` from `x`, then continuing with `prev`.
#[inline]
fn facet_step(grid: &Grid, prev: &[f64], x: f64, f: &ControlFacet, dt: f64) -> f64 {
    let (cost, disc) = run_cost(f, dt);
    cost + disc * grid.interpolate(prev, x + f.b * dt)
}

fn best_step(grid: &Grid, prev: &[f64], x: f64, family: &FacetFamily, dt: f64) -> Option<(f64, ControlFacet)> {
    family.iter().map(|f| (facet_step(grid, prev, x, f, dt), *f)).min_by(|a, b| a.0.total_cmp(&b.0))
}

/// Rejects steps whose foot may leave the neighbouring cell.
pub fn check_cfl(dt: f64, dx: f64, velocity_bound: f64) -> Result<()> {
    if dt * velocity_bound > dx * (1.0 + 1e-12) {
        return Err(Error::Config(format!("time step {dt} exceeds the CFL bound dx / M = {}", dx / velocity_bound)));
    }
    Ok(())
}

/// Backward dynamic programming from the initial data up to the horizon.
pub fn value_iteration(problem: &JunctionProblem, mode: PolicyMode, dx: f64, opts: DpOptions) -> Result<GridStack> {
    problem.validate()?;
    if !(opts.cfl > 0.0 && opts.cfl <= 1.0) {
        return Err(Error::validation("grid.cfl", format!("must lie in (0, 1], got {}", opts.cfl)));
    }
    let grid = problem.grid(dx)?;
    let tg = TimeGrid::covering(problem.horizon, problem.stable_dt(dx, opts.cfl))?;
    value_iteration_with_steps(problem, mode, grid, tg, opts.save_every)
}

/// Backward dynamic programming with an explicit time grid.
pub fn value_iteration_with_steps(
    problem: &JunctionProblem,
    mode: PolicyMode,
    grid: Grid,
    tg: TimeGrid,
    save_every: usize,
) -> Result<GridStack> {
    let controls = ControlSets::new(problem, grid, mode)?;
    check_cfl(tg.dt, grid.dx, problem.lipschitz())?;
    let save_every = save_every.max(1);
    let mut stack = GridStack::new(grid);
    let mut u: Vec<f64> = grid.nodes().map(|x| problem.initial.eval(x)).collect();
    stack.push(0.0, u.clone());
    let mut next = vec![0.0; grid.len()];
    for n in 1..=tg.steps {
        (0..grid.len())
            .into_par_iter()
            .map(|i| best_step(&grid, &u, grid.x(i), controls.at_node(i), tg.dt).map_or(u[i], |b| b.0))
            .collect_into_vec(&mut next);
        std::mem::swap(&mut u, &mut next);
        if n % save_every == 0 || n == tg.steps {
            stack.push(tg.time(n), u.clone());
        }
    }
    Ok(stack)
}

/// Greedy feedback read off a value stack saved at every step.
pub struct GreedyPolicy<'a> {
    problem: &'a JunctionProblem,
    stack: &'a GridStack,
    controls: ControlSets,
    dt: f64,
}

impl<'a> GreedyPolicy<'a> {
    pub fn new(problem: &'a JunctionProblem, stack: &'a GridStack, mode: PolicyMode) -> Result<Self> {
        if stack.len() < 2 {
            return Err(Error::Config("greedy policy needs at least two slices".into()));
        }
        let dt = stack.times[1] - stack.times[0];
        let controls = ControlSets::new(problem, stack.grid, mode)?;
        Ok(GreedyPolicy { problem, stack, controls, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
}

impl Policy for GreedyPolicy<'_> {
    fn choose(&self, x: f64, time_to_go: f64) -> Control {
        let prev = &self.stack.slices[self.stack.index_at_or_before(time_to_go - self.dt)];
        if x == 0.0 {
            let (_, f) = best_step(&self.stack.grid, prev, 0.0, self.controls.junction(), self.dt)
                .expect("nonempty junction control set");
            return if f.b == 0.0 { Control::Hold(f) } else { Control::Move(f) };
        }
        let local = self.problem.side_at(x).at(x);
        let family = local.family().expect("facet data checked in GreedyPolicy::new");
        let f = family
            .iter()
            .min_by(|a, b| {
                run_value(&self.controls, prev, x, a, self.dt).total_cmp(&run_value(
                    &self.controls,
                    prev,
                    x,
                    b,
                    self.dt,
                ))
            })
            .expect("nonempty side family");
        Control::Move(*f)
    }
}

/// Best value of leaving the junction or holding there for `h`.
fn junction_continuation(controls: &ControlSets, prev: &[f64], h: f64) -> f64 {
    controls.junction().iter().map(|f| facet_step(&controls.grid, prev, 0.0, f, h)).fold(f64::INFINITY, f64::min)
}

/// Value of following `f` from `x != 0` for `theta`. A run that reaches the
/// junction within the step continues from there with the best junction
/// control for the remaining time.
fn run_value(controls: &ControlSets, prev: &[f64], x: f64, f: &ControlFacet, theta: f64) -> f64 {
    let foot = x + f.b * theta;
    if x * foot <= 0.0 && f.b != 0.0 {
        let tau = -x / f.b;
        let (cost, disc) = run_cost(f, tau);
        cost + disc * junction_continuation(controls, prev, theta - tau)
    } else {
        facet_step(&controls.grid, prev, x, f, theta)
    }
}

/// One-step dynamic programming operator over a horizon `theta`, applied
/// to the slice `prev` at `x`.
fn dpp_step(problem: &JunctionProblem, controls: &ControlSets, prev: &[f64], x: f64, theta: f64) -> f64 {
    if x == 0.0 {
        return junction_continuation(controls, prev, theta);
    }
    let local = problem.side_at(x).at(x);
    let Some(family) = local.family() else {
        return f64::NAN;
    };
    family.iter().map(|f| run_value(controls, prev, x, f, theta)).fold(f64::INFINITY, f64::min)
}

/// Largest `|U(x, t) - min over one-step policies of cost + discounted U(., t - theta)|`
/// over the samples. Each `t` and `t - theta` must be stored slice times.
pub fn dpp_residual(
    stack: &GridStack,
    problem: &JunctionProblem,
    mode: PolicyMode,
    samples: &[(f64, f64)],
    theta: f64,
) -> Result<f64> {
    let controls = ControlSets::new(problem, stack.grid, mode)?;
    let mut worst: f64 = 0.0;
    for &(x, t) in samples {
        let now = stack.value(x, t).ok_or(Error::Span { available: stack.times[stack.len() - 1], requested: t })?;
        let prev = stack.slice_at(t - theta).ok_or(Error::Span { available: t, requested: t - theta })?;
        worst = worst.max((now - dpp_step(problem, &controls, prev, x, theta)).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::applications::presets::one_d_gap_problem;
    use crate::hamiltonian::{Side, SideHamiltonian};
    use crate::problem::InitialData;

    #[test]
    fn junction_values_separate_by_mode() {
        let p = one_d_gap_problem();
        let opts = DpOptions { cfl: 1.0, save_every: 10 };
        let lo = value_iteration(&p, PolicyMode::AllStrategies, 0.01, opts).unwrap();
        let hi = value_iteration(&p, PolicyMode::RegularOnly, 0.01, opts).unwrap();
        assert!(lo.value(0.0, 1.0).unwrap().abs() < 0.02);
        assert!((hi.value(0.0, 1.0).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 0.02);
    }

    #[test]
    fn zero_problem_stays_zero() {
        let fam = FacetFamily::new(vec![ControlFacet::new(-1.0, 0.0, 0.0), ControlFacet::new(1.0, 0.0, 0.0)]);
        let p = JunctionProblem {
            name: "zero".into(),
            right: SideHamiltonian::facets(Side::Right, fam.clone()),
            left: Some(SideHamiltonian::facets(Side::Left, fam)),
            junction: None,
            initial: InitialData::Constant { value: 0.0 },
            horizon: 0.5,
            window: (-1.0, 1.0),
        };
        let s = value_iteration(&p, PolicyMode::AllStrategies, 0.05, DpOptions::default()).unwrap();
        assert!(s.slices.iter().flatten().all(|&v| v == 0.0));
        let theta = s.times[1];
        let samples: Vec<(f64, f64)> = s.grid.nodes().map(|x| (x, s.times[3])).collect();
        assert_eq!(dpp_residual(&s, &p, PolicyMode::AllStrategies, &samples, theta).unwrap(), 0.0);
    }

    #[test]
    fn cfl_violation_is_a_config_error() {
        let p = one_d_gap_problem();
        let grid = p.grid(0.1).unwrap();
        let tg = TimeGrid { dt: 0.2, steps: 5 };
        assert!(matches!(
            value_iteration_with_steps(&p, PolicyMode::AllStrategies, grid, tg, 1),
            Err(Error::Config(_))
        ));
    }
}
