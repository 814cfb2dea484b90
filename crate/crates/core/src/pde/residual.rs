//! Discrete residuals of sampled solutions.
//!
//! Residuals are one-step defects: the sampled slice at `t_n` is compared
//! with one explicit upwind step from the slice at `t_{n-1}`. At the junction
//! the step uses the smallest (subsolution) or largest (supersolution) of
//! the side Hamiltonians and the junction's own controls.

use crate::error::{Error, Result};
use crate::grid::GridStack;
use crate::hamiltonian::LocalHamiltonian;
use crate::problem::JunctionProblem;

use super::{differences, numerical_hamiltonian};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualKind {
    Subsolution,
    Supersolution,
}

fn both(dm: Option<f64>, dp: Option<f64>) -> (f64, f64) {
    match (dm, dp) {
        (Some(a), Some(b)) => (a, b),
        (Some(a), None) => (a, a),
        (None, Some(b)) => (b, b),
        (None, None) => (0.0, 0.0),
    }
}

/// Worst signed one-step defect: positive values violate the inequality.
/// Nodes at the window ends are skipped.
pub fn residual_check(stack: &GridStack, problem: &JunctionProblem, kind: ResidualKind) -> Result<f64> {
    if stack.len() < 2 {
        return Err(Error::Config("residual check needs at least two slices".into()));
    }
    let grid = stack.grid;
    let nodes = problem.node_hamiltonians(&grid);
    let jd = problem.junction_data();
    let j = grid.junction();
    let last = grid.len() - 1;
    let mut worst = f64::NEG_INFINITY;
    for n in 1..stack.len() {
        let dt = stack.times[n] - stack.times[n - 1];
        let (prev, now) = (&stack.slices[n - 1], &stack.slices[n]);
        for i in 0..grid.len() {
            let r = prev[i];
            let (dm, dp) = differences(prev, i, grid.dx);
            let h = if i == j {
                let mut candidates = vec![jd.own_value(r, 0.0)];
                if let Some(dp) = dp {
                    candidates.push(jd.right.eval(r, 0.0, dp));
                }
                if let (Some(l), Some(dm)) = (&jd.left, dm) {
                    candidates.push(l.eval(r, 0.0, dm));
                }
                let finite = candidates.into_iter().filter(|v| *v > f64::NEG_INFINITY);
                match kind {
                    ResidualKind::Subsolution => finite.fold(f64::INFINITY, f64::min),
                    ResidualKind::Supersolution => finite.fold(f64::NEG_INFINITY, f64::max),
                }
            } else if i == 0 || i == last {
                continue;
            } else {
                let (dm, dp) = both(dm, dp);
                numerical_hamiltonian(&nodes[i], r, dm, dp)
            };
            let stepped = prev[i] - dt * h;
            let defect = match kind {
                ResidualKind::Subsolution => now[i] - stepped,
                ResidualKind::Supersolution => stepped - now[i],
            };
            worst = worst.max(defect);
        }
    }
    Ok(worst)
}

/// Worst violation of the relaxed discrete balance at the junction: with
/// `r_k = u_t + H_k` on each side and `k = D^- u - D^+ u`, the minimum of
/// `(r_1, r_2, k)` must be `<= 0` and the maximum `>= 0`.
pub fn kirchhoff_bracket(stack: &GridStack, problem: &JunctionProblem) -> Result<f64> {
    if stack.len() < 2 {
        return Err(Error::Config("bracket check needs at least two slices".into()));
    }
    let jd = problem.junction_data();
    let left = jd.left.as_ref();
    let j = stack.grid.junction();
    let mut worst: f64 = 0.0;
    for n in 1..stack.len() {
        let dt = stack.times[n] - stack.times[n - 1];
        let (prev, now) = (&stack.slices[n - 1], &stack.slices[n]);
        let u_t = (now[j] - prev[j]) / dt;
        let (dm, dp) = differences(prev, j, stack.grid.dx);
        let (dm, dp) = both(dm, dp);
        let r = prev[j];
        let mut terms = vec![u_t + jd.right.eval(r, 0.0, dp), dm - dp];
        if let Some(l) = left {
            terms.push(u_t + l.eval(r, 0.0, dm));
        }
        let lo = terms.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(lo).max(-hi);
    }
    Ok(worst)
}

/// Largest `|flux(D^- phi, D^+ phi) - H(phi')|` over nodes with
/// `|x| in [inner, outer]`, for smooth `phi` with derivative `dphi`.
pub fn consistency_error(
    problem: &JunctionProblem,
    phi: impl Fn(f64) -> f64,
    dphi: impl Fn(f64) -> f64,
    dx: f64,
    inner: f64,
    outer: f64,
) -> f64 {
    let mut worst: f64 = 0.0;
    let n = (outer / dx).round() as i64;
    for k in -n..=n {
        let x = k as f64 * dx;
        if x.abs() < inner || (problem.left.is_none() && x <= 0.0) {
            continue;
        }
        let h: LocalHamiltonian = problem.side_at(x).at(x);
        let u = phi(x);
        let dm = (u - phi(x - dx)) / dx;
        let dp = (phi(x + dx) - u) / dx;
        worst = worst.max((numerical_hamiltonian(&h, u, dm, dp) - h.eval(u, 0.0, dphi(x))).abs());
    }
    worst
}
