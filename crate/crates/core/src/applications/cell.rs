//! Discounted cell problem for a plane crossed by periodic fast lines.
//!
//! The tangential coordinate lives on the periodic cell `[0, 1)` with the
//! fast line at node 0. The corrector solves
//! `alpha w + R(x) |(p1 + w', p2)| = 0` with `R = M` on the line and `m`
//! elsewhere; `-alpha w(0)` approximates the effective Hamiltonian.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellProblemParams {
    /// Speed off the fast lines.
    pub m: f64,
    /// Speed on the fast lines.
    pub big_m: f64,
    /// Gradient `(across the lines, along the lines)`.
    pub p: [f64; 2],
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Grid nodes on the periodic cell.
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    /// Sampled control directions on the unit circle.
    #[serde(default = "default_angles")]
    pub angles: usize,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

fn default_alpha() -> f64 {
    1e-3
}
fn default_nodes() -> usize {
    100
}
fn default_angles() -> usize {
    720
}
fn default_max_iters() -> usize {
    200
}

impl CellProblemParams {
    pub fn new(m: f64, big_m: f64, p: [f64; 2]) -> Self {
        CellProblemParams {
            m,
            big_m,
            p,
            alpha: default_alpha(),
            nodes: default_nodes(),
            angles: default_angles(),
            max_iters: default_max_iters(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.big_m >= self.m) {
            return Err(Error::validation("cell", format!("need M >= m > 0, got m = {}, M = {}", self.m, self.big_m)));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::validation("cell.alpha", "must be positive"));
        }
        if self.nodes < 3 || self.angles < 4 {
            return Err(Error::validation("cell", "need at least 3 nodes and 4 directions"));
        }
        Ok(())
    }
}

/// Upwind linear operator and source for one direction per node.
fn assemble(params: &CellProblemParams, policy: &[usize], dirs: &[(f64, f64)]) -> (DMatrix<f64>, DVector<f64>) {
    let n = params.nodes;
    let dx = 1.0 / n as f64;
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DVector::<f64>::zeros(n);
    for i in 0..n {
        let speed = if i == 0 { params.big_m } else { params.m };
        let (a1, a2) = dirs[policy[i]];
        // alpha w_i - R a1 D w_i - R (a1 p1 + a2 p2) = 0, D upwind along a1
        let k = speed * a1 / dx;
        a[(i, i)] += params.alpha;
        if a1 > 0.0 {
            a[(i, i)] += k;
            a[(i, (i + 1) % n)] -= k;
        } else if a1 < 0.0 {
            a[(i, i)] -= k;
            a[(i, (i + n - 1) % n)] += k;
        }
        rhs[i] = speed * (a1 * params.p[0] + a2 * params.p[1]);
    }
    (a, rhs)
}

fn direction_value(params: &CellProblemParams, w: &DVector<f64>, i: usize, dir: (f64, f64)) -> f64 {
    let n = params.nodes;
    let dx = 1.0 / n as f64;
    let speed = if i == 0 { params.big_m } else { params.m };
    let (a1, a2) = dir;
    let dw = if a1 > 0.0 { (w[(i + 1) % n] - w[i]) / dx } else { (w[i] - w[(i + n - 1) % n]) / dx };
    -speed * (a1 * (params.p[0] + dw) + a2 * params.p[1])
}

/// Corrector by policy iteration; returns `w` on the cell nodes.
pub fn cell_corrector(params: &CellProblemParams) -> Result<Vec<f64>> {
    params.validate()?;
    let dirs: Vec<(f64, f64)> = (0..params.angles)
        .map(|k| {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / params.angles as f64;
            (phi.cos(), phi.sin())
        })
        .collect();
    let n = params.nodes;
    let mut policy = vec![0usize; n];
    let mut residual = f64::INFINITY;
    for _ in 0..params.max_iters {
        let (a, rhs) = assemble(params, &policy, &dirs);
        let w = a.lu().solve(&rhs).ok_or_else(|| Error::NoSolution("singular cell operator".into()))?;
        let mut changed = false;
        residual = 0.0;
        for i in 0..n {
            let current = direction_value(params, &w, i, dirs[policy[i]]);
            let (best_k, best) = dirs
                .iter()
                .enumerate()
                .map(|(k, &d)| (k, direction_value(params, &w, i, d)))
                .fold((policy[i], current), |acc, c| if c.1 > acc.1 { c } else { acc });
            residual = f64::max(residual, best - current);
            if best > current + 1e-12 * (1.0 + current.abs()) {
                policy[i] = best_k;
                changed = true;
            }
        }
        if !changed {
            return Ok(w.iter().copied().collect());
        }
    }
    Err(Error::Iteration { iterations: params.max_iters, residual })
}

/// `-alpha w(0)`.
pub fn cell_problem_effective_h(params: &CellProblemParams) -> Result<f64> {
    Ok(-params.alpha * cell_corrector(params)?[0])
}
