//! Controlled trajectories of the differential inclusion with interface
//! dynamics at the junction.
//!
//! A trajectory is integrated with explicit Euler steps over the elapsed
//! time `s` while the value function is read at time-to-go `t - s`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::hamiltonian::ControlFacet;
use crate::problem::JunctionProblem;

pub use crate::hamiltonian::interface_weights;

/// A control choice for one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Control {
    /// Follow the facet's velocity.
    Move(ControlFacet),
    /// Stay at the junction with a facet whose velocity is zero.
    Hold(ControlFacet),
    /// Stay at the junction by mixing a facet from each side.
    HoldPair(ControlFacet, ControlFacet),
}

/// Chooses a control from the current position and the time to go.
pub trait Policy {
    fn choose(&self, x: f64, time_to_go: f64) -> Control;
}

impl<F: Fn(f64, f64) -> Control> Policy for F {
    fn choose(&self, x: f64, time_to_go: f64) -> Control {
        self(x, time_to_go)
    }
}

/// Samples of state, accumulated discount and accumulated cost.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<f64>,
    pub discounts: Vec<f64>,
    pub costs: Vec<f64>,
}

impl Trajectory {
    fn push(&mut self, t: f64, x: f64, d: f64, l: f64) {
        self.times.push(t);
        self.states.push(x);
        self.discounts.push(d);
        self.costs.push(l);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// `(X, D, L)` at time `t`, linear between samples.
    pub fn sample(&self, t: f64) -> Result<(f64, f64, f64)> {
        let end = self.final_time();
        if self.is_empty() || t > end + 1e-12 * (1.0 + end) || t < 0.0 {
            return Err(Error::Span { available: end, requested: t });
        }
        let k = self.times.partition_point(|&s| s < t);
        if k == 0 {
            return Ok((self.states[0], self.discounts[0], self.costs[0]));
        }
        if k >= self.len() {
            let n = self.len() - 1;
            return Ok((self.states[n], self.discounts[n], self.costs[n]));
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 1.0 };
        let lerp = |v: &[f64]| (1.0 - w) * v[k - 1] + w * v[k];
        Ok((lerp(&self.states), lerp(&self.discounts), lerp(&self.costs)))
    }

    /// Writes `t,X,D,L` rows.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "X", "D", "L"])?;
        for k in 0..self.len() {
            out.serialize((self.times[k], self.states[k], self.discounts[k], self.costs[k]))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Cost and discount factor of running a constant facet for a duration `h`.
pub(crate) fn run_cost(f: &ControlFacet, h: f64) -> (f64, f64) {
    let ch = f.c * h;
    if ch.abs() < 1e-12 {
        (f.l * h * (1.0 - 0.5 * ch), 1.0 - ch)
    } else {
        let disc = (-ch).exp();
        (f.l * (1.0 - disc) / f.c, disc)
    }
}

fn check_bound(f: &ControlFacet, bound: f64) -> Result<()> {
    if f.magnitude() > bound * (1.0 + 1e-9) + 1e-12 || !f.magnitude().is_finite() {
        return Err(Error::Admissibility(format!("{f:?} exceeds the control bound {bound}")));
    }
    Ok(())
}

fn resolve(ctl: Control, x: f64, bound: f64) -> Result<(ControlFacet, bool)> {
    match ctl {
        Control::Move(f) => {
            check_bound(&f, bound)?;
            Ok((f, false))
        }
        Control::Hold(f) => {
            check_bound(&f, bound)?;
            if x != 0.0 || f.b != 0.0 {
                return Err(Error::Admissibility(format!("hold with {f:?} away from the junction or with b != 0")));
            }
            Ok((f, true))
        }
        Control::HoldPair(f1, f2) => {
            check_bound(&f1, bound)?;
            check_bound(&f2, bound)?;
            if x != 0.0 {
                return Err(Error::Admissibility(format!("interface hold requested at x = {x}")));
            }
            let (mu1, _) = interface_weights(f1.b, f2.b)?;
            let mut m = f1.mix(&f2, mu1);
            m.b = 0.0;
            Ok((m, true))
        }
    }
}

/// Integrates from `x0` over a horizon `t0` with steps of at most `dt`.
/// Steps that cross the junction are split at the crossing; the policy is
/// queried again there.
pub fn integrate_trajectory(
    problem: &JunctionProblem,
    policy: &impl Policy,
    x0: f64,
    t0: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(dt > 0.0) {
        return Err(Error::Config(format!("trajectory step must be positive, got {dt}")));
    }
    let bound = problem.control_bound().unwrap_or(f64::INFINITY);
    let mut traj = Trajectory::default();
    let (mut s, mut x, mut d, mut l) = (0.0, x0, 0.0, 0.0);
    traj.push(s, x, d, l);
    let end_tol = 1e-12 * (1.0 + t0);
    while t0 - s > end_tol {
        let mut h = dt.min(t0 - s);
        let (f, hold) = resolve(policy.choose(x, t0 - s), x, bound)?;
        let mut crossing = false;
        if !hold && x != 0.0 && f.b != 0.0 && x * (x + f.b * h) < 0.0 {
            h = -x / f.b;
            crossing = true;
        }
        let (cost, _) = run_cost(&f, h);
        l += (-d).exp() * cost;
        d += f.c * h;
        x = if crossing || hold { 0.0 } else { x + f.b * h };
        s = if t0 - (s + h) <= end_tol { t0 } else { s + h };
        traj.push(s, x, d, l);
    }
    Ok(traj)
}

/// `L(t) + terminal(X(t)) exp(-D(t))`.
pub fn cost_of_trajectory(traj: &Trajectory, terminal: impl Fn(f64) -> f64, t: f64) -> Result<f64> {
    let (x, d, l) = traj.sample(t)?;
    Ok(l + terminal(x) * (-d).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{FacetFamily, Side, SideHamiltonian};
    use crate::problem::InitialData;

    fn eikonal_problem() -> JunctionProblem {
        let fam = FacetFamily::new(vec![ControlFacet::new(-1.0, 0.0, 0.0), ControlFacet::new(1.0, 0.0, 0.0)]);
        JunctionProblem {
            name: "eikonal".into(),
            right: SideHamiltonian::facets(Side::Right, fam.clone()),
            left: Some(SideHamiltonian::facets(Side::Left, fam)),
            junction: None,
            initial: InitialData::MinAbsOne,
            horizon: 1.0,
            window: (-2.0, 2.0),
        }
    }

    /// Gap example at the junction: right facets (a, 1, 1 - a), left (a, 1, 1 + a).
    fn gap_problem() -> JunctionProblem {
        let right: FacetFamily = [-1.0, 0.0, 1.0].iter().map(|&a| ControlFacet::new(a, 1.0, 1.0 - a)).collect();
        let left: FacetFamily = [-1.0, 0.0, 1.0].iter().map(|&a| ControlFacet::new(a, 1.0, 1.0 + a)).collect();
        JunctionProblem {
            name: "gap".into(),
            right: SideHamiltonian::facets(Side::Right, right),
            left: Some(SideHamiltonian::facets(Side::Left, left)),
            junction: None,
            initial: InitialData::MinAbsOne,
            horizon: 1.0,
            window: (-2.0, 2.0),
        }
    }

    #[test]
    fn straight_run_reaches_junction() {
        let p = eikonal_problem();
        let policy = |x: f64, _| {
            if x > 0.0 {
                Control::Move(ControlFacet::new(-1.0, 0.0, 0.0))
            } else {
                Control::HoldPair(ControlFacet::new(-1.0, 0.0, 0.0), ControlFacet::new(1.0, 0.0, 0.0))
            }
        };
        let tr = integrate_trajectory(&p, &policy, 0.5, 1.0, 0.03).unwrap();
        for (&t, &x) in tr.times.iter().zip(&tr.states) {
            let expected = (0.5 - t).max(0.0);
            assert!((x - expected).abs() < 1e-12, "t = {t}: {x}");
        }
        assert!(tr.times.iter().any(|&t| (t - 0.5).abs() < 1e-12));
        assert_eq!(tr.final_time(), 1.0);
    }

    #[test]
    fn pull_pull_hold_costs_nothing() {
        let p = gap_problem();
        let hold = |_: f64, _| Control::HoldPair(ControlFacet::new(1.0, 1.0, 0.0), ControlFacet::new(-1.0, 1.0, 0.0));
        let tr = integrate_trajectory(&p, &hold, 0.0, 1.0, 0.01).unwrap();
        for k in 0..tr.len() {
            assert_eq!(tr.states[k], 0.0);
            assert!(tr.costs[k].abs() < 1e-15);
            assert!((tr.discounts[k] - tr.times[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn regular_hold_cost_matches_closed_form() {
        let p = gap_problem();
        let hold = |_: f64, _| Control::HoldPair(ControlFacet::new(0.0, 1.0, 1.0), ControlFacet::new(0.0, 1.0, 1.0));
        // b1 = b2 = 0 is a degenerate pair; a single rest facet is the regular hold
        assert!(matches!(integrate_trajectory(&p, &hold, 0.0, 1.0, 0.01), Err(Error::DegeneratePair(_))));
        let rest = |_: f64, _| Control::Hold(ControlFacet::new(0.0, 1.0, 1.0));
        let tr = integrate_trajectory(&p, &rest, 0.0, 1.0, 0.01).unwrap();
        for k in 0..tr.len() {
            assert!((tr.costs[k] - (1.0 - (-tr.times[k]).exp())).abs() < 1e-12);
        }
        let v = cost_of_trajectory(&tr, |x: f64| x.abs().min(1.0), 1.0).unwrap();
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        assert!((v - 0.6321).abs() < 1e-4);
    }

    #[test]
    fn terminal_only_costs() {
        let p = eikonal_problem();
        let rest = |_: f64, _| Control::Hold(ControlFacet::new(0.0, 0.0, 0.0));
        let tr = integrate_trajectory(&p, &rest, 0.0, 1.0, 0.1).unwrap();
        assert_eq!(cost_of_trajectory(&tr, |x: f64| x.abs().min(1.0), 1.0).unwrap(), 0.0);
        let run = |_: f64, _| Control::Move(ControlFacet::new(-1.0, 0.0, 0.0));
        let tr = integrate_trajectory(&p, &run, 2.0, 0.7, 0.05).unwrap();
        let u0 = |x: f64| x.abs().min(1.0) + 0.25 * x;
        assert!((cost_of_trajectory(&tr, u0, 0.7).unwrap() - u0(1.3)).abs() < 1e-12);
        assert!(matches!(cost_of_trajectory(&tr, u0, 0.9), Err(Error::Span { .. })));
    }

    #[test]
    fn inadmissible_controls_are_rejected() {
        let p = eikonal_problem();
        let fast = |_: f64, _| Control::Move(ControlFacet::new(-5.0, 0.0, 0.0));
        assert!(matches!(integrate_trajectory(&p, &fast, 1.0, 1.0, 0.1), Err(Error::Admissibility(_))));
        let hold_away = |_: f64, _| Control::Hold(ControlFacet::new(0.0, 0.0, 0.0));
        assert!(matches!(integrate_trajectory(&p, &hold_away, 1.0, 1.0, 0.1), Err(Error::Admissibility(_))));
    }
}
