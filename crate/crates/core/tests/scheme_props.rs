mod common;

use proptest::prelude::*;
use stratahj::applications::presets::{one_d_gap_problem, preset, PresetName};
use stratahj::dp::{value_iteration, DpOptions, GreedyPolicy, PolicyMode};
use stratahj::grid::comparison_gap;
use stratahj::hamiltonian::FluxLimiter;
use stratahj::pde::{consistency_error, solve_evolution, Evolution, JunctionCondition, JunctionScheme};
use stratahj::problem::JunctionProblem;
use stratahj::run::ConvergenceReport;
use stratahj::trajectory::{cost_of_trajectory, integrate_trajectory};

fn condition(k: u8, a: f64) -> JunctionCondition {
    match k % 4 {
        0 => JunctionCondition::FluxLimited(FluxLimiter::TangentialHt),
        1 => JunctionCondition::FluxLimited(FluxLimiter::TangentialHtReg),
        2 => JunctionCondition::Kirchhoff,
        _ => JunctionCondition::FluxLimited(FluxLimiter::Constant(a)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn scheme_update_is_monotone(
        p in common::problem((-0.2, 0.2), 1.0),
        u in prop::collection::vec(-1.0..1.0f64, 21),
        k in 0u8..4, a in -1.0..1.0f64,
        node in 0usize..21, at_junction in any::<bool>(), shift in -1i64..=1, bump in 1e-3..0.5f64,
    ) {
        let grid = p.grid(0.02).unwrap();
        prop_assert_eq!(grid.len(), 21);
        let evo = Evolution::new(&p, grid, p.stable_dt(grid.dx, 0.9), condition(k, a)).unwrap();
        let i = if at_junction { grid.junction() } else { node };
        let j = (i as i64 + shift).clamp(0, 20) as usize;
        let mut raised = u.clone();
        raised[j] += bump;
        prop_assert!(evo.update_node(&raised, i).unwrap() >= evo.update_node(&u, i).unwrap() - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn discrete_comparison(
        p in common::problem((-1.0, 1.0), 0.3),
        lower in prop::collection::vec(-1.0..1.0f64, 9),
        lift in prop::collection::vec(0.0..0.5f64, 9),
        k in 0u8..4, a in -1.0..1.0f64,
    ) {
        let upper: Vec<f64> = lower.iter().zip(&lift).map(|(l, d)| l + d).collect();
        let mut lo = p.clone();
        lo.initial = common::table(-1.0, 1.0, lower);
        let mut hi = p;
        hi.initial = common::table(-1.0, 1.0, upper);
        let scheme = JunctionScheme::new(condition(k, a), 0.5).unwrap();
        let grid = lo.grid(0.02).unwrap();
        let u = solve_evolution(&lo, &scheme, grid, lo.horizon, 1).unwrap();
        let v = solve_evolution(&hi, &scheme, grid, hi.horizon, 1).unwrap();
        prop_assert!(comparison_gap(&u, &v).unwrap() <= 1e-12);
    }

    #[test]
    fn value_iteration_is_monotone_in_the_data(
        p in common::problem((-1.0, 1.0), 0.3),
        lower in prop::collection::vec(-1.0..1.0f64, 9),
        lift in prop::collection::vec(0.0..0.5f64, 9),
        regular in any::<bool>(),
    ) {
        let mode = if regular { PolicyMode::RegularOnly } else { PolicyMode::AllStrategies };
        let upper: Vec<f64> = lower.iter().zip(&lift).map(|(l, d)| l + d).collect();
        let mut lo = p.clone();
        lo.initial = common::table(-1.0, 1.0, lower);
        let mut hi = p;
        hi.initial = common::table(-1.0, 1.0, upper);
        let opts = DpOptions { cfl: 1.0, save_every: 1 };
        let u = value_iteration(&lo, mode, 0.02, opts).unwrap();
        let v = value_iteration(&hi, mode, 0.02, opts).unwrap();
        prop_assert!(comparison_gap(&u, &v).unwrap() <= 1e-12);
    }

    #[test]
    fn minimal_value_is_below_maximal(p in common::problem((-1.0, 1.0), 0.5)) {
        let dx = 0.02;
        let opts = DpOptions { cfl: 1.0, save_every: 1 };
        let lo = value_iteration(&p, PolicyMode::AllStrategies, dx, opts).unwrap();
        let hi = value_iteration(&p, PolicyMode::RegularOnly, dx, opts).unwrap();
        prop_assert!(comparison_gap(&lo, &hi).unwrap() <= 2.0 * dx);
    }
}

fn greedy_matches_dp(p: &JunctionProblem, x0: f64, mode: PolicyMode) -> (f64, f64) {
    let dx = 1e-2;
    let stack = value_iteration(p, mode, dx, DpOptions { cfl: 1.0, save_every: 1 }).unwrap();
    let policy = GreedyPolicy::new(p, &stack, mode).unwrap();
    let t = p.horizon;
    let traj = integrate_trajectory(p, &policy, x0, t, policy.dt()).unwrap();
    let cost = cost_of_trajectory(&traj, |x| p.initial.eval(x), t).unwrap();
    (cost, stack.value(x0, t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn greedy_trajectories_realize_the_value(x0 in -1.0..1.0f64, which in 0usize..3, regular in any::<bool>()) {
        let name = [PresetName::OneDGap, PresetName::GigaHamamuki, PresetName::Tanker][which];
        let p = preset(name).problem.unwrap();
        let x0 = if name == PresetName::Tanker { x0.abs() } else { x0 };
        let mode = if regular { PolicyMode::RegularOnly } else { PolicyMode::AllStrategies };
        let (cost, value) = greedy_matches_dp(&p, x0, mode);
        prop_assert!((cost - value).abs() <= 3e-2, "{name} from {x0}: greedy {cost}, value {value}");
    }

    #[test]
    fn trajectories_are_lipschitz_with_growing_discount(x0 in -1.0..1.0f64, regular in any::<bool>()) {
        let p = one_d_gap_problem();
        let mode = if regular { PolicyMode::RegularOnly } else { PolicyMode::AllStrategies };
        let stack = value_iteration(&p, mode, 1e-2, DpOptions { cfl: 1.0, save_every: 1 }).unwrap();
        let policy = GreedyPolicy::new(&p, &stack, mode).unwrap();
        let traj = integrate_trajectory(&p, &policy, x0, 1.0, policy.dt()).unwrap();
        let speed = p.control_bound().unwrap();
        for k in 1..traj.len() {
            let h = traj.times[k] - traj.times[k - 1];
            prop_assert!((traj.states[k] - traj.states[k - 1]).abs() <= speed * h + 1e-12);
            prop_assert!(traj.discounts[k] >= traj.discounts[k - 1]);
        }
    }
}

#[test]
fn interior_consistency_is_first_order() {
    let phi = |x: f64| (2.0 * x).sin() + 0.5 * x * x;
    let dphi = |x: f64| 2.0 * (2.0 * x).cos() + x;
    for p in [one_d_gap_problem(), preset(PresetName::GigaHamamuki).problem.unwrap()] {
        let errs: Vec<(f64, f64)> =
            [8e-3, 4e-3, 2e-3].iter().map(|&dx| (dx, consistency_error(&p, phi, dphi, dx, 0.1, 1.0))).collect();
        let rate = ConvergenceReport::from_errors(&errs).unwrap().observed_rate().unwrap();
        assert!((0.8..=1.2).contains(&rate), "{}: rate {rate}", p.name);
    }
}
