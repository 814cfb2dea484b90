use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use stratahj::applications::kpp::{front_arrival, JUMP};
use stratahj::applications::presets::{preset, tanker_problem, tanker_value, PresetName};
use stratahj::applications::{
    cell_problem_effective_h, kpp_action_j, kpp_solve_variational, CellProblemParams, KppParams,
};
use stratahj::grid::GridStack;
use stratahj::hamiltonian::FluxLimiter;
use stratahj::pde::{
    evolution_steps, residual_check, solve_evolution, JunctionCondition, JunctionScheme, ResidualKind,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn action_with_equal_rates_is_the_free_action(c in 0.1..3.0f64, x in -1.0..3.0f64, t in 0.05..2.0f64) {
        let p = KppParams { c1: c, c2: c, ..KppParams::default() };
        let d = x.max(0.0);
        prop_assert!((kpp_action_j(x, t, &p).unwrap() - (d * d / (2.0 * t) - c * t)).abs() <= 1e-8);
    }

    #[test]
    fn action_decreases_in_time(x in 0.0..3.0f64, t in 0.05..1.5f64, dt in 0.01..0.5f64) {
        let p = KppParams::default();
        prop_assert!(kpp_action_j(x, t + dt, &p).unwrap() <= kpp_action_j(x, t, &p).unwrap() + 1e-9);
    }
}

#[test]
fn rate_function_is_monotone_in_time_and_cap() {
    let lo = KppParams { cap: Some(5.0), ..KppParams::default() };
    let hi = KppParams { cap: Some(10.0), ..KppParams::default() };
    let a = kpp_solve_variational(&lo, 1e-2, 1.0, 1).unwrap();
    let b = kpp_solve_variational(&hi, 1e-2, 1.0, 1).unwrap();
    for (sa, sb) in a.slices.iter().zip(&b.slices) {
        assert!(sa.iter().zip(sb).all(|(u, v)| u <= &(v + 1e-12)));
    }
    for w in b.slices.windows(2) {
        assert!(w[1].iter().zip(&w[0]).all(|(new, old)| new <= &(old + 1e-12)));
    }
}

#[test]
fn front_arrival_with_a_new_front() {
    let stack = kpp_solve_variational(&KppParams::default(), 2e-3, 1.2, 1).unwrap();
    let arrival = front_arrival(&stack, JUMP).unwrap();
    assert_abs_diff_eq!(arrival, 3.0f64.sqrt() / 2.0, epsilon = 0.02);
}

#[test]
fn effective_hamiltonian_is_homogeneous_and_bounded() {
    let base = cell_problem_effective_h(&CellProblemParams::new(1.0, 2.0, [0.6, 0.8])).unwrap();
    let doubled = cell_problem_effective_h(&CellProblemParams::new(1.0, 2.0, [1.2, 1.6])).unwrap();
    assert_abs_diff_eq!(doubled, 2.0 * base, epsilon = 0.05);
    // unit |p|: the speeds lie between m and M
    assert!((0.95..=2.05).contains(&base), "{base}");
}

#[test]
fn effective_hamiltonian_reference_values() {
    for (p, want, tol) in [([0.0, 1.0], 2.0, 0.05), ([1.0, 0.0], 1.0, 0.05), ([3.0, 4.0], 8.0, 0.1)] {
        let h = cell_problem_effective_h(&CellProblemParams::new(1.0, 2.0, p)).unwrap();
        assert_abs_diff_eq!(h, want, epsilon = tol);
    }
}

fn sampled(problem: &stratahj::problem::JunctionProblem, dx: f64, f: impl Fn(f64, f64) -> f64) -> GridStack {
    let grid = problem.grid(dx).unwrap();
    let tg = evolution_steps(problem, &grid, 1.0, 0.5).unwrap();
    let times: Vec<f64> = (0..=tg.steps).map(|n| tg.time(n)).collect();
    GridStack::from_fn(grid, &times, f)
}

#[test]
fn tanker_counterexample() {
    let dx = 2e-3;
    let p = tanker_problem(-1.0);
    let v = sampled(&p, dx, |x, t| tanker_value(-0.5, x, t));
    assert!(residual_check(&v, &p, ResidualKind::Subsolution).unwrap() <= 3.0 * dx);
    let lim = preset(PresetName::Tanker).limiter.unwrap();
    let scheme = JunctionScheme::new(JunctionCondition::FluxLimited(lim), 0.5).unwrap();
    let u = solve_evolution(&p, &scheme, p.grid(dx).unwrap(), 1.0, usize::MAX).unwrap();
    let (vl, ul) = (v.last(), u.last());
    let gap = vl.values.iter().zip(&ul.values).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
    assert!(gap >= 0.4, "{gap}");
    assert_abs_diff_eq!(u.sup_error(4.0, |x, t| tanker_value(-1.0, x, t)), 0.0, epsilon = 0.02);
}

#[test]
fn exact_free_rest_solution_has_small_residuals() {
    let dx = 2e-3;
    let p = preset(PresetName::GigaHamamuki).problem.unwrap();
    let u = sampled(&p, dx, |x, t| x.abs().min(t));
    for kind in [ResidualKind::Subsolution, ResidualKind::Supersolution] {
        let r = residual_check(&u, &p, kind).unwrap();
        assert!(r <= 3.0 * dx, "{kind:?}: {r}");
    }
}

#[test]
fn flux_limited_solution_of_the_free_rest_example() {
    let p = preset(PresetName::GigaHamamuki).problem.unwrap();
    let scheme = JunctionScheme::new(JunctionCondition::FluxLimited(FluxLimiter::Constant(0.0)), 0.5).unwrap();
    let u = solve_evolution(&p, &scheme, p.grid(2e-3).unwrap(), 1.0, 1).unwrap();
    assert!(u.sup_error(2.0, |x, t| x.abs().min(t)) <= 0.02);
}
