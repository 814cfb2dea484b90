//! Self-checks: oracle suites for the Hamiltonian layer, example gates on
//! the presets, and the acceptance criteria.

use std::fmt;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::applications::kpp::{front_arrival, JUMP};
use crate::applications::presets::{one_d_gap_problem, preset, tanker_problem, tanker_value, PresetName};
use crate::applications::{
    cell_problem_effective_h, kpp_front_times, kpp_solve_variational, CellProblemParams, KppParams,
};
use crate::dp::{value_iteration, DpOptions, PolicyMode};
use crate::error::{Error, Result};
use crate::grid::{comparison_gap, Grid, GridStack};
use crate::hamiltonian::{
    flux_limiter_root, solve_monotone_level, uniqueness_condition, ControlFacet, FacetFamily, FluxLimiter,
    JunctionData, JunctionFunction, Side, SideHamiltonian,
};
use crate::pde::{
    consistency_error, evolution_steps, residual_check, solve_evolution, solve_vanishing_viscosity, Evolution,
    JunctionCondition, JunctionScheme, ResidualKind, ViscousConfig,
};
use crate::problem::{InitialData, JunctionProblem};
use crate::run::ConvergenceReport;
use crate::scalar::Monotonicity;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Oracle checks of the Hamiltonian layer.
    Core,
    /// Sup-error gates on the presets.
    Examples,
    /// Everything, including the scheme property suites.
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "core" => Ok(Suite::Core),
            "examples" => Ok(Suite::Examples),
            "all" => Ok(Suite::All),
            other => Err(Error::Config(format!("unknown suite {other}; expected core, examples or all"))),
        }
    }
}

/// Outcome of one check, with the measured value and the bound it met or missed.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check { name: name.to_string(), passed, detail }
    }

    /// `value <= bound`
    fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Check::new(name, value <= bound, format!("{value:.3e} (bound {bound:.1e})"))
    }

    fn failed(name: &str, err: &Error) -> Self {
        Check::new(name, false, format!("error: {err}"))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: {}", self.name, self.detail)
    }
}

type CheckFn = fn() -> Check;

fn guarded(name: &str, f: impl FnOnce() -> Result<Check>) -> Check {
    f().unwrap_or_else(|e| Check::failed(name, &e))
}

fn run_checks(fns: &[CheckFn]) -> Vec<Check> {
    fns.par_iter().map(|f| f()).collect()
}

const CORE: [CheckFn; 5] =
    [oracle_equivalence, htreg_below_ht, uniqueness_gives_equality, monotone_levels, kirchhoff_root];
const EXAMPLES: [CheckFn; 8] =
    [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8];
const PROPERTIES: [CheckFn; 3] = [scheme_monotonicity, minimal_below_maximal, consistency_rate];

/// Runs a suite; independent checks run in parallel.
pub fn verify(suite: Suite) -> Vec<Check> {
    let mut fns: Vec<CheckFn> = Vec::new();
    if matches!(suite, Suite::Core | Suite::All) {
        fns.extend(CORE);
    }
    if matches!(suite, Suite::Examples | Suite::All) {
        fns.extend(EXAMPLES);
    }
    if suite == Suite::All {
        fns.extend(PROPERTIES);
    }
    run_checks(&fns)
}

/// One check per acceptance criterion, in order.
pub fn acceptance_checks() -> Vec<Check> {
    let mut checks = run_checks(&EXAMPLES);
    checks.push(criterion_9());
    checks
}

// ---------------------------------------------------------------------------
// random problems

/// A facet family with at least one control on each side of the junction,
/// so the Hamiltonian is coercive.
pub fn random_facets(rng: &mut impl Rng, with_tangential: bool) -> FacetFamily {
    let n = rng.random_range(2..=5);
    let mut facets: Vec<ControlFacet> = (0..n)
        .map(|_| {
            let f =
                ControlFacet::new(rng.random_range(-2.0..2.0), rng.random_range(0.0..1.0), rng.random_range(-1.0..1.0));
            if with_tangential {
                f.with_tangential(rng.random_range(-1.0..1.0))
            } else {
                f
            }
        })
        .collect();
    facets[0].b = -rng.random_range(0.2..2.0);
    facets[1].b = rng.random_range(0.2..2.0);
    FacetFamily::new(facets)
}

/// A two-sided problem with random facets and random smooth initial data.
pub fn random_problem(rng: &mut impl Rng, window: (f64, f64), horizon: f64) -> JunctionProblem {
    JunctionProblem {
        name: "random".into(),
        right: SideHamiltonian::facets(Side::Right, random_facets(rng, false)),
        left: Some(SideHamiltonian::facets(Side::Left, random_facets(rng, false))),
        junction: None,
        initial: InitialData::Sine { frequency: rng.random_range(0.5..4.0) },
        horizon,
        window,
    }
}

fn random_pair(rng: &mut impl Rng) -> (SideHamiltonian, SideHamiltonian) {
    (
        SideHamiltonian::facets(Side::Right, random_facets(rng, true)),
        SideHamiltonian::facets(Side::Left, random_facets(rng, true)),
    )
}

fn pair_data(h1: &SideHamiltonian, h2: &SideHamiltonian) -> JunctionData {
    JunctionData::new(h1, Some(h2), None)
}

// ---------------------------------------------------------------------------
// core suite

const ORACLE_TOL: f64 = 1e-8;
const RANDOM_PROBLEMS: usize = 200;

fn oracle_equivalence() -> Check {
    let name = "oracle: exact tangential families match the min-formulas";
    guarded(name, || {
        let mut rng = StdRng::seed_from_u64(11);
        let mut worst: f64 = 0.0;
        for _ in 0..RANDOM_PROBLEMS {
            let (h1, h2) = random_pair(&mut rng);
            let data = pair_data(&h1, &h2);
            let (r, p_tan) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            worst = worst.max((data.ht(r, p_tan)? - data.ht_by_min_formula(r, p_tan)?).abs());
            worst = worst.max((data.ht_reg(r, p_tan)? - data.ht_reg_by_min_formula(r, p_tan)?).abs());
        }
        Ok(Check::at_most(name, worst, ORACLE_TOL))
    })
}

fn htreg_below_ht() -> Check {
    let name = "oracle: HTreg <= HT";
    guarded(name, || {
        let mut rng = StdRng::seed_from_u64(12);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..RANDOM_PROBLEMS {
            let (h1, h2) = random_pair(&mut rng);
            let data = pair_data(&h1, &h2);
            let (r, p_tan) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            worst = worst.max(data.ht_reg_by_min_formula(r, p_tan)? - data.ht_by_min_formula(r, p_tan)?);
        }
        Ok(Check::at_most(name, worst, ORACLE_TOL))
    })
}

fn uniqueness_gives_equality() -> Check {
    let name = "oracle: ordered minimizers give HT = HTreg";
    guarded(name, || {
        let mut rng = StdRng::seed_from_u64(13);
        let (mut worst, mut hits): (f64, usize) = (0.0, 0);
        for _ in 0..4 * RANDOM_PROBLEMS {
            let (h1, h2) = random_pair(&mut rng);
            let r = rng.random_range(-2.0..2.0);
            if !uniqueness_condition(&h1, &h2, r, 0.0)? {
                continue;
            }
            hits += 1;
            let data = pair_data(&h1, &h2);
            worst = worst.max((data.ht_by_min_formula(r, 0.0)? - data.ht_reg_by_min_formula(r, 0.0)?).abs());
        }
        let mut c = Check::at_most(name, worst, ORACLE_TOL);
        c.passed &= hits > 0;
        c.detail.push_str(&format!(" over {hits} pairs"));
        Ok(c)
    })
}

fn monotone_levels() -> Check {
    let name = "oracle: monotone level solver hits the target";
    guarded(name, || {
        let mut rng = StdRng::seed_from_u64(14);
        let mut worst: f64 = 0.0;
        for k in 0..100 {
            let pieces: Vec<(f64, f64)> =
                (0..4).map(|_| (rng.random_range(0.1..3.0), rng.random_range(-2.0..2.0))).collect();
            let up = |s: f64| pieces.iter().map(|&(a, b)| a * s + b).fold(f64::NEG_INFINITY, f64::max);
            let target = rng.random_range(-5.0..5.0);
            let (s, v) = if k % 2 == 0 {
                let s = solve_monotone_level(up, Monotonicity::Nondecreasing, target)?;
                (s, up(s))
            } else {
                let down = |s: f64| up(-s);
                let s = solve_monotone_level(down, Monotonicity::Nonincreasing, target)?;
                (s, down(s))
            };
            worst = worst.max((v - target).abs() / (1.0 + s.abs()));
        }
        Ok(Check::at_most(name, worst, ORACLE_TOL))
    })
}

fn kirchhoff_root() -> Check {
    let name = "oracle: Kirchhoff reduces to the flux limiter HTreg";
    guarded(name, || {
        let mut rng = StdRng::seed_from_u64(15);
        let mut worst: f64 = 0.0;
        for _ in 0..RANDOM_PROBLEMS {
            let (h1, h2) = random_pair(&mut rng);
            let r = rng.random_range(-2.0..2.0);
            let a = flux_limiter_root(&JunctionFunction::Kirchhoff, &h1, &h2, r, 0.0)?;
            let reg = pair_data(&h1, &h2).ht_reg_by_min_formula(r, 0.0)?;
            worst = worst.max((-a - reg).abs() / (1.0 + reg.abs()));
        }
        Ok(Check::at_most(name, worst, ORACLE_TOL))
    })
}

// ---------------------------------------------------------------------------
// acceptance gates

const DX: f64 = 2e-3;
const RADIUS: f64 = 2.0;

fn dp(problem: &JunctionProblem, mode: PolicyMode, dx: f64) -> Result<GridStack> {
    value_iteration(problem, mode, dx, DpOptions { cfl: 1.0, save_every: usize::MAX })
}

fn pde(problem: &JunctionProblem, condition: JunctionCondition, dx: f64) -> Result<GridStack> {
    let scheme = JunctionScheme::new(condition, 0.5)?;
    solve_evolution(problem, &scheme, problem.grid(dx)?, problem.horizon, usize::MAX)
}

/// Sup of `|u - v|` over `|x| <= radius` at the last slice of each.
fn final_gap(u: &GridStack, v: &GridStack, radius: f64) -> f64 {
    let (a, b) = (u.last(), v.last());
    u.grid.nodes().filter(|x| x.abs() <= radius + 1e-12).map(|x| (a.at(x) - b.at(x)).abs()).fold(0.0, f64::max)
}

fn criterion_1() -> Check {
    let name = "criterion 1: minimal and maximal junction values of the gap example";
    guarded(name, || {
        let p = one_d_gap_problem();
        let lo = dp(&p, PolicyMode::AllStrategies, DX)?.last().junction_value();
        let hi = dp(&p, PolicyMode::RegularOnly, DX)?.last().junction_value();
        let target = 1.0 - (-1.0f64).exp();
        let err = lo.abs().max((hi - target).abs());
        Ok(Check::new(
            name,
            err <= 0.02,
            format!("U-(0,1) = {lo:.5}, U+(0,1) = {hi:.5} vs {target:.5}; worst {err:.2e} (bound 2e-2)"),
        ))
    })
}

fn criterion_2() -> Check {
    let name = "criterion 2: flux-limited solutions equal the value functions";
    guarded(name, || {
        let p = one_d_gap_problem();
        let all = final_gap(
            &pde(&p, JunctionCondition::FluxLimited(FluxLimiter::TangentialHt), DX)?,
            &dp(&p, PolicyMode::AllStrategies, DX)?,
            RADIUS,
        );
        let reg = final_gap(
            &pde(&p, JunctionCondition::FluxLimited(FluxLimiter::TangentialHtReg), DX)?,
            &dp(&p, PolicyMode::RegularOnly, DX)?,
            RADIUS,
        );
        let bound = 3.0 * DX;
        Ok(Check::new(
            name,
            all <= bound && reg <= bound,
            format!("|HT - all| = {all:.2e}, |HTreg - regular| = {reg:.2e} (bound {bound:.1e})"),
        ))
    })
}

fn criterion_3() -> Check {
    let name = "criterion 3: Kirchhoff matches the HTreg flux limiter";
    guarded(name, || {
        let mut worst: f64 = 0.0;
        let mut parts = Vec::new();
        for pn in [PresetName::OneDGap, PresetName::GigaHamamuki, PresetName::Tanker] {
            let p = preset(pn).problem.expect("solvable preset");
            let k = pde(&p, JunctionCondition::Kirchhoff, DX)?;
            let f = pde(&p, JunctionCondition::FluxLimited(FluxLimiter::TangentialHtReg), DX)?;
            let gap = comparison_gap(&k, &f)?.max(comparison_gap(&f, &k)?);
            parts.push(format!("{pn} {gap:.1e}"));
            worst = worst.max(gap);
        }
        Ok(Check::new(name, worst <= 2e-2, format!("{} (bound 2e-2)", parts.join(", "))))
    })
}

fn criterion_4() -> Check {
    let name = "criterion 4: vanishing viscosity approaches the maximal solution";
    guarded(name, || {
        let p = one_d_gap_problem();
        let grid = p.grid(DX)?;
        let reference = pde(&p, JunctionCondition::FluxLimited(FluxLimiter::TangentialHtReg), DX)?;
        let mut errs = Vec::new();
        for eps in [0.1, 0.05, 0.025] {
            let u = solve_vanishing_viscosity(&p, &ViscousConfig::new(eps), grid, p.horizon, usize::MAX)?;
            errs.push(final_gap(&u, &reference, RADIUS));
        }
        let decreasing = errs.windows(2).all(|w| w[1] <= w[0]);
        Ok(Check::new(
            name,
            decreasing && errs[2] <= 0.05,
            format!("errors {:.4}, {:.4}, {:.4} for eps 0.1, 0.05, 0.025 (last bound 5e-2)", errs[0], errs[1], errs[2]),
        ))
    })
}

fn criterion_5() -> Check {
    let name = "criterion 5: free rest at the junction gives min(|x|, t)";
    guarded(name, || {
        let p = preset(PresetName::GigaHamamuki).problem.expect("solvable preset");
        let scheme = JunctionScheme::new(JunctionCondition::FluxLimited(FluxLimiter::Constant(0.0)), 0.5)?;
        let u = solve_evolution(&p, &scheme, p.grid(DX)?, 1.0, 1)?;
        Ok(Check::at_most(name, u.sup_error(RADIUS, |x, t| x.abs().min(t)), 0.02))
    })
}

fn criterion_6() -> Check {
    let name = "criterion 6: KPP front reaches the rate jump";
    guarded(name, || {
        let params = KppParams::default();
        let ft = kpp_front_times(&params);
        let t2 = ft.t2.unwrap_or(f64::NAN);
        let closed = (ft.t1 - 1.0).abs() < 5e-5 && (t2 - 0.8660).abs() < 5e-5;
        let stack = kpp_solve_variational(&params, DX, 1.2, 1)?;
        let arrival = front_arrival(&stack, JUMP).ok_or_else(|| Error::Config("front never arrived".into()))?;
        let target = 3.0f64.sqrt() / 2.0;
        Ok(Check::new(
            name,
            closed && (arrival - target).abs() <= 0.02,
            format!("t1 = {:.4}, t2 = {t2:.4}, numerical arrival {arrival:.4} vs {target:.4} (bound 2e-2)", ft.t1),
        ))
    })
}

fn criterion_7() -> Check {
    let name = "criterion 7: effective Hamiltonian of the cell problem";
    guarded(name, || {
        let mut parts = Vec::new();
        let mut ok = true;
        for (p, want, tol) in [([0.0, 1.0], 2.0, 0.05), ([1.0, 0.0], 1.0, 0.05), ([3.0, 4.0], 8.0, 0.1)] {
            let h = cell_problem_effective_h(&CellProblemParams::new(1.0, 2.0, p))?;
            ok &= (h - want).abs() <= tol;
            parts.push(format!("H({}, {}) = {h:.4}", p[0], p[1]));
        }
        Ok(Check::new(name, ok, parts.join(", ")))
    })
}

fn criterion_8() -> Check {
    let name = "criterion 8: tanker comparison failure";
    guarded(name, || {
        let p = tanker_problem(-1.0);
        let grid = p.grid(DX)?;
        let tg = evolution_steps(&p, &grid, 1.0, 0.5)?;
        let scheme = JunctionScheme::new(
            JunctionCondition::FluxLimited(FluxLimiter::Facets(FacetFamily::new(vec![ControlFacet::new(
                0.0, 0.0, 0.0,
            )]))),
            0.5,
        )?;
        let u = solve_evolution(&p, &scheme, grid, 1.0, 1)?;
        let times: Vec<f64> = (0..=tg.steps).map(|n| tg.time(n)).collect();
        let v = GridStack::from_fn(grid, &times, |x, t| tanker_value(-0.5, x, t));
        let defect = residual_check(&v, &p, ResidualKind::Subsolution)?;
        let last = v.len() - 1;
        let gap = grid
            .nodes()
            .enumerate()
            .map(|(i, _)| v.slices[last][i] - u.slices[last][i])
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Check::new(
            name,
            defect <= 3.0 * DX && gap >= 0.4,
            format!(
                "subsolution defect {defect:.2e} (bound {:.1e}), max(V - U) at t = 1 is {gap:.4} (needs 0.4)",
                3.0 * DX
            ),
        ))
    })
}

fn criterion_9() -> Check {
    let name = "criterion 9: property suites";
    let parts: Vec<Check> =
        run_checks(&[oracle_equivalence, scheme_monotonicity, minimal_below_maximal, consistency_rate]);
    let passed = parts.iter().all(|c| c.passed);
    let detail: Vec<String> =
        parts.iter().map(|c| format!("[{}] {}", if c.passed { "ok" } else { "failed" }, c.detail)).collect();
    Check::new(name, passed, detail.join("; "))
}

// ---------------------------------------------------------------------------
// scheme properties

fn scheme_monotonicity() -> Check {
    let name = "scheme: update is nondecreasing in every neighbour";
    guarded(name, || {
        let mut rng = StdRng::seed_from_u64(21);
        let mut worst = f64::NEG_INFINITY;
        for trial in 0..500 {
            let p = random_problem(&mut rng, (-0.2, 0.2), 1.0);
            let grid = Grid::new(p.window, 0.02)?;
            let condition = match trial % 4 {
                0 => JunctionCondition::FluxLimited(FluxLimiter::TangentialHt),
                1 => JunctionCondition::FluxLimited(FluxLimiter::TangentialHtReg),
                2 => JunctionCondition::Kirchhoff,
                _ => JunctionCondition::FluxLimited(FluxLimiter::Constant(rng.random_range(-1.0..1.0))),
            };
            let evo = Evolution::new(&p, grid, p.stable_dt(grid.dx, 0.9), condition)?;
            let u: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let i = if trial % 2 == 0 { grid.junction() } else { rng.random_range(0..grid.len()) };
            let k = (i as i64 + rng.random_range(-1..=1)).clamp(0, grid.len() as i64 - 1) as usize;
            let mut raised = u.clone();
            raised[k] += rng.random_range(1e-3..0.5);
            worst = worst.max(evo.update_node(&u, i)? - evo.update_node(&raised, i)?);
        }
        Ok(Check::at_most(name, worst, 1e-12))
    })
}

fn minimal_below_maximal() -> Check {
    let name = "scheme: U- <= U+ + 2dx on every preset";
    guarded(name, || {
        let dx = 1e-2;
        let mut worst = f64::NEG_INFINITY;
        let mut parts = Vec::new();
        for pn in PresetName::ALL {
            let Some(p) = preset(pn).problem else { continue };
            let gap = if p.has_facets() {
                comparison_gap(&dp(&p, PolicyMode::AllStrategies, dx)?, &dp(&p, PolicyMode::RegularOnly, dx)?)?
            } else {
                comparison_gap(
                    &pde(&p, JunctionCondition::FluxLimited(FluxLimiter::TangentialHt), dx)?,
                    &pde(&p, JunctionCondition::FluxLimited(FluxLimiter::TangentialHtReg), dx)?,
                )?
            };
            parts.push(format!("{pn} {gap:.1e}"));
            worst = worst.max(gap);
        }
        Ok(Check::new(name, worst <= 2.0 * dx, format!("max(U- - U+): {} (bound {:.0e})", parts.join(", "), 2.0 * dx)))
    })
}

fn consistency_rate() -> Check {
    let name = "scheme: interior consistency is first order";
    guarded(name, || {
        let phi = |x: f64| (2.0 * x).sin() + 0.5 * x * x;
        let dphi = |x: f64| 2.0 * (2.0 * x).cos() + x;
        let mut rates = Vec::new();
        for p in [one_d_gap_problem(), preset(PresetName::GigaHamamuki).problem.expect("solvable preset")] {
            let errs: Vec<(f64, f64)> =
                [8e-3, 4e-3, 2e-3].iter().map(|&dx| (dx, consistency_error(&p, phi, dphi, dx, 0.1, 1.0))).collect();
            rates.push(ConvergenceReport::from_errors(&errs)?.observed_rate().expect("three rows"));
        }
        let ok = rates.iter().all(|r| (0.8..=1.2).contains(r));
        Ok(Check::new(name, ok, format!("rates {:.3}, {:.3} (range [0.8, 1.2])", rates[0], rates[1])))
    })
}
