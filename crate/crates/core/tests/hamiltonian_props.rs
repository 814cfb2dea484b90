mod common;

use proptest::prelude::*;
use stratahj::hamiltonian::{
    flux_limiter_root, solve_monotone_level, uniqueness_condition, FacetFamily, JunctionData, JunctionFunction,
    SideHamiltonian,
};
use stratahj::scalar::Monotonicity;

const TOL: f64 = 1e-8;

/// `min_s max_k line_k(s)` for lines `(slope, intercept)`, evaluated at every
/// pairwise crossing; exact for coercive piecewise-linear convex functions.
fn min_of_max_lines(lines: &[(f64, f64)]) -> f64 {
    let f = |s: f64| lines.iter().map(|&(a, b)| a * s + b).fold(f64::NEG_INFINITY, f64::max);
    let mut best = f64::INFINITY;
    for (i, &(a1, b1)) in lines.iter().enumerate() {
        for &(a2, b2) in &lines[i + 1..] {
            if (a1 - a2).abs() > 1e-14 {
                best = best.min(f((b2 - b1) / (a1 - a2)));
            }
        }
    }
    best
}

fn lines(fam: &FacetFamily, keep: impl Fn(f64) -> bool, r: f64, p_tan: f64) -> Vec<(f64, f64)> {
    fam.iter().filter(|f| keep(f.b)).map(|f| (-f.b, f.value(r, p_tan, 0.0))).collect()
}

/// Values of the zero-velocity mixtures within one family: a relaxed control
/// may stand still using one side only.
fn standing_lines(fam: &FacetFamily, r: f64, p_tan: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for n in fam.iter().filter(|f| f.b < 0.0) {
        for p in fam.iter().filter(|f| f.b > 0.0) {
            let w = p.b / (p.b - n.b);
            out.push((0.0, w * n.value(r, p_tan, 0.0) + (1.0 - w) * p.value(r, p_tan, 0.0)));
        }
    }
    out
}

fn family(h: &SideHamiltonian) -> FacetFamily {
    h.facet_table().unwrap().at(0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn facet_hamiltonians_are_convex_and_lipschitz(
        fam in common::family(false),
        p1 in -5.0..5.0f64, p2 in -5.0..5.0f64, w in 0.0..1.0f64, r in -2.0..2.0f64,
    ) {
        let h = |p: f64| fam.sup(r, 0.0, p);
        let mid = h(w * p1 + (1.0 - w) * p2);
        prop_assert!(mid <= w * h(p1) + (1.0 - w) * h(p2) + 1e-12);
        prop_assert!((h(p1) - h(p2)).abs() <= fam.velocity_bound() * (p1 - p2).abs() + 1e-12);
    }

    #[test]
    fn monotone_split_reproduces_the_hamiltonian(
        (h1, _) in common::pair(true),
        s1 in -5.0..5.0f64, s2 in -5.0..5.0f64, r in -2.0..2.0f64, p_tan in -2.0..2.0f64,
    ) {
        let local = h1.at(0.0);
        for s in [s1, s2] {
            let split = local.nondecreasing(r, p_tan, s).max(local.nonincreasing(r, p_tan, s));
            prop_assert!((split - local.eval(r, p_tan, s)).abs() <= 1e-12);
        }
        let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        prop_assert!(local.nondecreasing(r, p_tan, lo) <= local.nondecreasing(r, p_tan, hi) + 1e-12);
        prop_assert!(local.nonincreasing(r, p_tan, lo) + 1e-12 >= local.nonincreasing(r, p_tan, hi));
    }

    #[test]
    fn tangential_hamiltonians_match_a_crossing_oracle(
        (h1, h2) in common::pair(true), r in -2.0..2.0f64, p_tan in -2.0..2.0f64,
    ) {
        let data = JunctionData::new(&h1, Some(&h2), None);
        let (f1, f2) = (family(&h1), family(&h2));
        let mut all = lines(&f1, |_| true, r, p_tan);
        all.extend(lines(&f2, |_| true, r, p_tan));
        let mut reg = lines(&f1, |b| b <= 0.0, r, p_tan);
        reg.extend(lines(&f2, |b| b >= 0.0, r, p_tan));
        reg.extend(standing_lines(&f1, r, p_tan));
        reg.extend(standing_lines(&f2, r, p_tan));
        let (ht, ht_reg) = (min_of_max_lines(&all), min_of_max_lines(&reg));
        for v in [data.ht(r, p_tan).unwrap(), data.ht_by_min_formula(r, p_tan).unwrap()] {
            prop_assert!((v - ht).abs() <= TOL * (1.0 + ht.abs()), "{v} vs {ht}");
        }
        for v in [data.ht_reg(r, p_tan).unwrap(), data.ht_reg_by_min_formula(r, p_tan).unwrap()] {
            prop_assert!((v - ht_reg).abs() <= TOL * (1.0 + ht_reg.abs()), "{v} vs {ht_reg}");
        }
        prop_assert!(ht_reg <= ht + TOL);
    }

    #[test]
    fn ordered_minimizers_give_equal_tangential_hamiltonians((h1, h2) in common::pair(false), r in -2.0..2.0f64) {
        prop_assume!(uniqueness_condition(&h1, &h2, r, 0.0).unwrap());
        let data = JunctionData::new(&h1, Some(&h2), None);
        prop_assert!((data.ht(r, 0.0).unwrap() - data.ht_reg(r, 0.0).unwrap()).abs() <= TOL);
    }

    #[test]
    fn kirchhoff_root_is_the_regular_tangential_hamiltonian((h1, h2) in common::pair(true), r in -2.0..2.0f64) {
        let a = flux_limiter_root(&JunctionFunction::Kirchhoff, &h1, &h2, r, 0.0).unwrap();
        let reg = JunctionData::new(&h1, Some(&h2), None).ht_reg(r, 0.0).unwrap();
        prop_assert!((-a - reg).abs() <= TOL * (1.0 + reg.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn monotone_level_hits_the_target(
        pieces in prop::collection::vec((0.1..3.0f64, -2.0..2.0f64), 1..5),
        target in -5.0..5.0f64,
        increasing in any::<bool>(),
    ) {
        let up = |s: f64| pieces.iter().map(|&(a, b)| a * s + b).fold(f64::NEG_INFINITY, f64::max);
        let (s, v) = if increasing {
            let s = solve_monotone_level(up, Monotonicity::Nondecreasing, target).unwrap();
            (s, up(s))
        } else {
            let down = |s: f64| up(-s);
            let s = solve_monotone_level(down, Monotonicity::Nonincreasing, target).unwrap();
            (s, down(s))
        };
        prop_assert!((v - target).abs() <= TOL * (1.0 + s.abs()));
    }
}
