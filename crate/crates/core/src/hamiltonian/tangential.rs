//! Tangential Hamiltonians through their min-formulas.
//!
//! With `H1` the right Hamiltonian and `H2` the left one, both frozen at the
//! junction:
//! `H_T = min_s max(H1, H2)(s)` and `H_T^reg = min_s max(H1^-, H2^+)(s)`,
//! where `H1^-` is the nondecreasing part of `H1` and `H2^+` the
//! nonincreasing part of `H2`. Both are min-of-max problems of a
//! nondecreasing and a nonincreasing profile, solved at their crossing.

use crate::error::{Error, Result};
use crate::hamiltonian::{restrict_facets, FacetFamily, LocalHamiltonian, Restriction, SideHamiltonian};
use crate::scalar::{self, LevelEdge, Monotonicity, Switch, S_MAX};

fn neg_inf(_: f64) -> f64 {
    f64::NEG_INFINITY
}

pub(crate) fn ht_local(h1: &LocalHamiltonian, h2: Option<&LocalHamiltonian>, r: f64, p_tan: f64) -> Result<f64> {
    let up = |s| {
        let a = h1.nondecreasing(r, p_tan, s);
        h2.map_or(a, |h| a.max(h.nondecreasing(r, p_tan, s)))
    };
    let down = |s| {
        let a = h1.nonincreasing(r, p_tan, s);
        h2.map_or(a, |h| a.max(h.nonincreasing(r, p_tan, s)))
    };
    Ok(scalar::min_of_max(up, down, S_MAX)?.value)
}

pub(crate) fn htreg_local(h1: &LocalHamiltonian, h2: Option<&LocalHamiltonian>, r: f64, p_tan: f64) -> Result<f64> {
    let up = |s| h1.nondecreasing(r, p_tan, s);
    let m = match h2 {
        Some(h) => scalar::min_of_max(up, |s| h.nonincreasing(r, p_tan, s), S_MAX)?,
        None => scalar::min_of_max(up, neg_inf, S_MAX)?,
    };
    Ok(m.value)
}

/// `min_s max(H1, H2)(p_tan, s)` at the junction.
pub fn tangential_ht(h1: &SideHamiltonian, h2: &SideHamiltonian, r: f64, p_tan: f64) -> Result<f64> {
    ht_local(&h1.at(0.0), Some(&h2.at(0.0)), r, p_tan)
}

/// `min_s max(H1^-, H2^+)(p_tan, s)` at the junction.
pub fn tangential_htreg(h1: &SideHamiltonian, h2: &SideHamiltonian, r: f64, p_tan: f64) -> Result<f64> {
    htreg_local(&h1.at(0.0), Some(&h2.at(0.0)), r, p_tan)
}

/// Exact tangential facet family at the junction when both sides carry
/// facet data.
pub fn tangential_family(h1: &SideHamiltonian, h2: &SideHamiltonian, regular: bool) -> Option<FacetFamily> {
    let right = h1.facet_table()?.at(0.0);
    let left = h2.facet_table()?.at(0.0);
    let mode = if regular { Restriction::TangentialRegular } else { Restriction::TangentialAll };
    Some(restrict_facets(&left, &right, mode))
}

/// Sign-change interval of `H1^- - H2^+`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Thresholds {
    /// `H1^- < H2^+` below `m1`, `H1^- > H2^+` above `m2`.
    Crossing { m1: f64, m2: f64 },
    /// The difference keeps one sign on the whole search window.
    NoCrossing,
}

pub fn thresholds_m1_m2(h1: &SideHamiltonian, h2: &SideHamiltonian, r: f64, p_tan: f64) -> Result<Thresholds> {
    let (a, b) = (h1.at(0.0), h2.at(0.0));
    let up = |s| a.nondecreasing(r, p_tan, s);
    let down = |s| b.nonincreasing(r, p_tan, s);
    let m2 = match scalar::locate_switch(|s| up(s) <= down(s), S_MAX) {
        Switch::At { lo, .. } => lo,
        Switch::AlwaysTrue | Switch::AlwaysFalse => return Ok(Thresholds::NoCrossing),
    };
    let m1 = match scalar::locate_switch(|s| up(s) < down(s), S_MAX) {
        Switch::At { hi, .. } => hi.min(m2),
        Switch::AlwaysFalse => f64::NEG_INFINITY,
        Switch::AlwaysTrue => return Ok(Thresholds::NoCrossing),
    };
    Ok(Thresholds::Crossing { m1, m2 })
}

/// True when the least minimizer of `H2` is not below the largest
/// minimizer of `H1`; then `H_T = H_T^reg`.
pub fn uniqueness_condition(h1: &SideHamiltonian, h2: &SideHamiltonian, r: f64, p_tan: f64) -> Result<bool> {
    let (_, m1_plus) = h1.at(0.0).minimizers(r, p_tan)?;
    let (m2_minus, _) = h2.at(0.0).minimizers(r, p_tan)?;
    Ok(m2_minus >= m1_plus - 1e-9)
}

/// For a nondecreasing profile the largest `s` with `f(s) <= target`, for a
/// nonincreasing one the least.
pub fn solve_monotone_level(f: impl Fn(f64) -> f64, mono: Monotonicity, target: f64) -> Result<f64> {
    match scalar::sublevel_edge(f, mono, target, S_MAX) {
        LevelEdge::At(s) => Ok(s),
        LevelEdge::Nowhere => Err(Error::NoSolution(format!("target {target} is below the infimum"))),
        LevelEdge::Everywhere => Err(Error::Coercivity(format!("profile stays below {target} on the whole window"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{AnalyticProfile, ControlFacet, Side};

    fn shifted(side: Side, shift: f64, offset: f64) -> SideHamiltonian {
        SideHamiltonian::analytic(side, AnalyticProfile::ShiftedEikonal { speed: 1.0, shift, offset, discount: 0.0 })
    }

    /// Dense grid search of `min_s max(f, g)`.
    fn grid_min(f: impl Fn(f64) -> f64) -> f64 {
        (0..=80_000).map(|k| -20.0 + k as f64 * 5e-4).map(f).fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn ht_examples_against_grid_search() {
        let abs = |side| shifted(side, 0.0, 0.0);
        assert!(tangential_ht(&abs(Side::Right), &abs(Side::Left), 0.0, 0.0).unwrap().abs() < 1e-12);

        let (h1, h2) = (shifted(Side::Right, 1.0, -1.0), shifted(Side::Left, -1.0, -1.0));
        let oracle = grid_min(|s| ((s - 1.0).abs() - 1.0).max((s + 1.0).abs() - 1.0));
        assert!((tangential_ht(&h1, &h2, 0.0, 0.0).unwrap() - oracle).abs() < 1e-9);
        assert!(oracle.abs() < 1e-12);

        let (h1, h2) = (shifted(Side::Right, 1.0, 0.0), shifted(Side::Left, -1.0, 0.0));
        let oracle = grid_min(|s| (s - 1.0).abs().max((s + 1.0).abs()));
        assert!((tangential_ht(&h1, &h2, 0.0, 0.0).unwrap() - oracle).abs() < 1e-9);
        assert!((oracle - 1.0).abs() < 1e-12);
    }

    #[test]
    fn htreg_examples_against_grid_search() {
        let abs = |side| shifted(side, 0.0, 0.0);
        assert!(tangential_htreg(&abs(Side::Right), &abs(Side::Left), 0.0, 0.0).unwrap().abs() < 1e-12);

        let (h1, h2) = (shifted(Side::Right, 1.0, -1.0), shifted(Side::Left, -1.0, -1.0));
        let oracle = grid_min(|s| ((s - 1.0).max(0.0) - 1.0).max((-s - 1.0).max(0.0) - 1.0));
        let v = tangential_htreg(&h1, &h2, 0.0, 0.0).unwrap();
        assert!((v - oracle).abs() < 1e-9 && (v + 1.0).abs() < 1e-12);

        let (h1, h2) = (shifted(Side::Right, 1.0, 0.0), shifted(Side::Left, -1.0, 0.0));
        let v = tangential_htreg(&h1, &h2, 0.0, 0.0).unwrap();
        assert!(v.abs() < 1e-12);
        assert!(v < tangential_ht(&h1, &h2, 0.0, 0.0).unwrap());
    }

    #[test]
    fn htreg_matches_regular_family_on_gap_example() {
        let right: FacetFamily = [-1.0, 0.0, 1.0].iter().map(|&a| ControlFacet::new(a, 1.0, 1.0 - a)).collect();
        let left: FacetFamily = [-1.0, 0.0, 1.0].iter().map(|&a| ControlFacet::new(a, 1.0, 1.0 + a)).collect();
        let (h1, h2) = (SideHamiltonian::facets(Side::Right, right), SideHamiltonian::facets(Side::Left, left));
        for r in [-1.0, 0.0, 0.3, 2.0] {
            let reg = tangential_family(&h1, &h2, true).unwrap().sup(r, 0.0, 0.0);
            let all = tangential_family(&h1, &h2, false).unwrap().sup(r, 0.0, 0.0);
            assert!((tangential_htreg(&h1, &h2, r, 0.0).unwrap() - reg).abs() < 1e-12);
            assert!((tangential_ht(&h1, &h2, r, 0.0).unwrap() - all).abs() < 1e-12);
            assert!((reg - (r - 1.0)).abs() < 1e-12 && (all - r).abs() < 1e-12);
        }
    }

    #[test]
    fn thresholds_of_symmetric_and_shifted_pairs() {
        let abs = |side| shifted(side, 0.0, 0.0);
        match thresholds_m1_m2(&abs(Side::Right), &abs(Side::Left), 0.0, 0.0).unwrap() {
            Thresholds::Crossing { m1, m2 } => assert!(m1.abs() < 1e-12 && m2.abs() < 1e-12),
            t => panic!("{t:?}"),
        }
        // H1 = |s + 1|, H2 = |s - 1|: (s + 1)+ - (1 - s)+ vanishes only at 0
        match thresholds_m1_m2(&shifted(Side::Right, -1.0, 0.0), &shifted(Side::Left, 1.0, 0.0), 0.0, 0.0).unwrap() {
            Thresholds::Crossing { m1, m2 } => assert!(m1.abs() < 1e-12 && m2.abs() < 1e-12),
            t => panic!("{t:?}"),
        }
        // H1 = |s - 1|, H2 = |s + 1|: (s - 1)+ - (-1 - s)+ vanishes on [-1, 1]
        match thresholds_m1_m2(&shifted(Side::Right, 1.0, 0.0), &shifted(Side::Left, -1.0, 0.0), 0.0, 0.0).unwrap() {
            Thresholds::Crossing { m1, m2 } => assert!((m1 + 1.0).abs() < 1e-12 && (m2 - 1.0).abs() < 1e-12),
            t => panic!("{t:?}"),
        }
    }

    #[test]
    fn thresholds_without_crossing() {
        // H1^- of a side that can only move right is constant, H2^+ of |s| grows to the left only
        let h1 = SideHamiltonian::facets(Side::Right, FacetFamily::new(vec![ControlFacet::new(1.0, 0.0, 0.0)]));
        let h2 = shifted(Side::Left, 0.0, 0.0);
        assert_eq!(thresholds_m1_m2(&h1, &h2, 0.0, 0.0).unwrap(), Thresholds::NoCrossing);
    }

    #[test]
    fn uniqueness_examples() {
        let abs = |side| shifted(side, 0.0, 0.0);
        assert!(uniqueness_condition(&abs(Side::Right), &abs(Side::Left), 0.0, 0.0).unwrap());
        let (h1, h2) = (shifted(Side::Right, 1.0, 0.0), shifted(Side::Left, -1.0, 0.0));
        assert!(!uniqueness_condition(&h1, &h2, 0.0, 0.0).unwrap());
        let gap = tangential_ht(&h1, &h2, 0.0, 0.0).unwrap() - tangential_htreg(&h1, &h2, 0.0, 0.0).unwrap();
        assert!((gap - 1.0).abs() < 1e-12);
        let kpp = |side, c| {
            SideHamiltonian::analytic(side, AnalyticProfile::Quadratic { offset: c, velocity_cap: 10.0, discount: 0.0 })
        };
        assert!(uniqueness_condition(&kpp(Side::Right, 2.0), &kpp(Side::Left, 0.5), 0.0, 0.0).unwrap());
    }

    #[test]
    fn monotone_level_examples() {
        let pos = |s: f64| s.max(0.0);
        assert!((solve_monotone_level(pos, Monotonicity::Nondecreasing, 2.0).unwrap() - 2.0).abs() < 1e-12);
        let v = solve_monotone_level(|s| pos(s - 1.0) - 1.0, Monotonicity::Nondecreasing, -0.5).unwrap();
        assert!((v - 1.5).abs() < 1e-12);
        assert!(matches!(solve_monotone_level(pos, Monotonicity::Nondecreasing, -1.0), Err(Error::NoSolution(_))));
    }
}
