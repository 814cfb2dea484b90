//! Named example problems.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{ControlFacet, FacetFamily, FacetTable, FluxLimiter, Side, SideHamiltonian};
use crate::problem::{InitialData, JunctionProblem};

use super::kpp::KppParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetName {
    GigaHamamuki,
    OneDGap,
    Tanker,
    Kpp,
    ChessboardStub,
}

impl PresetName {
    pub const ALL: [PresetName; 5] = [
        PresetName::GigaHamamuki,
        PresetName::OneDGap,
        PresetName::Tanker,
        PresetName::Kpp,
        PresetName::ChessboardStub,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::GigaHamamuki => "giga_hamamuki",
            PresetName::OneDGap => "one_d_gap",
            PresetName::Tanker => "tanker",
            PresetName::Kpp => "kpp",
            PresetName::ChessboardStub => "chessboard_stub",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PresetName::ALL.into_iter().find(|p| p.as_str() == s).ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

pub type ExactFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Closed-form solutions attached to a preset.
#[derive(Clone)]
pub enum Reference {
    /// Valid on the whole window.
    Single(ExactFn),
    /// Minimal and maximal solutions, valid where `|x| + t <= 1`.
    Pair { minus: ExactFn, plus: ExactFn },
}

impl fmt::Debug for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reference::Single(_) => f.write_str("Single(..)"),
            Reference::Pair { .. } => f.write_str("Pair { .. }"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: PresetName,
    pub description: &'static str,
    /// `None` for presets that only describe a geometry.
    pub problem: Option<JunctionProblem>,
    /// Junction condition the reference solution satisfies.
    pub limiter: Option<FluxLimiter>,
    pub exact: Option<Reference>,
}

impl Preset {
    /// The single reference, or the maximal one of a pair.
    pub fn exact_plus(&self) -> Option<ExactFn> {
        match self.exact.as_ref()? {
            Reference::Single(f) => Some(f.clone()),
            Reference::Pair { plus, .. } => Some(plus.clone()),
        }
    }

    pub fn exact_minus(&self) -> Option<ExactFn> {
        match self.exact.as_ref()? {
            Reference::Single(f) => Some(f.clone()),
            Reference::Pair { minus, .. } => Some(minus.clone()),
        }
    }
}

fn eikonal_cost_one() -> FacetFamily {
    FacetFamily::new(vec![ControlFacet::new(-1.0, 0.0, 1.0), ControlFacet::new(1.0, 0.0, 1.0)])
}

/// `u_t + |u_x| = 1` off the junction, free rest at the junction, zero data.
fn giga_hamamuki() -> Preset {
    let problem = JunctionProblem {
        name: "giga_hamamuki".into(),
        right: SideHamiltonian::facets(Side::Right, eikonal_cost_one()),
        left: Some(SideHamiltonian::facets(Side::Left, eikonal_cost_one())),
        junction: Some(FacetFamily::new(vec![ControlFacet::new(0.0, 0.0, 0.0)])),
        initial: InitialData::Constant { value: 0.0 },
        horizon: 1.0,
        window: (-4.0, 4.0),
    };
    Preset {
        name: PresetName::GigaHamamuki,
        description: "unit speed, unit running cost, free rest at x = 0; u = min(|x|, t)",
        problem: Some(problem),
        limiter: Some(FluxLimiter::Constant(0.0)),
        exact: Some(Reference::Single(Arc::new(|x: f64, t: f64| x.abs().min(t)))),
    }
}

/// Facets `(a, 1, 1 -+ a + min(|x|, 1))` for `a` in `{-1, 0, 1}`, sampled at
/// the kinks of `min(|x|, 1)` so the table is exact.
fn gap_side(side: Side) -> SideHamiltonian {
    let sign = match side {
        Side::Right => -1.0,
        Side::Left => 1.0,
    };
    let family = |extra: f64| -> FacetFamily {
        [-1.0, 0.0, 1.0].iter().map(|&a| ControlFacet::new(a, 1.0, 1.0 + sign * a + extra)).collect()
    };
    let xs = match side {
        Side::Right => vec![0.0, 1.0],
        Side::Left => vec![-1.0, 0.0],
    };
    let lists = xs.iter().map(|x: &f64| family(x.abs())).collect();
    SideHamiltonian::table(side, FacetTable { x_samples: xs, facet_lists: lists })
}

pub fn one_d_gap_problem() -> JunctionProblem {
    JunctionProblem {
        name: "one_d_gap".into(),
        right: gap_side(Side::Right),
        left: Some(gap_side(Side::Left)),
        junction: None,
        initial: InitialData::MinAbsOne,
        horizon: 1.0,
        window: (-4.0, 4.0),
    }
}

fn one_d_gap() -> Preset {
    let minus: ExactFn = Arc::new(|x: f64, t: f64| x.abs() + 1.0 - (-x.abs().min(t)).exp());
    let plus: ExactFn = Arc::new(|x: f64, t: f64| x.abs() + 1.0 - (-t).exp());
    Preset {
        name: PresetName::OneDGap,
        description: "unit discount, pull-pull holds are free, regular holds cost 1; two distinct solutions",
        problem: Some(one_d_gap_problem()),
        limiter: Some(FluxLimiter::TangentialHtReg),
        exact: Some(Reference::Pair { minus, plus }),
    }
}

/// Half-line problem with unit speed and cost; the boundary point carries a
/// rest control with cost rate `1 + g`.
pub fn tanker_problem(g: f64) -> JunctionProblem {
    JunctionProblem {
        name: "tanker".into(),
        right: SideHamiltonian::facets(Side::Right, eikonal_cost_one()),
        left: None,
        junction: Some(FacetFamily::new(vec![ControlFacet::new(0.0, 0.0, 1.0 + g)])),
        initial: InitialData::Constant { value: 0.0 },
        horizon: 1.0,
        window: (0.0, 4.0),
    }
}

/// `t + g (t - |x|)^+`
pub fn tanker_value(g: f64, x: f64, t: f64) -> f64 {
    t + g * (t - x.abs()).max(0.0)
}

/// Tanker preset for a given boundary cost shift `g`.
pub fn tanker_preset(g: f64) -> Preset {
    Preset {
        name: PresetName::Tanker,
        description: "half-line with a costed rest at the boundary; u = t + g (t - x)^+",
        problem: Some(tanker_problem(g)),
        limiter: Some(FluxLimiter::Facets(FacetFamily::new(vec![ControlFacet::new(0.0, 0.0, 1.0 + g)]))),
        exact: Some(Reference::Single(Arc::new(move |x, t| tanker_value(g, x, t)))),
    }
}

fn kpp() -> Preset {
    let params = KppParams::default();
    Preset {
        name: PresetName::Kpp,
        description: "KPP rate function with reaction rate c1 = 0.5 on x < 1 and c2 = 2 beyond; junction shifted to 0",
        problem: Some(params.problem(2.0)),
        limiter: None,
        exact: None,
    }
}

fn chessboard_stub() -> Preset {
    Preset {
        name: PresetName::ChessboardStub,
        description: "2-D chessboard: open squares with alternating dynamics, edges as 1-D strata, corners as 0-D \
                      strata; geometry only, no solver attached",
        problem: None,
        limiter: None,
        exact: None,
    }
}

/// A named preset; the tanker uses `g = -1`.
pub fn preset(name: PresetName) -> Preset {
    match name {
        PresetName::GigaHamamuki => giga_hamamuki(),
        PresetName::OneDGap => one_d_gap(),
        PresetName::Tanker => tanker_preset(-1.0),
        PresetName::Kpp => kpp(),
        PresetName::ChessboardStub => chessboard_stub(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let gh = preset(PresetName::GigaHamamuki).exact_plus().unwrap();
        assert_eq!(gh(0.3, 1.0), 0.3);
        let tk = preset(PresetName::Tanker).exact_plus().unwrap();
        assert_eq!(tk(0.0, 1.0), 0.0);
        let gap = preset(PresetName::OneDGap);
        assert!((gap.exact_plus().unwrap()(0.0, 2.0) - 0.8647).abs() < 1e-4);
        assert_eq!(gap.exact_minus().unwrap()(0.0, 2.0), 0.0);
    }

    #[test]
    fn names_round_trip() {
        for p in PresetName::ALL {
            assert_eq!(p.to_string().parse::<PresetName>().unwrap(), p);
        }
        assert!(matches!("nope".parse::<PresetName>(), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn gap_costs_follow_distance() {
        let p = one_d_gap_problem();
        let fam = p.side_at(0.5).at(0.5);
        let fam = fam.family().unwrap();
        let costs: Vec<f64> = fam.iter().map(|f| f.l).collect();
        assert_eq!(costs, vec![2.5, 1.5, 0.5]);
        let fam = p.side_at(-3.0).at(-3.0);
        let costs: Vec<f64> = fam.family().unwrap().iter().map(|f| f.l).collect();
        assert_eq!(costs, vec![1.0, 2.0, 3.0]);
    }
}
