//! Junction conditions and their flux-limiter form.
//!
//! A general junction condition `G(a, p_tan, b, c) = 0` with `a` the time
//! slope and `b`, `c` the two outward normal derivatives is reduced to a
//! flux limiter by
//! `A(a) = min_{s1, s2} max(a + H1^-(s1), a + H2^+(s2), G(a, p_tan, -s1, s2))`.
//! For a fixed level the best `s1` is the largest with `a + H1^-(s1) <= level`
//! and the best `s2` the least with `a + H2^+(s2) <= level`, so `A` is found
//! by bisection on the level.

use std::fmt;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::tangential::{ht_local, htreg_local};
use super::{restrict_facets, FacetFamily, LocalHamiltonian, Restriction, SideHamiltonian};
use crate::error::{Error, Result};
use crate::scalar::{self, LevelEdge, Monotonicity, Switch, S_MAX};

type JunctionFn = dyn Fn(f64, f64, f64, f64) -> f64 + Send + Sync;

/// `G(a, p_tan, b, c)`, nondecreasing in `a`, `b` and `c`.
#[derive(Clone)]
pub enum JunctionFunction {
    /// `b + c`
    Kirchhoff,
    /// `alpha a + beta (b + c) + offset`
    Affine { alpha: f64, beta: f64, offset: f64 },
    /// A callable with declared monotonicity constants.
    Custom { g: Arc<JunctionFn>, alpha: f64, beta: f64 },
    /// No junction term: the reduction keeps only the two side terms.
    Absent,
}

impl JunctionFunction {
    pub fn custom(g: impl Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static, alpha: f64, beta: f64) -> Self {
        JunctionFunction::Custom { g: Arc::new(g), alpha, beta }
    }

    pub fn eval(&self, a: f64, p_tan: f64, b: f64, c: f64) -> f64 {
        match self {
            JunctionFunction::Kirchhoff => b + c,
            JunctionFunction::Affine { alpha, beta, offset } => alpha * a + beta * (b + c) + offset,
            JunctionFunction::Custom { g, .. } => g(a, p_tan, b, c),
            JunctionFunction::Absent => f64::NEG_INFINITY,
        }
    }

    /// Declared `(alpha, beta)`.
    pub fn constants(&self) -> (f64, f64) {
        match self {
            JunctionFunction::Kirchhoff => (0.0, 1.0),
            JunctionFunction::Affine { alpha, beta, .. } | JunctionFunction::Custom { alpha, beta, .. } => {
                (*alpha, *beta)
            }
            JunctionFunction::Absent => (0.0, 0.0),
        }
    }

    /// Checks `G(a2,p,b2,c2) - G(a1,p,b1,c1) >= alpha (a2-a1) + beta ((b2-b1) + (c2-c1))`
    /// on random ordered quadruples, together with `alpha + beta > 0`.
    pub fn check_monotonicity(&self, samples: usize, seed: u64) -> bool {
        if matches!(self, JunctionFunction::Absent) {
            return true;
        }
        let (alpha, beta) = self.constants();
        if alpha < 0.0 || beta < 0.0 || alpha + beta <= 0.0 {
            return false;
        }
        let mut rng = StdRng::seed_from_u64(seed);
        (0..samples).all(|_| {
            let p = rng.random_range(-5.0..5.0);
            let (a1, b1, c1) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let (da, db, dc) = (rng.random_range(0.0..2.0), rng.random_range(0.0..2.0), rng.random_range(0.0..2.0));
            let lhs = self.eval(a1 + da, p, b1 + db, c1 + dc) - self.eval(a1, p, b1, c1);
            lhs >= alpha * da + beta * (db + dc) - 1e-9 * (1.0 + lhs.abs())
        })
    }
}

impl fmt::Debug for JunctionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JunctionFunction::Kirchhoff => write!(f, "Kirchhoff"),
            JunctionFunction::Affine { alpha, beta, offset } => {
                write!(f, "Affine {{ alpha: {alpha}, beta: {beta}, offset: {offset} }}")
            }
            JunctionFunction::Custom { alpha, beta, .. } => write!(f, "Custom {{ alpha: {alpha}, beta: {beta} }}"),
            JunctionFunction::Absent => write!(f, "Absent"),
        }
    }
}

/// Whether `A(a) <= level`.
fn level_feasible(
    g: &JunctionFunction,
    h1: &LocalHamiltonian,
    h2: Option<&LocalHamiltonian>,
    a: f64,
    r: f64,
    p_tan: f64,
    level: f64,
) -> bool {
    let s1 =
        match scalar::sublevel_edge(|s| a + h1.nondecreasing(r, p_tan, s), Monotonicity::Nondecreasing, level, S_MAX) {
            LevelEdge::At(s) => s,
            LevelEdge::Everywhere => f64::INFINITY,
            LevelEdge::Nowhere => return false,
        };
    let s2 = match h2 {
        None => f64::NEG_INFINITY,
        Some(h) => {
            match scalar::sublevel_edge(|s| a + h.nonincreasing(r, p_tan, s), Monotonicity::Nonincreasing, level, S_MAX)
            {
                LevelEdge::At(s) => s,
                LevelEdge::Everywhere => f64::NEG_INFINITY,
                LevelEdge::Nowhere => return false,
            }
        }
    };
    match g {
        JunctionFunction::Absent => true,
        _ => g.eval(a, p_tan, -s1, s2) <= level,
    }
}

const LEVEL_WINDOW: f64 = 1e12;

pub(crate) fn reduce_local(
    g: &JunctionFunction,
    h1: &LocalHamiltonian,
    h2: Option<&LocalHamiltonian>,
    a: f64,
    r: f64,
    p_tan: f64,
) -> Result<f64> {
    let base =
        a + h1.nondecreasing(r, p_tan, 0.0).max(h2.map_or(f64::NEG_INFINITY, |h| h.nonincreasing(r, p_tan, 0.0)));
    match scalar::locate_switch(|t| !level_feasible(g, h1, h2, a, r, p_tan, base + t), LEVEL_WINDOW) {
        Switch::At { hi, .. } => Ok(base + hi),
        Switch::AlwaysTrue => Err(Error::Coercivity("junction reduction never becomes feasible".into())),
        Switch::AlwaysFalse => Err(Error::Coercivity("junction reduction is unbounded below".into())),
    }
}

pub(crate) fn root_local(
    g: &JunctionFunction,
    h1: &LocalHamiltonian,
    h2: Option<&LocalHamiltonian>,
    r: f64,
    p_tan: f64,
) -> Result<f64> {
    match scalar::locate_switch(|a| level_feasible(g, h1, h2, a, r, p_tan, 0.0), LEVEL_WINDOW) {
        Switch::At { lo, .. } => Ok(lo),
        _ => Err(Error::Coercivity("junction condition has no root in the time slope".into())),
    }
}

/// `A(a)` for a general junction function at the junction.
pub fn general_junction_to_flux_limiter(
    g: &JunctionFunction,
    h1: &SideHamiltonian,
    h2: &SideHamiltonian,
    a: f64,
    r: f64,
    p_tan: f64,
) -> Result<f64> {
    reduce_local(g, &h1.at(0.0), Some(&h2.at(0.0)), a, r, p_tan)
}

/// Largest time slope `a` with `A(a) <= 0`. The junction condition then
/// behaves as the flux limiter `-a`.
pub fn flux_limiter_root(
    g: &JunctionFunction,
    h1: &SideHamiltonian,
    h2: &SideHamiltonian,
    r: f64,
    p_tan: f64,
) -> Result<f64> {
    root_local(g, &h1.at(0.0), Some(&h2.at(0.0)), r, p_tan)
}

/// The junction Hamiltonian imposed by a flux-limited condition.
#[derive(Clone, Debug)]
pub enum FluxLimiter {
    Constant(f64),
    /// `H_T`, raised to the junction controls when the problem has any.
    TangentialHt,
    /// `H_T^reg`, raised to the junction controls when the problem has any.
    TangentialHtReg,
    /// Sup over a junction-specific control family.
    Facets(FacetFamily),
    /// The flux limiter equivalent to a general junction condition.
    General(JunctionFunction),
}

/// Both side Hamiltonians frozen at the junction, with the exact tangential
/// families when facet data is available.
#[derive(Clone, Debug)]
pub struct JunctionData {
    pub right: LocalHamiltonian,
    pub left: Option<LocalHamiltonian>,
    /// Junction-specific controls.
    pub own: Option<FacetFamily>,
    all: Option<FacetFamily>,
    regular: Option<FacetFamily>,
}

impl JunctionData {
    pub fn new(right: &SideHamiltonian, left: Option<&SideHamiltonian>, own: Option<FacetFamily>) -> Self {
        let r = right.at(0.0);
        let l = left.map(|h| h.at(0.0));
        let (all, regular) = match (r.family(), l.as_ref().map(|h| h.family())) {
            (Some(fr), None) => (
                Some(restrict_facets(&FacetFamily::default(), fr, Restriction::TangentialAll)),
                Some(restrict_facets(&FacetFamily::default(), fr, Restriction::TangentialRegular)),
            ),
            (Some(fr), Some(Some(fl))) => (
                Some(restrict_facets(fl, fr, Restriction::TangentialAll)),
                Some(restrict_facets(fl, fr, Restriction::TangentialRegular)),
            ),
            _ => (None, None),
        };
        JunctionData { right: r, left: l, own, all, regular }
    }

    /// Exact tangential family (all or regular mixtures), if facet data exists.
    pub fn tangential_family(&self, regular: bool) -> Option<&FacetFamily> {
        if regular {
            self.regular.as_ref()
        } else {
            self.all.as_ref()
        }
    }

    /// Sup over the junction controls; `-inf` without any.
    pub fn own_value(&self, r: f64, p_tan: f64) -> f64 {
        self.own.as_ref().map_or(f64::NEG_INFINITY, |f| f.sup(r, p_tan, 0.0))
    }

    fn tangential(&self, regular: bool, r: f64, p_tan: f64) -> Result<f64> {
        let v = match self.tangential_family(regular) {
            Some(f) => f.sup(r, p_tan, 0.0),
            None if regular => htreg_local(&self.right, self.left.as_ref(), r, p_tan)?,
            None => ht_local(&self.right, self.left.as_ref(), r, p_tan)?,
        };
        Ok(v.max(self.own_value(r, p_tan)))
    }

    pub fn ht(&self, r: f64, p_tan: f64) -> Result<f64> {
        self.tangential(false, r, p_tan)
    }

    pub fn ht_reg(&self, r: f64, p_tan: f64) -> Result<f64> {
        self.tangential(true, r, p_tan)
    }

    /// `H_T` through its min-formula even when facet data is available.
    pub fn ht_by_min_formula(&self, r: f64, p_tan: f64) -> Result<f64> {
        Ok(ht_local(&self.right, self.left.as_ref(), r, p_tan)?.max(self.own_value(r, p_tan)))
    }

    pub fn ht_reg_by_min_formula(&self, r: f64, p_tan: f64) -> Result<f64> {
        Ok(htreg_local(&self.right, self.left.as_ref(), r, p_tan)?.max(self.own_value(r, p_tan)))
    }

    /// Value of the junction Hamiltonian of `limiter` at `(r, p_tan)`.
    pub fn limiter(&self, limiter: &FluxLimiter, r: f64, p_tan: f64) -> Result<f64> {
        match limiter {
            FluxLimiter::Constant(a) => Ok(*a),
            FluxLimiter::TangentialHt => self.ht(r, p_tan),
            FluxLimiter::TangentialHtReg => self.ht_reg(r, p_tan),
            FluxLimiter::Facets(f) => Ok(f.sup(r, p_tan, 0.0)),
            FluxLimiter::General(g) => Ok(-root_local(g, &self.right, self.left.as_ref(), r, p_tan)?),
        }
    }
}
