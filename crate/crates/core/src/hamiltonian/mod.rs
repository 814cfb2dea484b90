//! Bellman Hamiltonians built from control data.
//!
//! A control triple `(b, c, l)` contributes the affine facet
//! `p -> -b p + c r - l`; a side Hamiltonian is the sup over a finite family
//! of facets (or a named analytic profile). Positive `b` points into the
//! right half-line `x > 0`.
//!
//! The monotone split of a side Hamiltonian is side independent: facets with
//! `b <= 0` give the nondecreasing part, facets with `b >= 0` the
//! nonincreasing part. Restrictions act on the convex hull of a family, so a
//! restricted family also carries the zero-velocity mixtures of every
//! opposite-sign pair.

mod junction;
mod tangential;

pub use junction::{flux_limiter_root, general_junction_to_flux_limiter, FluxLimiter, JunctionData, JunctionFunction};
pub use tangential::{
    solve_monotone_level, tangential_family, tangential_ht, tangential_htreg, thresholds_m1_m2, uniqueness_condition,
    Thresholds,
};

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{self, LevelEdge, Monotonicity, S_MAX};

/// One control triple viewed as an affine facet of a Bellman Hamiltonian.
///
/// `b_tan` is a velocity along the interface; it only matters when a
/// tangential gradient is supplied and is zero for every 1-D problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ControlFacet {
    pub b: f64,
    pub c: f64,
    pub l: f64,
    pub b_tan: f64,
}

impl ControlFacet {
    pub const fn new(b: f64, c: f64, l: f64) -> Self {
        ControlFacet { b, c, l, b_tan: 0.0 }
    }

    pub const fn with_tangential(mut self, b_tan: f64) -> Self {
        self.b_tan = b_tan;
        self
    }

    /// `-b p - b_tan p_tan + c r - l`
    #[inline]
    pub fn value(&self, r: f64, p_tan: f64, p: f64) -> f64 {
        -self.b * p - self.b_tan * p_tan + self.c * r - self.l
    }

    /// `w self + (1 - w) other`
    pub fn mix(&self, other: &ControlFacet, w: f64) -> ControlFacet {
        let v = 1.0 - w;
        ControlFacet {
            b: w * self.b + v * other.b,
            c: w * self.c + v * other.c,
            l: w * self.l + v * other.l,
            b_tan: w * self.b_tan + v * other.b_tan,
        }
    }

    /// Largest absolute entry.
    pub fn magnitude(&self) -> f64 {
        self.b.abs().max(self.c.abs()).max(self.l.abs()).max(self.b_tan.abs())
    }
}

impl TryFrom<Vec<f64>> for ControlFacet {
    type Error = String;

    fn try_from(v: Vec<f64>) -> std::result::Result<Self, String> {
        match v.as_slice() {
            [b, c, l] => Ok(ControlFacet::new(*b, *c, *l)),
            [b, c, l, bt] => Ok(ControlFacet::new(*b, *c, *l).with_tangential(*bt)),
            _ => Err(format!("a facet is [b, c, l] or [b, c, l, b_tan], got {} numbers", v.len())),
        }
    }
}

impl From<ControlFacet> for Vec<f64> {
    fn from(f: ControlFacet) -> Self {
        if f.b_tan == 0.0 {
            vec![f.b, f.c, f.l]
        } else {
            vec![f.b, f.c, f.l, f.b_tan]
        }
    }
}

/// Weights `(mu1, mu2)` that cancel the normal velocity of a pair:
/// `mu1 b1 + mu2 b2 = 0`, `mu1 + mu2 = 1`.
pub fn interface_weights(b1: f64, b2: f64) -> Result<(f64, f64)> {
    if b1 == b2 {
        return Err(Error::DegeneratePair(b1));
    }
    if b1 * b2 > 0.0 {
        return Err(Error::NotStraddling { b1, b2 });
    }
    let mu1 = b2 / (b2 - b1);
    Ok((mu1, 1.0 - mu1))
}

/// Zero-velocity mixture of a facet with `b < 0` and one with `b > 0`.
fn zero_mix(neg: &ControlFacet, pos: &ControlFacet) -> ControlFacet {
    let w = pos.b / (pos.b - neg.b);
    let mut m = neg.mix(pos, w);
    m.b = 0.0;
    m
}

/// A finite family of facets; its Hamiltonian is the sup of the facets.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FacetFamily(Vec<ControlFacet>);

impl FacetFamily {
    pub fn new(facets: Vec<ControlFacet>) -> Self {
        FacetFamily(facets)
    }

    pub fn facets(&self) -> &[ControlFacet] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ControlFacet> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sup over the family; `-inf` when empty.
    #[inline]
    pub fn sup(&self, r: f64, p_tan: f64, p: f64) -> f64 {
        self.0.iter().fold(f64::NEG_INFINITY, |m, f| m.max(f.value(r, p_tan, p)))
    }

    /// Facet attaining the sup.
    pub fn argmax(&self, r: f64, p_tan: f64, p: f64) -> Option<&ControlFacet> {
        self.0.iter().max_by(|a, b| a.value(r, p_tan, p).total_cmp(&b.value(r, p_tan, p)))
    }

    pub fn velocity_bound(&self) -> f64 {
        self.0.iter().fold(0.0, |m, f| m.max(f.b.abs()))
    }

    pub fn discount_bound(&self) -> f64 {
        self.0.iter().fold(0.0, |m, f| m.max(f.c.abs()))
    }

    pub fn magnitude_bound(&self) -> f64 {
        self.0.iter().fold(0.0, |m, f| m.max(f.magnitude()))
    }

    /// Drops facets dominated by another facet with the same velocities and
    /// discount but lower cost.
    pub fn pruned(mut self) -> Self {
        let key = |f: &ControlFacet| (f.b, f.b_tan, f.c);
        self.0.sort_by(|a, b| {
            a.b.total_cmp(&b.b).then(a.b_tan.total_cmp(&b.b_tan)).then(a.c.total_cmp(&b.c)).then(a.l.total_cmp(&b.l))
        });
        self.0.dedup_by(|later, first| key(later) == key(first));
        self
    }

    fn filtered(&self, keep: impl Fn(&ControlFacet) -> bool) -> Vec<ControlFacet> {
        self.0.iter().copied().filter(|f| keep(f)).collect()
    }

    /// Vertices of `hull ∩ {b <= 0}` (or `{b >= 0}` when `nonnegative`).
    fn half_hull(&self, nonnegative: bool) -> FacetFamily {
        let neg = self.filtered(|f| f.b < 0.0);
        let pos = self.filtered(|f| f.b > 0.0);
        let mut out = self.filtered(|f| f.b == 0.0);
        out.extend(if nonnegative { &pos } else { &neg });
        for n in &neg {
            for p in &pos {
                out.push(zero_mix(n, p));
            }
        }
        FacetFamily(out).pruned()
    }

    /// Closure of `hull ∩ {b > 0}` (or `{b < 0}`): empty when no facet moves
    /// strictly in that direction.
    fn strict_half_hull(&self, positive: bool) -> FacetFamily {
        let any = self.0.iter().any(|f| if positive { f.b > 0.0 } else { f.b < 0.0 });
        if any {
            self.half_hull(positive)
        } else {
            FacetFamily::default()
        }
    }
}

impl FromIterator<ControlFacet> for FacetFamily {
    fn from_iter<I: IntoIterator<Item = ControlFacet>>(iter: I) -> Self {
        FacetFamily(iter.into_iter().collect())
    }
}

/// Sup over a nonempty facet family.
pub fn eval_facets(facets: &FacetFamily, r: f64, p: f64) -> Result<f64> {
    if facets.is_empty() {
        return Err(Error::EmptyFacets("eval_facets"));
    }
    Ok(facets.sup(r, 0.0, p))
}

/// Which part of a pair of facet families to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Restriction {
    /// Right side, `b <= 0`: the nondecreasing part of the right Hamiltonian.
    RightIncoming,
    /// Right side, `b > 0`.
    RightOutgoing,
    /// Left side, `b >= 0`: the nonincreasing part of the left Hamiltonian.
    LeftIncoming,
    /// Left side, `b < 0`.
    LeftOutgoing,
    /// Every zero-velocity mixture of facets from either side.
    TangentialAll,
    /// Zero-velocity mixtures of a right facet with `b <= 0` and a left facet with `b >= 0`.
    TangentialRegular,
}

/// Restricts the convex hulls of two families. Tangential modes return
/// facets with `b = 0` only; an empty result means "no such dynamics".
pub fn restrict_facets(left: &FacetFamily, right: &FacetFamily, mode: Restriction) -> FacetFamily {
    match mode {
        Restriction::RightIncoming => right.half_hull(false),
        Restriction::RightOutgoing => right.strict_half_hull(true),
        Restriction::LeftIncoming => left.half_hull(true),
        Restriction::LeftOutgoing => left.strict_half_hull(false),
        Restriction::TangentialAll => {
            let all: Vec<ControlFacet> = left.iter().chain(right.iter()).copied().collect();
            zero_velocity_vertices(&all, &all)
        }
        Restriction::TangentialRegular => {
            let r = right.half_hull(false);
            let l = left.half_hull(true);
            zero_velocity_vertices(r.facets(), l.facets())
        }
    }
}

/// `b = 0` members of both sets plus the zero mixtures of a `b < 0` member
/// of `pushers_neg` with a `b > 0` member of `pushers_pos`.
fn zero_velocity_vertices(pushers_neg: &[ControlFacet], pushers_pos: &[ControlFacet]) -> FacetFamily {
    let mut out: Vec<ControlFacet> =
        pushers_neg.iter().chain(pushers_pos.iter()).filter(|f| f.b == 0.0).copied().collect();
    for n in pushers_neg.iter().filter(|f| f.b < 0.0) {
        for p in pushers_pos.iter().filter(|f| f.b > 0.0) {
            out.push(zero_mix(n, p));
        }
    }
    FacetFamily(out).pruned()
}

/// Facet families sampled at increasing abscissae and interpolated linearly
/// facet by facet; constant beyond the first and last sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacetTable {
    pub x_samples: Vec<f64>,
    pub facet_lists: Vec<FacetFamily>,
}

impl FacetTable {
    pub fn constant(family: FacetFamily) -> Self {
        FacetTable { x_samples: vec![0.0], facet_lists: vec![family] }
    }

    pub fn new(x_samples: Vec<f64>, facet_lists: Vec<FacetFamily>) -> Result<Self> {
        let t = FacetTable { x_samples, facet_lists };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_samples.is_empty() || self.x_samples.len() != self.facet_lists.len() {
            return Err(Error::Config("facet table needs one facet list per x sample".into()));
        }
        if self.x_samples.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("facet table x samples must increase strictly".into()));
        }
        let n = self.facet_lists[0].len();
        if n == 0 || self.facet_lists.iter().any(|f| f.len() != n) {
            return Err(Error::Config("facet table lists must be nonempty and of equal length".into()));
        }
        Ok(())
    }

    pub fn at(&self, x: f64) -> FacetFamily {
        let xs = &self.x_samples;
        if x <= xs[0] {
            return self.facet_lists[0].clone();
        }
        let last = xs.len() - 1;
        if x >= xs[last] {
            return self.facet_lists[last].clone();
        }
        let k = xs.partition_point(|&s| s <= x) - 1;
        let w = (xs[k + 1] - x) / (xs[k + 1] - xs[k]);
        self.facet_lists[k].iter().zip(self.facet_lists[k + 1].iter()).map(|(a, b)| a.mix(b, w)).collect()
    }

    fn bound(&self, f: impl Fn(&FacetFamily) -> f64) -> f64 {
        self.facet_lists.iter().map(f).fold(0.0, f64::max)
    }
}

/// Named analytic Hamiltonians `H(r, s) = h(s) + discount * r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalyticProfile {
    /// `speed |s| + offset`
    Eikonal {
        speed: f64,
        #[serde(default)]
        offset: f64,
        #[serde(default)]
        discount: f64,
    },
    /// `speed |s - shift| + offset`
    ShiftedEikonal {
        speed: f64,
        shift: f64,
        #[serde(default)]
        offset: f64,
        #[serde(default)]
        discount: f64,
    },
    /// `s^2 / 2 + offset` for `|s| <= velocity_cap`, continued linearly beyond.
    Quadratic {
        #[serde(default)]
        offset: f64,
        velocity_cap: f64,
        #[serde(default)]
        discount: f64,
    },
}

impl AnalyticProfile {
    #[inline]
    pub fn eval(&self, r: f64, s: f64) -> f64 {
        match *self {
            AnalyticProfile::Eikonal { speed, offset, discount } => speed * s.abs() + offset + discount * r,
            AnalyticProfile::ShiftedEikonal { speed, shift, offset, discount } => {
                speed * (s - shift).abs() + offset + discount * r
            }
            AnalyticProfile::Quadratic { offset, velocity_cap: v, discount } => {
                let a = s.abs();
                let h = if a <= v { 0.5 * s * s } else { v * a - 0.5 * v * v };
                h + offset + discount * r
            }
        }
    }

    pub fn minimizers(&self) -> (f64, f64) {
        match *self {
            AnalyticProfile::ShiftedEikonal { shift, .. } => (shift, shift),
            _ => (0.0, 0.0),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match *self {
            AnalyticProfile::Eikonal { speed, .. } | AnalyticProfile::ShiftedEikonal { speed, .. } => speed.abs(),
            AnalyticProfile::Quadratic { velocity_cap, .. } => velocity_cap.abs(),
        }
    }

    pub fn discount(&self) -> f64 {
        match *self {
            AnalyticProfile::Eikonal { discount, .. }
            | AnalyticProfile::ShiftedEikonal { discount, .. }
            | AnalyticProfile::Quadratic { discount, .. } => discount,
        }
    }
}

type ProfileFn = dyn Fn(f64, f64, f64, f64) -> f64 + Send + Sync;

/// A user supplied profile `(x, r, p_tan, s) -> H` with a declared minimizer
/// interval in `s` and declared Lipschitz bounds.
#[derive(Clone)]
pub struct CustomProfile {
    pub name: String,
    eval: Arc<ProfileFn>,
    pub minimizers: (f64, f64),
    pub lipschitz: f64,
    pub discount_bound: f64,
}

impl CustomProfile {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
        minimizers: (f64, f64),
        lipschitz: f64,
        discount_bound: f64,
    ) -> Self {
        CustomProfile { name: name.into(), eval: Arc::new(eval), minimizers, lipschitz, discount_bound }
    }

    #[inline]
    pub fn eval(&self, x: f64, r: f64, p_tan: f64, s: f64) -> f64 {
        (self.eval)(x, r, p_tan, s)
    }

    /// Rejects profiles whose sampled slope changes sign other than once
    /// from negative to positive.
    pub fn check_quasiconvex(&self, x: f64, r: f64, p_tan: f64) -> Result<()> {
        let (lo, hi) = self.minimizers;
        let half = 4.0 * (1.0 + lo.abs().max(hi.abs()));
        let n = 801;
        let mut seen_rise = false;
        let mut prev = self.eval(x, r, p_tan, -half);
        for k in 1..n {
            let s = -half + 2.0 * half * k as f64 / (n - 1) as f64;
            let v = self.eval(x, r, p_tan, s);
            let d = v - prev;
            let tol = 1e-12 * (1.0 + v.abs());
            if d > tol {
                seen_rise = true;
            } else if d < -tol && seen_rise {
                return Err(Error::Classification(format!("{} decreases again near s = {s}", self.name)));
            }
            prev = v;
        }
        Ok(())
    }
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile")
            .field("name", &self.name)
            .field("minimizers", &self.minimizers)
            .field("lipschitz", &self.lipschitz)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `x < 0`
    Left,
    /// `x > 0`
    Right,
}

#[derive(Clone, Debug)]
pub enum Representation {
    Facets(FacetTable),
    Analytic(AnalyticProfile),
    Custom(CustomProfile),
}

/// A one-side Hamiltonian.
#[derive(Clone, Debug)]
pub struct SideHamiltonian {
    pub side: Side,
    pub repr: Representation,
}

impl SideHamiltonian {
    pub fn facets(side: Side, family: FacetFamily) -> Self {
        SideHamiltonian { side, repr: Representation::Facets(FacetTable::constant(family)) }
    }

    pub fn table(side: Side, table: FacetTable) -> Self {
        SideHamiltonian { side, repr: Representation::Facets(table) }
    }

    pub fn analytic(side: Side, profile: AnalyticProfile) -> Self {
        SideHamiltonian { side, repr: Representation::Analytic(profile) }
    }

    pub fn custom(side: Side, profile: CustomProfile) -> Self {
        SideHamiltonian { side, repr: Representation::Custom(profile) }
    }

    pub fn facet_table(&self) -> Option<&FacetTable> {
        match &self.repr {
            Representation::Facets(t) => Some(t),
            _ => None,
        }
    }

    /// The Hamiltonian frozen at `x`.
    pub fn at(&self, x: f64) -> LocalHamiltonian {
        match &self.repr {
            Representation::Facets(t) => LocalHamiltonian::from_family(t.at(x)),
            Representation::Analytic(p) => LocalHamiltonian::Analytic(p.clone()),
            Representation::Custom(p) => LocalHamiltonian::Custom { profile: p.clone(), x },
        }
    }

    pub fn eval(&self, x: f64, r: f64, p_tan: f64, s: f64) -> f64 {
        match &self.repr {
            Representation::Facets(t) => t.at(x).sup(r, p_tan, s),
            Representation::Analytic(p) => p.eval(r, s),
            Representation::Custom(p) => p.eval(x, r, p_tan, s),
        }
    }

    /// Bound on the slope in the gradient slot.
    pub fn lipschitz(&self) -> f64 {
        match &self.repr {
            Representation::Facets(t) => t.bound(FacetFamily::velocity_bound),
            Representation::Analytic(p) => p.lipschitz(),
            Representation::Custom(p) => p.lipschitz,
        }
    }

    /// Bound on the slope in the value slot.
    pub fn discount_bound(&self) -> f64 {
        match &self.repr {
            Representation::Facets(t) => t.bound(FacetFamily::discount_bound),
            Representation::Analytic(p) => p.discount().abs(),
            Representation::Custom(p) => p.discount_bound,
        }
    }

    /// Largest absolute entry over all facets; `None` without control data.
    pub fn control_bound(&self) -> Option<f64> {
        self.facet_table().map(|t| t.bound(FacetFamily::magnitude_bound))
    }
}

/// A side Hamiltonian frozen at one abscissa, with its monotone parts.
#[derive(Clone, Debug)]
pub enum LocalHamiltonian {
    Facets {
        all: FacetFamily,
        /// hull with `b <= 0`
        nondecreasing: FacetFamily,
        /// hull with `b >= 0`
        nonincreasing: FacetFamily,
        /// closure of hull with `b > 0`
        moving_right: FacetFamily,
        /// closure of hull with `b < 0`
        moving_left: FacetFamily,
    },
    Analytic(AnalyticProfile),
    Custom {
        profile: CustomProfile,
        x: f64,
    },
}

impl LocalHamiltonian {
    pub fn from_family(all: FacetFamily) -> Self {
        LocalHamiltonian::Facets {
            nondecreasing: all.half_hull(false),
            nonincreasing: all.half_hull(true),
            moving_right: all.strict_half_hull(true),
            moving_left: all.strict_half_hull(false),
            all,
        }
    }

    pub fn family(&self) -> Option<&FacetFamily> {
        match self {
            LocalHamiltonian::Facets { all, .. } => Some(all),
            _ => None,
        }
    }

    #[inline]
    pub fn eval(&self, r: f64, p_tan: f64, s: f64) -> f64 {
        match self {
            LocalHamiltonian::Facets { all, .. } => all.sup(r, p_tan, s),
            LocalHamiltonian::Analytic(p) => p.eval(r, s),
            LocalHamiltonian::Custom { profile, x } => profile.eval(*x, r, p_tan, s),
        }
    }

    fn declared_minimizers(&self) -> Option<(f64, f64)> {
        match self {
            LocalHamiltonian::Facets { .. } => None,
            LocalHamiltonian::Analytic(p) => Some(p.minimizers()),
            LocalHamiltonian::Custom { profile, .. } => Some(profile.minimizers),
        }
    }

    /// Part driven by `b <= 0`.
    #[inline]
    pub fn nondecreasing(&self, r: f64, p_tan: f64, s: f64) -> f64 {
        match self {
            LocalHamiltonian::Facets { nondecreasing, .. } => nondecreasing.sup(r, p_tan, s),
            _ => {
                let (_, hi) = self.declared_minimizers().unwrap_or((0.0, 0.0));
                self.eval(r, p_tan, s.max(hi))
            }
        }
    }

    /// Part driven by `b >= 0`.
    #[inline]
    pub fn nonincreasing(&self, r: f64, p_tan: f64, s: f64) -> f64 {
        match self {
            LocalHamiltonian::Facets { nonincreasing, .. } => nonincreasing.sup(r, p_tan, s),
            _ => {
                let (lo, _) = self.declared_minimizers().unwrap_or((0.0, 0.0));
                self.eval(r, p_tan, s.min(lo))
            }
        }
    }

    /// Part driven by `b > 0`; `-inf` when nothing moves right.
    #[inline]
    pub fn moving_right(&self, r: f64, p_tan: f64, s: f64) -> f64 {
        match self {
            LocalHamiltonian::Facets { moving_right, .. } => moving_right.sup(r, p_tan, s),
            _ => self.nonincreasing(r, p_tan, s),
        }
    }

    /// Part driven by `b < 0`; `-inf` when nothing moves left.
    #[inline]
    pub fn moving_left(&self, r: f64, p_tan: f64, s: f64) -> f64 {
        match self {
            LocalHamiltonian::Facets { moving_left, .. } => moving_left.sup(r, p_tan, s),
            _ => self.nondecreasing(r, p_tan, s),
        }
    }

    /// Minimizer interval `[m-, m+]` in the gradient slot (possibly unbounded).
    pub fn minimizers(&self, r: f64, p_tan: f64) -> Result<(f64, f64)> {
        if let Some(m) = self.declared_minimizers() {
            return Ok(m);
        }
        let inf =
            scalar::min_of_max(|s| self.nondecreasing(r, p_tan, s), |s| self.nonincreasing(r, p_tan, s), S_MAX)?.value;
        let level = inf + 1e-12 * (1.0 + inf.abs());
        let hi =
            match scalar::sublevel_edge(|s| self.nondecreasing(r, p_tan, s), Monotonicity::Nondecreasing, level, S_MAX)
            {
                LevelEdge::At(s) => s,
                LevelEdge::Everywhere => f64::INFINITY,
                LevelEdge::Nowhere => return Err(Error::NoSolution("minimum level not reached".into())),
            };
        let lo =
            match scalar::sublevel_edge(|s| self.nonincreasing(r, p_tan, s), Monotonicity::Nonincreasing, level, S_MAX)
            {
                LevelEdge::At(s) => s,
                LevelEdge::Everywhere => f64::NEG_INFINITY,
                LevelEdge::Nowhere => return Err(Error::NoSolution("minimum level not reached".into())),
            };
        Ok((lo, hi))
    }
}

/// Nondecreasing and nonincreasing parts of a side Hamiltonian at a fixed
/// `(x, r, p_tan)`, as functions of the normal gradient.
#[derive(Clone, Debug)]
pub struct MonotoneSplit {
    local: LocalHamiltonian,
    r: f64,
    p_tan: f64,
    /// Least and largest minimizers.
    pub minimizers: (f64, f64),
}

impl MonotoneSplit {
    pub fn eval(&self, s: f64) -> f64 {
        self.local.eval(self.r, self.p_tan, s)
    }

    pub fn nondecreasing(&self, s: f64) -> f64 {
        self.local.nondecreasing(self.r, self.p_tan, s)
    }

    pub fn nonincreasing(&self, s: f64) -> f64 {
        self.local.nonincreasing(self.r, self.p_tan, s)
    }
}

pub fn monotone_split(h: &SideHamiltonian, x: f64, r: f64, p_tan: f64) -> Result<MonotoneSplit> {
    if let Representation::Custom(p) = &h.repr {
        p.check_quasiconvex(x, r, p_tan)?;
    }
    let local = h.at(x);
    let minimizers = local.minimizers(r, p_tan)?;
    Ok(MonotoneSplit { local, r, p_tan, minimizers })
}
