//! One-dimensional searches on monotone and quasiconvex scalar profiles.
//!
//! Everything here works on the sign pattern of a predicate rather than on
//! differences of values, so profiles may take the value `-inf` (the sup over
//! an empty facet family) without producing NaNs.

use crate::error::{Error, Result};

/// Default half-width of the search window for brackets.
pub const S_MAX: f64 = 1e6;

/// Relative width at which bisection stops.
const REL_TOL: f64 = 1e-14;
const MAX_BISECT: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    Nondecreasing,
    Nonincreasing,
}

/// Where a predicate that is true on a left half-line switches to false.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Switch {
    /// `pred(lo)` holds, `pred(hi)` fails, `hi - lo` is at bisection tolerance.
    At { lo: f64, hi: f64 },
    /// The predicate held on all of `[-s_max, s_max]`.
    AlwaysTrue,
    /// The predicate failed on all of `[-s_max, s_max]`.
    AlwaysFalse,
}

/// Locates the switch of a predicate that is true on `(-inf, c)` and false
/// on `(c, inf)`, searching outward from 0 by doubling up to `s_max`.
pub fn locate_switch(pred: impl Fn(f64) -> bool, s_max: f64) -> Switch {
    let (mut lo, mut hi);
    if pred(0.0) {
        lo = 0.0;
        let mut step = 1.0;
        loop {
            if !pred(step) {
                hi = step;
                break;
            }
            lo = step;
            if step >= s_max {
                return Switch::AlwaysTrue;
            }
            step *= 2.0;
        }
    } else {
        hi = 0.0;
        let mut step = 1.0;
        loop {
            if pred(-step) {
                lo = -step;
                break;
            }
            hi = -step;
            if step >= s_max {
                return Switch::AlwaysFalse;
            }
            step *= 2.0;
        }
    }
    for _ in 0..MAX_BISECT {
        if hi - lo <= REL_TOL * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Switch::At { lo, hi }
}

/// Edge of the sublevel set `{f <= target}` of a monotone profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LevelEdge {
    At(f64),
    /// `f <= target` on the whole search window.
    Everywhere,
    /// `f > target` on the whole search window.
    Nowhere,
}

/// For nondecreasing `f` the largest `s` with `f(s) <= target`; for
/// nonincreasing `f` the least such `s`.
pub fn sublevel_edge(f: impl Fn(f64) -> f64, mono: Monotonicity, target: f64, s_max: f64) -> LevelEdge {
    match mono {
        Monotonicity::Nondecreasing => match locate_switch(|s| f(s) <= target, s_max) {
            Switch::At { lo, .. } => LevelEdge::At(lo),
            Switch::AlwaysTrue => LevelEdge::Everywhere,
            Switch::AlwaysFalse => LevelEdge::Nowhere,
        },
        Monotonicity::Nonincreasing => match locate_switch(|s| f(-s) <= target, s_max) {
            Switch::At { lo, .. } => LevelEdge::At(-lo),
            Switch::AlwaysTrue => LevelEdge::Everywhere,
            Switch::AlwaysFalse => LevelEdge::Nowhere,
        },
    }
}

/// A minimizer and the minimum value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum {
    pub arg: f64,
    pub value: f64,
}

/// Minimum over `s` of `max(up(s), down(s))` for `up` nondecreasing and
/// `down` nonincreasing.
///
/// The minimum sits where `up` overtakes `down`. When one profile dominates
/// on the whole window the dominating profile must have flattened out by
/// `s_max`, otherwise the pair is not coercive.
pub fn min_of_max(up: impl Fn(f64) -> f64, down: impl Fn(f64) -> f64, s_max: f64) -> Result<Minimum> {
    let f = |s: f64| up(s).max(down(s));
    match locate_switch(|s| up(s) < down(s), s_max) {
        Switch::At { lo, hi } => {
            let (flo, fhi) = (f(lo), f(hi));
            Ok(if flo <= fhi { Minimum { arg: lo, value: flo } } else { Minimum { arg: hi, value: fhi } })
        }
        Switch::AlwaysTrue => flat_tail(&down, s_max, "nonincreasing part keeps decreasing"),
        Switch::AlwaysFalse => flat_tail(&up, -s_max, "nondecreasing part keeps decreasing toward -inf"),
    }
}

fn flat_tail(g: &dyn Fn(f64) -> f64, end: f64, what: &str) -> Result<Minimum> {
    let (a, b) = (g(0.5 * end), g(end));
    if b == f64::NEG_INFINITY {
        return Ok(Minimum { arg: end, value: b });
    }
    if (a - b).abs() <= 1e-9 * (1.0 + b.abs()) {
        Ok(Minimum { arg: end, value: b })
    } else {
        Err(Error::Coercivity(format!("{what} at |s| = {}", end.abs())))
    }
}

/// Golden-section search for a minimizer of a quasiconvex `f` on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Minimum {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let candidates = [(a, f(a)), (b, f(b)), (c, fc), (d, fd)];
    let (arg, value) =
        candidates.into_iter().fold((f64::NAN, f64::INFINITY), |best, cand| if cand.1 < best.1 { cand } else { best });
    Minimum { arg, value }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(s: f64) -> f64 {
        s.max(0.0)
    }

    #[test]
    fn switch_of_threshold_predicate() {
        match locate_switch(|s| s < 3.25, S_MAX) {
            Switch::At { lo, hi } => {
                assert!(lo < 3.25 && hi >= 3.25 && hi - lo < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(locate_switch(|_| true, 1e3), Switch::AlwaysTrue);
        assert_eq!(locate_switch(|_| false, 1e3), Switch::AlwaysFalse);
    }

    #[test]
    fn sublevel_edges_of_ramps() {
        let e = sublevel_edge(pos, Monotonicity::Nondecreasing, 2.0, S_MAX);
        assert!(matches!(e, LevelEdge::At(s) if (s - 2.0).abs() < 1e-10));
        let e = sublevel_edge(|s| pos(s - 1.0) - 1.0, Monotonicity::Nondecreasing, -0.5, S_MAX);
        assert!(matches!(e, LevelEdge::At(s) if (s - 1.5).abs() < 1e-10));
        // flat part at the target: largest point of the flat part
        let e = sublevel_edge(pos, Monotonicity::Nondecreasing, 0.0, S_MAX);
        assert!(matches!(e, LevelEdge::At(s) if s.abs() < 1e-10));
        assert_eq!(sublevel_edge(pos, Monotonicity::Nondecreasing, -1.0, S_MAX), LevelEdge::Nowhere);
        let e = sublevel_edge(|s| pos(-s), Monotonicity::Nonincreasing, 2.0, S_MAX);
        assert!(matches!(e, LevelEdge::At(s) if (s + 2.0).abs() < 1e-10));
    }

    #[test]
    fn min_of_max_of_v_profiles() {
        // max(s+, s-) = |s|
        let m = min_of_max(pos, |s| pos(-s), S_MAX).unwrap();
        assert!(m.value.abs() < 1e-12);
        // crossing of s+1 and 1-s is at 0 with value 1
        let m = min_of_max(|s| s + 1.0, |s| 1.0 - s, S_MAX).unwrap();
        assert!((m.value - 1.0).abs() < 1e-12 && m.arg.abs() < 1e-12);
    }

    #[test]
    fn min_of_max_with_empty_side() {
        let m = min_of_max(|s| pos(s) - 1.0, |_| f64::NEG_INFINITY, S_MAX).unwrap();
        assert!((m.value + 1.0).abs() < 1e-12);
        assert!(min_of_max(|s| s, |_| f64::NEG_INFINITY, 1e3).is_err());
    }

    #[test]
    fn golden_section_on_parabola() {
        // the argument is resolved only to about sqrt(machine eps) near a smooth minimum
        let m = golden_section(|x| (x - 0.3) * (x - 0.3) + 2.0, -1.0, 4.0, 1e-10);
        assert!((m.arg - 0.3).abs() < 1e-6);
        assert!((m.value - 2.0).abs() < 1e-14);
    }
}
