//! Uniform 1-D grids with a node pinned at the junction, and stacks of
//! time slices on them.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodes `x_i = (i - n_left) dx` for `i = 0..=n_left + n_right`; node
/// `n_left` is exactly the junction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub dx: f64,
    pub n_left: usize,
    pub n_right: usize,
}

impl Grid {
    /// Grid covering `[x_min, x_max]`. Both ends must lie on the lattice
    /// `dx Z` up to a relative `1e-9`.
    pub fn new(window: (f64, f64), dx: f64) -> Result<Self> {
        let (x_min, x_max) = window;
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::validation("grid.dx", format!("must be positive, got {dx}")));
        }
        if !(x_min <= 0.0 && x_max > 0.0) {
            return Err(Error::validation("grid.window", format!("[{x_min}, {x_max}] must contain the junction 0")));
        }
        let lattice = |v: f64, path: &str| -> Result<usize> {
            let k = (v.abs() / dx).round();
            if (k * dx - v.abs()).abs() > 1e-9 * dx.max(v.abs()) {
                return Err(Error::validation(path, format!("{v} is not a multiple of dx = {dx}")));
            }
            Ok(k as usize)
        };
        Ok(Grid { dx, n_left: lattice(x_min, "grid.window")?, n_right: lattice(x_max, "grid.window")? })
    }

    pub fn len(&self) -> usize {
        self.n_left + self.n_right + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the junction node.
    pub fn junction(&self) -> usize {
        self.n_left
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.n_left as f64) * self.dx
    }

    pub fn x_min(&self) -> f64 {
        self.x(0)
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.len() - 1)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.x(i))
    }

    /// Nearest node to `x`, clamped to the grid.
    pub fn nearest(&self, x: f64) -> usize {
        let k = (x / self.dx).round() + self.n_left as f64;
        k.clamp(0.0, (self.len() - 1) as f64) as usize
    }

    /// Linear interpolation of nodal values, constant beyond the ends.
    #[inline]
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let s = x / self.dx + self.n_left as f64;
        if s <= 0.0 {
            return values[0];
        }
        let last = self.len() - 1;
        if s >= last as f64 {
            return values[last];
        }
        let k = s.floor() as usize;
        let w = s - k as f64;
        if w == 0.0 {
            values[k]
        } else {
            (1.0 - w) * values[k] + w * values[k + 1]
        }
    }
}

/// Values on a grid at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        GridFunction { grid, values: grid.nodes().map(f).collect() }
    }

    pub fn at(&self, x: f64) -> f64 {
        self.grid.interpolate(&self.values, x)
    }

    pub fn junction_value(&self) -> f64 {
        self.values[self.grid.junction()]
    }
}

/// Time slices of a grid function.
#[derive(Clone, Debug, PartialEq)]
pub struct GridStack {
    pub grid: Grid,
    pub times: Vec<f64>,
    pub slices: Vec<Vec<f64>>,
}

impl GridStack {
    pub fn new(grid: Grid) -> Self {
        GridStack { grid, times: Vec::new(), slices: Vec::new() }
    }

    /// Samples `f(x, t)` at the given times.
    pub fn from_fn(grid: Grid, times: &[f64], f: impl Fn(f64, f64) -> f64) -> Self {
        let slices = times.iter().map(|&t| grid.nodes().map(|x| f(x, t)).collect()).collect();
        GridStack { grid, times: times.to_vec(), slices }
    }

    pub fn push(&mut self, t: f64, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.grid.len());
        self.times.push(t);
        self.slices.push(values);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> GridFunction {
        GridFunction { grid: self.grid, values: self.slices.last().cloned().unwrap_or_default() }
    }

    /// Index of the slice stored at time `t` (within `1e-9`).
    pub fn index_of_time(&self, t: f64) -> Option<usize> {
        let tol = 1e-9 * (1.0 + t.abs());
        let k = self.times.partition_point(|&s| s < t - tol);
        (k < self.times.len() && (self.times[k] - t).abs() <= tol).then_some(k)
    }

    pub fn slice_at(&self, t: f64) -> Option<&[f64]> {
        self.index_of_time(t).map(|k| self.slices[k].as_slice())
    }

    /// Index of the latest slice at or before `t`.
    pub fn index_at_or_before(&self, t: f64) -> usize {
        let tol = 1e-9 * (1.0 + t.abs());
        self.times.partition_point(|&s| s <= t + tol).saturating_sub(1)
    }

    /// `u(x, t)` by linear interpolation in space at a stored time.
    pub fn value(&self, x: f64, t: f64) -> Option<f64> {
        self.slice_at(t).map(|s| self.grid.interpolate(s, x))
    }

    /// `(t, u(0, t))` for every stored slice.
    pub fn junction_trace(&self) -> Vec<(f64, f64)> {
        let j = self.grid.junction();
        self.times.iter().zip(&self.slices).map(|(&t, s)| (t, s[j])).collect()
    }

    /// Largest `|u - reference|` over stored slices, restricted to `|x| <= radius`.
    pub fn sup_error(&self, radius: f64, reference: impl Fn(f64, f64) -> f64) -> f64 {
        let mut worst: f64 = 0.0;
        for (&t, s) in self.times.iter().zip(&self.slices) {
            for (i, &v) in s.iter().enumerate() {
                let x = self.grid.x(i);
                if x.abs() <= radius + 1e-12 {
                    worst = worst.max((v - reference(x, t)).abs());
                }
            }
        }
        worst
    }

    /// Writes `t,x,u` rows (plus `exact` when a reference is given).
    pub fn write_csv(&self, w: impl Write, exact: Option<&dyn Fn(f64, f64) -> f64>) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        if exact.is_some() {
            out.write_record(["t", "x", "u", "exact"])?;
        } else {
            out.write_record(["t", "x", "u"])?;
        }
        for (&t, s) in self.times.iter().zip(&self.slices) {
            for (i, &v) in s.iter().enumerate() {
                let x = self.grid.x(i);
                match exact {
                    Some(f) => out.serialize((t, x, v, f(x, t)))?,
                    None => out.serialize((t, x, v))?,
                }
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path, exact: Option<&dyn Fn(f64, f64) -> f64>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?, exact)
    }

    /// Reads a stack written by [`GridStack::write_csv`]; the grid is
    /// recovered from the node positions of the first slice.
    pub fn read_csv(r: impl Read) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut times: Vec<f64> = Vec::new();
        let mut xs: Vec<f64> = Vec::new();
        let mut slices: Vec<Vec<f64>> = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let field = |k: usize| -> Result<f64> {
                rec.get(k)
                    .ok_or_else(|| Error::Parse("short CSV row".into()))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(e.to_string()))
            };
            let (t, x, u) = (field(0)?, field(1)?, field(2)?);
            if times.last() != Some(&t) {
                times.push(t);
                slices.push(Vec::new());
            }
            if times.len() == 1 {
                xs.push(x);
            }
            slices.last_mut().expect("slice opened above").push(u);
        }
        if xs.len() < 2 {
            return Err(Error::Parse("stack needs at least two nodes".into()));
        }
        let dx = xs[1] - xs[0];
        let grid = Grid::new((xs[0], *xs.last().expect("nonempty")), dx)?;
        if grid.len() != xs.len() || slices.iter().any(|s| s.len() != xs.len()) {
            return Err(Error::GridMismatch("ragged stack in CSV".into()));
        }
        Ok(GridStack { grid, times, slices })
    }
}

/// `max(u - v)` over all slices and nodes.
pub fn comparison_gap(u: &GridStack, v: &GridStack) -> Result<f64> {
    if u.grid != v.grid || u.times.len() != v.times.len() {
        return Err(Error::GridMismatch(format!(
            "{} nodes x {} slices vs {} nodes x {} slices",
            u.grid.len(),
            u.len(),
            v.grid.len(),
            v.len()
        )));
    }
    if u.times.iter().zip(&v.times).any(|(a, b)| (a - b).abs() > 1e-9 * (1.0 + a.abs())) {
        return Err(Error::GridMismatch("slice times differ".into()));
    }
    Ok(u.slices
        .iter()
        .zip(&v.slices)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Uniform time stepping that lands exactly on the horizon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub dt: f64,
    pub steps: usize,
}

impl TimeGrid {
    /// Smallest number of equal steps of size at most `dt_max`.
    pub fn covering(horizon: f64, dt_max: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::validation("horizon", format!("must be positive, got {horizon}")));
        }
        if !(dt_max > 0.0) {
            return Err(Error::Config(format!("time step bound {dt_max} is not positive")));
        }
        let steps = ((horizon / dt_max) - 1e-9).ceil().max(1.0) as usize;
        Ok(TimeGrid { dt: horizon / steps as f64, steps })
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_pins_junction() {
        let g = Grid::new((-4.0, 4.0), 2e-3).unwrap();
        assert_eq!(g.len(), 4001);
        assert_eq!(g.x(g.junction()), 0.0);
        assert!((g.x_min() + 4.0).abs() < 1e-12 && (g.x_max() - 4.0).abs() < 1e-12);
        assert!(matches!(Grid::new((-1.0, 1.0), -1.0), Err(Error::Validation { path, .. }) if path == "grid.dx"));
        assert!(Grid::new((-1.0, 1.0), 0.3).is_err());
        assert!(Grid::new((0.5, 1.0), 0.1).is_err());
        let half = Grid::new((0.0, 2.0), 0.5).unwrap();
        assert_eq!(half.junction(), 0);
    }

    #[test]
    fn interpolation_is_exact_for_affine_data() {
        let g = Grid::new((-1.0, 1.0), 0.25).unwrap();
        let v: Vec<f64> = g.nodes().map(|x| 3.0 * x - 1.0).collect();
        for x in [-0.9, -0.3, 0.0, 0.11, 0.99] {
            assert!((g.interpolate(&v, x) - (3.0 * x - 1.0)).abs() < 1e-12);
        }
        assert_eq!(g.interpolate(&v, 5.0), 2.0);
    }

    #[test]
    fn stack_csv_round_trip() {
        let g = Grid::new((-1.0, 1.0), 0.1).unwrap();
        let s = GridStack::from_fn(g, &[0.0, 0.5, 1.0], |x, t| (x * 1.234567891234).sin() + t / 3.0);
        let mut buf = Vec::new();
        s.write_csv(&mut buf, None).unwrap();
        let back = GridStack::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.times, s.times);
        for (a, b) in back.slices.iter().flatten().zip(s.slices.iter().flatten()) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
        assert_eq!(comparison_gap(&s, &s).unwrap(), 0.0);
    }

    #[test]
    fn time_grid_hits_horizon() {
        let tg = TimeGrid::covering(1.0, 0.3).unwrap();
        assert_eq!(tg.steps, 4);
        assert!((tg.time(tg.steps) - 1.0).abs() < 1e-15);
        assert_eq!(TimeGrid::covering(1.0, 1e-3).unwrap().steps, 1000);
    }
}
