//! Junction problems: two side Hamiltonians, optional junction controls,
//! initial data, horizon and computational window.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::hamiltonian::{FacetFamily, JunctionData, LocalHamiltonian, SideHamiltonian};

/// Initial data `u(x, 0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Constant {
        value: f64,
    },
    /// `min(|x|, 1)`
    MinAbsOne,
    /// `|x|`
    Abs,
    /// `sin(frequency x)`
    Sine {
        frequency: f64,
    },
    /// `0` for `x <= edge`, `cap` beyond.
    Indicator {
        edge: f64,
        cap: f64,
    },
    /// Piecewise linear through the samples, constant beyond.
    Table {
        x_samples: Vec<f64>,
        values: Vec<f64>,
    },
}

impl InitialData {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            InitialData::Constant { value } => *value,
            InitialData::MinAbsOne => x.abs().min(1.0),
            InitialData::Abs => x.abs(),
            InitialData::Sine { frequency } => (frequency * x).sin(),
            InitialData::Indicator { edge, cap } => {
                if x <= *edge {
                    0.0
                } else {
                    *cap
                }
            }
            InitialData::Table { x_samples: xs, values } => {
                if x <= xs[0] {
                    return values[0];
                }
                let last = xs.len() - 1;
                if x >= xs[last] {
                    return values[last];
                }
                let k = xs.partition_point(|&s| s <= x) - 1;
                let w = (x - xs[k]) / (xs[k + 1] - xs[k]);
                (1.0 - w) * values[k] + w * values[k + 1]
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let InitialData::Table { x_samples, values } = self {
            if x_samples.is_empty() || x_samples.len() != values.len() {
                return Err(Error::validation("problem.initial", "table needs one value per x sample"));
            }
            if x_samples.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::validation("problem.initial", "x samples must increase strictly"));
            }
        }
        Ok(())
    }
}

/// A junction problem on `[x_min, x_max]`. Without a left side the window
/// starts at the junction, which then acts as a boundary point.
#[derive(Clone, Debug)]
pub struct JunctionProblem {
    pub name: String,
    pub right: SideHamiltonian,
    pub left: Option<SideHamiltonian>,
    /// Controls available only at the junction (all with `b = 0`).
    pub junction: Option<FacetFamily>,
    pub initial: InitialData,
    pub horizon: f64,
    pub window: (f64, f64),
}

impl JunctionProblem {
    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.window;
        if !(a <= 0.0 && b > 0.0) {
            return Err(Error::validation("grid.window", format!("[{a}, {b}] must contain the junction")));
        }
        if self.left.is_none() && a != 0.0 {
            return Err(Error::validation("grid.window", "a half-line problem starts at the junction"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::validation("horizon", format!("must be positive, got {}", self.horizon)));
        }
        for (h, path) in [(Some(&self.right), "problem.right"), (self.left.as_ref(), "problem.left")] {
            if let Some(t) = h.and_then(SideHamiltonian::facet_table) {
                t.validate().map_err(|e| Error::validation(path, e.to_string()))?;
            }
        }
        if let Some(j) = &self.junction {
            if j.iter().any(|f| f.b != 0.0) {
                return Err(Error::validation("problem.junction", "junction controls must have b = 0"));
            }
        }
        self.initial.validate()
    }

    pub fn side_at(&self, x: f64) -> &SideHamiltonian {
        match &self.left {
            Some(l) if x < 0.0 => l,
            _ => &self.right,
        }
    }

    fn sides(&self) -> impl Iterator<Item = &SideHamiltonian> {
        std::iter::once(&self.right).chain(self.left.iter())
    }

    /// Bound on `|dH/dp|` over both sides.
    pub fn lipschitz(&self) -> f64 {
        self.sides().map(SideHamiltonian::lipschitz).fold(0.0, f64::max)
    }

    /// Bound on `|dH/dr|` over both sides and the junction controls.
    pub fn discount_bound(&self) -> f64 {
        let own = self.junction.as_ref().map_or(0.0, FacetFamily::discount_bound);
        self.sides().map(SideHamiltonian::discount_bound).fold(own, f64::max)
    }

    /// Bound on every control entry; `None` when a side has no control data.
    pub fn control_bound(&self) -> Option<f64> {
        let mut m = self.junction.as_ref().map_or(0.0, FacetFamily::magnitude_bound);
        for s in self.sides() {
            m = m.max(s.control_bound()?);
        }
        Some(m)
    }

    pub fn has_facets(&self) -> bool {
        self.sides().all(|s| s.facet_table().is_some())
    }

    /// Largest stable explicit step: `cfl dx / (L + c_max dx)`.
    pub fn stable_dt(&self, dx: f64, cfl: f64) -> f64 {
        cfl * dx / (self.lipschitz() + self.discount_bound() * dx).max(f64::MIN_POSITIVE)
    }

    pub fn junction_data(&self) -> JunctionData {
        JunctionData::new(&self.right, self.left.as_ref(), self.junction.clone())
    }

    /// Side Hamiltonian frozen at each node; the junction node holds the
    /// right side.
    pub fn node_hamiltonians(&self, grid: &Grid) -> Vec<LocalHamiltonian> {
        (0..grid.len()).map(|i| self.side_at(grid.x(i)).at(grid.x(i))).collect()
    }

    pub fn grid(&self, dx: f64) -> Result<Grid> {
        Grid::new(self.window, dx)
    }
}
