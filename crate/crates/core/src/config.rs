//! Run configuration documents, in TOML or JSON.
//!
//! A document names a preset or spells out a problem inline, and carries
//! the scheme, grid and output choices. Unknown keys are reported; in strict
//! mode they are an error.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::applications::presets::{preset, tanker_preset, Preset, PresetName};
use crate::applications::{CellProblemParams, KppParams};
use crate::dp::PolicyMode;
use crate::error::{Error, Result};
use crate::hamiltonian::{
    AnalyticProfile, FacetFamily, FacetTable, FluxLimiter, JunctionFunction, Side, SideHamiltonian,
};
use crate::pde::{JunctionCondition, JunctionScheme, ViscousConfig};
use crate::problem::{InitialData, JunctionProblem};

/// Default horizon when neither the document nor a preset sets one.
pub const DEFAULT_HORIZON: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    pub problem: ProblemSpec,
    #[serde(default)]
    pub scheme: SchemeSpec,
    #[serde(default)]
    pub value: ValueSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub viscous: Option<ViscousConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kpp: Option<KppParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell: Option<CellProblemParams>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

/// A preset, or an inline problem with at least a right side and initial data.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<PresetName>,
    /// Boundary cost shift of the tanker preset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tanker_g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub junction: Option<FacetFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<SideSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<SideSpec>,
}

/// A side Hamiltonian: a facet list `[[b, c, l], ...]`, a facet table
/// `{ x_samples, facet_lists }`, or a named analytic profile `{ kind = ... }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SideSpec {
    Facets(FacetFamily),
    Table(FacetTable),
    Analytic(AnalyticProfile),
}

impl SideSpec {
    fn build(&self, side: Side) -> SideHamiltonian {
        match self {
            SideSpec::Facets(f) => SideHamiltonian::facets(side, f.clone()),
            SideSpec::Table(t) => SideHamiltonian::table(side, t.clone()),
            SideSpec::Analytic(a) => SideHamiltonian::analytic(side, a.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchemeSpec {
    FluxLimited {
        #[serde(default)]
        limiter: LimiterSpec,
    },
    Kirchhoff,
    IshiiRelaxed,
}

impl Default for SchemeSpec {
    fn default() -> Self {
        SchemeSpec::FluxLimited { limiter: LimiterSpec::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimiterName {
    #[serde(rename = "HT")]
    Ht,
    #[serde(rename = "HTreg")]
    HtReg,
    #[serde(rename = "kirchhoff")]
    Kirchhoff,
    /// The junction condition attached to the preset.
    #[serde(rename = "designated")]
    Designated,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineSpec {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub offset: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LimiterSpec {
    Named(LimiterName),
    Constant { constant: f64 },
    Facets { facets: FacetFamily },
    Affine { affine: AffineSpec },
}

impl Default for LimiterSpec {
    fn default() -> Self {
        LimiterSpec::Named(LimiterName::Designated)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueSpec {
    #[serde(default)]
    pub mode: PolicyMode,
    /// Courant factor of the semi-Lagrangian step; `1` puts feet on nodes
    /// for unit speeds.
    #[serde(default = "default_value_cfl")]
    pub cfl: f64,
}

fn default_value_cfl() -> f64 {
    1.0
}

impl Default for ValueSpec {
    fn default() -> Self {
        ValueSpec { mode: PolicyMode::default(), cfl: default_value_cfl() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(default = "default_dx")]
    pub dx: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    /// Half-line problems start the window at the junction.
    #[serde(default = "default_window")]
    pub window: [f64; 2],
    /// Keep every n-th time slice; `0` keeps about 200.
    #[serde(default)]
    pub save_every: usize,
    /// Grid sizes of a convergence study, strictly decreasing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx_list: Option<Vec<f64>>,
}

fn default_dx() -> f64 {
    2e-3
}
fn default_cfl() -> f64 {
    0.5
}
fn default_window() -> [f64; 2] {
    [-4.0, 4.0]
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { dx: default_dx(), cfl: default_cfl(), window: default_window(), save_every: 0, dx_list: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "yes")]
    pub solution: bool,
    #[serde(default = "yes")]
    pub junction_trace: bool,
    #[serde(default)]
    pub residual: bool,
    /// Add reference columns when a closed form is known.
    #[serde(default = "yes")]
    pub exact: bool,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}
fn yes() -> bool {
    true
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: default_dir(), solution: true, junction_trace: true, residual: false, exact: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Toml,
    Json,
}

impl Format {
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Toml,
        }
    }
}

/// Parses and validates a TOML document in strict mode.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, Format::Toml, true).map(|(c, _)| c)
}

/// Parses and validates a document; returns the ignored keys. In strict
/// mode any ignored key is an error.
pub fn parse_config_with(text: &str, format: Format, strict: bool) -> Result<(RunConfig, Vec<String>)> {
    let mut ignored = Vec::new();
    let mut record = |path: serde_ignored::Path| ignored.push(path.to_string());
    let config: RunConfig = match format {
        Format::Toml => {
            let de = toml::Deserializer::parse(text).map_err(|e| Error::Parse(e.to_string()))?;
            serde_ignored::deserialize(de, &mut record).map_err(|e| Error::Parse(e.to_string()))?
        }
        Format::Json => {
            let mut de = serde_json::Deserializer::from_str(text);
            serde_ignored::deserialize(&mut de, &mut record).map_err(|e| Error::Parse(e.to_string()))?
        }
    };
    if strict && !ignored.is_empty() {
        return Err(Error::Config(format!("unknown keys: {}", ignored.join(", "))));
    }
    config.validate()?;
    Ok((config, ignored))
}

pub fn load_config(path: &Path, strict: bool) -> Result<(RunConfig, Vec<String>)> {
    let text = std::fs::read_to_string(path)?;
    parse_config_with(&text, Format::from_path(path), strict)
}

fn positive(v: f64, path: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(path, format!("must be positive, got {v}")))
    }
}

impl RunConfig {
    /// A document naming only a preset.
    pub fn for_preset(name: PresetName) -> Self {
        RunConfig {
            horizon: None,
            problem: ProblemSpec { preset: Some(name), ..ProblemSpec::default() },
            scheme: SchemeSpec::default(),
            value: ValueSpec::default(),
            viscous: None,
            kpp: None,
            cell: None,
            grid: GridSpec::default(),
            output: OutputSpec::default(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        positive(self.grid.dx, "grid.dx")?;
        if !(self.grid.cfl > 0.0 && self.grid.cfl <= 1.0) {
            return Err(Error::validation("grid.cfl", format!("must lie in (0, 1], got {}", self.grid.cfl)));
        }
        if !(self.value.cfl > 0.0 && self.value.cfl <= 1.0) {
            return Err(Error::validation("value.cfl", format!("must lie in (0, 1], got {}", self.value.cfl)));
        }
        let [a, b] = self.grid.window;
        if !(a <= 0.0 && b > 0.0) {
            return Err(Error::validation("grid.window", format!("[{a}, {b}] must contain 0")));
        }
        if let Some(list) = &self.grid.dx_list {
            if list.len() < 2 {
                return Err(Error::validation("grid.dx_list", "needs at least two sizes"));
            }
            for &d in list {
                positive(d, "grid.dx_list")?;
            }
            if list.windows(2).any(|w| w[1] >= w[0]) {
                return Err(Error::validation("grid.dx_list", "must decrease strictly"));
            }
        }
        if let Some(h) = self.horizon {
            positive(h, "horizon")?;
        }
        let p = &self.problem;
        match (&p.preset, &p.right) {
            (Some(_), Some(_)) => {
                return Err(Error::validation("problem", "give either a preset or an inline problem, not both"))
            }
            (None, None) => return Err(Error::validation("problem", "needs a preset or a right side")),
            (None, Some(_)) if p.initial.is_none() => {
                return Err(Error::validation("problem.initial", "inline problems need initial data"))
            }
            _ => {}
        }
        if let Some(i) = &p.initial {
            i.validate()?;
        }
        for (side, path) in [(&p.right, "problem.right"), (&p.left, "problem.left")] {
            if let Some(SideSpec::Table(t)) = side {
                t.validate().map_err(|e| Error::validation(path, e.to_string()))?;
            }
        }
        if let Some(v) = &self.viscous {
            v.validate()?;
        }
        if let Some(k) = &self.kpp {
            k.validate()?;
        }
        if let Some(c) = &self.cell {
            c.validate()?;
        }
        Ok(())
    }

    pub fn preset(&self) -> Option<Preset> {
        self.problem.preset.map(|name| {
            let mut pr = preset(name);
            if let (PresetName::Tanker, Some(g)) = (name, self.problem.tanker_g) {
                pr = tanker_preset(g);
            }
            if let (PresetName::Kpp, Some(k)) = (name, &self.kpp) {
                pr.problem = Some(k.problem(self.horizon.unwrap_or(DEFAULT_HORIZON)));
            }
            pr
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon.unwrap_or(DEFAULT_HORIZON)
    }

    /// Effective window: half-line problems start at the junction.
    fn window(&self, half_line: bool) -> (f64, f64) {
        let [a, b] = self.grid.window;
        (if half_line { a.max(0.0) } else { a }, b)
    }

    /// The problem this document describes, with the document's window and horizon.
    pub fn build_problem(&self) -> Result<JunctionProblem> {
        let mut problem = match self.preset() {
            Some(pr) => {
                pr.problem.ok_or_else(|| Error::Config(format!("preset {} has no solvable problem", pr.name)))?
            }
            None => {
                let p = &self.problem;
                let right = p.right.as_ref().expect("validated").build(Side::Right);
                JunctionProblem {
                    name: "inline".into(),
                    right,
                    left: p.left.as_ref().map(|s| s.build(Side::Left)),
                    junction: p.junction.clone(),
                    initial: p.initial.clone().expect("validated"),
                    horizon: DEFAULT_HORIZON,
                    window: (0.0, 1.0),
                }
            }
        };
        if let Some(i) = &self.problem.initial {
            problem.initial = i.clone();
        }
        problem.horizon = self.horizon();
        problem.window = self.window(problem.left.is_none());
        problem.validate()?;
        Ok(problem)
    }

    /// The flux limiter named by `spec`.
    pub fn limiter(&self, spec: &LimiterSpec) -> Result<FluxLimiter> {
        Ok(match spec {
            LimiterSpec::Named(LimiterName::Ht) => FluxLimiter::TangentialHt,
            LimiterSpec::Named(LimiterName::HtReg) => FluxLimiter::TangentialHtReg,
            LimiterSpec::Named(LimiterName::Kirchhoff) => FluxLimiter::General(JunctionFunction::Kirchhoff),
            LimiterSpec::Named(LimiterName::Designated) => self
                .preset()
                .and_then(|p| p.limiter)
                .ok_or_else(|| Error::validation("scheme.limiter", "no designated limiter; name one explicitly"))?,
            LimiterSpec::Constant { constant } => FluxLimiter::Constant(*constant),
            LimiterSpec::Facets { facets } => FluxLimiter::Facets(facets.clone()),
            LimiterSpec::Affine { affine } => FluxLimiter::General(JunctionFunction::Affine {
                alpha: affine.alpha,
                beta: affine.beta,
                offset: affine.offset,
            }),
        })
    }

    pub fn scheme(&self) -> Result<JunctionScheme> {
        let condition = match &self.scheme {
            SchemeSpec::FluxLimited { limiter } => JunctionCondition::FluxLimited(self.limiter(limiter)?),
            SchemeSpec::Kirchhoff => JunctionCondition::Kirchhoff,
            SchemeSpec::IshiiRelaxed => JunctionCondition::IshiiRelaxed,
        };
        JunctionScheme::new(condition, self.grid.cfl)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_preset_document() {
        let c = parse_config("[problem]\npreset = \"one_d_gap\"\n").unwrap();
        assert_eq!(c.grid, GridSpec::default());
        assert_eq!(c.grid.cfl, 0.5);
        assert_eq!(c.grid.window, [-4.0, 4.0]);
        assert_eq!(c.grid.dx, 2e-3);
        assert_eq!(c.problem.preset, Some(PresetName::OneDGap));
        assert!(matches!(c.scheme().unwrap().condition, JunctionCondition::FluxLimited(FluxLimiter::TangentialHtReg)));
    }

    #[test]
    fn negative_dx_names_the_field() {
        let err = parse_config("[problem]\npreset = \"one_d_gap\"\n[grid]\ndx = -1.0\n").unwrap_err();
        assert!(matches!(err, Error::Validation { ref path, .. } if path == "grid.dx"), "{err}");
    }

    #[test]
    fn unknown_keys() {
        let text = "[problem]\npreset = \"one_d_gap\"\nbogus = 1\n";
        assert!(matches!(parse_config(text), Err(Error::Config(_))));
        let (_, ignored) = parse_config_with(text, Format::Toml, false).unwrap();
        assert_eq!(ignored, vec!["problem.bogus".to_string()]);
        assert!(matches!(parse_config("[problem]\npreset = \"nope\"\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn inline_facet_problem_round_trips() {
        let text = r#"
horizon = 1.0
[problem]
initial = { kind = "min_abs_one" }
right = [[-1.0, 1.0, 2.0], [0.0, 1.0, 1.0], [1.0, 1.0, 0.0]]
left = [[-1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [1.0, 1.0, 2.0]]
[scheme]
kind = "flux_limited"
limiter = "HTreg"
"#;
        let c = parse_config(text).unwrap();
        let Some(SideSpec::Facets(f)) = &c.problem.right else { panic!("{:?}", c.problem.right) };
        assert_eq!(f.len(), 3);
        assert_eq!(f.facets()[0].l, 2.0);
        let again = parse_config(&c.to_toml().unwrap()).unwrap();
        assert_eq!(again, c);
        let json = parse_config_with(&c.to_json().unwrap(), Format::Json, true).unwrap().0;
        assert_eq!(json, c);
        let p = c.build_problem().unwrap();
        assert_eq!(p.window, (-4.0, 4.0));
        assert!(matches!(c.scheme().unwrap().condition, JunctionCondition::FluxLimited(FluxLimiter::TangentialHtReg)));
    }

    #[test]
    fn half_line_presets_start_at_the_junction() {
        let c = RunConfig::for_preset(PresetName::Tanker);
        assert_eq!(c.build_problem().unwrap().window, (0.0, 4.0));
    }
}
