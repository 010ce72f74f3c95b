//! JSON run configurations, one schema per subcommand.
//!
//! Every field has a default, so `{}` is a valid config for each command.
//! Unknown fields are rejected.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use strip_lab::analytic::{SeparationMode, StripSolution, TravelingWave};
use strip_lab::fd::{Convection, ExactSolution, Ordering};
use strip_lab::params::MU0;
use strip_lab::{HalfPlaneGrid, PdeParams, StripGrid};

use crate::CliError;

pub fn load<C: DeserializeOwned + Default>(path: Option<&Path>) -> Result<C, CliError> {
    let Some(path) = path else {
        return Ok(C::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn parse<C: DeserializeOwned>(text: &str) -> Result<C, serde_json::Error> {
    serde_json::from_str(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            x_min: -std::f64::consts::PI,
            x_max: std::f64::consts::PI,
            nx: 33,
            ny: 15,
        }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<StripGrid<f64>, CliError> {
        Ok(StripGrid::new(self.x_min, self.x_max, self.nx, self.ny)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(default)]
    pub k: f64,
    #[serde(default)]
    pub lambda: f64,
}

impl ParamsConfig {
    pub fn build(&self) -> Result<PdeParams<f64>, CliError> {
        Ok(PdeParams::new(self.k, self.lambda)?)
    }
}

/// Named closed-form solutions used for boundary data, forcing and transport.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Preset {
    /// `b0 exp(-alpha y) sin(x / wavelength + b y)` for the run's `(k, lambda)`.
    TravelingWave {
        #[serde(default = "one")]
        wavelength: f64,
        #[serde(default = "one")]
        b0: f64,
    },
    /// Sum of the two exponential modes with angular number `l`.
    SeparationMode {
        #[serde(default = "one_u32")]
        l: u32,
        #[serde(default = "one")]
        a: f64,
        #[serde(default)]
        b: f64,
    },
    /// `sin y`, with forcing `-(1 + lambda) sin y`.
    ManufacturedSin,
    #[default]
    Zero,
}

fn one() -> f64 {
    1.0
}

fn one_u32() -> u32 {
    1
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Self::TravelingWave { .. } => "traveling-wave",
            Self::SeparationMode { .. } => "separation-mode",
            Self::ManufacturedSin => "manufactured-sin",
            Self::Zero => "zero",
        }
    }

    /// `None` for the zero preset.
    pub fn exact(&self, params: &PdeParams<f64>) -> Result<Option<ExactSolution<f64>>, CliError> {
        Ok(match *self {
            Self::TravelingWave { wavelength, b0 } => Some(ExactSolution::Wave(
                TravelingWave::new(params.k(), params.lambda(), wavelength, b0)?,
            )),
            Self::SeparationMode { l, a, b } => Some(ExactSolution::Mode(SeparationMode::new(
                params.k(),
                l,
                a,
                b,
            )?)),
            Self::ManufacturedSin => Some(ExactSolution::SinY),
            Self::Zero => None,
        })
    }

    /// Strip solution with closed-form gradient, for transport to the half-plane.
    pub fn strip_solution(&self, params: &PdeParams<f64>) -> Result<PresetSolution, CliError> {
        Ok(PresetSolution(self.exact(params)?))
    }
}

/// A preset evaluated as a [`StripSolution`].
#[derive(Debug, Clone, Copy)]
pub struct PresetSolution(Option<ExactSolution<f64>>);

impl StripSolution<f64> for PresetSolution {
    fn value(&self, x: f64, y: f64) -> f64 {
        self.0.map_or(0.0, |e| e.value(x, y))
    }

    fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        match self.0 {
            Some(ExactSolution::Wave(w)) => w.gradient(x, y),
            Some(ExactSolution::Mode(m)) => m.gradient(x, y),
            Some(ExactSolution::SinY) => (0.0, y.cos()),
            None => (0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcMode {
    #[default]
    Dirichlet,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcConfig {
    #[serde(default)]
    pub mode: BcMode,
    #[serde(default)]
    pub preset: Preset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub grid: GridConfig,
    pub params: ParamsConfig,
    pub bc: BcConfig,
    /// `zero` or the name of the boundary preset.
    pub forcing: String,
    pub convection: Convection,
    pub ordering: Ordering,
    /// Number of grid doublings used for the order estimate (0 disables it).
    pub refinements: usize,
    /// File name of the solution CSV inside the output directory.
    pub output: String,
    pub seed: Option<u64>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig::default(),
            params: ParamsConfig::default(),
            bc: BcConfig::default(),
            forcing: "zero".into(),
            convection: Convection::default(),
            ordering: Ordering::default(),
            refinements: 0,
            output: "solution.csv".into(),
            seed: None,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.forcing != "zero" && self.forcing != self.bc.preset.name() {
            return Err(CliError::Config(format!(
                "forcing '{}' must be 'zero' or the boundary preset '{}'",
                self.forcing,
                self.bc.preset.name()
            )));
        }
        if self.refinements == 1 {
            return Err(CliError::Config(
                "an order estimate needs at least 2 refinements".into(),
            ));
        }
        check_file_name(&self.output)
    }
}

/// Rejects anything that would escape the output directory.
pub fn check_file_name(name: &str) -> Result<(), CliError> {
    let p = Path::new(name);
    if name.is_empty() || p.components().count() != 1 || p.file_name().is_none() {
        return Err(CliError::Config(format!(
            "output '{name}' must be a plain file name"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyConfig {
    pub k: f64,
    pub lambda: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub density: usize,
    pub random_samples: usize,
    pub seed: Option<u64>,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        let opts = strip_lab::barrier::CertOptions::<f64>::default();
        Self {
            k: 0.0,
            lambda: 0.0,
            r: 10.0,
            density: opts.density,
            random_samples: opts.random_samples,
            seed: None,
        }
    }
}

/// Rectangle `x x y` in the upper half-plane sampled with `n x n` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchConfig {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub n: usize,
}

impl Default for PatchConfig {
    fn default() -> Self {
        Self {
            x: [-2.0, 2.0],
            y: [1.0, 3.0],
            n: 33,
        }
    }
}

impl PatchConfig {
    pub fn build(&self, exclusion: f64) -> Result<HalfPlaneGrid<f64>, CliError> {
        Ok(HalfPlaneGrid::new(
            (self.x[0], self.x[1]),
            (self.y[0], self.y[1]),
            self.n,
            self.n,
            exclusion,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapConfig {
    pub grid: GridConfig,
    pub k: f64,
    pub preset: Preset,
    pub patch: PatchConfig,
    /// Exit with a failure when the weighted residual exceeds this.
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig::default(),
            k: 0.0,
            preset: Preset::TravelingWave {
                wavelength: 1.0,
                b0: 1.0,
            },
            patch: PatchConfig::default(),
            tolerance: None,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DualizeConfig {
    pub k: f64,
    pub preset: Preset,
    pub patch: PatchConfig,
    /// Node indices of the point where the dual potential vanishes.
    pub basepoint: Option<[usize; 2]>,
    pub exclusion: f64,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

impl Default for DualizeConfig {
    fn default() -> Self {
        Self {
            k: 0.0,
            preset: Preset::TravelingWave {
                wavelength: 1.0,
                b0: 1.0,
            },
            patch: PatchConfig::default(),
            basepoint: None,
            exclusion: (-std::f64::consts::PI).exp() / 2.0,
            tolerance: None,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EigenConfig {
    pub grid: GridConfig,
    pub seed: Option<u64>,
}

/// Explicit values or an inclusive linear range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Values {
    List(Vec<f64>),
    Range { start: f64, stop: f64, steps: usize },
}

impl Values {
    pub fn expand(&self, what: &str) -> Result<Vec<f64>, CliError> {
        let v = match self {
            Self::List(v) => v.clone(),
            Self::Range { start, stop, steps } => match steps {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        };
        if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Config(format!(
                "{what} must be a nonempty list of finite values"
            )));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaglevConfig {
    pub k: Values,
    pub y: Values,
    pub b0: f64,
    pub wavelength: f64,
    pub mu0: f64,
    pub seed: Option<u64>,
}

impl Default for MaglevConfig {
    fn default() -> Self {
        Self {
            k: Values::List(vec![0.5, 1.0, 2.0, 5.0]),
            y: Values::Range {
                start: 0.0,
                stop: 1.0,
                steps: 5,
            },
            b0: 1.0,
            wavelength: 1.0,
            mu0: MU0,
            seed: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let c: SolveConfig = parse("{}").unwrap();
        assert_eq!(c, SolveConfig::default());
        let c: MaglevConfig = parse("{}").unwrap();
        assert_eq!(c, MaglevConfig::default());
    }

    #[test]
    fn presets_parse_by_name() {
        let p: Preset = parse(r#"{"name": "traveling-wave", "wavelength": 2.0}"#).unwrap();
        assert_eq!(
            p,
            Preset::TravelingWave {
                wavelength: 2.0,
                b0: 1.0
            }
        );
        let p: Preset = parse(r#"{"name": "separation-mode", "l": 3}"#).unwrap();
        assert_eq!(p.name(), "separation-mode");
        assert!(parse::<Preset>(r#"{"name": "barrier-ish"}"#).is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(parse::<SolveConfig>(
            r#"{"grid": {"x_min": 0, "x_max": 1, "nx": 5, "ny": 5, "nz": 1}}"#
        )
        .is_err());
        assert!(parse::<EigenConfig>(r#"{"gird": {}}"#).is_err());
    }

    #[test]
    fn forcing_must_match_preset() {
        let mut c = SolveConfig {
            forcing: "manufactured-sin".into(),
            ..SolveConfig::default()
        };
        assert!(c.validate().is_err());
        c.bc.preset = Preset::ManufacturedSin;
        assert!(c.validate().is_ok());
        c.output = "../escape.csv".into();
        assert!(c.validate().is_err());
    }

    #[test]
    fn ranges_expand_inclusively() {
        let v = Values::Range {
            start: 0.0,
            stop: 1.0,
            steps: 5,
        };
        assert_eq!(v.expand("y").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(Values::List(vec![]).expand("k").is_err());
        let v: Values = parse("[1, 2]").unwrap();
        assert_eq!(v.expand("k").unwrap(), vec![1.0, 2.0]);
    }
}
