//! JSON scenario documents: model, grid, initial data, time window and bounds.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::constitutive::{ConstitutiveModel, ModelKind};
use crate::error::{Result, SlvError};
use crate::fixed_point::SolverConfig;
use crate::grid::{linf_norm, Field, GridSpec};
use crate::transforms::ScenarioData;

/// Data other than `mode` must be below this fraction of its peak on `|x| ≥ 0.9 L`.
pub const DECAY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub model: ModelKind,
    pub initial_data: InitialData,
    pub grid: GridSection,
    pub time: TimeSection,
    pub physics: PhysicsSection,
    #[serde(default)]
    pub bounds: BoundsSection,
    #[serde(default)]
    pub tolerances: ToleranceSection,
    #[serde(default)]
    pub seed: u64,
    /// Directory that relative `from_file` paths resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataForm {
    /// `(η₀, η₁)`
    Potential,
    /// `(S₀, S₁)`
    Stress,
    /// `(ω₀, ω₁)`
    StrainSum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    pub form: DataForm,
    pub first: Profile,
    #[serde(default)]
    pub second: Profile,
    /// Initial displacement `u(·, 0)`.
    #[serde(default)]
    pub displacement: Profile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    #[default]
    Zero,
    /// `A·exp(−((x−c)/w)²)`
    Gaussian {
        amplitude: f64,
        #[serde(default = "one")]
        width: f64,
        #[serde(default)]
        center: f64,
    },
    /// `A·((x−c)/w)·exp(−((x−c)/w)²)`, mean zero.
    OddGaussian {
        amplitude: f64,
        #[serde(default = "one")]
        width: f64,
        #[serde(default)]
        center: f64,
    },
    /// `A·sin(πk(x+L)/L)`, exactly periodic on the grid.
    Mode { k: u32, amplitude: f64 },
    /// One value per node, or `x,value` rows; a non-numeric first line is a header.
    FromFile { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(rename = "L")]
    pub half_length: f64,
    #[serde(rename = "N")]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub dt: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    /// Reference horizon; defaults to `T`.
    #[serde(rename = "T0", default)]
    pub t0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    pub nu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsSection {
    pub s: f64,
    pub delta: f64,
    pub delta_bar: f64,
    #[serde(rename = "M")]
    pub m_bound: f64,
    pub theta_floor: f64,
    #[serde(rename = "K1_bound")]
    pub k1_bound: Option<f64>,
}

impl Default for BoundsSection {
    fn default() -> Self {
        let c = SolverConfig::default();
        BoundsSection {
            s: c.s,
            delta: c.delta,
            delta_bar: c.delta_bar,
            m_bound: c.m_bound,
            theta_floor: c.theta_floor,
            k1_bound: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceSection {
    pub fp_tol: f64,
    /// Absolute bound on the mean of `ω₀`, `ω₁`; `1e-10·max|ω|` when absent.
    pub mean_zero_tol: Option<f64>,
    pub max_picard_iters: usize,
}

impl Default for ToleranceSection {
    fn default() -> Self {
        let c = SolverConfig::default();
        ToleranceSection {
            fp_tol: c.fp_tol,
            mean_zero_tol: None,
            max_picard_iters: c.max_picard_iters,
        }
    }
}

/// A validated scenario with all fields built on the grid.
#[derive(Debug, Clone)]
pub struct Setup {
    pub name: String,
    pub grid: GridSpec,
    pub model: ConstitutiveModel,
    pub cfg: SolverConfig,
    pub data: ScenarioData,
    pub horizon: f64,
    /// All initial data is made of exactly periodic modes.
    pub periodic: bool,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| SlvError::Format(format!("scenario: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SlvError::Io(format!("{}: {e}", path.display())))?;
        let mut scenario = Self::from_json(&text)?;
        scenario.base_dir = path.parent().map(Path::to_path_buf);
        Ok(scenario)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            nu: self.physics.nu,
            dt: self.time.dt,
            s: self.bounds.s,
            delta_bar: self.bounds.delta_bar,
            m_bound: self.bounds.m_bound,
            delta: self.bounds.delta,
            theta_floor: self.bounds.theta_floor,
            k1_bound: self.bounds.k1_bound,
            t0: self.time.t0.unwrap_or(self.time.horizon),
            fp_tol: self.tolerances.fp_tol,
            max_picard_iters: self.tolerances.max_picard_iters,
            strict_smallness: false,
        }
    }

    /// Validates every numeric constraint and builds the initial data.
    pub fn build(&self) -> Result<Setup> {
        let grid = GridSpec::new(self.grid.half_length, self.grid.points)?;
        let model = ConstitutiveModel::new(self.model);
        let cfg = self.solver_config();
        cfg.validate(&model)?;
        cfg.time_grid(self.time.horizon)?;
        if let Some(tol) = self.tolerances.mean_zero_tol {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(SlvError::Config(format!(
                    "mean_zero_tol must be non-negative, got {tol}"
                )));
            }
        }
        let init = &self.initial_data;
        let first = self.sample(&init.first, &grid)?;
        let second = self.sample(&init.second, &grid)?;
        let u0 = self.sample(&init.displacement, &grid)?;
        let tol = self.tolerances.mean_zero_tol;
        let data = match init.form {
            DataForm::Potential => ScenarioData::from_potential(first, second, &model)?,
            DataForm::Stress => ScenarioData::from_stress(first, second, &model, tol)?,
            DataForm::StrainSum => ScenarioData::from_strain_sum(first, second, &model, tol)?,
        }
        .with_displacement(u0)?;
        let periodic = [&init.first, &init.second, &init.displacement]
            .iter()
            .all(|p| matches!(p, Profile::Zero | Profile::Mode { .. }));
        Ok(Setup {
            name: self.name.clone(),
            grid,
            model,
            cfg,
            data,
            horizon: self.time.horizon,
            periodic,
        })
    }

    fn sample(&self, profile: &Profile, grid: &GridSpec) -> Result<Field> {
        let field = match profile {
            Profile::Zero => return Ok(grid.zeros()),
            Profile::Gaussian {
                amplitude,
                width,
                center,
            } => {
                check_width(*width)?;
                grid.sample(|x| {
                    let z = (x - center) / width;
                    amplitude * (-z * z).exp()
                })
            }
            Profile::OddGaussian {
                amplitude,
                width,
                center,
            } => {
                check_width(*width)?;
                grid.sample(|x| {
                    let z = (x - center) / width;
                    amplitude * z * (-z * z).exp()
                })
            }
            Profile::Mode { k, amplitude } => {
                if *k == 0 || 2 * *k as usize >= grid.len() {
                    return Err(SlvError::Config(format!(
                        "mode index {k} must lie in 1..{}",
                        grid.len() / 2
                    )));
                }
                let l = grid.half_length();
                return Ok(grid.sample(|x| amplitude * (PI * *k as f64 * (x + l) / l).sin()));
            }
            Profile::FromFile { path } => {
                let full = match &self.base_dir {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                read_profile(&full, grid)?
            }
        };
        if !field.is_finite() {
            return Err(SlvError::Config("initial data is not finite".into()));
        }
        check_decay(&field)?;
        Ok(field)
    }
}

fn check_width(width: f64) -> Result<()> {
    if width.is_finite() && width > 0.0 {
        Ok(())
    } else {
        Err(SlvError::Config(format!(
            "profile width must be positive, got {width}"
        )))
    }
}

fn check_decay(field: &Field) -> Result<()> {
    let peak = linf_norm(field);
    let tail = field.tail_max(0.9 * field.grid().half_length());
    if tail > DECAY_TOL * peak.max(1.0) {
        return Err(SlvError::Config(format!(
            "initial data does not decay near the boundary (|f| = {tail:e} on |x| >= 0.9 L)"
        )));
    }
    Ok(())
}

fn read_profile(path: &Path, grid: &GridSpec) -> Result<Field> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SlvError::Io(format!("{}: {e}", path.display())))?;
    let mut values = Vec::with_capacity(grid.len());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let last = line.rsplit(',').next().unwrap_or(line).trim();
        match last.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(SlvError::Format(format!(
                    "{}: line {}: not a number: {last}",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    if values.len() != grid.len() {
        return Err(SlvError::GridMismatch(format!(
            "{} holds {} values, grid has {}",
            path.display(),
            values.len(),
            grid.len()
        )));
    }
    Field::new(*grid, values)
}
