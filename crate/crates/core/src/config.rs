//! JSON scenario configuration (`"schema_version": 1`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::ModelKind;
use crate::error::{Error, Result};
use crate::model::{Representation, SystemParams};
use crate::oracle::CollapseModel;
use crate::presets::{self, Figure};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    Xi,
    OmegaC,
}

impl Unit {
    pub fn label(self) -> &'static str {
        match self {
            Unit::Xi => "xi",
            Unit::OmegaC => "omega_c",
        }
    }
}

/// Physical parameters as written in a config. Either `g` (dark-tuned total coupling) or both
/// `g1` and `g2` must be given; `delta_e` defaults to `omega_e_level`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub omega0: f64,
    pub xi: f64,
    pub n_cavities: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g2: Option<f64>,
    pub omega_p_rabi: f64,
    pub omega_c_rabi: f64,
    pub omega_d_real: f64,
    pub kappa: f64,
    pub omega_e_level: f64,
    pub omega_m_level: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_e: Option<f64>,
}

impl From<SystemParams> for ParamsConfig {
    fn from(p: SystemParams) -> Self {
        ParamsConfig {
            omega0: p.omega0,
            xi: p.xi,
            n_cavities: p.n_cavities,
            g: None,
            g1: Some(p.g1),
            g2: Some(p.g2),
            omega_p_rabi: p.omega_p_rabi,
            omega_c_rabi: p.omega_c_rabi,
            omega_d_real: p.omega_d_real,
            kappa: p.kappa,
            omega_e_level: p.omega_e_level,
            omega_m_level: p.omega_m_level,
            delta_e: Some(p.delta_e),
        }
    }
}

impl ParamsConfig {
    pub fn resolve(&self) -> Result<SystemParams> {
        let mut p = SystemParams {
            omega0: self.omega0,
            xi: self.xi,
            n_cavities: self.n_cavities,
            g1: 0.0,
            g2: 0.0,
            omega_p_rabi: self.omega_p_rabi,
            omega_c_rabi: self.omega_c_rabi,
            omega_d_real: self.omega_d_real,
            kappa: self.kappa,
            omega_e_level: self.omega_e_level,
            omega_m_level: self.omega_m_level,
            delta_e: self.delta_e.unwrap_or(self.omega_e_level),
        };
        p.validate().map_err(prefix_field)?;
        match (self.g, self.g1, self.g2) {
            (Some(g), None, None) => {
                if !(g.is_finite() && g >= 0.0) {
                    return Err(Error::invalid("params.g", format!("must be finite and >= 0, got {g}")));
                }
                p = p.with_dark_coupling(g);
            }
            (None, Some(g1), Some(g2)) => {
                p.g1 = g1;
                p.g2 = g2;
                p.validate().map_err(prefix_field)?;
            }
            (Some(_), _, _) => {
                return Err(Error::invalid("params.g", "give either g or g1 and g2, not both"))
            }
            _ => return Err(Error::invalid("params.g1", "need either g or both g1 and g2")),
        }
        Ok(p)
    }
}

fn prefix_field(e: Error) -> Error {
    match e {
        Error::InvalidParam { field, reason } => Error::InvalidParam {
            field: format!("params.{field}"),
            reason,
        },
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    PhotonSite(usize),
    AtomM,
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition::PhotonSite(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_max: f64,
    pub dt: f64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            t_max: 100.0,
            dt: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModelSelector {
    #[default]
    Effective,
    Full,
    Lindblad,
    Analytic,
}

impl ModelSelector {
    pub fn kind(self) -> Option<ModelKind> {
        match self {
            ModelSelector::Effective => Some(ModelKind::Effective),
            ModelSelector::Full => Some(ModelKind::Full),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Prefix for every file written by this run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub unit: Unit,
    pub params: ParamsConfig,
    #[serde(default)]
    pub initial: InitialCondition,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub model: ModelSelector,
    #[serde(default)]
    pub representation: Representation,
    #[serde(default)]
    pub collapse: CollapseModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        let p = self.system_params()?;
        let t = self.time;
        if !(t.t_max > 0.0 && t.t_max.is_finite()) {
            return Err(Error::invalid("time.t_max", format!("must be > 0, got {}", t.t_max)));
        }
        if !(t.dt > 0.0 && t.dt <= t.t_max) {
            return Err(Error::invalid("time.dt", format!("must be in (0, t_max], got {}", t.dt)));
        }
        if let InitialCondition::PhotonSite(j) = self.initial {
            if j >= p.n_cavities {
                return Err(Error::invalid(
                    "initial.photon_site",
                    format!("{j} is not below n_cavities = {}", p.n_cavities),
                ));
            }
        }
        if let Some(s) = &self.sweep {
            for (name, grid) in [("sweep.omega0", &s.omega0), ("sweep.xi", &s.xi)] {
                if let Some(g) = grid {
                    if g.is_empty() || g.iter().any(|v| !v.is_finite()) {
                        return Err(Error::invalid(name, "must be a non-empty list of finite numbers"));
                    }
                }
            }
            if let Some(xi) = &s.xi {
                if let Some(bad) = xi.iter().find(|&&v| v <= 0.0) {
                    return Err(Error::invalid("sweep.xi", format!("values must be > 0, got {bad}")));
                }
            }
            if s.omega0.is_none() && s.xi.is_none() {
                return Err(Error::invalid("sweep", "needs omega0 and/or xi"));
            }
            if matches!(self.model, ModelSelector::Lindblad | ModelSelector::Analytic) {
                return Err(Error::invalid("sweep", "sweeps need model effective or full"));
            }
        }
        if self.model == ModelSelector::Effective && !p.dark_condition() {
            return Err(Error::DarkConditionViolated { g1: p.g1, g2: p.g2 });
        }
        Ok(())
    }

    pub fn system_params(&self) -> Result<SystemParams> {
        self.params.resolve()
    }

    /// Config equivalent to a built-in figure preset.
    pub fn from_preset(figure: Figure) -> Self {
        let params = figure.params();
        let (initial, time) = match figure {
            Figure::Fig4 => (InitialCondition::AtomM, TimeConfig { t_max: 100.0, dt: 0.01 }),
            Figure::Fig5 | Figure::Fig6 | Figure::Fig7 => (
                InitialCondition::PhotonSite(1),
                TimeConfig {
                    t_max: presets::CHARGING_T_MAX,
                    dt: 0.01,
                },
            ),
            _ => (InitialCondition::PhotonSite(0), TimeConfig::default()),
        };
        let sweep = match figure {
            Figure::Fig5 => {
                let (w, x) = presets::fig5_grids();
                Some(SweepConfig { omega0: Some(w), xi: Some(x) })
            }
            Figure::Fig6 => Some(SweepConfig {
                omega0: Some(vec![params.omega0]),
                xi: Some(presets::fig6_xi_grid()),
            }),
            Figure::Fig7 => Some(SweepConfig {
                omega0: None,
                xi: Some(presets::fig7_xi_grid()),
            }),
            _ => None,
        };
        ScenarioConfig {
            schema_version: SCHEMA_VERSION,
            unit: if figure.unit() == "xi" { Unit::Xi } else { Unit::OmegaC },
            params: params.into(),
            initial,
            time,
            model: ModelSelector::Effective,
            representation: Representation::SiteSpace,
            collapse: CollapseModel::JumpToGround,
            sweep,
            output: OutputConfig {
                prefix: Some(figure.id().to_string()),
            },
        }
    }
}
