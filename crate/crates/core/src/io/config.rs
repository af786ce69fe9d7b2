//! Campaign configuration: a single JSON document, SI units throughout.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::analysis::YieldDefinition;
use crate::constitutive::MaterialModel;
use crate::machine::{ActuatorSpec, BeamSpec, Machine, SpecimenSpec};
use crate::reduction::{calibrate_alpha_dt_mean, Calibration};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub calibration: CalibrationConfig,
    pub materials: BTreeMap<String, MaterialModel>,
    pub actuator: ActuatorTemplate,
    pub specimen: SpecimenTemplate,
    #[serde(default)]
    pub design: Option<DesignConfig>,
    #[serde(default)]
    pub machines: Option<Vec<MachineEntry>>,
    #[serde(default)]
    pub noise_sd: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub outputs: OutputNames,
}

/// Either calibrated values or the free-beam readings they come from.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationConfig {
    #[serde(default)]
    pub alpha_dt_al: Option<f64>,
    #[serde(default)]
    pub alpha_dt_ac: Option<f64>,
    #[serde(default)]
    pub free_beams: Option<FreeBeams>,
    #[serde(default)]
    pub source: String,
}

/// `[deposited_length, free_contraction]` pairs in metres.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeBeams {
    #[serde(default)]
    pub specimen: Vec<(f64, f64)>,
    #[serde(default)]
    pub actuator: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorTemplate {
    /// Only used for explicit machines that omit their own length.
    #[serde(default)]
    pub length: Option<f64>,
    pub width: f64,
    pub thickness: f64,
    #[serde(rename = "E")]
    pub youngs_modulus: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecimenTemplate {
    pub length: f64,
    pub width: f64,
    pub thickness: f64,
    pub material: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig {
    pub targets: Vec<f64>,
    pub length_bounds: (f64, f64),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineEntry {
    pub id: String,
    #[serde(default)]
    pub actuator_length: Option<f64>,
    #[serde(default)]
    pub specimen_length: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    #[serde(default)]
    pub yield_guess: Option<f64>,
    #[serde(default)]
    pub plastic_threshold: Option<f64>,
    #[serde(default)]
    pub yield_definition: YieldDefinition,
    #[serde(default)]
    pub hardening: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputNames {
    pub machines: String,
    pub predicted: String,
    pub measurements: String,
    pub points: String,
    pub fit: String,
    pub report: String,
    pub report_json: String,
    pub plot: String,
}

impl Default for OutputNames {
    fn default() -> Self {
        Self {
            machines: "machines.json".into(),
            predicted: "predicted.csv".into(),
            measurements: "measurements.csv".into(),
            points: "points.csv".into(),
            fit: "fit.json".into(),
            report: "report.txt".into(),
            report_json: "report.json".into(),
            plot: "stress_strain.svg".into(),
        }
    }
}

/// What a config asks the campaign to consist of.
#[derive(Debug, Clone, PartialEq)]
pub enum CampaignPlan {
    Design { targets: Vec<f64>, length_bounds: (f64, f64) },
    Explicit(Vec<Machine>),
}

impl CampaignConfig {
    pub fn from_path(path: &Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(|e| IoError::file(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| IoError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), IoError> {
        self.specimen_material()?;
        match (&self.design, &self.machines) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => {
                return Err(IoError::Config(
                    "exactly one of `design` and `machines` must be present".into(),
                ))
            }
        }
        if let Some(machines) = &self.machines {
            let mut seen = std::collections::BTreeSet::new();
            for m in machines {
                if !seen.insert(m.id.as_str()) {
                    return Err(IoError::Config(format!("duplicate machine id `{}`", m.id)));
                }
            }
        }
        if !(self.noise_sd.is_finite() && self.noise_sd >= 0.0) {
            return Err(IoError::Config(format!("noise_sd must be >= 0, got {}", self.noise_sd)));
        }
        self.calibration()?;
        self.actuator_template()?;
        self.specimen_template()?;
        Ok(())
    }

    pub fn specimen_material(&self) -> Result<&MaterialModel, IoError> {
        self.materials.get(&self.specimen.material).ok_or_else(|| {
            IoError::Config(format!("material `{}` is not defined", self.specimen.material))
        })
    }

    pub fn calibration(&self) -> Result<Calibration, IoError> {
        let c = &self.calibration;
        let beams = c.free_beams.as_ref();
        let pick = |direct: Option<f64>, beams: Option<&Vec<(f64, f64)>>, name: &str| match (direct, beams) {
            (Some(v), None) => Ok(v),
            (None, Some(b)) => calibrate_alpha_dt_mean(b).map_err(|e| IoError::Config(e.to_string())),
            (Some(_), Some(_)) => Err(IoError::Config(format!(
                "{name} given both directly and through free beams"
            ))),
            (None, None) => Err(IoError::Config(format!("calibration is missing {name}"))),
        };
        let cal = Calibration {
            alpha_dt_al: pick(
                c.alpha_dt_al,
                beams.map(|b| &b.specimen).filter(|b| !b.is_empty()),
                "alpha_dt_al",
            )?,
            alpha_dt_ac: pick(
                c.alpha_dt_ac,
                beams.map(|b| &b.actuator).filter(|b| !b.is_empty()),
                "alpha_dt_ac",
            )?,
            source: c.source.clone(),
        };
        cal.validate().map_err(|e| IoError::Config(e.to_string()))?;
        Ok(cal)
    }

    /// Actuator template; in design mode its length is a placeholder that
    /// the designer overwrites.
    pub fn actuator_template(&self) -> Result<ActuatorSpec, IoError> {
        let a = &self.actuator;
        let length = a
            .length
            .or(self.design.as_ref().map(|d| d.length_bounds.0))
            .unwrap_or(1.0);
        let spec = ActuatorSpec {
            beam: BeamSpec {
                deposited_length: length,
                width: a.width,
                thickness: a.thickness,
            },
            youngs_modulus: a.youngs_modulus,
            alpha_dt_ac: self.calibration()?.alpha_dt_ac,
        };
        spec.validate().map_err(|e| IoError::Config(format!("actuator: {e}")))?;
        Ok(spec)
    }

    pub fn specimen_template(&self) -> Result<SpecimenSpec, IoError> {
        let s = &self.specimen;
        let spec = SpecimenSpec {
            beam: BeamSpec {
                deposited_length: s.length,
                width: s.width,
                thickness: s.thickness,
            },
            material: self.specimen_material()?.clone(),
            alpha_dt_al: self.calibration()?.alpha_dt_al,
        };
        spec.validate().map_err(|e| IoError::Config(format!("specimen: {e}")))?;
        Ok(spec)
    }

    pub fn plan(&self) -> Result<CampaignPlan, IoError> {
        if let Some(d) = &self.design {
            return Ok(CampaignPlan::Design {
                targets: d.targets.clone(),
                length_bounds: d.length_bounds,
            });
        }
        let actuator = self.actuator_template()?;
        let specimen = self.specimen_template()?;
        let entries = self.machines.as_deref().unwrap_or_default();
        let mut machines = Vec::with_capacity(entries.len());
        for e in entries {
            let mut m = Machine {
                id: e.id.clone(),
                actuator,
                specimen: specimen.clone(),
            };
            match (e.actuator_length, self.actuator.length) {
                (Some(l), _) | (None, Some(l)) => m.actuator.beam.deposited_length = l,
                (None, None) => {
                    return Err(IoError::Config(format!(
                        "machine `{}` has no actuator_length and the template has none",
                        e.id
                    )))
                }
            }
            if let Some(l) = e.specimen_length {
                m.specimen.beam.deposited_length = l;
            }
            m.validate().map_err(|err| IoError::Config(format!("machine `{}`: {err}", e.id)))?;
            machines.push(m);
        }
        Ok(CampaignPlan::Explicit(machines))
    }
}
