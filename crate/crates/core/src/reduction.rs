//! Data reduction: free-beam calibration, logarithmic strains from measured
//! displacements, Hooke's law in the actuator and force transfer into the
//! specimen through the cross-section ratio.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::{ActuatorSpec, Machine, MeasurementRecord, SpecimenSpec, MAX_ALPHA_DT};

/// Points with a strain at or below this are treated as sign errors.
pub const MIN_STRAIN: f64 = -0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("calibration error: {0}")]
    Calibration(String),
    #[error("reduction error: {0}")]
    Reduction(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unknown machine id `{0}`")]
    UnknownMachine(String),
}

/// Mismatch strains of specimen and actuator, as calibrated on free beams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub alpha_dt_al: f64,
    pub alpha_dt_ac: f64,
    #[serde(default)]
    pub source: String,
}

impl Calibration {
    pub fn validate(&self) -> Result<(), ReductionError> {
        for (name, v) in [("alpha_dt_al", self.alpha_dt_al), ("alpha_dt_ac", self.alpha_dt_ac)] {
            if !(0.0..MAX_ALPHA_DT).contains(&v) {
                return Err(ReductionError::Calibration(format!(
                    "{name} must be in [0, {MAX_ALPHA_DT}), got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressStrainPoint {
    pub machine_id: String,
    pub strain: f64,
    pub stress: f64,
}

/// Why one record produced no point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionFailure {
    pub machine_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CampaignReduction {
    /// Sorted by strain, ascending.
    pub points: Vec<StressStrainPoint>,
    pub failures: Vec<ReductionFailure>,
}

/// Mismatch strain from the contraction of one free beam: `dl_free / l^d`.
pub fn calibrate_alpha_dt(l_deposited: f64, dl_free: f64) -> Result<f64, ReductionError> {
    if !(l_deposited.is_finite() && l_deposited > 0.0) {
        return Err(ReductionError::Calibration(format!(
            "deposited length must be > 0, got {l_deposited}"
        )));
    }
    if !dl_free.is_finite() || dl_free < 0.0 {
        return Err(ReductionError::Calibration(format!(
            "free beams only contract on cooling; got dl_free = {dl_free}"
        )));
    }
    if dl_free >= l_deposited {
        return Err(ReductionError::Calibration(format!(
            "dl_free {dl_free} is not smaller than the beam length {l_deposited}"
        )));
    }
    Ok(dl_free / l_deposited)
}

/// Mean of the per-beam ratios over several free beams `(l^d, dl_free)`.
pub fn calibrate_alpha_dt_mean(beams: &[(f64, f64)]) -> Result<f64, ReductionError> {
    if beams.is_empty() {
        return Err(ReductionError::Calibration("no free beams given".into()));
    }
    let mut sum = 0.0;
    for &(l, dl) in beams {
        sum += calibrate_alpha_dt(l, dl)?;
    }
    Ok(sum / beams.len() as f64)
}

/// `ln((l^d - dl) / (l^d (1 - alpha_dt)))`: the current length over the
/// room-temperature reference length.
fn log_strain(l_deposited: f64, dl: f64, alpha_dt: f64, what: &str) -> Result<f64, ReductionError> {
    if !dl.is_finite() {
        return Err(ReductionError::Reduction(format!("{what} displacement is not finite")));
    }
    let current = l_deposited - dl;
    let reference = l_deposited - l_deposited * alpha_dt;
    if !(current > 0.0) || dl.abs() >= l_deposited {
        return Err(ReductionError::Reduction(format!(
            "{what} displacement {dl:e} m is not smaller than the deposited length {l_deposited:e} m"
        )));
    }
    if !(reference > 0.0) {
        return Err(ReductionError::Reduction(format!(
            "{what} reference length is not positive"
        )));
    }
    // (current - reference) / reference, formed without cancelling the lengths
    Ok(((l_deposited * alpha_dt - dl) / reference).ln_1p())
}

/// Logarithmic specimen strain from its measured contraction, referred to the
/// thermally corrected length `l^d (1 - alpha_dt_al)`.
pub fn specimen_strain(
    record: &MeasurementRecord,
    spec: &SpecimenSpec,
    cal: &Calibration,
) -> Result<f64, ReductionError> {
    cal.validate()?;
    log_strain(spec.beam.deposited_length, record.dl_al, cal.alpha_dt_al, "specimen")
}

/// Residual elastic strain of the actuator, positive while it is held in
/// tension short of its free contraction.
pub fn actuator_elastic_strain(
    record: &MeasurementRecord,
    actuator: &ActuatorSpec,
    cal: &Calibration,
) -> Result<f64, ReductionError> {
    cal.validate()?;
    log_strain(actuator.beam.deposited_length, record.dl_ac, cal.alpha_dt_ac, "actuator")
}

/// Hooke's law in the actuator.
pub fn actuator_stress(eps_ac_el: f64, youngs_modulus: f64) -> Result<f64, ReductionError> {
    if !eps_ac_el.is_finite() || eps_ac_el.abs() >= MAX_ALPHA_DT {
        return Err(ReductionError::Domain(format!(
            "actuator elastic strain {eps_ac_el} outside |eps| < {MAX_ALPHA_DT}"
        )));
    }
    Ok(youngs_modulus * eps_ac_el)
}

/// Force transfer from actuator to specimen: `sigma_ac * S_ac / S_al`.
pub fn specimen_stress(sigma_ac: f64, s_ac: f64, s_al: f64) -> Result<f64, ReductionError> {
    if !(s_al > 0.0) {
        return Err(ReductionError::Domain(format!(
            "specimen cross-section must be > 0, got {s_al}"
        )));
    }
    Ok(sigma_ac * (s_ac / s_al))
}

/// Full reduction of one record against its machine.
pub fn reduce_record(
    record: &MeasurementRecord,
    machine: &Machine,
    cal: &Calibration,
) -> Result<StressStrainPoint, ReductionError> {
    let strain = specimen_strain(record, &machine.specimen, cal)?;
    if !(strain > MIN_STRAIN) {
        return Err(ReductionError::Reduction(format!(
            "specimen strain {strain} below {MIN_STRAIN}; check displacement signs"
        )));
    }
    let eps_ac = actuator_elastic_strain(record, &machine.actuator, cal)?;
    let sigma_ac = actuator_stress(eps_ac, machine.actuator.youngs_modulus)?;
    let stress = specimen_stress(
        sigma_ac,
        machine.actuator.beam.cross_section(),
        machine.specimen.beam.cross_section(),
    )?;
    Ok(StressStrainPoint {
        machine_id: record.machine_id.clone(),
        strain,
        stress,
    })
}

/// Reduce every record of a campaign. Records that fail are reported in
/// `failures`; an id with no matching machine aborts with
/// [`ReductionError::UnknownMachine`].
pub fn reduce_campaign(
    records: &[MeasurementRecord],
    machines: &[Machine],
    cal: &Calibration,
) -> Result<CampaignReduction, ReductionError> {
    cal.validate()?;
    let by_id: HashMap<&str, &Machine> = machines.iter().map(|m| (m.id.as_str(), m)).collect();
    let mut out = CampaignReduction::default();
    for record in records {
        let machine = by_id
            .get(record.machine_id.as_str())
            .ok_or_else(|| ReductionError::UnknownMachine(record.machine_id.clone()))?;
        match reduce_record(record, machine, cal) {
            Ok(p) => out.points.push(p),
            Err(e) => out.failures.push(ReductionFailure {
                machine_id: record.machine_id.clone(),
                reason: e.to_string(),
            }),
        }
    }
    out.points
        .sort_by(|a, b| a.strain.total_cmp(&b.strain).then_with(|| a.machine_id.cmp(&b.machine_id)));
    Ok(out)
}
