//! Geometry of an actuator–specimen couple and its post-release equilibrium.
//!
//! Displacements are positive in contraction. On release the specimen first
//! shrinks by its free thermal contraction `l_al * alpha_dt_al`; the junction
//! then moves by `u` towards the actuator anchor, stretching the specimen and
//! letting the actuator relax from its built-in mismatch. Cross-sections stay
//! at their deposited values and the actuator is linear elastic.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constitutive::{ConstitutiveError, MaterialModel};
use crate::roots;

/// Upper sanity bound on a mismatch strain.
pub const MAX_ALPHA_DT: f64 = 0.05;
/// Iteration cap for the equilibrium search.
pub const MAX_SOLVER_ITERATIONS: usize = 200;
/// Required force residual, relative to `E_ac * alpha_dt_ac * S_ac`.
pub const FORCE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MachineError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("machine `{0}` has no actuator mismatch (alpha_dt_ac must be > 0)")]
    NoActuation(String),
    #[error("equilibrium search for `{id}` did not converge after {iterations} iterations; last bracket u in [{lo:e}, {hi:e}] m")]
    SolverFailure {
        id: String,
        lo: f64,
        hi: f64,
        iterations: usize,
    },
    #[error(transparent)]
    Constitutive(#[from] ConstitutiveError),
}

/// Deposited beam geometry, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSpec {
    pub deposited_length: f64,
    pub width: f64,
    pub thickness: f64,
}

impl BeamSpec {
    pub fn new(deposited_length: f64, width: f64, thickness: f64) -> Result<Self, MachineError> {
        let beam = Self {
            deposited_length,
            width,
            thickness,
        };
        beam.validate()?;
        Ok(beam)
    }

    pub fn cross_section(&self) -> f64 {
        self.width * self.thickness
    }

    pub fn validate(&self) -> Result<(), MachineError> {
        for (name, v) in [
            ("deposited_length", self.deposited_length),
            ("width", self.width),
            ("thickness", self.thickness),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(MachineError::InvalidGeometry(format!(
                    "beam {name} must be > 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActuatorSpec {
    pub beam: BeamSpec,
    pub youngs_modulus: f64,
    pub alpha_dt_ac: f64,
}

impl ActuatorSpec {
    pub fn validate(&self) -> Result<(), MachineError> {
        self.beam.validate()?;
        if !(self.youngs_modulus.is_finite() && self.youngs_modulus > 0.0) {
            return Err(MachineError::InvalidGeometry(format!(
                "actuator modulus must be > 0, got {}",
                self.youngs_modulus
            )));
        }
        if !(self.alpha_dt_ac > 0.0 && self.alpha_dt_ac < MAX_ALPHA_DT) {
            return Err(MachineError::InvalidGeometry(format!(
                "actuator alpha_dt must be in (0, {MAX_ALPHA_DT}), got {}",
                self.alpha_dt_ac
            )));
        }
        Ok(())
    }

    /// Length the actuator would reach if released unattached.
    pub fn free_length(&self) -> f64 {
        self.beam.deposited_length * (1.0 - self.alpha_dt_ac)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecimenSpec {
    pub beam: BeamSpec,
    pub material: MaterialModel,
    pub alpha_dt_al: f64,
}

impl SpecimenSpec {
    pub fn validate(&self) -> Result<(), MachineError> {
        self.beam.validate()?;
        if !(self.alpha_dt_al >= 0.0 && self.alpha_dt_al < MAX_ALPHA_DT) {
            return Err(MachineError::InvalidGeometry(format!(
                "specimen alpha_dt must be in [0, {MAX_ALPHA_DT}), got {}",
                self.alpha_dt_al
            )));
        }
        Ok(())
    }

    /// Room-temperature reference length `l^d (1 - alpha_dt)`.
    pub fn reference_length(&self) -> f64 {
        self.beam.deposited_length * (1.0 - self.alpha_dt_al)
    }
}

/// One elementary tensile stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Machine {
    pub id: String,
    pub actuator: ActuatorSpec,
    pub specimen: SpecimenSpec,
}

impl Machine {
    pub fn validate(&self) -> Result<(), MachineError> {
        if self.id.is_empty() {
            return Err(MachineError::InvalidGeometry("machine id is empty".into()));
        }
        if self.actuator.alpha_dt_ac <= 0.0 {
            return Err(MachineError::NoActuation(self.id.clone()));
        }
        self.actuator.validate()?;
        self.specimen.validate()
    }

    /// Largest possible junction displacement: the free actuator contraction.
    pub fn max_displacement(&self) -> f64 {
        free_contraction(&self.actuator.beam, self.actuator.alpha_dt_ac)
    }

    /// Logarithmic specimen strain for junction displacement `u`.
    pub fn specimen_strain_at(&self, u: f64) -> f64 {
        (u / self.specimen.reference_length()).ln_1p()
    }

    /// Residual elastic (tensile) strain of the actuator for junction
    /// displacement `u`, measured from its free length.
    pub fn actuator_strain_at(&self, u: f64) -> f64 {
        ((self.max_displacement() - u) / self.actuator.free_length()).ln_1p()
    }

    /// Force imbalance `sigma_ac S_ac - sigma_al S_al` at displacement `u`;
    /// decreasing in `u`.
    fn force_imbalance(&self, u: f64) -> Result<f64, ConstitutiveError> {
        let f_ac = self.actuator.youngs_modulus
            * self.actuator_strain_at(u)
            * self.actuator.beam.cross_section();
        let sigma_al = self
            .specimen
            .material
            .stress_at_strain(self.specimen_strain_at(u))?;
        Ok(f_ac - sigma_al * self.specimen.beam.cross_section())
    }
}

/// Post-release state of one machine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumState {
    /// Junction displacement, positive for actuator contraction (m).
    pub junction_displacement: f64,
    pub specimen_log_strain: f64,
    pub specimen_stress: f64,
    pub actuator_elastic_strain: f64,
    pub actuator_stress: f64,
    /// `sigma_ac S_ac - sigma_al S_al` (N).
    pub force_residual: f64,
}

/// Signed SEM observables of one machine, positive in contraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub machine_id: String,
    pub dl_al: f64,
    pub dl_ac: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_seed: Option<u64>,
}

/// Displacement of an unattached released beam, `l^d * alpha_dt`.
pub fn free_contraction(beam: &BeamSpec, alpha_dt: f64) -> f64 {
    beam.deposited_length * alpha_dt
}

/// Solve the force balance between actuator and specimen for the junction
/// displacement `u` in `[0, alpha_dt_ac * l_ac]`.
///
/// The imbalance is positive at `u = 0` (specimen unloaded, actuator fully
/// blocked) and non-positive at the free-actuator limit, and is monotone in
/// between, so a bracketed search always has a root to find.
pub fn solve_equilibrium(machine: &Machine) -> Result<EquilibriumState, MachineError> {
    machine.validate()?;
    let u_max = machine.max_displacement();
    let force_scale =
        machine.actuator.youngs_modulus * machine.actuator.alpha_dt_ac * machine.actuator.beam.cross_section();

    // Constitutive errors cannot occur for u in the bracket (strain >= 0), but
    // surface them rather than mask them if they do.
    let mut failure = None;
    let result = roots::brent(
        |u| match machine.force_imbalance(u) {
            Ok(f) => f,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        u_max,
        MAX_SOLVER_ITERATIONS,
    );
    if let Some(e) = failure {
        return Err(e.into());
    }
    let (u, residual) = result.map_err(|nc| MachineError::SolverFailure {
        id: machine.id.clone(),
        lo: nc.lo,
        hi: nc.hi,
        iterations: nc.iterations,
    })?;
    if !(residual.abs() <= FORCE_TOLERANCE * force_scale) {
        return Err(MachineError::SolverFailure {
            id: machine.id.clone(),
            lo: u,
            hi: u,
            iterations: MAX_SOLVER_ITERATIONS,
        });
    }
    state_at(machine, u)
}

/// Populate every state field from a junction displacement.
pub fn state_at(machine: &Machine, u: f64) -> Result<EquilibriumState, MachineError> {
    let eps_al = machine.specimen_strain_at(u);
    let sigma_al = machine.specimen.material.stress_at_strain(eps_al)?;
    let eps_ac = machine.actuator_strain_at(u);
    let sigma_ac = machine.actuator.youngs_modulus * eps_ac;
    Ok(EquilibriumState {
        junction_displacement: u,
        specimen_log_strain: eps_al,
        specimen_stress: sigma_al,
        actuator_elastic_strain: eps_ac,
        actuator_stress: sigma_ac,
        force_residual: sigma_ac * machine.actuator.beam.cross_section()
            - sigma_al * machine.specimen.beam.cross_section(),
    })
}

/// SEM-style readout of a solved machine with Gaussian noise of standard
/// deviation `noise_sd` (m) on each displacement. Deterministic in `seed`.
pub fn synthesize_measurement(
    machine: &Machine,
    state: &EquilibriumState,
    noise_sd: f64,
    seed: u64,
) -> MeasurementRecord {
    let u = state.junction_displacement;
    let mut dl_al = free_contraction(&machine.specimen.beam, machine.specimen.alpha_dt_al) - u;
    let mut dl_ac = u;
    if noise_sd > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise_sd).expect("finite positive sd");
        dl_al += normal.sample(&mut rng);
        dl_ac += normal.sample(&mut rng);
    }
    MeasurementRecord {
        machine_id: machine.id.clone(),
        dl_al,
        dl_ac,
        noise_seed: Some(seed),
    }
}
