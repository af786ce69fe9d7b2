//! Design, forward simulation and data reduction for on-chip tensile
//! micromachines driven by the built-in stress of an actuator beam.
//!
//! The pipeline runs: [`analysis::design_campaign`] picks actuator lengths,
//! [`machine::solve_equilibrium`] and [`machine::synthesize_measurement`]
//! produce displacement readouts, [`reduction::reduce_campaign`] turns them
//! into stress–strain points and [`analysis::fit_yield`] extracts the yield
//! strength.

pub mod analysis;
pub mod cli;
pub mod constitutive;
pub mod io;
pub mod machine;
pub mod plot;
pub mod reduction;
pub mod roots;
