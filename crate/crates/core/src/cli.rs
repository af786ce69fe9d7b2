//! Command-line surface: `design | simulate | reduce | fit | report`.
//!
//! Exit codes: 0 success, 2 usage/config/input error, 3 solver or fit failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{
    compare_thicknesses, default_plastic_threshold, design_campaign, fit_hardening_with,
    fit_yield_with, CompareError, DesignError,
};
use crate::io::{
    read_json, read_measurements, read_points, write_json, write_measurements, write_points,
    CampaignConfig, CampaignPlan, FitDocument, IoError, OutputNames,
};
use crate::machine::{solve_equilibrium, synthesize_measurement, Machine, MachineError};
use crate::plot::{stress_strain_svg, Series};
use crate::reduction::{reduce_campaign, ReductionError, StressStrainPoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "microtensile", version, about = "Design, simulate and reduce on-chip tensile micromachine campaigns")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Campaign config (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Output directory; also where inputs are looked up by default
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Choose actuator lengths for the configured target strains
    Design {
        #[command(flatten)]
        common: Common,
    },
    /// Solve every machine and write synthetic displacement measurements
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        machines: Option<PathBuf>,
        /// Overrides the config seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Reduce measurements to stress–strain points
    Reduce {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        machines: Option<PathBuf>,
        #[arg(long)]
        measurements: Option<PathBuf>,
        /// Fail on any malformed row or failed reduction
        #[arg(long)]
        strict: bool,
    },
    /// Extract yield strength (and optionally hardening) from points
    Fit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Compare fits across film thicknesses and plot the curves
    Report {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Fit documents written by `fit`
        #[arg(required = true)]
        fits: Vec<PathBuf>,
    },
}

/// A failed invocation: message for stderr plus the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn failure(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: message.into(),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<MachineError> for CliError {
    fn from(e: MachineError) -> Self {
        match e {
            MachineError::InvalidGeometry(_) | MachineError::NoActuation(_) => CliError::usage(e.to_string()),
            _ => CliError::failure(e.to_string()),
        }
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Design { common } => design(&common),
        Command::Simulate {
            common,
            machines,
            seed,
        } => simulate(&common, machines, seed),
        Command::Reduce {
            common,
            machines,
            measurements,
            strict,
        } => reduce(&common, machines, measurements, strict),
        Command::Fit { common, points } => fit(&common, points),
        Command::Report { config, out, fits } => report(config.as_deref(), &out, &fits),
    }
}

fn prepare(common: &Common) -> Result<CampaignConfig, CliError> {
    let cfg = CampaignConfig::from_path(&common.config)?;
    std::fs::create_dir_all(&common.out).map_err(|e| IoError::file(&common.out, e))?;
    Ok(cfg)
}

fn input(explicit: Option<PathBuf>, out: &Path, name: &str) -> PathBuf {
    explicit.unwrap_or_else(|| out.join(name))
}

fn design(common: &Common) -> Result<(), CliError> {
    let cfg = prepare(common)?;
    let (machines, predicted) = match cfg.plan()? {
        CampaignPlan::Design {
            targets,
            length_bounds,
        } => {
            let actuator = cfg.actuator_template()?;
            let specimen = cfg.specimen_template()?;
            match design_campaign(&actuator, &specimen, &targets, length_bounds) {
                Ok(d) => (d.machines, d.predicted_points),
                Err(DesignError::Infeasible(list)) => {
                    for item in &list {
                        eprintln!("infeasible: {item}");
                    }
                    return Err(CliError::usage(format!("{} target(s) infeasible", list.len())));
                }
                Err(DesignError::Machine(e)) => return Err(e.into()),
                Err(e) => return Err(CliError::usage(e.to_string())),
            }
        }
        CampaignPlan::Explicit(machines) => {
            let mut predicted = Vec::with_capacity(machines.len());
            for m in &machines {
                let s = solve_equilibrium(m)?;
                predicted.push(StressStrainPoint {
                    machine_id: m.id.clone(),
                    strain: s.specimen_log_strain,
                    stress: s.specimen_stress,
                });
            }
            (machines, predicted)
        }
    };
    write_json(&common.out.join(&cfg.outputs.machines), &machines)?;
    write_points(&common.out.join(&cfg.outputs.predicted), &predicted)?;
    println!("designed {} machines", machines.len());
    Ok(())
}

fn simulate(common: &Common, machines: Option<PathBuf>, seed: Option<u64>) -> Result<(), CliError> {
    let cfg = prepare(common)?;
    let machines: Vec<Machine> = read_json(&input(machines, &common.out, &cfg.outputs.machines))?;
    let seed = seed.unwrap_or(cfg.seed);
    let mut records = Vec::with_capacity(machines.len());
    for (i, m) in machines.iter().enumerate() {
        let state = solve_equilibrium(m)?;
        records.push(synthesize_measurement(m, &state, cfg.noise_sd, seed.wrapping_add(i as u64)));
    }
    write_measurements(&common.out.join(&cfg.outputs.measurements), &records)?;
    println!("simulated {} measurements (noise sd {:e} m, seed {seed})", records.len(), cfg.noise_sd);
    Ok(())
}

fn reduce(
    common: &Common,
    machines: Option<PathBuf>,
    measurements: Option<PathBuf>,
    strict: bool,
) -> Result<(), CliError> {
    let cfg = prepare(common)?;
    let machines: Vec<Machine> = read_json(&input(machines, &common.out, &cfg.outputs.machines))?;
    let path = input(measurements, &common.out, &cfg.outputs.measurements);
    let parsed = read_measurements(&path)?;
    for bad in &parsed.malformed {
        eprintln!("{}: malformed row, {bad}", path.display());
    }
    if strict && !parsed.malformed.is_empty() {
        return Err(CliError::usage(format!(
            "{} malformed row(s) in {} (--strict)",
            parsed.malformed.len(),
            path.display()
        )));
    }
    let cal = cfg.calibration()?;
    let out = reduce_campaign(&parsed.rows, &machines, &cal).map_err(|e| match e {
        ReductionError::UnknownMachine(_) | ReductionError::Calibration(_) => CliError::usage(e.to_string()),
        _ => CliError::failure(e.to_string()),
    })?;
    for f in &out.failures {
        eprintln!("machine {}: reduction failed, {}", f.machine_id, f.reason);
    }
    if strict && !out.failures.is_empty() {
        return Err(CliError::failure(format!(
            "{} record(s) failed reduction (--strict)",
            out.failures.len()
        )));
    }
    write_points(&common.out.join(&cfg.outputs.points), &out.points)?;
    println!(
        "reduced {} points ({} malformed rows, {} failed records)",
        out.points.len(),
        parsed.malformed.len(),
        out.failures.len()
    );
    Ok(())
}

fn fit(common: &Common, points: Option<PathBuf>) -> Result<(), CliError> {
    let cfg = prepare(common)?;
    let path = input(points, &common.out, &cfg.outputs.points);
    let parsed = read_points(&path)?;
    for bad in &parsed.malformed {
        eprintln!("{}: malformed row, {bad}", path.display());
    }
    let material = cfg.specimen_material()?;
    let e = material.youngs_modulus();
    let threshold = cfg
        .fit
        .plastic_threshold
        .unwrap_or_else(|| default_plastic_threshold(&parsed.rows, e, cfg.fit.yield_guess));
    let yield_fit = fit_yield_with(&parsed.rows, e, threshold, cfg.fit.yield_definition)
        .map_err(|err| CliError::failure(format!("yield fit: {err}")))?;
    let hardening = if cfg.fit.hardening {
        Some(
            fit_hardening_with(&parsed.rows, e, threshold)
                .map_err(|err| CliError::failure(format!("hardening fit: {err}")))?,
        )
    } else {
        None
    };
    let label = if material.label().is_empty() {
        cfg.specimen.material.clone()
    } else {
        material.label().to_string()
    };
    println!(
        "{label}: yield strength {:.3} MPa from {} points (rms {:.3} MPa)",
        yield_fit.yield_strength * 1e-6,
        yield_fit.points_used,
        yield_fit.residual_rms * 1e-6
    );
    let doc = FitDocument {
        label,
        material: cfg.specimen.material.clone(),
        thickness: cfg.specimen.thickness,
        plastic_threshold: threshold,
        yield_fit,
        hardening,
        points: parsed.rows,
    };
    write_json(&common.out.join(&cfg.outputs.fit), &doc)?;
    Ok(())
}

fn report(config: Option<&Path>, out: &Path, fits: &[PathBuf]) -> Result<(), CliError> {
    let names = match config {
        Some(p) => CampaignConfig::from_path(p)?.outputs,
        None => OutputNames::default(),
    };
    std::fs::create_dir_all(out).map_err(|e| IoError::file(out, e))?;
    let docs: Vec<FitDocument> = fits.iter().map(|p| read_json(p)).collect::<Result<_, _>>()?;
    let entries: Vec<_> = docs.iter().map(|d| (d.thickness, d.yield_fit.clone())).collect();
    let comparison = compare_thicknesses(&entries).map_err(|e| match e {
        CompareError::TooFew(_) | CompareError::Duplicate(_) | CompareError::InvalidThickness(_) => {
            CliError::usage(e.to_string())
        }
    })?;

    let mut text = comparison.to_table();
    for d in &docs {
        writeln!(
            text,
            "{}: {:.1} nm, yield {:.3} MPa, {} plastic points, rms {:.3} MPa",
            d.label,
            d.thickness * 1e9,
            d.yield_fit.yield_strength * 1e-6,
            d.yield_fit.points_used,
            d.yield_fit.residual_rms * 1e-6
        )
        .unwrap();
    }
    print!("{text}");
    std::fs::write(out.join(&names.report), &text).map_err(|e| IoError::file(&out.join(&names.report), e))?;
    write_json(&out.join(&names.report_json), &comparison)?;

    let series: Vec<Series<'_>> = docs
        .iter()
        .map(|d| Series {
            label: &d.label,
            points: &d.points,
            fit: Some(&d.yield_fit),
        })
        .collect();
    let plot = out.join(&names.plot);
    std::fs::write(&plot, stress_strain_svg(&series)).map_err(|e| IoError::file(&plot, e))?;
    Ok(())
}
