use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::{solve_equilibrium, ActuatorSpec, BeamSpec, Machine, MachineError, SpecimenSpec};
use crate::reduction::StressStrainPoint;
use crate::roots;

/// Relative agreement required between a designed machine's predicted
/// strain and its target.
pub const DESIGN_TOLERANCE: f64 = 1e-4;

const LENGTH_REL_TOL: f64 = 1e-13;
const MAX_BISECTIONS: usize = 200;

/// A target that no actuator length within the bounds can reach.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Infeasibility {
    pub target: f64,
    pub achievable_min: f64,
    pub achievable_max: f64,
}

impl std::fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "target strain {:e} unreachable; achievable range is [{:e}, {:e}] (max strain {:e})",
            self.target, self.achievable_min, self.achievable_max, self.achievable_max
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error("no targets")]
    NoTargets,
    #[error("invalid targets: {0}")]
    InvalidTargets(String),
    #[error("invalid length bounds: {0}")]
    InvalidBounds(String),
    #[error("{} infeasible target(s): {}", .0.len(), .0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; "))]
    Infeasible(Vec<Infeasibility>),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignDesign {
    pub machines: Vec<Machine>,
    pub predicted_points: Vec<StressStrainPoint>,
    pub target_strains: Vec<f64>,
}

fn with_actuator_length(
    actuator: &ActuatorSpec,
    specimen: &SpecimenSpec,
    id: String,
    length: f64,
) -> Machine {
    Machine {
        id,
        actuator: ActuatorSpec {
            beam: BeamSpec {
                deposited_length: length,
                ..actuator.beam
            },
            ..*actuator
        },
        specimen: specimen.clone(),
    }
}

/// Choose one actuator length per target strain, specimen held fixed.
///
/// Equilibrium strain is non-decreasing in actuator length, so each target is
/// bracketed by the strains at the two bounds and located by bisection. A
/// zero target is the degenerate lower boundary and is assigned the shortest
/// allowed actuator. Machines are named `m000`, `m001`, ... in target order.
pub fn design_campaign(
    actuator_template: &ActuatorSpec,
    specimen_template: &SpecimenSpec,
    target_strains: &[f64],
    length_bounds: (f64, f64),
) -> Result<CampaignDesign, DesignError> {
    if target_strains.is_empty() {
        return Err(DesignError::NoTargets);
    }
    if target_strains.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(DesignError::InvalidTargets("targets must be finite and >= 0".into()));
    }
    if target_strains.windows(2).any(|w| w[1] < w[0]) {
        return Err(DesignError::InvalidTargets("targets must be sorted ascending".into()));
    }
    let (l_min, l_max) = length_bounds;
    if !(l_min > 0.0 && l_max > l_min && l_max.is_finite()) {
        return Err(DesignError::InvalidBounds(format!(
            "need 0 < min < max, got ({l_min}, {l_max})"
        )));
    }

    let probe = |length: f64| {
        let m = with_actuator_length(actuator_template, specimen_template, "probe".into(), length);
        solve_equilibrium(&m).map(|s| s.specimen_log_strain)
    };
    let eps_lo = probe(l_min)?;
    let eps_hi = probe(l_max)?;
    // the free-actuator bound on specimen strain
    let upper_bound = actuator_template.alpha_dt_ac * l_max
        / specimen_template.beam.deposited_length;

    let infeasible: Vec<Infeasibility> = target_strains
        .iter()
        .filter(|&&t| t > 0.0 && (t < eps_lo || t > eps_hi || t >= upper_bound))
        .map(|&t| Infeasibility {
            target: t,
            achievable_min: eps_lo,
            achievable_max: eps_hi,
        })
        .collect();
    if !infeasible.is_empty() {
        return Err(DesignError::Infeasible(infeasible));
    }

    let mut machines = Vec::with_capacity(target_strains.len());
    let mut predicted_points = Vec::with_capacity(target_strains.len());
    for (i, &target) in target_strains.iter().enumerate() {
        let length = if target == 0.0 {
            l_min
        } else {
            let mut failure = None;
            let found = roots::bisect_monotone(
                |l| {
                    probe(l).unwrap_or_else(|e| {
                        failure.get_or_insert(e);
                        f64::NAN
                    })
                },
                target,
                l_min,
                l_max,
                LENGTH_REL_TOL,
                MAX_BISECTIONS,
            );
            if let Some(e) = failure {
                return Err(e.into());
            }
            found.unwrap_or(l_max)
        };
        let machine = with_actuator_length(
            actuator_template,
            specimen_template,
            format!("m{i:03}"),
            length,
        );
        let state = solve_equilibrium(&machine)?;
        if target > 0.0 && ((state.specimen_log_strain - target) / target).abs() > DESIGN_TOLERANCE {
            return Err(DesignError::Infeasible(vec![Infeasibility {
                target,
                achievable_min: eps_lo,
                achievable_max: eps_hi,
            }]));
        }
        predicted_points.push(StressStrainPoint {
            machine_id: machine.id.clone(),
            strain: state.specimen_log_strain,
            stress: state.specimen_stress,
        });
        machines.push(machine);
    }

    Ok(CampaignDesign {
        machines,
        predicted_points,
        target_strains: target_strains.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::MaterialModel;

    fn templates(material: MaterialModel) -> (ActuatorSpec, SpecimenSpec) {
        (
            ActuatorSpec {
                beam: BeamSpec::new(100e-6, 8e-6, 500e-9).unwrap(),
                youngs_modulus: 220e9,
                alpha_dt_ac: 4.5e-3,
            },
            SpecimenSpec {
                beam: BeamSpec::new(20e-6, 4e-6, 250e-9).unwrap(),
                material,
                alpha_dt_al: 3.2e-4,
            },
        )
    }

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn reproduces_targets_and_lengths_are_monotone() {
        let (ac, sp) = templates(MaterialModel::perfectly_plastic(70e9, 400e6).unwrap());
        let targets = linspace(0.0005, 0.012, 12);
        let d = design_campaign(&ac, &sp, &targets, (1e-6, 1e-3)).unwrap();
        assert_eq!(d.machines.len(), 12);
        for (m, &t) in d.machines.iter().zip(&targets) {
            let s = solve_equilibrium(m).unwrap();
            assert!(((s.specimen_log_strain - t) / t).abs() <= DESIGN_TOLERANCE);
        }
        let lengths: Vec<f64> = d.machines.iter().map(|m| m.actuator.beam.deposited_length).collect();
        assert!(lengths.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn elastic_length_matches_series_spring_inversion() {
        // Inverting the small-strain series-spring relation drops O(strain)
        // terms, so targets stay near 1e-6 here.
        let (ac, mut sp) = templates(MaterialModel::linear_elastic(70e9).unwrap());
        sp.alpha_dt_al = 0.0;
        for &target in &[5e-7, 1e-6, 2e-6] {
            let d = design_campaign(&ac, &sp, &[target], (1e-10, 1e-3)).unwrap();
            let got = d.machines[0].actuator.beam.deposited_length;
            let k_ratio = (70e9 * 1e-12) / (220e9 * 4e-12);
            let l_al = 20e-6;
            let u = target * l_al;
            let expected = u / (ac.alpha_dt_ac - k_ratio * u / l_al);
            assert!(((got - expected) / expected).abs() < 1e-4, "{got} vs {expected}");
        }
    }

    #[test]
    fn zero_target_uses_shortest_actuator() {
        let (ac, sp) = templates(MaterialModel::perfectly_plastic(70e9, 400e6).unwrap());
        let d = design_campaign(&ac, &sp, &[0.0, 0.001], (1e-6, 1e-3)).unwrap();
        assert_eq!(d.machines[0].actuator.beam.deposited_length, 1e-6);
        assert!(d.predicted_points[0].strain >= 0.0);
    }

    #[test]
    fn unreachable_target_names_range() {
        let (ac, sp) = templates(MaterialModel::perfectly_plastic(70e9, 400e6).unwrap());
        let err = design_campaign(&ac, &sp, &[0.001, 0.5], (1e-6, 1e-3)).unwrap_err();
        match &err {
            DesignError::Infeasible(v) => {
                assert_eq!(v.len(), 1);
                assert_eq!(v[0].target, 0.5);
                assert!(v[0].achievable_max < 0.5 && v[0].achievable_max > 0.1);
            }
            other => panic!("{other:?}"),
        }
        assert!(err.to_string().contains("max strain"));
    }

    #[test]
    fn argument_errors() {
        let (ac, sp) = templates(MaterialModel::perfectly_plastic(70e9, 400e6).unwrap());
        assert_eq!(design_campaign(&ac, &sp, &[], (1e-6, 1e-3)), Err(DesignError::NoTargets));
        assert!(matches!(
            design_campaign(&ac, &sp, &[0.002, 0.001], (1e-6, 1e-3)),
            Err(DesignError::InvalidTargets(_))
        ));
        assert!(matches!(
            design_campaign(&ac, &sp, &[0.001], (1e-3, 1e-6)),
            Err(DesignError::InvalidBounds(_))
        ));
    }
}
