//! One-dimensional monotone constitutive laws for the tested film.
//!
//! Strains are logarithmic and tensile only; a negative strain is outside the
//! domain of every law. Stresses are in pascals.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance on the power-law branch mismatch at yield.
pub const BRANCH_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstitutiveError {
    #[error("strain {0} is outside the tensile domain (must be finite and >= 0)")]
    Domain(f64),
    #[error("invalid material model: {0}")]
    InvalidModel(String),
}

/// Post-yield behaviour of a [`MaterialModel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HardeningLaw {
    LinearElastic,
    PerfectlyPlastic {
        yield_strength: f64,
    },
    /// `sigma = coefficient * eps^exponent` above the yield strain.
    PowerLaw {
        yield_strength: f64,
        coefficient: f64,
        exponent: f64,
    },
}

/// Uniaxial law of a film: linear elastic up to yield, then the declared
/// hardening branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MaterialRecord", into = "MaterialRecord")]
pub struct MaterialModel {
    youngs_modulus: f64,
    law: HardeningLaw,
    label: String,
}

impl MaterialModel {
    pub fn linear_elastic(youngs_modulus: f64) -> Result<Self, ConstitutiveError> {
        Self::new(youngs_modulus, HardeningLaw::LinearElastic)
    }

    pub fn perfectly_plastic(
        youngs_modulus: f64,
        yield_strength: f64,
    ) -> Result<Self, ConstitutiveError> {
        Self::new(
            youngs_modulus,
            HardeningLaw::PerfectlyPlastic { yield_strength },
        )
    }

    /// Elastic–power-law model. When `coefficient` is `None` it is fixed by
    /// continuity at yield, `K = sigma_y / (sigma_y / E)^n`; an explicit value
    /// must agree with that within [`BRANCH_TOLERANCE`]` * sigma_y`.
    pub fn power_law(
        youngs_modulus: f64,
        yield_strength: f64,
        exponent: f64,
        coefficient: Option<f64>,
    ) -> Result<Self, ConstitutiveError> {
        if !(yield_strength.is_finite() && yield_strength > 0.0) {
            return Err(ConstitutiveError::InvalidModel(format!(
                "yield strength must be > 0, got {yield_strength}"
            )));
        }
        if !(youngs_modulus.is_finite() && youngs_modulus > 0.0) {
            return Err(ConstitutiveError::InvalidModel(format!(
                "Young's modulus must be > 0, got {youngs_modulus}"
            )));
        }
        let continuous = yield_strength / (yield_strength / youngs_modulus).powf(exponent);
        Self::new(
            youngs_modulus,
            HardeningLaw::PowerLaw {
                yield_strength,
                coefficient: coefficient.unwrap_or(continuous),
                exponent,
            },
        )
    }

    pub fn new(youngs_modulus: f64, law: HardeningLaw) -> Result<Self, ConstitutiveError> {
        let model = Self {
            youngs_modulus,
            law,
            label: String::new(),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn youngs_modulus(&self) -> f64 {
        self.youngs_modulus
    }

    pub fn law(&self) -> HardeningLaw {
        self.law
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn yield_strength(&self) -> Option<f64> {
        match self.law {
            HardeningLaw::LinearElastic => None,
            HardeningLaw::PerfectlyPlastic { yield_strength }
            | HardeningLaw::PowerLaw { yield_strength, .. } => Some(yield_strength),
        }
    }

    /// Strain at which the elastic branch ends, `sigma_y / E`.
    pub fn yield_strain(&self) -> Option<f64> {
        self.yield_strength().map(|sy| sy / self.youngs_modulus)
    }

    fn validate(&self) -> Result<(), ConstitutiveError> {
        let invalid = |msg: String| Err(ConstitutiveError::InvalidModel(msg));
        if !(self.youngs_modulus.is_finite() && self.youngs_modulus > 0.0) {
            return invalid(format!(
                "Young's modulus must be > 0, got {}",
                self.youngs_modulus
            ));
        }
        if let Some(sy) = self.yield_strength() {
            if !(sy.is_finite() && sy > 0.0) {
                return invalid(format!("yield strength must be > 0, got {sy}"));
            }
        }
        if let HardeningLaw::PowerLaw {
            yield_strength,
            coefficient,
            exponent,
        } = self.law
        {
            if !(exponent > 0.0 && exponent < 1.0) {
                return invalid(format!("hardening exponent must be in (0, 1), got {exponent}"));
            }
            if !(coefficient.is_finite() && coefficient > 0.0) {
                return invalid(format!("hardening coefficient must be > 0, got {coefficient}"));
            }
            let ey = yield_strength / self.youngs_modulus;
            let mismatch = (coefficient * ey.powf(exponent) - yield_strength).abs();
            if mismatch > BRANCH_TOLERANCE * yield_strength {
                return invalid(format!(
                    "power-law branch misses the yield point by {mismatch:e} Pa"
                ));
            }
        }
        Ok(())
    }

    /// Uniaxial stress at logarithmic strain `strain`.
    pub fn stress_at_strain(&self, strain: f64) -> Result<f64, ConstitutiveError> {
        check_domain(strain)?;
        let e = self.youngs_modulus;
        Ok(match self.law {
            HardeningLaw::LinearElastic => e * strain,
            HardeningLaw::PerfectlyPlastic { yield_strength } => {
                if strain < yield_strength / e {
                    (e * strain).min(yield_strength)
                } else {
                    yield_strength
                }
            }
            HardeningLaw::PowerLaw {
                yield_strength,
                coefficient,
                exponent,
            } => {
                if strain < yield_strength / e {
                    (e * strain).min(yield_strength)
                } else {
                    // clamp keeps the curve monotone across rounding at the kink
                    (coefficient * strain.powf(exponent)).max(yield_strength)
                }
            }
        })
    }

    /// Derivative of [`stress_at_strain`](Self::stress_at_strain); at the kink
    /// the plastic-branch slope is returned.
    pub fn tangent_modulus(&self, strain: f64) -> Result<f64, ConstitutiveError> {
        check_domain(strain)?;
        let e = self.youngs_modulus;
        Ok(match self.law {
            HardeningLaw::LinearElastic => e,
            HardeningLaw::PerfectlyPlastic { yield_strength } => {
                if strain < yield_strength / e {
                    e
                } else {
                    0.0
                }
            }
            HardeningLaw::PowerLaw {
                yield_strength,
                coefficient,
                exponent,
            } => {
                if strain < yield_strength / e {
                    e
                } else {
                    exponent * coefficient * strain.powf(exponent - 1.0)
                }
            }
        })
    }
}

fn check_domain(strain: f64) -> Result<(), ConstitutiveError> {
    if strain.is_finite() && strain >= 0.0 {
        Ok(())
    } else {
        Err(ConstitutiveError::Domain(strain))
    }
}

/// Config/file representation, e.g.
/// `{ "E": 7.0e10, "law": "perfectly-plastic", "sigma_y": 4.0e8 }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialRecord {
    #[serde(rename = "E")]
    pub youngs_modulus: f64,
    pub law: LawName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<f64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawName {
    LinearElastic,
    PerfectlyPlastic,
    PowerLaw,
}

impl TryFrom<MaterialRecord> for MaterialModel {
    type Error = ConstitutiveError;

    fn try_from(rec: MaterialRecord) -> Result<Self, Self::Error> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| {
                ConstitutiveError::InvalidModel(format!("law {:?} requires `{name}`", rec.law))
            })
        };
        let model = match rec.law {
            LawName::LinearElastic => MaterialModel::linear_elastic(rec.youngs_modulus)?,
            LawName::PerfectlyPlastic => {
                MaterialModel::perfectly_plastic(rec.youngs_modulus, need(rec.sigma_y, "sigma_y")?)?
            }
            LawName::PowerLaw => MaterialModel::power_law(
                rec.youngs_modulus,
                need(rec.sigma_y, "sigma_y")?,
                need(rec.n, "n")?,
                rec.coefficient,
            )?,
        };
        Ok(model.with_label(rec.label))
    }
}

impl From<MaterialModel> for MaterialRecord {
    fn from(m: MaterialModel) -> Self {
        let (law, sigma_y, n, coefficient) = match m.law {
            HardeningLaw::LinearElastic => (LawName::LinearElastic, None, None, None),
            HardeningLaw::PerfectlyPlastic { yield_strength } => {
                (LawName::PerfectlyPlastic, Some(yield_strength), None, None)
            }
            HardeningLaw::PowerLaw {
                yield_strength,
                coefficient,
                exponent,
            } => (
                LawName::PowerLaw,
                Some(yield_strength),
                Some(exponent),
                Some(coefficient),
            ),
        };
        MaterialRecord {
            youngs_modulus: m.youngs_modulus,
            law,
            sigma_y,
            n,
            coefficient,
            label: m.label,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const E_AL: f64 = 70e9;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn power_220() -> MaterialModel {
        MaterialModel::power_law(E_AL, 220e6, 0.1, None).unwrap()
    }

    fn central_difference(m: &MaterialModel, eps: f64, h: f64) -> f64 {
        (m.stress_at_strain(eps + h).unwrap() - m.stress_at_strain(eps - h).unwrap()) / (2.0 * h)
    }

    #[test]
    fn linear_elastic_product() {
        let m = MaterialModel::linear_elastic(E_AL).unwrap();
        assert!(rel(m.stress_at_strain(0.001).unwrap(), 70e6) < 1e-15);
        assert_eq!(m.tangent_modulus(0.3).unwrap(), E_AL);
    }

    #[test]
    fn perfectly_plastic_plateau() {
        let m = MaterialModel::perfectly_plastic(E_AL, 400e6).unwrap();
        assert_eq!(m.stress_at_strain(0.02).unwrap(), 400e6);
        assert_eq!(m.tangent_modulus(0.02).unwrap(), 0.0);
        assert_eq!(m.stress_at_strain(m.yield_strain().unwrap()).unwrap(), 400e6);
    }

    #[test]
    fn power_law_values_pinned() {
        // K = 220e6 / (220e6 / 70e9)^0.1 evaluated independently in double precision
        let m = power_220();
        match m.law() {
            HardeningLaw::PowerLaw { coefficient, .. } => {
                assert!(rel(coefficient, 391_462_546.356_110_63) < 1e-12)
            }
            _ => unreachable!(),
        }
        assert!(rel(m.stress_at_strain(0.01).unwrap(), 246_996_168.712_306_1) < 1e-12);
        assert!(rel(m.tangent_modulus(0.01).unwrap(), 2_469_961_687.123_061) < 1e-12);
    }

    #[test]
    fn power_law_tangent_matches_finite_difference() {
        let m = power_220();
        let fd = central_difference(&m, 0.01, 1e-8);
        assert!(rel(m.tangent_modulus(0.01).unwrap(), fd) < 1e-5);
    }

    #[test]
    fn explicit_coefficient_checked_for_continuity() {
        let good = power_220();
        let k = match good.law() {
            HardeningLaw::PowerLaw { coefficient, .. } => coefficient,
            _ => unreachable!(),
        };
        assert!(MaterialModel::power_law(E_AL, 220e6, 0.1, Some(k)).is_ok());
        let err = MaterialModel::power_law(E_AL, 220e6, 0.1, Some(k * 1.001)).unwrap_err();
        assert!(matches!(err, ConstitutiveError::InvalidModel(_)));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(MaterialModel::linear_elastic(0.0).is_err());
        assert!(MaterialModel::perfectly_plastic(E_AL, -1.0).is_err());
        assert!(MaterialModel::power_law(E_AL, 220e6, 1.0, None).is_err());
        assert!(MaterialModel::power_law(E_AL, 220e6, 0.0, None).is_err());
    }

    #[test]
    fn negative_strain_is_domain_error() {
        let m = MaterialModel::perfectly_plastic(E_AL, 400e6).unwrap();
        assert_eq!(
            m.stress_at_strain(-1e-6),
            Err(ConstitutiveError::Domain(-1e-6))
        );
        assert!(m.tangent_modulus(-1e-6).is_err());
        assert!(m.stress_at_strain(f64::NAN).is_err());
    }

    #[test]
    fn kink_returns_plastic_slope() {
        let m = power_220();
        let ey = m.yield_strain().unwrap();
        assert!(rel(m.tangent_modulus(ey).unwrap(), 0.1 * E_AL) < 1e-9);
    }

    #[test]
    fn record_round_trip() {
        let json = r#"{ "E": 7.0e10, "law": "perfectly-plastic", "sigma_y": 4.0e8 }"#;
        let m: MaterialModel = serde_json::from_str(json).unwrap();
        assert_eq!(m.yield_strength(), Some(4.0e8));
        let back: MaterialModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        let missing = r#"{ "E": 7.0e10, "law": "power-law", "sigma_y": 4.0e8 }"#;
        assert!(serde_json::from_str::<MaterialModel>(missing).is_err());
    }

    fn any_model() -> impl Strategy<Value = MaterialModel> {
        (1e10..3e11f64, 1e7..1e9f64, 0.01..0.99f64, 0..3u8).prop_map(|(e, sy, n, kind)| match kind {
            0 => MaterialModel::linear_elastic(e).unwrap(),
            1 => MaterialModel::perfectly_plastic(e, sy).unwrap(),
            _ => MaterialModel::power_law(e, sy, n, None).unwrap(),
        })
    }

    proptest! {
        #[test]
        fn stress_is_monotone(m in any_model(), a in 0.0..0.2f64, b in 0.0..0.2f64) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(m.stress_at_strain(hi).unwrap() >= m.stress_at_strain(lo).unwrap());
        }

        #[test]
        fn continuous_at_yield(m in any_model()) {
            if let (Some(ey), Some(sy)) = (m.yield_strain(), m.yield_strength()) {
                let d = 1e-12;
                let jump = (m.stress_at_strain(ey + d).unwrap() - m.stress_at_strain(ey - d).unwrap()).abs();
                prop_assert!(jump <= 1e-6 * sy, "jump {jump}");
                prop_assert!(((m.stress_at_strain(ey).unwrap() - sy) / sy).abs() <= 1e-12);
            }
        }

        #[test]
        fn tangent_matches_central_difference(m in any_model(), frac in 0.05..0.9f64, over in 1.2..20.0f64) {
            let ey = m.yield_strain().unwrap_or(1e-3);
            for eps in [frac * ey, over * ey] {
                let h = 1e-6 * eps;
                let fd = central_difference(&m, eps, h);
                let t = m.tangent_modulus(eps).unwrap();
                if t == 0.0 {
                    prop_assert!(fd.abs() <= 1e-5 * m.youngs_modulus());
                } else {
                    prop_assert!(((t - fd) / t).abs() <= 1e-5, "t={t} fd={fd}");
                }
            }
        }
    }
}
