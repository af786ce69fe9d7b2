//! Yield strength by linear extrapolation of the plastic points back to the
//! elastic line, and elastic–power-law hardening fits.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constitutive::{HardeningLaw, MaterialModel};
use crate::reduction::StressStrainPoint;

/// Fitted exponents at or below this are reported as plateau-like.
pub const PLATEAU_EXPONENT: f64 = 0.05;

const EXPONENT_FLOOR: f64 = 1e-4;
const EXPONENT_CEIL: f64 = 0.999;
const GRID_STEP: f64 = 0.05;
const GOLDEN_ITERATIONS: usize = 200;
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("insufficient data: need at least {needed} plastic points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("non-identifiable: {0}")]
    NonIdentifiable(String),
    #[error("hardening fit did not converge (best exponent {:.6})", best_exponent(.0))]
    NonConvergence(Box<FitResult>),
}

fn best_exponent(best: &FitResult) -> f64 {
    match best.model_fit.as_ref().map(|m| m.law()) {
        Some(HardeningLaw::PowerLaw { exponent, .. }) => exponent,
        _ => f64::NAN,
    }
}

/// Least-squares line `stress = slope * strain + intercept` through the
/// plastic points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlasticLine {
    pub slope: f64,
    pub intercept: f64,
}

impl PlasticLine {
    pub fn at(&self, strain: f64) -> f64 {
        self.slope * strain + self.intercept
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub yield_strength: f64,
    pub elastic_modulus_used: f64,
    pub plastic_line: PlasticLine,
    pub residual_rms: f64,
    pub points_used: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_fit: Option<MaterialModel>,
    #[serde(default)]
    pub plateau_like: bool,
}

/// How the yield point is read off the plastic line.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum YieldDefinition {
    /// Intersection with `stress = E * strain`.
    #[default]
    Intersection,
    /// Intersection with `stress = E * (strain - offset)`, e.g. 0.002.
    Offset(f64),
}

/// `1.5 * guess / E` when a yield guess exists, else the strain of the
/// 60th-percentile point (lower-index convention on the sorted strains).
pub fn default_plastic_threshold(
    points: &[StressStrainPoint],
    elastic_modulus: f64,
    yield_guess: Option<f64>,
) -> f64 {
    if let Some(guess) = yield_guess {
        return 1.5 * guess / elastic_modulus;
    }
    let mut strains: Vec<f64> = points.iter().map(|p| p.strain).collect();
    if strains.is_empty() {
        return 0.0;
    }
    strains.sort_by(f64::total_cmp);
    strains[(0.6 * (strains.len() - 1) as f64).floor() as usize]
}

fn plastic_points(points: &[StressStrainPoint], threshold: f64) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.strain > threshold)
        .map(|p| (p.strain, p.stress))
        .collect();
    // order-independent summation
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts
}

/// Ordinary least squares on centred data; zero strain spread gives the
/// horizontal line through the mean stress.
fn least_squares_line(pts: &[(f64, f64)]) -> PlasticLine {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    PlasticLine {
        slope,
        intercept: my - slope * mx,
    }
}

fn rms<I: Iterator<Item = f64>>(residuals: I, n: usize) -> f64 {
    (residuals.map(|r| r * r).sum::<f64>() / n as f64).sqrt()
}

pub fn fit_yield(
    points: &[StressStrainPoint],
    elastic_modulus: f64,
    plastic_threshold: f64,
) -> Result<FitResult, FitError> {
    fit_yield_with(points, elastic_modulus, plastic_threshold, YieldDefinition::Intersection)
}

/// Fit a line through the points with strain above `plastic_threshold` and
/// intersect it with the elastic line.
pub fn fit_yield_with(
    points: &[StressStrainPoint],
    elastic_modulus: f64,
    plastic_threshold: f64,
    definition: YieldDefinition,
) -> Result<FitResult, FitError> {
    if !(elastic_modulus.is_finite() && elastic_modulus > 0.0) {
        return Err(FitError::DegenerateFit(format!(
            "elastic modulus must be > 0, got {elastic_modulus}"
        )));
    }
    let pts = plastic_points(points, plastic_threshold);
    if pts.len() < 2 {
        return Err(FitError::InsufficientData {
            needed: 2,
            got: pts.len(),
        });
    }
    let line = least_squares_line(&pts);
    let e = elastic_modulus;
    let gap = e - line.slope;
    if gap.abs() <= 1e-12 * e {
        return Err(FitError::DegenerateFit(
            "plastic line is parallel to the elastic line".into(),
        ));
    }
    let offset = match definition {
        YieldDefinition::Intersection => 0.0,
        YieldDefinition::Offset(o) => o,
    };
    let strain_at_yield = (line.intercept + e * offset) / gap;
    let yield_strength = e * (strain_at_yield - offset);
    if !(yield_strength.is_finite() && yield_strength > 0.0) {
        return Err(FitError::DegenerateFit(format!(
            "extrapolated yield strength {yield_strength:e} Pa is not positive"
        )));
    }
    Ok(FitResult {
        yield_strength,
        elastic_modulus_used: e,
        plastic_line: line,
        residual_rms: rms(pts.iter().map(|&(x, y)| y - line.at(x)), pts.len()),
        points_used: pts.len(),
        model_fit: None,
        plateau_like: false,
    })
}

pub fn fit_hardening(
    points: &[StressStrainPoint],
    elastic_modulus: f64,
) -> Result<FitResult, FitError> {
    let threshold = default_plastic_threshold(points, elastic_modulus, None);
    fit_hardening_with(points, elastic_modulus, threshold)
}

/// Power-law coefficient minimising squared stress residuals at fixed `n`,
/// and the resulting objective.
fn profile(pts: &[(f64, f64)], n: f64) -> (f64, f64) {
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(eps, sig) in pts {
        let x = eps.powf(n);
        sxy += sig * x;
        sxx += x * x;
    }
    let k = sxy / sxx;
    let sse = pts.iter().map(|&(eps, sig)| (sig - k * eps.powf(n)).powi(2)).sum();
    (k, sse)
}

fn better(candidate: (f64, f64), best: (f64, f64)) -> bool {
    // (n, objective); smaller n wins ties
    let tie = TIE_TOLERANCE * best.1.abs().max(f64::MIN_POSITIVE);
    candidate.1 < best.1 - tie || ((candidate.1 - best.1).abs() <= tie && candidate.0 < best.0)
}

/// Elastic–power-law fit over the points above `plastic_threshold`:
/// grid search over `n` in {0.05, 0.10, ..., 0.50}, golden-section
/// refinement around the best grid node, closed-form `K` at every `n`.
pub fn fit_hardening_with(
    points: &[StressStrainPoint],
    elastic_modulus: f64,
    plastic_threshold: f64,
) -> Result<FitResult, FitError> {
    if !(elastic_modulus.is_finite() && elastic_modulus > 0.0) {
        return Err(FitError::DegenerateFit(format!(
            "elastic modulus must be > 0, got {elastic_modulus}"
        )));
    }
    let pts: Vec<(f64, f64)> = plastic_points(points, plastic_threshold.max(0.0));
    if pts.len() < 3 {
        return Err(FitError::InsufficientData {
            needed: 3,
            got: pts.len(),
        });
    }
    let (lo, hi) = (pts[0].0, pts[pts.len() - 1].0);
    if hi - lo <= 1e-12 * hi {
        return Err(FitError::NonIdentifiable(format!(
            "all plastic points sit at strain {hi:e}"
        )));
    }

    let mut best = (f64::INFINITY, f64::INFINITY);
    let mut best_node = 0.0;
    for i in 1..=10 {
        let n = GRID_STEP * i as f64;
        let cand = (n, profile(&pts, n).1);
        if better(cand, best) {
            best = cand;
            best_node = n;
        }
    }

    let (mut a, mut b) = (
        (best_node - GRID_STEP).max(EXPONENT_FLOOR),
        (best_node + GRID_STEP).min(EXPONENT_CEIL),
    );
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (profile(&pts, c).1, profile(&pts, d).1);
    for _ in 0..GOLDEN_ITERATIONS {
        if b - a <= 1e-12 {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = profile(&pts, c).1;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = profile(&pts, d).1;
        }
    }
    let n_refined = 0.5 * (a + b);
    let refined = (n_refined, profile(&pts, n_refined).1);
    if better(refined, best) {
        best = refined;
    }

    let (n, _) = best;
    let (k, sse) = profile(&pts, n);
    let line = least_squares_line(&pts);
    let e = elastic_modulus;
    // K = sigma_y^(1-n) E^n at continuity
    let yield_strength = (k / e.powf(n)).powf(1.0 / (1.0 - n));
    let model = MaterialModel::power_law(e, yield_strength, n, None);
    let residual_rms = (sse / pts.len() as f64).sqrt();

    match model {
        Ok(model) if yield_strength.is_finite() && residual_rms.is_finite() => Ok(FitResult {
            yield_strength,
            elastic_modulus_used: e,
            plastic_line: line,
            residual_rms,
            points_used: pts.len(),
            model_fit: Some(model),
            plateau_like: n <= PLATEAU_EXPONENT,
        }),
        _ => Err(FitError::NonConvergence(Box::new(FitResult {
            yield_strength,
            elastic_modulus_used: e,
            plastic_line: line,
            residual_rms,
            points_used: pts.len(),
            model_fit: MaterialModel::new(
                e,
                HardeningLaw::PowerLaw {
                    yield_strength: yield_strength.abs().max(f64::MIN_POSITIVE),
                    coefficient: k.abs().max(f64::MIN_POSITIVE),
                    exponent: n,
                },
            )
            .ok(),
            plateau_like: n <= PLATEAU_EXPONENT,
        }))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const E: f64 = 70e9;

    fn curve(model: &MaterialModel, strains: &[f64]) -> Vec<StressStrainPoint> {
        strains
            .iter()
            .enumerate()
            .map(|(i, &s)| StressStrainPoint {
                machine_id: format!("m{i}"),
                strain: s,
                stress: model.stress_at_strain(s).unwrap(),
            })
            .collect()
    }

    fn strains() -> Vec<f64> {
        (0..12).map(|i| 0.0005 + 0.0115 * i as f64 / 11.0).collect()
    }

    #[test]
    fn perfectly_plastic_yield_recovered() {
        for sy in [400e6, 220e6] {
            let m = MaterialModel::perfectly_plastic(E, sy).unwrap();
            let pts = curve(&m, &strains());
            let thr = default_plastic_threshold(&pts, E, Some(sy));
            let fit = fit_yield(&pts, E, thr).unwrap();
            assert!(((fit.yield_strength - sy) / sy).abs() < 1e-6);
            assert!(fit.plastic_line.slope.abs() < 1e-3);
            let pct = default_plastic_threshold(&pts, E, None);
            let fit = fit_yield(&pts, E, pct).unwrap();
            assert!(((fit.yield_strength - sy) / sy).abs() < 1e-6);
        }
    }

    #[test]
    fn two_identical_points_give_horizontal_line() {
        let p = StressStrainPoint {
            machine_id: "a".into(),
            strain: 0.01,
            stress: 300e6,
        };
        let fit = fit_yield(&[p.clone(), p], E, 0.005).unwrap();
        assert_eq!(fit.plastic_line.slope, 0.0);
        assert_eq!(fit.yield_strength, 300e6);
        assert_eq!(fit.points_used, 2);
    }

    #[test]
    fn yield_fit_errors() {
        let m = MaterialModel::perfectly_plastic(E, 400e6).unwrap();
        let pts = curve(&m, &strains());
        assert!(matches!(
            fit_yield(&pts, E, 0.0115),
            Err(FitError::InsufficientData { needed: 2, got: 1 })
        ));
        let elastic = curve(&MaterialModel::linear_elastic(E).unwrap(), &strains());
        assert!(matches!(fit_yield(&elastic, E, 0.0), Err(FitError::DegenerateFit(_))));
    }

    #[test]
    fn offset_yield_on_hardening_line() {
        let pts: Vec<StressStrainPoint> = [0.01, 0.02]
            .iter()
            .map(|&s| StressStrainPoint {
                machine_id: "x".into(),
                strain: s,
                stress: 300e6 + 1e9 * s,
            })
            .collect();
        let fit = fit_yield_with(&pts, E, 0.0, YieldDefinition::Offset(0.002)).unwrap();
        // solve 300e6 + 1e9 e = 70e9 (e - 0.002) by hand
        let e_y = (300e6 + 70e9 * 0.002) / (70e9 - 1e9);
        assert!((fit.yield_strength - (300e6 + 1e9 * e_y)).abs() < 1.0);
    }

    #[test]
    fn power_law_round_trip() {
        for (sy, n) in [(220e6, 0.1), (400e6, 0.27), (150e6, 0.45)] {
            let m = MaterialModel::power_law(E, sy, n, None).unwrap();
            let s: Vec<f64> = (0..15).map(|i| 0.002 + 0.0015 * i as f64).collect();
            let pts = curve(&m, &s);
            let fit = fit_hardening_with(&pts, E, 1.5 * sy / E).unwrap();
            let model = fit.model_fit.unwrap();
            match model.law() {
                HardeningLaw::PowerLaw { exponent, .. } => assert!(((exponent - n) / n).abs() < 1e-3),
                _ => unreachable!(),
            }
            assert!(((fit.yield_strength - sy) / sy).abs() < 1e-3);
            assert!(!fit.plateau_like);
        }
    }

    #[test]
    fn plateau_is_flagged() {
        let m = MaterialModel::perfectly_plastic(E, 400e6).unwrap();
        let fit = fit_hardening(&curve(&m, &strains()), E).unwrap();
        assert!(fit.plateau_like);
        match fit.model_fit.unwrap().law() {
            HardeningLaw::PowerLaw { exponent, .. } => assert!(exponent <= PLATEAU_EXPONENT),
            _ => unreachable!(),
        }
    }

    #[test]
    fn single_cluster_is_non_identifiable() {
        let pts: Vec<StressStrainPoint> = (0..5)
            .map(|i| StressStrainPoint {
                machine_id: format!("m{i}"),
                strain: 0.01,
                stress: 400e6 + i as f64,
            })
            .collect();
        assert!(matches!(
            fit_hardening_with(&pts, E, 0.005),
            Err(FitError::NonIdentifiable(_))
        ));
        assert!(matches!(
            fit_hardening_with(&pts[..2], E, 0.005),
            Err(FitError::InsufficientData { needed: 3, .. })
        ));
    }

    proptest! {
        #[test]
        fn yield_scales_with_stress(c in 0.1..10.0f64, sy in 100e6..500e6f64, slope in 0.0..5e9f64) {
            let pts: Vec<StressStrainPoint> = (0..8).map(|i| {
                let s = 0.01 + 0.001 * i as f64;
                StressStrainPoint { machine_id: format!("m{i}"), strain: s, stress: sy + slope * (s - 0.01) + 1e6 * ((i * 7 % 3) as f64 - 1.0) }
            }).collect();
            let base = fit_yield(&pts, E, 0.0).unwrap();
            let scaled_pts: Vec<StressStrainPoint> = pts.iter().map(|p| StressStrainPoint { stress: p.stress * c, ..p.clone() }).collect();
            let scaled = fit_yield(&scaled_pts, c * E, 0.0).unwrap();
            prop_assert!(((scaled.yield_strength - c * base.yield_strength) / (c * base.yield_strength)).abs() < 1e-12);
        }

        #[test]
        fn yield_invariant_to_order(seed in 0u64..1000) {
            let mut pts: Vec<StressStrainPoint> = (0..9).map(|i| StressStrainPoint {
                machine_id: format!("m{i}"),
                strain: 0.006 + 0.0007 * i as f64,
                stress: 380e6 + 2e9 * 0.0007 * i as f64 + 3e6 * ((i * 5 % 4) as f64 - 1.5),
            }).collect();
            let base = fit_yield(&pts, E, 0.0).unwrap();
            let len = pts.len();
            for i in 0..len {
                let j = ((seed as usize).wrapping_mul(31).wrapping_add(i * 17)) % len;
                pts.swap(i, j);
            }
            let shuffled = fit_yield(&pts, E, 0.0).unwrap();
            prop_assert_eq!(base.yield_strength, shuffled.yield_strength);
        }
    }
}
