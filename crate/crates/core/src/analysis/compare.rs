use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::FitResult;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompareError {
    #[error("comparison needs at least 2 thicknesses, got {0}")]
    TooFew(usize),
    #[error("invalid thickness {0}")]
    InvalidThickness(f64),
    #[error("thickness {0:e} m given twice")]
    Duplicate(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThicknessRow {
    pub thickness: f64,
    pub yield_strength: f64,
    /// Yield strength over that of the thickest film.
    pub ratio_to_thickest: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThicknessComparison {
    /// Sorted by thickness, thinnest first.
    pub rows: Vec<ThicknessRow>,
    /// Yield strength strictly decreases as films get thicker. An
    /// observation on the data, not a constraint.
    pub monotone_decreasing: bool,
}

impl ThicknessComparison {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{:>14}  {:>16}  {:>8}", "thickness_nm", "yield_MPa", "ratio").unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:>14.1}  {:>16.3}  {:>8.3}",
                r.thickness * 1e9,
                r.yield_strength * 1e-6,
                r.ratio_to_thickest
            )
            .unwrap();
        }
        writeln!(
            out,
            "yield strength monotone decreasing in thickness: {}",
            self.monotone_decreasing
        )
        .unwrap();
        out
    }
}

/// Tabulate yield strengths per film thickness (metres).
pub fn compare_thicknesses(fits: &[(f64, FitResult)]) -> Result<ThicknessComparison, CompareError> {
    if fits.len() < 2 {
        return Err(CompareError::TooFew(fits.len()));
    }
    let mut entries: Vec<(f64, f64)> = Vec::with_capacity(fits.len());
    for (t, fit) in fits {
        if !(t.is_finite() && *t > 0.0) {
            return Err(CompareError::InvalidThickness(*t));
        }
        entries.push((*t, fit.yield_strength));
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(CompareError::Duplicate(w[0].0));
    }
    let thickest = entries[entries.len() - 1].1;
    let rows = entries
        .iter()
        .map(|&(thickness, yield_strength)| ThicknessRow {
            thickness,
            yield_strength,
            ratio_to_thickest: yield_strength / thickest,
        })
        .collect();
    Ok(ThicknessComparison {
        rows,
        monotone_decreasing: entries.windows(2).all(|w| w[1].1 < w[0].1),
    })
}
