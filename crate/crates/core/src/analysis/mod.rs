//! Campaign design and material-parameter extraction from reduced points.

mod compare;
mod design;
mod fit;

pub use compare::{compare_thicknesses, CompareError, ThicknessComparison, ThicknessRow};
pub use design::{design_campaign, CampaignDesign, DesignError, Infeasibility, DESIGN_TOLERANCE};
pub use fit::{
    default_plastic_threshold, fit_hardening, fit_hardening_with, fit_yield, fit_yield_with,
    FitError, FitResult, PlasticLine, YieldDefinition, PLATEAU_EXPONENT,
};
