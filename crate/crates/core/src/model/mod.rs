//! Euler-equation models: calibrated constants, coefficient maps `b(θ)` and
//! the moment system built from a panel.

mod coefficients;
mod constants;
mod design;
pub mod literature;

pub use coefficients::{
    cac_coefficients, iac_coefficients, map_structural_to_semi, semi_coefficients, CACParams,
    Model, ModelKind, SemiStructuralParams, StructuralParams,
};
pub use constants::CalibratedConstants;
pub use design::{
    build_design, residuals_and_moments, write_design_csv, InstrumentSpec, InstrumentTerm,
    MomentSystem, Regressor, ResidualSpec, Var,
};
