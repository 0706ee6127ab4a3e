//! Numeric corroboration: leapfrog integration, conservation monitors,
//! variational-equation residuals, time-of-flight quadrature and Poincaré
//! sections. Nothing here feeds a verdict.

mod csvout;
mod integrator;
mod section;
mod tof;

pub use csvout::{section_csv, trajectory_csv};
pub use integrator::{
    integrate, integrate_with, observable_drift, params_digest, transit_time, ve_residual,
    DriftReport, IntegratorConfig, State, Trajectory,
};
pub use section::{poincare_section, SectionPoint, SectionResult, SectionSpec, SeedFailure};
pub use tof::time_of_flight;

use crate::critsys::CritError;

#[derive(Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error("escape detected at t = {t}: |u| exceeded the bound")]
    EscapeDetected {
        t: f64,
        state: State,
        partial: Option<Box<Trajectory>>,
    },
    #[error("non-finite state at t = {t}")]
    NonFinite {
        t: f64,
        partial: Option<Box<Trajectory>>,
    },
    #[error("invalid step: {0}")]
    InvalidStep(String),
    #[error("state has {got} degrees of freedom, system has {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("trajectory leaves the invariant plane (max offset {max_offset:e})")]
    OffManifold { max_offset: f64 },
    #[error("radicand vanishes inside the interval near u = {at}; split the arc there")]
    RadicandVanishes { at: f64 },
    #[error("endpoint u = {at} is a multiple zero of the radicand; the time of flight diverges")]
    NonSimpleTurningPoint { at: f64 },
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("seed {seed} has energy {energy}, expected {expected} within tolerance")]
    EnergyMismatch {
        seed: usize,
        energy: f64,
        expected: f64,
    },
    #[error("no crossing before t = {t_max}")]
    NoCrossing { t_max: f64 },
    #[error("invalid section: {0}")]
    InvalidSection(String),
    #[error(transparent)]
    Params(#[from] CritError),
    #[error("csv output: {0}")]
    Csv(String),
}
