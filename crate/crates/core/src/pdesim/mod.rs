//! Time integration of the rescaled equation in one space dimension: the
//! critical decay law, supercritical convergence and Lyapunov diagnostics.

pub mod experiments;
pub mod scheme;

pub use experiments::{
    run_critical_experiment, run_supercritical_experiment, run_trace, CriticalReport, RunConfig, SimTrace,
    SupercriticalReport, TraceRow,
};
pub use scheme::{lyapunov_monitor, Scheme, SimState};

use crate::profiles::ParamError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("Newton failed after 10 step halvings at tau = {tau} (dt = {dt})")]
    Newton { tau: f64, dt: f64 },
    #[error("support reached the domain boundary at tau = {tau}")]
    SupportContact { tau: f64 },
    #[error("halving the regularization changed the amplitude by {change:e} (> 1%)")]
    Regularization { change: f64 },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Param(#[from] ParamError),
}
