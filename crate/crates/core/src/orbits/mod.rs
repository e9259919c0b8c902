//! Oscillatory component of profiles near the interface: the autonomous ODE,
//! its stable periodic orbit, Floquet data and the heteroclinic limit n_h.

pub mod bifurcation;
pub mod flow;
pub mod periodic;
pub mod system;

pub use bifurcation::{trace_heteroclinic_bifurcation, trace_heteroclinic_bifurcation_with, BifurcationOptions, BifurcationTrace};
pub use flow::{patched_flow, patched_flow_from_zero, FlowOptions, PatchedFlow, ZeroCrossing};
pub use periodic::{
    basin_crossings, default_initial_state, energy_identity_defect, exact_orbit_n1, find_periodic_orbit,
    find_periodic_orbit_with, floquet_multipliers, orbit_from_crossing, return_map, stability_terms, theta_n1,
    FloquetData, OrbitOptions, OrbitSample, PeriodicOrbit, StabilityTerms,
};
pub use system::{n_plus, oscillatory_rhs, OscillatorySystem};

use crate::numerics::IvpError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error("parameter outside the admissible range: {0}")]
    Domain(String),
    #[error("trajectory escaped near s = {s}")]
    Escape { s: f64 },
    #[error("no oscillation: {0}")]
    NoOscillation(String),
    #[error("zero patch failed: {0}")]
    Patch(String),
    #[error("Newton iteration failed: {0}")]
    Newton(String),
    #[error("orbit persisted up to the range end n = {0}")]
    NoDivergence(f64),
    #[error("integration failed: {0}")]
    Ivp(#[from] IvpError),
    #[error("{0}")]
    Numerical(String),
}
