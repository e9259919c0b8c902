//! Numerical laboratory for the thin film equation with critical absorption.
//!
//! Modules follow the computation pipeline: `numerics` supplies integrators,
//! root finders, quadrature, eigen-solvers and exact series; `profiles`
//! builds similarity profiles; `spectral` and `centre` analyse the linearised
//! operator around them; `orbits` studies interface oscillations; `pdesim`
//! time-steps the rescaled PDE; `cli` wires everything to the command line.

pub mod centre;
pub mod cli;
pub mod numerics;
pub mod output;
pub mod orbits;
pub mod pdesim;
pub mod profiles;
pub mod spectral;


