//! Foundation layer shared by every other module.

pub mod banded;
pub mod eig;
pub mod ode;
pub mod quad;
pub mod roots;
pub mod series;

pub use banded::BandedMatrix;
pub use eig::{eig_banded_symmetric, EigError};
pub use ode::{integrate_ivp, Direction, EventSpec, IvpError, IvpOptions, Trajectory};
pub use quad::{gauss_legendre, quad_composite, quad_weighted, QuadError};
pub use roots::{scan_brackets, solve_bracketed, try_solve_bracketed, RootError};
pub use series::{rat, series_diff, series_mul, series_pow, Poly, RationalSeries, Ring, Series, SeriesError};
