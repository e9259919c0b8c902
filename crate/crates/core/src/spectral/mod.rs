//! Linearized operator around the similarity profile: closed-form spectra for
//! n = 1, exact polynomial eigenfunctions, finite-volume discretizations for
//! general n, the scaling zero mode and the exact symmetry certificate.

pub mod certificate;
pub mod closed_form;
pub mod discrete;
pub mod polynomial;
pub mod zero_mode;

pub use certificate::{parse_rational, symmetry_certificate, SymmetryVerdict, Verdict};
pub use closed_form::{eigenvalue_general_m_derived, eigenvalues_closed_form, laplace_beltrami_eigenvalue};
pub use discrete::{discretize_operator, discretize_with_profile, DiscreteOperator};
pub use polynomial::{polynomial_eigenfunctions, Spectrum};
pub use zero_mode::{zero_eigenfunction_general_n, ZeroMode};

use crate::numerics::EigError;
use crate::profiles::{ParamError, ProfileError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("spectrum is indexed by even k, got k = {0}")]
    OddIndex(usize),
    #[error("index k = {k} below the admissible start {min}")]
    IndexRange { k: usize, min: usize },
    #[error("singular eigenfunction system at k = {0}")]
    Singular(usize),
    #[error("grid too coarse: leading eigenvalue {observed} vs {expected}")]
    GridTooCoarse { observed: f64, expected: f64 },
    #[error("zero mode negative at y = {y} (value {value:e})")]
    Negativity { y: f64, value: f64 },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Eig(#[from] EigError),
}
