//! Source-type similarity profiles: explicit forms, free-boundary and
//! Cauchy-problem shooting, the n = 0 kernel and its FBP approximants.

pub mod params;
pub mod profile;

pub use params::{critical_exponent, omega, ParamError, ProblemParams};
pub use profile::{Profile, ProblemKind};
pub mod explicit;
pub use explicit::{explicit_profile_2m_n1, explicit_profile_n1, ExplicitProfile2m};
pub mod interface;
pub use interface::{interface_expansion, InterfaceExpansion};
pub mod fbp;
pub use fbp::{shoot_fbp_profile, shoot_fbp_profile_with, FbpOptions, FbpSolution, ProfileError};
pub mod kernel;
pub use kernel::{fbp_kernel_sequence, fundamental_kernel, KernelBundle};
pub mod cp;
pub use cp::{shoot_cp_profile, shoot_cp_profile_with, CpOptions, CpSolution};
