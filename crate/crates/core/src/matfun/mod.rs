//! Matrix functions: exponential, principal square root and logarithm
//! (inverse scaling-and-squaring plus an independent contour-integral
//! route), and finite-difference derivatives of matrix-valued curves.

mod contour;
mod expm;
mod fd;
mod logm;
mod sqrtm;

pub use contour::{logm_contour, ContourSpec};
pub use expm::{expm, EXPM_NORM_LIMIT};
pub use fd::{fd_derivative, DerivativeOrder, FdConfig, FdScheme};
pub use logm::{log_admissible, logm_iss};
pub use sqrtm::sqrtm_db;

pub(crate) use sqrtm::{certified_roots, denman_beavers};
