//! Numerical laboratory for fractional free convolution powers.
//!
//! The crate computes mu^{boxplus k} of a compactly supported measure for any
//! real k >= 1, evaluates the free entropy and free Fisher information,
//! machine-checks the Hilbert-transform and kernel-positivity identities that
//! underpin their monotonicity in k, verifies the associated density flow and
//! its Lagrangian reformulation in Gelfand-Tsetlin coordinates, and validates
//! the random-matrix minor-process picture by Monte Carlo.

pub mod convolution;
pub mod error;
pub mod functionals;
pub mod kernelcheck;
pub mod measure;
mod numutil;
pub mod rmt;
pub mod transforms;
pub mod variational;
pub mod verify;

pub use error::{Error, Result};
pub use measure::{cdf_distance, GridMeasure};
