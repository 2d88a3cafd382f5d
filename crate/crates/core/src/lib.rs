//! Approximate oblique dual frames.
//!
//! Finite-dimensional frame operators and oblique projections
//! ([`frame`]), Neumann refinement of approximate duals ([`refinement`]),
//! Fourier-domain tools for integer-translate systems ([`shift_invariant`])
//! and the B-spline example ([`bspline`]).

pub mod bspline;
pub mod cli;
pub mod error;
pub mod frame;
pub mod io;
pub mod linalg;
pub mod refinement;
pub mod shift_invariant;

pub use error::{Error, Result};
pub use frame::{FiniteFrame, LinearMap, Subspace};
