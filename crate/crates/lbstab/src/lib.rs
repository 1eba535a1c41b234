//! Construction, certification, and simulation of stable linear BGK-type
//! lattice-Boltzmann collision operators for the 3D isothermal linearized
//! Euler equations.
//!
//! The toolkit is organized as a pipeline:
//!
//! 1. [`lattice`] defines discrete velocity sets and raw moment matrices.
//! 2. [`equilibrium`] encodes the linearized-Euler target system: conserved
//!    moments `(rho', j)` and the equilibrium second-moment map.
//! 3. [`stability`] shifts the consistency rows by their equilibrium maps,
//!    finds positive diagonal weights via a kernel-constrained linear
//!    program, re-orthogonalizes the tail rows by a truncated weighted
//!    Gram-Schmidt pass, and assembles a certified collision operator.
//! 4. [`simulator`] runs the collide-stream evolution on a periodic 3D
//!    lattice and exposes the weighted-energy and conservation monitors.
//! 5. [`analysis`] provides exact references, error norms, convergence-order
//!    studies, and the feasibility-domain scanner.
//! 6. [`config`] + [`formats`] wire everything to run-configuration files
//!    and on-disk artifacts for the command-line front end.

pub mod analysis;
pub mod config;
pub mod equilibrium;
pub mod error;
pub mod exact;
pub mod formats;
pub mod lattice;
pub mod linalg;
pub mod simulator;
pub mod stability;
pub mod tolerances;

pub use error::{Error, Result};
