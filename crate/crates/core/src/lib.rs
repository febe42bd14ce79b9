//! Total-Lagrangian smoothed particle hydrodynamics (TL-SPH) for elastic solid
//! dynamics, stabilized with a Kelvin-Voigt type artificial damper.
//!
//! The crate is organized the way a run flows:
//!
//! - [`kernel`]: Wendland C2 kernel and the reference-configuration neighborhoods
//! - [`materials`]: elastic constants, constitutive laws and the damping stress
//! - [`solver`]: particle state, discrete operators, constraints, time stepping
//! - [`geometry`]: lattice bodies, STL ingestion and ray-parity filling
//! - [`diagnostics`]: stress measures, probes, conservation and oscillation metrics
//! - [`io`]: CSV series and legacy VTK snapshots
//! - [`oracles`]: independent reference solutions used for verification
//! - [`cases`]: benchmark presets and run configuration
//! - [`cli`]: the `tlsph` command line front end
//!
//! A minimal run:
//!
//! ```no_run
//! use tlsph::cases::{CaseId, RunConfig};
//!
//! let mut config = RunConfig::preset(CaseId::Cable);
//! config.t_end = 1.0e-3;
//! let result = tlsph::solver::run_simulation(&config.resolve()?)?;
//! println!("{} steps", result.steps);
//! # Ok::<(), tlsph::Error>(())
//! ```

pub mod cases;
pub mod cli;
pub mod diagnostics;
mod error;
pub mod geometry;
pub mod io;
pub mod kernel;
pub mod materials;
pub mod oracles;
pub mod solver;

pub use error::{Error, Result};

/// Spatial vector (m, m/s, ...).
pub type Vec3 = nalgebra::Vector3<f64>;
/// Second-order tensor in matrix form.
pub type Mat3 = nalgebra::Matrix3<f64>;
