//! Discrete TL-SPH operators, the particle state, and time integration.

mod integrator;
mod operators;
mod simulation;
mod system;

pub use integrator::{apply_constraints, step_position_verlet, ForceModel, TlsphModel};
pub use operators::{
    compute_correction_matrices, deformation_gradient, deformation_gradient_rate, evaluate_stresses, moment_matrix,
    momentum_rhs, pair_force, stable_timestep, update_deformation_rate, MAX_CORRECTION_CONDITION,
};
pub use simulation::{
    build_solver, run_simulation, run_simulation_with, Body, SimulationConfig, SimulationResult,
    Solver,
};
pub use system::{Constraint, ParticleSystem};
