//! Kernel normalization and first-order consistency of the corrected
//! gradient on a small lattice.
//!
//! ```text
//! cargo run --example kernel_consistency
//! ```

use tlsph::geometry::generate_lattice_box;
use tlsph::kernel::{build_reference_neighborhoods, SmoothingKernel};
use tlsph::oracles::affine_motion_oracle;
use tlsph::solver::{compute_correction_matrices, update_deformation_rate, ParticleSystem};
use tlsph::{Mat3, Vec3};

fn main() -> tlsph::Result<()> {
    let dp = 0.1;
    let h = 1.15 * dp;
    let kernel = SmoothingKernel::new(h)?;
    let lattice = generate_lattice_box(Vec3::repeat(1.2), dp, Vec3::zeros())?;
    let hood = build_reference_neighborhoods(&lattice.positions, h)?;

    let centre = lattice.positions.iter().position(|p| (p - Vec3::repeat(0.65)).norm() < 1e-9).unwrap();
    let sum: f64 = hood.pairs(centre).map(|p| kernel.value(p.distance) * dp.powi(3)).sum::<f64>()
        + kernel.value(0.0) * dp.powi(3);
    println!("interior particle: {} neighbors, Σ W V = {sum:.6}", hood.neighbor_count(centre));

    let mut system = ParticleSystem::from_lattice(lattice.positions.clone(), dp, 1000.0)?;
    system.correction = compute_correction_matrices(&system.volumes, &hood)?;
    let a = Mat3::new(0.3, -0.1, 0.2, 0.05, -0.4, 0.1, 0.2, 0.0, 0.15);
    let expected = affine_motion_oracle(&a, &Vec3::zeros(), &system.reference_positions, h);
    system.velocities = expected.velocities.clone();
    update_deformation_rate(&mut system, &hood);
    let worst = system
        .deformation_rate
        .iter()
        .map(|r| (r - a).amax())
        .fold(0.0, f64::max);
    println!("largest dF/dt error for a linear velocity field: {worst:.3e}");
    Ok(())
}
