//! Position-based Verlet time stepping.
//!
//! One step is: half drift of positions and deformation gradients, force
//! evaluation and velocity kick, recomputation of `dF/dt` from the new
//! velocities, then the second half drift.

use rayon::prelude::*;

use super::operators::{evaluate_stresses, momentum_rhs, update_deformation_rate};
use super::system::{Constraint, ParticleSystem};
use crate::kernel::ReferenceNeighborhood;
use crate::materials::Material;
use crate::{Mat3, Result, Vec3};

/// Supplies the two state-dependent quantities the integrator needs.
pub trait ForceModel {
    /// Recomputes `system.deformation_rate` from the current velocities.
    fn update_rates(&mut self, system: &mut ParticleSystem) -> Result<()>;
    /// Recomputes `system.accelerations` from the current state.
    fn update_accelerations(&mut self, system: &mut ParticleSystem) -> Result<()>;
}

/// The TL-SPH force model: constitutive stress (plus damper) and the
/// corrected momentum equation.
#[derive(Debug, Clone)]
pub struct TlsphModel {
    pub hood: ReferenceNeighborhood,
    pub material: Material,
    /// `None` when the damper is switched off.
    pub damping_coefficient: Option<f64>,
    pub gravity: Vec3,
    corrected_pk1: Vec<Mat3>,
}

impl TlsphModel {
    pub fn new(hood: ReferenceNeighborhood, material: Material, h: f64, gravity: Vec3) -> Self {
        let damping_coefficient = material.damping_enabled.then(|| material.damping_coefficient(h));
        let n = hood.len();
        Self {
            hood,
            material,
            damping_coefficient,
            gravity,
            corrected_pk1: vec![Mat3::zeros(); n],
        }
    }
}

impl ForceModel for TlsphModel {
    fn update_rates(&mut self, system: &mut ParticleSystem) -> Result<()> {
        update_deformation_rate(system, &self.hood);
        Ok(())
    }

    fn update_accelerations(&mut self, system: &mut ParticleSystem) -> Result<()> {
        evaluate_stresses(
            system,
            &self.material,
            self.damping_coefficient,
            &mut self.corrected_pk1,
        )?;
        momentum_rhs(
            &self.corrected_pk1,
            &system.volumes,
            &system.masses,
            &self.hood,
            &self.gravity,
            &mut system.accelerations,
        );
        Ok(())
    }
}

fn half_drift(system: &mut ParticleSystem, dt: f64) {
    let half = 0.5 * dt;
    let ParticleSystem {
        positions,
        velocities,
        constraints,
        ..
    } = system;
    positions
        .par_iter_mut()
        .zip(velocities.par_iter())
        .zip(constraints.par_iter())
        .for_each(|((r, v), c)| {
            if !matches!(c, Constraint::Clamped) {
                *r += v * half;
            }
        });
}

fn half_deform(system: &mut ParticleSystem, dt: f64) {
    let half = 0.5 * dt;
    system
        .deformation
        .par_iter_mut()
        .zip(system.deformation_rate.par_iter())
        .for_each(|(f, rate)| *f += rate * half);
}

fn kick(system: &mut ParticleSystem, dt: f64) {
    let ParticleSystem {
        velocities,
        accelerations,
        constraints,
        ..
    } = system;
    velocities
        .par_iter_mut()
        .zip(accelerations.par_iter())
        .zip(constraints.par_iter())
        .for_each(|((v, a), c)| match c {
            Constraint::Free => *v += a * dt,
            Constraint::Clamped => *v = Vec3::zeros(),
            Constraint::Prescribed(p) => *v = *p,
        });
}

/// Advances `system` by `dt` with the position-based Verlet scheme.
pub fn step_position_verlet<M: ForceModel + ?Sized>(
    system: &mut ParticleSystem,
    dt: f64,
    model: &mut M,
) -> Result<()> {
    half_drift(system, dt);
    half_deform(system, dt);

    model.update_accelerations(system)?;
    kick(system, dt);

    model.update_rates(system)?;
    half_deform(system, dt);
    half_drift(system, dt);
    Ok(())
}

/// Re-imposes constraint kinematics: clamped particles sit at rest in their
/// reference positions, prescribed ones carry their imposed velocity.
pub fn apply_constraints(system: &mut ParticleSystem) {
    for i in 0..system.len() {
        match system.constraints[i] {
            Constraint::Free => {}
            Constraint::Clamped => {
                system.velocities[i] = Vec3::zeros();
                system.positions[i] = system.reference_positions[i];
            }
            Constraint::Prescribed(v) => system.velocities[i] = v,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Constant body force, no deformation.
    struct Uniform(Vec3);

    impl ForceModel for Uniform {
        fn update_rates(&mut self, _: &mut ParticleSystem) -> Result<()> {
            Ok(())
        }
        fn update_accelerations(&mut self, system: &mut ParticleSystem) -> Result<()> {
            system.accelerations.iter_mut().for_each(|a| *a = self.0);
            Ok(())
        }
    }

    /// Two unit masses on a spring of stiffness k and rest length l0 along x.
    struct Spring {
        k: f64,
        l0: f64,
    }

    impl ForceModel for Spring {
        fn update_rates(&mut self, _: &mut ParticleSystem) -> Result<()> {
            Ok(())
        }
        fn update_accelerations(&mut self, s: &mut ParticleSystem) -> Result<()> {
            let stretch = (s.positions[1].x - s.positions[0].x) - self.l0;
            s.accelerations[0] = Vec3::new(self.k * stretch, 0.0, 0.0) / s.masses[0];
            s.accelerations[1] = Vec3::new(-self.k * stretch, 0.0, 0.0) / s.masses[1];
            Ok(())
        }
    }

    fn spring_energy(s: &ParticleSystem, model: &Spring) -> f64 {
        let stretch = (s.positions[1].x - s.positions[0].x) - model.l0;
        let kinetic: f64 = (0..2).map(|i| 0.5 * s.masses[i] * s.velocities[i].norm_squared()).sum();
        kinetic + 0.5 * model.k * stretch * stretch
    }

    fn max_energy_error_over_period(dt_fraction: f64) -> f64 {
        let mut model = Spring { k: 4.0, l0: 1.0 };
        let mut s = ParticleSystem::new(vec![Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0)], vec![1.0, 1.0], 1.0).unwrap();
        s.velocities[1] = Vec3::new(0.3, 0.0, 0.0);
        s.velocities[0] = Vec3::new(-0.3, 0.0, 0.0);
        let e0 = spring_energy(&s, &model);
        // Reduced mass ½, so ω = sqrt(2k).
        let period = 2.0 * std::f64::consts::PI / (2.0 * model.k).sqrt();
        let steps = (1.0 / dt_fraction).round() as usize;
        let dt = period / steps as f64;
        let mut worst: f64 = 0.0;
        for _ in 0..steps {
            step_position_verlet(&mut s, dt, &mut model).unwrap();
            worst = worst.max((spring_energy(&s, &model) - e0).abs());
        }
        worst
    }

    #[test]
    fn free_flight_is_exact() {
        let mut s = ParticleSystem::new(vec![Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0)], vec![1.0, 1.0], 1.0).unwrap();
        let v = Vec3::new(0.5, -0.25, 2.0);
        s.velocities = vec![v; 2];
        let dt = 0.125;
        step_position_verlet(&mut s, dt, &mut Uniform(Vec3::zeros())).unwrap();
        assert_eq!(s.positions[0], v * dt);
        assert!(s.deformation.iter().all(|f| *f == Mat3::identity()));
    }

    #[test]
    fn constant_gravity_kicks_exactly() {
        let mut s = ParticleSystem::new(vec![Vec3::zeros()], vec![1.0], 1.0).unwrap();
        // Dyadic values keep every sum exact.
        let g = Vec3::new(0.0, 0.0, -8.0);
        let dt = 0.0625;
        for n in 1..=50 {
            step_position_verlet(&mut s, dt, &mut Uniform(g)).unwrap();
            assert_eq!(s.velocities[0], g * (n as f64 * dt));
        }
        // Drift-kick-drift integrates constant acceleration exactly in position.
        let t = 50.0 * dt;
        assert!((s.positions[0] - g * (0.5 * t * t)).norm() < 1e-12);
    }

    #[test]
    fn oscillator_energy_error_is_second_order() {
        let coarse = max_energy_error_over_period(1.0 / 40.0);
        let fine = max_energy_error_over_period(1.0 / 80.0);
        let ratio = coarse / fine;
        assert!((ratio - 4.0).abs() < 0.4, "ratio = {ratio}");
    }

    #[test]
    fn constraints_are_respected() {
        let mut s = ParticleSystem::new(
            vec![Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0)],
            vec![1.0; 3],
            1.0,
        )
        .unwrap();
        let imposed = Vec3::new(0.0, 5.0, 0.0);
        s.constraints = vec![Constraint::Clamped, Constraint::Prescribed(imposed), Constraint::Free];
        s.set_velocities(vec![Vec3::new(1.0, 1.0, 1.0); 3]).unwrap();
        let mut model = Uniform(Vec3::new(3.0, 0.0, 0.0));
        let dt = 1e-3;
        for _ in 0..1000 {
            step_position_verlet(&mut s, dt, &mut model).unwrap();
        }
        assert_eq!(s.displacement(0), Vec3::zeros());
        assert_eq!(s.velocities[0], Vec3::zeros());
        assert_eq!(s.velocities[1], imposed);
        assert!((s.displacement(1) - imposed).norm() < 1e-9);
        assert!(s.velocities[2].x > 3.9);
        s.positions[0] = Vec3::new(9.0, 9.0, 9.0);
        s.velocities[1] = Vec3::zeros();
        apply_constraints(&mut s);
        assert_eq!(s.positions[0], Vec3::zeros());
        assert_eq!(s.velocities[1], imposed);
    }
}
