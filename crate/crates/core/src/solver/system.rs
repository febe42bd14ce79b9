use crate::{Error, Mat3, Result, Vec3};

/// Kinematic constraint attached to a particle for the whole run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint {
    Free,
    /// `v = 0`, `r = r⁰` at all times.
    Clamped,
    /// Velocity imposed for all times; the position is advected with it.
    Prescribed(Vec3),
}

/// Flat per-particle solver state.
#[derive(Debug, Clone)]
pub struct ParticleSystem {
    pub reference_positions: Vec<Vec3>,
    pub positions: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
    pub accelerations: Vec<Vec3>,
    pub deformation: Vec<Mat3>,
    pub deformation_rate: Vec<Mat3>,
    pub correction: Vec<Mat3>,
    /// Total second Piola-Kirchhoff stress from the last force evaluation.
    pub stress: Vec<Mat3>,
    pub volumes: Vec<f64>,
    pub masses: Vec<f64>,
    pub rho0: f64,
    pub constraints: Vec<Constraint>,
}

impl ParticleSystem {
    /// A stress-free body at rest in its reference configuration.
    pub fn new(reference_positions: Vec<Vec3>, volumes: Vec<f64>, rho0: f64) -> Result<Self> {
        let n = reference_positions.len();
        if volumes.len() != n {
            return Err(Error::InvalidParameter(format!(
                "{n} positions but {} volumes",
                volumes.len()
            )));
        }
        if !(rho0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "density must be positive, got {rho0}"
            )));
        }
        if let Some(i) = volumes.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "particle {i} has non-positive volume {}",
                volumes[i]
            )));
        }
        let masses = volumes.iter().map(|v| rho0 * v).collect();
        Ok(Self {
            positions: reference_positions.clone(),
            reference_positions,
            velocities: vec![Vec3::zeros(); n],
            accelerations: vec![Vec3::zeros(); n],
            deformation: vec![Mat3::identity(); n],
            deformation_rate: vec![Mat3::zeros(); n],
            correction: vec![Mat3::identity(); n],
            stress: vec![Mat3::zeros(); n],
            volumes,
            masses,
            rho0,
            constraints: vec![Constraint::Free; n],
        })
    }

    /// Uniform lattice body: every particle carries `V⁰ = dp³`.
    pub fn from_lattice(reference_positions: Vec<Vec3>, dp: f64, rho0: f64) -> Result<Self> {
        let n = reference_positions.len();
        Self::new(reference_positions, vec![dp * dp * dp; n], rho0)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn displacement(&self, i: usize) -> Vec3 {
        self.positions[i] - self.reference_positions[i]
    }

    pub fn displacements(&self) -> Vec<Vec3> {
        (0..self.len()).map(|i| self.displacement(i)).collect()
    }

    pub fn set_velocities(&mut self, velocities: Vec<Vec3>) -> Result<()> {
        if velocities.len() != self.len() {
            return Err(Error::InvalidParameter(format!(
                "{} velocities for {} particles",
                velocities.len(),
                self.len()
            )));
        }
        self.velocities = velocities;
        self.enforce_constraint_velocities();
        Ok(())
    }

    /// Overwrites velocities of constrained particles with their imposed values.
    pub fn enforce_constraint_velocities(&mut self) {
        for (v, c) in self.velocities.iter_mut().zip(&self.constraints) {
            match c {
                Constraint::Free => {}
                Constraint::Clamped => *v = Vec3::zeros(),
                Constraint::Prescribed(p) => *v = *p,
            }
        }
    }

    pub fn count_constrained(&self, pred: impl Fn(&Constraint) -> bool) -> usize {
        self.constraints.iter().filter(|c| pred(c)).count()
    }
}
