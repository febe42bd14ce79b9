//! Derived stress measures, probes and scalar run metrics.

use serde::{Deserialize, Serialize};

use crate::materials::Material;
use crate::solver::ParticleSystem;
use crate::{Error, Mat3, Result, Vec3};

/// Cauchy stress `σ = J⁻¹ F S Fᵀ`.
pub fn cauchy_stress(f: &Mat3, s: &Mat3) -> Result<Mat3> {
    let j = f.determinant();
    if !(j > 0.0) {
        return Err(Error::ElementInversion { particle: 0, det: j });
    }
    let mut sigma = f * s * f.transpose() / j;
    for r in 0..3 {
        for c in r + 1..3 {
            let v = 0.5 * (sigma[(r, c)] + sigma[(c, r)]);
            sigma[(r, c)] = v;
            sigma[(c, r)] = v;
        }
    }
    Ok(sigma)
}

/// Von Mises equivalent stress `sqrt(3/2 dev σ : dev σ)`.
pub fn von_mises(sigma: &Mat3) -> f64 {
    let dev = sigma - Mat3::identity() * (sigma.trace() / 3.0);
    (1.5 * dev.dot(&dev)).sqrt()
}

/// Total variation `Σ |x_{k+1} - x_k|`.
pub fn oscillation_metric(series: &[f64]) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "oscillation metric needs at least 2 samples, got {}",
            series.len()
        )));
    }
    Ok(series.windows(2).map(|w| (w[1] - w[0]).abs()).sum())
}

/// What a probe records at its particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeQuantity {
    Velocity,
    Displacement,
}

/// A Lagrangian probe request: follow the particle(s) nearest to `point` in
/// the reference configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub name: String,
    pub point: [f64; 3],
    pub quantity: ProbeQuantity,
}

impl ProbeSpec {
    pub fn new(name: &str, point: Vec3, quantity: ProbeQuantity) -> Self {
        Self {
            name: name.to_string(),
            point: [point.x, point.y, point.z],
            quantity,
        }
    }
}

/// Time series of a vector quantity at one Lagrangian particle.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSeries {
    pub name: String,
    pub quantity: ProbeQuantity,
    /// Particle nearest to the requested point in the reference
    /// configuration; equidistant ties go to the lowest index.
    pub particle: usize,
    pub times: Vec<f64>,
    pub values: Vec<Vec3>,
}

impl ProbeSeries {
    pub fn bind(spec: &ProbeSpec, reference_positions: &[Vec3]) -> Result<Self> {
        let target = Vec3::from(spec.point);
        let mut best: Option<(usize, f64)> = None;
        for (i, p) in reference_positions.iter().enumerate() {
            let d = (p - target).norm_squared();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        let (particle, _) =
            best.ok_or_else(|| Error::Config(format!("probe '{}' on an empty body", spec.name)))?;
        Ok(Self {
            name: spec.name.clone(),
            quantity: spec.quantity,
            particle,
            times: Vec::new(),
            values: Vec::new(),
        })
    }

    pub fn value(&self, system: &ParticleSystem) -> Vec3 {
        match self.quantity {
            ProbeQuantity::Velocity => system.velocities[self.particle],
            ProbeQuantity::Displacement => system.displacement(self.particle),
        }
    }

    pub fn record(&mut self, time: f64, system: &ParticleSystem) {
        self.times.push(time);
        self.values.push(self.value(system));
    }

    pub fn component(&self, axis: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[axis]).collect()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Global balance quantities of a particle state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationReport {
    pub mass: f64,
    pub momentum: Vec3,
    pub kinetic_energy: f64,
    /// `Σ V⁰_i W(F_i)`
    pub strain_energy: f64,
}

impl ConservationReport {
    pub fn mechanical_energy(&self) -> f64 {
        self.kinetic_energy + self.strain_energy
    }
}

/// Sums run sequentially in particle order, so reruns agree bitwise.
pub fn conservation_report(system: &ParticleSystem, material: &Material) -> ConservationReport {
    let mut mass = 0.0;
    let mut momentum = Vec3::zeros();
    let mut kinetic_energy = 0.0;
    let mut strain_energy = 0.0;
    for i in 0..system.len() {
        let m = system.masses[i];
        let v = system.velocities[i];
        mass += m;
        momentum += v * m;
        kinetic_energy += 0.5 * m * v.norm_squared();
        strain_energy += system.volumes[i] * material.strain_energy_density(&system.deformation[i]);
    }
    ConservationReport {
        mass,
        momentum,
        kinetic_energy,
        strain_energy,
    }
}

/// Particle fields at one output time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub positions: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
    pub displacements: Vec<Vec3>,
    pub von_mises: Vec<f64>,
    pub det_f: Vec<f64>,
}

impl Snapshot {
    pub fn capture(time: f64, system: &ParticleSystem) -> Self {
        let det_f: Vec<f64> = system.deformation.iter().map(|f| f.determinant()).collect();
        let von_mises = system
            .deformation
            .iter()
            .zip(&system.stress)
            .map(|(f, s)| cauchy_stress(f, s).map(|sigma| von_mises(&sigma)).unwrap_or(f64::NAN))
            .collect();
        Self {
            time,
            positions: system.positions.clone(),
            velocities: system.velocities.clone(),
            displacements: system.displacements(),
            von_mises,
            det_f,
        }
    }

    pub fn empty(time: f64) -> Self {
        Self {
            time,
            positions: Vec::new(),
            velocities: Vec::new(),
            displacements: Vec::new(),
            von_mises: Vec::new(),
            det_f: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}
