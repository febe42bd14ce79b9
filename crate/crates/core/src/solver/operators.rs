//! Discrete TL-SPH operators over the fixed reference neighborhoods.
//!
//! Sign convention: `r⁰_ij = r⁰_i - r⁰_j`, `v_ij = v_i - v_j`, and the kernel
//! gradient is taken with respect to particle `i`. Sums over neighbors always run
//! in ascending neighbor index, so results do not depend on the thread count.

use rayon::prelude::*;

use super::system::ParticleSystem;
use crate::kernel::ReferenceNeighborhood;
use crate::materials::{first_pk, kv_damping_s_unchecked, Material};
use crate::{Error, Mat3, Result, Vec3};

/// Largest accepted condition number of the moment matrix.
pub const MAX_CORRECTION_CONDITION: f64 = 1e8;

/// Uncorrected moment matrix `-Σ_j V⁰_j r⁰_ij ⊗ ∇⁰_i W_ij`.
pub fn moment_matrix(volumes: &[f64], hood: &ReferenceNeighborhood, i: usize) -> Mat3 {
    let mut m = Mat3::zeros();
    for pair in hood.pairs(i) {
        m -= (pair.separation * pair.gradient.transpose()) * volumes[pair.neighbor];
    }
    m
}

/// Correction matrices `B⁰_i` (inverse moment matrices), computed once per run.
pub fn compute_correction_matrices(
    volumes: &[f64],
    hood: &ReferenceNeighborhood,
) -> Result<Vec<Mat3>> {
    let results: Vec<std::result::Result<Mat3, f64>> = (0..hood.len())
        .into_par_iter()
        .map(|i| {
            let m = moment_matrix(volumes, hood, i);
            let sv = m.singular_values();
            let (smax, smin) = (sv.max(), sv.min());
            let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
            if !(condition <= MAX_CORRECTION_CONDITION) {
                return Err(condition);
            }
            m.try_inverse().ok_or(f64::INFINITY)
        })
        .collect();
    results
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|condition| Error::SingularCorrection {
                particle: i,
                neighbors: hood.neighbor_count(i),
                condition,
            })
        })
        .collect()
}

/// `dF_i/dt = (-Σ_j V⁰_j v_ij ⊗ ∇⁰_i W_ij) B⁰_i`
pub fn deformation_gradient_rate(
    velocities: &[Vec3],
    volumes: &[f64],
    correction: &[Mat3],
    hood: &ReferenceNeighborhood,
    out: &mut [Mat3],
) {
    out.par_iter_mut().enumerate().for_each(|(i, rate)| {
        let vi = velocities[i];
        let mut sum = Mat3::zeros();
        for pair in hood.pairs(i) {
            let j = pair.neighbor;
            let v_ji = velocities[j] - vi;
            sum += (v_ji * pair.gradient.transpose()) * volumes[j];
        }
        *rate = sum * correction[i];
    });
}

/// Deformation gradient reconstructed from current positions,
/// `F_i = (-Σ_j V⁰_j (r_i - r_j) ⊗ ∇⁰_i W_ij) B⁰_i`. The solver integrates `F` in
/// time instead; this is the kinematic check of that integration.
pub fn deformation_gradient(system: &ParticleSystem, hood: &ReferenceNeighborhood) -> Vec<Mat3> {
    let mut out = vec![Mat3::zeros(); system.len()];
    deformation_gradient_rate(&system.positions, &system.volumes, &system.correction, hood, &mut out);
    out
}

/// Updates `system.deformation_rate` from the current velocities.
pub fn update_deformation_rate(system: &mut ParticleSystem, hood: &ReferenceNeighborhood) {
    let ParticleSystem {
        velocities,
        volumes,
        correction,
        deformation_rate,
        ..
    } = system;
    deformation_gradient_rate(velocities, volumes, correction, hood, deformation_rate);
}

/// Evaluates the total second Piola-Kirchhoff stress of every particle and
/// returns the corrected first Piola-Kirchhoff stresses `P_i B⁰_i`.
///
/// `damping_coefficient = None` skips the damper arithmetic altogether.
pub fn evaluate_stresses(
    system: &mut ParticleSystem,
    material: &Material,
    damping_coefficient: Option<f64>,
    corrected_pk1: &mut [Mat3],
) -> Result<()> {
    let ParticleSystem {
        deformation,
        deformation_rate,
        correction,
        stress,
        ..
    } = system;
    let failure = stress
        .par_iter_mut()
        .zip(corrected_pk1.par_iter_mut())
        .enumerate()
        .filter_map(|(i, (s_out, pb_out))| {
            let f = &deformation[i];
            let det = f.determinant();
            if !det.is_finite() {
                return Some((i, Error::NonFiniteState { particle: i, quantity: "deformation gradient" }));
            }
            if det <= 0.0 {
                return Some((i, Error::ElementInversion { particle: i, det }));
            }
            let Some(mut s) = material.elastic_stress(f) else {
                return Some((i, Error::ElementInversion { particle: i, det }));
            };
            if let Some(pi) = damping_coefficient {
                s += kv_damping_s_unchecked(f, &deformation_rate[i], pi);
            }
            *s_out = s;
            *pb_out = first_pk(f, &s) * correction[i];
            None
        })
        .min_by_key(|(i, _)| *i);
    match failure {
        Some((_, e)) => Err(e),
        None => Ok(()),
    }
}

/// `dv_i/dt = (2/m_i) Σ_j V⁰_i V⁰_j P̃_ij ∇⁰_i W_ij + g`, `P̃_ij = ½(P_i B⁰_i + P_j B⁰_j)`.
///
/// The pair term is computed symmetrically in `(i, j)`, so the force particle `j`
/// exerts on `i` is bitwise the negative of the reverse force.
pub fn momentum_rhs(
    corrected_pk1: &[Mat3],
    volumes: &[f64],
    masses: &[f64],
    hood: &ReferenceNeighborhood,
    gravity: &Vec3,
    out: &mut [Vec3],
) {
    out.par_iter_mut().enumerate().for_each(|(i, acc)| {
        let mut force = Vec3::zeros();
        for pair in hood.pairs(i) {
            force += pair_force(corrected_pk1, volumes, i, pair.neighbor, pair.gradient);
        }
        *acc = force / masses[i] + gravity;
    });
}

/// `2 V⁰_i V⁰_j P̃_ij ∇⁰_i W_ij`
#[inline]
pub fn pair_force(corrected_pk1: &[Mat3], volumes: &[f64], i: usize, j: usize, gradient: &Vec3) -> Vec3 {
    let averaged = (corrected_pk1[i] + corrected_pk1[j]) * 0.5;
    (averaged * gradient) * (2.0 * (volumes[i] * volumes[j]))
}

/// Admissible step `CFL · min(h / (c + |v|max), sqrt(h / |a|max))`.
pub fn stable_timestep(system: &ParticleSystem, sound_speed: f64, h: f64, cfl: f64) -> Result<f64> {
    if !(sound_speed > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sound speed must be positive, got {sound_speed}"
        )));
    }
    if let Some(i) = system.velocities.iter().position(|v| !v.iter().all(|x| x.is_finite())) {
        return Err(Error::NonFiniteState { particle: i, quantity: "velocity" });
    }
    if let Some(i) = system.accelerations.iter().position(|a| !a.iter().all(|x| x.is_finite())) {
        return Err(Error::NonFiniteState { particle: i, quantity: "acceleration" });
    }
    let v_max = system
        .velocities
        .par_iter()
        .map(|v| v.norm())
        .reduce(|| 0.0, f64::max);
    let a_max = system
        .accelerations
        .par_iter()
        .map(|a| a.norm())
        .reduce(|| 0.0, f64::max);
    let acoustic = h / (sound_speed + v_max);
    let limit = if a_max > 0.0 {
        acoustic.min((h / a_max).sqrt())
    } else {
        acoustic
    };
    Ok(cfl * limit)
}
