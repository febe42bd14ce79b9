//! Elastic constants, constitutive laws and the Kelvin-Voigt damping stress.
//!
//! Stress measures follow the total-Lagrangian convention: the constitutive laws
//! return the second Piola-Kirchhoff stress `S` as a function of the deformation
//! gradient `F`, and the momentum equation consumes `P = F S`.

use serde::{Deserialize, Serialize};

use crate::{Error, Mat3, Result};

/// Constitutive law selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstitutiveLaw {
    /// `S = λ tr(E) I + 2μ E`
    LinearElastic,
    /// Compressible neo-Hookean, `W = μ tr(E) - μ ln J + λ/2 (ln J)²`.
    NeoHookean,
}

/// Lamé parameters and the moduli derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticConstants {
    pub lambda: f64,
    pub mu: f64,
    pub bulk_modulus: f64,
    pub shear_modulus: f64,
}

impl ElasticConstants {
    /// Isotropic constants from Young's modulus and Poisson's ratio, using
    /// `E = 2G(1 + ν) = 3K(1 - 2ν)`.
    pub fn from_youngs_poisson(youngs_modulus: f64, poisson_ratio: f64) -> Result<Self> {
        if !(youngs_modulus > 0.0 && youngs_modulus.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Young's modulus must be positive, got {youngs_modulus}"
            )));
        }
        if poisson_ratio >= 0.5 {
            return Err(Error::InvalidParameter(format!(
                "Poisson's ratio {poisson_ratio} >= 0.5 describes an incompressible solid, \
                 which an explicit compressible scheme cannot represent"
            )));
        }
        if !(poisson_ratio > -1.0) {
            return Err(Error::InvalidParameter(format!(
                "Poisson's ratio must exceed -1, got {poisson_ratio}"
            )));
        }
        let (e, nu) = (youngs_modulus, poisson_ratio);
        let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
        let mu = e / (2.0 * (1.0 + nu));
        Ok(Self {
            lambda,
            mu,
            bulk_modulus: lambda + 2.0 * mu / 3.0,
            shear_modulus: mu,
        })
    }

    pub fn youngs_modulus(&self) -> f64 {
        self.mu * (3.0 * self.lambda + 2.0 * self.mu) / (self.lambda + self.mu)
    }

    pub fn poisson_ratio(&self) -> f64 {
        self.lambda / (2.0 * (self.lambda + self.mu))
    }

    /// `c = sqrt(K / ρ⁰)`
    pub fn sound_speed(&self, rho0: f64) -> f64 {
        (self.bulk_modulus / rho0).sqrt()
    }
}

/// Convenience form of [`ElasticConstants::from_youngs_poisson`].
pub fn lame_from_e_nu(youngs_modulus: f64, poisson_ratio: f64) -> Result<ElasticConstants> {
    ElasticConstants::from_youngs_poisson(youngs_modulus, poisson_ratio)
}

/// A homogeneous solid material with optional Kelvin-Voigt damping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub rho0: f64,
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub lambda: f64,
    pub mu: f64,
    pub bulk_modulus: f64,
    pub shear_modulus: f64,
    /// Bulk sound speed `sqrt(K / ρ⁰)`; scales the damper.
    pub sound_speed: f64,
    /// Longitudinal wave speed `sqrt((λ + 2μ) / ρ⁰)`; bounds the time step.
    pub wave_speed: f64,
    pub law: ConstitutiveLaw,
    /// Dimensionless damping scale; the damping coefficient is `α ρ⁰ c h`.
    pub alpha: f64,
    pub damping_enabled: bool,
}

impl Material {
    pub const DEFAULT_ALPHA: f64 = 0.5;

    pub fn new(
        rho0: f64,
        youngs_modulus: f64,
        poisson_ratio: f64,
        law: ConstitutiveLaw,
    ) -> Result<Self> {
        if !(rho0 > 0.0 && rho0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "density must be positive, got {rho0}"
            )));
        }
        let c = ElasticConstants::from_youngs_poisson(youngs_modulus, poisson_ratio)?;
        Ok(Self {
            rho0,
            youngs_modulus,
            poisson_ratio,
            lambda: c.lambda,
            mu: c.mu,
            bulk_modulus: c.bulk_modulus,
            shear_modulus: c.shear_modulus,
            sound_speed: c.sound_speed(rho0),
            wave_speed: ((c.lambda + 2.0 * c.mu) / rho0).sqrt(),
            law,
            alpha: Self::DEFAULT_ALPHA,
            damping_enabled: true,
        })
    }

    /// Sets the damping scale; `alpha = 0` switches the damper off entirely.
    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "damping scale alpha must be non-negative, got {alpha}"
            )));
        }
        self.alpha = alpha;
        self.damping_enabled = alpha > 0.0;
        Ok(self)
    }

    pub fn without_damping(mut self) -> Self {
        self.damping_enabled = false;
        self
    }

    /// Damping coefficient for smoothing length `h`, or zero when damping is off.
    pub fn damping_coefficient(&self, h: f64) -> f64 {
        if self.damping_enabled {
            damping_coefficient(self.rho0, self.sound_speed, h, self.alpha)
        } else {
            0.0
        }
    }

    /// Elastic second Piola-Kirchhoff stress for deformation gradient `f`.
    #[inline]
    pub fn elastic_stress(&self, f: &Mat3) -> Option<Mat3> {
        match self.law {
            ConstitutiveLaw::LinearElastic => {
                Some(linear_elastic_s(&green_lagrange(f), self.lambda, self.mu))
            }
            ConstitutiveLaw::NeoHookean => neo_hookean_s_unchecked(f, self.lambda, self.mu),
        }
    }

    /// Strain energy density for deformation gradient `f` (J/m³).
    pub fn strain_energy_density(&self, f: &Mat3) -> f64 {
        match self.law {
            ConstitutiveLaw::LinearElastic => {
                let e = green_lagrange(f);
                let tr = e.trace();
                0.5 * self.lambda * tr * tr + self.mu * e.dot(&e)
            }
            ConstitutiveLaw::NeoHookean => neo_hookean_energy(f, self.lambda, self.mu),
        }
    }
}

/// Green-Lagrange strain `E = ½(FᵀF - I)`.
#[inline]
pub fn green_lagrange(f: &Mat3) -> Mat3 {
    let c = f.transpose() * f;
    let mut e = (c - Mat3::identity()) * 0.5;
    symmetrize(&mut e);
    e
}

/// `S = λ tr(E) I + 2μ E`
#[inline]
pub fn linear_elastic_s(strain: &Mat3, lambda: f64, mu: f64) -> Mat3 {
    Mat3::identity() * (lambda * strain.trace()) + strain * (2.0 * mu)
}

/// Neo-Hookean `S = μ(I - C⁻¹) + λ ln J C⁻¹`, `C = FᵀF`.
///
/// `particle` is only used to label the inversion error.
pub fn neo_hookean_s(f: &Mat3, lambda: f64, mu: f64, particle: usize) -> Result<Mat3> {
    neo_hookean_s_unchecked(f, lambda, mu).ok_or(Error::ElementInversion {
        particle,
        det: f.determinant(),
    })
}

#[inline]
fn neo_hookean_s_unchecked(f: &Mat3, lambda: f64, mu: f64) -> Option<Mat3> {
    let j = f.determinant();
    if !(j > 0.0) {
        return None;
    }
    let c = f.transpose() * f;
    let mut c_inv = c.try_inverse()?;
    symmetrize(&mut c_inv);
    Some((Mat3::identity() - c_inv) * mu + c_inv * (lambda * j.ln()))
}

/// `W = μ tr(E) - μ ln J + λ/2 (ln J)²`; infinite for `det F ≤ 0`.
pub fn neo_hookean_energy(f: &Mat3, lambda: f64, mu: f64) -> f64 {
    let j = f.determinant();
    if !(j > 0.0) {
        return f64::INFINITY;
    }
    let ln_j = j.ln();
    mu * green_lagrange(f).trace() - mu * ln_j + 0.5 * lambda * ln_j * ln_j
}

/// Kelvin-Voigt damper stress `S_D = (π/2)(ḞᵀF + FᵀḞ)`, i.e. `π dE/dt`.
pub fn kv_damping_s(f: &Mat3, f_rate: &Mat3, coefficient: f64) -> Result<Mat3> {
    if !(coefficient >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "damping coefficient must be non-negative, got {coefficient}"
        )));
    }
    Ok(kv_damping_s_unchecked(f, f_rate, coefficient))
}

#[inline]
pub(crate) fn kv_damping_s_unchecked(f: &Mat3, f_rate: &Mat3, coefficient: f64) -> Mat3 {
    let a = f_rate.transpose() * f;
    // a + aᵀ is symmetric in exact arithmetic; build it that way explicitly.
    let mut s = Mat3::zeros();
    for r in 0..3 {
        for c in r..3 {
            let v = 0.5 * coefficient * (a[(r, c)] + a[(c, r)]);
            s[(r, c)] = v;
            s[(c, r)] = v;
        }
    }
    s
}

/// von Neumann-Richtmyer type scaling `π = α ρ c h`.
#[inline]
pub fn damping_coefficient(rho0: f64, sound_speed: f64, h: f64, alpha: f64) -> f64 {
    alpha * rho0 * sound_speed * h
}

/// First Piola-Kirchhoff stress `P = F S`.
#[inline]
pub fn first_pk(f: &Mat3, s_total: &Mat3) -> Mat3 {
    f * s_total
}

#[inline]
fn symmetrize(m: &mut Mat3) {
    for r in 0..3 {
        for c in r + 1..3 {
            let v = 0.5 * (m[(r, c)] + m[(c, r)]);
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::energy_gradient_oracle;
    use nalgebra::Rotation3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_abs(m: &Mat3) -> f64 {
        m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    fn random_rotation(rng: &mut ChaCha8Rng) -> Mat3 {
        let axis = nalgebra::Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let angle = rng.gen_range(-3.0..3.0);
        Rotation3::new(axis.normalize() * angle).into_inner()
    }

    /// Random F with det F in [0.5, 2].
    fn random_deformation(rng: &mut ChaCha8Rng) -> Mat3 {
        loop {
            let mut f = Mat3::identity();
            for v in f.iter_mut() {
                *v += rng.gen_range(-0.35..0.35);
            }
            let det = f.determinant();
            if (0.5..=2.0).contains(&det) {
                return f;
            }
        }
    }

    #[test]
    fn lame_parameters_for_zero_poisson_ratio() {
        let c = lame_from_e_nu(200e9, 0.0).unwrap();
        assert_eq!(c.lambda, 0.0);
        assert_eq!(c.mu, 100e9);
        assert!((c.bulk_modulus - 200e9 / 3.0).abs() < 1e-3);
        let speed = c.sound_speed(8000.0);
        assert!((speed - 2886.751345948129).abs() < 1e-9);
        // With ν = 0 the longitudinal speed is the bar speed sqrt(E/ρ).
        let m = Material::new(8000.0, 200e9, 0.0, ConstitutiveLaw::LinearElastic).unwrap();
        assert!((m.wave_speed - 5000.0).abs() < 1e-9);
    }

    #[test]
    fn lame_parameters_for_bending_column() {
        let e = 1.7e7;
        let c = lame_from_e_nu(e, 0.45).unwrap();
        assert!((c.mu - e / 2.9).abs() <= 1e-12 * c.mu);
        assert!((c.lambda - e * 0.45 / (1.45 * 0.1)).abs() <= 1e-9 * c.lambda);
        assert_eq!(c.bulk_modulus, c.lambda + 2.0 * c.mu / 3.0);
    }

    #[test]
    fn moduli_round_trip() {
        for &(e, nu) in &[(200e9, 0.0), (1.7e7, 0.45), (1.7e7, 0.4995), (3.0, -0.7), (5e5, 0.49995)] {
            let c = lame_from_e_nu(e, nu).unwrap();
            assert!((c.youngs_modulus() - e).abs() <= 1e-12 * e);
            assert!((c.poisson_ratio() - nu).abs() <= 1e-12 * nu.abs().max(1e-300) || nu == 0.0);
            // Bulk modulus identity in both forms.
            assert!((c.bulk_modulus - e / (3.0 * (1.0 - 2.0 * nu))).abs() <= 1e-9 * c.bulk_modulus);
        }
    }

    #[test]
    fn poisson_ratio_bounds() {
        assert!(lame_from_e_nu(1.0, 0.5).is_err());
        assert!(lame_from_e_nu(1.0, 0.7).is_err());
        assert!(lame_from_e_nu(1.0, -1.0).is_err());
        assert!(lame_from_e_nu(0.0, 0.3).is_err());
    }

    #[test]
    fn green_lagrange_examples() {
        assert_eq!(green_lagrange(&Mat3::identity()), Mat3::zeros());
        let r = Rotation3::from_euler_angles(0.3, -1.1, 2.0).into_inner();
        assert!(max_abs(&green_lagrange(&r)) < 1e-15);
        let e = green_lagrange(&Mat3::from_diagonal(&nalgebra::Vector3::new(1.1, 1.0, 1.0)));
        assert!((e[(0, 0)] - 0.105).abs() < 1e-15);
        assert_eq!(e[(1, 1)], 0.0);
    }

    #[test]
    fn linear_elastic_examples() {
        assert_eq!(linear_elastic_s(&Mat3::zeros(), 3.0, 2.0), Mat3::zeros());
        let eps = 1e-3;
        let s = linear_elastic_s(&(Mat3::identity() * eps), 3.0, 2.0);
        assert!((s - Mat3::identity() * (13.0 * eps)).norm() < 1e-15);
        let s = linear_elastic_s(
            &Mat3::from_diagonal(&nalgebra::Vector3::new(0.105, 0.0, 0.0)),
            0.0,
            100e9,
        );
        assert!((s[(0, 0)] - 21e9).abs() < 1e-3);
        assert_eq!(s[(1, 1)], 0.0);
    }

    #[test]
    fn neo_hookean_reference_state_is_stress_free() {
        let s = neo_hookean_s(&Mat3::identity(), 5.0e7, 6.0e6, 0).unwrap();
        assert!(max_abs(&s) == 0.0);
    }

    #[test]
    fn neo_hookean_rejects_inversion() {
        let f = Mat3::from_diagonal(&nalgebra::Vector3::new(-1.0, 1.0, 1.0));
        match neo_hookean_s(&f, 1.0, 1.0, 42) {
            Err(Error::ElementInversion { particle, det }) => {
                assert_eq!(particle, 42);
                assert_eq!(det, -1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn neo_hookean_matches_energy_gradient_over_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = lame_from_e_nu(1.7e7, 0.45).unwrap();
        for _ in 0..100 {
            let f = random_deformation(&mut rng);
            let s = neo_hookean_s(&f, c.lambda, c.mu, 0).unwrap();
            let fd = energy_gradient_oracle(&f, c.lambda, c.mu, 1e-6).unwrap();
            let rel = max_abs(&(s - fd)) / max_abs(&s).max(c.mu);
            assert!(rel < 1e-5, "rel = {rel:e}");
            assert!((s - s.transpose()).norm() == 0.0);
        }
    }

    #[test]
    fn neo_hookean_small_strain_limit_is_linear_elastic() {
        let c = lame_from_e_nu(1.7e7, 0.45).unwrap();
        let a = Mat3::new(0.3, -0.2, 0.5, 0.1, 0.9, -0.4, 0.7, 0.2, -0.6);
        let f = Mat3::identity() + a * 1e-7;
        let s_nh = neo_hookean_s(&f, c.lambda, c.mu, 0).unwrap();
        let s_le = linear_elastic_s(&green_lagrange(&f), c.lambda, c.mu);
        let rel = max_abs(&(s_nh - s_le)) / max_abs(&s_le);
        assert!(rel < 1e-4, "rel = {rel:e}");
    }

    #[test]
    fn strain_is_frame_indifferent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let r = random_rotation(&mut rng);
            let f = random_deformation(&mut rng);
            let diff = green_lagrange(&(r * f)) - green_lagrange(&f);
            assert!(max_abs(&diff) < 1e-12);
        }
    }

    #[test]
    fn damping_stress_examples() {
        let f = Mat3::new(1.1, 0.2, 0.0, -0.1, 0.95, 0.3, 0.0, 0.05, 1.02);
        assert_eq!(kv_damping_s(&f, &Mat3::zeros(), 3.0).unwrap(), Mat3::zeros());
        assert!(kv_damping_s(&f, &Mat3::identity(), -1.0).is_err());

        // Rigid rotation R(t) = exp(t W): Ṙ = W R, so ṘᵀR + RᵀṘ = Rᵀ(Wᵀ + W)R = 0.
        let w = Mat3::new(0.0, -0.4, 0.2, 0.4, 0.0, -0.9, -0.2, 0.9, 0.0);
        let r = Rotation3::from_euler_angles(0.4, 0.1, -0.7).into_inner();
        let sd = kv_damping_s(&r, &(w * r), 1e6).unwrap();
        assert!(max_abs(&sd) < 1e-9);

        let (s, s_dot, pi) = (0.2, -3.0, 7.5);
        let f = Mat3::from_diagonal(&nalgebra::Vector3::new(1.0 + s, 1.0, 1.0));
        let fd = Mat3::from_diagonal(&nalgebra::Vector3::new(s_dot, 0.0, 0.0));
        let sd = kv_damping_s(&f, &fd, pi).unwrap();
        assert!((sd[(0, 0)] - pi * (1.0 + s) * s_dot).abs() < 1e-13);
        assert_eq!(sd[(1, 1)], 0.0);
    }

    #[test]
    fn damping_stress_is_coefficient_times_strain_rate() {
        // F(t) = I + t A + t² B, differentiate E(F(t)) numerically.
        let a = Mat3::new(0.3, -0.1, 0.2, 0.5, -0.2, 0.1, 0.0, 0.4, 0.1);
        let b = Mat3::new(-0.2, 0.1, 0.0, 0.3, 0.2, -0.1, 0.1, 0.0, 0.3);
        let path = |t: f64| Mat3::identity() + a * t + b * (t * t);
        let rate = |t: f64| a + b * (2.0 * t);
        let pi = 2.5;
        for &t in &[0.0, 0.3, 0.8] {
            let step = 1e-5;
            let de_dt = (green_lagrange(&path(t + step)) - green_lagrange(&path(t - step))) / (2.0 * step);
            let sd = kv_damping_s(&path(t), &rate(t), pi).unwrap();
            assert!(max_abs(&(sd - de_dt * pi)) < 1e-8);
        }
    }

    #[test]
    fn damper_never_creates_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let f = random_deformation(&mut rng);
            let mut f_rate = Mat3::zeros();
            for v in f_rate.iter_mut() {
                *v = rng.gen_range(-10.0..10.0);
            }
            let pi = rng.gen_range(0.0..1e4);
            let sd = kv_damping_s(&f, &f_rate, pi).unwrap();
            let e_rate = (f_rate.transpose() * f + f.transpose() * f_rate) * 0.5;
            assert!(sd.dot(&e_rate) >= 0.0);
        }
    }

    #[test]
    fn damping_coefficient_properties() {
        assert_eq!(damping_coefficient(1100.0, 2270.0, 0.1, 0.0), 0.0);
        let base = damping_coefficient(1100.0, 2270.0, 0.1, 0.5);
        assert_eq!(damping_coefficient(1100.0, 2270.0, 0.2, 0.5), 2.0 * base);
    }

    #[test]
    fn damping_coefficient_for_twisting_material() {
        // ρ = 1100, E = 0.017 GPa, ν = 0.4995, dp = 1/8, h = 1.15 dp.
        let m = Material::new(1100.0, 0.017e9, 0.4995, ConstitutiveLaw::NeoHookean).unwrap();
        let h = 1.15 * 0.125;
        // Chained by hand: λ = Eν/((1+ν)(1-2ν)), μ = E/(2(1+ν)), K = λ + 2μ/3.
        let lambda: f64 = 0.017e9 * 0.4995 / (1.4995 * (1.0 - 0.999));
        let mu = 0.017e9 / 2.999;
        let k = lambda + 2.0 * mu / 3.0;
        let expected = 0.5 * 1100.0 * (k / 1100.0).sqrt() * h;
        assert!((m.damping_coefficient(h) - expected).abs() <= 1e-9 * expected);
        // Frozen value from the same chain: K = 5.6667e9 Pa, c = 2269.7 m/s.
        assert!((m.damping_coefficient(h) - 1.794478e5).abs() < 1.0, "{}", m.damping_coefficient(h));
    }

    #[test]
    fn first_pk_examples() {
        let s = Mat3::new(1.0, 2.0, 3.0, 2.0, 4.0, 5.0, 3.0, 5.0, 6.0);
        assert_eq!(first_pk(&Mat3::identity(), &s), s);
        assert_eq!(first_pk(&s, &Mat3::zeros()), Mat3::zeros());
        let r = Rotation3::from_euler_angles(1.0, 0.5, -0.2).into_inner();
        let p = first_pk(&r, &s);
        assert!(max_abs(&(p.transpose() * p - s * s)) < 1e-12);
    }

    #[test]
    fn disabled_damping_yields_zero_coefficient() {
        let m = Material::new(8000.0, 200e9, 0.0, ConstitutiveLaw::LinearElastic).unwrap();
        assert!(m.damping_coefficient(0.1) > 0.0);
        assert_eq!(m.with_alpha(0.0).unwrap().damping_coefficient(0.1), 0.0);
        assert_eq!(m.without_damping().damping_coefficient(0.1), 0.0);
        assert!(m.with_alpha(-0.1).is_err());
    }
}
