//! Independent reference solutions.
//!
//! None of these route through the SPH operators: the cable solution comes from
//! d'Alembert's construction (cross-checked by a 1D finite-volume solver), the
//! affine oracle is closed-form kinematics, and the energy-gradient oracle
//! differentiates the neo-Hookean strain energy numerically.

use crate::{Error, Mat3, Result, Vec3};

/// One-dimensional elastic bar fixed at `x = 0`, free at `x = length`, with an
/// initial velocity `v0` on `[loaded_from, length]` and zero initial strain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CableOracle {
    pub length: f64,
    pub wave_speed: f64,
    pub v0: f64,
    pub loaded_from: f64,
}

impl CableOracle {
    /// The cable benchmark: 10 m steel bar, right quarter moving at 5 m/s.
    pub fn benchmark() -> Self {
        Self::new(10.0, 200e9, 8000.0, 5.0, 7.5)
    }

    /// Bar wave speed `sqrt(E/ρ)`; exact for ν = 0, where lateral motion decouples.
    pub fn new(length: f64, youngs_modulus: f64, rho0: f64, v0: f64, loaded_from: f64) -> Self {
        Self {
            length,
            wave_speed: (youngs_modulus / rho0).sqrt(),
            v0,
            loaded_from,
        }
    }

    /// Initial velocity extended to the real line: odd about the fixed end,
    /// even about the free end, period `4L`.
    fn extended_velocity(&self, y: f64) -> f64 {
        let l = self.length;
        let y = wrap(y, 4.0 * l);
        let (sign, y) = if y < 0.0 { (-1.0, -y) } else { (1.0, y) };
        let folded = if y > l { 2.0 * l - y } else { y };
        if folded >= self.loaded_from {
            sign * self.v0
        } else {
            0.0
        }
    }

    /// Antiderivative of the extended velocity, `∫₀^y V(s) ds`.
    fn primitive(&self, y: f64) -> f64 {
        let l = self.length;
        // V is odd with zero mean over a period, so the primitive is even and 4L-periodic.
        let y = wrap(y, 4.0 * l).abs();
        let on_bar = |s: f64| self.v0 * (s - self.loaded_from).max(0.0);
        if y <= l {
            on_bar(y)
        } else {
            2.0 * on_bar(l) - on_bar(2.0 * l - y)
        }
    }

    pub fn velocity(&self, x: f64, t: f64) -> f64 {
        let ct = self.wave_speed * t;
        0.5 * (self.extended_velocity(x - ct) + self.extended_velocity(x + ct))
    }

    /// Exact time integral of [`Self::velocity`] from 0 to `t`.
    pub fn displacement(&self, x: f64, t: f64) -> f64 {
        let ct = self.wave_speed * t;
        (self.primitive(x + ct) - self.primitive(x - ct)) / (2.0 * self.wave_speed)
    }

    /// Axial momentum per unit density and cross-section, `∫₀^L v dx`.
    pub fn momentum_density(&self, t: f64) -> f64 {
        let ct = self.wave_speed * t;
        let l = self.length;
        0.5 * (self.primitive(l - ct) - self.primitive(-ct) + self.primitive(l + ct)
            - self.primitive(ct))
    }

    /// Times at which a velocity discontinuity passes `x`, within `[0, t_max]`.
    pub fn arrival_times(&self, x: f64, t_max: f64) -> Vec<f64> {
        let l = self.length;
        let c = self.wave_speed;
        // Jumps of the extended data sit at ±a + 4kL and ±(2L - a) + 4kL.
        let mut jumps = Vec::new();
        let period = 4.0 * l;
        let reach = c * t_max + period;
        let mut k = -((reach / period).ceil() as i64) - 1;
        while (k as f64) * period <= reach + period {
            let base = k as f64 * period;
            for s in [self.loaded_from, -self.loaded_from, 2.0 * l - self.loaded_from, -(2.0 * l - self.loaded_from)] {
                jumps.push(base + s);
            }
            k += 1;
        }
        let mut times: Vec<f64> = jumps
            .iter()
            .flat_map(|&y| [(x - y) / c, (y - x) / c])
            .filter(|&t| t > 0.0 && t <= t_max)
            .collect();
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        times.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        times
    }

    /// Tip velocity and displacement at `x = length` for each time.
    pub fn tip_history(&self, times: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let x = self.length;
        (
            times.iter().map(|&t| self.velocity(x, t)).collect(),
            times.iter().map(|&t| self.displacement(x, t)).collect(),
        )
    }
}

fn wrap(y: f64, period: f64) -> f64 {
    let half = 0.5 * period;
    let r = (y + half).rem_euclid(period) - half;
    if r >= half {
        r - period
    } else {
        r
    }
}

/// Tip history of the cable benchmark from the characteristics construction.
pub fn cable_tip_history(times: &[f64]) -> (Vec<f64>, Vec<f64>) {
    CableOracle::benchmark().tip_history(times)
}

/// Godunov finite-volume solution of the same bar problem, used to cross-check
/// [`CableOracle`]. Works in characteristic variables `v ∓ c ε`.
#[derive(Debug, Clone)]
pub struct BarFiniteVolume {
    oracle: CableOracle,
    cells: usize,
    courant: f64,
}

/// Tip samples on the finite-volume time grid.
#[derive(Debug, Clone)]
pub struct FiniteVolumeHistory {
    pub dt: f64,
    /// Tip velocity during step `n`, i.e. on `[n dt, (n+1) dt)`.
    pub velocity: Vec<f64>,
    /// Tip displacement at `n dt`.
    pub displacement: Vec<f64>,
}

impl FiniteVolumeHistory {
    pub fn velocity_at(&self, t: f64) -> f64 {
        let n = ((t / self.dt).floor() as usize).min(self.velocity.len() - 1);
        self.velocity[n]
    }

    pub fn displacement_at(&self, t: f64) -> f64 {
        let s = t / self.dt;
        let n = (s.floor() as usize).min(self.displacement.len() - 2);
        let frac = s - n as f64;
        self.displacement[n] * (1.0 - frac) + self.displacement[n + 1] * frac
    }
}

impl BarFiniteVolume {
    pub fn new(oracle: CableOracle, cells: usize, courant: f64) -> Result<Self> {
        if cells < 2 || !(courant > 0.0 && courant <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "finite-volume bar needs >= 2 cells and 0 < Courant <= 1 (got {cells}, {courant})"
            )));
        }
        Ok(Self {
            oracle,
            cells,
            courant,
        })
    }

    pub fn run(&self, t_end: f64) -> FiniteVolumeHistory {
        let n = self.cells;
        let o = &self.oracle;
        let dx = o.length / n as f64;
        let dt = self.courant * dx / o.wave_speed;
        let sigma = self.courant;

        // ε = 0 initially, so both characteristic variables start equal to v.
        let initial: Vec<f64> = (0..n)
            .map(|i| {
                let left = i as f64 * dx;
                let right = left + dx;
                // Cell average of the initial step profile.
                let covered = (right - o.loaded_from.max(left)).clamp(0.0, dx);
                o.v0 * covered / dx
            })
            .collect();
        let mut right_going = initial.clone();
        let mut left_going = initial;
        let mut next_r = vec![0.0; n];
        let mut next_l = vec![0.0; n];

        let steps = (t_end / dt).ceil() as usize + 1;
        let mut velocity = Vec::with_capacity(steps);
        let mut displacement = Vec::with_capacity(steps + 1);
        displacement.push(0.0);
        let mut u_tip = 0.0;
        for _ in 0..steps {
            let tip = right_going[n - 1];
            velocity.push(tip);
            u_tip += dt * tip;
            displacement.push(u_tip);

            // Fixed end: v = 0 mirrors the left-going wave into the right-going one.
            let ghost_left = -left_going[0];
            // Free end: ε = 0 mirrors the right-going wave with the same sign.
            let ghost_right = right_going[n - 1];
            for i in 0..n {
                let upwind_r = if i == 0 { ghost_left } else { right_going[i - 1] };
                let upwind_l = if i + 1 == n { ghost_right } else { left_going[i + 1] };
                next_r[i] = right_going[i] - sigma * (right_going[i] - upwind_r);
                next_l[i] = left_going[i] + sigma * (upwind_l - left_going[i]);
            }
            std::mem::swap(&mut right_going, &mut next_r);
            std::mem::swap(&mut left_going, &mut next_l);
        }
        FiniteVolumeHistory {
            dt,
            velocity,
            displacement,
        }
    }
}

/// Expected kinematics for an affine motion `u = A r⁰ + b`, `v = A r⁰`.
#[derive(Debug, Clone)]
pub struct AffineExpectation {
    pub deformation_gradient: Mat3,
    pub rate: Mat3,
    pub displacements: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
    /// Particles whose full kernel support lies inside the lattice hull.
    pub interior: Vec<bool>,
}

pub fn affine_motion_oracle(a: &Mat3, b: &Vec3, positions: &[Vec3], h: f64) -> AffineExpectation {
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for p in positions {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let margin = 2.0 * h;
    let interior = positions
        .iter()
        .map(|p| (0..3).all(|k| p[k] - lo[k] > margin && hi[k] - p[k] > margin))
        .collect();
    AffineExpectation {
        deformation_gradient: a + Mat3::identity(),
        rate: *a,
        displacements: positions.iter().map(|p| a * p + b).collect(),
        velocities: positions.iter().map(|p| a * p).collect(),
        interior,
    }
}

/// Second Piola-Kirchhoff stress by central differences of the neo-Hookean
/// strain energy with respect to the Green-Lagrange strain.
pub fn energy_gradient_oracle(f: &Mat3, lambda: f64, mu: f64, step: f64) -> Result<Mat3> {
    if !(f.determinant() > 0.0) {
        return Err(Error::ElementInversion {
            particle: 0,
            det: f.determinant(),
        });
    }
    let energy = |e: &Mat3| -> f64 {
        let c = Mat3::identity() + e * 2.0;
        let ln_j = 0.5 * c.determinant().ln();
        mu * e.trace() - mu * ln_j + 0.5 * lambda * ln_j * ln_j
    };
    let e0 = (f.transpose() * f - Mat3::identity()) * 0.5;
    let mut s = Mat3::zeros();
    for r in 0..3 {
        for c in r..3 {
            let mut bump = Mat3::zeros();
            bump[(r, c)] = step;
            bump[(c, r)] = step;
            let diff = energy(&(e0 + bump)) - energy(&(e0 - bump));
            // An off-diagonal bump moves two equal components at once.
            let v = if r == c { diff / (2.0 * step) } else { diff / (4.0 * step) };
            s[(r, c)] = v;
            s[(c, r)] = v;
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{lame_from_e_nu, neo_hookean_s};

    #[test]
    fn benchmark_wave_speed_and_first_arrival() {
        let o = CableOracle::benchmark();
        assert_eq!(o.wave_speed, 5000.0);
        let (v, _) = o.tip_history(&[0.0, 1e-4, 4.9e-4]);
        assert_eq!(v, vec![5.0, 5.0, 5.0]);
        let arrivals = o.arrival_times(10.0, 4e-3);
        assert!((arrivals[0] - 5e-4).abs() < 1e-15);
        assert!((arrivals[1] - 3.5e-3).abs() < 1e-15);
    }

    #[test]
    fn tip_plateaus_over_four_milliseconds() {
        let o = CableOracle::benchmark();
        assert_eq!(o.velocity(10.0, 0.25e-3), 5.0);
        assert_eq!(o.velocity(10.0, 1.25e-3), 0.0);
        assert_eq!(o.velocity(10.0, 3.0e-3), 0.0);
        assert_eq!(o.velocity(10.0, 3.75e-3), -5.0);
        assert!((o.displacement(10.0, 2e-3) - 2.5e-3).abs() < 1e-15);
        assert!((o.displacement(10.0, 3e-4) - 1.5e-3).abs() < 1e-15);
    }

    #[test]
    fn displacement_is_integral_of_velocity() {
        let o = CableOracle::benchmark();
        for &x in &[10.0, 9.975, 8.0, 3.3] {
            let n = 400_000;
            let t_end = 4e-3;
            let dt = t_end / n as f64;
            let mut acc = 0.0;
            let mut prev = o.velocity(x, 0.0);
            for k in 1..=n {
                let v = o.velocity(x, k as f64 * dt);
                acc += 0.5 * (prev + v) * dt;
                prev = v;
            }
            let exact = o.displacement(x, t_end);
            // Trapezoid error only at the discontinuities: at most ½ dt · jump per crossing.
            let crossings = o.arrival_times(x, t_end).len() as f64;
            assert!((acc - exact).abs() <= crossings * 0.5 * dt * 10.0 + 1e-15, "x = {x}");
        }
        // Between arrivals the velocity is constant, so the integral is exact.
        let t1 = 2e-4;
        let t2 = 4e-4;
        let by_rate = o.displacement(10.0, t1) + (t2 - t1) * o.velocity(10.0, 3e-4);
        assert!((by_rate - o.displacement(10.0, t2)).abs() <= 1e-12 * o.displacement(10.0, t2));
    }

    #[test]
    fn momentum_conserved_until_wall_interaction() {
        let o = CableOracle::benchmark();
        let initial = o.momentum_density(0.0);
        assert!((initial - 12.5).abs() < 1e-12);
        // Left-going front from x = 7.5 reaches the wall at 1.5 ms.
        for k in 0..150 {
            let t = k as f64 * 1e-5;
            assert!((o.momentum_density(t) - initial).abs() < 1e-12);
        }
        assert!((o.momentum_density(2.0e-3) - initial).abs() > 1.0);
    }

    #[test]
    fn finite_volume_agrees_with_characteristics() {
        let o = CableOracle::benchmark();
        let fv = BarFiniteVolume::new(o, 10_000, 1.0).unwrap().run(4e-3);
        let jumps = o.arrival_times(10.0, 4e-3);
        let scale = o.v0;
        let mut checked = 0;
        for k in 0..=400 {
            let t = k as f64 * 1e-5;
            let near_jump = jumps.iter().any(|&tj| (t - tj).abs() <= 2.0 * fv.dt);
            if !near_jump {
                let dv = (fv.velocity_at(t) - o.velocity(10.0, t)).abs();
                assert!(dv <= 1e-3 * scale, "t = {t}: dv = {dv}");
                checked += 1;
            }
            let du = (fv.displacement_at(t) - o.displacement(10.0, t)).abs();
            assert!(du <= 1e-3 * 2.5e-3, "t = {t}: du = {du}");
        }
        assert!(checked > 390);
    }

    #[test]
    fn finite_volume_rejects_bad_parameters() {
        let o = CableOracle::benchmark();
        assert!(BarFiniteVolume::new(o, 1, 1.0).is_err());
        assert!(BarFiniteVolume::new(o, 100, 1.5).is_err());
    }

    #[test]
    fn affine_oracle_examples() {
        let pts: Vec<Vec3> = (0..6)
            .flat_map(|i| (0..6).flat_map(move |j| (0..6).map(move |k| Vec3::new(i as f64, j as f64, k as f64))))
            .collect();
        let zero = affine_motion_oracle(&Mat3::zeros(), &Vec3::zeros(), &pts, 0.4);
        assert_eq!(zero.deformation_gradient, Mat3::identity());
        let w = Mat3::new(0.0, -1.0, 2.0, 1.0, 0.0, -3.0, -2.0, 3.0, 0.0);
        let rot = affine_motion_oracle(&w, &Vec3::zeros(), &pts, 0.4);
        assert_eq!(rot.rate, -rot.rate.transpose());
        // 2h = 0.8: only coordinates 1..=4 are interior on each axis.
        assert_eq!(rot.interior.iter().filter(|&&b| b).count(), 64);
    }

    #[test]
    fn energy_oracle_reference_state_and_closed_form() {
        let c = lame_from_e_nu(1.7e7, 0.45).unwrap();
        let s0 = energy_gradient_oracle(&Mat3::identity(), c.lambda, c.mu, 1e-6).unwrap();
        assert!(s0.amax() < 1e-8 * c.mu);

        let f = Mat3::from_diagonal(&Vec3::new(1.2, 0.9, 1.05));
        let closed = neo_hookean_s(&f, c.lambda, c.mu, 0).unwrap();
        let fd = energy_gradient_oracle(&f, c.lambda, c.mu, 1e-6).unwrap();
        assert!((fd - closed).amax() / closed.amax() < 1e-5);
        assert!(energy_gradient_oracle(&(-Mat3::identity()), c.lambda, c.mu, 1e-6).is_err());
    }

    #[test]
    fn energy_oracle_is_second_order() {
        let c = lame_from_e_nu(1.0, 0.3).unwrap();
        let f = Mat3::new(1.2, 0.1, -0.05, 0.08, 0.9, 0.1, 0.0, -0.1, 1.05);
        let closed = neo_hookean_s(&f, c.lambda, c.mu, 0).unwrap();
        let err = |h: f64| (energy_gradient_oracle(&f, c.lambda, c.mu, h).unwrap() - closed).amax();
        let ratio = err(2e-3) / err(1e-3);
        assert!((ratio - 4.0).abs() < 0.2, "ratio = {ratio}");
    }
}
