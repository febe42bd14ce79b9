use log::{debug, info};

use super::integrator::{step_position_verlet, ForceModel, TlsphModel};
use super::operators::{compute_correction_matrices, stable_timestep};
use super::system::{Constraint, ParticleSystem};
use crate::diagnostics::{conservation_report, ConservationReport, ProbeSeries, ProbeSpec, Snapshot};
use crate::kernel::{ReferenceNeighborhood, SmoothingKernel};
use crate::materials::Material;
use crate::{Error, Result, Vec3};

/// Particle body ready for simulation.
#[derive(Debug, Clone)]
pub struct Body {
    pub positions: Vec<Vec3>,
    pub volumes: Vec<f64>,
    pub velocities: Vec<Vec3>,
    pub constraints: Vec<Constraint>,
}

impl Body {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Fully resolved run description.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub case: String,
    pub body: Body,
    pub material: Material,
    pub dp: f64,
    pub h: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub gravity: Vec3,
    /// Probe and conservation sampling interval (s).
    pub output_interval: f64,
    /// Snapshot interval (s); `None` keeps only the initial and final states.
    pub snapshot_interval: Option<f64>,
    pub probes: Vec<ProbeSpec>,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("dp", self.dp)?;
        positive("h", self.h)?;
        positive("output_interval", self.output_interval)?;
        if let Some(s) = self.snapshot_interval {
            positive("snapshot_interval", s)?;
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("CFL must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("end time must be non-negative, got {}", self.t_end)));
        }
        let n = self.body.len();
        if self.body.volumes.len() != n || self.body.velocities.len() != n || self.body.constraints.len() != n {
            return Err(Error::Config("body arrays have inconsistent lengths".into()));
        }
        if n == 0 {
            return Err(Error::Config("body contains no particles".into()));
        }
        Ok(())
    }
}

/// A TL-SPH body together with its force model and clock.
#[derive(Debug, Clone)]
pub struct Solver {
    pub system: ParticleSystem,
    pub model: TlsphModel,
    pub h: f64,
    pub cfl: f64,
    pub time: f64,
    pub steps: usize,
}

impl Solver {
    /// Builds neighborhoods and correction matrices, then evaluates the initial
    /// deformation rates and accelerations.
    pub fn new(mut system: ParticleSystem, material: Material, h: f64, cfl: f64, gravity: Vec3) -> Result<Self> {
        let kernel = SmoothingKernel::new(h)?;
        let hood = ReferenceNeighborhood::build(&system.reference_positions, &kernel)?;
        system.correction = compute_correction_matrices(&system.volumes, &hood)?;
        let mut model = TlsphModel::new(hood, material, h, gravity);
        system.enforce_constraint_velocities();
        model.update_rates(&mut system)?;
        model.update_accelerations(&mut system)?;
        Ok(Self {
            system,
            model,
            h,
            cfl,
            time: 0.0,
            steps: 0,
        })
    }

    pub fn material(&self) -> &Material {
        &self.model.material
    }

    pub fn stable_timestep(&self) -> Result<f64> {
        stable_timestep(&self.system, self.model.material.wave_speed, self.h, self.cfl)
    }

    pub fn step(&mut self, dt: f64) -> Result<()> {
        step_position_verlet(&mut self.system, dt, &mut self.model).map_err(|e| Error::Step {
            step: self.steps + 1,
            time: self.time,
            source: Box::new(e),
        })?;
        self.time += dt;
        self.steps += 1;
        Ok(())
    }

    /// Steps with the stable timestep until `time` reaches `t` exactly.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        while self.time < t {
            let dt = self.timestep_for_step()?;
            if self.time + dt >= t {
                self.step(t - self.time)?;
                self.time = t;
            } else {
                self.step(dt)?;
            }
        }
        Ok(())
    }

    fn timestep_for_step(&self) -> Result<f64> {
        self.stable_timestep().map_err(|e| Error::Step {
            step: self.steps + 1,
            time: self.time,
            source: Box::new(e),
        })
    }

    pub fn conservation(&self) -> ConservationReport {
        conservation_report(&self.system, &self.model.material)
    }
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub solver: Solver,
    pub probes: Vec<ProbeSeries>,
    pub snapshots: Vec<Snapshot>,
    pub conservation: Vec<(f64, ConservationReport)>,
    pub steps: usize,
}

impl SimulationResult {
    pub fn probe(&self, name: &str) -> Option<&ProbeSeries> {
        self.probes.iter().find(|p| p.name == name)
    }
}

/// Builds a solver for the configured body.
pub fn build_solver(config: &SimulationConfig) -> Result<Solver> {
    config.validate()?;
    let mut system = ParticleSystem::new(
        config.body.positions.clone(),
        config.body.volumes.clone(),
        config.material.rho0,
    )?;
    system.constraints = config.body.constraints.clone();
    system.set_velocities(config.body.velocities.clone())?;
    Solver::new(system, config.material, config.h, config.cfl, config.gravity)
}

/// A periodic output stream whose event times are exact multiples of the interval.
struct Cadence {
    interval: f64,
    next: usize,
}

impl Cadence {
    fn next_time(&self) -> f64 {
        self.next as f64 * self.interval
    }

    /// Fires when `time` has reached the next event, allowing for roundoff.
    fn due(&mut self, time: f64) -> bool {
        if self.next_time() <= time + 1e-9 * self.interval {
            while self.next_time() <= time + 1e-9 * self.interval {
                self.next += 1;
            }
            true
        } else {
            false
        }
    }
}

/// Runs the configured case to `t_end`, collecting probes, conservation
/// samples and snapshots. Identical configurations give bitwise-identical results.
pub fn run_simulation(config: &SimulationConfig) -> Result<SimulationResult> {
    run_simulation_with(config, |_| Ok(()))
}

/// Like [`run_simulation`], calling `on_snapshot` as each snapshot is taken.
pub fn run_simulation_with(
    config: &SimulationConfig,
    mut on_snapshot: impl FnMut(&Snapshot) -> Result<()>,
) -> Result<SimulationResult> {
    let mut solver = build_solver(config)?;
    let mut probes = config
        .probes
        .iter()
        .map(|p| ProbeSeries::bind(p, &solver.system.reference_positions))
        .collect::<Result<Vec<_>>>()?;
    let mut snapshots = Vec::new();
    let mut conservation = Vec::new();
    info!(
        "case {}: {} particles, h = {:.4e}, c = {:.4e} m/s, wave speed {:.4e} m/s, damping {}",
        config.case,
        solver.system.len(),
        config.h,
        config.material.sound_speed,
        config.material.wave_speed,
        solver
            .model
            .damping_coefficient
            .map_or("off".to_string(), |p| format!("{p:.4e} Pa s")),
    );

    let mut outputs = Cadence {
        interval: config.output_interval,
        next: 0,
    };
    let mut snaps = config.snapshot_interval.map(|interval| Cadence { interval, next: 0 });

    let mut record = |solver: &Solver, outputs: &mut Cadence, snaps: &mut Option<Cadence>, last: bool| -> Result<()> {
        let t = solver.time;
        if outputs.due(t) || last {
            for p in probes.iter_mut() {
                if p.times.last().is_none_or(|&prev| prev < t) {
                    p.record(t, &solver.system);
                }
            }
            if conservation.last().is_none_or(|&(prev, _)| prev < t) {
                conservation.push((t, solver.conservation()));
            }
        }
        let snap_due = snaps.as_mut().map_or(t == 0.0, |s| s.due(t));
        let fresh = snapshots.last().is_none_or(|s: &Snapshot| s.time < t);
        if (snap_due || last) && fresh {
            let snap = Snapshot::capture(t, &solver.system);
            on_snapshot(&snap)?;
            snapshots.push(snap);
        }
        Ok(())
    };

    record(&solver, &mut outputs, &mut snaps, config.t_end == 0.0)?;
    while solver.time < config.t_end {
        let mut next_event = outputs.next_time().min(config.t_end);
        if let Some(s) = &snaps {
            next_event = next_event.min(s.next_time());
        }
        let dt = solver.timestep_for_step()?;
        if solver.time + dt >= next_event {
            solver.step(next_event - solver.time)?;
            solver.time = next_event;
        } else {
            solver.step(dt)?;
        }
        let last = solver.time >= config.t_end;
        record(&solver, &mut outputs, &mut snaps, last)?;
        if solver.steps % 1000 == 0 {
            debug!("step {} t = {:.6e}", solver.steps, solver.time);
        }
    }
    info!("case {} finished: {} steps to t = {:.6e} s", config.case, solver.steps, solver.time);
    let steps = solver.steps;
    Ok(SimulationResult {
        solver,
        probes,
        snapshots,
        conservation,
        steps,
    })
}
