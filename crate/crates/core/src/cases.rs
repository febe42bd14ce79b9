//! Benchmark presets and the flat run configuration.
//!
//! A [`RunConfig`] is a flat key-value record: presets fill every field, a JSON
//! document may override any subset, and [`RunConfig::resolve`] turns it into a
//! particle body ready for the solver.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use log::{info, warn};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::diagnostics::{ProbeQuantity, ProbeSpec};
use crate::geometry::{
    fill_mesh_with_lattice, fixtures, generate_lattice_box, initial_velocity_field, parse_stl, BodyRegion,
    InitialVelocity, RegionShape, RegionTag, TriangleMesh,
};
use crate::materials::{ConstitutiveLaw, Material};
use crate::solver::{Body, Constraint, SimulationConfig};
use crate::{Error, Result, Vec3};

/// Ratio of smoothing length to particle spacing.
pub const SMOOTHING_RATIO: f64 = 1.15;
/// Angular velocity amplitudes studied for the twisting column (rad/s).
pub const TWISTING_OMEGAS: [f64; 3] = [105.0, 200.0, 300.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseId {
    /// 10 m elastic bar, right quarter launched at 5 m/s.
    Cable,
    /// 1 × 1 × 6 m column with a uniform initial velocity.
    Bending,
    /// 1 × 6 × 1 m column with a sinusoidal twist.
    Twisting,
    /// Closed STL mesh pulled apart by velocity bands at its axial ends.
    Stl,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [CaseId::Cable, CaseId::Bending, CaseId::Twisting, CaseId::Stl];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::Cable => "cable",
            CaseId::Bending => "bending",
            CaseId::Twisting => "twisting",
            CaseId::Stl => "stl",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            CaseId::Cable => "elastic wave in a 10 x 0.2 x 0.2 m bar, left end fixed, right quarter at 5 m/s",
            CaseId::Bending => "neo-Hookean 1 x 1 x 6 m column, base clamped, initial velocity (5*sqrt(3), 5, 0)",
            CaseId::Twisting => "nearly incompressible column, base clamped, sinusoidal twist of amplitude omega0",
            CaseId::Stl => "lattice-filled STL body, opposite +/-5 m/s bands at its axial ends",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown case '{s}' (expected cable, bending, twisting or stl)")))
    }
}

/// Every tunable of a run. Serialized flat; `h` is derived and only appears
/// in manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: CaseId,
    /// Lattice spacing (m).
    pub dp: f64,
    /// `h / dp`.
    pub smoothing_ratio: f64,
    pub cfl: f64,
    /// End time (s).
    pub t_end: f64,
    /// Damping scale; 0 disables the damper.
    pub alpha: f64,
    pub rho0: f64,
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub law: ConstitutiveLaw,
    pub gravity: [f64; 3],
    /// Probe and conservation sampling interval (s).
    pub output_interval: f64,
    /// Snapshot interval (s); 0 writes only the initial and final states.
    pub snapshot_interval: f64,
    /// Twisting amplitude (rad/s).
    pub omega0: f64,
    /// STL file; the bundled lattice tube is used when absent.
    pub stl: Option<String>,
    /// Speed of the axial end bands of the STL case (m/s).
    pub band_speed: f64,
    /// Loading axis of the STL case; the longest bounding-box axis when absent.
    pub load_axis: Option<usize>,
    /// Worker threads; all cores when absent. Results do not depend on it.
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn preset(case: CaseId) -> Self {
        let base = RunConfig {
            case,
            dp: 0.125,
            smoothing_ratio: SMOOTHING_RATIO,
            cfl: 0.6,
            t_end: 1.0,
            alpha: Material::DEFAULT_ALPHA,
            rho0: 1100.0,
            youngs_modulus: 1.7e7,
            poisson_ratio: 0.45,
            law: ConstitutiveLaw::NeoHookean,
            gravity: [0.0; 3],
            output_interval: 5e-3,
            snapshot_interval: 0.1,
            omega0: 105.0,
            stl: None,
            band_speed: 5.0,
            load_axis: None,
            threads: None,
        };
        match case {
            CaseId::Cable => RunConfig {
                dp: 0.05,
                t_end: 2e-3,
                rho0: 8000.0,
                youngs_modulus: 200e9,
                poisson_ratio: 0.0,
                law: ConstitutiveLaw::LinearElastic,
                output_interval: 1e-5,
                snapshot_interval: 5e-4,
                ..base
            },
            CaseId::Bending => base,
            CaseId::Twisting => RunConfig {
                t_end: 0.3,
                poisson_ratio: 0.4995,
                output_interval: 1e-3,
                snapshot_interval: 0.03,
                ..base
            },
            CaseId::Stl => RunConfig {
                dp: 0.05,
                t_end: 0.02,
                output_interval: 2e-4,
                snapshot_interval: 2e-3,
                ..base
            },
        }
    }

    pub fn h(&self) -> f64 {
        self.smoothing_ratio * self.dp
    }

    /// Applies the keys of a flat JSON object on top of `self`. Unknown keys
    /// and type mismatches are configuration errors. A derived `h` key is
    /// accepted when it agrees with `smoothing_ratio * dp`.
    pub fn apply_json(&mut self, overrides: &Value) -> Result<()> {
        let Value::Object(map) = overrides else {
            return Err(Error::Config("configuration must be a JSON object".into()));
        };
        let mut merged = match serde_json::to_value(&*self) {
            Ok(Value::Object(m)) => m,
            _ => unreachable!("RunConfig serializes to an object"),
        };
        let mut h = None;
        for (key, value) in map {
            if key == "h" {
                h = Some(value.as_f64().ok_or_else(|| Error::Config("h must be a number".into()))?);
                continue;
            }
            if !merged.contains_key(key) {
                return Err(Error::Config(format!("unknown configuration key '{key}'")));
            }
            merged.insert(key.clone(), value.clone());
        }
        let next: RunConfig =
            serde_json::from_value(Value::Object(merged)).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(h) = h {
            if (h - next.h()).abs() > 1e-12 * h.abs() {
                return Err(Error::Config(format!(
                    "h = {h} disagrees with smoothing_ratio * dp = {}",
                    next.h()
                )));
            }
        }
        *self = next;
        Ok(())
    }

    pub fn apply_json_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let value: Value =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        self.apply_json(&value)
    }

    /// The fully materialized configuration, including the derived `h`.
    pub fn manifest(&self) -> Value {
        let mut map: Map<String, Value> = match serde_json::to_value(self) {
            Ok(Value::Object(m)) => m,
            _ => unreachable!("RunConfig serializes to an object"),
        };
        map.insert("h".into(), Value::from(self.h()));
        Value::Object(map)
    }

    pub fn material(&self) -> Result<Material> {
        Material::new(self.rho0, self.youngs_modulus, self.poisson_ratio, self.law)
            .and_then(|m| m.with_alpha(self.alpha))
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: String| if ok { Ok(()) } else { Err(Error::Config(what)) };
        let positive = |name: &str, v: f64| check(v > 0.0 && v.is_finite(), format!("{name} must be positive, got {v}"));
        positive("dp", self.dp)?;
        positive("smoothing_ratio", self.smoothing_ratio)?;
        positive("output_interval", self.output_interval)?;
        check(self.cfl > 0.0 && self.cfl <= 1.0, format!("cfl must lie in (0, 1], got {}", self.cfl))?;
        check(
            self.t_end >= 0.0 && self.t_end.is_finite(),
            format!("t_end must be non-negative, got {}", self.t_end),
        )?;
        check(
            self.snapshot_interval >= 0.0 && self.snapshot_interval.is_finite(),
            format!("snapshot_interval must be non-negative, got {}", self.snapshot_interval),
        )?;
        check(
            self.gravity.iter().all(|g| g.is_finite()),
            "gravity must be finite".into(),
        )?;
        check(self.omega0.is_finite(), format!("omega0 must be finite, got {}", self.omega0))?;
        check(self.band_speed.is_finite(), format!("band_speed must be finite, got {}", self.band_speed))?;
        check(self.threads != Some(0), "threads must be at least 1".into())?;
        check(
            self.load_axis.is_none_or(|a| a < 3),
            "load_axis must be 0, 1 or 2".into(),
        )?;
        if self.case == CaseId::Twisting && !TWISTING_OMEGAS.contains(&self.omega0) {
            warn!("omega0 = {} is outside the studied set {:?}", self.omega0, TWISTING_OMEGAS);
        }
        self.material()?;
        Ok(())
    }

    /// Builds the particle body, constraints and probes of the case.
    pub fn resolve(&self) -> Result<SimulationConfig> {
        self.validate()?;
        let material = self.material()?;
        let dp = self.dp;
        let h = self.h();
        let gravity = Vec3::from(self.gravity);
        let body_error = |e: Error| match e {
            Error::InvalidParameter(m) => Error::Config(m),
            other => other,
        };

        let (positions, volumes, field, clamp, prescribed, probes) = match self.case {
            CaseId::Cable => {
                let lattice = generate_lattice_box(Vec3::new(10.0, 0.2, 0.2), dp, Vec3::zeros()).map_err(body_error)?;
                let tip = Vec3::new(10.0, 0.1, 0.1);
                (
                    lattice.positions,
                    lattice.volumes,
                    InitialVelocity::Cable {
                        from_x: 7.5,
                        speed: 5.0,
                    },
                    Some(half_space_below(0, 2.0 * h)),
                    None,
                    vec![
                        ProbeSpec::new("tip_velocity", tip, ProbeQuantity::Velocity),
                        ProbeSpec::new("tip_displacement", tip, ProbeQuantity::Displacement),
                    ],
                )
            }
            CaseId::Bending => {
                let lattice = generate_lattice_box(Vec3::new(1.0, 1.0, 6.0), dp, Vec3::zeros()).map_err(body_error)?;
                let s = Vec3::new(1.0, 1.0, 6.0);
                (
                    lattice.positions,
                    lattice.volumes,
                    InitialVelocity::Uniform(Vec3::new(5.0 * 3f64.sqrt(), 5.0, 0.0)),
                    Some(half_space_below(2, 2.0 * h)),
                    None,
                    vec![
                        ProbeSpec::new("s_velocity", s, ProbeQuantity::Velocity),
                        ProbeSpec::new("s_displacement", s, ProbeQuantity::Displacement),
                    ],
                )
            }
            CaseId::Twisting => {
                let lattice = generate_lattice_box(Vec3::new(1.0, 6.0, 1.0), dp, Vec3::new(-0.5, 0.0, -0.5))
                    .map_err(body_error)?;
                let top = Vec3::new(0.0, 6.0, 0.0);
                (
                    lattice.positions,
                    lattice.volumes,
                    InitialVelocity::Twisting {
                        omega0: self.omega0,
                        length: 6.0,
                    },
                    Some(half_space_below(1, 2.0 * h)),
                    None,
                    vec![
                        ProbeSpec::new("center_velocity", top, ProbeQuantity::Velocity),
                        ProbeSpec::new("center_displacement", top, ProbeQuantity::Displacement),
                    ],
                )
            }
            CaseId::Stl => {
                let mesh = self.load_mesh()?;
                let filled = fill_mesh_with_lattice(&mesh, dp).map_err(body_error)?;
                if filled.positions.is_empty() {
                    return Err(Error::Config("the mesh encloses no lattice points at this dp".into()));
                }
                if filled.median_min_span < 3 {
                    warn!(
                        "thin features: median strut spans only {} particles at dp = {dp}; refine dp for accuracy",
                        filled.median_min_span
                    );
                }
                let (lo, hi) = mesh.bounding_box();
                let axis = self.load_axis.unwrap_or_else(|| (hi - lo).imax());
                let (plo, phi) = filled
                    .positions
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[axis]), b.max(p[axis])));
                let field = InitialVelocity::Bands {
                    axis,
                    lo: plo,
                    hi: phi,
                    thickness: 2.0 * h,
                    speed: self.band_speed,
                };
                let mut top = (lo + hi) * 0.5;
                top[axis] = hi[axis];
                info!("filled mesh with {} particles (load axis {axis})", filled.positions.len());
                (
                    filled.positions,
                    filled.volumes,
                    field,
                    None,
                    Some(field),
                    vec![
                        ProbeSpec::new("top_velocity", top, ProbeQuantity::Velocity),
                        ProbeSpec::new("top_displacement", top, ProbeQuantity::Displacement),
                    ],
                )
            }
        };

        let velocities = initial_velocity_field(&field, &positions)?;
        let mut constraints = vec![Constraint::Free; positions.len()];
        if let Some(region) = clamp {
            for i in region.select(&positions)? {
                constraints[i] = Constraint::Clamped;
            }
        }
        if let Some(bands) = prescribed {
            let mut moving = 0;
            for (i, p) in positions.iter().enumerate() {
                let v = bands.at(p);
                if v != Vec3::zeros() {
                    constraints[i] = Constraint::Prescribed(v);
                    moving += 1;
                }
            }
            if moving == 0 {
                return Err(Error::Config("velocity bands select no particles".into()));
            }
        }

        let config = SimulationConfig {
            case: self.case.name().to_string(),
            body: Body {
                positions,
                volumes,
                velocities,
                constraints,
            },
            material,
            dp,
            h,
            cfl: self.cfl,
            t_end: self.t_end,
            gravity,
            output_interval: self.output_interval,
            snapshot_interval: (self.snapshot_interval > 0.0).then_some(self.snapshot_interval),
            probes,
        };
        config.validate()?;
        Ok(config)
    }

    fn load_mesh(&self) -> Result<TriangleMesh> {
        match &self.stl {
            Some(path) => {
                let path = Path::new(path);
                let bytes = std::fs::read(path).map_err(|e| {
                    Error::Config(format!("cannot read STL file {}: {e}", path.display()))
                })?;
                parse_stl(&bytes)
            }
            None => Ok(fixtures::lattice_tube()),
        }
    }
}

/// Particles with reference coordinate `axis` below `limit`.
fn half_space_below(axis: usize, limit: f64) -> BodyRegion {
    let mut normal = [0.0; 3];
    normal[axis] = 1.0;
    BodyRegion::new(RegionShape::HalfSpace { normal, offset: limit }, RegionTag::Clamp)
}
