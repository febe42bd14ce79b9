//! Region predicates and initial velocity fields.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionShape {
    /// Closed axis-aligned box.
    Box { min: [f64; 3], max: [f64; 3] },
    /// Points with `normal · x <= offset`.
    HalfSpace { normal: [f64; 3], offset: f64 },
}

impl RegionShape {
    pub fn contains(&self, p: &Vec3) -> bool {
        match self {
            RegionShape::Box { min, max } => (0..3).all(|k| p[k] >= min[k] && p[k] <= max[k]),
            RegionShape::HalfSpace { normal, offset } => Vec3::from(*normal).dot(p) <= *offset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionTag {
    Clamp,
    Prescribed,
    Probe,
}

/// A tagged set of reference positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyRegion {
    pub shape: RegionShape,
    pub tag: RegionTag,
}

impl BodyRegion {
    pub fn new(shape: RegionShape, tag: RegionTag) -> Self {
        Self { shape, tag }
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        self.shape.contains(p)
    }

    /// Indices of the selected particles. A constraint region that selects
    /// nothing is a configuration error.
    pub fn select(&self, positions: &[Vec3]) -> Result<Vec<usize>> {
        let picked: Vec<usize> = (0..positions.len()).filter(|&i| self.contains(&positions[i])).collect();
        if picked.is_empty() && self.tag != RegionTag::Probe {
            return Err(Error::Config(format!("{:?} region {:?} selects no particles", self.tag, self.shape)));
        }
        Ok(picked)
    }
}

/// Initial velocity fields of the benchmark cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialVelocity {
    Zero,
    Uniform(Vec3),
    /// Axial velocity `speed` on `x >= from_x`.
    Cable { from_x: f64, speed: f64 },
    /// `v = ω × r` with `ω = (0, omega0 sin(π y / 2L), 0)`.
    Twisting { omega0: f64, length: f64 },
    /// `-speed` on the band `[lo, lo + thickness]` and `+speed` on
    /// `[hi - thickness, hi]` along `axis`, zero elsewhere.
    Bands {
        axis: usize,
        lo: f64,
        hi: f64,
        thickness: f64,
        speed: f64,
    },
}

impl InitialVelocity {
    pub fn at(&self, p: &Vec3) -> Vec3 {
        match *self {
            InitialVelocity::Zero => Vec3::zeros(),
            InitialVelocity::Uniform(v) => v,
            InitialVelocity::Cable { from_x, speed } => {
                if p.x >= from_x {
                    Vec3::new(speed, 0.0, 0.0)
                } else {
                    Vec3::zeros()
                }
            }
            InitialVelocity::Twisting { omega0, length } => {
                let omega = Vec3::new(0.0, omega0 * (std::f64::consts::PI * p.y / (2.0 * length)).sin(), 0.0);
                omega.cross(p)
            }
            InitialVelocity::Bands {
                axis,
                lo,
                hi,
                thickness,
                speed,
            } => {
                let mut v = Vec3::zeros();
                if p[axis] <= lo + thickness {
                    v[axis] = -speed;
                } else if p[axis] >= hi - thickness {
                    v[axis] = speed;
                }
                v
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = match *self {
            InitialVelocity::Zero => true,
            InitialVelocity::Uniform(v) => v.iter().all(|c| c.is_finite()),
            InitialVelocity::Cable { from_x, speed } => from_x.is_finite() && speed.is_finite(),
            InitialVelocity::Twisting { omega0, length } => omega0.is_finite() && length.is_finite() && length > 0.0,
            InitialVelocity::Bands {
                axis,
                lo,
                hi,
                thickness,
                speed,
            } => axis < 3 && lo.is_finite() && hi > lo && thickness > 0.0 && speed.is_finite(),
        };
        if finite {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid initial velocity field {self:?}")))
        }
    }
}

/// Evaluates `field` at every reference position.
pub fn initial_velocity_field(field: &InitialVelocity, positions: &[Vec3]) -> Result<Vec<Vec3>> {
    field.validate()?;
    Ok(positions.iter().map(|p| field.at(p)).collect())
}
