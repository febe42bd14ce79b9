use crate::{Error, Result, Vec3};

/// Cell-centered particle lattice filling an axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeBox {
    pub positions: Vec<Vec3>,
    pub volumes: Vec<f64>,
    pub counts: [usize; 3],
    pub dp: f64,
}

impl LatticeBox {
    pub fn masses(&self, rho0: f64) -> Vec<f64> {
        self.volumes.iter().map(|v| rho0 * v).collect()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Lattice with `round(extent/dp)` particles per axis, offset `dp/2` from the
/// faces of the box `[origin, origin + extents]`. Ordering is x-major, then y, then z.
pub fn generate_lattice_box(extents: Vec3, dp: f64, origin: Vec3) -> Result<LatticeBox> {
    if !(dp > 0.0 && dp.is_finite()) {
        return Err(Error::InvalidParameter(format!("lattice spacing must be positive, got {dp}")));
    }
    let mut counts = [0usize; 3];
    for k in 0..3 {
        let e = extents[k];
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::InvalidParameter(format!("box extent {k} must be positive, got {e}")));
        }
        if dp > e * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "lattice spacing {dp} exceeds box extent {e} along axis {k}"
            )));
        }
        counts[k] = ((e / dp).round() as usize).max(1);
    }
    let mut positions = Vec::with_capacity(counts.iter().product());
    for i in 0..counts[0] {
        for j in 0..counts[1] {
            for k in 0..counts[2] {
                positions.push(
                    origin + Vec3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5) * dp,
                );
            }
        }
    }
    let volumes = vec![dp * dp * dp; positions.len()];
    Ok(LatticeBox {
        positions,
        volumes,
        counts,
        dp,
    })
}
