//! Wendland C2 smoothing kernel and fixed reference-configuration neighborhoods.
//!
//! In a total-Lagrangian scheme the neighbor set of every particle is decided once,
//! in the reference configuration, and never revisited. The pair data (separation
//! vectors and kernel gradients) is therefore computed a single time and stored.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::{Error, Result, Vec3};

/// Normalization of the 3D Wendland C2 kernel with support radius 2h.
pub const WENDLAND_SIGMA_3D: f64 = 21.0 / (16.0 * PI);

/// Wendland C2 kernel, `W(q) = σ/h³ (1 - q/2)⁴ (1 + 2q)` for `q = r/h ≤ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingKernel {
    h: f64,
    value_factor: f64,
    derivative_factor: f64,
}

impl SmoothingKernel {
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "smoothing length must be positive and finite, got {h}"
            )));
        }
        Ok(Self {
            h,
            value_factor: WENDLAND_SIGMA_3D / h.powi(3),
            derivative_factor: -5.0 * WENDLAND_SIGMA_3D / h.powi(4),
        })
    }

    #[inline]
    pub fn smoothing_length(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn support_radius(&self) -> f64 {
        2.0 * self.h
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        3
    }

    #[inline]
    pub fn value(&self, distance: f64) -> f64 {
        let q = distance / self.h;
        if q >= 2.0 {
            return 0.0;
        }
        let s = 1.0 - 0.5 * q;
        let s2 = s * s;
        self.value_factor * s2 * s2 * (1.0 + 2.0 * q)
    }

    /// Radial derivative dW/dr.
    #[inline]
    pub fn derivative(&self, distance: f64) -> f64 {
        let q = distance / self.h;
        if q >= 2.0 {
            return 0.0;
        }
        let s = 1.0 - 0.5 * q;
        self.derivative_factor * q * s * s * s
    }

    /// Gradient of `W(|r|)` with respect to the first particle, `dW/dr · r/|r|`.
    pub fn gradient(&self, separation: &Vec3) -> Result<Vec3> {
        let distance = separation.norm();
        if distance == 0.0 {
            return Err(Error::InvalidParameter(
                "kernel gradient requested for coincident particles".into(),
            ));
        }
        Ok(separation * (self.derivative(distance) / distance))
    }
}

/// Kernel value for a given distance and smoothing length.
pub fn wendland_value(distance: f64, h: f64) -> Result<f64> {
    if distance < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "distance must be non-negative, got {distance}"
        )));
    }
    Ok(SmoothingKernel::new(h)?.value(distance))
}

/// Kernel gradient `∇_i W_ij` for the reference separation `r_i - r_j`.
pub fn wendland_gradient(separation: &Vec3, h: f64) -> Result<Vec3> {
    SmoothingKernel::new(h)?.gradient(separation)
}

/// Per-particle neighbor lists with precomputed pair data, stored in CSR layout.
///
/// Neighbors of each particle are sorted by index so every reduction over them
/// runs in a fixed order.
#[derive(Debug, Clone)]
pub struct ReferenceNeighborhood {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    separations: Vec<Vec3>,
    distances: Vec<f64>,
    gradients: Vec<Vec3>,
}

/// One stored ordered pair `(i, j)` seen from particle `i`.
#[derive(Debug, Clone, Copy)]
pub struct PairRef<'a> {
    pub neighbor: usize,
    /// `r⁰_i - r⁰_j`
    pub separation: &'a Vec3,
    pub distance: f64,
    /// `∇⁰_i W_ij`
    pub gradient: &'a Vec3,
}

impl ReferenceNeighborhood {
    /// Builds the neighborhoods with a cell-linked grid of cell size 2h.
    pub fn build(positions: &[Vec3], kernel: &SmoothingKernel) -> Result<Self> {
        let pairs = cell_linked_pairs(positions, kernel.support_radius())?;
        Ok(Self::from_pairs(positions, kernel, positions.len(), &pairs))
    }

    fn from_pairs(
        positions: &[Vec3],
        kernel: &SmoothingKernel,
        n: usize,
        pairs: &[(usize, usize)],
    ) -> Self {
        let mut counts = vec![0usize; n];
        for &(i, j) in pairs {
            counts[i] += 1;
            counts[j] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for c in &counts {
            offsets.push(offsets.last().unwrap() + c);
        }
        let total = *offsets.last().unwrap();
        let mut neighbors = vec![0usize; total];
        let mut separations = vec![Vec3::zeros(); total];
        let mut distances = vec![0.0; total];
        let mut gradients = vec![Vec3::zeros(); total];
        let mut cursor: Vec<usize> = offsets[..n].to_vec();

        // Pairs arrive sorted by (i, j) with i < j, so filling both slots in this
        // order leaves every row sorted by neighbor index.
        for &(i, j) in pairs {
            let r_ij = positions[i] - positions[j];
            let distance = r_ij.norm();
            let grad = r_ij * (kernel.derivative(distance) / distance);

            let a = cursor[i];
            neighbors[a] = j;
            separations[a] = r_ij;
            distances[a] = distance;
            gradients[a] = grad;
            cursor[i] += 1;

            let b = cursor[j];
            neighbors[b] = i;
            separations[b] = -r_ij;
            distances[b] = distance;
            gradients[b] = -grad;
            cursor[j] += 1;
        }

        let mut hood = Self {
            offsets,
            neighbors,
            separations,
            distances,
            gradients,
        };
        hood.sort_rows();
        hood
    }

    fn sort_rows(&mut self) {
        for i in 0..self.len() {
            let range = self.offsets[i]..self.offsets[i + 1];
            let row = &self.neighbors[range.clone()];
            if row.windows(2).all(|w| w[0] < w[1]) {
                continue;
            }
            let mut order: Vec<usize> = range.clone().collect();
            order.sort_by_key(|&k| self.neighbors[k]);
            let neighbors: Vec<_> = order.iter().map(|&k| self.neighbors[k]).collect();
            let separations: Vec<_> = order.iter().map(|&k| self.separations[k]).collect();
            let distances: Vec<_> = order.iter().map(|&k| self.distances[k]).collect();
            let gradients: Vec<_> = order.iter().map(|&k| self.gradients[k]).collect();
            self.neighbors[range.clone()].copy_from_slice(&neighbors);
            self.separations[range.clone()].copy_from_slice(&separations);
            self.distances[range.clone()].copy_from_slice(&distances);
            self.gradients[range].copy_from_slice(&gradients);
        }
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn neighbor_count(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn gradients(&self, i: usize) -> &[Vec3] {
        &self.gradients[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn separations(&self, i: usize) -> &[Vec3] {
        &self.separations[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn pairs(&self, i: usize) -> impl Iterator<Item = PairRef<'_>> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        range.map(move |k| PairRef {
            neighbor: self.neighbors[k],
            separation: &self.separations[k],
            distance: self.distances[k],
            gradient: &self.gradients[k],
        })
    }

    /// Total number of stored ordered pairs.
    pub fn pair_count(&self) -> usize {
        self.neighbors.len()
    }
}

/// Builds reference neighborhoods for the given positions and smoothing length.
pub fn build_reference_neighborhoods(positions: &[Vec3], h: f64) -> Result<ReferenceNeighborhood> {
    let kernel = SmoothingKernel::new(h)?;
    ReferenceNeighborhood::build(positions, &kernel)
}

type CellKey = (i64, i64, i64);

/// Unordered pairs `(i, j)`, `i < j`, with `0 < |r_i - r_j| < radius`, sorted.
fn cell_linked_pairs(positions: &[Vec3], radius: f64) -> Result<Vec<(usize, usize)>> {
    for (i, p) in positions.iter().enumerate() {
        if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
            return Err(Error::NonFiniteState {
                particle: i,
                quantity: "reference position",
            });
        }
    }
    let key = |p: &Vec3| -> CellKey {
        (
            (p.x / radius).floor() as i64,
            (p.y / radius).floor() as i64,
            (p.z / radius).floor() as i64,
        )
    };
    let mut cells: HashMap<CellKey, Vec<usize>> = HashMap::new();
    for (i, p) in positions.iter().enumerate() {
        cells.entry(key(p)).or_default().push(i);
    }

    let radius_sq = radius * radius;
    let mut pairs = Vec::new();
    let mut row = Vec::new();
    for (i, p) in positions.iter().enumerate() {
        let (cx, cy, cz) = key(p);
        row.clear();
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(members) = cells.get(&(cx + dx, cy + dy, cz + dz)) else {
                        continue;
                    };
                    for &j in members {
                        if j <= i {
                            continue;
                        }
                        let d2 = (p - positions[j]).norm_squared();
                        if d2 == 0.0 {
                            return Err(Error::CoincidentParticles {
                                first: i,
                                second: j,
                            });
                        }
                        if d2 < radius_sq {
                            row.push(j);
                        }
                    }
                }
            }
        }
        row.sort_unstable();
        pairs.extend(row.iter().map(|&j| (i, j)));
    }
    Ok(pairs)
}
