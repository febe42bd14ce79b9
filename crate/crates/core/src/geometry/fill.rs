//! Lattice filling of closed triangle meshes by ray parity.
//!
//! Rays are cast along the three coordinate axes. For each axis the triangles
//! are binned on a 2D grid in the plane orthogonal to the ray, so a query only
//! visits triangles whose projection can contain the ray. A ray that grazes an
//! edge or vertex is shifted sideways by a tiny deterministic jitter and recast.

use std::collections::HashMap;

use log::warn;
use rayon::prelude::*;

use super::stl::TriangleMesh;
use crate::{Error, Result, Vec3};

/// Fraction of candidate points allowed to disagree between the three ray
/// directions before the mesh is declared non-watertight.
pub const PARITY_DISAGREEMENT_LIMIT: f64 = 0.01;

const EDGE_TOLERANCE: f64 = 1e-9;
const MAX_JITTER_RETRIES: usize = 12;

/// Axis-aligned point-in-mesh tester.
#[derive(Debug, Clone)]
pub struct MeshParity<'a> {
    mesh: &'a TriangleMesh,
    lo: Vec3,
    hi: Vec3,
    bins: [AxisBins; 3],
    jitter_scale: f64,
}

#[derive(Debug, Clone)]
struct AxisBins {
    /// The two in-plane axes.
    plane: (usize, usize),
    origin: (f64, f64),
    cell: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl AxisBins {
    fn new(mesh: &TriangleMesh, ray_axis: usize, lo: &Vec3, cell: f64) -> Self {
        let plane = match ray_axis {
            0 => (1, 2),
            1 => (2, 0),
            _ => (0, 1),
        };
        let origin = (lo[plane.0], lo[plane.1]);
        let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for t in 0..mesh.len() {
            let c = mesh.corners(t);
            let (mut umin, mut umax, mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
            for p in &c {
                umin = umin.min(p[plane.0]);
                umax = umax.max(p[plane.0]);
                vmin = vmin.min(p[plane.1]);
                vmax = vmax.max(p[plane.1]);
            }
            let i0 = ((umin - origin.0) / cell).floor() as i64;
            let i1 = ((umax - origin.0) / cell).floor() as i64;
            let j0 = ((vmin - origin.1) / cell).floor() as i64;
            let j1 = ((vmax - origin.1) / cell).floor() as i64;
            for i in i0..=i1 {
                for j in j0..=j1 {
                    cells.entry((i, j)).or_default().push(t);
                }
            }
        }
        Self {
            plane,
            origin,
            cell,
            cells,
        }
    }

    fn candidates(&self, u: f64, v: f64) -> &[usize] {
        let key = (
            ((u - self.origin.0) / self.cell).floor() as i64,
            ((v - self.origin.1) / self.cell).floor() as i64,
        );
        self.cells.get(&key).map_or(&[], |c| c.as_slice())
    }
}

enum Crossing {
    Miss,
    Hit(f64),
    Ambiguous,
}

/// Intersection of the line `{(u, v) fixed}` with a triangle, as the ray-axis
/// coordinate of the hit.
fn line_triangle(c: &[Vec3; 3], axis: usize, plane: (usize, usize), u: f64, v: f64) -> Crossing {
    let (pu, pv) = plane;
    let (ax, ay) = (c[0][pu] - u, c[0][pv] - v);
    let (bx, by) = (c[1][pu] - u, c[1][pv] - v);
    let (cx, cy) = (c[2][pu] - u, c[2][pv] - v);
    // Twice the signed areas of the sub-triangles opposite each corner.
    let wa = bx * cy - by * cx;
    let wb = cx * ay - cy * ax;
    let wc = ax * by - ay * bx;
    let total = wa + wb + wc;
    let scale = (ax.abs() + bx.abs() + cx.abs()) * (ay.abs() + by.abs() + cy.abs());
    if total.abs() <= EDGE_TOLERANCE * scale {
        // Triangle seen edge-on: the neighbors sharing its edges decide parity.
        return Crossing::Miss;
    }
    let tol = EDGE_TOLERANCE * total.abs();
    let (wa, wb, wc) = if total < 0.0 { (-wa, -wb, -wc) } else { (wa, wb, wc) };
    if wa < -tol || wb < -tol || wc < -tol {
        return Crossing::Miss;
    }
    if wa <= tol || wb <= tol || wc <= tol {
        return Crossing::Ambiguous;
    }
    let t = total.abs();
    Crossing::Hit((wa * c[0][axis] + wb * c[1][axis] + wc * c[2][axis]) / t)
}

impl<'a> MeshParity<'a> {
    /// `cell` sets the bin size; the lattice spacing is a good choice.
    pub fn new(mesh: &'a TriangleMesh, cell: f64) -> Self {
        let (lo, hi) = mesh.bounding_box();
        let bins = [0, 1, 2].map(|a| AxisBins::new(mesh, a, &lo, cell));
        let jitter_scale = 1e-7 * (hi - lo).amax().max(f64::MIN_POSITIVE);
        Self {
            mesh,
            lo,
            hi,
            bins,
            jitter_scale,
        }
    }

    pub fn in_bounding_box(&self, p: &Vec3) -> bool {
        (0..3).all(|k| p[k] >= self.lo[k] && p[k] <= self.hi[k])
    }

    /// Parity along the +axis ray from `p`: true for an odd crossing count.
    pub fn parity(&self, p: &Vec3, axis: usize) -> bool {
        let bins = &self.bins[axis];
        let (pu, pv) = bins.plane;
        for attempt in 0..=MAX_JITTER_RETRIES {
            // Low-discrepancy offsets keep retries deterministic.
            let k = attempt as f64;
            let du = self.jitter_scale * (k * 0.618_033_988_749_894_9).fract() * (attempt > 0) as u8 as f64;
            let dv = self.jitter_scale * (k * 0.414_213_562_373_095_1).fract() * (attempt > 0) as u8 as f64;
            let (u, v) = (p[pu] + du, p[pv] + dv);
            let mut count = 0usize;
            let mut ambiguous = false;
            for &t in bins.candidates(u, v) {
                match line_triangle(&self.mesh.corners(t), axis, bins.plane, u, v) {
                    Crossing::Miss => {}
                    Crossing::Hit(x) => count += (x > p[axis]) as usize,
                    Crossing::Ambiguous => {
                        ambiguous = true;
                        break;
                    }
                }
            }
            if !ambiguous {
                return count % 2 == 1;
            }
        }
        warn!("ray parity stayed ambiguous at {p:?} after jitter retries");
        false
    }

    /// Parities along x, y and z.
    pub fn parities(&self, p: &Vec3) -> [bool; 3] {
        [0, 1, 2].map(|a| self.parity(p, a))
    }

    /// Majority vote of the three ray directions; points outside the bounding
    /// box are rejected without casting.
    pub fn contains(&self, p: &Vec3) -> bool {
        if !self.in_bounding_box(p) {
            return false;
        }
        self.parities(p).iter().filter(|&&b| b).count() >= 2
    }
}

/// Lattice points inside a mesh.
#[derive(Debug, Clone)]
pub struct FilledBody {
    pub positions: Vec<Vec3>,
    pub volumes: Vec<f64>,
    pub dp: f64,
    /// Points whose three ray parities disagreed.
    pub inconsistent: usize,
    pub candidates: usize,
    /// Median over particles of the shortest run of filled lattice sites
    /// through the particle along a coordinate axis.
    pub median_min_span: usize,
}

/// Fills `mesh` with a cell-centered lattice of spacing `dp` over its bounding box.
pub fn fill_mesh_with_lattice(mesh: &TriangleMesh, dp: f64) -> Result<FilledBody> {
    if mesh.is_empty() {
        return Err(Error::InvalidParameter("cannot fill an empty mesh".into()));
    }
    if !(dp > 0.0 && dp.is_finite()) {
        return Err(Error::InvalidParameter(format!("lattice spacing must be positive, got {dp}")));
    }
    let parity = MeshParity::new(mesh, dp);
    let (lo, hi) = mesh.bounding_box();
    let counts: Vec<usize> = (0..3).map(|k| (((hi[k] - lo[k]) / dp).round() as usize).max(1)).collect();
    let candidates = counts[0] * counts[1] * counts[2];
    let index = |i: usize, j: usize, k: usize| (i * counts[1] + j) * counts[2] + k;

    let verdicts: Vec<(bool, bool)> = (0..candidates)
        .into_par_iter()
        .map(|flat| {
            let k = flat % counts[2];
            let j = (flat / counts[2]) % counts[1];
            let i = flat / (counts[1] * counts[2]);
            let p = lo + Vec3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5) * dp;
            let par = parity.parities(&p);
            let votes = par.iter().filter(|&&b| b).count();
            (votes >= 2, votes != 0 && votes != 3)
        })
        .collect();

    let inconsistent = verdicts.iter().filter(|v| v.1).count();
    let fraction = inconsistent as f64 / candidates as f64;
    if fraction > PARITY_DISAGREEMENT_LIMIT {
        return Err(Error::NonWatertight {
            fraction: 100.0 * fraction,
        });
    }

    let inside = |i: usize, j: usize, k: usize| verdicts[index(i, j, k)].0;
    let mut positions = Vec::new();
    let mut spans = Vec::new();
    for i in 0..counts[0] {
        for j in 0..counts[1] {
            for k in 0..counts[2] {
                if !inside(i, j, k) {
                    continue;
                }
                positions.push(lo + Vec3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5) * dp);
                let run = |step: &dyn Fn(isize) -> Option<(usize, usize, usize)>| {
                    let mut n = 1;
                    for dir in [-1isize, 1] {
                        let mut s = dir;
                        while let Some((a, b, c)) = step(s) {
                            if !inside(a, b, c) {
                                break;
                            }
                            n += 1;
                            s += dir;
                        }
                    }
                    n
                };
                let shift = |v: usize, s: isize, n: usize| {
                    let w = v as isize + s;
                    (w >= 0 && (w as usize) < n).then_some(w as usize)
                };
                let sx = run(&|s| shift(i, s, counts[0]).map(|a| (a, j, k)));
                let sy = run(&|s| shift(j, s, counts[1]).map(|b| (i, b, k)));
                let sz = run(&|s| shift(k, s, counts[2]).map(|c| (i, j, c)));
                spans.push(sx.min(sy).min(sz));
            }
        }
    }
    spans.sort_unstable();
    let median_min_span = spans.get(spans.len() / 2).copied().unwrap_or(0);
    let volumes = vec![dp * dp * dp; positions.len()];
    Ok(FilledBody {
        positions,
        volumes,
        dp,
        inconsistent,
        candidates,
        median_min_span,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fixtures::{icosphere, open_cube, unit_cube};

    #[test]
    fn unit_cube_fills_to_analytic_count() {
        let cube = unit_cube();
        let body = fill_mesh_with_lattice(&cube, 0.25).unwrap();
        assert_eq!(body.positions.len(), 64);
        assert_eq!(body.inconsistent, 0);
        assert_eq!(body.median_min_span, 4);
    }

    #[test]
    fn outside_bounding_box_is_rejected() {
        let cube = unit_cube();
        let parity = MeshParity::new(&cube, 0.25);
        assert!(!parity.contains(&Vec3::new(1.5, 0.5, 0.5)));
        assert!(!parity.contains(&Vec3::new(0.5, -0.01, 0.5)));
        assert!(parity.contains(&Vec3::new(0.5, 0.5, 0.5)));
    }

    #[test]
    fn grazing_rays_are_resolved_by_jitter() {
        // The +x ray from (0.5, 0.5, 0.5) runs along the diagonal shared by the
        // two triangles of the x = 1 face (and the x = 0 face behind it).
        let cube = unit_cube();
        let parity = MeshParity::new(&cube, 0.25);
        assert!(parity.parity(&Vec3::new(0.5, 0.5, 0.5), 0));
        assert!(parity.parity(&Vec3::new(0.25, 0.5, 0.5), 1));
    }

    #[test]
    fn sphere_volume_within_five_percent() {
        let sphere = icosphere(1.0, 4);
        let body = fill_mesh_with_lattice(&sphere, 0.1).unwrap();
        let volume: f64 = body.volumes.iter().sum();
        let exact = 4.0 / 3.0 * std::f64::consts::PI;
        assert!((volume - exact).abs() / exact < 0.05, "volume = {volume}");
    }

    #[test]
    fn box_membership_matches_analytic_away_from_surface() {
        let cube = unit_cube();
        let parity = MeshParity::new(&cube, 0.1);
        let dp = 0.1;
        for i in -3..14 {
            for j in -3..14 {
                let p = Vec3::new(i as f64 * 0.083 + 0.01, j as f64 * 0.079 + 0.02, 0.37);
                let inside = (0..3).all(|k| p[k] > 0.0 && p[k] < 1.0);
                let dist = (0..3).map(|k| p[k].min(1.0 - p[k]).abs()).fold(f64::INFINITY, f64::min);
                if dist > dp / 2.0 {
                    assert_eq!(parity.contains(&p), inside, "{p:?}");
                }
            }
        }
    }

    #[test]
    fn open_mesh_is_detected() {
        match fill_mesh_with_lattice(&open_cube(), 0.1) {
            Err(Error::NonWatertight { fraction }) => assert!(fraction > 1.0),
            other => panic!("expected non-watertight error, got {other:?}"),
        }
    }
}
