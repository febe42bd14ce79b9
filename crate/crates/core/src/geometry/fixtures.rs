//! Procedural meshes used by tests, examples and the bundled stent stand-in.

use std::collections::{BTreeSet, HashMap};

use super::stl::TriangleMesh;
use crate::Vec3;

/// Outward-oriented triangles of the boundary of a union of unit voxels,
/// scaled by `size` and shifted by `origin`. Closed by construction.
pub fn voxel_surface(voxels: &BTreeSet<[i64; 3]>, size: f64, origin: Vec3) -> TriangleMesh {
    let mut tris = Vec::new();
    for v in voxels {
        for axis in 0..3 {
            for sign in [-1i64, 1] {
                let mut n = *v;
                n[axis] += sign;
                if voxels.contains(&n) {
                    continue;
                }
                let (u, w) = ((axis + 1) % 3, (axis + 2) % 3);
                let corner = |du: i64, dw: i64| {
                    let mut c = *v;
                    if sign > 0 {
                        c[axis] += 1;
                    }
                    c[u] += du;
                    c[w] += dw;
                    origin + Vec3::new(c[0] as f64, c[1] as f64, c[2] as f64) * size
                };
                let mut quad = [corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)];
                if sign < 0 {
                    quad.reverse();
                }
                tris.push([quad[0], quad[1], quad[2]]);
                tris.push([quad[0], quad[2], quad[3]]);
            }
        }
    }
    TriangleMesh::from_triangles(tris).expect("voxel faces are never degenerate")
}

/// The cube `[0, 1]³` as 12 outward triangles.
pub fn unit_cube() -> TriangleMesh {
    voxel_surface(&BTreeSet::from([[0, 0, 0]]), 1.0, Vec3::zeros())
}

/// The unit cube with its `z = 1` face removed.
pub fn open_cube() -> TriangleMesh {
    let cube = unit_cube();
    let kept = (0..cube.len())
        .map(|t| cube.corners(t))
        .filter(|c| !c.iter().all(|p| p.z == 1.0));
    TriangleMesh::from_triangles(kept).unwrap()
}

/// Sphere of `radius` about the origin from a subdivided icosahedron.
pub fn icosphere(radius: f64, subdivisions: usize) -> TriangleMesh {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vec3> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, verts: &mut Vec<Vec3>| {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                verts.push(((verts[a] + verts[b]) * 0.5).normalize());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let mesh = TriangleMesh::from_triangles(
        faces
            .iter()
            .map(|f| [verts[f[0]] * radius, verts[f[1]] * radius, verts[f[2]] * radius]),
    )
    .unwrap();
    if mesh.signed_volume() < 0.0 {
        TriangleMesh::from_triangles((0..mesh.len()).map(|t| {
            let [a, b, c] = mesh.corners(t);
            [a, c, b]
        }))
        .unwrap()
    } else {
        mesh
    }
}

/// Voxel size of [`lattice_tube`].
pub const LATTICE_TUBE_VOXEL: f64 = 0.1;

/// A stent-like tube along `y`: five rings (radial band 0.75..1.0, height 0.2)
/// at 0.6 pitch, joined by four short bridges per gap with alternating angular
/// offsets. Built from 0.1 voxels, so its surface is watertight. Spans
/// `[-1, 1] × [0, 2.6] × [-1, 1]`.
pub fn lattice_tube() -> TriangleMesh {
    let n = 10i64;
    let mut voxels = BTreeSet::new();
    for i in -n..n {
        for k in -n..n {
            let x = (i as f64 + 0.5) * LATTICE_TUBE_VOXEL;
            let z = (k as f64 + 0.5) * LATTICE_TUBE_VOXEL;
            let r = x.hypot(z);
            if !(0.75..=1.0).contains(&r) {
                continue;
            }
            let angle = z.atan2(x);
            for j in 0..26 {
                let layer = j % 6;
                let ring = layer < 2;
                let bridge = if ring {
                    false
                } else {
                    let offset = if (j / 6) % 2 == 0 { 0.0 } else { std::f64::consts::FRAC_PI_4 };
                    (0..4).any(|b| {
                        let target = offset + b as f64 * std::f64::consts::FRAC_PI_2;
                        let d = (angle - target).rem_euclid(std::f64::consts::TAU);
                        d.min(std::f64::consts::TAU - d) * r < 0.1
                    })
                };
                if ring || bridge {
                    voxels.insert([i, j, k]);
                }
            }
        }
    }
    voxel_surface(&voxels, LATTICE_TUBE_VOXEL, Vec3::zeros())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_is_closed_and_outward() {
        let cube = unit_cube();
        assert_eq!(cube.len(), 12);
        assert!((cube.signed_volume() - 1.0).abs() < 1e-15);
        assert_eq!(open_cube().len(), 10);
    }

    #[test]
    fn icosphere_volume_converges() {
        let exact = 4.0 / 3.0 * std::f64::consts::PI;
        let coarse = icosphere(1.0, 2).signed_volume();
        let fine = icosphere(1.0, 4).signed_volume();
        assert!(coarse < fine && fine < exact);
        assert!((fine - exact) / exact > -0.005);
        assert_eq!(icosphere(1.0, 1).len(), 80);
    }

    #[test]
    fn lattice_tube_shape() {
        let tube = lattice_tube();
        let (lo, hi) = tube.bounding_box();
        assert!((lo - Vec3::new(-1.0, 0.0, -1.0)).norm() < 1e-12);
        assert!((hi - Vec3::new(1.0, 2.6, 1.0)).norm() < 1e-12);
        // Five rings of about 1.37 m² × 0.2 m plus twelve bridges, in whole voxels.
        let voxels = tube.signed_volume() / LATTICE_TUBE_VOXEL.powi(3);
        assert!((voxels - voxels.round()).abs() < 1e-6);
        assert!((1400.0..2200.0).contains(&voxels), "{voxels}");
    }
}
