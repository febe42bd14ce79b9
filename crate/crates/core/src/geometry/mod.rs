//! Particle generation: lattice boxes, STL meshes filled by ray parity,
//! constraint regions and initial velocity fields.

mod fields;
mod fill;
pub mod fixtures;
mod lattice;
mod stl;

pub use fields::{initial_velocity_field, BodyRegion, InitialVelocity, RegionShape, RegionTag};
pub use fill::{fill_mesh_with_lattice, FilledBody, MeshParity};
pub use lattice::{generate_lattice_box, LatticeBox};
pub use stl::{parse_stl, write_stl_ascii, write_stl_binary, TriangleMesh};
