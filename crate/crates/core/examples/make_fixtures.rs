//! Regenerates the STL files under `fixtures/`.
//!
//! ```text
//! cargo run --example make_fixtures
//! ```

use std::path::Path;

use tlsph::geometry::{fixtures, write_stl_ascii, write_stl_binary};

fn main() -> std::io::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir)?;
    let cube = fixtures::unit_cube();
    std::fs::write(dir.join("unit_cube_binary.stl"), write_stl_binary(&cube))?;
    std::fs::write(dir.join("unit_cube_ascii.stl"), write_stl_ascii(&cube, "unit_cube"))?;
    std::fs::write(dir.join("open_cube.stl"), write_stl_ascii(&fixtures::open_cube(), "open_cube"))?;
    let tube = fixtures::lattice_tube();
    std::fs::write(dir.join("lattice_tube.stl"), write_stl_binary(&tube))?;
    println!("wrote fixtures to {} ({} tube triangles)", dir.display(), tube.len());
    Ok(())
}
