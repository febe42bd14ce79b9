//! Tip history of the cable from characteristics and from a fine
//! finite-volume solve of the same 1D bar.
//!
//! ```text
//! cargo run --release --example cable_oracle
//! ```

use tlsph::oracles::{BarFiniteVolume, CableOracle};

fn main() -> tlsph::Result<()> {
    let oracle = CableOracle::benchmark();
    let fv = BarFiniteVolume::new(oracle, 10_000, 1.0)?.run(4e-3);
    println!("wave arrivals at the tip (ms): {:?}", oracle.arrival_times(10.0, 4e-3).iter().map(|t| t * 1e3).collect::<Vec<_>>());
    println!("{:>8} {:>9} {:>9} {:>11} {:>11}", "t (ms)", "v char", "v fv", "u char", "u fv");
    for k in 0..=16 {
        let t = k as f64 * 0.25e-3;
        println!(
            "{:>8.2} {:>9.4} {:>9.4} {:>11.6} {:>11.6}",
            t * 1e3,
            oracle.velocity(10.0, t),
            fv.velocity_at(t),
            oracle.displacement(10.0, t),
            fv.displacement_at(t)
        );
    }
    Ok(())
}
