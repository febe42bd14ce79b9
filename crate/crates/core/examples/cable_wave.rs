//! Elastic wave in a cable, compared with the characteristics solution.
//!
//! ```text
//! cargo run --release --example cable_wave [dp]
//! ```

use tlsph::cases::{CaseId, RunConfig};
use tlsph::oracles::CableOracle;
use tlsph::solver::run_simulation;

fn main() -> tlsph::Result<()> {
    let mut config = RunConfig::preset(CaseId::Cable);
    if let Some(dp) = std::env::args().nth(1) {
        config.dp = dp.parse().expect("dp must be a number");
    }
    let oracle = CableOracle::benchmark();
    let result = run_simulation(&config.resolve()?)?;
    let v = result.probe("tip_velocity").expect("preset probe");
    let u = result.probe("tip_displacement").expect("preset probe");

    println!("{:>10} {:>10} {:>10} {:>12} {:>12}", "t (ms)", "v", "v exact", "u (mm)", "u exact");
    for k in (0..v.len()).step_by(10) {
        let t = v.times[k];
        println!(
            "{:>10.3} {:>10.4} {:>10.4} {:>12.5} {:>12.5}",
            t * 1e3,
            v.values[k].x,
            oracle.velocity(10.0, t),
            u.values[k].x * 1e3,
            oracle.displacement(10.0, t) * 1e3
        );
    }
    println!("{} particles, {} steps", result.solver.system.len(), result.steps);
    Ok(())
}
