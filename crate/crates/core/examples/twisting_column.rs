//! Twisting column: out-of-axis velocity at the free-end center with and
//! without damping.
//!
//! ```text
//! cargo run --release --example twisting_column [omega0] [t_end]
//! ```

use tlsph::cases::{CaseId, RunConfig};
use tlsph::diagnostics::oscillation_metric;
use tlsph::solver::run_simulation;

fn main() -> tlsph::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut config = RunConfig::preset(CaseId::Twisting);
    config.omega0 = args.next().map_or(105.0, |s| s.parse().expect("omega0 must be a number"));
    config.t_end = args.next().map_or(0.15, |s| s.parse().expect("t_end must be a number"));
    for alpha in [0.5, 0.0] {
        config.alpha = alpha;
        match run_simulation(&config.resolve()?) {
            Ok(result) => {
                let v = result.probe("center_velocity").expect("preset probe");
                let tv = oscillation_metric(&v.component(0))? + oscillation_metric(&v.component(2))?;
                let det_min = result
                    .snapshots
                    .last()
                    .map_or(f64::NAN, |s| s.det_f.iter().cloned().fold(f64::INFINITY, f64::min));
                println!("alpha = {alpha}: horizontal velocity TV {tv:.3} m/s, min det F {det_min:.4}");
            }
            Err(e) => println!("alpha = {alpha}: {e}"),
        }
    }
    Ok(())
}
