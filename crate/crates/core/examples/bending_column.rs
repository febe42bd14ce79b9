//! Bending column with and without the damper; prints the vertical
//! displacement of the corner point S and its total variation.
//!
//! ```text
//! cargo run --release --example bending_column [t_end]
//! ```

use tlsph::cases::{CaseId, RunConfig};
use tlsph::diagnostics::oscillation_metric;
use tlsph::solver::run_simulation;

fn main() -> tlsph::Result<()> {
    let mut config = RunConfig::preset(CaseId::Bending);
    if let Some(t) = std::env::args().nth(1) {
        config.t_end = t.parse().expect("t_end must be a number");
    }
    for alpha in [0.5, 0.0] {
        config.alpha = alpha;
        let result = run_simulation(&config.resolve()?)?;
        let s = result.probe("s_displacement").expect("preset probe");
        let uz = s.component(2);
        println!("alpha = {alpha}: {} steps", result.steps);
        for k in (0..s.len()).step_by(s.len().max(10) / 10) {
            println!("  t = {:.3} s  u_z(S) = {:+.4} m", s.times[k], uz[k]);
        }
        println!("  total variation of u_z(S): {:.4} m", oscillation_metric(&uz)?);
    }
    Ok(())
}
