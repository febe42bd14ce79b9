//! The `tlsph` command line: `run`, `list-cases` and `verify`.
//!
//! Exit codes: 0 on success, 1 when `verify` finds a failing check, 2 for
//! configuration and I/O errors, 3 for numerical failure during a run.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::info;

use crate::cases::{CaseId, RunConfig};
use crate::diagnostics::Snapshot;
use crate::io::{write_conservation_csv, write_probe_csv, write_vtk_snapshot};
use crate::materials::{lame_from_e_nu, neo_hookean_s};
use crate::oracles::{affine_motion_oracle, energy_gradient_oracle, BarFiniteVolume, CableOracle};
use crate::solver::{run_simulation_with, SimulationResult};
use crate::{Error, Mat3, Result, Vec3};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "tlsph", version, about = "Total-Lagrangian SPH solid dynamics with Kelvin-Voigt damping")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a benchmark case.
    Run(RunArgs),
    /// List the available cases.
    ListCases,
    /// Check the reference solutions and discrete consistency identities.
    Verify,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// cable, bending, twisting or stl
    case: String,
    /// Particle spacing (m).
    #[arg(long, allow_negative_numbers = true)]
    dp: Option<f64>,
    /// Damping scale (default 0.5).
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Switch the damper off (same as --alpha 0).
    #[arg(long, conflicts_with = "alpha")]
    no_damping: bool,
    /// CFL number (default 0.6).
    #[arg(long, allow_negative_numbers = true)]
    cfl: Option<f64>,
    /// End time (s).
    #[arg(long, allow_negative_numbers = true)]
    t_end: Option<f64>,
    /// Twisting amplitude (rad/s).
    #[arg(long, allow_negative_numbers = true)]
    omega0: Option<f64>,
    /// STL file for the stl case.
    #[arg(long)]
    stl: Option<PathBuf>,
    /// Output root; results go to <out>/<case>.
    #[arg(long, default_value = "output")]
    out: PathBuf,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Flat JSON file overriding preset fields; flags override the file.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::ListCases => {
            for case in CaseId::ALL {
                println!("{:<10} {}", case.name(), case.summary());
            }
            EXIT_OK
        }
        Command::Verify => {
            if verify() {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            }
        }
        Command::Run(args) => match run(&args) {
            Ok(dir) => {
                println!("results written to {}", dir.display());
                EXIT_OK
            }
            Err(e) => report(&e),
        },
    }
}

fn report(e: &Error) -> i32 {
    if e.is_numerical() {
        match e {
            Error::Step { time, .. } => eprintln!("numerical failure at t = {time:.6e} s: {e}"),
            _ => eprintln!("numerical failure: {e}"),
        }
        EXIT_NUMERICAL
    } else {
        eprintln!("error: {e}");
        EXIT_CONFIG
    }
}

fn config_from_args(args: &RunArgs) -> Result<RunConfig> {
    let case: CaseId = args.case.parse()?;
    let mut config = RunConfig::preset(case);
    if let Some(path) = &args.config {
        config.apply_json_file(path).map_err(|e| match e {
            Error::Io { path, source } => Error::Config(format!("cannot read {}: {source}", path.display())),
            other => other,
        })?;
        if config.case != case {
            return Err(Error::Config(format!(
                "{} describes case '{}' but '{}' was requested",
                path.display(),
                config.case,
                case
            )));
        }
    }
    if let Some(dp) = args.dp {
        config.dp = dp;
    }
    if let Some(alpha) = args.alpha {
        config.alpha = alpha;
    }
    if args.no_damping {
        config.alpha = 0.0;
    }
    if let Some(cfl) = args.cfl {
        config.cfl = cfl;
    }
    if let Some(t) = args.t_end {
        config.t_end = t;
    }
    if let Some(w) = args.omega0 {
        config.omega0 = w;
    }
    if let Some(stl) = &args.stl {
        config.stl = Some(stl.to_string_lossy().into_owned());
    }
    if args.threads.is_some() {
        config.threads = args.threads;
    }
    config.validate()?;
    Ok(config)
}

/// Writes `manifest.json`, the fully resolved configuration, into `out_dir`.
pub fn emit_run_manifest(config: &RunConfig, out_dir: &Path) -> Result<PathBuf> {
    let path = out_dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&config.manifest()).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Runs `config`, writing the manifest, snapshots, probe series and
/// conservation samples under `out_root/<case>`.
pub fn run_case(config: &RunConfig, out_root: &Path) -> Result<(PathBuf, SimulationResult)> {
    let resolved = config.resolve()?;
    let dir = out_root.join(config.case.name());
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    emit_run_manifest(config, &dir)?;
    let mut k = 0;
    let result = run_simulation_with(&resolved, |snap: &Snapshot| {
        write_vtk_snapshot(snap, &dir.join(format!("snapshot_{k}.vtk")))?;
        k += 1;
        Ok(())
    })?;
    for probe in &result.probes {
        write_probe_csv(probe, &dir.join(format!("{}.csv", probe.name)))?;
    }
    write_conservation_csv(&result.conservation, &dir.join("conservation.csv"))?;
    Ok((dir, result))
}

fn run(args: &RunArgs) -> Result<PathBuf> {
    let config = config_from_args(args)?;
    let go = || run_case(&config, &args.out).map(|(dir, result)| {
        info!("{} steps", result.steps);
        dir
    });
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?
            .install(go),
        None => go(),
    }
}

/// One named check of the verification suite.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Oracle self-consistency and discrete-operator identities.
pub fn verification_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let mut push = |name, passed, detail: String| checks.push(Check { name, passed, detail });

    let oracle = CableOracle::benchmark();
    let plateaus = [(0.25e-3, 5.0), (1.0e-3, 0.0), (2.0e-3, 0.0), (3.75e-3, -5.0)];
    let worst = plateaus
        .iter()
        .map(|&(t, v)| (oracle.velocity(10.0, t) - v).abs())
        .fold(0.0, f64::max);
    push("cable oracle tip plateaus", worst < 1e-12, format!("max deviation {worst:.2e} m/s"));

    let fv = BarFiniteVolume::new(oracle, 10_000, 1.0).map(|fv| fv.run(4e-3));
    match fv {
        Ok(history) => {
            let mut worst: f64 = 0.0;
            for k in 1..400 {
                let t = k as f64 * 1e-5;
                // Skip samples sitting on a wave arrival, where both solutions jump.
                if oracle.arrival_times(10.0, 4e-3).iter().any(|a| (a - t).abs() < 2e-6) {
                    continue;
                }
                worst = worst.max((history.velocity_at(t) - oracle.velocity(10.0, t)).abs() / 5.0);
            }
            push("finite-volume cross-check", worst < 1e-3, format!("max relative deviation {worst:.2e}"));
        }
        Err(e) => push("finite-volume cross-check", false, e.to_string()),
    }

    let a = Mat3::new(0.01, -0.02, 0.005, 0.003, 0.015, -0.01, 0.02, 0.004, -0.012);
    let positions: Vec<Vec3> = (0..12 * 12 * 12)
        .map(|n| Vec3::new((n / 144) as f64, ((n / 12) % 12) as f64, (n % 12) as f64) * 0.1)
        .collect();
    match affine_recovery_error(&a, &positions) {
        Ok(err) => push("affine motion recovery", err < 1e-10, format!("max error {err:.2e}")),
        Err(e) => push("affine motion recovery", false, e.to_string()),
    }

    let c = lame_from_e_nu(1.7e7, 0.45).expect("valid constants");
    let f = Mat3::from_diagonal(&Vec3::new(1.2, 0.9, 1.05));
    let check = energy_gradient_oracle(&f, c.lambda, c.mu, 1e-6)
        .and_then(|fd| Ok((fd, neo_hookean_s(&f, c.lambda, c.mu, 0)?)));
    match check {
        Ok((fd, exact)) => {
            let rel = (fd - exact).norm() / exact.norm();
            push("neo-Hookean energy gradient", rel < 1e-5, format!("relative error {rel:.2e}"));
        }
        Err(e) => push("neo-Hookean energy gradient", false, e.to_string()),
    }
    checks
}

fn affine_recovery_error(a: &Mat3, positions: &[Vec3]) -> Result<f64> {
    use crate::kernel::{ReferenceNeighborhood, SmoothingKernel};
    use crate::solver::{compute_correction_matrices, ParticleSystem};

    let dp = 0.1;
    let h = 1.15 * dp;
    let expected = affine_motion_oracle(a, &Vec3::new(0.1, -0.2, 0.3), positions, h);
    let mut system = ParticleSystem::from_lattice(positions.to_vec(), dp, 1000.0)?;
    let hood = ReferenceNeighborhood::build(positions, &SmoothingKernel::new(h)?)?;
    system.correction = compute_correction_matrices(&system.volumes, &hood)?;
    for i in 0..positions.len() {
        system.positions[i] = positions[i] + expected.displacements[i];
    }
    system.velocities = expected.velocities.clone();
    crate::solver::update_deformation_rate(&mut system, &hood);
    let f = crate::solver::deformation_gradient(&system, &hood);
    if !expected.interior.iter().any(|&b| b) {
        return Err(Error::Config("lattice has no interior particles".into()));
    }
    let mut worst: f64 = 0.0;
    for i in (0..positions.len()).filter(|&i| expected.interior[i]) {
        worst = worst.max((f[i] - expected.deformation_gradient).amax());
        worst = worst.max((system.deformation_rate[i] - expected.rate).amax());
    }
    Ok(worst)
}

fn verify() -> bool {
    let checks = verification_checks();
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    checks.iter().all(|c| c.passed)
}
