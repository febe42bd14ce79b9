use std::fs;
use std::path::Path;

use tlsph::cli::{main_with_args, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK};

fn run(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("tlsph").chain(args.iter().copied()))
}

fn out_arg(dir: &Path) -> String {
    dir.to_string_lossy().into_owned()
}

#[test]
fn cable_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    assert_eq!(run(&["run", "cable", "--dp", "0.1", "--t-end", "2e-4", "--out", &out]), EXIT_OK);
    let case = dir.path().join("cable");
    for name in ["manifest.json", "tip_velocity.csv", "tip_displacement.csv", "conservation.csv", "snapshot_0.vtk"] {
        assert!(case.join(name).is_file(), "missing {name}");
    }
    let header = fs::read_to_string(case.join("conservation.csv")).unwrap();
    assert!(header.starts_with("time,mass,momentum_x,momentum_y,momentum_z,kinetic,strain,mechanical\n"));
}

#[test]
fn manifest_reproduces_the_run() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let args = ["run", "bending", "--dp", "0.25", "--t-end", "0.01", "--alpha", "0.3", "--cfl", "0.5"];
    let out1 = out_arg(first.path());
    assert_eq!(run(&[&args[..], &["--out", &out1]].concat()), EXIT_OK);
    let manifest = first.path().join("bending/manifest.json");
    let out2 = out_arg(second.path());
    assert_eq!(
        run(&["run", "bending", "--config", &manifest.to_string_lossy(), "--out", &out2]),
        EXIT_OK
    );
    for name in ["manifest.json", "s_velocity.csv", "s_displacement.csv", "conservation.csv"] {
        let a = fs::read(first.path().join("bending").join(name)).unwrap();
        let b = fs::read(second.path().join("bending").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs");
    }
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    assert_eq!(run(&["run", "pendulum", "--out", &out]), EXIT_CONFIG);
    assert_eq!(run(&["run", "cable", "--dp", "-1", "--out", &out]), EXIT_CONFIG);
    assert_eq!(run(&["run", "cable", "--cfl", "1.5", "--out", &out]), EXIT_CONFIG);
    assert_eq!(run(&["run", "cable", "--no-damping", "--alpha", "0.2", "--out", &out]), EXIT_CONFIG);

    let config = dir.path().join("bad.json");
    fs::write(&config, r#"{"case": "cable", "viscosity": 3.0}"#).unwrap();
    assert_eq!(run(&["run", "cable", "--config", &config.to_string_lossy(), "--out", &out]), EXIT_CONFIG);
    fs::write(&config, r#"{"case": "twisting"}"#).unwrap();
    assert_eq!(run(&["run", "cable", "--config", &config.to_string_lossy(), "--out", &out]), EXIT_CONFIG);
    assert_eq!(run(&["run", "stl", "--stl", "/nonexistent.stl", "--out", &out]), EXIT_CONFIG);
}

#[test]
fn numerical_failure_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let code = run(&[
        "run", "twisting", "--dp", "0.25", "--omega0", "20000", "--no-damping", "--t-end", "0.05", "--out", &out,
    ]);
    assert_eq!(code, EXIT_NUMERICAL);
}

#[test]
fn list_cases_succeeds() {
    assert_eq!(run(&["list-cases"]), EXIT_OK);
}
