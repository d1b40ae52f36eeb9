use std::process::{Command, Output};

use holonet::approx::{sup_error_on, Region, Scheme};
use holonet::corpus::corpus;
use holonet::Network;

fn holonet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holonet")).args(args).output().expect("run holonet")
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let a = holonet(&["verify", "all", "--seed", "7"]);
    let b = holonet(&["verify", "all", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("holonet verify seed=7\n"));
    assert!(text.trim_end().ends_with("0 failed"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(holonet(&["approx", "--activation", "tanh"]).status.code(), Some(2));
    assert_eq!(holonet(&["approx", "--target", "nope", "--activation", "tanh", "--eps", "0.1"]).status.code(), Some(2));
    assert_eq!(holonet(&["verify", "bogus"]).status.code(), Some(2));
    assert_eq!(holonet(&["bound", "covering", "--delta", "0.1", "--L", "2", "--N", "3", "--S", "9", "--B", "1", "--activation", "repu(2)"]).status.code(), Some(2));
}

#[test]
fn approx_network_round_trips_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let net_path = dir.path().join("net.json");
    let report = dir.path().join("report.csv");
    let out = holonet(&[
        "approx",
        "--target",
        "sin2pi_d1",
        "--activation",
        "tanh",
        "--eps",
        "0.2",
        "--out",
        net_path.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let mut rows = csv::Reader::from_path(&report).unwrap();
    let header: Vec<String> = rows.headers().unwrap().iter().map(String::from).collect();
    let row = rows.records().next().unwrap().unwrap();
    let col = |name: &str| row[header.iter().position(|h| h == name).unwrap()].parse::<f64>().unwrap();

    let net = Network::load(&net_path).unwrap();
    assert_eq!(net.depth() as f64, col("depth"));
    assert_eq!(net.sparsity() as f64, col("sparsity"));
    let f = corpus("sin2pi_d1").unwrap();
    let err = sup_error_on(&net.evaluator(), &f, Scheme::Grid(100_000), &Region::unit(1));
    assert_eq!(err, col("sup_err_grid"));
}

#[test]
fn lift_and_bounds_from_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("relu.json");
    let dst = dir.path().join("leaky.json");
    let ok = holonet(&["approx", "--target", "sin2pi_d1", "--activation", "relu", "--eps", "0.2", "--out", src.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    let lifted = holonet(&[
        "lift",
        "--in",
        src.to_str().unwrap(),
        "--activation",
        "leaky_relu(0.01)",
        "--out",
        dst.to_str().unwrap(),
        "--verify",
        "n=2000",
    ]);
    assert_eq!(lifted.status.code(), Some(0), "{}", String::from_utf8_lossy(&lifted.stderr));
    let a = Network::load(&src).unwrap();
    let b = Network::load(&dst).unwrap();
    assert_eq!(b.width(), 2 * a.width());

    let rates = holonet(&["bound", "rates", "--task", "classification", "--n", "1e4", "--alpha", "1", "--d", "1", "--q", "1"]);
    let text = String::from_utf8(rates.stdout).unwrap();
    assert!(text.contains("\"width_exponent\": \"1/4\""), "{text}");
    assert!(text.contains("\"rate_exponent\": \"1/2\""), "{text}");

    let sweep = holonet(&["sweep", "gadget", "square", "--activation", "sigmoid", "--K", "100,1000,10000"]);
    let text = String::from_utf8(sweep.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("square,")).count(), 3);
    assert!(text.contains("# fitted slope"));
}
