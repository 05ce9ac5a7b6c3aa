use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn conelab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conelab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn conelab_threads(args: &[&str], dir: &Path, threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conelab"))
        .args(args)
        .current_dir(dir)
        .env("CONELAB_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn gen_mesh(dir: &Path, spec: &str, name: &str) {
    let out = conelab(&["mesh-gen", "--spec", spec, "--out", name], dir);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn torus_spectrum_counts_harmonic_one_forms() {
    let dir = tempfile::tempdir().unwrap();
    gen_mesh(dir.path(), "torus(3,4,tau)", "t3.json");
    let out = conelab(&["spectrum", "--mesh", "t3.json", "--degree", "1", "--modes", "8"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["verdict"], "pass");
    assert_eq!(r["result"]["near_zero_count"], 3);
    assert_eq!(r["result"]["eigenvalues"].as_array().unwrap().len(), 8);
    assert_eq!(r["config"]["degree"], 1);
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn reports_are_byte_identical_across_runs_and_pool_sizes() {
    let dir = tempfile::tempdir().unwrap();
    gen_mesh(dir.path(), "torus(3,4,tau)", "t3.json");
    let args = ["indicial", "--mesh", "t3.json", "--cone-dim", "4", "--degree", "1", "--modes", "20"];
    let a = conelab_threads(&args, dir.path(), "1");
    let b = conelab_threads(&args, dir.path(), "4");
    let c = conelab(&args, dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let r = json(&a);
    assert_eq!(r["result"]["report"]["l"], 4);
    assert_eq!(r["result"]["options"]["modes"], 20);
}

#[test]
fn indicial_csv_has_one_row_per_mode() {
    let dir = tempfile::tempdir().unwrap();
    gen_mesh(dir.path(), "sphere(2)", "s2.json");
    let out = conelab(
        &["indicial", "--mesh", "s2.json", "--cone-dim", "3", "--degree", "1", "--modes", "4", "--format", "csv"],
        dir.path(),
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "j,lambda,alpha_root,beta_root,order_alpha,order_beta");
    assert_eq!(lines.len(), 5);
}

#[test]
fn cone_dimension_must_match_the_link() {
    let dir = tempfile::tempdir().unwrap();
    gen_mesh(dir.path(), "sphere(2)", "s2.json");
    let out = conelab(&["indicial", "--mesh", "s2.json", "--cone-dim", "4", "--degree", "1"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--cone-dim"));
}

#[test]
fn missing_mesh_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = conelab(&["spectrum", "--mesh", "absent.json", "--degree", "0"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.json"));
    assert!(out.stdout.is_empty());
}

#[test]
fn parse_errors_carry_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\n  \"dim\": 1,\n  \"simplices\": [[0, 1]],,\n}\n").unwrap();
    let out = conelab(&["spectrum", "--mesh", "bad.json", "--degree", "0"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:3:"), "{err}");
}

#[test]
fn odp_threefold_satisfies_the_betti_hypothesis() {
    let dir = tempfile::tempdir().unwrap();
    let out = conelab(&["check-cone", "--record", "odp-3fold"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["verdict"], "pass");
    assert_eq!(r["result"]["check"]["theorem12"]["holds"], true);
    assert_eq!(r["result"]["check"]["theorem13"]["flag"], "violated");
}

#[test]
fn failed_verdicts_exit_two_and_name_the_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let out = conelab(&["check-cone", "--record", "s2xs3-link-3fold", "--modes", "12"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert_eq!(r["verdict"], "fail");
    let failures = r["failures"].as_array().unwrap();
    assert!(!failures.is_empty());
    for f in failures {
        assert!(!f["invariant"].as_str().unwrap().is_empty());
        assert!(!f["claim"].as_str().unwrap().is_empty());
    }
    // The m = 0 degree is flagged, never passed or failed.
    let degrees = r["result"]["degrees"].as_array().unwrap();
    let p2 = degrees.iter().find(|d| d["p"] == 2).unwrap();
    assert_eq!(p2["m"], 0.0);
    assert_eq!(p2["nolog"], "flagged");
}

#[test]
fn glue_report_passes_for_the_quadratic_potential() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("poly.json"),
        r#"{"z1 zbar1": 1.0, "z2 zbar2": 1.0, "z1^2": 0.15, "zbar1^2": 0.15}"#,
    )
    .unwrap();
    let out = conelab(&["glue", "--weights", "0.7,0.9", "--potential", "poly.json", "--out", "glue.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("glue.json")).unwrap()).unwrap();
    let items = r["result"]["report"]["items"].as_array().unwrap();
    assert!(items.iter().all(|i| i["verdict"] == "pass"));
    assert!(r["result"]["report"]["delta"].as_f64().unwrap() > 0.0);
}

#[test]
fn glue_rejects_potentials_with_a_linear_part() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("poly.json"), r#"{"z1": 1.0, "z2 zbar2": 1.0}"#).unwrap();
    let out = conelab(&["glue", "--weights", "0.7,0.9", "--potential", "poly.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn catalog_round_trips_through_a_registry_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = conelab(&["catalog", "export", "--to", "catalog.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("catalog.json").exists());
    let show = json(&conelab(&["catalog", "show", "--name", "odp-5fold"], dir.path()));
    assert_eq!(show["result"]["n"], 5);
    let check = json(&conelab(&["catalog", "check", "--name", "odp-5fold"], dir.path()));
    assert_eq!(check["result"][0]["minimal_exponent"], "3/1");
    let list = json(&conelab(&["catalog", "list"], dir.path()));
    assert!(list["result"].as_array().unwrap().len() >= 7);
    let missing = conelab(&["catalog", "show", "--name", "nope"], dir.path());
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn artin_check_passes_and_records_its_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = conelab(&["artin-check", "--k", "3", "--trials", "30", "--seed", "11"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["config"]["seed"], 11);
    assert_eq!(r["result"]["checks"].as_array().unwrap().len(), 4);
}

#[test]
fn invalid_thread_cap_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = conelab_threads(&["catalog", "list"], dir.path(), "zero");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("CONELAB_THREADS"));
}

#[test]
fn mesh_gen_rejects_unknown_generators() {
    let dir = tempfile::tempdir().unwrap();
    let out = conelab(&["mesh-gen", "--spec", "klein(3)"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}
