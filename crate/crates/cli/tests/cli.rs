use std::f64::consts::PI;
use std::io::Write;
use std::process::{Command, Output};

fn cmcvol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmcvol")).args(args).output().expect("binary runs")
}

fn json_lines(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

fn config_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn verify_passes_every_criterion() {
    let out = cmcvol(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = json_lines(&out);
    assert_eq!(recs.len(), 12);
    assert!(recs.iter().all(|r| r["status"] == "pass"));
}

#[test]
fn quarter_angle_volume_is_pi_squared() {
    let out = cmcvol(&["lawson-volume", "--phi", "pi/4", "--genus", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json_lines(&out)[0];
    assert!((r["V"].as_f64().unwrap() - PI * PI).abs() < 1e-10);
    assert_eq!(r["genus"], 100);
}

#[test]
fn sphere_check_has_trivial_holonomy() {
    let out = cmcvol(&["sphere-check"]);
    assert_eq!(out.status.code(), Some(0));
    for r in json_lines(&out) {
        assert!(r["log_hol_re"].as_f64().unwrap().abs() < 1e-9);
        assert!(r["log_hol_im"].as_f64().unwrap().abs() < 1e-9);
        assert_eq!(r["status"], "pass");
    }
}

#[test]
fn torus_record() {
    let out = cmcvol(&["torus", "--r", "0.8", "--s", "0.6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json_lines(&out)[0];
    assert!((r["W"].as_f64().unwrap() - PI * PI / 0.48).abs() < 1e-12);
    assert!((r["V"].as_f64().unwrap() - 2.0 * PI * PI * 0.36).abs() < 1e-12);
    let out = cmcvol(&["torus", "--r", "0.5", "--s", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_range_error_exits_2_with_line() {
    let f = config_file("# bad angle\nphi = 2\n");
    let out = cmcvol(&["--config", f.path().to_str().unwrap(), "lawson-volume"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("phi"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_key_and_malformed_value() {
    let f = config_file("genus = 10\ncolour = red\n");
    let out = cmcvol(&["--config", f.path().to_str().unwrap(), "lawson-volume"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let out = cmcvol(&["lawson-volume", "--genus", "ten"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("genus"));
    assert_eq!(cmcvol(&[]).status.code(), Some(2));
}

#[test]
fn flags_override_file_values() {
    let f = config_file("phi = pi/6\ngenus = 20\ncommand = lawson-volume\n");
    let path = f.path().to_str().unwrap();
    let r = &json_lines(&cmcvol(&["--config", path]))[0];
    assert_eq!(r["phi"].as_f64(), Some(PI / 6.0));
    assert_eq!(r["genus"], 20);
    let r = &json_lines(&cmcvol(&["--config", path, "--phi", "pi/3", "lawson-volume"]))[0];
    assert_eq!(r["phi"].as_f64(), Some(PI / 3.0));
    assert_eq!(r["genus"], 20);
}

#[test]
fn csv_and_json_render_fields_identically() {
    let args = ["lawson-holonomy", "--phi", "0.9", "--genus", "60"];
    let json = cmcvol(&args);
    let csv_out = cmcvol(&[&args[..], &["--format", "csv"]].concat());
    assert_eq!(csv_out.status.code(), Some(0));
    let line = String::from_utf8_lossy(&json.stdout).trim().to_string();
    let text = String::from_utf8_lossy(&csv_out.stdout).to_string();
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let headers = rd.headers().unwrap().clone();
    let row = rd.records().next().unwrap().unwrap();
    for (name, value) in headers.iter().zip(row.iter()) {
        if ["command", "method", "status", "detail", "runtime_ms"].contains(&name) || value.is_empty() {
            continue;
        }
        assert!(line.contains(&format!("\"{name}\":{value}")), "{name}={value} not in {line}");
    }
}

#[test]
fn sweep_is_complete_and_sorted() {
    let out = cmcvol(&["sweep", "--sweep-phi", "pi/3, pi/6, pi/4", "--sweep-genus", "100,50"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = json_lines(&out);
    assert_eq!(recs.len(), 6);
    let keys: Vec<(f64, u64)> = recs.iter().map(|r| (r["phi"].as_f64().unwrap(), r["genus"].as_u64().unwrap())).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    assert_eq!(keys, sorted);
    // the pi/4 volume is pi^2 at every genus
    for r in recs.iter().filter(|r| (r["phi"].as_f64().unwrap() - PI / 4.0).abs() < 1e-15) {
        assert!((r["V"].as_f64().unwrap() - PI * PI).abs() < 1e-10);
    }
}

#[test]
fn output_path_and_failure_record() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = cmcvol(&["sphere-check", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("command,phi,genus,s,theta,W,V,log_hol_re,log_hol_im,method,residual,runtime_ms"));

    let out = cmcvol(&["solve-monodromy", "--genus", "3", "--max-iter", "1", "--solver-tol", "1e-14"]);
    assert_eq!(out.status.code(), Some(1));
    let r = &json_lines(&out)[0];
    assert_eq!(r["status"], "error");
    assert!(r["detail"].as_str().unwrap().contains("no convergence"));
}

#[test]
fn solved_data_across_methods() {
    let base = ["lawson-holonomy", "--phi", "pi/3", "--genus", "49", "--data", "solved"];
    let mut ims = Vec::new();
    for m in ["lev", "regularizing", "darboux"] {
        let out = cmcvol(&[&base[..], &["--method", m]].concat());
        assert_eq!(out.status.code(), Some(0), "{m}: {}", String::from_utf8_lossy(&out.stdout));
        ims.push(json_lines(&out)[0]["log_hol_im"].as_f64().unwrap());
    }
    assert!(ims.iter().all(|v| (v - ims[0]).abs() < 1e-7), "{ims:?}");
}
