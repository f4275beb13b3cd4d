use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pam_cli::commands;
use pam_cli::config::ModelConfig;
use pam_cli::output::{Cell, Format};

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn pam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pam")).args(args).output().expect("run pam")
}

fn pam_with_config(cmd: &str, config: &Path, extra: &[&str]) -> Output {
    let mut args = vec![cmd, "--config", config.to_str().unwrap()];
    args.extend_from_slice(extra);
    pam(&args)
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("model.toml");
    std::fs::write(&p, text).unwrap();
    p
}

const WHITE: &str = r#"
[model]
d = 1
lambda = 0.0

[model.spectral]
family = "white_space"

[model.temporal]
family = "constant"
c = 1.0

[model.initial]
atoms = [{ location = [0.0], weight = 2.0 }]

[grid]
t = [0.5, 1.0]
x = [[0.0], [0.3]]
"#;

#[test]
fn bounds_csv_matches_library_bit_for_bit() {
    let path = config_path("standard.toml");
    let out = pam_with_config("bounds", &path, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cfg = ModelConfig::load(&path).unwrap();
    let table = commands::bounds(&cfg).unwrap();
    assert_eq!(out.stdout, table.encode(Format::Csv));
}

#[test]
fn csv_and_json_round_trip_to_the_same_floats() {
    let path = config_path("standard.toml");
    let cfg = ModelConfig::load(&path).unwrap();
    let table = commands::bounds(&cfg).unwrap();
    let json_out = pam_with_config("bounds", &path, &["--format", "json"]);
    assert!(json_out.status.success());
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&json_out.stdout).unwrap();
    let csv_out = pam_with_config("bounds", &path, &[]);
    let mut reader = csv::Reader::from_reader(csv_out.stdout.as_slice());
    let records: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), table.rows.len());
    assert_eq!(records.len(), table.rows.len());
    for ((row, json), rec) in table.rows.iter().zip(&rows).zip(&records) {
        for (k, (cell, name)) in row.iter().zip(&table.columns).enumerate() {
            if let Cell::Float(v) = cell {
                assert_eq!(json[*name].as_f64().unwrap(), *v, "json column {name}");
                assert_eq!(rec[k].parse::<f64>().unwrap(), *v, "csv column {name}");
            }
        }
    }
}

#[test]
fn zero_coupling_gives_the_initial_data_bound() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ModelConfig::parse(WHITE).unwrap();
    let table = commands::bounds(&cfg).unwrap();
    let col = |name: &str| table.columns.iter().position(|c| *c == name).unwrap();
    for row in &table.rows {
        let (Cell::Float(jp), Cell::Float(h), Cell::Float(b)) = (&row[col("j_plus")], &row[col("h_tilde")], &row[col("bound_p")])
        else {
            panic!("float cells expected");
        };
        assert_eq!(*h, 1.0);
        assert_eq!(*b, *jp);
    }
    let out = pam_with_config("bounds", &write_config(dir.path(), WHITE), &[]);
    assert!(out.status.success());
}

#[test]
fn holder_white_noise_exponents() {
    let out = pam_with_config("holder", &config_path("white_noise.toml"), &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rec = reader.records().next().unwrap().unwrap();
    let time: f64 = rec[1].parse().unwrap();
    let space: f64 = rec[2].parse().unwrap();
    assert!((time - 0.25).abs() < 1e-12 && (space - 0.5).abs() < 1e-12, "{text}");
}

#[test]
fn chaos_first_order_reports_chain_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("chaos.csv");
    let out = pam_with_config(
        "chaos",
        &config_path("standard.toml"),
        &["--order", "1", "--out", out_path.to_str().unwrap()],
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("chain bound OK"), "{text}");
    assert!(!text.contains("VIOLATED"), "{text}");
    assert!(std::fs::read_to_string(out_path).unwrap().starts_with("order,t,x,alpha_1"));
}

#[test]
fn dalang_violation_exits_with_model_code() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[model]
d = 3
lambda = 1.0

[model.spectral]
family = "radial_density"
density = { kind = "bessel", nu = 0.0 }

[model.temporal]
family = "constant"
c = 1.0

[model.initial]
atoms = [{ location = [0.0, 0.0, 0.0], weight = 1.0 }]

[grid]
t = [1.0]
x = [[0.0, 0.0, 0.0]]
"#;
    let out = pam_with_config("bounds", &write_config(dir.path(), text), &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Dalang"));
}

#[test]
fn bad_configs_exit_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let unknown_key = WHITE.replace("lambda = 0.0", "lambda = 0.0\nlambda_typo = 1.0");
    let out = pam_with_config("bounds", &write_config(dir.path(), &unknown_key), &[]);
    assert_eq!(out.status.code(), Some(2));
    let wrong_dim = WHITE.replace("x = [[0.0], [0.3]]", "x = [[0.0, 1.0]]");
    let out = pam_with_config("bounds", &write_config(dir.path(), &wrong_dim), &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = pam_with_config("bounds", &dir.path().join("missing.toml"), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn worker_count_does_not_change_output() {
    let path = config_path("standard.toml");
    let args = ["chaos", "--config", path.to_str().unwrap(), "--order", "2"];
    let one = Command::new(env!("CARGO_BIN_EXE_pam"))
        .args(args)
        .env("PAM_WORKERS", "1")
        .output()
        .unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_pam"))
        .args(args)
        .env("PAM_WORKERS", "4")
        .output()
        .unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn seed_flag_overrides_config_seed() {
    let path = config_path("standard.toml");
    let a = pam_with_config("chaos", &path, &["--order", "2", "--seed", "7"]);
    let b = pam_with_config("chaos", &path, &["--order", "2", "--seed", "7"]);
    let c = pam_with_config("chaos", &path, &["--order", "2", "--seed", "8"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn verify_identities_passes() {
    let out = pam(&["verify", "--suite", "identities", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains(" 0 failed"));
}
