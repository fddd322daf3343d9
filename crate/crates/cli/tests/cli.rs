use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use chansplit::Channel;
use tempfile::TempDir;

fn chansplit(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chansplit")).arg("--out").arg(out).args(args).output().unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path).unwrap().lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn channel_report_for_bsc() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("bsc.json");
    fs::write(&file, Channel::bsc(0.1).unwrap().to_json()).unwrap();
    let out = chansplit(dir.path(), &["channel", "--file", file.to_str().unwrap(), "--rates", "0:0.1:0.5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let stdout: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let saved: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("channel_report.json")).unwrap()).unwrap();
    assert_eq!(stdout, saved);
    assert_eq!(saved["inputs"], 2);
    assert_eq!(saved["outputs"], 2);
    let r0 = saved["cutoff_rate"].as_f64().unwrap();
    assert!((r0 - (1.0 - (1.0 + 2.0 * (0.09f64).sqrt()).log2())).abs() < 1e-12);
    assert!((saved["e0_uniform"].as_f64().unwrap() - r0).abs() < 1e-12);
    assert!((saved["capacity"].as_f64().unwrap() - 0.531004406410719).abs() < 1e-9);
    let er = saved["er"].as_array().unwrap();
    assert_eq!(er.len(), 6);
    assert!((er[0]["exponent"].as_f64().unwrap() - r0).abs() < 1e-9);
    assert!(er.windows(2).all(|w| w[1]["exponent"].as_f64() <= w[0]["exponent"].as_f64()));
}

#[test]
fn channel_report_for_noiseless_channel() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("id.json");
    fs::write(&file, r#"{"inputs": 3, "outputs": 3, "rows": [[1,0,0],[0,1,0],[0,0,1]]}"#).unwrap();
    let out = chansplit(dir.path(), &["channel", "--file", file.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let log3 = 3f64.log2();
    assert!((v["cutoff_rate"].as_f64().unwrap() - log3).abs() < 1e-12);
    assert!((v["capacity"].as_f64().unwrap() - log3).abs() < 1e-9);
    assert_eq!(v["er"].as_array().unwrap().len(), 0);
}

#[test]
fn non_stochastic_channel_exits_2_and_names_row() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("bad.json");
    fs::write(&file, r#"{"inputs": 2, "outputs": 2, "rows": [[0.9,0.1],[0.3,0.6]]}"#).unwrap();
    let out = chansplit(dir.path(), &["channel", "--file", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 1"));
}

#[test]
fn malformed_json_exits_2() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("broken.json");
    fs::write(&file, "{ not json").unwrap();
    let out = chansplit(dir.path(), &["channel", "--file", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_file_exits_1() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.json");
    let out = chansplit(dir.path(), &["channel", "--file", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_arguments_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(chansplit(dir.path(), &["massey", "--eps", "1.5"]).status.code(), Some(2));
    assert_eq!(chansplit(dir.path(), &["bsc-split", "--eps-grid", "0:0.1:0.7"]).status.code(), Some(2));
    assert_eq!(chansplit(dir.path(), &["kron", "--k", "0"]).status.code(), Some(2));
    assert_eq!(chansplit(dir.path(), &["kron", "--k", "5"]).status.code(), Some(2));
}

#[test]
fn massey_outputs() {
    let dir = TempDir::new().unwrap();
    assert!(chansplit(dir.path(), &["massey"]).status.success());
    let fig1 = csv_rows(&dir.path().join("fig1_exponents.csv"));
    assert_eq!(fig1[0], ["x", "qec", "split_bec"]);
    assert!((num(&fig1[1][1]) - 1.192645).abs() < 1e-6);
    assert!((num(&fig1[1][2]) - 1.356144).abs() < 1e-6);
    let fig2 = csv_rows(&dir.path().join("fig2_rates.csv"));
    assert_eq!(fig2[0], ["x", "capacity_qec", "r0_qec", "r0_split_bec", "gain"]);
    assert_eq!(fig2.len(), 102);
}

#[test]
fn split_family_outputs() {
    let dir = TempDir::new().unwrap();
    assert!(chansplit(dir.path(), &["bec-split", "--eps-grid", "0.25:0.25:0.75"]).status.success());
    let rows = csv_rows(&dir.path().join("fig4_bec_split.csv"));
    assert_eq!(rows[0], ["x", "r0_base", "r0_stage1", "r0_stage2", "normalized"]);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[1][0], "0.25");
    assert!((num(&rows[1][2]) - 0.476439).abs() < 1e-6);
    assert!((num(&rows[1][3]) - 0.912537).abs() < 1e-6);

    assert!(chansplit(dir.path(), &["bsc-split"]).status.success());
    let rows = csv_rows(&dir.path().join("fig5_bsc_split.csv"));
    assert_eq!(rows.len(), 52);
    let at = rows.iter().find(|r| r[0] == "0.1").unwrap();
    assert!((num(&at[2]) - 0.177575).abs() < 1e-6);
    assert!((num(&at[3]) - 0.556393).abs() < 1e-6);
}

#[test]
fn kron_outputs() {
    let dir = TempDir::new().unwrap();
    assert!(chansplit(dir.path(), &["kron", "--k", "3"]).status.success());
    let summary = csv_rows(&dir.path().join("kron_summary.csv"));
    assert_eq!(summary[0], ["k", "n", "sum", "normalized"]);
    assert_eq!(summary[3][1], "8");
    assert!((num(&summary[1][3]) - 0.366985).abs() < 1e-6);
    let k3 = fs::read_to_string(dir.path().join("kron_k3.csv")).unwrap();
    assert!(k3.starts_with("index,rate\n1,"));
    assert!(k3.contains("# normalized="));

    let flat = TempDir::new().unwrap();
    assert!(chansplit(flat.path(), &["kron", "--k", "2", "--identity"]).status.success());
    let summary = csv_rows(&flat.path().join("kron_summary.csv"));
    let r0 = 1.0 - (1.0 + 2.0 * (0.09f64).sqrt()).log2();
    assert!((num(&summary[2][3]) - r0).abs() < 1e-9);
}

#[test]
fn code_with_small_generator() {
    let dir = TempDir::new().unwrap();
    let gen = dir.path().join("p.txt");
    // [3,2] single parity check code: P = [1; 1].
    fs::write(&gen, "2 1\n1\n1\n").unwrap();
    let out = chansplit(dir.path(), &["code", "--generator", gen.to_str().unwrap(), "--eps", "0.1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("fig6_allocation.csv")).unwrap();
    let rates: Vec<f64> =
        text.lines().skip(1).filter(|l| !l.starts_with('#')).map(|l| num(l.split(',').nth(1).unwrap())).collect();
    assert_eq!(rates.len(), 3);
    // The syndrome stage sees the parity of all three crossovers.
    let eps3 = 0.5 * (1.0 - 0.8f64.powi(3));
    let want = 1.0 - (1.0 + 2.0 * (eps3 * (1.0 - eps3)).sqrt()).log2();
    assert!((rates[0] - want).abs() < 1e-9, "{} vs {want}", rates[0]);
}

#[test]
fn code_defaults_to_bundled_generator() {
    let dir = TempDir::new().unwrap();
    assert!(chansplit(dir.path(), &["code"]).status.success());
    let text = fs::read_to_string(dir.path().join("fig6_allocation.csv")).unwrap();
    assert!(text.contains("\n23,"));
    assert!(text.contains("# normalized=0.4502"));
}
