use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qscar(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qscar")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn quantize_writes_sorted_levels() {
    let dir = tempfile::tempdir().unwrap();
    let o = qscar(&["quantize", "--irrep", "A1", "--window", "0:30"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(&dir.path().join("levels_A1.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("orbit,n,irrep,energy"));
    let e: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert!(!e.is_empty());
    assert!(e.windows(2).all(|w| w[0] <= w[1]));
    assert!(e.iter().all(|&v| v > 0.0 && v < 30.0));
    let m: serde_json::Value = serde_json::from_str(&read(&dir.path().join("manifest.json"))).unwrap();
    assert_eq!(m["results"]["levels"]["A1"].as_u64().unwrap() as usize, e.len());
}

#[test]
fn bad_input_is_reported_with_stage() {
    let dir = tempfile::tempdir().unwrap();
    let o = qscar(&["quantize", "--window", "5:2"], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("error [config]"));

    let o = qscar(&["quantize", "--orbit-ids", "99"], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("error [orbits]"));

    let o = qscar(&["solve", "--grid", "100", "--window", "0:4"], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("error [grid]"));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# levels only\nirrep = B2\nwindow = 0:10\n").unwrap();
    let out = dir.path().join("a");
    let o = qscar(&["quantize", "--config", cfg.to_str().unwrap(), "--window", "0:12"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("levels_B2.csv").is_file());
    let m = read(&out.join("manifest.json"));
    assert!(m.contains("window = 0.0:12.0"));
}

#[test]
fn solve_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["solve", "--window", "0:4", "--orbit-ids", "1,2,3,5,7"];
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o = qscar(&args, &a);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = qscar(&[&args[..], &["--threads", "1"]].concat(), &b);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["scars_A1.csv", "selection_A1.csv", "spectrum_A1.csv"] {
        assert_eq!(read(&a.join(f)), read(&b.join(f)), "{f} differs between runs");
    }
    let spec = read(&a.join("spectrum_A1.csv"));
    let first: f64 = spec.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    // Ground state of the A1 block is 0.56323.
    assert!((first - 0.56323).abs() < 5e-3, "{first}");
}

#[test]
fn snapshots_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = qscar(&["scars", "--window", "0:2", "--orbit-ids", "3", "--snapshots"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let snaps: Vec<_> = fs::read_dir(dir.path().join("scars_A1")).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(!snaps.is_empty());
    let (wf, e, meta) = qscar::wavefunctions::WaveFunction::read_snapshot(&snaps[0]).unwrap();
    // Values are stored in single precision.
    assert!((wf.norm() - 1.0).abs() < 1e-6);
    assert!(e > 0.0 && e < 2.0 + 2.0);
    assert!(meta.contains("orbit=3"));
}
