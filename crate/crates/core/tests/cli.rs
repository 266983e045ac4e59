use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eitmem"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], out: &Path) -> std::process::Output {
    let o = bin().args(args).arg("--out").arg(out).output().unwrap();
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn store_on_table1_config_lands_in_band() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("table1.cfg");
    run(&["store", "--config", cfg.to_str().unwrap()], dir.path());
    let v = json(&dir.path().join("store.json"));
    let eta = v["efficiency"].as_f64().unwrap();
    assert!((0.80..=0.91).contains(&eta), "{eta}");
    let head = std::fs::read_to_string(dir.path().join("retrieved.csv")).unwrap();
    assert!(head.starts_with("tau_ns,re,im\n"));
    let m = json(&dir.path().join("manifest.json"));
    assert_eq!(m["command"], "store");
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn qubit_h_is_stored_perfectly_without_noise() {
    let dir = tempfile::tempdir().unwrap();
    run(&["qubit", "--state", "0,0", "--state", "90,90"], dir.path());
    let v = json(&dir.path().join("qubit.json"));
    for s in v["states"].as_array().unwrap() {
        assert!((s["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-12, "{s}");
    }
}

#[test]
fn g2_is_byte_identical_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("g2.cfg");
    std::fs::write(&cfg, "seed = 11\n[counts]\nheralds = 300000\n").unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run(&["g2", "--config", cfg.to_str().unwrap()], &a);
    run(&["g2", "--config", cfg.to_str().unwrap(), "--jobs", "2"], &b);
    for f in ["g2_curve.csv", "tally.csv", "g2.json", "manifest.json"] {
        if f == "manifest.json" {
            // only the output directory differs
            let (ma, mb) = (json(&a.join(f)), json(&b.join(f)));
            assert_eq!(ma["config"]["seed"], mb["config"]["seed"]);
            continue;
        }
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let c = dir.path().join("c");
    run(&["g2", "--config", cfg.to_str().unwrap(), "--seed", "12"], &c);
    assert_ne!(
        std::fs::read(a.join("tally.csv")).unwrap(),
        std::fs::read(c.join("tally.csv")).unwrap()
    );
}

#[test]
fn transmission_writes_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    run(&["transmission"], dir.path());
    let text = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("delta_hz,transmission"));
    assert_eq!(lines.count(), 801);
    let t0 = json(&dir.path().join("transmission.json"))["transmission_at_resonance"]
        .as_f64()
        .unwrap();
    assert!((t0 - 0.992).abs() < 1e-3);
}

#[test]
fn tomography_from_counts_file() {
    let dir = tempfile::tempdir().unwrap();
    let counts = dir.path().join("counts.csv");
    std::fs::write(
        &counts,
        "basis,outcome,count\nHV,H,500\nHV,V,500\nDA,D,500\nDA,A,500\nLR,L,1000\nLR,R,0\n",
    )
    .unwrap();
    run(&["tomography", "--counts", counts.to_str().unwrap()], dir.path());
    let v = json(&dir.path().join("tomography.json"));
    let bloch: Vec<f64> = v["bloch"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!(bloch[0].abs() < 1e-12 && (bloch[1] - 1.0).abs() < 1e-12 && bloch[2].abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "[medium]\nod = 300\ncolour = \"blue\"\n").unwrap();
    let o = bin()
        .args(["store", "--config", bad.to_str().unwrap(), "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("colour") && err.contains("line 3"), "{err}");

    let o = bin().arg("--check").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let report = String::from_utf8_lossy(&o.stdout);
    assert_eq!(report.lines().filter(|l| l.starts_with("PASS")).count(), 3, "{report}");
}

#[test]
fn bundled_configs_parse() {
    for name in ["fig2.cfg", "fig4.cfg", "fig5.cfg", "table1.cfg"] {
        eitmem::config::RunConfig::from_path(&configs().join(name)).unwrap();
    }
}
