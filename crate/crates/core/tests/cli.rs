use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_warpfold"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SMALL_BSV: &str = r#"
scenario = "bsv"
seed = 7

[map]
kind = "weierstrass-p"

[samples]
algebra = 100
wp = 20
nijenhuis = 10
torsion_points = 5
"#;

#[test]
fn run_is_byte_identical_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bsv.toml", SMALL_BSV);
    let mut outputs = Vec::new();
    for name in ["a.json", "b.json"] {
        let out = dir.path().join(name);
        let st = bin().args(["run", "--config"]).arg(&cfg).arg("--report").arg(&out).status().unwrap();
        assert_eq!(st.code(), Some(0));
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let v: serde_json::Value = serde_json::from_slice(&outputs[0]).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["seed"], 7);
    let names: Vec<&str> = v["records"].as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);

    let out = dir.path().join("c.json");
    let st = bin().args(["run", "--seed", "8", "--config"]).arg(&cfg).arg("--report").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["config"]["seed"], 8);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "scenario = \"bsv\"\n[tolerances]\nalgebra = 0.0\n");
    let out = bin().args(["run", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tolerances.algebra"));

    let missing = bin().args(["run", "--config", "/nonexistent/x.toml"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));

    let strict = write(
        dir.path(),
        "strict.toml",
        "scenario = \"twistor\"\n[tolerances]\nintegral_rel = 1e-300\n",
    );
    let out = bin().args(["run", "--config"]).arg(&strict).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["summary"]["all_pass"], false);
}

#[test]
fn grid_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "t.toml", "scenario = \"twistor\"\n");
    let out = dir.path().join("g.csv");
    let st = bin()
        .args(["grid", "--field", "fs-density", "--resolution", "3", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,fs_density");
    assert_eq!(lines.len(), 10);

    let st = bin().args(["grid", "--field", "bogus", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(st.status.code(), Some(2));

    let empty = bin().args(["grid", "--field", "lambda-sq", "--resolution", "0", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&empty.stdout), "x,y,lambda_sq\n");
}

#[test]
fn shipped_configs_run_clean() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let out = tempfile::NamedTempFile::new().unwrap();
        let st = bin().args(["run", "--config"]).arg(&path).arg("--report").arg(out.path()).status().unwrap();
        assert_eq!(st.code(), Some(0), "{}", path.display());
        n += 1;
    }
    assert!(n >= 5);
}
