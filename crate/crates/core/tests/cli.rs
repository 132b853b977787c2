use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn odcmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_odcmd"))
        .args(args)
        .env_remove("ODCMD_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("odcmd-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

const SMALL: &str = r#"
name = "small"
seed = 5
algorithm = "odcmd"
horizons = [20, 40]

[problem]
nodes = 4
dim = 3

[network]
kind = "ring"

[sweep]
[[sweep.axes]]
path = "algorithm"
values = ["odcmd", "subgradient_baseline"]
"#;

#[test]
fn check_passes_on_fig2() {
    let out = odcmd(&["check", "--preset", "fig2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("check passed"));
}

#[test]
fn check_names_the_exploration_condition() {
    let dir = scratch("delta");
    let path = dir.join("bad.toml");
    let text = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/presets/fig5.toml")).unwrap()
        + "\n[exploration]\ndelta = 0.5\nxi = 0.1\n";
    fs::write(&path, text).unwrap();
    let out = odcmd(&["check", "--config", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Set δ ≤ ξR̲"));
}

#[test]
fn check_rejects_entropic_ball_and_unknown_fields() {
    let dir = scratch("pairing");
    let path = dir.join("entropic.toml");
    fs::write(&path, SMALL.replace("[network]", "[geometry]\nmap = \"entropic\"\nset = \"ball\"\n\n[network]")).unwrap();
    let out = odcmd(&["check", "--config", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported pairing"));

    fs::write(&path, SMALL.replace("dim = 3", "dim = 3\ndimension = 4")).unwrap();
    let out = odcmd(&["check", "--config", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension"));
}

#[test]
fn run_writes_outputs_deterministically() {
    let dir = scratch("run");
    let cfg = dir.join("small.toml");
    fs::write(&cfg, SMALL).unwrap();
    let mut csvs = Vec::new();
    for sub in ["a", "b"] {
        let out_dir = dir.join(sub);
        let out = odcmd(&[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--threads",
            "2",
            "--strict",
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        for f in ["regret.csv", "summary.json", "network.json", "curves/algorithm-odcmd.csv"] {
            assert!(out_dir.join(f).exists(), "{f}");
        }
        csvs.push(fs::read(out_dir.join("regret.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);

    let reseeded = dir.join("c");
    let out = odcmd(&["run", "--config", cfg.to_str().unwrap(), "--out", reseeded.to_str().unwrap(), "--seed", "6"]);
    assert!(out.status.success());
    assert_ne!(fs::read(reseeded.join("regret.csv")).unwrap(), csvs[0]);

    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.join("a/summary.json")).unwrap()).unwrap();
    let cells = summary["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 4);
    assert!(cells[0]["constants"]["kappa"].as_f64().unwrap() < 1.0);
}

#[test]
fn out_dir_defaults_from_environment() {
    let dir = scratch("env");
    let cfg = dir.join("small.toml");
    fs::write(&cfg, SMALL).unwrap();
    let target = dir.join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_odcmd"))
        .args(["run", "--config", cfg.to_str().unwrap()])
        .env("ODCMD_OUT_DIR", &target)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(target.join("regret.csv").exists());
}

#[test]
fn source_is_required_and_exclusive() {
    assert!(!odcmd(&["check"]).status.success());
    assert!(!odcmd(&["check", "--preset", "fig2", "--config", "x.toml"]).status.success());
    let out = odcmd(&["check", "--preset", "fig9"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown preset"));
}
