//! Runs a built-in figure preset through the experiment API and writes its
//! CSV and JSON outputs.
//!
//! `cargo run --release --example presets -- fig3 /tmp/fig3`

use std::path::PathBuf;

use odcmd::experiment::{check, preset, run_experiment, PRESET_NAMES};

fn main() -> odcmd::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "fig2".into());
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join(&name));
    if !PRESET_NAMES.contains(&name.as_str()) {
        eprintln!("presets: {}", PRESET_NAMES.join(", "));
    }
    let config = preset(&name)?;

    let report = check(&config)?.into_result()?;
    println!("{} network checks passed", report.cells.len());

    let output = run_experiment(&config, &out)?;
    for r in &output.results {
        println!("{:<40} T={:<5} max {:.4}  min {:.4}", r.label, r.horizon, r.report.max, r.report.min);
    }
    println!("outputs in {}", out.display());
    Ok(())
}
