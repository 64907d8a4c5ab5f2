//! Load a scenario file, run a sweep and write CSV, JSON and SVG reports.
//!
//! Usage: cargo run --example scenario_report -- [scenario.toml] [out_dir]

use std::path::PathBuf;

use homog::harness::{emit_report, load_scenario, run_sweep, ReportFormat, SweepConfig, SweepKind};

fn main() -> homog::Result<()> {
    let mut args = std::env::args().skip(1);
    let scenario = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| [env!("CARGO_MANIFEST_DIR"), "..", "..", "scenarios", "cosine_small.toml"].iter().collect());
    let out = args.next().map(PathBuf::from).unwrap_or_else(std::env::temp_dir);

    let s = load_scenario(&scenario)?;
    println!("{} ({}), fingerprint {}", s.name(), scenario.display(), &s.fingerprint[..12]);
    let report = run_sweep(&s, SweepConfig::new(SweepKind::Theorem1))?;
    for row in &report.rows {
        println!("eps {:<8} gap {:?}", row.eps, row.gap);
    }
    let v = report.verdict();
    println!("slope {:?}  pass {}  {:?}", report.slope(), v.pass, v.reasons);
    for (ext, fmt) in [("csv", ReportFormat::Csv), ("json", ReportFormat::Json), ("svg", ReportFormat::Svg)] {
        let path = out.join(format!("{}.{ext}", s.name()));
        emit_report(&report, &path, fmt)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
