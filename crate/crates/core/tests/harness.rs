use std::path::Path;
use std::process::Command;

use homog::error::Error;
use homog::fit::{linear_fit, loglog_fit};
use homog::harness::*;

const TINY: &str = r#"
name = "tiny"
eps = [0.25, 0.125, 0.0625]
seed = 3

[grid]
n1 = 256
n2 = 16

[fields.g1]
family = "x1-cosine"
params = [2.0, 1.0]

[fields.g2]
family = "x1-cosine"
params = [2.0, 1.0]

[solver]
preconditioner = "effective"

[bloch]
k = [0.1, 0.4]
eps = [0.25, 0.125]
n1 = 16
n2 = 8
"#;

const FLAT: &str = r#"
name = "flat"
eps = [0.25, 0.125, 0.0625]

[grid]
n1 = 256
n2 = 16

[fields.g1]
family = "x1-cosine"
params = [2.0, 0.0, 0.5, 0.0]

[fields.g2]
family = "separable-product"
params = [1.0, 0.0, 2.0, 0.5]
"#;

fn without_wall_time(csv: &str) -> String {
    csv.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}

fn tiny() -> ProblemScenario {
    parse_scenario(TINY).unwrap()
}

#[test]
fn fitter_recovers_known_slopes() {
    let xs = [0.25, 0.125, 0.0625, 0.03125];
    for (c, p) in [(3.0, 1.0), (0.2, 2.0), (7.5, 0.5), (1.0, -1.0)] {
        let ys: Vec<f64> = xs.iter().map(|x: &f64| c * x.powf(p)).collect();
        let fit = loglog_fit(&xs, &ys).unwrap();
        assert!((fit.slope - p).abs() <= 1e-10, "{} vs {p}", fit.slope);
    }
    let fit = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
    assert!((fit.slope - 2.0).abs() <= 1e-12);
    assert!(loglog_fit(&[1.0, 2.0], &[0.0, 1.0]).is_err());
}

#[test]
fn scenario_round_trips_through_toml() {
    let s = tiny();
    let again = parse_scenario(&s.file.to_toml().unwrap()).unwrap();
    assert_eq!(again.file, s.file);
    assert_eq!(again.fingerprint, s.fingerprint);
    let reseeded = s.modified(|f| f.seed = 4).unwrap();
    assert_ne!(reseeded.fingerprint, s.fingerprint);
}

#[test]
fn invalid_scenarios_are_rejected() {
    let cases: [(&str, &str); 6] = [
        ("seed = 3", "seed = 3\ncolour = 1"),
        ("eps = [0.25, 0.125, 0.0625]", "eps = [0.25, 0.3, 0.0625]"),
        ("eps = [0.25, 0.125, 0.0625]", "eps = [0.25, 0.0625, 0.125]"),
        ("eps = [0.25, 0.125, 0.0625]", "eps = [0.25, 0.125, 0.03125]"),
        ("params = [2.0, 1.0]", "params = [1.0, 2.0]"),
        ("family = \"x1-cosine\"", "family = \"sawtooth\""),
    ];
    for (from, to) in cases {
        let text = TINY.replacen(from, to, 1);
        let err = parse_scenario(&text).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{to}: {err}");
    }
    let err = parse_scenario(&TINY.replacen("params = [2.0, 1.0]", "params = [1.0, 2.0]", 1)).unwrap_err();
    assert!(matches!(err, Error::Hypothesis { .. }));
    assert!(matches!(load_scenario("/nonexistent/x.toml"), Err(Error::Io { .. })));
}

#[test]
fn sweeps_do_not_depend_on_the_schedule() {
    let s = tiny();
    let serial = run_sweep(&s, SweepConfig::new(SweepKind::Theorem1)).unwrap();
    let again = run_sweep(&s, SweepConfig::new(SweepKind::Theorem1)).unwrap();
    let parallel = run_sweep(
        &s,
        SweepConfig {
            jobs: 2,
            ..SweepConfig::new(SweepKind::Theorem1)
        },
    )
    .unwrap();
    let a = without_wall_time(&report_csv(&serial));
    assert_eq!(a, without_wall_time(&report_csv(&again)));
    assert_eq!(a, without_wall_time(&report_csv(&parallel)));
    assert_eq!(serial.fit, parallel.fit);
    assert!(a.starts_with("eps,gap,iterations,converged"));
    assert_eq!(a.lines().count(), 4);
    assert!(serial.verdict().pass, "{:?}", serial.verdict());
}

#[test]
fn germ_sweeps_do_not_depend_on_the_schedule() {
    let s = tiny();
    let cfg = SweepConfig::new(SweepKind::GermResolvent);
    let serial = run_sweep(&s, cfg).unwrap();
    let parallel = run_sweep(&s, SweepConfig { jobs: 3, ..cfg }).unwrap();
    assert_eq!(serial.rows.len(), 4);
    assert_eq!(report_csv(&serial), report_csv(&parallel));
    assert!(report_csv(&serial).starts_with(BLOCH_CSV_HEADER));
    assert!(serial.scaled_gap_variation.unwrap() >= 1.0);
}

#[test]
fn null_case_reports_vanishing_gaps() {
    let s = parse_scenario(FLAT).unwrap();
    let r = run_sweep(&s, SweepConfig::new(SweepKind::Theorem1)).unwrap();
    assert!(r.null_case);
    assert!(r.fit.is_none());
    assert!(r.verdict().pass, "{:?}", r.verdict());
    for row in &r.rows {
        assert!(row.gap.unwrap() <= NULL_GAP_FACTOR * r.rel_tol);
    }
}

#[test]
fn dropping_the_largest_eps_needs_three_rows() {
    let s = tiny();
    let cfg = SweepConfig {
        drop_largest_eps: true,
        ..SweepConfig::new(SweepKind::Theorem1)
    };
    let err = run_sweep(&s, cfg).unwrap_err();
    assert!(matches!(err, Error::Acceptance(_)));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn reports_round_trip_and_render() {
    let s = tiny();
    let report = run_sweep(&s, SweepConfig::new(SweepKind::Theorem1)).unwrap();
    let json = report_json(&report).unwrap();
    assert_eq!(parse_report_json(&json).unwrap(), report);
    let svg = report_svg(&report);
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("class=\"fit\"").count(), 1);
    assert_eq!(svg.matches("class=\"marker\"").count(), report.converged_rows().count());
    assert_eq!(ReportFormat::from_extension(Path::new("a/b.svg")), Some(ReportFormat::Svg));
    assert_eq!(ReportFormat::from_extension(Path::new("b.txt")), None);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    emit_report(&report, &path, ReportFormat::Json).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), json);
    assert!(parse_report_json("{").is_err());
}

#[test]
fn bloch_rows_pass_on_the_tiny_scenario() {
    let s = tiny().modified(|f| f.bloch.slice_n1 = 128).unwrap();
    for check in [BlochCheck::Germ, BlochCheck::Gap, BlochCheck::Projection, BlochCheck::Decomp] {
        let rows = run_bloch(&s, check).unwrap();
        assert!(!rows.is_empty());
        assert!(rows.iter().all(|r| r.pass), "{check:?}: {rows:?}");
        let csv = bloch_csv(&rows);
        assert_eq!(csv.lines().count(), rows.len() + 1);
    }
}

fn homog(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_homog")).args(args).output().unwrap()
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("tiny.toml");
    std::fs::write(&good, TINY).unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, TINY.replacen("params = [2.0, 1.0]", "params = [1.0, 2.0]", 1)).unwrap();
    let good = good.to_str().unwrap();

    let out = homog(&["validate", good]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("fingerprint"));
    assert_eq!(homog(&["validate", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(homog(&["validate", "/nonexistent.toml"]).status.code(), Some(2));

    let out = homog(&["effective", good]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 17);

    let json = dir.path().join("sweep.json");
    let out = homog(&["sweep", "--kind", "theorem1", good, "--out", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("slope"));
    let svg = dir.path().join("sweep.svg");
    let out = homog(&["report", "--format", "svg", json.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("class=\"fit\""));
    let out = homog(&["report", "--format", "csv", json.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with(CSV_HEADER));

    // an unreachable tolerance leaves every row unconverged
    let out = homog(&["--tol", "1e-30", "sweep", "--kind", "theorem1", good]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));

    let out = homog(&["bloch", "decomp", good]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with(BLOCH_CSV_HEADER));
}

#[test]
fn cli_seed_flag_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("tiny.toml");
    std::fs::write(&good, TINY).unwrap();
    let good = good.to_str().unwrap();
    let run = |jobs: &str| {
        let out = homog(&["--seed", "11", "--jobs", jobs, "sweep", "--kind", "theorem1", good]);
        assert_eq!(out.status.code(), Some(0));
        without_wall_time(&String::from_utf8(out.stdout).unwrap())
    };
    assert_eq!(run("1"), run("2"));
}
