//! Scenario files, sweeps, fiber-check tables and reports.

mod bloch_rows;
mod report;
mod scenario;
mod sweep;

pub use bloch_rows::{
    bloch_csv, run_bloch, BlochCheck, BlochRow, BLOCH_CSV_HEADER, GERM_ORDER, GERM_ORDER_TOL,
    PROJECTION_SPREAD_LIMIT,
};
pub use report::{
    emit_report, parse_report_json, render_report, report_csv, report_json, report_svg, ReportFormat, CSV_HEADER,
};
pub use report::write_text;
pub use scenario::{
    load_scenario, parse_scenario, BlochSpec, FieldSpec, FieldsSpec, GridSpec, ProblemScenario, ScenarioFile,
    SchrodingerSpec, VALIDATION_DENSITY,
};
pub use sweep::{
    run_sweep, ConvergenceReport, SweepConfig, SweepKind, SweepRow, Verdict, GERM_VARIATION_LIMIT, MIN_FIT_ROWS, NULL_GAP_FACTOR,
    SLOPE_THRESHOLD,
};
