use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use homog::effective::effective_profile;
use homog::harness::{
    bloch_csv, load_scenario, parse_report_json, render_report, run_bloch, run_sweep, write_text, BlochCheck,
    ProblemScenario, ReportFormat, SweepConfig, SweepKind,
};
use homog::linsolve::PROFILE_TOL;
use homog::{Error, Result};

#[derive(Parser)]
#[command(name = "homog", version, about = "Homogenization error estimates for operators periodic in x1")]
struct Cli {
    /// Override the scenario seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the relative CG tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads for sweeps (0 = all cores)
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Leave the largest eps out of the slope fit
    #[arg(long, global = true)]
    drop_largest_eps: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a scenario and print its hypothesis constants
    Validate { scenario: PathBuf },
    /// Print the effective coefficient profile as CSV
    Effective {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an eps-sweep of resolvent gaps
    Sweep {
        #[arg(long, value_enum)]
        kind: Kind,
        scenario: PathBuf,
        /// Write the report here (format from --format or the extension)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Fiber diagnostics as CSV rows
    Bloch {
        #[arg(value_enum)]
        check: Check,
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a JSON sweep report
    Report {
        #[arg(long, value_enum)]
        format: Format,
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Theorem1,
    Theorem18,
    Germ,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Germ,
    Gap,
    Projection,
    Decomp,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Json => ReportFormat::Json,
            Format::Svg => ReportFormat::Svg,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn scenario(cli: &Cli, path: &Path) -> Result<ProblemScenario> {
    let scn = load_scenario(path)?;
    if cli.seed.is_none() && cli.tol.is_none() {
        return Ok(scn);
    }
    scn.modified(|f| {
        if let Some(s) = cli.seed {
            f.seed = s;
        }
        if let Some(t) = cli.tol {
            f.solver.rel_tol = t;
        }
    })
}

fn output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `Ok(false)` signals a failed check (exit code 1).
fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Validate { scenario: path } => {
            let s = scenario(cli, path)?;
            let c = &s.constants;
            println!("scenario    {}", s.name());
            println!("fingerprint {}", s.fingerprint);
            println!("c0 {:.6} c1 {:.6} c2 {:.6} c3 {:.6} c4 {:.6} c5 {:.6}", c.c0, c.c1, c.c2, c.c3, c.c4, c.c5);
            println!("delta {:.6} t0 {:.6} d0 {:.6}", c.delta, c.t0, c.d0);
            if s.file.schrodinger.is_some() {
                let h = s.schrodinger()?;
                println!("lambda {:.6} c4~ {:.6} margin {:.6}", h.lambda, h.c4_t, h.margin);
            }
            Ok(true)
        }
        Command::Effective { scenario: path, out } => {
            let s = scenario(cli, path)?;
            let c = &s.coefficients;
            let nodes: Vec<f64> = (0..s.grid.n2).map(|j| s.grid.x2(j)).collect();
            let p = effective_profile(&c.g1, &c.g2, &c.q, &nodes, PROFILE_TOL)?;
            let mut text = String::from("x2,g1_eff,g2_eff,q_eff\n");
            for i in 0..p.len() {
                text.push_str(&format!(
                    "{},{:.15e},{:.15e},{:.15e}\n",
                    p.x2_nodes[i], p.g1_eff[i], p.g2_eff[i], p.q_eff[i]
                ));
            }
            output(out.as_deref(), &text)?;
            Ok(true)
        }
        Command::Sweep { kind, scenario: path, out, format } => {
            let s = scenario(cli, path)?;
            let kind = match kind {
                Kind::Theorem1 => SweepKind::Theorem1,
                Kind::Theorem18 => SweepKind::Theorem18,
                Kind::Germ => SweepKind::GermResolvent,
            };
            let cfg = SweepConfig {
                kind,
                jobs: cli.jobs,
                drop_largest_eps: cli.drop_largest_eps,
            };
            let report = run_sweep(&s, cfg)?;
            let fmt = format
                .map(ReportFormat::from)
                .or_else(|| out.as_deref().and_then(ReportFormat::from_extension))
                .unwrap_or(ReportFormat::Csv);
            output(out.as_deref(), &render_report(&report, fmt)?)?;
            let verdict = report.verdict();
            match (report.slope(), report.scaled_gap_variation) {
                (Some(slope), _) => eprintln!("slope {slope:.4}"),
                (_, Some(v)) => eprintln!("eps*gap variation {v:.4}"),
                _ => {}
            }
            for r in &verdict.reasons {
                eprintln!("FAIL: {r}");
            }
            Ok(verdict.pass)
        }
        Command::Bloch { check, scenario: path, out } => {
            let s = scenario(cli, path)?;
            let check = match check {
                Check::Germ => BlochCheck::Germ,
                Check::Gap => BlochCheck::Gap,
                Check::Projection => BlochCheck::Projection,
                Check::Decomp => BlochCheck::Decomp,
            };
            let rows = run_bloch(&s, check)?;
            output(out.as_deref(), &bloch_csv(&rows))?;
            Ok(rows.iter().all(|r| r.pass))
        }
        Command::Report { format, input, out } => {
            let text = std::fs::read_to_string(input).map_err(|source| Error::Io {
                path: input.display().to_string(),
                source,
            })?;
            let report = parse_report_json(&text)?;
            output(out.as_deref(), &render_report(&report, (*format).into())?)?;
            Ok(true)
        }
    }
}
