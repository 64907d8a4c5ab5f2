//! `ε`-sweeps over a worker pool with per-row seeds.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bloch::germ_resolvent_gap;
use crate::error::{Error, Result};
use crate::fit::{loglog_fit, LineFit};
use crate::linsolve::{GapRun, ResolventPair, SolveOptions};
use crate::schrodinger::SchrodingerPair;

use super::scenario::ProblemScenario;

/// Minimum fitted slope for a rate sweep to pass.
pub const SLOPE_THRESHOLD: f64 = 0.9;
/// Maximum allowed ratio `max/min` of `ε·gap` over a germ-resolvent grid.
pub const GERM_VARIATION_LIMIT: f64 = 2.0;
/// Null-case gaps must stay below this multiple of the solver tolerance.
pub const NULL_GAP_FACTOR: f64 = 10.0;
/// Rows needed for a slope fit.
pub const MIN_FIT_ROWS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// `(A_ε + Q^ε)⁻¹ − (A⁰ + Q⁰)⁻¹`
    Theorem1,
    /// `(H_ε + λ)⁻¹ − ω^ε (A⁰ + Q_λ⁰)⁻¹ ω^ε`
    Theorem18,
    /// `(A(k,ε) + ε²Q)⁻¹ − (S(k,ε) + ε²Q⁰)⁻¹ P` over a `(k, ε)` grid
    GermResolvent,
}

impl SweepKind {
    pub fn label(self) -> &'static str {
        match self {
            SweepKind::Theorem1 => "theorem1",
            SweepKind::Theorem18 => "theorem18",
            SweepKind::GermResolvent => "germ_resolvent",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    /// quasimomentum, for germ-resolvent rows
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// norm estimate; absent when an inner solve failed
    pub gap: Option<f64>,
    /// power iterations
    pub iterations: usize,
    pub converged: bool,
    pub wall_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub scenario: String,
    pub fingerprint: String,
    pub kind: SweepKind,
    pub seed: u64,
    pub rel_tol: f64,
    pub rows: Vec<SweepRow>,
    /// `x1`-independent coefficients: gaps must vanish to solver tolerance
    #[serde(default)]
    pub null_case: bool,
    /// `ε` values left out of the fit on request
    pub dropped_eps: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<LineFit>,
    /// Germ-resolvent sweeps: `max/min` over `ε` of `sup_k ε·gap(k, ε)`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaled_gap_variation: Option<f64>,
    /// Germ-resolvent sweeps: `max/min` of `ε·gap` over all `(k, ε)` cells
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cellwise_variation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_scaled_gap: Option<f64>,
}

/// Outcome of a report against its pass criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub reasons: Vec<String>,
}

impl ConvergenceReport {
    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }

    /// `(ε, sup_k ε·gap)` over the converged rows, in sweep order of `ε`.
    pub fn scaled_gap_sups(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for r in self.converged_rows() {
            let v = r.eps * r.gap.unwrap();
            match out.iter_mut().find(|p| p.0 == r.eps) {
                Some(p) => p.1 = p.1.max(v),
                None => out.push((r.eps, v)),
            }
        }
        out.sort_by(|a, b| b.0.total_cmp(&a.0));
        out
    }

    pub fn converged_rows(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.converged && r.gap.is_some())
    }

    /// Fits `log gap` against `log ε` over the converged rows, leaving out
    /// `dropped_eps`.
    pub fn refit(&mut self) -> Result<()> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .converged_rows()
            .filter(|r| !self.dropped_eps.contains(&r.eps))
            .map(|r| (r.eps, r.gap.unwrap()))
            .unzip();
        if xs.len() < MIN_FIT_ROWS {
            return Err(Error::Acceptance(format!(
                "only {} converged rows available for the slope fit (need {MIN_FIT_ROWS})",
                xs.len()
            )));
        }
        self.fit = Some(loglog_fit(&xs, &ys)?);
        Ok(())
    }

    /// Rate sweeps pass with strictly decreasing gaps and slope ≥ 0.9, null
    /// cases when every gap is below `10·rel_tol`, and germ sweeps when
    /// `sup_k ε·gap` varies by less than a factor of 2 across `ε`.
    pub fn verdict(&self) -> Verdict {
        let mut reasons = Vec::new();
        for r in self.rows.iter().filter(|r| !r.converged) {
            reasons.push(format!("row eps = {} did not converge", r.eps));
        }
        match self.kind {
            SweepKind::GermResolvent => match self.scaled_gap_variation {
                Some(v) if v < GERM_VARIATION_LIMIT => {}
                Some(v) => reasons.push(format!("sup_k eps*gap varies by {v:.3}x (limit {GERM_VARIATION_LIMIT})")),
                None => reasons.push("no scaled gaps".into()),
            },
            _ if self.null_case => {
                let bound = NULL_GAP_FACTOR * self.rel_tol;
                for r in self.converged_rows().filter(|r| r.gap.unwrap() > bound) {
                    reasons.push(format!("gap {:e} at eps = {} exceeds {bound:e}", r.gap.unwrap(), r.eps));
                }
            }
            _ => {
                let gaps: Vec<f64> = self.converged_rows().map(|r| r.gap.unwrap()).collect();
                if gaps.windows(2).any(|w| w[1] >= w[0]) {
                    reasons.push("gaps are not strictly decreasing".into());
                }
                match self.slope() {
                    Some(s) if s >= SLOPE_THRESHOLD => {}
                    Some(s) => reasons.push(format!("slope {s:.4} below {SLOPE_THRESHOLD}")),
                    None => reasons.push("no slope fit".into()),
                }
            }
        }
        Verdict {
            pass: reasons.is_empty(),
            reasons,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepConfig {
    pub kind: SweepKind,
    /// worker threads; 0 uses the available parallelism
    pub jobs: usize,
    pub drop_largest_eps: bool,
}

impl SweepConfig {
    pub fn new(kind: SweepKind) -> Self {
        SweepConfig {
            kind,
            jobs: 1,
            drop_largest_eps: false,
        }
    }
}

/// One task of a sweep: an `ε` value and, for germ sweeps, a quasimomentum.
#[derive(Clone, Copy, Debug)]
struct Task {
    index: usize,
    eps: f64,
    k: Option<f64>,
}

/// Runs every row of the sweep and fits the slope (or, for germ sweeps, the
/// spread of `ε·gap`). Rows are seeded with `seed ⊕ row index`, so the report
/// does not depend on the number of workers.
pub fn run_sweep(scn: &ProblemScenario, cfg: SweepConfig) -> Result<ConvergenceReport> {
    let base = scn.solver().clone();
    let tasks: Vec<Task> = match cfg.kind {
        SweepKind::GermResolvent => {
            let b = &scn.file.bloch;
            let mut t = Vec::new();
            for &k in &b.k {
                for &eps in &b.eps {
                    t.push(Task { index: t.len(), eps, k: Some(k) });
                }
            }
            t
        }
        _ => scn
            .eps_list()
            .iter()
            .enumerate()
            .map(|(index, &eps)| Task { index, eps, k: None })
            .collect(),
    };
    let rows = match cfg.kind {
        SweepKind::Theorem1 => {
            let pair = ResolventPair::new(&scn.coefficients, &scn.grid, base.preconditioner)?;
            run_tasks(&tasks, cfg.jobs, scn.seed(), &base, |t, o| pair.gap(t.eps, o).map(gap_row))
        }
        SweepKind::Theorem18 => {
            let pair = SchrodingerPair::new(scn.schrodinger()?, base.preconditioner)?;
            run_tasks(&tasks, cfg.jobs, scn.seed(), &base, |t, o| pair.gap(t.eps, o).map(gap_row))
        }
        SweepKind::GermResolvent => {
            let b = &scn.file.bloch;
            let c = &scn.coefficients;
            run_tasks(&tasks, cfg.jobs, scn.seed(), &base, |t, o| {
                germ_resolvent_gap(c, t.eps, t.k.unwrap(), b.n1, b.n2, o).map(|e| (e.value, e.iterations, e.converged))
            })
        }
    };
    let mut report = ConvergenceReport {
        scenario: scn.name().to_string(),
        fingerprint: scn.fingerprint.clone(),
        kind: cfg.kind,
        seed: scn.seed(),
        rel_tol: base.rel_tol,
        rows,
        null_case: cfg.kind == SweepKind::Theorem1 && scn.coefficients.is_x1_independent(),
        dropped_eps: Vec::new(),
        fit: None,
        scaled_gap_variation: None,
        cellwise_variation: None,
        max_scaled_gap: None,
    };
    match cfg.kind {
        _ if report.null_case => {}
        SweepKind::GermResolvent => {
            let sups = report.scaled_gap_sups();
            if !sups.is_empty() {
                let hi = sups.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
                let lo = sups.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
                report.max_scaled_gap = Some(hi);
                report.scaled_gap_variation = Some(hi / lo);
                let cells: Vec<f64> = report.converged_rows().map(|r| r.eps * r.gap.unwrap()).collect();
                let c_hi = cells.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let c_lo = cells.iter().cloned().fold(f64::INFINITY, f64::min);
                report.cellwise_variation = Some(c_hi / c_lo);
            }
        }
        _ => {
            if cfg.drop_largest_eps {
                report.dropped_eps.push(scn.eps_list()[0]);
            }
            report.refit()?;
        }
    }
    Ok(report)
}

fn gap_row(run: GapRun) -> (f64, usize, bool) {
    let e = run.estimate;
    (e.value, e.iterations, e.converged)
}

fn run_tasks<F>(tasks: &[Task], jobs: usize, seed: u64, base: &SolveOptions, work: F) -> Vec<SweepRow>
where
    F: Fn(&Task, &SolveOptions) -> Result<(f64, usize, bool)> + Sync,
{
    let jobs = match jobs {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        j => j,
    }
    .min(tasks.len())
    .max(1);
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|s| {
        for _ in 0..jobs {
            let tx = tx.clone();
            let (next, work) = (&next, &work);
            s.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(t) = tasks.get(i) else { break };
                let opts = base.clone().with_seed(seed ^ t.index as u64);
                let start = Instant::now();
                let out = work(t, &opts);
                let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                let row = match out {
                    Ok((gap, iterations, converged)) => SweepRow {
                        eps: t.eps,
                        k: t.k,
                        gap: Some(gap),
                        iterations,
                        converged,
                        wall_ms,
                        error: None,
                    },
                    Err(e) => SweepRow {
                        eps: t.eps,
                        k: t.k,
                        gap: None,
                        iterations: 0,
                        converged: false,
                        wall_ms,
                        error: Some(e.to_string()),
                    },
                };
                if tx.send((t.index, row)).is_err() {
                    break;
                }
            });
        }
    });
    drop(tx);
    let mut rows: Vec<(usize, SweepRow)> = rx.into_iter().collect();
    rows.sort_by_key(|(i, _)| *i);
    rows.into_iter().map(|(_, r)| r).collect()
}
