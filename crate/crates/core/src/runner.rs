//! Scenario execution: trajectory stepping, CSV emission and oracle verification.

use std::collections::HashMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::oracle::{compare_to_analytic, default_grid, riccati_integrate, splitstep_evolve, GridWavefunction};
use crate::scenario::{Scenario, Series};
use crate::state::{covariance, evolve_state_with, gamma_matrix, wigner_matrix, GaussianState, Trajectory};
use crate::symplectic::{symplecticity_defect, Stepper};
use crate::thermo::{joint_entropy, joint_entropy_closed_form, thermo_report};
use crate::linalg;

/// Overrides applied on top of a scenario for one run.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub steps: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

/// Invariant maxima observed during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub max_symplecticity_defect: f64,
    pub max_entropy_drift: f64,
    pub max_purity_drift: f64,
    pub final_state: GaussianState,
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn matrix_columns(prefix: &str, rows: usize) -> Vec<String> {
    (0..rows)
        .flat_map(|i| (0..rows).map(move |j| format!("{prefix}_{}{}", i + 1, j + 1)))
        .collect()
}

/// Column names of a series for a system with `n` degrees of freedom.
pub fn series_header(series: Series, n: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    match series {
        Series::Mean => {
            cols.extend((1..=n).map(|i| format!("q{i}")));
            cols.extend((1..=n).map(|i| format!("p{i}")));
        }
        Series::Iwasawa => {
            cols.extend(matrix_columns("s2", n));
            cols.extend(matrix_columns("g", n));
            cols.push("alpha".into());
        }
        Series::Thermo => {
            return crate::thermo::ThermoReport::COLUMNS
                .iter()
                .map(|s| s.to_string())
                .collect()
        }
        Series::Wigner => cols.extend(matrix_columns("W", 2 * n)),
    }
    cols
}

fn series_row(series: Series, state: &GaussianState, spec: &HamiltonianSpec) -> Result<Vec<String>> {
    let mut row = vec![fmt(state.t)];
    match series {
        Series::Mean => {
            row.extend(state.mean_q.iter().chain(state.mean_p.iter()).map(|&x| fmt(x)));
        }
        Series::Iwasawa => {
            row.extend(state.s2.transpose().iter().map(|&x| fmt(x)));
            row.extend(state.g.transpose().iter().map(|&x| fmt(x)));
            row.push(fmt(state.alpha));
        }
        Series::Thermo => {
            return Ok(thermo_report(state, spec)?
                .values()
                .iter()
                .map(|&x| fmt(x))
                .collect())
        }
        Series::Wigner => {
            row.extend(wigner_matrix(state)?.matrix.transpose().iter().map(|&x| fmt(x)));
        }
    }
    Ok(row)
}

/// Execute a scenario, writing every requested series (one row at t0 and one per step).
pub fn run(scenario: &Scenario, opts: &RunOptions) -> Result<RunSummary> {
    let steps = opts.steps.unwrap_or(scenario.steps);
    if steps == 0 {
        return Err(Error::Validation("steps: must be >= 1".into()));
    }
    let spec = &scenario.hamiltonian;
    let n = spec.n();
    let out_dir = opts.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut writers: Vec<(Series, csv::Writer<File>)> = Vec::new();
    let mut seen: HashMap<PathBuf, ()> = HashMap::new();
    for out in &scenario.outputs {
        let path: PathBuf = if Path::new(&out.path).is_absolute() {
            PathBuf::from(&out.path)
        } else {
            out_dir.join(&out.path)
        };
        if seen.insert(path.clone(), ()).is_some() {
            return Err(Error::Validation(format!("outputs: duplicate path {}", path.display())));
        }
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(series_header(out.series, n))?;
        writers.push((out.series, w));
    }

    let state0 = scenario.initial_state()?;
    let entropy_ref = joint_entropy_closed_form(n, &scenario.constants);
    let purity_ref = (0.5 * scenario.constants.hbar).powi(2 * n as i32);
    let mut summary = RunSummary {
        steps,
        max_symplecticity_defect: 0.0,
        max_entropy_drift: 0.0,
        max_purity_drift: 0.0,
        final_state: state0.clone(),
    };
    let mut record = |state: &GaussianState, summary: &mut RunSummary| -> Result<()> {
        for (series, w) in writers.iter_mut() {
            w.write_record(series_row(*series, state, spec)?)?;
        }
        summary.max_entropy_drift = summary
            .max_entropy_drift
            .max((joint_entropy(state)? - entropy_ref).abs());
        let det = covariance(state)?.determinant();
        summary.max_purity_drift = summary.max_purity_drift.max((det / purity_ref - 1.0).abs());
        Ok(())
    };
    record(&state0, &mut summary)?;
    for point in Trajectory::new(spec, &state0, state0.t + scenario.t_end, steps, scenario.stepper)? {
        let point = point?;
        summary.max_symplecticity_defect = summary
            .max_symplecticity_defect
            .max(symplecticity_defect(&point.flow));
        record(&point.state, &mut summary)?;
        summary.final_state = point.state;
    }
    for (_, mut w) in writers {
        w.flush()?;
    }
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub metric: f64,
    pub threshold: f64,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    /// The failed check with the largest metric-to-threshold ratio.
    pub fn worst(&self) -> Option<&CheckResult> {
        self.checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .max_by(|a, b| {
                (a.metric / a.threshold)
                    .partial_cmp(&(b.metric / b.threshold))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    }
}

pub const RICCATI_THRESHOLD: f64 = 1e-7;
pub const PDE_THRESHOLD: f64 = 1e-4;

/// Time steps used by the PDE check: at least 2000 per unit time.
pub fn pde_steps(t_end: f64) -> usize {
    ((2000.0 * t_end).ceil() as usize).max(2000)
}

fn status(metric: f64, threshold: f64) -> CheckStatus {
    if metric <= threshold {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

/// Riccati-vs-Iwasawa comparison, then the PDE comparison if the scenario is eligible.
pub fn verify(scenario: &Scenario) -> Result<VerifyReport> {
    let spec = &scenario.hamiltonian;
    let state0 = scenario.initial_state()?;
    let t1 = state0.t + scenario.t_end;
    let steps = scenario.steps.max(pde_steps(scenario.t_end) / 2);
    let exact = evolve_state_with(spec, &state0, t1, steps, Stepper::Magnus4)?;
    let mut checks = Vec::new();

    let riccati = riccati_integrate(spec, &gamma_matrix(&state0)?, state0.t, t1, steps)
        .and_then(|g| Ok(g.max_abs_diff(&gamma_matrix(&exact)?)));
    checks.push(match riccati {
        Ok(d) => CheckResult {
            name: "riccati_vs_iwasawa",
            metric: d,
            threshold: RICCATI_THRESHOLD,
            status: status(d, RICCATI_THRESHOLD),
        },
        Err(Error::RiccatiBlowUp { step, t }) => CheckResult {
            name: "riccati_vs_iwasawa",
            metric: f64::INFINITY,
            threshold: RICCATI_THRESHOLD,
            status: if linalg::is_positive_definite(&spec.c_at(t)?) {
                log::error!("Riccati integration left the half-space at step {step}");
                CheckStatus::Fail
            } else {
                CheckStatus::Skipped(format!("Riccati blow-up with degenerate c at t = {t}"))
            },
        },
        Err(e) => return Err(e),
    });

    let skip = if spec.n() != 1 {
        Some("n≠1")
    } else if !spec.b_is_zero() {
        Some("b≠0")
    } else if spec.warnings().iter().any(|w| w.starts_with("c(t)")) {
        Some("c not positive definite")
    } else {
        None
    };
    let pde = match skip {
        Some(reason) => CheckResult {
            name: "pde_vs_analytic",
            metric: f64::NAN,
            threshold: PDE_THRESHOLD,
            status: CheckStatus::Skipped(reason.to_string()),
        },
        None => {
            let grid = default_grid(spec, &state0, t1)?;
            let psi0 = GridWavefunction::from_state(&state0, grid)?;
            let steps = pde_steps(scenario.t_end);
            let psi1 = splitstep_evolve(spec, &psi0, t1, steps)?;
            let exact = evolve_state_with(spec, &state0, t1, steps, Stepper::Magnus4)?;
            let d = compare_to_analytic(&psi1, &exact)?;
            CheckResult {
                name: "pde_vs_analytic",
                metric: d,
                threshold: PDE_THRESHOLD,
                status: status(d, PDE_THRESHOLD),
            }
        }
    };
    checks.push(pde);
    Ok(VerifyReport { checks })
}
