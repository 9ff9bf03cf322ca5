//! Config-driven batch commands: curve checks, spectra, κ sweeps, trial
//! scans and ditch cross-validation. Each command writes its report into
//! the configured output directory and returns a short human summary.

mod config;
mod output;

use std::path::PathBuf;

use serde::Serialize;

pub use config::{
    apply_override, CheckConfig, CurveConfig, RunConfig, SweepConfig, TrialConfig, ValidateConfig, SCHEMA_VERSION,
};
pub use output::{fmt_f64, to_json};

use crate::bound_state::{
    find_bound_states, gaussian_trial, reconstruct_eigenfunction, sweep_lambda, threshold, BoundStateReport,
};
use crate::ditch::{convergence_study, transverse_check, ConvergenceReport, TransverseRow};
use crate::error::{Error, Result};
use crate::geometry::{check_asymptotic_straightness, check_chord_arc_ratio, AssumptionReport, SampleSpec};
use output::{envelope, write_file, Csv, Field};

/// Outcome of a command: files written, a summary for the terminal, and
/// the process exit code.
#[derive(Debug)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    pub summary: String,
    pub exit_code: i32,
}

#[derive(Serialize)]
struct CheckBody {
    passed: bool,
    report: Option<AssumptionReport>,
    violation: Option<String>,
}

pub fn cmd_check(config: &RunConfig) -> Result<CommandOutput> {
    let curve = config.build_curve()?;
    let spec = SampleSpec::for_curve(&curve);
    let outcome = check_chord_arc_ratio(&curve, &spec, config.check.c_hat_floor)
        .and_then(|_| check_asymptotic_straightness(&curve, config.check.omega, &spec));
    let (body, summary, code) = match outcome {
        Ok(report) => {
            let summary = format!(
                "c_hat = {:.6}, d_hat = {:.3e}, mu_hat = {}, a2 with mu > 1/2: {}",
                report.c_hat,
                report.d_hat,
                if report.mu_hat.is_finite() {
                    format!("{:.3}", report.mu_hat)
                } else {
                    "inf".into()
                },
                if report.a2_satisfied_with_mu_above_half {
                    "yes"
                } else {
                    "no"
                }
            );
            (
                CheckBody {
                    passed: true,
                    report: Some(report),
                    violation: None,
                },
                summary,
                0,
            )
        }
        Err(e @ Error::AssumptionViolation { .. }) => {
            let msg = e.to_string();
            (
                CheckBody {
                    passed: false,
                    report: None,
                    violation: Some(msg.clone()),
                },
                format!("assumption violated: {msg}"),
                e.exit_code(),
            )
        }
        Err(e) => return Err(e),
    };
    let path = write_file(
        &config.output_dir,
        "check.json",
        &to_json(&envelope("check", config, body))?,
    )?;
    Ok(CommandOutput {
        files: vec![path],
        summary,
        exit_code: code,
    })
}

pub fn cmd_spectrum(config: &RunConfig) -> Result<CommandOutput> {
    let curve = config.build_curve()?;
    let report = find_bound_states(&curve, config.alpha, &config.numerics)?;
    let mut files = vec![write_file(
        &config.output_dir,
        "states.json",
        &to_json(&envelope("spectrum", config, &report))?,
    )?];
    if let Some(grid) = &config.field {
        for state in &report.states {
            let field = reconstruct_eigenfunction(&curve, state, grid)?;
            let mut csv = Csv::new("spectrum", config, &["x", "y", "psi"])?;
            for j in 0..grid.ny {
                for i in 0..grid.nx {
                    csv.row(&[
                        Field::F(grid.x(i)),
                        Field::F(grid.y(j)),
                        Field::F(field.values[j * grid.nx + i]),
                    ]);
                }
            }
            files.push(write_file(
                &config.output_dir,
                &format!("field_{}.csv", state.index),
                csv.as_str(),
            )?);
        }
    }
    Ok(CommandOutput {
        files,
        summary: spectrum_summary(&report),
        exit_code: if report.all_converged() { 0 } else { 3 },
    })
}

fn spectrum_summary(report: &BoundStateReport) -> String {
    let mut s = format!(
        "threshold {}; {} state(s)",
        fmt_f64(report.threshold),
        report.states.len()
    );
    for st in &report.states {
        s.push_str(&format!(
            "\n  branch {}: E = {} (kappa0 = {}, L = {:.3}, N = {}{})",
            st.index,
            fmt_f64(st.energy),
            fmt_f64(st.kappa0),
            st.half_length,
            st.nodes,
            if st.converged { "" } else { ", not converged" }
        ));
    }
    for w in &report.warnings {
        s.push_str(&format!("\n  warning: {w}"));
    }
    s
}

pub fn cmd_sweep(config: &RunConfig) -> Result<CommandOutput> {
    let curve = config.build_curve()?;
    let kappas = config.kappa_grid()?;
    let table = sweep_lambda(&curve, config.alpha, &kappas, &config.numerics)?;
    let m = table.values.first().map_or(0, Vec::len);
    let mut columns = vec!["kappa".to_string()];
    columns.extend((1..=m).map(|j| format!("lambda_{j}")));
    columns.push("straight_sup".into());
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut csv = Csv::new("sweep", config, &cols)?;
    for (k, vals) in table.kappas.iter().zip(&table.values) {
        let mut row = vec![Field::F(*k)];
        row.extend(vals.iter().map(|v| Field::F(*v)));
        row.push(Field::F(config.alpha / (2.0 * k)));
        csv.row(&row);
    }
    let path = write_file(&config.output_dir, "sweep.csv", csv.as_str())?;
    Ok(CommandOutput {
        files: vec![path],
        summary: format!(
            "{} kappa values, {m} branches, L = {}, N = {}",
            table.kappas.len(),
            table.half_length,
            table.nodes
        ),
        exit_code: 0,
    })
}

pub fn cmd_trial(config: &RunConfig) -> Result<CommandOutput> {
    let curve = config.build_curve()?;
    let kappa = config.trial.kappa.unwrap_or(config.alpha);
    let lambdas = config.lambda_grid()?;
    let rows = gaussian_trial(&curve, config.alpha, kappa, &lambdas)?;
    let mut csv = Csv::new(
        "trial",
        config,
        &[
            "lambda",
            "form_gap",
            "positive",
            "perturbation_term",
            "reference_term",
            "reference_term_fourier",
            "half_length",
            "nodes",
        ],
    )?;
    for r in &rows {
        csv.row(&[
            Field::F(r.lambda_width),
            Field::F(r.form_gap),
            Field::S(r.positive.to_string()),
            Field::F(r.perturbation_term),
            Field::F(r.reference_term),
            Field::F(r.reference_term_fourier),
            Field::F(r.half_length),
            Field::I(r.nodes),
        ]);
    }
    let path = write_file(&config.output_dir, "trial.csv", csv.as_str())?;
    let positive = rows.iter().filter(|r| r.positive).count();
    Ok(CommandOutput {
        files: vec![path],
        summary: format!(
            "kappa = {kappa}: positive form gap for {positive} of {} widths",
            rows.len()
        ),
        exit_code: 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "N/A")]
    NotApplicable,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::NotApplicable => "N/A",
        })
    }
}

#[derive(Serialize)]
struct ValidateBody<'a> {
    verdict: Verdict,
    budget: f64,
    reference_energy: Option<f64>,
    study: Option<&'a ConvergenceReport>,
    transverse: &'a [TransverseRow],
}

/// Ground state from the boundary-integral solver, then the ditch study
/// with a linear extrapolation in ε. PASS when the extrapolated energy lies
/// within `budget` (relative) of the boundary-integral energy; N/A when
/// there is no bound state to compare with.
pub fn cmd_validate(config: &RunConfig) -> Result<CommandOutput> {
    let curve = config.build_curve()?;
    let v = &config.validate;
    let profile = config.profile();
    let transverse = transverse_check(&profile, &v.transverse_epsilons)?;
    let report = find_bound_states(&curve, config.alpha, &config.numerics)?;
    let reference = report.states.first().map(|s| s.energy);
    let study = match reference {
        Some(e) => Some(convergence_study(
            &curve,
            &profile,
            &v.epsilons,
            v.bbox,
            &v.h_divisors,
            Some(e),
        )?),
        None => None,
    };
    let verdict = match study.as_ref().and_then(|s| s.relative_deviation) {
        Some(d) if d <= v.budget => Verdict::Pass,
        Some(_) => Verdict::Fail,
        None => Verdict::NotApplicable,
    };

    let mut files = Vec::new();
    let mut csv = Csv::new(
        "validate",
        config,
        &[
            "epsilon",
            "h",
            "unknowns",
            "energy",
            "residual",
            "potential_integral",
            "expected_integral",
        ],
    )?;
    if let Some(s) = &study {
        for r in &s.rows {
            csv.row(&[
                Field::F(r.epsilon),
                Field::F(r.h),
                Field::I(r.unknowns),
                Field::F(r.energy),
                Field::F(r.residual),
                Field::F(r.potential_integral),
                Field::F(r.expected_integral),
            ]);
        }
        if let Some(x) = s.extrapolated {
            csv.row(&[
                Field::S("extrapolated".into()),
                Field::S(String::new()),
                Field::S(String::new()),
                Field::F(x),
            ]);
        }
    }
    if let Some(e) = reference {
        csv.row(&[
            Field::S("boundary_integral".into()),
            Field::S(String::new()),
            Field::S(String::new()),
            Field::F(e),
        ]);
    }
    files.push(write_file(&config.output_dir, "ditch_convergence.csv", csv.as_str())?);
    let body = ValidateBody {
        verdict,
        budget: v.budget,
        reference_energy: reference,
        study: study.as_ref(),
        transverse: &transverse,
    };
    files.push(write_file(
        &config.output_dir,
        "validate.json",
        &to_json(&envelope("validate", config, body))?,
    )?);

    let mut summary = format!("verdict {verdict}");
    if let (Some(s), Some(e)) = (&study, reference) {
        if let (Some(x), Some(d)) = (s.extrapolated, s.relative_deviation) {
            summary.push_str(&format!(
                ": extrapolated {} vs boundary-integral {} (relative deviation {:.3e}, budget {:.3e})",
                fmt_f64(x),
                fmt_f64(e),
                d,
                v.budget
            ));
        }
    } else {
        summary.push_str(&format!(": no bound state below {}", fmt_f64(threshold(config.alpha))));
    }
    Ok(CommandOutput {
        files,
        summary,
        exit_code: 0,
    })
}
