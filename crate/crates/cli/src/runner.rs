//! Pipeline execution and file output for the four subcommands.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::{Command, RunConfig};
use crate::report::{Metadata, RadialRun, RadialSection, Report, VerifySection};
use conecap::error::Error;
use conecap::radial::{compare_radial_closed_form, solve_radial};
use conecap::verify::{
    convergence_study, evaluate_study, run_case, CaseOutcome, ConvergenceStudy, CriterionLine,
};

/// Exit codes: 0 success, 1 gate failure, 2 config error, 3 solver failure.
pub const EXIT_OK: u8 = 0;
pub const EXIT_CRITERION: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;

pub struct RunError {
    pub code: u8,
    pub message: String,
}

impl RunError {
    fn config(message: impl Into<String>) -> Self {
        RunError {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    fn solver(err: Error) -> Self {
        RunError {
            code: EXIT_SOLVER,
            message: err.to_string(),
        }
    }
}

fn thread_budget() -> Result<usize, RunError> {
    match std::env::var("CONECAP_THREADS") {
        Ok(v) => v.parse::<usize>().ok().filter(|&t| t >= 1).ok_or_else(|| {
            RunError::config(format!(
                "CONECAP_THREADS must be a positive integer, got '{v}'"
            ))
        }),
        Err(_) => Ok(1),
    }
}

/// Load, validate, execute, and write outputs. Returns the exit code.
pub fn execute(
    cmd: Command,
    config_path: &Path,
    output_override: Option<&Path>,
) -> Result<u8, RunError> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| RunError::config(format!("cannot read {}: {e}", config_path.display())))?;
    let config: RunConfig = serde_json::from_str(&text)
        .map_err(|e| RunError::config(format!("cannot parse {}: {e}", config_path.display())))?;
    config.validate(cmd).map_err(RunError::config)?;
    let threads = thread_budget()?;

    let out_dir: PathBuf = output_override
        .map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir)
        .map_err(|e| RunError::config(format!("cannot create {}: {e}", out_dir.display())))?;

    let case = config.to_case().map_err(RunError::solver)?;

    let (outcomes, orders, checks): (Vec<CaseOutcome<f64>>, _, Option<Vec<CriterionLine>>) =
        match cmd {
            Command::Solve | Command::Eigen => {
                let mut outcomes = Vec::new();
                for &(nr, nt) in &config.resolutions {
                    outcomes.push(run_case(&case, nr, nt).map_err(RunError::solver)?);
                }
                (outcomes, None, None)
            }
            Command::Sweep | Command::Verify => {
                let study: ConvergenceStudy<f64> =
                    convergence_study(&case, &config.resolutions, threads)
                        .map_err(RunError::solver)?;
                let checks = (cmd == Command::Verify).then(|| evaluate_study(&case, &study));
                (study.outcomes, Some(study.orders), checks)
            }
        };

    // per-resolution artifacts: mesh export and trace CSV
    for o in &outcomes {
        let (nr, nt) = o.resolution;
        let mesh_path = out_dir.join(format!("mesh_{nr}x{nt}.txt"));
        let mut f = fs::File::create(&mesh_path)
            .map_err(|e| RunError::config(format!("cannot write {}: {e}", mesh_path.display())))?;
        o.mesh
            .write_export(&mut f)
            .map_err(|e| RunError::config(format!("cannot write {}: {e}", mesh_path.display())))?;

        let csv_path = out_dir.join(format!("trace_{nr}x{nt}.csv"));
        let mut f = fs::File::create(&csv_path)
            .map_err(|e| RunError::config(format!("cannot write {}: {e}", csv_path.display())))?;
        writeln!(f, "theta,u_nu").map_err(|e| RunError::config(e.to_string()))?;
        for s in &o.trace.samples {
            writeln!(f, "{},{}", s.theta_mid, s.value)
                .map_err(|e| RunError::config(e.to_string()))?;
        }
    }

    let radial_section = if config.radial.enabled {
        Some(run_radial(&config).map_err(RunError::solver)?)
    } else {
        None
    };

    let pfunctions: Vec<_> = outcomes
        .iter()
        .filter_map(|o| o.pfunctions.clone())
        .collect();
    let report = Report {
        mesh_stats: outcomes.iter().map(|o| o.diagnostics.clone()).collect(),
        verify: Some(VerifySection {
            resolutions: outcomes.iter().map(|o| o.resolution).collect(),
            reports: outcomes.iter().map(|o| o.report.clone()).collect(),
            lambdas: outcomes.iter().map(|o| o.lambda).collect(),
            orders,
            checks: checks.clone(),
        }),
        pfunctions: if pfunctions.is_empty() {
            None
        } else {
            Some(pfunctions)
        },
        radial: radial_section,
        config_echo: config,
        metadata: Metadata::now(),
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| RunError::config(format!("report serialization failed: {e}")))?;
    let report_path = out_dir.join("report.json");
    fs::write(&report_path, json.as_bytes())
        .map_err(|e| RunError::config(format!("cannot write {}: {e}", report_path.display())))?;

    // gate summary to stdout, one line per check
    let mut failed = false;
    if let Some(lines) = &checks {
        for line in lines {
            let verdict = if line.pass { "PASS" } else { "FAIL" };
            println!("[{verdict}] {}: {}", line.name, line.detail);
            failed |= !line.pass;
        }
    }
    println!(
        "wrote {} ({} resolutions)",
        report_path.display(),
        outcomes.len()
    );
    Ok(if failed { EXIT_CRITERION } else { EXIT_OK })
}

fn run_radial(config: &RunConfig) -> conecap::Result<RadialSection> {
    let sf = conecap::SpaceForm::from_curvature(config.curvature)?;
    let kind: conecap::ProblemKind = config.kind.into();
    let mut runs = Vec::new();
    for &n in &config.radial.n_list {
        for &m in &config.radial.m_list {
            let profile = solve_radial(sf, n, kind, config.graph.radius, m)?;
            let closed_form_error = match compare_radial_closed_form(&profile, sf, kind, n) {
                Ok(e) => Some(e),
                Err(Error::UnsupportedClosedForm { .. }) | Err(Error::InvalidInput(_)) => None,
                Err(e) => return Err(e),
            };
            runs.push(RadialRun {
                curvature: config.curvature,
                kind: kind.name().to_string(),
                n,
                m,
                lambda: profile.lambda,
                closed_form_error,
                outside_closed_form_range: profile.outside_closed_form_range,
            });
        }
    }
    Ok(RadialSection { runs })
}
