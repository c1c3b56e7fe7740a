//! The JSON report. Every scalar comes from a library report type; the only
//! wall-clock content lives in the isolated metadata block, so two runs of
//! the same config produce byte-identical reports once metadata is ignored.

use serde::Serialize;

use crate::config::RunConfig;
use conecap::mesh::MeshDiagnostics;
use conecap::pfunctions::PReport;
use conecap::verify::{ConvergenceOrders, CriterionLine, VerifyReport};

#[derive(Debug, Serialize)]
pub struct Report {
    pub config_echo: RunConfig,
    pub mesh_stats: Vec<MeshDiagnostics>,
    pub verify: Option<VerifySection>,
    pub pfunctions: Option<Vec<PReport>>,
    pub radial: Option<RadialSection>,
    pub metadata: Metadata,
}

#[derive(Debug, Serialize)]
pub struct VerifySection {
    pub resolutions: Vec<(usize, usize)>,
    /// One report per resolution, coarse to fine.
    pub reports: Vec<VerifyReport>,
    /// Eigenvalues per resolution (eigen runs only).
    pub lambdas: Vec<Option<f64>>,
    /// Observed orders across the ladder (study subcommands only).
    pub orders: Option<ConvergenceOrders>,
    /// Pass/fail gate lines (verify subcommand only).
    pub checks: Option<Vec<CriterionLine>>,
}

#[derive(Debug, Serialize)]
pub struct RadialSection {
    pub runs: Vec<RadialRun>,
}

#[derive(Debug, Serialize)]
pub struct RadialRun {
    pub curvature: i64,
    pub kind: String,
    pub n: u32,
    pub m: usize,
    pub lambda: Option<f64>,
    /// Maximum deviation from the closed form, where one exists.
    pub closed_form_error: Option<f64>,
    pub outside_closed_form_range: bool,
}

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub generated_unix_ms: u128,
}

impl Metadata {
    pub fn now() -> Self {
        Metadata {
            tool: "conecap",
            version: env!("CARGO_PKG_VERSION"),
            generated_unix_ms: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0),
        }
    }
}
