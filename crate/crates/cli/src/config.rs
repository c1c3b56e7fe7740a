//! Run configuration: JSON with exactly these field names. Unknown keys are
//! rejected (typos in experiment definitions should fail loudly), and value
//! validation reports every violation in one aggregated error.

use serde::{Deserialize, Serialize};

use conecap::assembly::ProblemKind;
use conecap::mesh::{ConeSpec, Side};
use conecap::spaceform::SpaceForm;
use conecap::verify::{CaseConfig, GraphSpec};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Curvature selector: -1, 0, or +1.
    pub curvature: i64,
    pub kind: KindName,
    /// Dimension of the equations; the surface solver requires 2.
    pub n: u32,
    pub cone: ConeConfig,
    pub graph: GraphConfig,
    /// Mesh resolutions (nr, ntheta) to run.
    pub resolutions: Vec<(usize, usize)>,
    #[serde(default)]
    pub radial: RadialConfig,
    /// Where reports, traces, and mesh exports are written; the --output
    /// flag overrides it.
    #[serde(default)]
    pub output_dir: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KindName {
    #[serde(rename = "MOLZON")]
    Molzon,
    #[serde(rename = "SERRIN")]
    Serrin,
    #[serde(rename = "EIGEN")]
    Eigen,
}

impl From<KindName> for ProblemKind {
    fn from(k: KindName) -> Self {
        match k {
            KindName::Molzon => ProblemKind::Molzon,
            KindName::Serrin => ProblemKind::Serrin,
            KindName::Eigen => ProblemKind::Eigen,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeConfig {
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub side: SideName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SideName {
    #[serde(rename = "INTERIOR")]
    Interior,
    #[serde(rename = "EXTERIOR")]
    Exterior,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    #[serde(rename = "type")]
    pub graph_type: GraphTypeName,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphTypeName {
    #[serde(rename = "CONSTANT")]
    Constant,
    #[serde(rename = "OFFCENTER")]
    Offcenter,
    #[serde(rename = "PERTURBED")]
    Perturbed,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialConfig {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default)]
    pub n_list: Vec<u32>,
    #[serde(default)]
    pub m_list: Vec<usize>,
}

/// Which pipeline the subcommand wants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Eigen,
    Verify,
    Sweep,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Eigen => "eigen",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
        }
    }

    fn needs_study(&self) -> bool {
        matches!(self, Command::Verify | Command::Sweep)
    }
}

impl RunConfig {
    /// Validate every field for the given subcommand, collecting all
    /// violations rather than stopping at the first.
    pub fn validate(&self, cmd: Command) -> Result<(), String> {
        let mut problems = Vec::new();
        if SpaceForm::from_curvature(self.curvature).is_err() {
            problems.push(format!(
                "curvature must be -1, 0, or +1 (got {})",
                self.curvature
            ));
        }
        if self.n != 2 {
            problems.push(format!(
                "n must be 2 for the surface pipeline (got {}); higher dimensions go in radial.n_list",
                self.n
            ));
        }
        let width = self.cone.theta_hi - self.cone.theta_lo;
        if !(width > 0.0 && width < 2.0 * std::f64::consts::PI) {
            problems.push(format!(
                "cone opening theta_hi - theta_lo must lie in (0, 2 pi), got {width}"
            ));
        }
        if !(self.graph.radius > 0.0) {
            problems.push(format!(
                "graph.R must be positive, got {}",
                self.graph.radius
            ));
        }
        if self.curvature == 1 && self.graph.radius >= std::f64::consts::PI {
            problems.push(format!(
                "graph.R = {} reaches the antipode on the sphere",
                self.graph.radius
            ));
        }
        match self.graph.graph_type {
            GraphTypeName::Constant => {}
            GraphTypeName::Offcenter => {
                match self.graph.d {
                    Some(d) if d >= 0.0 => {}
                    Some(d) => problems.push(format!("graph.d must be nonnegative, got {d}")),
                    None => problems.push("graph.d is required for OFFCENTER graphs".into()),
                }
                if self.graph.theta0.is_none() {
                    problems.push("graph.theta0 is required for OFFCENTER graphs".into());
                }
            }
            GraphTypeName::Perturbed => match self.graph.amplitude {
                Some(a) if a.abs() < 1.0 => {}
                Some(a) => problems.push(format!(
                    "graph.amplitude must keep the graph positive, got {a}"
                )),
                None => problems.push("graph.amplitude is required for PERTURBED graphs".into()),
            },
        }
        if self.resolutions.is_empty() {
            problems.push("resolutions must not be empty".into());
        }
        for &(nr, nt) in &self.resolutions {
            if nr < 1 || nt < 1 {
                problems.push(format!("resolution ({nr}, {nt}) must be at least (1, 1)"));
            }
        }
        if cmd.needs_study() {
            if let Err(e) = conecap::verify::validate_resolutions(&self.resolutions) {
                problems.push(format!("{} needs a refinement ladder: {e}", cmd.name()));
            }
        }
        match (cmd, self.kind) {
            (Command::Solve, KindName::Eigen) => problems
                .push("solve expects kind MOLZON or SERRIN (use the eigen subcommand)".into()),
            (Command::Eigen, k) if k != KindName::Eigen => {
                problems.push("eigen expects kind EIGEN".into())
            }
            _ => {}
        }
        if self.radial.enabled {
            if self.radial.n_list.is_empty() || self.radial.m_list.is_empty() {
                problems.push("radial.enabled requires nonempty n_list and m_list".into());
            }
            for &n in &self.radial.n_list {
                if n < 2 {
                    problems.push(format!("radial.n_list entries must be >= 2, got {n}"));
                }
            }
            for &m in &self.radial.m_list {
                if m < 8 {
                    problems.push(format!("radial.m_list entries must be >= 8, got {m}"));
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(format!(
                "invalid configuration ({} problems):\n  - {}",
                problems.len(),
                problems.join("\n  - ")
            ))
        }
    }

    /// Translate into the library's case description. Call after `validate`.
    pub fn to_case(&self) -> conecap::Result<CaseConfig<f64>> {
        let spaceform = SpaceForm::from_curvature(self.curvature)?;
        let side = match self.cone.side {
            SideName::Interior => Side::Interior,
            SideName::Exterior => Side::Exterior,
        };
        let cone = ConeSpec::new(self.cone.theta_lo, self.cone.theta_hi, side)?;
        let graph = match self.graph.graph_type {
            GraphTypeName::Constant => GraphSpec::Constant {
                radius: self.graph.radius,
            },
            GraphTypeName::Offcenter => GraphSpec::Offcenter {
                radius: self.graph.radius,
                dist: self.graph.d.unwrap_or(0.0),
                theta0: self.graph.theta0.unwrap_or(self.cone.theta_lo),
            },
            GraphTypeName::Perturbed => GraphSpec::Perturbed {
                radius: self.graph.radius,
                amplitude: self.graph.amplitude.unwrap_or(0.0),
                mode: self.graph.mode.unwrap_or(1),
            },
        };
        Ok(CaseConfig {
            spaceform,
            kind: self.kind.into(),
            dimension_n: self.n,
            cone,
            graph,
        })
    }
}
