use std::path::Path;

use serde_json::{json, Map, Value};
use thiserror::Error;

use hullkit::curvature::CurvatureError;
use hullkit::hull::{ExtractError, GridError, HullError};
use hullkit::io::IoError;
use hullkit::projection::ProjectionError;
use hullkit::secants::SecantError;
use hullkit::suites::SuiteError;
use hullkit::surgery::SurgeryError;
use hullkit::{Link64, Tolerance64};

use crate::args::Format;

pub const SCHEMA: &str = "hullkit-report";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Degenerate(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Degenerate(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Invalid(_) => "validation",
            CliError::Degenerate(_) => "degenerate_query",
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<HullError> for CliError {
    fn from(e: HullError) -> Self {
        match e {
            HullError::DegenerateQuery { .. } => CliError::Degenerate(e.to_string()),
            HullError::NoSamples => CliError::Usage(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ExtractError> for CliError {
    fn from(e: ExtractError) -> Self {
        match e {
            ExtractError::Hull(h) => h.into(),
            ExtractError::Grid(g) => g.into(),
            ExtractError::ZeroLevel => CliError::Usage(e.to_string()),
        }
    }
}

impl From<CurvatureError> for CliError {
    fn from(e: CurvatureError) -> Self {
        match e {
            CurvatureError::DegenerateQuery { .. } => CliError::Degenerate(e.to_string()),
            CurvatureError::NoSamples => CliError::Usage(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<ProjectionError> for CliError {
    fn from(e: ProjectionError) -> Self {
        match e {
            ProjectionError::DegenerateQuery { .. } => CliError::Degenerate(e.to_string()),
            ProjectionError::Hull(h) => h.into(),
            ProjectionError::Extract(x) => x.into(),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<SecantError> for CliError {
    fn from(e: SecantError) -> Self {
        match e {
            SecantError::Hull(h) => h.into(),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<SurgeryError> for CliError {
    fn from(e: SurgeryError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<SuiteError> for CliError {
    fn from(e: SuiteError) -> Self {
        match e {
            SuiteError::Hull(h) => h.into(),
            SuiteError::Extract(x) => x.into(),
            SuiteError::Curvature(c) => c.into(),
            SuiteError::Projection(p) => p.into(),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

/// What a command hands back: the command-specific result and the exit code
/// it wants once the report is written.
pub struct Outcome {
    pub result: Value,
    pub seed: Option<u64>,
    pub exit: i32,
}

impl Outcome {
    pub fn ok(result: Value) -> Self {
        Self {
            result,
            seed: None,
            exit: 0,
        }
    }

    pub fn seeded(result: Value, seed: u64) -> Self {
        Self {
            result,
            seed: Some(seed),
            exit: 0,
        }
    }
}

pub struct Input<'a> {
    pub path: &'a Path,
    pub link: &'a Link64,
    pub name: Option<String>,
    pub tol: Tolerance64,
}

pub fn envelope(command: &str, input: Option<&Input<'_>>, outcome: &Outcome, timing: Option<f64>) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    if let Some(i) = input {
        m.insert(
            "input".into(),
            json!({
                "path": i.path.display().to_string(),
                "name": i.name,
                "components": i.link.loops().len(),
                "vertices": i.link.vertex_count(),
            }),
        );
        m.insert(
            "tolerance".into(),
            json!({
                "eps_rel": i.tol.eps_rel(),
                "eps_abs": i.tol.eps_abs(),
                "diameter": i.tol.diameter(),
            }),
        );
    }
    if let Some(s) = outcome.seed {
        m.insert("seed".into(), json!(s));
    }
    m.insert("result".into(), outcome.result.clone());
    if let Some(t) = timing {
        m.insert("timings".into(), json!({ "compute_seconds": t }));
    }
    Value::Object(m)
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, x, out);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = a.iter().map(ToString::to_string).collect();
            out.push(format!("{prefix} = [{}]", parts.join(", ")));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        _ => out.push(format!("{prefix} = {v}")),
    }
}

pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut lines = Vec::new();
            flatten("", v, &mut lines);
            let mut s = lines.join("\n");
            s.push('\n');
            s
        }
    }
}
