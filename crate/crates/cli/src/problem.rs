//! Problem-file schema: one versioned JSON document per query, with
//! unknown fields rejected.

use frechet_core::diffcalc::GridWindow;
use frechet_core::exppoly::ExpPoly;
use frechet_core::group::{GroupElement, GroupSpec};
use frechet_core::montel::MontelSystem;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    pub query: Query,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Query {
    GeneratesQuery(GeneratesQuery),
    ApplyQuery(ApplyQuery),
    SolveQuery(SolveQuery),
    MontelSystem(MontelSystem),
    CounterexampleQuery(CounterexampleQuery),
    TraceQuery(TraceQuery),
}

impl Query {
    pub fn kind(&self) -> &'static str {
        match self {
            Query::GeneratesQuery(_) => "generates-query",
            Query::ApplyQuery(_) => "apply-query",
            Query::SolveQuery(_) => "solve-query",
            Query::MontelSystem(_) => "montel-system",
            Query::CounterexampleQuery(_) => "counterexample-query",
            Query::TraceQuery(_) => "trace-query",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratesQuery {
    pub group: GroupSpec,
    pub steps: Vec<GroupElement>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApplyQuery {
    pub chain: Vec<Vec<i64>>,
    pub f: ExpPoly,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationJson {
    pub chain: Vec<Vec<i64>>,
    /// Absent or null means a zero right-hand side.
    #[serde(default)]
    pub rhs: Option<ExpPoly>,
}

/// Window mode (brute-force grid kernel) when `window` is present,
/// polynomial-ansatz mode when `max_degree` is present.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveQuery {
    pub num_vars: usize,
    pub equations: Vec<EquationJson>,
    #[serde(default)]
    pub window: Option<GridWindow>,
    #[serde(default)]
    pub max_degree: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleQuery {
    pub group: GroupSpec,
    pub steps: Vec<GroupElement>,
    #[serde(default)]
    pub window: Option<GridWindow>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceQuery {
    pub system: MontelSystem,
    pub f: ExpPoly,
    pub tuple: Vec<usize>,
}
