use realstrata::detector::{DetectionReport, Verdict, Witness};
use realstrata::oracle::CrossCheck;
use realstrata::FiniteQuadraticForm;
use serde::{Deserialize, Serialize};

pub const REPORT_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = concat!("realstrata ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportV1 {
    pub version: u32,
    pub artifact: String,
    pub model: String,
    pub h2: i64,
    pub spec: String,
    #[serde(rename = "rank_S")]
    pub rank_s: u32,
    #[serde(rename = "rank_T")]
    pub rank_t: u32,
    pub t_gram: Option<[i64; 3]>,
    pub disc: FiniteQuadraticForm,
    pub disc_display: String,
    pub verdict: String,
    pub conclusiveness_basis: Option<String>,
    pub scope_note: String,
    pub involutions: usize,
    pub witness: Option<WitnessV1>,
    pub trace: Vec<TraceV1>,
    pub oracle: Option<OracleV1>,
    pub computed_at_unix_ms: u128,
    pub wall_time_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessV1 {
    Kernel {
        a2: i64,
        n: i64,
        kappa: Vec<i64>,
        phi: Vec<Vec<i64>>,
    },
    Reflection {
        matrix: [[i64; 2]; 2],
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceV1 {
    pub a2: i64,
    pub n: i64,
    pub kappa: Option<Vec<i64>>,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleV1 {
    pub witness_revalidated: Option<bool>,
    pub trace_exhaustive: Option<bool>,
    pub involutions_agree: Option<bool>,
    /// Set when the discriminant is too large for brute force.
    pub skipped: Option<String>,
}

impl From<CrossCheck> for OracleV1 {
    fn from(c: CrossCheck) -> Self {
        OracleV1 {
            witness_revalidated: c.witness_revalidated,
            trace_exhaustive: c.trace_exhaustive,
            involutions_agree: c.involutions_agree,
            skipped: None,
        }
    }
}

impl OracleV1 {
    pub fn agrees(&self) -> bool {
        [
            self.witness_revalidated,
            self.trace_exhaustive,
            self.involutions_agree,
        ]
        .iter()
        .all(|x| x.unwrap_or(true))
    }
}

impl ReportV1 {
    pub fn new(
        report: &DetectionReport,
        disc: FiniteQuadraticForm,
        t_gram: Option<[i64; 3]>,
        computed_at_unix_ms: u128,
        wall_time_ms: u128,
    ) -> Self {
        let witness = report.witness.as_ref().map(|w| match w {
            Witness::Kernel {
                a_square,
                n,
                kappa,
                phi,
            } => WitnessV1::Kernel {
                a2: *a_square,
                n: *n,
                kappa: kappa.coeffs().to_vec(),
                phi: phi.matrix().to_vec(),
            },
            Witness::Reflection { matrix } => WitnessV1::Reflection { matrix: *matrix },
        });
        let trace = report
            .trace
            .iter()
            .map(|e| TraceV1 {
                a2: e.a_square,
                n: e.n,
                kappa: e.kappa.as_ref().map(|k| k.coeffs().to_vec()),
                reason: e.reason.map(|r| r.as_str().to_string()),
            })
            .collect();
        ReportV1 {
            version: REPORT_VERSION,
            artifact: ARTIFACT_VERSION.to_string(),
            model: report.model.to_string(),
            h2: report.h_square,
            spec: report.spec.canonical(),
            rank_s: report.rank_s,
            rank_t: report.rank_t,
            t_gram,
            disc,
            disc_display: report.disc.clone(),
            verdict: report.verdict.as_str().to_string(),
            conclusiveness_basis: report
                .conclusiveness_basis
                .and_then(|b| serde_json::to_value(b).ok())
                .and_then(|v| v.as_str().map(str::to_string)),
            scope_note: report.scope_note.to_string(),
            involutions: report.involutions,
            witness,
            trace,
            oracle: None,
            computed_at_unix_ms,
            wall_time_ms,
        }
    }

    pub fn exit_code(&self) -> i32 {
        verdict_exit_code(&self.verdict)
    }
}

pub fn verdict_exit_code(verdict: &str) -> i32 {
    if verdict == Verdict::WitnessFound.as_str() {
        0
    } else if verdict == Verdict::NoneExists.as_str() {
        3
    } else {
        4
    }
}
