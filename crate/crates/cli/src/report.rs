//! JSON reports written to stdout.

use serde::{Deserialize, Serialize};

use preserve_core::extremal::ExtremePointReport;
use preserve_core::jordan::{JordanKind, JordanReport, StormerSplit};
use preserve_core::preserver::{
    Decomposition, IdentityAudit, PreserverCertificate, Verdict, Witness, WitnessSource,
};
use preserve_core::Tolerance;

use crate::error::CliError;
use crate::files::MatrixFile;

/// Envelope shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile<T> {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub tolerance: Tolerance,
    pub seed: Option<u64>,
    pub rng: String,
    pub started_unix_ms: u64,
    pub elapsed_ms: f64,
    pub result: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitJson {
    pub e: MatrixFile,
    pub rank: f64,
    pub p: i64,
    pub q: i64,
    pub r_hom: f64,
    pub r_anti: f64,
    pub r_central: f64,
    pub kind: JordanKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JordanJson {
    pub n: usize,
    pub m: usize,
    pub r_square: f64,
    pub r_star: f64,
    pub r_unital: f64,
    pub is_jordan: bool,
    pub worst_pair: [[usize; 2]; 2],
    pub split: Option<SplitJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub u_left: MatrixFile,
    pub v_right: MatrixFile,
    pub transpose_flag: bool,
    pub w: MatrixFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub unitary: MatrixFile,
    pub image_defect: f64,
    pub source: WitnessSource,
}

/// Comparison of the pipeline verdict with the sampling falsifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub falsify_trials: usize,
    pub falsifier_seed: u64,
    pub falsifier_witness: Option<MatrixFile>,
    /// `None` when the pipeline verdict is Inconclusive.
    pub agree: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub verdict: Verdict,
    pub note: Option<String>,
    pub n: usize,
    pub m: usize,
    pub v: MatrixFile,
    pub v_unitarity_residual: f64,
    pub kind: JordanKind,
    pub transpose_flag: bool,
    pub reconstruction_residual: Option<f64>,
    pub decomposition: Option<DecompositionJson>,
    pub witness: Option<WitnessJson>,
    pub jordan: JordanJson,
    pub cross_check: Option<CrossCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremeJson {
    pub rows: usize,
    pub cols: usize,
    pub algebra_dim: usize,
    pub report: ExtremePointReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditJson {
    pub n: usize,
    pub m: usize,
    pub note: Option<String>,
    pub audit: IdentityAudit,
}

fn finite(x: f64, what: &str) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::format(format!("{what} is not finite ({x})")))
    }
}

fn finite_opt(x: Option<f64>, what: &str) -> Result<Option<f64>, CliError> {
    x.map(|v| finite(v, what)).transpose()
}

impl SplitJson {
    fn from_split(s: &StormerSplit) -> Result<Self, CliError> {
        Ok(Self {
            e: MatrixFile::from_matrix(&s.e),
            rank: finite(s.rank, "rank")?,
            p: s.p,
            q: s.q,
            r_hom: finite(s.r_hom, "r_hom")?,
            r_anti: finite(s.r_anti, "r_anti")?,
            r_central: finite(s.r_central, "r_central")?,
            kind: s.kind,
        })
    }
}

impl JordanJson {
    pub fn from_report(r: &JordanReport) -> Result<Self, CliError> {
        let ((i, j), (k, l)) = r.worst_pair;
        Ok(Self {
            n: r.n,
            m: r.m,
            r_square: finite(r.r_square, "r_square")?,
            r_star: finite(r.r_star, "r_star")?,
            r_unital: finite(r.r_unital, "r_unital")?,
            is_jordan: r.is_jordan,
            worst_pair: [[i, j], [k, l]],
            split: r.split.as_ref().map(SplitJson::from_split).transpose()?,
        })
    }
}

impl DecompositionJson {
    fn from_decomposition(d: &Decomposition) -> Self {
        Self {
            u_left: MatrixFile::from_matrix(&d.u_left),
            v_right: MatrixFile::from_matrix(&d.v_right),
            transpose_flag: d.transpose_flag,
            w: MatrixFile::from_matrix(&d.w),
        }
    }
}

impl WitnessJson {
    fn from_witness(w: &Witness) -> Result<Self, CliError> {
        Ok(Self {
            unitary: MatrixFile::from_matrix(&w.unitary),
            image_defect: finite(w.image_defect, "witness image defect")?,
            source: w.source,
        })
    }
}

impl CertificateJson {
    pub fn from_certificate(
        c: &PreserverCertificate,
        cross_check: Option<CrossCheck>,
    ) -> Result<Self, CliError> {
        Ok(Self {
            verdict: c.verdict,
            note: c.note.clone(),
            n: c.n,
            m: c.m,
            v: MatrixFile::from_matrix(&c.v),
            v_unitarity_residual: finite(c.v_unitarity_residual, "v_unitarity_residual")?,
            kind: c.kind,
            transpose_flag: c.transpose_flag(),
            reconstruction_residual: finite_opt(
                c.reconstruction_residual,
                "reconstruction_residual",
            )?,
            decomposition: c
                .decomposition
                .as_ref()
                .map(DecompositionJson::from_decomposition),
            witness: c
                .witness
                .as_ref()
                .map(WitnessJson::from_witness)
                .transpose()?,
            jordan: JordanJson::from_report(&c.jordan)?,
            cross_check,
        })
    }
}

impl ExtremeJson {
    pub fn new(
        rows: usize,
        cols: usize,
        algebra_dim: usize,
        report: ExtremePointReport,
    ) -> Result<Self, CliError> {
        finite(report.defect_left, "defect_left")?;
        finite(report.defect_right, "defect_right")?;
        finite(report.kadison_residual, "kadison_residual")?;
        finite(report.margin, "margin")?;
        Ok(Self {
            rows,
            cols,
            algebra_dim,
            report,
        })
    }
}

impl AuditJson {
    pub fn new(
        n: usize,
        m: usize,
        note: Option<String>,
        audit: IdentityAudit,
    ) -> Result<Self, CliError> {
        finite(audit.max_residual(), "identity residual")?;
        Ok(Self { n, m, note, audit })
    }
}
