use std::io::Write;

use matmaps::conjugacy::CanonicalPair;
use matmaps::mat::{Matrix2, Row};
use matmaps::oracle::{ClosureReport, Mode, Subspace};
use matmaps::waring::ImagePrediction;
use matmaps::FieldSpec;
use serde::Serialize;

use crate::{CliError, OutputFormat, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Root-availability preconditions not met; nothing asserted.
    Gated,
    /// Row constraints unsatisfiable over the field.
    Skipped,
    /// No closed-form prediction; certificate only.
    Abstain,
    /// Sampled oracle: consistent, but not an exact comparison.
    Evidence,
    Info,
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Gated => "gated",
            Status::Skipped => "skipped",
            Status::Abstain => "abstain",
            Status::Evidence => "evidence",
            Status::Info => "info",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    PowerSum,
    Commutator,
}

#[derive(Debug, Clone, Serialize)]
pub struct Inputs {
    pub field: FieldSpec,
    pub map: MapKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Matrix2>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Matrix2>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Matrix2>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k1: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k2: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CanonicalSummary {
    pub family: &'static str,
    pub zero_row: Option<Row>,
    pub j_a: Matrix2,
    pub b_tilde: Matrix2,
    pub witness: Matrix2,
    pub base_extended: bool,
}

impl From<&CanonicalPair> for CanonicalSummary {
    fn from(cp: &CanonicalPair) -> Self {
        CanonicalSummary {
            family: cp.family.tag(),
            zero_row: cp.zero_row(),
            j_a: cp.j_a,
            b_tilde: cp.b_tilde,
            witness: cp.witness,
            base_extended: cp.base_extended,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SubspaceSummary {
    pub dim: usize,
    pub basis: Vec<Matrix2>,
}

impl From<&Subspace> for SubspaceSummary {
    fn from(s: &Subspace) -> Self {
        SubspaceSummary { dim: s.dim(), basis: s.basis_matrices() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PredictionSummary {
    pub image: String,
    pub provenance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjugator: Option<Matrix2>,
    pub subspace: SubspaceSummary,
}

impl PredictionSummary {
    pub fn new(p: &ImagePrediction, field: FieldSpec) -> Self {
        let conjugator = match &p.image {
            matmaps::waring::PredictedImage::RowSpace { conjugator, .. } => Some(*conjugator),
            _ => None,
        };
        PredictionSummary {
            image: p.label(),
            provenance: p.provenance.to_string(),
            conjugator,
            subspace: SubspaceSummary::from(&p.subspace(field)),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSummary {
    #[serde(flatten)]
    pub mode: Mode,
    pub size: u64,
    pub dim: usize,
    pub basis: Vec<Matrix2>,
    pub is_subspace: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Matrix2>,
}

impl From<&ClosureReport> for OracleSummary {
    fn from(r: &ClosureReport) -> Self {
        OracleSummary {
            mode: r.mode,
            size: r.size,
            dim: r.dim,
            basis: r.basis.basis_matrices(),
            is_subspace: r.is_subspace,
            counterexample: r.counterexample,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub in_image: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Matrix2>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<Matrix2>,
    pub attestation: String,
}

/// One verified (or attempted) instance.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub id: String,
    pub inputs: Inputs,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canonical: Option<CanonicalSummary>,
    /// Image claimed by the table, for table rows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<SubspaceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction: Option<PredictionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<Solution>,
    /// Whether k-th roots are available for the exponents (power-sum map only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate: Option<bool>,
    /// Exact agreement; present only for exhaustive comparisons.
    #[serde(rename = "match", skip_serializing_if = "Option::is_none")]
    pub matched: Option<bool>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl VerificationReport {
    pub fn new(id: impl Into<String>, inputs: Inputs) -> Self {
        VerificationReport {
            id: id.into(),
            inputs,
            canonical: None,
            expected: None,
            prediction: None,
            oracle: None,
            solution: None,
            gate: None,
            matched: None,
            status: Status::Info,
            detail: None,
            wall_ms: None,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Counts {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub gated: usize,
    pub skipped: usize,
    pub abstain: usize,
    pub evidence: usize,
    pub info: usize,
}

impl Counts {
    pub fn add(&mut self, s: Status) {
        self.total += 1;
        match s {
            Status::Pass => self.pass += 1,
            Status::Fail => self.fail += 1,
            Status::Gated => self.gated += 1,
            Status::Skipped => self.skipped += 1,
            Status::Abstain => self.abstain += 1,
            Status::Evidence => self.evidence += 1,
            Status::Info => self.info += 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub reports: Counts,
    /// Per-row verdicts for `verify-table`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<Counts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: RunConfig,
    pub reports: Vec<VerificationReport>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &'static str, config: RunConfig, reports: Vec<VerificationReport>) -> Self {
        let mut counts = Counts::default();
        for r in &reports {
            counts.add(r.status);
        }
        Report {
            schema_version: SCHEMA_VERSION,
            command,
            config,
            reports,
            summary: Summary { reports: counts, rows: None, wall_ms: None },
        }
    }

    pub fn has_failures(&self) -> bool {
        self.summary.reports.fail > 0 || self.summary.rows.as_ref().is_some_and(|r| r.fail > 0)
    }

    pub fn exit_code(&self) -> i32 {
        if self.has_failures() {
            1
        } else {
            0
        }
    }

    pub fn write(&self, format: OutputFormat, out: &mut impl Write) -> Result<(), CliError> {
        match format {
            OutputFormat::Json => {
                serde_json::to_writer_pretty(&mut *out, self).map_err(|e| CliError::Io(e.to_string()))?;
                writeln!(out)?;
            }
            OutputFormat::Csv => self.write_csv(out)?,
            OutputFormat::Pretty => self.write_pretty(out)?,
        }
        Ok(())
    }

    fn write_csv(&self, out: &mut impl Write) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.reports {
            w.serialize(CsvRow::from(r)).map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_pretty(&self, out: &mut impl Write) -> Result<(), CliError> {
        let c = &self.config;
        writeln!(
            out,
            "{} over {} (k1={}, k2={}, mode={}, seed={}, workers={})",
            self.command, c.field, c.k1, c.k2, c.mode, c.seed, c.workers
        )?;
        for r in &self.reports {
            let mut line = format!("{:<8} {:<14}", r.status.label(), r.id);
            if let (Some(a), Some(b)) = (&r.inputs.a, &r.inputs.b) {
                line += &format!(" A={a} B={b}");
            }
            if let Some(cm) = &r.inputs.c {
                line += &format!(" C={cm}");
            }
            if let Some(cp) = &r.canonical {
                line += &format!(" family={}", cp.family);
            }
            if let Some(e) = &r.expected {
                line += &format!(" table=dim{}", e.dim);
            }
            match &r.prediction {
                Some(p) => line += &format!(" predicted={}", p.image),
                None if r.oracle.is_some() && self.command == "verify-commutator" => line += " predicted=abstain",
                None => {}
            }
            if let Some(o) = &r.oracle {
                line += &format!(" oracle=dim{}/{} points", o.dim, o.size);
                if !o.is_subspace {
                    line += " (not a subspace)";
                }
            }
            if let Some(s) = &r.solution {
                match (&s.x, &s.y) {
                    (Some(x), Some(y)) => line += &format!(" X={x} Y={y}"),
                    _ => line += " not in image",
                }
            }
            if let Some(d) = &r.detail {
                line += &format!(" [{d}]");
            }
            if let Some(ms) = r.wall_ms {
                line += &format!(" {ms:.1}ms");
            }
            writeln!(out, "{line}")?;
        }
        let s = &self.summary.reports;
        let mut tail = format!(
            "summary: {} reports, {} pass, {} fail, {} gated, {} skipped, {} abstain, {} evidence",
            s.total, s.pass, s.fail, s.gated, s.skipped, s.abstain, s.evidence
        );
        if let Some(rows) = &self.summary.rows {
            tail += &format!(
                "; rows: {} total, {} pass, {} fail, {} gated, {} skipped",
                rows.total, rows.pass, rows.fail, rows.gated, rows.skipped
            );
        }
        if let Some(ms) = self.summary.wall_ms {
            tail += &format!("; {ms:.1}ms");
        }
        writeln!(out, "{tail}")?;
        Ok(())
    }
}

#[derive(Serialize)]
struct CsvRow {
    id: String,
    field: String,
    map: &'static str,
    a: Option<String>,
    b: Option<String>,
    c: Option<String>,
    k1: Option<u64>,
    k2: Option<u64>,
    family: Option<&'static str>,
    zero_row: Option<String>,
    expected_dim: Option<usize>,
    predicted: Option<String>,
    predicted_dim: Option<usize>,
    oracle_mode: Option<&'static str>,
    oracle_size: Option<u64>,
    oracle_dim: Option<usize>,
    is_subspace: Option<bool>,
    in_image: Option<bool>,
    x: Option<String>,
    y: Option<String>,
    gate: Option<bool>,
    matched: Option<bool>,
    status: &'static str,
    detail: Option<String>,
    wall_ms: Option<f64>,
}

impl From<&VerificationReport> for CsvRow {
    fn from(r: &VerificationReport) -> Self {
        let i = &r.inputs;
        CsvRow {
            id: r.id.clone(),
            field: i.field.to_string(),
            map: match i.map {
                MapKind::PowerSum => "power_sum",
                MapKind::Commutator => "commutator",
            },
            a: i.a.map(|m| m.to_string()),
            b: i.b.map(|m| m.to_string()),
            c: i.c.map(|m| m.to_string()),
            k1: i.k1,
            k2: i.k2,
            family: r.canonical.as_ref().map(|c| c.family),
            zero_row: r.canonical.as_ref().and_then(|c| c.zero_row).map(|z| z.to_string()),
            expected_dim: r.expected.as_ref().map(|e| e.dim),
            predicted: r.prediction.as_ref().map(|p| p.image.clone()),
            predicted_dim: r.prediction.as_ref().map(|p| p.subspace.dim),
            oracle_mode: r.oracle.as_ref().map(|o| if o.mode.is_exhaustive() { "exhaustive" } else { "sampled" }),
            oracle_size: r.oracle.as_ref().map(|o| o.size),
            oracle_dim: r.oracle.as_ref().map(|o| o.dim),
            is_subspace: r.oracle.as_ref().map(|o| o.is_subspace),
            in_image: r.solution.as_ref().map(|s| s.in_image),
            x: r.solution.as_ref().and_then(|s| s.x).map(|m| m.to_string()),
            y: r.solution.as_ref().and_then(|s| s.y).map(|m| m.to_string()),
            gate: r.gate,
            matched: r.matched,
            status: r.status.label(),
            detail: r.detail.clone(),
            wall_ms: r.wall_ms,
        }
    }
}
