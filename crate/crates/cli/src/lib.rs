//! Verification pipelines over the deck group and the complex models, and
//! the reports they produce.

use std::fmt::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use nontidy::cohomology::{sw_height, CohomologyError, HeightReport};
use nontidy::complex::{build_quotient_model, ComplexError, ComplexSummary, Resolution};
use nontidy::crystal::{
    coindex_one_witness, find_odd_involution, torsion_free_certificate, CrystalError, GammaElement,
};

/// Largest dimension for the group checks; certificates have `2^{n−1}` entries.
pub const MAX_GROUP_DIM: usize = 16;
/// Largest dimension for which complex models are built.
pub const MAX_COHOMOLOGY_DIM: usize = 5;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Crystal(#[from] CrystalError),
    #[error("complex construction failed: {0}")]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("report serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    GroupOnly,
    CohomologyOnly,
    Full,
}

impl Mode {
    /// Full for `dim ≤ 3`, group checks only above.
    pub fn default_for(dim: usize) -> Mode {
        if dim <= 3 {
            Mode::Full
        } else {
            Mode::GroupOnly
        }
    }

    fn runs_group(self) -> bool {
        matches!(self, Mode::GroupOnly | Mode::Full)
    }

    fn runs_cohomology(self) -> bool {
        matches!(self, Mode::CohomologyOnly | Mode::Full)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::GroupOnly => "group-only",
            Mode::CohomologyOnly => "cohomology-only",
            Mode::Full => "full",
        })
    }
}

impl FromStr for Mode {
    type Err = PipelineError;
    fn from_str(s: &str) -> Result<Self, PipelineError> {
        match s {
            "group-only" | "group" => Ok(Mode::GroupOnly),
            "cohomology-only" | "cohomology" => Ok(Mode::CohomologyOnly),
            "full" => Ok(Mode::Full),
            other => Err(PipelineError::InvalidInput(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub dim: usize,
    pub resolution: Resolution,
    pub mode: Mode,
}

impl PipelineConfig {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            resolution: Resolution::default(),
            mode: Mode::default_for(dim),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSection {
    /// `torsion-free` or `torsion`.
    pub torsion_verdict: String,
    pub certificate_patterns: usize,
    pub certificate_replayed: bool,
    pub odd_involution: Option<GammaElement>,
    pub coindex_witness: GammaElement,
    pub witness_parity: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub dim: usize,
    pub mode: Mode,
    pub resolution: Resolution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<ComplexSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cohomology: Option<HeightReport>,
    pub checks: Vec<Check>,
    pub conclusion: String,
    pub exit_status: i32,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.exit_status == 0
    }
}

fn group_section(dim: usize, checks: &mut Vec<Check>) -> Result<GroupSection, PipelineError> {
    let certificate = torsion_free_certificate(dim)?;
    let replayed = certificate.replay().is_ok();
    let torsion_free = certificate.is_torsion_free();
    let involution = find_odd_involution(dim)?;
    let witness = coindex_one_witness(dim)?;
    let witness_valid = witness.is_odd() && GammaElement::from_affine(&witness.to_affine()).as_ref() == Ok(&witness);
    log::info!(
        "dim {dim}: {} sign patterns, torsion-free = {torsion_free}",
        certificate.entries.len()
    );

    let mut check = |name: &str, passed: bool| {
        checks.push(Check {
            name: name.to_string(),
            passed,
        })
    };
    check("torsion-free certificate", torsion_free);
    check("certificate replay", replayed);
    check("no odd involution", involution.is_none());
    check("odd coindex witness", witness_valid);
    Ok(GroupSection {
        torsion_verdict: if torsion_free { "torsion-free" } else { "torsion" }.to_string(),
        certificate_patterns: certificate.entries.len(),
        certificate_replayed: replayed,
        odd_involution: involution,
        witness_parity: witness.parity(),
        coindex_witness: witness,
    })
}

pub fn run_pipeline(config: &PipelineConfig) -> Result<VerificationReport, PipelineError> {
    let n = config.dim;
    if n == 0 {
        return Err(PipelineError::InvalidInput("dimension must be at least 1".into()));
    }
    if config.mode.runs_group() && n > MAX_GROUP_DIM {
        return Err(PipelineError::InvalidInput(format!(
            "group checks are limited to dimension {MAX_GROUP_DIM}"
        )));
    }
    if config.mode.runs_cohomology() && n > MAX_COHOMOLOGY_DIM {
        return Err(PipelineError::InvalidInput(format!(
            "complex models are limited to dimension {MAX_COHOMOLOGY_DIM}"
        )));
    }

    let mut checks = Vec::new();
    let group = if config.mode.runs_group() {
        Some(group_section(n, &mut checks)?)
    } else {
        None
    };

    let (complex, cohomology) = if config.mode.runs_cohomology() {
        log::info!("building model of dimension {n} at resolution {}", config.resolution);
        let model = build_quotient_model(n, config.resolution)?;
        log::info!(
            "model: cells {:?}, {} subdivisions",
            model.complex().cells_per_dim(),
            model.subdivisions()
        );
        let report = sw_height(&model)?;
        let summary = ComplexSummary::of(&model);
        let duality = (0..=n).all(|k| report.betti[k] == report.betti[n - k]);
        for (name, passed) in [
            ("height equals dimension", report.height == n),
            ("powers vanish monotonically", report.is_monotone()),
            ("top pairing agrees", report.pairing_agrees()),
            ("euler characteristic zero", summary.euler == 0),
            ("poincare duality", duality),
            ("closed manifold condition", model.complex().is_closed_pseudomanifold()),
        ] {
            checks.push(Check {
                name: name.to_string(),
                passed,
            });
        }
        (Some(summary), Some(report))
    } else {
        (None, None)
    };

    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let conclusion = if !failed.is_empty() {
        format!("verification failed: {}", failed.join(", "))
    } else {
        match config.mode {
            Mode::GroupOnly => "coind = 1".to_string(),
            Mode::CohomologyOnly => format!("h = {n}"),
            // X₁ is the antipodal circle: index, height and coindex all equal 1
            Mode::Full if n == 1 => "h = 1, coind = 1".to_string(),
            Mode::Full => format!("non-tidy: h = {n}, coind = 1"),
        }
    };
    Ok(VerificationReport {
        dim: n,
        mode: config.mode,
        resolution: config.resolution,
        group,
        complex,
        cohomology,
        exit_status: i32::from(!failed.is_empty()),
        checks,
        conclusion,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

impl FromStr for Format {
    type Err = PipelineError;
    fn from_str(s: &str) -> Result<Self, PipelineError> {
        match s {
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(PipelineError::InvalidInput(format!("unknown report format {other:?}"))),
        }
    }
}

pub fn emit_report(report: &VerificationReport, format: Format) -> Result<Vec<u8>, PipelineError> {
    match format {
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(report)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Markdown => Ok(markdown(report).into_bytes()),
    }
}

fn markdown(r: &VerificationReport) -> String {
    let mut s = String::new();
    let mut line = |text: String| {
        s.push_str(&text);
        s.push('\n');
    };
    line(format!("# Verification report, dimension {}", r.dim));
    line(String::new());
    line(format!("- mode: {}", r.mode));
    line(format!("- resolution: {}", r.resolution));
    if let Some(g) = &r.group {
        line(String::new());
        line("## Group".into());
        line(String::new());
        line(format!(
            "- torsion: {} ({} sign patterns, replayed: {})",
            g.torsion_verdict, g.certificate_patterns, g.certificate_replayed
        ));
        line(format!(
            "- odd involution: {}",
            g.odd_involution
                .as_ref()
                .map_or("none".to_string(), ToString::to_string)
        ));
        line(format!(
            "- coindex witness: {} (parity {})",
            g.coindex_witness, g.witness_parity
        ));
    }
    if let Some(c) = &r.complex {
        line(String::new());
        line("## Complex".into());
        line(String::new());
        line(format!("- cells per dimension: {:?}", c.cells_per_dim));
        line(format!("- euler characteristic: {}", c.euler));
    }
    if let Some(h) = &r.cohomology {
        line(String::new());
        line("## Cohomology".into());
        line(String::new());
        line(format!("- betti numbers (mod 2): {:?}", h.betti));
        line(format!("- height: {}", h.height));
        let mut powers = String::new();
        for p in &h.powers {
            let verdict = if p.is_coboundary { "zero" } else { "nonzero" };
            write!(
                powers,
                "{}w1^{} {verdict}",
                if powers.is_empty() { "" } else { ", " },
                p.k
            )
            .expect("string write");
        }
        line(format!("- powers: {powers}"));
        line(format!("- top pairing: {}", h.pairing));
    }
    line(String::new());
    line("## Checks".into());
    line(String::new());
    for c in &r.checks {
        line(format!("- [{}] {}", if c.passed { "x" } else { " " }, c.name));
    }
    line(String::new());
    line(format!("**Conclusion:** {}", r.conclusion));
    s
}
