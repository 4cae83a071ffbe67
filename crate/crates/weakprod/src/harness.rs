//! Batch experiment runner behind the CLI: expands a parameter grid, runs the
//! cells on a worker pool, and renders deterministic CSV or JSON reports.
//! Cell failures are recorded per cell and never abort the grid. Wall times
//! are measured but excluded from the rendered output so that reruns with the
//! same configuration are byte-identical.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{op_matrix_to_json, poly_to_terms, space_to_json, OpMatrixJson, PolyTerm, SpaceJson};
use crate::norms::transpose_gap_experiment;
use crate::operators::{
    intertwining_residual, kernel_hankel_rank_check, mult_matrix, operator_norm,
};
use crate::space::{cnp_coefficient_check, enumerate_multi_indices, Family, Poly, SpaceSpec};
use crate::weak_product::{wp_bracket, AlsOptions, CertificateVerdict, SearchOptions};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Gap,
    HankelCheck,
    Wp,
    Cnp,
    MultNorm,
    DumpMatrix,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Gap => "gap",
            Command::HankelCheck => "hankel-check",
            Command::Wp => "wp",
            Command::Cnp => "cnp",
            Command::MultNorm => "mult-norm",
            Command::DumpMatrix => "dump-matrix",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub command: Command,
    pub space: SpaceSpec,
    /// Family parameters (gap) or trial indices (hankel-check).
    pub ns: Vec<u32>,
    /// Truncation degrees N.
    pub truncs: Vec<u32>,
    /// Degree caps D.
    pub degs: Vec<u32>,
    /// Rank caps r.
    pub ranks: Vec<usize>,
    pub h: Option<Poly>,
    pub tol: f64,
    pub seed: u64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(command: Command, space: SpaceSpec) -> Self {
        ExperimentConfig {
            command,
            space,
            ns: Vec::new(),
            truncs: Vec::new(),
            degs: Vec::new(),
            ranks: Vec::new(),
            h: None,
            tol: 1e-9,
            seed: 0x5EED,
            format: OutputFormat::Json,
            out: None,
        }
    }

    /// Fills per-command defaults and checks the grid invariants.
    pub fn validate(&mut self) -> Result<()> {
        if self.tol <= 0.0 {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        match self.command {
            Command::Gap => {
                if self.space.family() != Family::DruryArveson || self.space.dim() != 2 {
                    return Err(Error::InvalidArgument(
                        "gap runs on the two-variable Drury-Arveson space (--space da2)".into(),
                    ));
                }
                if self.ns.is_empty() {
                    self.ns = (1..=4).collect();
                }
                if self.truncs.is_empty() {
                    self.truncs = vec![8];
                }
            }
            Command::HankelCheck => {
                if self.ns.is_empty() {
                    self.ns = (0..20).collect();
                }
                if self.truncs.is_empty() {
                    self.truncs = vec![4];
                }
                if self.degs.is_empty() {
                    self.degs = vec![4];
                }
            }
            Command::Wp => {
                let h = self
                    .h
                    .as_ref()
                    .ok_or_else(|| Error::InvalidArgument("wp requires --h".into()))?;
                if self.degs.is_empty() {
                    self.degs = vec![h.degree_or_zero().div_ceil(2).max(1)];
                }
                if self.ranks.is_empty() {
                    self.ranks = vec![1];
                }
            }
            Command::Cnp => {
                if self.truncs.is_empty() {
                    self.truncs = vec![50];
                }
            }
            Command::MultNorm => {
                if self.h.is_none() {
                    return Err(Error::InvalidArgument("mult-norm requires --h".into()));
                }
                if self.truncs.is_empty() {
                    self.truncs = (0..=8).collect();
                }
            }
            Command::DumpMatrix => {
                if self.h.is_none() {
                    return Err(Error::InvalidArgument("dump-matrix requires --h".into()));
                }
                if self.truncs.is_empty() {
                    self.truncs = vec![4];
                }
                if self.format == OutputFormat::Csv {
                    return Err(Error::InvalidArgument(
                        "dump-matrix only supports --format json".into(),
                    ));
                }
            }
        }
        if let Some(h) = &self.h {
            if h.dim() != self.space.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.space.dim(),
                    found: h.dim(),
                });
            }
        }
        if self.cells().is_empty() {
            return Err(Error::InvalidArgument("empty parameter grid".into()));
        }
        Ok(())
    }

    fn cells(&self) -> Vec<CellParams> {
        let mut cells = Vec::new();
        match self.command {
            Command::Gap => {
                for &n in &self.ns {
                    for &t in &self.truncs {
                        cells.push(CellParams {
                            n: Some(n),
                            trunc: Some(t),
                            ..CellParams::default()
                        });
                    }
                }
            }
            Command::HankelCheck => {
                for &trial in &self.ns {
                    cells.push(CellParams {
                        trial: Some(trial),
                        trunc: self.truncs.first().copied(),
                        deg: self.degs.first().copied(),
                        ..CellParams::default()
                    });
                }
            }
            Command::Wp => {
                for &d in &self.degs {
                    for &r in &self.ranks {
                        cells.push(CellParams {
                            deg: Some(d),
                            rank: Some(r),
                            ..CellParams::default()
                        });
                    }
                }
            }
            Command::Cnp | Command::MultNorm | Command::DumpMatrix => {
                for &t in &self.truncs {
                    cells.push(CellParams {
                        trunc: Some(t),
                        ..CellParams::default()
                    });
                }
            }
        }
        cells
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CellParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub trunc: Option<u32>,
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub deg: Option<u32>,
    #[serde(rename = "r", skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial: Option<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapRecord {
    pub n: u32,
    #[serde(rename = "N")]
    pub trunc: u32,
    pub row_norm: f64,
    pub col_norm: f64,
    pub ratio: f64,
    pub expected_ratio: f64,
    pub certificate_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HankelRecord {
    pub trial: u32,
    pub intertwining_residual: f64,
    pub second_singular_value: f64,
    pub factor_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WpRecord {
    pub h: Vec<PolyTerm>,
    pub lower: f64,
    pub lower_witness: Vec<PolyTerm>,
    pub upper: f64,
    pub pairs: Vec<(Vec<PolyTerm>, Vec<PolyTerm>)>,
    pub h1_oracle: Option<f64>,
    pub iters: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CnpRecord {
    #[serde(rename = "N")]
    pub trunc: u32,
    pub pass: bool,
    pub min_coeff: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MultNormRecord {
    #[serde(rename = "N")]
    pub trunc: u32,
    pub norm: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum CellOutcome {
    Gap(GapRecord),
    Hankel(HankelRecord),
    Wp(WpRecord),
    Cnp(CnpRecord),
    MultNorm(MultNormRecord),
    Matrix(OpMatrixJson),
    Error { error: String },
}

/// Classification of a failed cell, used for the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellFailure {
    /// Lower bound exceeded the upper bound: an internal bug.
    BracketInversion,
    Other,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellRecord {
    #[serde(flatten)]
    pub params: CellParams,
    pub outcome: CellOutcome,
    /// Measured but not serialized: reports must be byte-identical across
    /// runs.
    #[serde(skip)]
    pub wall_seconds: f64,
    #[serde(skip)]
    pub failure: Option<CellFailure>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub command: String,
    pub space: SpaceJson,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ns: Vec<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub truncs: Vec<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub degs: Vec<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ranks: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<PolyTerm>>,
    pub tol: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: String,
    pub config: ConfigEcho,
    pub cells: Vec<CellRecord>,
}

fn seeded_poly(rng: &mut rand_chacha::ChaCha8Rng, d: usize, max_degree: u32) -> Poly {
    use rand::Rng;
    let mut p = Poly::zero(d);
    for alpha in enumerate_multi_indices(d, max_degree) {
        // small rational coefficients keep the identities well conditioned
        let num = rng.gen_range(-8i32..=8);
        let den = rng.gen_range(1i32..=4);
        if num != 0 {
            p.add_term(alpha, C64::new(num as f64 / den as f64, 0.0));
        }
    }
    p
}

fn run_cell(config: &ExperimentConfig, cell: &CellParams) -> Result<CellOutcome> {
    match config.command {
        Command::Gap => {
            let n = cell.n.unwrap();
            let trunc = cell.trunc.unwrap();
            let rep = transpose_gap_experiment(&config.space, n, trunc)?;
            Ok(CellOutcome::Gap(GapRecord {
                n,
                trunc,
                row_norm: rep.gap.row_norm.value,
                col_norm: rep.gap.col_norm.value,
                ratio: rep.gap.ratio,
                expected_ratio: rep.gap.expected_ratio,
                certificate_ok: rep.certificate.verdict == CertificateVerdict::Consistent,
            }))
        }
        Command::HankelCheck => {
            use rand::{Rng, SeedableRng};
            let trial = cell.trial.unwrap();
            let trunc = cell.trunc.unwrap();
            let deg = cell.deg.unwrap();
            let d = config.space.dim();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
                config.seed.wrapping_add(trial as u64),
            );
            let b = seeded_poly(&mut rng, d, deg);
            let psi = seeded_poly(&mut rng, d, deg);
            let res = intertwining_residual(&config.space, &b, &psi, trunc)?;
            let w: Vec<C64> = (0..d)
                .map(|_| {
                    C64::new(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4))
                })
                .collect();
            let kernel = kernel_hankel_rank_check(&config.space, &w, trunc.min(5))?;
            Ok(CellOutcome::Hankel(HankelRecord {
                trial,
                intertwining_residual: res,
                second_singular_value: kernel.second_singular_value,
                factor_residual: kernel.factor_residual,
            }))
        }
        Command::Wp => {
            let h = config.h.as_ref().unwrap();
            let deg = cell.deg.unwrap();
            let rank = cell.rank.unwrap();
            let search = SearchOptions {
                seed: config.seed,
                ..SearchOptions::default()
            };
            let als = AlsOptions {
                seed: config.seed,
                ..AlsOptions::default()
            };
            let br = wp_bracket(&config.space, h, deg, rank, deg, &search, &als)?;
            Ok(CellOutcome::Wp(WpRecord {
                h: poly_to_terms(h),
                lower: br.lower.value,
                lower_witness: poly_to_terms(&br.lower.witness),
                upper: br.upper.cost,
                pairs: br
                    .upper
                    .fs
                    .iter()
                    .zip(&br.upper.gs)
                    .map(|(f, g)| (poly_to_terms(f), poly_to_terms(g)))
                    .collect(),
                h1_oracle: br.h1_oracle,
                iters: br.upper.iterations,
            }))
        }
        Command::Cnp => {
            let trunc = cell.trunc.unwrap();
            let check = cnp_coefficient_check(&config.space, trunc as usize)?;
            let min_coeff = check.coeffs.iter().copied().fold(f64::INFINITY, f64::min);
            Ok(CellOutcome::Cnp(CnpRecord {
                trunc,
                pass: check.pass,
                min_coeff,
            }))
        }
        Command::MultNorm => {
            let h = config.h.as_ref().unwrap();
            let trunc = cell.trunc.unwrap();
            let m = mult_matrix(&config.space, h, trunc)?;
            let est = operator_norm(&m, 1e-12, 200_000)?;
            Ok(CellOutcome::MultNorm(MultNormRecord {
                trunc,
                norm: est.value,
                residual: est.residual,
                iterations: est.iterations,
            }))
        }
        Command::DumpMatrix => {
            let h = config.h.as_ref().unwrap();
            let trunc = cell.trunc.unwrap();
            let m = mult_matrix(&config.space, h, trunc)?;
            Ok(CellOutcome::Matrix(op_matrix_to_json(&m)))
        }
    }
}

/// Expands the grid and runs every cell; failures become per-cell error
/// records. Cells run on the rayon pool; results keep grid order.
pub fn execute(config: &ExperimentConfig) -> Report {
    let cells = config.cells();
    let records: Vec<CellRecord> = cells
        .par_iter()
        .map(|cell| {
            let start = std::time::Instant::now();
            let (outcome, failure) = match run_cell(config, cell) {
                Ok(o) => (o, None),
                Err(e) => {
                    let failure = match e {
                        Error::BracketInversion { .. } => CellFailure::BracketInversion,
                        _ => CellFailure::Other,
                    };
                    (
                        CellOutcome::Error {
                            error: e.to_string(),
                        },
                        Some(failure),
                    )
                }
            };
            CellRecord {
                params: cell.clone(),
                outcome,
                wall_seconds: start.elapsed().as_secs_f64(),
                failure,
            }
        })
        .collect();
    Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: ConfigEcho {
            command: config.command.name().to_string(),
            space: space_to_json(&config.space),
            ns: config.ns.clone(),
            truncs: config.truncs.clone(),
            degs: config.degs.clone(),
            ranks: config.ranks.clone(),
            h: config.h.as_ref().map(poly_to_terms),
            tol: config.tol,
            seed: config.seed,
        },
        cells: records,
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn csv_row(fields: &[String]) -> String {
    fields
        .iter()
        .map(|f| csv_escape(f))
        .collect::<Vec<_>>()
        .join(",")
}

/// Renders a report as CSV (per-command schema) or JSON (stable key order).
/// Byte-identical for identical reports.
pub fn render(report: &Report, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => {
            let mut text = serde_json::to_string_pretty(report)?;
            text.push('\n');
            Ok(text)
        }
        OutputFormat::Csv => {
            let header: &[&str] = match report.config.command.as_str() {
                "gap" => &[
                    "n",
                    "N",
                    "row_norm",
                    "col_norm",
                    "ratio",
                    "expected_ratio",
                    "certificate_ok",
                ],
                "hankel-check" => &[
                    "trial",
                    "intertwining_residual",
                    "second_singular_value",
                    "factor_residual",
                ],
                "wp" => &["D", "r", "lower", "upper", "h1_oracle", "iters"],
                "cnp" => &["N", "pass", "min_coeff"],
                "mult-norm" => &["N", "norm", "residual", "iterations"],
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "no CSV schema for command '{other}'"
                    )))
                }
            };
            let mut lines = vec![csv_row(
                &header.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            )];
            for cell in &report.cells {
                let row = match &cell.outcome {
                    CellOutcome::Gap(g) => vec![
                        g.n.to_string(),
                        g.trunc.to_string(),
                        g.row_norm.to_string(),
                        g.col_norm.to_string(),
                        g.ratio.to_string(),
                        g.expected_ratio.to_string(),
                        g.certificate_ok.to_string(),
                    ],
                    CellOutcome::Hankel(h) => vec![
                        h.trial.to_string(),
                        h.intertwining_residual.to_string(),
                        h.second_singular_value.to_string(),
                        h.factor_residual.to_string(),
                    ],
                    CellOutcome::Wp(w) => vec![
                        cell.params.deg.map(|v| v.to_string()).unwrap_or_default(),
                        cell.params.rank.map(|v| v.to_string()).unwrap_or_default(),
                        w.lower.to_string(),
                        w.upper.to_string(),
                        w.h1_oracle.map(|v| v.to_string()).unwrap_or_default(),
                        w.iters.to_string(),
                    ],
                    CellOutcome::Cnp(c) => vec![
                        c.trunc.to_string(),
                        c.pass.to_string(),
                        c.min_coeff.to_string(),
                    ],
                    CellOutcome::MultNorm(m) => vec![
                        m.trunc.to_string(),
                        m.norm.to_string(),
                        m.residual.to_string(),
                        m.iterations.to_string(),
                    ],
                    CellOutcome::Matrix(_) => {
                        return Err(Error::InvalidArgument(
                            "no CSV schema for command 'dump-matrix'".into(),
                        ))
                    }
                    CellOutcome::Error { error } => {
                        // keep the schema width; the message lands in the
                        // final column
                        let mut row = vec![String::new(); header.len()];
                        if let Some(last) = row.last_mut() {
                            *last = format!("error: {error}");
                        }
                        row
                    }
                };
                lines.push(csv_row(&row));
            }
            let mut text = lines.join("\n");
            text.push('\n');
            Ok(text)
        }
    }
}
