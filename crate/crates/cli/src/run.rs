//! Computing the requested outputs and writing them to disk.

use std::fs;
use std::path::{Path, PathBuf};

use abflux::extension::MatrixEntries;
use abflux::scattering::{classify, s_matrix, Classification};
use abflux::spectrum::{find_negative_eigenvalues, BoundState};
use abflux::verify::{run_all, OracleReport};
use abflux::waveop::wave_symbol;
use abflux::Mat2;
use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Format, Output, RawConfig, RunConfig};

/// Version tag of every JSON artifact.
pub const SCHEMA: &str = "abflux/1";
/// Largest unitarity defect tolerated in a scattering sweep.
pub const UNITARITY_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmatrixRow {
    pub kappa: f64,
    pub s: MatrixEntries,
    pub unitarity_defect: f64,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolRow {
    pub x: f64,
    pub kappa: f64,
    pub w: MatrixEntries,
}

/// Envelope of a JSON artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Artifact<T> {
    pub schema: String,
    pub output: Output,
    pub config: RawConfig,
    pub data: T,
}

pub fn spectrum(cfg: &RunConfig) -> Result<Vec<BoundState>> {
    Ok(find_negative_eigenvalues(&cfg.extension.pair(), cfg.alpha)?)
}

pub fn smatrix(cfg: &RunConfig) -> Result<Vec<SmatrixRow>> {
    let pair = cfg.extension.pair();
    cfg.kappa
        .nodes()
        .par_iter()
        .map(|&kappa| {
            let s = s_matrix(&pair, cfg.alpha, kappa).with_context(|| format!("scattering matrix at kappa = {kappa}"))?;
            Ok(SmatrixRow { kappa, s: (&s.s).into(), unitarity_defect: s.unitarity_defect(), saturated: s.saturated })
        })
        .collect()
}

pub fn classification(cfg: &RunConfig) -> Classification {
    classify(&cfg.extension.pair(), cfg.alpha)
}

pub fn wavesymbol(cfg: &RunConfig) -> Result<Vec<SymbolRow>> {
    let pair = cfg.extension.pair();
    cfg.x
        .nodes()
        .par_iter()
        .map(|&x| {
            let w = wave_symbol(&pair, cfg.alpha, x, cfg.wave_kappa).with_context(|| format!("wave symbol at x = {x}"))?;
            Ok(SymbolRow { x, kappa: cfg.wave_kappa, w: (&w).into() })
        })
        .collect()
}

pub fn verify(cfg: &RunConfig) -> Vec<OracleReport> {
    run_all(cfg.alpha)
}

/// Files written and the verification failures encountered.
#[derive(Debug, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub failures: Vec<String>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn number(v: f64) -> String {
    format!("{v:.16e}")
}

fn matrix_fields(m: &MatrixEntries) -> Vec<String> {
    let m: Mat2 = (*m).into();
    let mut out = Vec::with_capacity(8);
    for j in 0..4 {
        let z = m[(j / 2, j % 2)];
        out.push(number(z.re));
        out.push(number(z.im));
    }
    out
}

fn matrix_header(prefix: &str) -> Vec<String> {
    ["11", "12", "21", "22"].iter().flat_map(|ij| [format!("{prefix}{ij}_re"), format!("{prefix}{ij}_im")]).collect()
}

fn write_csv(path: &Path, header: Vec<String>, rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(&header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, cfg: &RunConfig, output: Output, data: T) -> Result<()> {
    let artifact = Artifact { schema: SCHEMA.to_string(), output, config: cfg.to_raw(), data };
    let text = serde_json::to_string_pretty(&artifact)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// Compute one output and write it under `dir`. Classification and oracle
/// reports are always JSON.
pub fn write_output(cfg: &RunConfig, output: Output, dir: &Path, report: &mut RunReport) -> Result<()> {
    let format = match output {
        Output::Classify | Output::Verify => Format::Json,
        _ => cfg.format,
    };
    let extension = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let path = dir.join(format!("{}.{extension}", output.name()));
    match output {
        Output::Spectrum => {
            let states = spectrum(cfg)?;
            if format == Format::Csv {
                let rows = states
                    .iter()
                    .map(|s| vec![number(s.z), s.multiplicity.to_string(), s.proximity_warning.to_string()])
                    .collect();
                write_csv(&path, vec!["z".into(), "multiplicity".into(), "proximity_warning".into()], rows)?;
            } else {
                write_json(&path, cfg, output, states)?;
            }
        }
        Output::Smatrix => {
            let rows = smatrix(cfg)?;
            let worst = rows.iter().map(|r| r.unitarity_defect).fold(0.0, f64::max);
            if worst > UNITARITY_LIMIT {
                report.failures.push(format!("unitarity defect {worst:e} exceeds {UNITARITY_LIMIT:e}"));
            }
            if format == Format::Csv {
                let mut header = vec!["kappa".to_string()];
                header.extend(matrix_header("s"));
                header.push("unitarity_defect".into());
                let rows = rows
                    .iter()
                    .map(|r| {
                        let mut fields = vec![number(r.kappa)];
                        fields.extend(matrix_fields(&r.s));
                        fields.push(number(r.unitarity_defect));
                        fields
                    })
                    .collect();
                write_csv(&path, header, rows)?;
            } else {
                write_json(&path, cfg, output, rows)?;
            }
        }
        Output::Classify => write_json(&path, cfg, output, classification(cfg))?,
        Output::Wavesymbol => {
            let rows = wavesymbol(cfg)?;
            if format == Format::Csv {
                let mut header = vec!["x".to_string()];
                header.extend(matrix_header("w"));
                let rows = rows
                    .iter()
                    .map(|r| {
                        let mut fields = vec![number(r.x)];
                        fields.extend(matrix_fields(&r.w));
                        fields
                    })
                    .collect();
                write_csv(&path, header, rows)?;
            } else {
                write_json(&path, cfg, output, rows)?;
            }
        }
        Output::Verify => {
            let reports = verify(cfg);
            for r in reports.iter().filter(|r| !r.passed) {
                report.failures.push(format!("oracle {} failed ({})", r.name, r.regularization));
            }
            write_json(&path, cfg, output, reports)?;
        }
    }
    report.files.push(path);
    Ok(())
}

/// Write every output requested by `cfg` into `dir`.
pub fn run(cfg: &RunConfig, dir: &Path) -> Result<RunReport> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut report = RunReport::default();
    for &output in &cfg.outputs {
        write_output(cfg, output, dir, &mut report)?;
    }
    Ok(report)
}
