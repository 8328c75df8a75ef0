//! Run configuration: a flat key/value document (TOML, or the JSON echo
//! written into every JSON artifact).

use std::fmt;

use abflux::extension::{ExtensionPair, UnitaryParam};
use abflux::grid::{points, Spacing};
use abflux::linalg::c64;
use abflux::{Flux, Mat2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A configuration problem, located by field and (when known) line.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Spectrum,
    Smatrix,
    Classify,
    Wavesymbol,
    Verify,
}

impl Output {
    pub fn name(self) -> &'static str {
        match self {
            Output::Spectrum => "spectrum",
            Output::Smatrix => "smatrix",
            Output::Classify => "classify",
            Output::Wavesymbol => "wavesymbol",
            Output::Verify => "verify",
        }
    }
}

/// The flat document as written. Complex entries are `[re, im]` pairs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u11: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u12: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u21: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u22: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c11: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c12: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c21: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c22: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d11: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d12: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d21: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d22: Option<[f64; 2]>,
    pub kappa_min: Option<f64>,
    pub kappa_max: Option<f64>,
    pub kappa_count: Option<usize>,
    pub kappa_spacing: Option<Spacing>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub x_count: Option<usize>,
    pub x_spacing: Option<Spacing>,
    /// Momentum at which the wave symbol is tabulated.
    pub wave_kappa: Option<f64>,
    pub outputs: Option<Vec<Output>>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn nodes(&self) -> Vec<f64> {
        points(self.min, self.max, self.count, self.spacing).expect("grid validated at parse time")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Extension {
    Unitary(UnitaryParam),
    Pair(ExtensionPair),
}

impl Extension {
    pub fn pair(&self) -> ExtensionPair {
        match self {
            Extension::Unitary(u) => u.to_pair(),
            Extension::Pair(p) => *p,
        }
    }
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: Flux,
    pub extension: Extension,
    pub kappa: GridSpec,
    pub x: GridSpec,
    pub wave_kappa: f64,
    pub outputs: Vec<Output>,
    pub format: Format,
}

pub const DEFAULT_KAPPA: GridSpec = GridSpec { min: 1e-3, max: 1e3, count: 61, spacing: Spacing::Log };
pub const DEFAULT_X: GridSpec = GridSpec { min: -100.0, max: 100.0, count: 201, spacing: Spacing::Tanh };
pub const DEFAULT_OUTPUTS: [Output; 3] = [Output::Spectrum, Output::Smatrix, Output::Classify];

/// Line of the first `key = ...` assignment in `text`, 1-based.
fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('=') || rest.trim_start().starts_with("\":"))
            || l.strip_prefix(&format!("\"{key}\"")).is_some_and(|rest| rest.trim_start().starts_with(':'))
    })
    .map(|j| j + 1)
}

struct Locator<'a> {
    text: &'a str,
}

impl Locator<'_> {
    fn error(&self, field: &str, message: impl Into<String>) -> ConfigError {
        ConfigError { line: line_of(self.text, field), field: field.to_string(), message: message.into() }
    }
}

/// Parse and validate a TOML config.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        ConfigError { line, field: "document".into(), message: e.message().to_string() }
    })?;
    validate(&raw, &Locator { text })
}

/// Parse the JSON config echo of an artifact.
pub fn parse_config_json(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text)
        .map_err(|e| ConfigError { line: Some(e.line()), field: "document".into(), message: e.to_string() })?;
    validate(&raw, &Locator { text })
}

fn matrix(entries: [Option<[f64; 2]>; 4]) -> Option<Mat2> {
    let e: Vec<[f64; 2]> = entries.into_iter().collect::<Option<Vec<_>>>()?;
    Some(Mat2::new(c64(e[0][0], e[0][1]), c64(e[1][0], e[1][1]), c64(e[2][0], e[2][1]), c64(e[3][0], e[3][1])))
}

type GridFields = (Option<f64>, Option<f64>, Option<usize>, Option<Spacing>);

fn grid(loc: &Locator, prefix: &str, given: GridFields, default: GridSpec, allowed: &[Spacing]) -> Result<GridSpec, ConfigError> {
    let (min, max, count, spacing) = given;
    let spec = GridSpec {
        min: min.unwrap_or(default.min),
        max: max.unwrap_or(default.max),
        count: count.unwrap_or(default.count),
        spacing: spacing.unwrap_or(default.spacing),
    };
    if !allowed.contains(&spec.spacing) {
        return Err(loc.error(&format!("{prefix}_spacing"), format!("{:?} spacing is not available here", spec.spacing)));
    }
    if spec.count == 0 {
        return Err(loc.error(&format!("{prefix}_count"), "grid must have at least one point"));
    }
    if !(spec.min.is_finite() && spec.max.is_finite()) || spec.min > spec.max {
        return Err(loc.error(&format!("{prefix}_min"), format!("invalid range [{}, {}]", spec.min, spec.max)));
    }
    points(spec.min, spec.max, spec.count, spec.spacing).map_err(|e| loc.error(&format!("{prefix}_min"), e.to_string()))?;
    Ok(spec)
}

fn validate(raw: &RawConfig, loc: &Locator) -> Result<RunConfig, ConfigError> {
    let alpha = raw.alpha.ok_or_else(|| loc.error("alpha", "missing flux value"))?;
    let alpha = Flux::new(alpha).map_err(|e| loc.error("alpha", e.to_string()))?;

    let u = [raw.u11, raw.u12, raw.u21, raw.u22];
    let c = [raw.c11, raw.c12, raw.c21, raw.c22];
    let d = [raw.d11, raw.d12, raw.d21, raw.d22];
    let given = |e: &[Option<[f64; 2]>; 4]| e.iter().any(Option::is_some);
    let extension = match (given(&u), given(&c) || given(&d)) {
        (true, true) => return Err(loc.error("u11", "give either u11..u22 or c11..d22, not both")),
        (false, false) => return Err(loc.error("u11", "missing extension: give u11..u22 or c11..c22 and d11..d22")),
        (true, false) => {
            let m = matrix(u).ok_or_else(|| loc.error("u11", "all four entries u11, u12, u21, u22 are required"))?;
            Extension::Unitary(UnitaryParam::new(m).map_err(|e| loc.error("u11", e.to_string()))?)
        }
        (false, true) => {
            let cm = matrix(c).ok_or_else(|| loc.error("c11", "all four entries c11..c22 are required"))?;
            let dm = matrix(d).ok_or_else(|| loc.error("d11", "all four entries d11..d22 are required"))?;
            Extension::Pair(ExtensionPair::new(cm, dm).map_err(|e| loc.error("c11", e.to_string()))?)
        }
    };

    let kappa_fields = (raw.kappa_min, raw.kappa_max, raw.kappa_count, raw.kappa_spacing);
    let kappa = grid(loc, "kappa", kappa_fields, DEFAULT_KAPPA, &[Spacing::Log, Spacing::Linear])?;
    if kappa.min <= 0.0 {
        return Err(loc.error("kappa_min", "momenta must be positive"));
    }
    let x_fields = (raw.x_min, raw.x_max, raw.x_count, raw.x_spacing);
    let x = grid(loc, "x", x_fields, DEFAULT_X, &[Spacing::Linear, Spacing::Tanh])?;
    if x.min < -abflux::waveop::SYMBOL_X_LIMIT || x.max > abflux::waveop::SYMBOL_X_LIMIT {
        return Err(loc.error("x_min", format!("symbols are evaluated for |x| <= {:e}", abflux::waveop::SYMBOL_X_LIMIT)));
    }
    let wave_kappa = raw.wave_kappa.unwrap_or(1.0);
    if !(wave_kappa > 0.0 && wave_kappa.is_finite()) {
        return Err(loc.error("wave_kappa", "must be positive"));
    }
    let mut outputs = raw.outputs.clone().unwrap_or_else(|| DEFAULT_OUTPUTS.to_vec());
    outputs.sort();
    outputs.dedup();
    if outputs.is_empty() {
        return Err(loc.error("outputs", "no outputs requested"));
    }
    Ok(RunConfig { alpha, extension, kappa, x, wave_kappa, outputs, format: raw.format.unwrap_or(Format::Csv) })
}

impl RunConfig {
    /// The flat document that parses back to this configuration.
    pub fn to_raw(&self) -> RawConfig {
        let pair = |m: &Mat2, j: usize| Some([m[(j / 2, j % 2)].re, m[(j / 2, j % 2)].im]);
        let mut raw = RawConfig {
            alpha: Some(self.alpha.value()),
            kappa_min: Some(self.kappa.min),
            kappa_max: Some(self.kappa.max),
            kappa_count: Some(self.kappa.count),
            kappa_spacing: Some(self.kappa.spacing),
            x_min: Some(self.x.min),
            x_max: Some(self.x.max),
            x_count: Some(self.x.count),
            x_spacing: Some(self.x.spacing),
            wave_kappa: Some(self.wave_kappa),
            outputs: Some(self.outputs.clone()),
            format: Some(self.format),
            ..RawConfig::default()
        };
        match &self.extension {
            Extension::Unitary(u) => {
                let m = u.matrix();
                (raw.u11, raw.u12, raw.u21, raw.u22) = (pair(m, 0), pair(m, 1), pair(m, 2), pair(m, 3));
            }
            Extension::Pair(p) => {
                let (c, d) = (p.c(), p.d());
                (raw.c11, raw.c12, raw.c21, raw.c22) = (pair(c, 0), pair(c, 1), pair(c, 2), pair(c, 3));
                (raw.d11, raw.d12, raw.d21, raw.d22) = (pair(d, 0), pair(d, 1), pair(d, 2), pair(d, 3));
            }
        }
        raw
    }
}
