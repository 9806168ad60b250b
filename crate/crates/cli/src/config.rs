//! TOML run configuration: raw (all-optional) layer, merging with command-line
//! flags, and validation into a [`RunConfig`].

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use hopf_lab::predprey::{galerkin_system, PredPreyParams};
use hopf_lab::system::{Monomial, PolynomialField};
use hopf_lab::{builtin, builtin_labels, System, Tolerances};
use serde::{Deserialize, Serialize};

/// A configuration problem, anchored to a line of the source document when
/// it came from one.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Analyze,
    Predprey,
    Sweep,
    Cycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionChoice {
    Auto,
    Forward,
    Backward,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub command: Option<CommandKind>,
    pub seed: Option<u64>,
    pub system: Option<RawSystem>,
    pub analyze: Option<RawAnalyze>,
    pub sweep: Option<RawSweep>,
    pub cycle: Option<RawCycle>,
    pub tolerances: Option<RawTolerances>,
    pub output: Option<RawOutput>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSystem {
    pub label: Option<String>,
    pub polynomial: Option<RawPolynomial>,
    pub predprey: Option<RawPredPrey>,
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawTerm {
    pub component: usize,
    pub exponents: Vec<u32>,
    /// Coefficient as a polynomial in `λ`, constant term first.
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawPolynomial {
    pub name: Option<String>,
    pub dim: usize,
    pub window: Option<[f64; 2]>,
    pub terms: Vec<RawTerm>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPredPrey {
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub k: Option<f64>,
    pub theta: Option<f64>,
    pub ell: Option<f64>,
    pub n: Option<usize>,
    pub modes: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAnalyze {
    pub window: Option<[f64; 2]>,
    pub grid_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    /// `[lo, hi, count]`.
    pub grid: Option<(f64, f64, usize)>,
    pub window: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCycle {
    pub lambda: Option<f64>,
    pub amplitude: Option<f64>,
    pub direction: Option<DirectionChoice>,
    pub window: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTolerances {
    pub tau_trans: Option<f64>,
    pub tau_deg: Option<f64>,
    pub tau_coeff: Option<f64>,
    pub f7_margin: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    pub path: Option<PathBuf>,
}

/// Predator–prey source with defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredPreySource {
    pub params: PredPreyParams<f64>,
    pub n: usize,
    pub modes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemSource {
    Registry(String),
    Polynomial(RawPolynomial),
    Predprey(PredPreySource),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub seed: u64,
    pub system: SystemSource,
    /// Locate window; `None` means the system's declared window.
    pub window: Option<(f64, f64)>,
    pub grid_points: usize,
    pub sweep_grid: Option<(f64, f64, usize)>,
    pub cycle_lambda: Option<f64>,
    pub cycle_amplitude: Option<f64>,
    pub direction: DirectionChoice,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

/// Finds the line holding `key` inside table `table` (dotted path, `""` for
/// the root). Best effort: dotted keys and inline tables are not tracked.
fn locate(text: &str, table: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    let mut header_line = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            current = line.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            if current == table {
                header_line = Some(i + 1);
            }
            continue;
        }
        if current == table {
            if let Some(rest) = line.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return Some(i + 1);
                }
            }
        }
    }
    header_line
}

struct Anchor<'a> {
    text: Option<&'a str>,
}

impl Anchor<'_> {
    fn err(&self, table: &str, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            line: self.text.and_then(|t| locate(t, table, key)),
            message: message.into(),
        }
    }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses the TOML document into the raw layer (syntax and unknown keys).
pub fn parse_raw(text: &str) -> Result<RawConfig, ConfigError> {
    toml::from_str::<RawConfig>(text).map_err(|e| ConfigError {
        line: e.span().map(|s| line_of_offset(text, s.start)),
        message: e.message().trim().to_string(),
    })
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw = parse_raw(text)?;
    validate(&raw, Some(text))
}

fn positive(a: &Anchor<'_>, table: &str, key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(a.err(table, key, format!("{table}.{key} must be positive (got {v})")))
    }
}

fn window(a: &Anchor<'_>, table: &str, w: [f64; 2]) -> Result<(f64, f64), ConfigError> {
    if w[0].is_finite() && w[1].is_finite() && w[0] < w[1] {
        Ok((w[0], w[1]))
    } else {
        Err(a.err(table, "window", format!("{table}.window must satisfy lo < hi (got {w:?})")))
    }
}

fn predprey_source(a: &Anchor<'_>, raw: &RawPredPrey) -> Result<PredPreySource, ConfigError> {
    const T: &str = "system.predprey";
    let need = |key: &str, v: Option<f64>| {
        v.ok_or_else(|| a.err(T, key, format!("{T}.{key} is required")))
            .and_then(|v| positive(a, T, key, v))
    };
    let d1 = need("d1", raw.d1)?;
    let d2 = need("d2", raw.d2)?;
    let k = need("k", raw.k)?;
    let theta = need("theta", raw.theta)?;
    if k <= 1.0 {
        return Err(a.err(T, "k", format!("{T}.k must exceed 1 (got {k})")));
    }
    let n = raw.n.unwrap_or(1);
    if n == 0 {
        return Err(a.err(T, "n", format!("{T}.n must be at least 1")));
    }
    let modes = raw.modes.unwrap_or(2 * n);
    if modes < n {
        return Err(a.err(T, "modes", format!("{T}.modes must be at least n = {n}")));
    }
    let base = PredPreyParams::new(d1, d2, k, theta).map_err(|e| a.err(T, "d1", e.to_string()))?;
    let ell = match raw.ell {
        Some(l) => positive(a, T, "ell", l)?,
        None => base.critical_length(n),
    };
    Ok(PredPreySource {
        params: base.with_length(ell),
        n,
        modes,
    })
}

fn polynomial_source(a: &Anchor<'_>, raw: &RawPolynomial) -> Result<RawPolynomial, ConfigError> {
    const T: &str = "system.polynomial";
    if let Some(w) = raw.window {
        window(a, T, w)?;
    }
    if raw.terms.is_empty() {
        return Err(a.err(T, "terms", "system.polynomial needs at least one term"));
    }
    build_polynomial(raw).map_err(|m| a.err(T, "terms", m))?;
    Ok(raw.clone())
}

fn build_polynomial(raw: &RawPolynomial) -> Result<System, String> {
    let terms = raw
        .terms
        .iter()
        .map(|t| Monomial {
            component: t.component,
            exponents: t.exponents.clone(),
            coeffs: t.coeffs.clone(),
        })
        .collect();
    let field = PolynomialField::new(raw.dim, terms).map_err(|e| e.to_string())?;
    let w = raw.window.unwrap_or([-1.0, 1.0]);
    let name = raw.name.clone().unwrap_or_else(|| "inline".into());
    System::new(name, Arc::new(field), (w[0], w[1])).map_err(|e| e.to_string())
}

/// Validates a (possibly merged) raw configuration. `text` is the source
/// document used to anchor messages, if any.
pub fn validate(raw: &RawConfig, text: Option<&str>) -> Result<RunConfig, ConfigError> {
    let a = Anchor { text };
    let sys = raw.system.clone().unwrap_or_default();
    let sources = [sys.label.is_some(), sys.polynomial.is_some(), sys.predprey.is_some()]
        .iter()
        .filter(|b| **b)
        .count();
    if sources != 1 {
        return Err(a.err(
            "system",
            "label",
            format!(
                "exactly one system source (label, polynomial or predprey) is required; found {sources}"
            ),
        ));
    }
    let system = if let Some(label) = &sys.label {
        if !builtin_labels().contains(&label.as_str()) {
            return Err(a.err(
                "system",
                "label",
                format!("unknown system '{label}'; known: {}", builtin_labels().join(", ")),
            ));
        }
        SystemSource::Registry(label.clone())
    } else if let Some(p) = &sys.polynomial {
        SystemSource::Polynomial(polynomial_source(&a, p)?)
    } else {
        SystemSource::Predprey(predprey_source(&a, sys.predprey.as_ref().unwrap())?)
    };

    let an = raw.analyze.clone().unwrap_or_default();
    let sw = raw.sweep.clone().unwrap_or_default();
    let cy = raw.cycle.clone().unwrap_or_default();
    // the first explicitly given window wins: command section, then analyze
    let window = match (sw.window.or(cy.window), an.window) {
        (Some(w), _) => Some(window(&a, if sw.window.is_some() { "sweep" } else { "cycle" }, w)?),
        (None, Some(w)) => Some(window(&a, "analyze", w)?),
        (None, None) => match &system {
            SystemSource::Predprey(p) => Some(predprey_window(&p.params)),
            _ => None,
        },
    };
    let grid_points = an.grid_points.unwrap_or(200);
    if grid_points < 3 {
        return Err(a.err("analyze", "grid_points", "analyze.grid_points must be at least 3"));
    }
    if let Some((lo, hi, count)) = sw.grid {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) || count == 0 || (count > 1 && lo == hi) {
            return Err(a.err("sweep", "grid", "sweep.grid must be [lo, hi, count] with lo < hi and count ≥ 1"));
        }
    }
    if let Some(l) = cy.lambda {
        if !l.is_finite() {
            return Err(a.err("cycle", "lambda", "cycle.lambda must be finite"));
        }
    }
    if let Some(amp) = cy.amplitude {
        positive(&a, "cycle", "amplitude", amp)?;
    }

    let mut tolerances = Tolerances::default();
    if let Some(t) = &raw.tolerances {
        let set = |slot: &mut f64, key: &str, v: Option<f64>| -> Result<(), ConfigError> {
            if let Some(v) = v {
                *slot = positive(&a, "tolerances", key, v)?;
            }
            Ok(())
        };
        set(&mut tolerances.tau_trans, "tau_trans", t.tau_trans)?;
        set(&mut tolerances.tau_deg, "tau_deg", t.tau_deg)?;
        set(&mut tolerances.tau_coeff, "tau_coeff", t.tau_coeff)?;
        set(&mut tolerances.f7_margin, "f7_margin", t.f7_margin)?;
    }
    tolerances
        .validate()
        .map_err(|e| a.err("tolerances", "tau_deg", e.to_string()))?;

    Ok(RunConfig {
        command: raw.command,
        seed: raw.seed.unwrap_or(0),
        system,
        window,
        grid_points,
        sweep_grid: sw.grid,
        cycle_lambda: cy.lambda,
        cycle_amplitude: cy.amplitude,
        direction: cy.direction.unwrap_or(DirectionChoice::Auto),
        tolerances,
        output: raw.output.as_ref().and_then(|o| o.path.clone()),
    })
}

/// `[λ* − 0.5, λ* + 0.5]` clipped to `(0, λ₀ᴴ)`.
pub fn predprey_window(p: &PredPreyParams<f64>) -> (f64, f64) {
    let ls = p.lambda_star();
    let lh = p.lambda0_h();
    let pad = 1e-6 * lh;
    ((ls - 0.5).max(pad), (ls + 0.5).min(lh - pad))
}

impl RunConfig {
    /// Instantiates the configured system.
    pub fn build_system(&self) -> Result<System, ConfigError> {
        let fail = |m: String| ConfigError { line: None, message: m };
        match &self.system {
            SystemSource::Registry(label) => builtin::<f64>(label)
                .ok_or_else(|| fail(format!("unknown system '{label}'")))?
                .map_err(|e| fail(e.to_string())),
            SystemSource::Polynomial(p) => build_polynomial(p).map_err(fail),
            SystemSource::Predprey(p) => galerkin_system(&p.params, p.modes).map_err(|e| fail(e.to_string())),
        }
    }

    pub fn system_label(&self) -> String {
        match &self.system {
            SystemSource::Registry(l) => l.clone(),
            SystemSource::Polynomial(p) => p.name.clone().unwrap_or_else(|| "inline".into()),
            SystemSource::Predprey(_) => "predprey-galerkin".into(),
        }
    }
}
