//! JSON-configured parameter sweeps that put Monte Carlo estimates next to
//! every analytical bound, one CSV row per sweep point.

use std::io::Write;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::{all_bounds, AnalyticsError, BoundSet, QuadratureSpec};
use crate::model::{BlockageModelParams, Condition, GrainDistribution, LinkGeometry};
use crate::montecarlo::{estimate_connectivity, paired_kappa_comparison_with, EstimateError, MCEstimate};
use crate::rng;

/// Header of the sweep CSV, in column order.
pub const CSV_COLUMNS: [&str; 14] = [
    "sweep_var",
    "sweep_value",
    "mc_mean",
    "mc_stderr",
    "mc_ci_low",
    "mc_ci_high",
    "n_effective",
    "bound_thm1",
    "bound_cor1_plos",
    "bound_src_outdoor",
    "bound_both_outdoor",
    "kappa_star",
    "bound_cor3",
    "seed",
];

/// Header of the bounds-only table.
pub const BOUND_COLUMNS: [&str; 8] = [
    "sweep_var",
    "sweep_value",
    "bound_thm1",
    "bound_cor1_plos",
    "bound_src_outdoor",
    "bound_both_outdoor",
    "kappa_star",
    "bound_cor3",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(v) => v.clone(),
        }
    }

    pub fn is_list(&self) -> bool {
        matches!(self, OneOrMany::Many(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub lambda_o: OneOrMany,
    pub width_dist: GrainDistribution,
    pub length_dist: GrainDistribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    pub d: OneOrMany,
    pub kappa: OneOrMany,
}

/// How sweep points share random numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    /// Same trial seeds at every point; window sweeps reuse one field per trial.
    #[default]
    Common,
    /// Point `k` uses the derived seed `mix(seed, k)`.
    Independent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    pub n: u64,
    pub seed: u64,
    #[serde(default)]
    pub condition: Condition,
    #[serde(default)]
    pub coupling: Coupling,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub link: LinkConfig,
    pub estimator: EstimatorConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
}

/// A configuration problem, located by line (when known) and field path.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}{field}: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    LambdaO,
    D,
    Kappa,
}

impl SweepVar {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVar::LambdaO => "lambda_o",
            SweepVar::D => "d",
            SweepVar::Kappa => "kappa",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "lambda_o" => Some(SweepVar::LambdaO),
            "d" => Some(SweepVar::D),
            "kappa" => Some(SweepVar::Kappa),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub params: BlockageModelParams,
    pub link: LinkGeometry,
}

/// Line of the JSON text holding the key at `path` (dot separated, list
/// indices ignored), found by scanning for the keys in order.
fn locate(text: &str, path: &str) -> Option<usize> {
    let mut at = 0;
    let mut found = false;
    for key in path.split('.').map(|k| k.split('[').next().unwrap_or(k)).filter(|k| !k.is_empty()) {
        let needle = format!("\"{key}\"");
        at += text[at..].find(&needle)?;
        found = true;
    }
    found.then(|| text[..at].matches('\n').count() + 1)
}

impl ExperimentConfig {
    /// Parses and validates a JSON configuration.
    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            let inner = e.into_inner();
            let line = inner.line();
            let line = locate(text, &field).or((line > 0).then_some(line));
            ConfigError { line, field, message: inner.to_string() }
        })?;
        config.validate().map_err(|mut e| {
            e.line = locate(text, &e.field);
            e
        })?;
        Ok(config)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |field: &str, message: String| ConfigError { line: None, field: field.to_string(), message };
        let axes =
            [("model.lambda_o", &self.model.lambda_o), ("link.d", &self.link.d), ("link.kappa", &self.link.kappa)];
        let lists: Vec<&str> = axes.iter().filter(|(_, v)| v.is_list()).map(|(n, _)| *n).collect();
        if lists.len() > 1 {
            return Err(err(
                lists[1],
                format!("only one of lambda_o, d, kappa may be a sweep list (found {})", lists.join(", ")),
            ));
        }
        for (name, axis) in axes {
            let values = axis.values();
            if values.is_empty() {
                return Err(err(name, "sweep list must not be empty".into()));
            }
            for (i, v) in values.iter().enumerate() {
                let ok = match name {
                    "link.d" => v.is_finite() && *v > 0.0,
                    _ => v.is_finite() && *v >= 0.0,
                };
                if !ok {
                    let need = if name == "link.d" { "finite and positive" } else { "finite and non-negative" };
                    let at = if axis.is_list() { format!("{name}[{i}]") } else { name.to_string() };
                    return Err(err(&at, format!("value {v} must be {need}")));
                }
            }
        }
        if self.estimator.n == 0 {
            return Err(err("estimator.n", "must be at least 1".into()));
        }
        if !(self.quadrature.abs_tol.is_finite() && self.quadrature.abs_tol > 0.0) {
            return Err(err("quadrature.abs_tol", "must be finite and positive".into()));
        }
        if self.quadrature.max_refinements == 0 {
            return Err(err("quadrature.max_refinements", "must be at least 1".into()));
        }
        Ok(())
    }

    /// The swept variable; a config without lists is a one-point window sweep.
    pub fn sweep_var(&self) -> SweepVar {
        if self.model.lambda_o.is_list() {
            SweepVar::LambdaO
        } else if self.link.d.is_list() {
            SweepVar::D
        } else {
            SweepVar::Kappa
        }
    }

    pub fn is_single_point(&self) -> bool {
        [&self.model.lambda_o, &self.link.d, &self.link.kappa].iter().all(|a| a.values().len() == 1)
    }

    pub fn points(&self) -> Result<Vec<SweepPoint>, ConfigError> {
        let var = self.sweep_var();
        let first = |a: &OneOrMany| a.values()[0];
        let (lambda, d, kappa) = (first(&self.model.lambda_o), first(&self.link.d), first(&self.link.kappa));
        let swept = match var {
            SweepVar::LambdaO => self.model.lambda_o.values(),
            SweepVar::D => self.link.d.values(),
            SweepVar::Kappa => self.link.kappa.values(),
        };
        swept
            .into_iter()
            .map(|value| {
                let (lambda, d, kappa) = match var {
                    SweepVar::LambdaO => (value, d, kappa),
                    SweepVar::D => (lambda, value, kappa),
                    SweepVar::Kappa => (lambda, d, value),
                };
                let params =
                    BlockageModelParams::new(lambda, self.model.width_dist.clone(), self.model.length_dist.clone())
                        .map_err(|e| ConfigError { line: None, field: "model".into(), message: e.to_string() })?;
                let link = LinkGeometry::new(d, kappa).map_err(|e| ConfigError {
                    line: None,
                    field: "link".into(),
                    message: e.to_string(),
                })?;
                Ok(SweepPoint { value, params, link })
            })
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("estimator failed at {var}={value}: {source}")]
    Estimate { var: &'static str, value: f64, source: EstimateError },
    #[error("bound evaluation failed at {var}={value}: {source}")]
    Bound { var: &'static str, value: f64, source: AnalyticsError },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// One sweep point: the Monte Carlo estimate and the bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_var: SweepVar,
    pub sweep_value: f64,
    pub estimate: MCEstimate,
    pub bounds: BoundSet,
}

/// Bounds for a sweep point, with its location.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub sweep_var: SweepVar,
    pub sweep_value: f64,
    pub bounds: BoundSet,
}

/// Formats with 9 significant digits, fixed notation for moderate exponents.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let fixed = format!("{v:.decimals$}");
        trim_fraction(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_fraction(mantissa))
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl SweepRow {
    pub fn to_record(&self) -> Vec<String> {
        let b = &self.bounds;
        let e = &self.estimate;
        vec![
            self.sweep_var.as_str().to_string(),
            format_sig9(self.sweep_value),
            format_sig9(e.mean),
            format_sig9(e.std_err),
            format_sig9(e.ci_low),
            format_sig9(e.ci_high),
            e.n_effective.to_string(),
            format_sig9(b.unconditional.value),
            format_sig9(b.p_los.value),
            format_sig9(b.src_outdoor.value),
            format_sig9(b.both_outdoor.value),
            format_sig9(b.kappa_star),
            format_sig9(b.optimal_window.value),
            e.seed.to_string(),
        ]
    }
}

/// A sweep CSV row read back from text.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedRow {
    pub sweep_var: SweepVar,
    pub values: Vec<f64>,
    pub n_effective: u64,
    pub seed: u64,
}

impl ParsedRow {
    pub fn column(&self, name: &str) -> Option<f64> {
        let i = CSV_COLUMNS.iter().position(|c| *c == name)?;
        match name {
            "n_effective" => Some(self.n_effective as f64),
            "seed" => Some(self.seed as f64),
            "sweep_var" => None,
            _ => self.values.get(i - 1).copied(),
        }
    }
}

/// Reads a sweep CSV produced by [`write_csv`].
pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Vec<ParsedRow>, RunError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CSV_COLUMNS {
        return Err(RunError::Config(ConfigError {
            line: Some(1),
            field: "header".into(),
            message: format!("unexpected header {header:?}"),
        }));
    }
    let bad = |line: usize, field: &str| {
        RunError::Config(ConfigError { line: Some(line), field: field.into(), message: "unparsable value".into() })
    };
    let mut rows = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let record = record?;
        let line = k + 2;
        let sweep_var = SweepVar::parse(&record[0]).ok_or_else(|| bad(line, "sweep_var"))?;
        let mut values = Vec::new();
        for (i, name) in CSV_COLUMNS.iter().enumerate().skip(1) {
            if matches!(*name, "n_effective" | "seed") {
                values.push(f64::NAN);
                continue;
            }
            values.push(record[i].parse().map_err(|_| bad(line, name))?);
        }
        rows.push(ParsedRow {
            sweep_var,
            values,
            n_effective: record[6].parse().map_err(|_| bad(line, "n_effective"))?,
            seed: record[13].parse().map_err(|_| bad(line, "seed"))?,
        });
    }
    Ok(rows)
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), RunError> {
    let mut w = csv_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        w.write_record(row.to_record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_bounds_csv<W: Write>(rows: &[BoundRow], out: W) -> Result<(), RunError> {
    let mut w = csv_writer(out);
    w.write_record(BOUND_COLUMNS)?;
    for row in rows {
        let b = &row.bounds;
        w.write_record([
            row.sweep_var.as_str().to_string(),
            format_sig9(row.sweep_value),
            format_sig9(b.unconditional.value),
            format_sig9(b.p_los.value),
            format_sig9(b.src_outdoor.value),
            format_sig9(b.both_outdoor.value),
            format_sig9(b.kappa_star),
            format_sig9(b.optimal_window.value),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Bounds at every sweep point.
pub fn run_bounds(config: &ExperimentConfig) -> Result<Vec<BoundRow>, RunError> {
    config.validate()?;
    let var = config.sweep_var();
    config
        .points()?
        .into_iter()
        .map(|p| {
            let bounds = all_bounds(&p.params, &p.link, &config.quadrature).map_err(|source| RunError::Bound {
                var: var.as_str(),
                value: p.value,
                source,
            })?;
            Ok(BoundRow { sweep_var: var, sweep_value: p.value, bounds })
        })
        .collect()
}

/// Runs the whole sweep, in configuration order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<SweepRow>, RunError> {
    config.validate()?;
    let var = config.sweep_var();
    let points = config.points()?;
    let est = &config.estimator;

    let estimates: Vec<MCEstimate> = if var == SweepVar::Kappa && est.coupling == Coupling::Common {
        // one field per trial shared by every window
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].value.total_cmp(&points[b].value));
        let kappas: Vec<f64> = order.iter().map(|&i| points[i].value).collect();
        let base = &points[0];
        let paired =
            paired_kappa_comparison_with(&base.params, base.link.d, &kappas, est.condition, est.n, est.seed)
                .map_err(|source| RunError::Estimate { var: var.as_str(), value: kappas[kappas.len() - 1], source })?;
        let mut out = vec![paired.estimates[0]; points.len()];
        for (rank, &i) in order.iter().enumerate() {
            out[i] = paired.estimates[rank];
        }
        out
    } else {
        points
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let seed = match est.coupling {
                    Coupling::Common => est.seed,
                    Coupling::Independent => rng::mix(est.seed, k as u64),
                };
                estimate_connectivity(&p.params, &p.link, est.condition, est.n, seed)
                    .map_err(|source| RunError::Estimate { var: var.as_str(), value: p.value, source })
            })
            .collect::<Result<_, _>>()?
    };

    points
        .iter()
        .zip(estimates)
        .map(|(p, estimate)| {
            let bounds = all_bounds(&p.params, &p.link, &config.quadrature).map_err(|source| RunError::Bound {
                var: var.as_str(),
                value: p.value,
                source,
            })?;
            Ok(SweepRow { sweep_var: var, sweep_value: p.value, estimate, bounds })
        })
        .collect()
}
