//! Declarative scenario files and their runners: the cotter-pin table,
//! discrete model comparisons, and grid-family moment reports.
//!
//! Scenario files are strict JSON with top-level fields `name`, `kind`,
//! `parameters` and (optionally) `output`; unknown fields anywhere are
//! rejected with the offending path named.

use serde::{Deserialize, Serialize};

use crate::binomial::{
    beta_binomial_log_pmf, beta_binomial_moments, binomial_log_pmf, binomial_moments,
    BinomialParams, PriorSample,
};
use crate::engine::{normal_grid_space, outlier_mixture_grid_space, ModelSpace, TabulatedFamily};
use crate::error::{Error, Result};
use crate::numerics::{tail_sum, LogProb};
use crate::render::{format_sig, render_table, OutputFormat, Report, ReportSection, TableRow};

const KNOWN_KINDS: &str = "cotter-pin, discrete-models, normal-grid, outlier-mixture";

/// A parsed, validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub params: ScenarioParams,
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioParams {
    CotterPin(CotterPinParams),
    DiscreteModels(DiscreteModelsParams),
    NormalGrid(NormalGridParams),
    OutlierMixture(OutlierMixtureParams),
}

impl ScenarioParams {
    pub fn kind(&self) -> &'static str {
        match self {
            ScenarioParams::CotterPin(_) => "cotter-pin",
            ScenarioParams::DiscreteModels(_) => "discrete-models",
            ScenarioParams::NormalGrid(_) => "normal-grid",
            ScenarioParams::OutlierMixture(_) => "outlier-mixture",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CotterPinParams {
    /// Prior sample sizes, one table row each; the known-model baseline
    /// row is always appended.
    #[serde(default)]
    pub n0: Vec<u64>,
    pub ratio: f64,
    pub n: u64,
    pub threshold: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pseudo_count: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteModelsParams {
    pub outcomes: Vec<String>,
    pub models: Vec<ModelRow>,
    #[serde(default)]
    pub observed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelRow {
    pub id: String,
    pub prior: f64,
    pub likelihood: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalGridParams {
    pub mean_range: [f64; 2],
    pub variance_range: [f64; 2],
    pub mean_points: usize,
    pub variance_points: usize,
    #[serde(default)]
    pub observed: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutlierMixtureParams {
    pub mean_range: [f64; 2],
    pub variance_range: [f64; 2],
    pub mean_points: usize,
    pub variance_points: usize,
    pub outlier_prob: f64,
    pub outlier_support: [f64; 2],
    #[serde(default)]
    pub observed: Vec<f64>,
}

/// Output format and precision, defaulting to markdown at 4 significant
/// digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputSpec {
    pub format: OutputFormat,
    pub precision: u32,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            format: OutputFormat::Markdown,
            precision: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutputSpec {
    #[serde(default)]
    format: Option<String>,
    #[serde(default)]
    precision: Option<u32>,
}

fn field_error(path: &str, message: impl Into<String>) -> Error {
    Error::ScenarioField {
        path: path.into(),
        message: message.into(),
    }
}

/// Parse a scenario document. Syntax errors, unknown kinds, and unknown or
/// missing fields each surface as distinct errors with location info.
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::ScenarioSyntax(e.to_string()))?;
    let object = value
        .as_object()
        .ok_or_else(|| field_error("$", "top level must be a JSON object"))?;

    for key in object.keys() {
        if !matches!(key.as_str(), "name" | "kind" | "parameters" | "output") {
            return Err(field_error(key, "unknown field"));
        }
    }

    let name = object
        .get("name")
        .ok_or_else(|| field_error("name", "missing required field"))?
        .as_str()
        .ok_or_else(|| field_error("name", "must be a string"))?
        .to_string();

    let kind = object
        .get("kind")
        .ok_or_else(|| field_error("kind", "missing required field"))?
        .as_str()
        .ok_or_else(|| field_error("kind", "must be a string"))?;

    let raw_params = object
        .get("parameters")
        .ok_or_else(|| field_error("parameters", "missing required field"))?
        .clone();
    let param_error = |e: serde_json::Error| field_error("parameters", e.to_string());

    let params = match kind {
        "cotter-pin" => {
            ScenarioParams::CotterPin(serde_json::from_value(raw_params).map_err(param_error)?)
        }
        "discrete-models" => {
            ScenarioParams::DiscreteModels(serde_json::from_value(raw_params).map_err(param_error)?)
        }
        "normal-grid" => {
            ScenarioParams::NormalGrid(serde_json::from_value(raw_params).map_err(param_error)?)
        }
        "outlier-mixture" => {
            ScenarioParams::OutlierMixture(serde_json::from_value(raw_params).map_err(param_error)?)
        }
        other => {
            return Err(Error::UnknownKind {
                kind: other.to_string(),
                expected: KNOWN_KINDS,
            })
        }
    };

    let output = match object.get("output") {
        None => OutputSpec::default(),
        Some(raw) => {
            let raw: RawOutputSpec = serde_json::from_value(raw.clone())
                .map_err(|e| field_error("output", e.to_string()))?;
            let format = match raw.format {
                None => OutputFormat::Markdown,
                Some(s) => s.parse()?,
            };
            let precision = raw.precision.unwrap_or(4);
            if !(1..=17).contains(&precision) {
                return Err(field_error(
                    "output.precision",
                    format!("must lie in [1, 17], got {precision}"),
                ));
            }
            OutputSpec { format, precision }
        }
    };

    let spec = ScenarioSpec {
        name,
        params,
        output,
    };
    validate(&spec)?;
    Ok(spec)
}

/// Canonical JSON for a spec: fixed field order, defaults filled in.
/// `parse_scenario(spec.to_json())` returns an equal spec.
pub fn to_json(spec: &ScenarioSpec) -> String {
    let params = match &spec.params {
        ScenarioParams::CotterPin(p) => serde_json::to_value(p),
        ScenarioParams::DiscreteModels(p) => serde_json::to_value(p),
        ScenarioParams::NormalGrid(p) => serde_json::to_value(p),
        ScenarioParams::OutlierMixture(p) => serde_json::to_value(p),
    }
    .expect("parameters serialize");
    let doc = serde_json::json!({
        "name": spec.name,
        "kind": spec.params.kind(),
        "parameters": params,
        "output": {
            "format": spec.output.format.to_string(),
            "precision": spec.output.precision,
        },
    });
    let mut out = serde_json::to_string_pretty(&doc).expect("scenario serializes");
    out.push('\n');
    out
}

fn validate(spec: &ScenarioSpec) -> Result<()> {
    match &spec.params {
        ScenarioParams::CotterPin(p) => validate_cotter(p),
        ScenarioParams::DiscreteModels(p) => validate_discrete(p),
        ScenarioParams::NormalGrid(p) => validate_grid_common(
            p.mean_range,
            p.variance_range,
            p.mean_points,
            p.variance_points,
        ),
        ScenarioParams::OutlierMixture(p) => {
            validate_grid_common(
                p.mean_range,
                p.variance_range,
                p.mean_points,
                p.variance_points,
            )?;
            if !(0.0..1.0).contains(&p.outlier_prob) {
                return Err(field_error(
                    "parameters.outlier_prob",
                    format!("must lie in [0, 1), got {}", p.outlier_prob),
                ));
            }
            let [lo, hi] = p.outlier_support;
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(field_error(
                    "parameters.outlier_support",
                    format!("must be a finite interval with lo < hi, got ({lo}, {hi})"),
                ));
            }
            Ok(())
        }
    }
}

fn validate_cotter(p: &CotterPinParams) -> Result<()> {
    if !(p.ratio > 0.0 && p.ratio < 1.0) {
        return Err(field_error(
            "parameters.ratio",
            format!("must lie strictly inside (0, 1), got {}", p.ratio),
        ));
    }
    if p.n == 0 {
        return Err(field_error("parameters.n", "must be at least 1"));
    }
    if p.threshold >= p.n {
        return Err(field_error(
            "parameters.threshold",
            format!("must be smaller than n={}, got {}", p.n, p.threshold),
        ));
    }
    if let Some(alpha) = p.pseudo_count {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(field_error(
                "parameters.pseudo_count",
                format!("must be a positive finite count, got {alpha}"),
            ));
        }
    }
    for &n0 in &p.n0 {
        if n0 < 2 {
            return Err(field_error(
                "parameters.n0",
                format!("prior sample size must be at least 2, got {n0}"),
            ));
        }
        integral_defect_count(n0, p.ratio)?;
    }
    Ok(())
}

/// r0 = ratio·n0, required to be an integer count.
fn integral_defect_count(n0: u64, ratio: f64) -> Result<u64> {
    let r0 = ratio * n0 as f64;
    let rounded = r0.round();
    if (r0 - rounded).abs() > 1e-9 * (n0 as f64).max(1.0) {
        return Err(Error::NonIntegralDefects { n0, ratio, r0 });
    }
    Ok(rounded as u64)
}

fn validate_discrete(p: &DiscreteModelsParams) -> Result<()> {
    if p.outcomes.is_empty() {
        return Err(field_error("parameters.outcomes", "must not be empty"));
    }
    let mut seen = std::collections::HashSet::new();
    for label in &p.outcomes {
        if !seen.insert(label) {
            return Err(field_error(
                "parameters.outcomes",
                format!("duplicate outcome label {label:?}"),
            ));
        }
    }
    if p.models.is_empty() {
        return Err(field_error("parameters.models", "must not be empty"));
    }
    let mut ids = std::collections::HashSet::new();
    let mut any_mass = false;
    for model in &p.models {
        let path = format!("parameters.models[{}]", model.id);
        if !ids.insert(&model.id) {
            return Err(field_error(&path, "duplicate model id"));
        }
        if !model.prior.is_finite() || model.prior < 0.0 {
            return Err(field_error(
                &path,
                format!("prior must be a finite value >= 0, got {}", model.prior),
            ));
        }
        any_mass |= model.prior > 0.0;
        if model.likelihood.len() != p.outcomes.len() {
            return Err(field_error(
                &path,
                format!(
                    "likelihood row has {} entries for {} outcomes",
                    model.likelihood.len(),
                    p.outcomes.len()
                ),
            ));
        }
        let mut total = 0.0;
        for &v in &model.likelihood {
            if !v.is_finite() || v < 0.0 {
                return Err(field_error(
                    &path,
                    format!("likelihood entries must be finite and >= 0, got {v}"),
                ));
            }
            total += v;
        }
        if (total - 1.0).abs() > 1e-6 {
            return Err(field_error(
                &path,
                format!("likelihood row sums to {total}, expected 1"),
            ));
        }
    }
    if !any_mass {
        return Err(field_error(
            "parameters.models",
            "at least one model needs positive prior probability",
        ));
    }
    for label in &p.observed {
        if !p.outcomes.contains(label) {
            return Err(field_error(
                "parameters.observed",
                format!("label {label:?} is not in the outcome list"),
            ));
        }
    }
    Ok(())
}

fn validate_grid_common(
    mean_range: [f64; 2],
    variance_range: [f64; 2],
    mean_points: usize,
    variance_points: usize,
) -> Result<()> {
    for (path, [lo, hi]) in [
        ("parameters.mean_range", mean_range),
        ("parameters.variance_range", variance_range),
    ] {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(field_error(
                path,
                format!("must be a finite interval with lo <= hi, got ({lo}, {hi})"),
            ));
        }
    }
    if variance_range[0] <= 0.0 {
        return Err(field_error(
            "parameters.variance_range",
            "must be strictly positive",
        ));
    }
    if mean_points == 0 || variance_points == 0 {
        return Err(field_error(
            "parameters.mean_points",
            "grids need at least one point per axis",
        ));
    }
    Ok(())
}

/// The rejected-boxes table: one row per prior sample size, then the
/// known-model baseline. The baseline row never touches the beta-binomial
/// path, and its overconfidence column is exactly zero.
pub fn run_cotter_pin(params: &CotterPinParams) -> Result<Vec<TableRow>> {
    validate_cotter(params)?;
    let plug_in = BinomialParams::new(params.n, params.ratio)?;
    let baseline_moments = binomial_moments(&plug_in);
    let baseline_tail = tail_sum(
        |r| binomial_log_pmf(r, &plug_in).expect("r in range"),
        params.threshold + 1,
        params.n,
    )?;

    let mut rows = Vec::with_capacity(params.n0.len() + 1);
    for &n0 in &params.n0 {
        let r0 = integral_defect_count(n0, params.ratio)?;
        let prior = match params.pseudo_count {
            Some(alpha) => PriorSample::with_pseudo_count(r0, n0, alpha)?,
            None => PriorSample::new(r0, n0)?,
        };
        let moments = beta_binomial_moments(params.n, &prior)?;
        let tail = tail_sum(
            |r| beta_binomial_log_pmf(r, params.n, &prior).expect("r in range"),
            params.threshold + 1,
            params.n,
        )?;
        let additional = if baseline_tail == 0.0 {
            None
        } else {
            Some((tail - baseline_tail) / baseline_tail)
        };
        rows.push(TableRow {
            prior_sample_size: Some(n0),
            mean: moments.mean,
            sd: moments.standard_deviation(),
            rejected: tail,
            additional_rejected: additional,
        });
    }
    rows.push(TableRow {
        prior_sample_size: None,
        mean: baseline_moments.mean,
        sd: baseline_moments.standard_deviation(),
        rejected: baseline_tail,
        additional_rejected: Some(0.0),
    });
    Ok(rows)
}

/// Run a validated scenario and render its report.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<String> {
    let OutputSpec { format, precision } = spec.output;
    match &spec.params {
        ScenarioParams::CotterPin(p) => {
            let rows = run_cotter_pin(p)?;
            let mut out = render_table(&rows, format, precision);
            if format == OutputFormat::Markdown {
                if let Some(alpha) = p.pseudo_count {
                    out.push_str(&format!(
                        "\nPseudo-count {alpha} added as both successes and failures to every prior sample.\n"
                    ));
                }
            }
            Ok(out)
        }
        ScenarioParams::DiscreteModels(p) => run_discrete(spec, p),
        ScenarioParams::NormalGrid(p) => run_normal_grid(spec, p),
        ScenarioParams::OutlierMixture(p) => run_outlier_mixture(spec, p),
    }
}

fn run_discrete(spec: &ScenarioSpec, p: &DiscreteModelsParams) -> Result<String> {
    let OutputSpec { format, precision } = spec.output;
    let family = TabulatedFamily::new((0..p.outcomes.len()).map(|i| i as f64).collect());
    let models = p
        .models
        .iter()
        .map(|m| {
            let row = m
                .likelihood
                .iter()
                .map(|&v| LogProb::from_linear(v))
                .collect::<Result<Vec<_>>>()?;
            Ok((m.id.clone(), row, LogProb::from_linear(m.prior)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let space = ModelSpace::new(family, models)?;

    let observed: Vec<usize> = p
        .observed
        .iter()
        .map(|label| {
            p.outcomes
                .iter()
                .position(|o| o == label)
                .expect("validated")
        })
        .collect();
    let outcome_space: Vec<usize> = (0..p.outcomes.len()).collect();

    let posterior = space.posterior(&observed)?;
    let transductive = space.posterior_predictive(&observed, &outcome_space)?;
    let (abductive, choice) = space.abductive_predictive(&observed, &outcome_space)?;
    let tv = transductive.total_variation_distance(&abductive)?;

    let fmt = |v: f64| format_sig(v, precision);
    let model_rows = space
        .models()
        .iter()
        .zip(posterior.models())
        .map(|(before, after)| {
            (
                before.id.clone(),
                vec![
                    fmt(before.log_weight().linear()),
                    fmt(after.log_weight().linear()),
                ],
            )
        })
        .collect();
    let outcome_rows = p
        .outcomes
        .iter()
        .enumerate()
        .map(|(i, label)| {
            (
                label.clone(),
                vec![
                    fmt(transductive.probability_of(&i).expect("in space")),
                    fmt(abductive.probability_of(&i).expect("in space")),
                ],
            )
        })
        .collect();
    let mut summary_rows = vec![
        ("tv_distance".to_string(), vec![fmt(tv)]),
        ("map_model".to_string(), vec![choice.id.clone()]),
    ];
    if !choice.tied_with.is_empty() {
        let tied: Vec<&str> = choice
            .tied_with
            .iter()
            .map(|&i| space.models()[i].id.as_str())
            .collect();
        summary_rows.push(("map_tie_with".to_string(), vec![tied.join(" ")]));
    }

    let report = Report {
        title: spec.name.clone(),
        sections: vec![
            ReportSection {
                name: "models".into(),
                columns: vec!["model".into(), "prior".into(), "posterior".into()],
                rows: model_rows,
            },
            ReportSection {
                name: "predictive".into(),
                columns: vec!["outcome".into(), "transductive".into(), "abductive".into()],
                rows: outcome_rows,
            },
            ReportSection {
                name: "summary".into(),
                columns: vec!["quantity".into(), "value".into()],
                rows: summary_rows,
            },
        ],
        notes: vec![],
    };
    Ok(report.render(format))
}

fn moment_report(
    spec: &ScenarioSpec,
    moments: crate::predictive::MomentPair,
    extra: Vec<(String, Vec<String>)>,
) -> Report {
    let precision = spec.output.precision;
    let fmt = |v: f64| format_sig(v, precision);
    let mut rows = vec![
        ("mean".to_string(), vec![fmt(moments.mean)]),
        ("variance".to_string(), vec![fmt(moments.variance)]),
        (
            "within_model_variance".to_string(),
            vec![fmt(moments.within_model_variance)],
        ),
        (
            "between_model_variance".to_string(),
            vec![fmt(moments.between_model_variance)],
        ),
        ("sd".to_string(), vec![fmt(moments.standard_deviation())]),
    ];
    rows.extend(extra);
    Report {
        title: spec.name.clone(),
        sections: vec![ReportSection {
            name: "moments".into(),
            columns: vec!["quantity".into(), "value".into()],
            rows,
        }],
        notes: vec![],
    }
}

fn run_normal_grid(spec: &ScenarioSpec, p: &NormalGridParams) -> Result<String> {
    let space = normal_grid_space(
        (p.mean_range[0], p.mean_range[1]),
        (p.variance_range[0], p.variance_range[1]),
        p.mean_points,
        p.variance_points,
        |_| 0.0,
    )?;
    let posterior = space.posterior(&p.observed)?;
    let moments = posterior.predictive_moments(&[])?;
    let kurtosis = posterior.mixture_excess_kurtosis();
    let report = moment_report(
        spec,
        moments,
        vec![(
            "excess_kurtosis".to_string(),
            vec![format_sig(kurtosis, spec.output.precision)],
        )],
    );
    Ok(report.render(spec.output.format))
}

fn run_outlier_mixture(spec: &ScenarioSpec, p: &OutlierMixtureParams) -> Result<String> {
    let space = outlier_mixture_grid_space(
        (p.mean_range[0], p.mean_range[1]),
        (p.variance_range[0], p.variance_range[1]),
        p.mean_points,
        p.variance_points,
        p.outlier_prob,
        (p.outlier_support[0], p.outlier_support[1]),
        |_| 0.0,
    )?;
    let posterior = space.posterior(&p.observed)?;
    let moments = posterior.predictive_moments(&[])?;
    let report = moment_report(spec, moments, vec![]);
    Ok(report.render(spec.output.format))
}
