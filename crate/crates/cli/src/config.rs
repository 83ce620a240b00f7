//! JSON run configuration: parsing, defaults, validation with field paths,
//! and canonical re-emission.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use heatcycles::{
    AbsorptionWireParams, AppendixThreeLevelParams, Bath, BathSpec, DirectThreeLevelParams,
    DrivenWireParams, ModelSpec,
};

use crate::CliError;

/// Commands the binary dispatches on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Enumerate,
    Steady,
    Circuits,
    Sweep,
    Representatives,
    Crosscheck,
}

impl Command {
    pub fn parse(name: &str) -> Result<Command, CliError> {
        match name {
            "enumerate" => Ok(Command::Enumerate),
            "steady" => Ok(Command::Steady),
            "circuits" => Ok(Command::Circuits),
            "sweep" => Ok(Command::Sweep),
            "representatives" => Ok(Command::Representatives),
            "crosscheck" => Ok(Command::Crosscheck),
            other => Err(CliError::Config(format!(
                "command: unknown command '{other}' (expected enumerate, steady, circuits, sweep, representatives or crosscheck)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Command::Enumerate => "enumerate",
            Command::Steady => "steady",
            Command::Circuits => "circuits",
            Command::Sweep => "sweep",
            Command::Representatives => "representatives",
            Command::Crosscheck => "crosscheck",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(name: &str) -> Result<OutputFormat, CliError> {
        match name {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(CliError::Config(format!(
                "output.format: unknown format '{other}' (expected csv or json)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBath {
    #[serde(skip_serializing_if = "Option::is_none")]
    temperature: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dimension: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coupling: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    baths: Option<BTreeMap<String, RawBath>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    #[serde(skip_serializing_if = "Option::is_none")]
    lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_circuit: Option<bool>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    format: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    command: Option<String>,
    #[serde(default, skip_serializing_if = "is_default_params")]
    parameters: RawParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<RawSweep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<RawOutput>,
}

fn is_default_params(p: &RawParams) -> bool {
    p.omega_c.is_none()
        && p.omega_h.is_none()
        && p.omega_w.is_none()
        && p.delta.is_none()
        && p.g.is_none()
        && p.lambda.is_none()
        && p.baths.is_none()
}

/// Fully resolved configuration: every default applied and validated.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub model: ModelSpec,
    pub sweep_lo: f64,
    pub sweep_hi: f64,
    pub sweep_points: usize,
    pub sweep_per_circuit: bool,
    pub format: OutputFormat,
    pub out_path: Option<String>,
}

fn positive(value: f64, path: &str) -> Result<f64, CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(CliError::Config(format!(
            "{path}: must be a positive number"
        )))
    }
}

fn resolve_bath(
    raws: &Option<BTreeMap<String, RawBath>>,
    label: Bath,
    default_temperature: f64,
) -> Result<BathSpec, CliError> {
    let raw = raws
        .as_ref()
        .and_then(|m| m.get(label.label()))
        .cloned()
        .unwrap_or_default();
    let path = format!("parameters.baths.{}", label.label());
    let temperature = positive(
        raw.temperature.unwrap_or(default_temperature),
        &format!("{path}.temperature"),
    )?;
    let coupling = positive(raw.coupling.unwrap_or(1e-6), &format!("{path}.coupling"))?;
    let dimension = raw.dimension.unwrap_or(3);
    if dimension == 0 {
        return Err(CliError::Config(format!(
            "{path}.dimension: must be a positive integer"
        )));
    }
    Ok(BathSpec::thermal(label, temperature, dimension, coupling))
}

fn check_bath_labels(
    raws: &Option<BTreeMap<String, RawBath>>,
    allowed: &[&str],
) -> Result<(), CliError> {
    if let Some(m) = raws {
        for key in m.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::Config(format!(
                    "parameters.baths.{key}: unknown bath label (expected one of {})",
                    allowed.join(", ")
                )));
            }
        }
    }
    Ok(())
}

fn reject_param(value: Option<f64>, path: &str, model: &str) -> Result<(), CliError> {
    if value.is_some() {
        return Err(CliError::Config(format!(
            "{path}: not a parameter of {model}"
        )));
    }
    Ok(())
}

/// Parse and resolve a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let raw: RawConfig =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
    resolve(&raw)
}

fn resolve(raw: &RawConfig) -> Result<RunConfig, CliError> {
    let model_name = raw.model.as_deref().unwrap_or("absorption_wire");
    let p = &raw.parameters;
    let omega_h = positive(p.omega_h.unwrap_or(1.0), "parameters.omega_h")?;

    let model = match model_name {
        "absorption_wire" => {
            reject_param(p.lambda, "parameters.lambda", model_name)?;
            check_bath_labels(&p.baths, &["c", "h", "w"])?;
            let omega_c = positive(p.omega_c.unwrap_or(0.4), "parameters.omega_c")?;
            let omega_w = match (p.omega_w, p.delta) {
                (Some(w), Some(d)) => {
                    if (omega_h - omega_c - w - d).abs() > 1e-12 {
                        return Err(CliError::Config(
                            "parameters.omega_w: inconsistent with parameters.delta".into(),
                        ));
                    }
                    w
                }
                (Some(w), None) => w,
                (None, delta) => omega_h - omega_c - delta.unwrap_or(0.0),
            };
            let omega_w = positive(omega_w, "parameters.omega_w")?;
            ModelSpec::AbsorptionWire(AbsorptionWireParams {
                omega_c,
                omega_h,
                omega_w,
                g: positive(p.g.unwrap_or(0.05), "parameters.g")?,
                bath_c: resolve_bath(&p.baths, Bath::Cold, 9.0)?,
                bath_h: resolve_bath(&p.baths, Bath::Hot, 10.0)?,
                bath_w: resolve_bath(&p.baths, Bath::Work, 20.0)?,
            })
        }
        "driven_wire" => {
            reject_param(p.omega_w, "parameters.omega_w", model_name)?;
            reject_param(p.delta, "parameters.delta", model_name)?;
            check_bath_labels(&p.baths, &["c", "h"])?;
            ModelSpec::DrivenWire(DrivenWireParams {
                omega_c: positive(p.omega_c.unwrap_or(0.7), "parameters.omega_c")?,
                omega_h,
                g: positive(p.g.unwrap_or(0.25), "parameters.g")?,
                lambda: positive(p.lambda.unwrap_or(0.05), "parameters.lambda")?,
                bath_c: resolve_bath(&p.baths, Bath::Cold, 9.0)?,
                bath_h: resolve_bath(&p.baths, Bath::Hot, 10.0)?,
            })
        }
        "appendix_three_level" => {
            reject_param(p.omega_w, "parameters.omega_w", model_name)?;
            reject_param(p.delta, "parameters.delta", model_name)?;
            reject_param(p.g, "parameters.g", model_name)?;
            check_bath_labels(&p.baths, &["c", "h"])?;
            ModelSpec::AppendixThreeLevel(AppendixThreeLevelParams {
                omega_c: positive(p.omega_c.unwrap_or(0.5), "parameters.omega_c")?,
                omega_h,
                lambda: positive(p.lambda.unwrap_or(0.05), "parameters.lambda")?,
                bath_c: resolve_bath(&p.baths, Bath::Cold, 9.0)?,
                bath_h: resolve_bath(&p.baths, Bath::Hot, 10.0)?,
            })
        }
        "direct_three_level" => {
            reject_param(p.omega_w, "parameters.omega_w", model_name)?;
            reject_param(p.delta, "parameters.delta", model_name)?;
            reject_param(p.g, "parameters.g", model_name)?;
            reject_param(p.lambda, "parameters.lambda", model_name)?;
            check_bath_labels(&p.baths, &["c", "h", "w"])?;
            ModelSpec::DirectThreeLevel(DirectThreeLevelParams {
                omega_c: positive(p.omega_c.unwrap_or(0.4), "parameters.omega_c")?,
                omega_h,
                bath_c: resolve_bath(&p.baths, Bath::Cold, 9.0)?,
                bath_h: resolve_bath(&p.baths, Bath::Hot, 10.0)?,
                bath_w: resolve_bath(&p.baths, Bath::Work, 20.0)?,
            })
        }
        other => {
            return Err(CliError::Config(format!("model: unknown model '{other}'")));
        }
    };

    let command = match raw.command.as_deref() {
        Some(name) => Command::parse(name)?,
        None => Command::Enumerate,
    };

    let (default_lo, default_hi) = match &model {
        ModelSpec::AbsorptionWire(_) | ModelSpec::DirectThreeLevel(_) => (0.05, 0.95),
        ModelSpec::DrivenWire(_) | ModelSpec::AppendixThreeLevel(_) => (0.4, 0.995),
    };
    let sweep = raw.sweep.clone().unwrap_or_default();
    let sweep_lo = sweep.lo.unwrap_or(default_lo);
    let sweep_hi = sweep.hi.unwrap_or(default_hi);
    if !(sweep_lo < sweep_hi) {
        return Err(CliError::Config("sweep.lo: must be below sweep.hi".into()));
    }
    let sweep_points = sweep.points.unwrap_or(200);
    if sweep_points < 2 {
        return Err(CliError::Config("sweep.points: must be at least 2".into()));
    }

    let output = raw.output.clone().unwrap_or_default();
    let format = match output.format.as_deref() {
        Some(name) => OutputFormat::parse(name)?,
        None => OutputFormat::Csv,
    };

    Ok(RunConfig {
        command,
        model,
        sweep_lo,
        sweep_hi,
        sweep_points,
        sweep_per_circuit: sweep.per_circuit.unwrap_or(false),
        format,
        out_path: output.path,
    })
}

impl RunConfig {
    /// Canonical document: every applicable field explicit. Parsing this
    /// text resolves to the same configuration and re-emits it verbatim.
    #[allow(dead_code)]
    pub fn canonical_text(&self) -> String {
        let bath_raw = |b: &BathSpec| RawBath {
            temperature: Some(b.temperature),
            dimension: Some(b.dimension),
            coupling: Some(b.coupling),
        };
        let mut baths = BTreeMap::new();
        let mut parameters = RawParams::default();
        match &self.model {
            ModelSpec::AbsorptionWire(p) => {
                parameters.omega_c = Some(p.omega_c);
                parameters.omega_h = Some(p.omega_h);
                parameters.omega_w = Some(p.omega_w);
                parameters.g = Some(p.g);
                baths.insert("c".to_string(), bath_raw(&p.bath_c));
                baths.insert("h".to_string(), bath_raw(&p.bath_h));
                baths.insert("w".to_string(), bath_raw(&p.bath_w));
            }
            ModelSpec::DrivenWire(p) => {
                parameters.omega_c = Some(p.omega_c);
                parameters.omega_h = Some(p.omega_h);
                parameters.g = Some(p.g);
                parameters.lambda = Some(p.lambda);
                baths.insert("c".to_string(), bath_raw(&p.bath_c));
                baths.insert("h".to_string(), bath_raw(&p.bath_h));
            }
            ModelSpec::AppendixThreeLevel(p) => {
                parameters.omega_c = Some(p.omega_c);
                parameters.omega_h = Some(p.omega_h);
                parameters.lambda = Some(p.lambda);
                baths.insert("c".to_string(), bath_raw(&p.bath_c));
                baths.insert("h".to_string(), bath_raw(&p.bath_h));
            }
            ModelSpec::DirectThreeLevel(p) => {
                parameters.omega_c = Some(p.omega_c);
                parameters.omega_h = Some(p.omega_h);
                baths.insert("c".to_string(), bath_raw(&p.bath_c));
                baths.insert("h".to_string(), bath_raw(&p.bath_h));
                baths.insert("w".to_string(), bath_raw(&p.bath_w));
            }
        }
        parameters.baths = Some(baths);
        let raw = RawConfig {
            model: Some(self.model.name().to_string()),
            command: Some(self.command.name().to_string()),
            parameters,
            sweep: Some(RawSweep {
                lo: Some(self.sweep_lo),
                hi: Some(self.sweep_hi),
                points: Some(self.sweep_points),
                per_circuit: Some(self.sweep_per_circuit),
            }),
            output: Some(RawOutput {
                format: Some(
                    match self.format {
                        OutputFormat::Csv => "csv",
                        OutputFormat::Json => "json",
                    }
                    .to_string(),
                ),
                path: self.out_path.clone(),
            }),
        };
        let mut text = serde_json::to_string_pretty(&raw).expect("config serializes");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_applies_reference_defaults() {
        let config = parse_config("{}").unwrap();
        assert_eq!(config.command, Command::Enumerate);
        match &config.model {
            ModelSpec::AbsorptionWire(p) => {
                assert_eq!(p.omega_c, 0.4);
                assert_eq!(p.omega_h, 1.0);
                assert_eq!(p.g, 0.05);
                assert_eq!(p.bath_c.temperature, 9.0);
                assert_eq!(p.bath_h.temperature, 10.0);
                assert_eq!(p.bath_w.temperature, 20.0);
                assert_eq!(p.bath_c.dimension, 3);
                assert_eq!(p.bath_c.coupling, 1e-6);
                assert_eq!(p.delta(), 1.0 - 0.4 - p.omega_w + p.delta());
                assert!(p.delta().abs() < 1e-15);
            }
            other => panic!("unexpected model {other:?}"),
        }
    }

    #[test]
    fn driven_defaults() {
        let config = parse_config(r#"{"model": "driven_wire"}"#).unwrap();
        match &config.model {
            ModelSpec::DrivenWire(p) => {
                assert_eq!(p.g, 0.25);
                assert_eq!(p.lambda, 0.05);
                assert_eq!(p.omega_c, 0.7);
            }
            other => panic!("unexpected model {other:?}"),
        }
    }

    #[test]
    fn unknown_model_is_rejected() {
        let err = parse_config(r#"{"model": "four_level"}"#).unwrap_err();
        assert!(err.to_string().contains("unknown model"));
    }

    #[test]
    fn field_error_carries_path() {
        let err = parse_config(
            r#"{"model": "absorption_wire", "parameters": {"baths": {"c": {"temperature": -1}}}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("parameters.baths.c.temperature"));
    }

    #[test]
    fn inapplicable_parameter_is_rejected() {
        let err = parse_config(r#"{"model": "direct_three_level", "parameters": {"g": 0.1}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("parameters.g"));
    }

    #[test]
    fn canonical_round_trip_is_idempotent() {
        let first = parse_config(r#"{"model": "driven_wire", "command": "sweep"}"#).unwrap();
        let text = first.canonical_text();
        let second = parse_config(&text).unwrap();
        assert_eq!(text, second.canonical_text());
    }

    #[test]
    fn detuning_sets_wire_frequency() {
        let config = parse_config(
            r#"{"model": "absorption_wire", "parameters": {"omega_c": 0.3, "delta": 0.1}}"#,
        )
        .unwrap();
        match &config.model {
            ModelSpec::AbsorptionWire(p) => {
                assert!((p.omega_w - 0.6).abs() < 1e-15);
                assert!((p.delta() - 0.1).abs() < 1e-15);
            }
            other => panic!("unexpected model {other:?}"),
        }
    }
}
