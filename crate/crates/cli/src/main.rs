//! Command-line driver: reads a JSON run configuration, dispatches one of
//! the analysis commands and emits bit-stable CSV or JSON.
//!
//! Exit codes: 0 success, 2 configuration error, 3 physics-validation
//! failure (reconciliation or cross-check), 4 I/O error.

// Guards are written `!(x < y)` so NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;

use std::process::ExitCode;

use clap::{ArgAction, Parser};
use serde_json::{Map, Value};
use thiserror::Error;

use heatcycles::{
    eigen_crosscheck, enumerate_circuits, enumerate_circuits_oracle, evaluate_point, sweep, Bath,
    CircuitClass, DeviceMode, Error as CoreError, FailureKind, ModelSpec, SweepSpec,
};

use config::{parse_config, Command, OutputFormat, RunConfig};
use output::{fmt17, num17, Cell, Document};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Physics(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Physics(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn from_core(err: CoreError) -> CliError {
        match err {
            CoreError::InvalidParameters(_)
            | CoreError::InvalidSweep(_)
            | CoreError::NonpositiveQuantum { .. }
            | CoreError::NonpositiveFrequency(_)
            | CoreError::DegenerateSpectrum(_) => CliError::Config(err.to_string()),
            _ => CliError::Physics(err.to_string()),
        }
    }
}

/// Circuit decomposition of steady-state heat currents in continuous
/// quantum thermal devices. Units: ħ = k_B = ω₀ = 1.
#[derive(Debug, Parser)]
#[command(name = "heatcycles", version, about)]
struct Cli {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<String>,
    /// Command: enumerate, steady, circuits, sweep, representatives or
    /// crosscheck. Overrides the configured command.
    #[arg(long)]
    command: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
    /// Output format: csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Sweep point count override.
    #[arg(long)]
    points: Option<usize>,
    /// Sweep range override, lo:hi.
    #[arg(long)]
    range: Option<String>,
    /// Reserved: this binary uses no randomness anywhere.
    #[arg(long, action = ArgAction::SetTrue, num_args = 0)]
    seedless: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {path}: {e}")))?,
        None => "{}".to_string(),
    };
    let mut config = parse_config(&text)?;
    if let Some(name) = &cli.command {
        config.command = Command::parse(name)?;
    }
    if let Some(name) = &cli.format {
        config.format = OutputFormat::parse(name)?;
    }
    if let Some(path) = &cli.out {
        config.out_path = Some(path.clone());
    }
    if let Some(points) = cli.points {
        if points < 2 {
            return Err(CliError::Config("--points: must be at least 2".into()));
        }
        config.sweep_points = points;
    }
    if let Some(range) = &cli.range {
        let (lo, hi) = parse_range(range)?;
        config.sweep_lo = lo;
        config.sweep_hi = hi;
    }

    for warning in config.model.validity_warnings() {
        eprintln!("warning: {warning}");
    }

    let (document, summaries, code) = match config.command {
        Command::Enumerate => run_enumerate(&config)?,
        Command::Steady => run_steady(&config)?,
        Command::Circuits => run_circuits(&config)?,
        Command::Sweep => run_sweep(&config, false)?,
        Command::Representatives => run_sweep(&config, true)?,
        Command::Crosscheck => run_crosscheck(&config)?,
    };

    let rendered = match config.format {
        OutputFormat::Csv => document.to_csv(),
        OutputFormat::Json => document.to_json(),
    };
    // Summaries go to stderr so stdout stays pipe-clean for the document.
    for line in &summaries {
        eprintln!("{line}");
    }
    match &config.out_path {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| CliError::Io(format!("cannot write {path}: {e}")))?,
        None => print!("{rendered}"),
    }
    Ok(code)
}

fn parse_range(text: &str) -> Result<(f64, f64), CliError> {
    let invalid = || CliError::Config(format!("--range: expected lo:hi, got '{text}'"));
    let (lo, hi) = text.split_once(':').ok_or_else(invalid)?;
    let lo: f64 = lo.trim().parse().map_err(|_| invalid())?;
    let hi: f64 = hi.trim().parse().map_err(|_| invalid())?;
    if !(lo < hi) {
        return Err(CliError::Config("--range: require lo < hi".into()));
    }
    Ok((lo, hi))
}

fn has_work_bath(model: &ModelSpec) -> bool {
    matches!(
        model,
        ModelSpec::AbsorptionWire(_) | ModelSpec::DirectThreeLevel(_)
    )
}

fn census_meta(census: &heatcycles::CircuitCensus) -> Value {
    let mut obj = Map::new();
    obj.insert("total".into(), Value::from(census.total()));
    obj.insert(
        "tricycles".into(),
        Value::from(census.count_class(CircuitClass::Tricycle)),
    );
    obj.insert(
        "heat_leaks".into(),
        Value::from(census.count_class(CircuitClass::HeatLeak)),
    );
    obj.insert(
        "trivial".into(),
        Value::from(census.count_class(CircuitClass::Trivial)),
    );
    let mut by = Map::new();
    for (&(len, class), &count) in &census.by_length_class {
        by.insert(format!("{len}:{}", class.label()), Value::from(count));
    }
    obj.insert("by_length_class".into(), Value::Object(by));
    Value::Object(obj)
}

fn run_enumerate(config: &RunConfig) -> Result<(Document, Vec<String>, u8), CliError> {
    let (_, _, reports, _) = evaluate_point(&config.model).map_err(CliError::from_core)?;
    let census = heatcycles::census(&reports);
    let mut doc = Document::new(
        "enumerate",
        config.model.name(),
        ["index", "length", "vertices", "edges", "class"]
            .map(String::from)
            .to_vec(),
    );
    doc.meta
        .insert("omega_c".into(), num17(config.model.omega_c()));
    doc.meta.insert("census".into(), census_meta(&census));
    for (i, report) in reports.iter().enumerate() {
        doc.push_row(vec![
            Cell::Int(i as i64 + 1),
            Cell::Int(report.circuit.len() as i64),
            Cell::Text(report.circuit.vertex_string()),
            Cell::Text(
                report
                    .circuit
                    .edge_ids()
                    .iter()
                    .map(|id| id.to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
            Cell::Text(report.class.label().to_string()),
        ]);
    }
    Ok((doc, vec![census.summary_line()], 0))
}

fn run_steady(config: &RunConfig) -> Result<(Document, Vec<String>, u8), CliError> {
    let (graph, steady, _, _) = evaluate_point(&config.model).map_err(CliError::from_core)?;
    let three_bath = graph.mode() == DeviceMode::ThreeBath;
    let mut columns: Vec<String> = (1..=graph.vertex_count())
        .map(|i| format!("p{i}"))
        .collect();
    columns.push("normalization".into());
    columns.push("q_c".into());
    columns.push("q_h".into());
    columns.push(if three_bath { "q_w" } else { "power" }.into());
    columns.push("entropy_rate".into());
    let mut doc = Document::new("steady", config.model.name(), columns);
    doc.meta
        .insert("omega_c".into(), num17(config.model.omega_c()));
    let mut row: Vec<Cell> = steady.populations.iter().map(|&p| Cell::Float(p)).collect();
    row.push(Cell::Float(steady.normalization));
    row.push(Cell::Float(steady.per_bath_currents[&Bath::Cold]));
    row.push(Cell::Float(steady.per_bath_currents[&Bath::Hot]));
    row.push(Cell::Float(if three_bath {
        steady.per_bath_currents[&Bath::Work]
    } else {
        steady.power
    }));
    row.push(Cell::Float(steady.entropy_rate));
    doc.push_row(row);
    Ok((doc, Vec::new(), 0))
}

fn run_circuits(config: &RunConfig) -> Result<(Document, Vec<String>, u8), CliError> {
    let (graph, _, reports, _) = evaluate_point(&config.model).map_err(CliError::from_core)?;
    let three_bath = graph.mode() == DeviceMode::ThreeBath;
    let mut columns: Vec<String> = ["index", "length", "vertices", "class", "minor_det", "flux"]
        .map(String::from)
        .to_vec();
    columns.push("x_c".into());
    columns.push("x_h".into());
    if three_bath {
        columns.push("x_w".into());
    }
    columns.push("q_c".into());
    columns.push("q_h".into());
    columns.push(if three_bath { "q_w" } else { "power" }.into());
    columns.push("entropy".into());
    let mut doc = Document::new("circuits", config.model.name(), columns);
    doc.meta
        .insert("omega_c".into(), num17(config.model.omega_c()));
    for (i, r) in reports.iter().enumerate() {
        let mut row = vec![
            Cell::Int(i as i64 + 1),
            Cell::Int(r.circuit.len() as i64),
            Cell::Text(r.circuit.vertex_string()),
            Cell::Text(r.class.label().to_string()),
            Cell::Float(r.minor_det),
            Cell::Float(r.flux),
            Cell::Float(r.affinities.get(Bath::Cold)),
            Cell::Float(r.affinities.get(Bath::Hot)),
        ];
        if three_bath {
            row.push(Cell::Float(r.affinities.get(Bath::Work)));
        }
        row.push(Cell::Float(r.heat[&Bath::Cold]));
        row.push(Cell::Float(r.heat[&Bath::Hot]));
        row.push(Cell::Float(if three_bath {
            r.heat[&Bath::Work]
        } else {
            r.power
        }));
        row.push(Cell::Float(r.entropy));
        doc.push_row(row);
    }
    Ok((doc, Vec::new(), 0))
}

fn run_sweep(
    config: &RunConfig,
    representatives: bool,
) -> Result<(Document, Vec<String>, u8), CliError> {
    let spec = SweepSpec {
        model: config.model.clone(),
        lo: config.sweep_lo,
        hi: config.sweep_hi,
        points: config.sweep_points,
        per_circuit: config.sweep_per_circuit,
        representatives,
    };
    let result = sweep(&spec).map_err(CliError::from_core)?;
    if let Some(bad) = result
        .failures
        .iter()
        .find(|f| f.kind == FailureKind::Reconciliation)
    {
        return Err(CliError::Physics(format!(
            "sweep failed reconciliation at omega_c = {}: {}",
            fmt17(bad.omega_c),
            bad.reason
        )));
    }

    let three_bath = has_work_bath(&config.model);
    let command = if representatives {
        "representatives"
    } else {
        "sweep"
    };
    let mut columns: Vec<String> = ["omega_c", "q_c", "q_h"].map(String::from).to_vec();
    columns.push(if three_bath { "q_w" } else { "power" }.into());
    columns.push("entropy_rate".into());
    columns.push("figure_of_merit".into());
    columns.push("mode".into());
    if representatives {
        columns.push("q_c_rep".into());
        columns.push("q_h_rep".into());
        columns.push(if three_bath { "q_w_rep" } else { "power_rep" }.into());
    }
    if let Some(labels) = &result.circuit_labels {
        for label in labels {
            columns.push(format!("qc_{label}"));
        }
    }

    let mut doc = Document::new(command, config.model.name(), columns);
    let failures: Vec<Value> = result
        .failures
        .iter()
        .map(|f| {
            let mut obj = Map::new();
            obj.insert("omega_c".into(), num17(f.omega_c));
            obj.insert("reason".into(), Value::from(f.reason.clone()));
            Value::Object(obj)
        })
        .collect();
    doc.meta.insert("failures".into(), Value::from(failures));
    if let Some(labels) = &result.circuit_labels {
        doc.meta.insert(
            "circuit_labels".into(),
            Value::from(
                labels
                    .iter()
                    .map(|l| Value::from(l.clone()))
                    .collect::<Vec<_>>(),
            ),
        );
    }
    if let Some(labels) = &result.representative_labels {
        doc.meta.insert(
            "representative_labels".into(),
            Value::from(
                labels
                    .iter()
                    .map(|l| Value::from(l.clone()))
                    .collect::<Vec<_>>(),
            ),
        );
        doc.meta.insert(
            "representative_tie".into(),
            Value::from(result.representative_tie),
        );
    }

    for point in &result.points {
        let mut row = vec![
            Cell::Float(point.omega_c),
            Cell::Float(point.heat_cold),
            Cell::Float(point.heat_hot),
            if three_bath {
                Cell::Float(point.heat_work.unwrap_or(0.0))
            } else {
                Cell::Float(point.power.unwrap_or(0.0))
            },
            Cell::Float(point.entropy_rate),
            match point.figure_of_merit {
                Some(m) => Cell::Float(m),
                None => Cell::Empty,
            },
            Cell::Text(point.mode.label().to_string()),
        ];
        if representatives {
            let rep = point.representative.as_ref().expect("requested");
            row.push(Cell::Float(rep.heat_cold));
            row.push(Cell::Float(rep.heat_hot));
            row.push(if three_bath {
                Cell::Float(rep.heat_work.unwrap_or(0.0))
            } else {
                Cell::Float(rep.power.unwrap_or(0.0))
            });
        }
        if let Some(per_circuit) = &point.circuit_heat_cold {
            row.extend(per_circuit.iter().map(|&q| Cell::Float(q)));
        }
        doc.push_row(row);
    }

    let mut summaries = vec![format!(
        "swept {} points, {} ok, {} failed",
        config.sweep_points,
        result.points.len(),
        result.failures.len()
    )];
    for failure in &result.failures {
        summaries.push(format!(
            "skipped omega_c = {}: {}",
            fmt17(failure.omega_c),
            failure.reason
        ));
    }
    Ok((doc, summaries, 0))
}

fn run_crosscheck(config: &RunConfig) -> Result<(Document, Vec<String>, u8), CliError> {
    let mut messages: Vec<String> = Vec::new();

    let eigen = match eigen_crosscheck(&config.model) {
        Ok(report) => Some(report),
        Err(err) => {
            messages.push(format!("eigenbasis comparison failed: {err}"));
            None
        }
    };

    let graph = config.model.build().map_err(CliError::from_core)?;
    let combinatorial = enumerate_circuits(&graph).map_err(CliError::from_core)?;
    let backtracking = enumerate_circuits_oracle(&graph).map_err(CliError::from_core)?;
    let enumerators_equal = combinatorial == backtracking;
    if !enumerators_equal {
        messages.push(format!(
            "enumerators disagree: {} vs {} circuits",
            combinatorial.len(),
            backtracking.len()
        ));
    }

    let reconciliation = match evaluate_point(&config.model) {
        Ok((_, _, _, rec)) => Some(rec),
        Err(err) => {
            messages.push(format!("reconciliation failed: {err}"));
            None
        }
    };

    let status = if messages.is_empty() { "pass" } else { "fail" };
    let mut doc = Document::new(
        "crosscheck",
        config.model.name(),
        [
            "max_frequency_deviation",
            "max_coefficient_deviation",
            "enumerator_sets_equal",
            "totals_max_rel_discrepancy",
            "edge_decomposition_max_rel_discrepancy",
            "status",
        ]
        .map(String::from)
        .to_vec(),
    );
    doc.meta
        .insert("omega_c".into(), num17(config.model.omega_c()));
    if !messages.is_empty() {
        doc.meta.insert(
            "messages".into(),
            Value::from(
                messages
                    .iter()
                    .map(|m| Value::from(m.clone()))
                    .collect::<Vec<_>>(),
            ),
        );
    }
    doc.push_row(vec![
        eigen
            .as_ref()
            .map(|r| Cell::Float(r.max_frequency_deviation))
            .unwrap_or(Cell::Empty),
        eigen
            .as_ref()
            .map(|r| Cell::Float(r.max_coefficient_deviation))
            .unwrap_or(Cell::Empty),
        Cell::Bool(enumerators_equal),
        reconciliation
            .as_ref()
            .map(|r| Cell::Float(r.max_relative_discrepancy))
            .unwrap_or(Cell::Empty),
        reconciliation
            .as_ref()
            .map(|r| Cell::Float(r.edge_max_relative_discrepancy))
            .unwrap_or(Cell::Empty),
        Cell::Text(status.to_string()),
    ]);

    let mut summaries = vec![format!("crosscheck {status}")];
    summaries.extend(messages);
    let code = if status == "pass" { 0 } else { 3 };
    Ok((doc, summaries, code))
}
