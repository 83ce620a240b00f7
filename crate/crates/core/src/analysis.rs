//! Frequency sweeps and performance analysis: cooling windows and limit
//! frequencies with their closed forms and bisection-located flux zeros,
//! operating-mode tagging, figures of merit, circuit representatives and
//! performance characteristics.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Bath, Circuit, Cycle, DeviceMode, EdgeId, RateGraph};
use crate::models::{AbsorptionWireParams, DrivenCoefficients, DrivenWireParams, ModelSpec};
use crate::thermo::{
    circuit_currents, circuit_flux, enumerate_and_report, steady_state, total_currents,
    CircuitReport, Reconciliation, SteadyState,
};

/// Operating regime of a swept point, decided by current signs alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatingMode {
    Refrigerator,
    Engine,
    Dissipator,
}

impl OperatingMode {
    pub fn label(self) -> &'static str {
        match self {
            OperatingMode::Refrigerator => "refrigerator",
            OperatingMode::Engine => "engine",
            OperatingMode::Dissipator => "dissipator",
        }
    }
}

/// Steady-state summary of one sweep point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerformancePoint {
    pub omega_c: f64,
    pub heat_cold: f64,
    pub heat_hot: f64,
    /// Heat from the work bath (three-bath devices only).
    pub heat_work: Option<f64>,
    /// Power drawn from the work source (driven devices only).
    pub power: Option<f64>,
    pub entropy_rate: f64,
    pub mode: OperatingMode,
    /// COP for refrigerators, efficiency for engines, absent otherwise.
    pub figure_of_merit: Option<f64>,
    /// Heat current with the cold bath per circuit, canonical order,
    /// present when the sweep requests the per-circuit breakdown.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circuit_heat_cold: Option<Vec<f64>>,
    /// Combined representative currents, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub representative: Option<RepresentativeCurrents>,
}

/// Why a sweep point was skipped: the model could not be built there, or
/// it was built but its circuit decomposition failed to reconcile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Build,
    Reconciliation,
}

/// A sweep point the model could not be evaluated at.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailedPoint {
    pub omega_c: f64,
    pub kind: FailureKind,
    pub reason: String,
}

/// Combined currents of the circuit representatives at one sweep point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepresentativeCurrents {
    pub heat_cold: f64,
    pub heat_hot: f64,
    pub heat_work: Option<f64>,
    pub power: Option<f64>,
}

/// Frequency sweep request. Circuits are tracked across points by their
/// stable edge-id sets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub model: ModelSpec,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    #[serde(default)]
    pub per_circuit: bool,
    #[serde(default)]
    pub representatives: bool,
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        if !(self.lo < self.hi) {
            return Err(Error::InvalidSweep("require lo < hi".into()));
        }
        if self.points < 2 {
            return Err(Error::InvalidSweep("require at least 2 points".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| self.lo + step * k as f64)
            .collect()
    }
}

/// Sweep result: successful points in grid order plus the failures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub points: Vec<PerformancePoint>,
    pub failures: Vec<FailedPoint>,
    /// Canonical circuit list of the first successful point, identifying
    /// the columns of `circuit_heat_cold`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circuit_labels: Option<Vec<String>>,
    /// Vertex strings of the selected representatives, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub representative_labels: Option<Vec<String>>,
    /// True when the driven selection rule ties (g = λ) and both pairs
    /// are included.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub representative_tie: bool,
}

fn mode_of(graph: &RateGraph, steady: &SteadyState) -> OperatingMode {
    let qc = steady.per_bath_currents[&Bath::Cold];
    let qh = steady.per_bath_currents[&Bath::Hot];
    match graph.mode() {
        DeviceMode::ThreeBath => {
            if qc > 0.0 {
                OperatingMode::Refrigerator
            } else {
                OperatingMode::Dissipator
            }
        }
        DeviceMode::WorkSource => {
            let p = steady.power;
            if qc > 0.0 && p > 0.0 {
                OperatingMode::Refrigerator
            } else if p < 0.0 && qh > 0.0 {
                OperatingMode::Engine
            } else {
                OperatingMode::Dissipator
            }
        }
    }
}

fn figure_of_merit(graph: &RateGraph, steady: &SteadyState, mode: OperatingMode) -> Option<f64> {
    let qc = steady.per_bath_currents[&Bath::Cold];
    let qh = steady.per_bath_currents[&Bath::Hot];
    match (graph.mode(), mode) {
        (DeviceMode::ThreeBath, OperatingMode::Refrigerator) => {
            Some(qc / steady.per_bath_currents[&Bath::Work])
        }
        (DeviceMode::WorkSource, OperatingMode::Refrigerator) => Some(qc / steady.power),
        (DeviceMode::WorkSource, OperatingMode::Engine) => Some(-steady.power / qh),
        _ => None,
    }
}

/// Evaluate one parameter point: build, solve, decompose, reconcile.
pub fn evaluate_point(
    model: &ModelSpec,
) -> Result<(RateGraph, SteadyState, Vec<CircuitReport>, Reconciliation)> {
    let graph = model.build()?;
    let (_rates, steady, reports) = enumerate_and_report(&graph)?;
    let reconciliation = total_currents(&graph, &reports, &steady)?;
    Ok((graph, steady, reports, reconciliation))
}

/// Run the sweep. Points where the model cannot be built (a channel
/// quantum closes) or fails reconciliation are recorded and skipped.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut points = Vec::new();
    let mut failures = Vec::new();
    let mut circuit_labels: Option<Vec<String>> = None;
    let mut circuit_keys: Option<Vec<BTreeSet<EdgeId>>> = None;
    let mut representative_labels: Option<Vec<String>> = None;
    let mut representative_tie = false;

    for omega_c in spec.grid() {
        let model = spec.model.at_omega_c(omega_c);
        match evaluate_point(&model) {
            Err(err) => failures.push(FailedPoint {
                omega_c,
                kind: match err {
                    Error::ReconciliationFailure(_) => FailureKind::Reconciliation,
                    _ => FailureKind::Build,
                },
                reason: err.to_string(),
            }),
            Ok((graph, steady, reports, _rec)) => {
                let mode = mode_of(&graph, &steady);
                let circuit_heat_cold = if spec.per_circuit {
                    if circuit_keys.is_none() {
                        circuit_keys =
                            Some(reports.iter().map(|r| r.circuit.edge_id_set()).collect());
                        circuit_labels =
                            Some(reports.iter().map(|r| r.circuit.vertex_string()).collect());
                    }
                    let keys = circuit_keys.as_ref().unwrap();
                    let mut row = Vec::with_capacity(keys.len());
                    for key in keys {
                        let report = reports
                            .iter()
                            .find(|r| &r.circuit.edge_id_set() == key)
                            .ok_or_else(|| Error::CircuitNotFound(format!("{key:?}")))?;
                        row.push(report.heat[&Bath::Cold]);
                    }
                    Some(row)
                } else {
                    None
                };
                let representative = if spec.representatives {
                    let set = select_representatives(&model, &graph, &reports)?;
                    if representative_labels.is_none() {
                        representative_labels =
                            Some(set.circuits.iter().map(|c| c.vertex_string()).collect());
                        representative_tie = set.tie;
                    }
                    Some(RepresentativeCurrents {
                        heat_cold: set.heat_cold,
                        heat_hot: set.heat_hot,
                        heat_work: set.heat_work,
                        power: set.power,
                    })
                } else {
                    None
                };
                points.push(PerformancePoint {
                    omega_c,
                    heat_cold: steady.per_bath_currents[&Bath::Cold],
                    heat_hot: steady.per_bath_currents[&Bath::Hot],
                    heat_work: steady.per_bath_currents.get(&Bath::Work).copied(),
                    power: match graph.mode() {
                        DeviceMode::ThreeBath => None,
                        DeviceMode::WorkSource => Some(steady.power),
                    },
                    entropy_rate: steady.entropy_rate,
                    mode,
                    figure_of_merit: figure_of_merit(&graph, &steady, mode),
                    circuit_heat_cold,
                    representative,
                });
            }
        }
    }
    Ok(SweepResult {
        points,
        failures,
        circuit_labels,
        representative_labels,
        representative_tie,
    })
}

// ---------------------------------------------------------------------------
// Flux zero crossings
// ---------------------------------------------------------------------------

pub const BISECTION_TOL: f64 = 1e-6;

/// Flux of the circuit identified by `edge_ids` when the model is rebuilt
/// at `omega_c`. Circuit identity is carried by the deterministic edge ids.
fn flux_at(model: &ModelSpec, edge_ids: &BTreeSet<EdgeId>, omega_c: f64) -> Result<f64> {
    let graph = model.at_omega_c(omega_c).build()?;
    let rates = crate::graph::rate_matrix(&graph)?;
    let steady = steady_state(&graph, &rates)?;
    let circuit = Circuit::from_edge_set(&graph, edge_ids)
        .ok_or_else(|| Error::CircuitNotFound(format!("{edge_ids:?}")))?;
    Ok(circuit_flux(
        &Cycle::forward(circuit),
        &graph,
        &rates,
        &steady,
    ))
}

/// Locate the flux zero of one circuit by bisection on ω_c.
pub fn locate_flux_zero(
    model: &ModelSpec,
    edge_ids: &BTreeSet<EdgeId>,
    mut lo: f64,
    mut hi: f64,
) -> Result<f64> {
    let f_lo = flux_at(model, edge_ids, lo)?;
    let f_hi = flux_at(model, edge_ids, hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(Error::NoZeroCrossing { lo, hi });
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        let f_mid = flux_at(model, edge_ids, mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed-form reversal frequency of one circuit together with the
/// bisection-located flux zero confirming it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowBound {
    pub label: String,
    pub closed_form: f64,
    pub located: f64,
}

/// Cooling-window bounds of the wire-coupled absorption machine. Returns
/// the global edge ω_{c,rev} and, for each three-edge tricycle, the
/// displaced edge from the closed form together with its located flux zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoolingWindows {
    pub global: f64,
    pub per_circuit: Vec<WindowBound>,
}

/// The three closed-form families for the six three-edge tricycles: the
/// displacement of ω_{c,rev} is ±g T_c(T_w-T_h)/[T_h(T_w-T_c)] for the
/// circuits through vertices {1,3,4} and {1,3,5}, ±g T_w(T_h-T_c)/[T_h(T_w-T_c)]
/// through {1,2,4} and {1,2,5}, and ±g through {2,4,6} and {2,5,6}.
pub fn cooling_window_bounds(params: &AbsorptionWireParams) -> Result<CoolingWindows> {
    let tc = params.bath_c.temperature;
    let th = params.bath_h.temperature;
    let tw = params.bath_w.temperature;
    let g = params.g;
    let global = params.omega_h * tc * (tw - th) / (th * (tw - tc));

    let families: [(&[usize], f64); 6] = [
        (&[1, 3, 4], -g * tc * (tw - th) / (th * (tw - tc))),
        (&[1, 3, 5], g * tc * (tw - th) / (th * (tw - tc))),
        (&[1, 2, 5], -g * tw * (th - tc) / (th * (tw - tc))),
        (&[1, 2, 4], g * tw * (th - tc) / (th * (tw - tc))),
        (&[2, 5, 6], -g),
        (&[2, 4, 6], g),
    ];

    let model = ModelSpec::AbsorptionWire(params.clone());
    let graph = model.build()?;
    let circuits = crate::graph::enumerate_circuits(&graph)?;
    let mut per_circuit = Vec::with_capacity(6);
    for (vertices, shift) in families {
        let target: BTreeSet<usize> = vertices.iter().copied().collect();
        let circuit = circuits
            .iter()
            .find(|c| c.len() == 3 && c.vertex_set() == target)
            .ok_or_else(|| Error::CircuitNotFound(format!("{vertices:?}")))?;
        let closed_form = global + shift;
        let width = g.max(0.02);
        let located = locate_flux_zero(
            &model,
            &circuit.edge_id_set(),
            closed_form - width,
            closed_form + width,
        )?;
        per_circuit.push(WindowBound {
            label: circuit.vertex_string(),
            closed_form,
            located,
        });
    }
    Ok(CoolingWindows {
        global,
        per_circuit,
    })
}

/// Limit frequencies of the driven machine: the global ω_{c,max} = ω_h T_c/T_h,
/// the two-edge circuits' ω_{c,max} - (ω_j - ω_i) η_C, and the four-edge
/// tricycles with two edges per bath at ω_{c,max} - (ω_j + ω_j') η_C / 2.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DrivenLimits {
    pub global: f64,
    pub carnot_efficiency: f64,
    pub carnot_cop: f64,
    pub two_edge: Vec<WindowBound>,
    pub four_edge_balanced: Vec<WindowBound>,
}

pub fn limit_frequencies_driven(params: &DrivenWireParams) -> Result<DrivenLimits> {
    let tc = params.bath_c.temperature;
    let th = params.bath_h.temperature;
    let eta_c = 1.0 - tc / th;
    let global = params.omega_h * tc / th;
    let coeff = DrivenCoefficients::from_params(params);

    let model = ModelSpec::DrivenWire(params.clone());
    let graph = model.build()?;
    let circuits = crate::graph::enumerate_circuits(&graph)?;

    let mut two_edge = Vec::new();
    for i in 1..=2usize {
        for j in 3..=6usize {
            let target: BTreeSet<usize> = [i, j].into_iter().collect();
            let circuit = circuits
                .iter()
                .find(|c| c.len() == 2 && c.vertex_set() == target)
                .ok_or_else(|| Error::CircuitNotFound(format!("{{{i},{j}}}")))?;
            let closed_form = global - (coeff.omega[j - 1] - coeff.omega[i - 1]) * eta_c;
            let located = locate_flux_zero(
                &model,
                &circuit.edge_id_set(),
                closed_form - 0.02,
                closed_form + 0.02,
            )?;
            two_edge.push(WindowBound {
                label: circuit.vertex_string(),
                closed_form,
                located,
            });
        }
    }

    // Four-edge tricycles alternating cold and hot edges around the cycle.
    let mut four_edge_balanced = Vec::new();
    for circuit in circuits.iter().filter(|c| c.len() == 4) {
        let cycle = Cycle::forward((*circuit).clone());
        let baths: Vec<Bath> = cycle
            .steps(&graph)
            .iter()
            .map(|s| graph.edge(s.edge_id).bath)
            .collect();
        let alternating = baths[0] != baths[1] && baths[0] == baths[2] && baths[1] == baths[3];
        if !alternating {
            continue;
        }
        let outer: Vec<usize> = circuit
            .vertex_set()
            .into_iter()
            .filter(|&v| v >= 3)
            .collect();
        let closed_form =
            global - (coeff.omega[outer[0] - 1] + coeff.omega[outer[1] - 1]) * eta_c / 2.0;
        let located = locate_flux_zero(
            &model,
            &circuit.edge_id_set(),
            closed_form - 0.02,
            closed_form + 0.02,
        )?;
        four_edge_balanced.push(WindowBound {
            label: circuit.vertex_string(),
            closed_form,
            located,
        });
    }

    Ok(DrivenLimits {
        global,
        carnot_efficiency: eta_c,
        carnot_cop: tc / (th - tc),
        two_edge,
        four_edge_balanced,
    })
}

/// Half-width factor of the internal-dissipation interval,
/// f(λ, g) = [λ + g + (4λ² + g²)^{1/2}] / 2.
pub fn dissipation_halfwidth(g: f64, lambda: f64) -> f64 {
    (lambda + g + (4.0 * lambda * lambda + g * g).sqrt()) / 2.0
}

// ---------------------------------------------------------------------------
// Circuit representatives
// ---------------------------------------------------------------------------

/// The small circuit set summarizing the device mechanisms, with its
/// combined currents.
#[derive(Debug, Clone)]
pub struct RepresentativeSet {
    pub circuits: Vec<Circuit>,
    /// True for the driven machine at g = λ, where both candidate pairs
    /// are returned.
    pub tie: bool,
    pub heat_cold: f64,
    pub heat_hot: f64,
    pub heat_work: Option<f64>,
    pub power: Option<f64>,
}

/// Select the representatives: the absorption machine uses the three-edge
/// tricycles through {1,3,4} and {1,3,5}; the driven machine picks between
/// the two-edge pairs ({1,4}, {2,5}) and ({1,6}, {2,3}) by the ratio g/λ.
pub fn select_representatives(
    model: &ModelSpec,
    graph: &RateGraph,
    reports: &[CircuitReport],
) -> Result<RepresentativeSet> {
    let (targets, tie): (Vec<(usize, BTreeSet<usize>)>, bool) = match model {
        ModelSpec::AbsorptionWire(_) => (
            vec![
                (3, [1, 3, 4].into_iter().collect()),
                (3, [1, 3, 5].into_iter().collect()),
            ],
            false,
        ),
        ModelSpec::DrivenWire(p) => {
            let ratio = p.g / p.lambda;
            if ratio < 1.0 {
                (
                    vec![
                        (2, [1, 4].into_iter().collect()),
                        (2, [2, 5].into_iter().collect()),
                    ],
                    false,
                )
            } else if ratio > 1.0 {
                (
                    vec![
                        (2, [1, 6].into_iter().collect()),
                        (2, [2, 3].into_iter().collect()),
                    ],
                    false,
                )
            } else {
                (
                    vec![
                        (2, [1, 4].into_iter().collect()),
                        (2, [2, 5].into_iter().collect()),
                        (2, [1, 6].into_iter().collect()),
                        (2, [2, 3].into_iter().collect()),
                    ],
                    true,
                )
            }
        }
        _ => {
            return Err(Error::InvalidParameters(
                "representatives are defined for the wire-coupled models".into(),
            ))
        }
    };

    let mut circuits = Vec::new();
    let mut heat_cold = 0.0;
    let mut heat_hot = 0.0;
    let mut heat_work = 0.0;
    for (len, vertices) in &targets {
        let report = reports
            .iter()
            .find(|r| r.circuit.len() == *len && r.circuit.vertex_set() == *vertices)
            .ok_or_else(|| Error::CircuitNotFound(format!("{vertices:?}")))?;
        circuits.push(report.circuit.clone());
        heat_cold += report.heat[&Bath::Cold];
        heat_hot += report.heat[&Bath::Hot];
        heat_work += report.heat.get(&Bath::Work).copied().unwrap_or(0.0);
    }
    let (heat_work, power) = match graph.mode() {
        DeviceMode::ThreeBath => (Some(heat_work), None),
        DeviceMode::WorkSource => (None, Some(-heat_cold - heat_hot)),
    };
    Ok(RepresentativeSet {
        circuits,
        tie,
        heat_cold,
        heat_hot,
        heat_work,
        power,
    })
}

// ---------------------------------------------------------------------------
// Performance characteristics
// ---------------------------------------------------------------------------

/// One point of a performance characteristic: figure of merit against the
/// flux normalized by the branch extremum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharacteristicPoint {
    pub omega_c: f64,
    pub figure_of_merit: f64,
    pub normalized_flux: f64,
}

/// Restrict a sweep to one operating mode and normalize its flux column:
/// cooling branches by the maximum of Q̇_c, engine branches by the minimum
/// of P (the largest power output).
pub fn performance_characteristic(
    points: &[PerformancePoint],
    mode: OperatingMode,
) -> Result<Vec<CharacteristicPoint>> {
    let branch: Vec<&PerformancePoint> = points
        .iter()
        .filter(|p| p.mode == mode && p.figure_of_merit.is_some())
        .collect();
    if branch.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let normalizer = match mode {
        OperatingMode::Refrigerator => branch
            .iter()
            .map(|p| p.heat_cold)
            .fold(f64::NEG_INFINITY, f64::max),
        OperatingMode::Engine => branch
            .iter()
            .map(|p| p.power.unwrap_or(0.0))
            .fold(f64::INFINITY, f64::min),
        OperatingMode::Dissipator => return Err(Error::EmptyWindow),
    };
    Ok(branch
        .iter()
        .map(|p| CharacteristicPoint {
            omega_c: p.omega_c,
            figure_of_merit: p.figure_of_merit.unwrap(),
            normalized_flux: match mode {
                OperatingMode::Refrigerator => p.heat_cold / normalizer,
                _ => p.power.unwrap_or(0.0) / normalizer,
            },
        })
        .collect())
}

/// Combined currents of the representatives at one parameter point,
/// rebuilt from scratch; used to trace Q̇^R along a sweep.
pub fn representative_currents(model: &ModelSpec, omega_c: f64) -> Result<RepresentativeSet> {
    let at = model.at_omega_c(omega_c);
    let graph = at.build()?;
    let (rates, steady, _) = crate::thermo::enumerate_and_report(&graph)?;
    let circuits = crate::graph::enumerate_circuits(&graph)?;
    let reports = circuits
        .iter()
        .map(|c| circuit_currents(c, &graph, &rates, &steady))
        .collect::<Result<Vec<_>>>()?;
    select_representatives(&at, &graph, &reports)
}
