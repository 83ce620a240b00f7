//! Steady-state analysis of continuous quantum thermal devices through the
//! circuit decomposition of their Pauli master equation.
//!
//! The master equation is represented as a labeled undirected multigraph
//! ([`graph::RateGraph`]): vertices are system eigenstates and each edge is
//! a bath-assisted transition with detailed-balanced forward/backward
//! rates. All simple circuits of the graph are enumerated two independent
//! ways, and every steady-state heat current and the entropy production
//! are decomposed into circuit contributions weighted by cycle affinities
//! and fluxes. The [`models`] module builds the concrete devices (a
//! three-level machine reaching its work reservoir through a two-level
//! wire, in absorption and driven variants, plus the bare three-level
//! baselines) and [`analysis`] sweeps them over the cold transition
//! frequency to map cooling windows, operating modes and figures of merit.
//!
//! Units are fixed throughout: ħ = k_B = ω₀ = 1.

// Positivity and ordering guards are written `!(x > 0.0)` so that NaN
// parameters fail validation instead of slipping through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod graph;
pub mod models;
pub mod thermo;

pub use analysis::{
    cooling_window_bounds, dissipation_halfwidth, evaluate_point, limit_frequencies_driven,
    locate_flux_zero, performance_characteristic, select_representatives, sweep,
    CharacteristicPoint, CoolingWindows, DrivenLimits, FailedPoint, FailureKind, OperatingMode,
    PerformancePoint, RepresentativeCurrents, RepresentativeSet, SweepResult, SweepSpec,
    WindowBound,
};
pub use error::{Error, Result};
pub use graph::{
    enumerate_circuits, enumerate_circuits_oracle, rate_matrix, spanning_tree_and_chords,
    validate_graph, Bath, BathKind, BathSpec, Circuit, Cycle, DeviceMode, Edge, EdgeId,
    MaximalTree, Orientation, RateGraph, RateMatrix, ValidationReport, Vertex, VertexId,
};
pub use models::{
    bose_rate, build_absorption_wire, build_appendix_three_level, build_direct_three_level,
    build_driven_wire, eigen_crosscheck, AbsorptionCoefficients, AbsorptionWireParams,
    AppendixThreeLevelParams, CrosscheckReport, DirectThreeLevelParams, DrivenCoefficients,
    DrivenWireParams, ModelSpec,
};
pub use thermo::{
    affinity, algebraic_values, census, circuit_currents, circuit_flux, circuit_minor, classify,
    enumerate_and_report, steady_state, total_currents, Affinities, AlgebraicValues, CircuitCensus,
    CircuitClass, CircuitReport, Reconciliation, SteadyState,
};
