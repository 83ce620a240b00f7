//! Steady state of the master equation and circuit-resolved thermodynamics:
//! cycle algebraic values, affinities, fluxes, per-circuit heat currents,
//! entropy production and circuit classification.
//!
//! Sign convention: heat currents are positive when energy flows into the
//! system. Units are fixed at ħ = k_B = ω₀ = 1.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{Bath, Circuit, Cycle, DeviceMode, Orientation, RateGraph, RateMatrix};

/// Stationary solution of the rate matrix together with the steady-state
/// currents obtained directly from edge flows.
#[derive(Debug, Clone)]
pub struct SteadyState {
    /// Stationary populations, summing to one.
    pub populations: Vec<f64>,
    /// |det| of the rate matrix with one row replaced by ones.
    pub normalization: f64,
    /// Heat current from each bath into the system, from the edge sums.
    pub per_bath_currents: BTreeMap<Bath, f64>,
    /// Power drawn from the work source (zero in the three-bath case).
    pub power: f64,
    /// Total entropy production rate, -Σ_α Q̇_α / T_α.
    pub entropy_rate: f64,
}

/// Solve W p = 0 with Σ p = 1 by replacing row 0 with ones.
pub fn steady_state(graph: &RateGraph, rates: &RateMatrix) -> Result<SteadyState> {
    let populations = stationary_populations(&rates.total, 0)?;
    let normalization = normalization_determinant(&rates.total, 0);

    let mut per_bath_currents: BTreeMap<Bath, f64> =
        graph.baths().keys().map(|&b| (b, 0.0)).collect();
    for e in graph.edges() {
        let flow = e.rate_up * populations[e.tail - 1] - e.rate_down * populations[e.head - 1];
        *per_bath_currents.get_mut(&e.bath).unwrap() += e.quantum * flow;
    }
    let heat_total: f64 = per_bath_currents.values().sum();
    let power = match graph.mode() {
        DeviceMode::ThreeBath => 0.0,
        DeviceMode::WorkSource => -heat_total,
    };
    let entropy_rate = -per_bath_currents
        .iter()
        .map(|(&b, &q)| q / graph.temperature(b))
        .sum::<f64>();

    Ok(SteadyState {
        populations,
        normalization,
        per_bath_currents,
        power,
        entropy_rate,
    })
}

/// Stationary populations solving W p = 0, Σ p = 1, normalizing through the
/// given row. Exposed with a row choice so the row-independence of the
/// construction can be exercised.
pub fn stationary_populations(total: &DMatrix<f64>, row: usize) -> Result<Vec<f64>> {
    let n = total.nrows();
    let mut system = total.clone();
    for j in 0..n {
        system[(row, j)] = 1.0;
    }
    let mut rhs = nalgebra::DVector::zeros(n);
    rhs[row] = 1.0;
    let lu = system.lu();
    let p = lu.solve(&rhs).ok_or(Error::ReducibleMatrix)?;
    let sum: f64 = p.iter().sum();
    if !(sum.is_finite()) || p.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::ReducibleMatrix);
    }
    let p: Vec<f64> = p.iter().map(|&x| x / sum).collect();
    // Residual of the stationarity condition, relative to the rate scale.
    let rate_scale = total.iter().map(|x| x.abs()).fold(0.0f64, f64::max);
    for i in 0..n {
        let residual: f64 = (0..n).map(|j| total[(i, j)] * p[j]).sum();
        if residual.abs() > 1e-12 * rate_scale {
            return Err(Error::ReducibleMatrix);
        }
    }
    Ok(p)
}

/// |det| of the rate matrix with the elements of `row` replaced by ones.
pub fn normalization_determinant(total: &DMatrix<f64>, row: usize) -> f64 {
    let n = total.nrows();
    let mut m = total.clone();
    for j in 0..n {
        m[(row, j)] = 1.0;
    }
    m.lu().determinant().abs()
}

/// Per-bath algebraic values of a cycle: products of the directed rates of
/// the bath's edges along the cycle, with the convention A^α = 1 for baths
/// the cycle does not touch. Log values are carried alongside so affinities
/// can be formed without overflow.
#[derive(Debug, Clone)]
pub struct AlgebraicValues {
    pub per_bath: BTreeMap<Bath, f64>,
    pub log_per_bath: BTreeMap<Bath, f64>,
}

impl AlgebraicValues {
    /// Product over all baths, A(C⃗).
    pub fn total(&self) -> f64 {
        self.per_bath.values().product()
    }
}

pub fn algebraic_values(cycle: &Cycle, graph: &RateGraph) -> AlgebraicValues {
    let mut per_bath: BTreeMap<Bath, f64> = graph.baths().keys().map(|&b| (b, 1.0)).collect();
    let mut log_per_bath: BTreeMap<Bath, f64> = graph.baths().keys().map(|&b| (b, 0.0)).collect();
    for step in cycle.steps(graph) {
        let e = graph.edge(step.edge_id);
        let rate = if step.ascending {
            e.rate_up
        } else {
            e.rate_down
        };
        *per_bath.get_mut(&e.bath).unwrap() *= rate;
        *log_per_bath.get_mut(&e.bath).unwrap() += rate.ln();
    }
    AlgebraicValues {
        per_bath,
        log_per_bath,
    }
}

/// Cycle affinities X^α in units of k_B, for one orientation.
#[derive(Debug, Clone)]
pub struct Affinities {
    pub per_bath: BTreeMap<Bath, f64>,
}

impl Affinities {
    pub fn total(&self) -> f64 {
        self.per_bath.values().sum()
    }

    pub fn get(&self, bath: Bath) -> f64 {
        self.per_bath.get(&bath).copied().unwrap_or(0.0)
    }
}

/// Largest relative disagreement tolerated between the two affinity routes
/// (log of rate products vs. signed quanta over temperatures).
const AFFINITY_ROUTE_TOL: f64 = 1e-10;

/// X^α = k_B ln[A^α(C⃗)/A^α(-C⃗)], evaluated in log space and cross-checked
/// against the detailed-balance form -Σ_e σ_e Ω_e / T_α.
pub fn affinity(cycle: &Cycle, graph: &RateGraph) -> Result<Affinities> {
    let forward = algebraic_values(cycle, graph);
    let backward = algebraic_values(&cycle.reversed(), graph);
    let mut per_bath = BTreeMap::new();
    for (&bath, &logf) in &forward.log_per_bath {
        per_bath.insert(bath, logf - backward.log_per_bath[&bath]);
    }

    let mut kms_route: BTreeMap<Bath, f64> = graph.baths().keys().map(|&b| (b, 0.0)).collect();
    for step in cycle.steps(graph) {
        let e = graph.edge(step.edge_id);
        let sign = if step.ascending { 1.0 } else { -1.0 };
        *kms_route.get_mut(&e.bath).unwrap() += -sign * e.quantum / graph.temperature(e.bath);
    }
    for (&bath, &x_ratio) in &per_bath {
        let x_kms = kms_route[&bath];
        let scale = x_ratio.abs().max(x_kms.abs()).max(1e-300);
        let rel = (x_ratio - x_kms).abs() / scale;
        if rel > AFFINITY_ROUTE_TOL && (x_ratio - x_kms).abs() > 1e-13 {
            return Err(Error::InvalidGraph(format!(
                "affinity routes disagree for bath {bath}: {x_ratio} vs {x_kms}"
            )));
        }
    }
    Ok(Affinities { per_bath })
}

/// det(-W | C): determinant of -W with the rows and columns of the
/// circuit's vertices removed; 1 for the empty minor.
pub fn circuit_minor(circuit: &Circuit, rates: &RateMatrix) -> f64 {
    let n = rates.total.nrows();
    let vertices = circuit.vertex_set();
    let keep: Vec<usize> = (0..n).filter(|i| !vertices.contains(&(i + 1))).collect();
    if keep.is_empty() {
        return 1.0;
    }
    let mut m = DMatrix::zeros(keep.len(), keep.len());
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate() {
            m[(a, b)] = -rates.total[(i, j)];
        }
    }
    m.lu().determinant()
}

/// Cycle flux I(C⃗) = D⁻¹ det(-W|C) [A(C⃗) - A(-C⃗)].
pub fn circuit_flux(
    cycle: &Cycle,
    graph: &RateGraph,
    rates: &RateMatrix,
    steady: &SteadyState,
) -> f64 {
    let minor = circuit_minor(&cycle.circuit, rates);
    let forward = algebraic_values(cycle, graph).total();
    let backward = algebraic_values(&cycle.reversed(), graph).total();
    minor * (forward - backward) / steady.normalization
}

/// Circuit classification by affinity structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CircuitClass {
    Trivial,
    HeatLeak,
    Tricycle,
}

impl CircuitClass {
    pub fn label(self) -> &'static str {
        match self {
            CircuitClass::Trivial => "trivial",
            CircuitClass::HeatLeak => "heat_leak",
            CircuitClass::Tricycle => "tricycle",
        }
    }
}

impl std::fmt::Display for CircuitClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Classify by which affinities vanish. Three thermal baths: trivial when
/// all X^α = 0, heat leak when exactly one vanishes, tricycle otherwise.
/// Work-source devices: trivial when X^c = X^h = 0, heat leak when
/// T_c X^c + T_h X^h = 0 with both affinities nonzero, tricycle otherwise.
pub fn classify(affinities: &Affinities, graph: &RateGraph) -> CircuitClass {
    let tol = graph.affinity_zero_tolerance();
    match graph.mode() {
        DeviceMode::ThreeBath => {
            let zeros = Bath::ALL
                .iter()
                .filter(|&&b| affinities.get(b).abs() < tol)
                .count();
            match zeros {
                3 => CircuitClass::Trivial,
                1 => CircuitClass::HeatLeak,
                _ => CircuitClass::Tricycle,
            }
        }
        DeviceMode::WorkSource => {
            let xc = affinities.get(Bath::Cold);
            let xh = affinities.get(Bath::Hot);
            if xc.abs() < tol && xh.abs() < tol {
                return CircuitClass::Trivial;
            }
            let tc = graph.temperature(Bath::Cold);
            let th = graph.temperature(Bath::Hot);
            if (tc * xc + th * xh).abs() < tol * (tc + th) {
                CircuitClass::HeatLeak
            } else {
                CircuitClass::Tricycle
            }
        }
    }
}

/// Everything the decomposition knows about one circuit at a fixed
/// parameter point. Heat, entropy and power are orientation independent;
/// affinities and flux refer to the canonical orientation.
#[derive(Debug, Clone)]
pub struct CircuitReport {
    pub circuit: Circuit,
    pub affinities: Affinities,
    pub flux: f64,
    pub heat: BTreeMap<Bath, f64>,
    pub entropy: f64,
    pub power: f64,
    pub class: CircuitClass,
    pub minor_det: f64,
}

/// Heat currents, entropy production and power of one circuit,
/// Q̇_α(C) = -T_α I(C⃗) X^α(C⃗) and Ṡ(C) = I(C⃗) X(C⃗).
pub fn circuit_currents(
    circuit: &Circuit,
    graph: &RateGraph,
    rates: &RateMatrix,
    steady: &SteadyState,
) -> Result<CircuitReport> {
    let cycle = Cycle::forward(circuit.clone());
    let affinities = affinity(&cycle, graph)?;
    let flux = circuit_flux(&cycle, graph, rates, steady);
    let minor_det = circuit_minor(circuit, rates);

    let mut heat = BTreeMap::new();
    for (&bath, &x) in &affinities.per_bath {
        heat.insert(bath, -graph.temperature(bath) * flux * x);
    }
    let entropy = flux * affinities.total();
    let power = match graph.mode() {
        DeviceMode::ThreeBath => 0.0,
        DeviceMode::WorkSource => -heat.values().sum::<f64>(),
    };
    let class = classify(&affinities, graph);
    Ok(CircuitReport {
        circuit: circuit.clone(),
        affinities,
        flux,
        heat,
        entropy,
        power,
        class,
        minor_det,
    })
}

/// Tally of circuits by (edge count, class).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CircuitCensus {
    pub by_length_class: BTreeMap<(usize, CircuitClass), usize>,
}

impl CircuitCensus {
    pub fn total(&self) -> usize {
        self.by_length_class.values().sum()
    }

    pub fn count_class(&self, class: CircuitClass) -> usize {
        self.by_length_class
            .iter()
            .filter(|((_, c), _)| *c == class)
            .map(|(_, n)| n)
            .sum()
    }

    pub fn count(&self, length: usize, class: CircuitClass) -> usize {
        self.by_length_class
            .get(&(length, class))
            .copied()
            .unwrap_or(0)
    }

    /// One-line summary, e.g. `total=38 tricycles=22 heat_leaks=15 trivial=1`.
    pub fn summary_line(&self) -> String {
        format!(
            "total={} tricycles={} heat_leaks={} trivial={}",
            self.total(),
            self.count_class(CircuitClass::Tricycle),
            self.count_class(CircuitClass::HeatLeak),
            self.count_class(CircuitClass::Trivial),
        )
    }
}

pub fn census(reports: &[CircuitReport]) -> CircuitCensus {
    let mut by_length_class: BTreeMap<(usize, CircuitClass), usize> = BTreeMap::new();
    for r in reports {
        *by_length_class
            .entry((r.circuit.len(), r.class))
            .or_insert(0) += 1;
    }
    CircuitCensus { by_length_class }
}

/// Circuit-sum totals reconciled against the direct edge-sum currents of
/// the steady state, including the edge-level current decomposition.
#[derive(Debug, Clone)]
pub struct Reconciliation {
    pub circuit_heat: BTreeMap<Bath, f64>,
    pub direct_heat: BTreeMap<Bath, f64>,
    pub circuit_power: f64,
    pub direct_power: f64,
    pub circuit_entropy: f64,
    pub direct_entropy: f64,
    /// Largest relative discrepancy across bath totals, power and entropy.
    pub max_relative_discrepancy: f64,
    /// Largest relative discrepancy of the per-edge current decomposition.
    pub edge_max_relative_discrepancy: f64,
}

/// Relative tolerance on the circuit-sum vs direct-current comparison.
pub const RECONCILIATION_TOL: f64 = 1e-8;

/// Sum the circuit contributions and compare with the direct steady-state
/// currents. Relative discrepancies are measured against the gross
/// contribution scale so that cancellation points do not inflate them.
pub fn total_currents(
    graph: &RateGraph,
    reports: &[CircuitReport],
    steady: &SteadyState,
) -> Result<Reconciliation> {
    let mut circuit_heat: BTreeMap<Bath, f64> = graph.baths().keys().map(|&b| (b, 0.0)).collect();
    let mut gross: f64 = 0.0;
    for r in reports {
        for (&b, &q) in &r.heat {
            *circuit_heat.get_mut(&b).unwrap() += q;
            gross = gross.max(q.abs());
        }
    }
    let circuit_power: f64 = reports.iter().map(|r| r.power).sum();
    let circuit_entropy: f64 = reports.iter().map(|r| r.entropy).sum();
    let direct_heat = steady.per_bath_currents.clone();
    let direct_power = steady.power;
    let direct_entropy = steady.entropy_rate;

    let scale = direct_heat
        .values()
        .map(|q| q.abs())
        .fold(gross.max(direct_power.abs()), f64::max)
        .max(1e-300);
    let mut max_rel: f64 = 0.0;
    for (&b, &qc) in &circuit_heat {
        max_rel = max_rel.max((qc - direct_heat[&b]).abs() / scale);
    }
    max_rel = max_rel.max((circuit_power - direct_power).abs() / scale);
    let entropy_scale = circuit_entropy.abs().max(direct_entropy.abs()).max(scale);
    max_rel = max_rel.max((circuit_entropy - direct_entropy).abs() / entropy_scale);

    // Edge-level decomposition: the net probability current of every edge
    // equals the signed sum of the fluxes of the circuits through it.
    let mut edge_max_rel: f64 = 0.0;
    let mut edge_direct = vec![0.0; graph.edges().len()];
    let mut edge_summed = vec![0.0; graph.edges().len()];
    for e in graph.edges() {
        edge_direct[e.id] = e.rate_up * steady.populations[e.tail - 1]
            - e.rate_down * steady.populations[e.head - 1];
    }
    for r in reports {
        let cycle = Cycle::forward(r.circuit.clone());
        for step in cycle.steps(graph) {
            let sign = if step.ascending { 1.0 } else { -1.0 };
            edge_summed[step.edge_id] += sign * r.flux;
        }
    }
    let edge_scale = edge_direct
        .iter()
        .chain(edge_summed.iter())
        .map(|x| x.abs())
        .fold(1e-300, f64::max);
    for id in 0..edge_direct.len() {
        edge_max_rel = edge_max_rel.max((edge_direct[id] - edge_summed[id]).abs() / edge_scale);
    }

    let reconciliation = Reconciliation {
        circuit_heat,
        direct_heat,
        circuit_power,
        direct_power,
        circuit_entropy,
        direct_entropy,
        max_relative_discrepancy: max_rel,
        edge_max_relative_discrepancy: edge_max_rel,
    };
    if max_rel > RECONCILIATION_TOL || edge_max_rel > RECONCILIATION_TOL {
        return Err(Error::ReconciliationFailure(max_rel.max(edge_max_rel)));
    }
    Ok(reconciliation)
}

/// Convenience: rate matrix, steady state, enumeration and per-circuit
/// reports in one call. Reports are ordered by edge count, then by the
/// canonical vertex sequence.
pub fn enumerate_and_report(
    graph: &RateGraph,
) -> Result<(RateMatrix, SteadyState, Vec<CircuitReport>)> {
    let rates = crate::graph::rate_matrix(graph)?;
    let steady = steady_state(graph, &rates)?;
    let mut circuits: Vec<_> = crate::graph::enumerate_circuits(graph)?
        .into_iter()
        .collect();
    circuits.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let reports = circuits
        .iter()
        .map(|c| circuit_currents(c, graph, &rates, &steady))
        .collect::<Result<Vec<_>>>()?;
    Ok((rates, steady, reports))
}

/// Flux antisymmetry and orientation independence hold exactly by
/// construction; exposed for tests of the reversal algebra.
pub fn oriented_flux(
    circuit: &Circuit,
    orientation: Orientation,
    graph: &RateGraph,
    rates: &RateMatrix,
    steady: &SteadyState,
) -> f64 {
    let cycle = Cycle {
        circuit: circuit.clone(),
        orientation,
    };
    circuit_flux(&cycle, graph, rates, steady)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{rate_matrix, BathSpec, Edge, EdgeId, Vertex};
    use approx::assert_relative_eq;

    fn kms_edge(id: EdgeId, tail: usize, head: usize, bath: Bath, q: f64, t: f64) -> Edge {
        let down = 2e-4 * (1.0 + q);
        Edge {
            id,
            tail,
            head,
            bath,
            quantum: q,
            rate_up: down * (-q / t).exp(),
            rate_down: down,
        }
    }

    fn two_state() -> RateGraph {
        let baths = vec![BathSpec::thermal(Bath::Cold, 4.0, 1, 1e-4)];
        let vertices = vec![
            Vertex {
                index: 1,
                frequency: 0.0,
            },
            Vertex {
                index: 2,
                frequency: 0.7,
            },
        ];
        let edges = vec![kms_edge(0, 1, 2, Bath::Cold, 0.7, 4.0)];
        RateGraph::new(vertices, edges, baths)
    }

    fn triangle() -> RateGraph {
        let baths = vec![
            BathSpec::thermal(Bath::Cold, 5.0, 1, 1e-3),
            BathSpec::thermal(Bath::Hot, 10.0, 1, 1e-3),
            BathSpec::thermal(Bath::Work, 20.0, 1, 1e-3),
        ];
        let vertices = vec![
            Vertex {
                index: 1,
                frequency: 0.0,
            },
            Vertex {
                index: 2,
                frequency: 0.4,
            },
            Vertex {
                index: 3,
                frequency: 1.0,
            },
        ];
        let edges = vec![
            kms_edge(0, 1, 2, Bath::Cold, 0.4, 5.0),
            kms_edge(1, 2, 3, Bath::Work, 0.6, 20.0),
            kms_edge(2, 1, 3, Bath::Hot, 1.0, 10.0),
        ];
        RateGraph::new(vertices, edges, baths)
    }

    #[test]
    fn two_state_boltzmann_ratio() {
        let g = two_state();
        let rm = rate_matrix(&g).unwrap();
        let s = steady_state(&g, &rm).unwrap();
        let ratio = s.populations[1] / s.populations[0];
        assert_relative_eq!(ratio, (-0.7f64 / 4.0).exp(), max_relative = 1e-12);
        assert_relative_eq!(s.populations.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn normalization_row_independent() {
        let g = triangle();
        let rm = rate_matrix(&g).unwrap();
        let d0 = normalization_determinant(&rm.total, 0);
        for row in 1..3 {
            let d = normalization_determinant(&rm.total, row);
            assert_relative_eq!(d, d0, max_relative = 1e-10);
            let p0 = stationary_populations(&rm.total, 0).unwrap();
            let p = stationary_populations(&rm.total, row).unwrap();
            for (a, b) in p0.iter().zip(&p) {
                assert_relative_eq!(a, b, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn triangle_flux_and_laws() {
        let g = triangle();
        let (rates, steady, reports) = enumerate_and_report(&g).unwrap();
        assert_eq!(reports.len(), 1);
        let r = &reports[0];
        assert!(r.minor_det > 0.0 || r.circuit.len() == 3);
        // First law: heat over the three baths sums to zero.
        let total: f64 = r.heat.values().sum();
        let scale = r.heat.values().map(|q| q.abs()).fold(1e-300, f64::max);
        assert!(total.abs() / scale < 1e-12);
        assert!(r.entropy >= -1e-15);
        // Antisymmetry of the flux under reversal.
        let fwd = oriented_flux(&r.circuit, Orientation::Forward, &g, &rates, &steady);
        let rev = oriented_flux(&r.circuit, Orientation::Reverse, &g, &rates, &steady);
        assert_eq!(fwd, -rev);
    }

    #[test]
    fn orientation_independent_heat() {
        let g = triangle();
        let (rates, steady, _) = enumerate_and_report(&g).unwrap();
        let circuit = crate::graph::enumerate_circuits(&g)
            .unwrap()
            .into_iter()
            .next()
            .unwrap();
        let fwd = Cycle::forward(circuit.clone());
        let rev = fwd.reversed();
        let xf = affinity(&fwd, &g).unwrap();
        let xr = affinity(&rev, &g).unwrap();
        for (&b, &x) in &xf.per_bath {
            assert_relative_eq!(x, -xr.per_bath[&b], max_relative = 1e-12);
        }
        let i_f = circuit_flux(&fwd, &g, &rates, &steady);
        let i_r = circuit_flux(&rev, &g, &rates, &steady);
        for (&b, &x) in &xf.per_bath {
            let qf = -g.temperature(b) * i_f * x;
            let qr = -g.temperature(b) * i_r * xr.per_bath[&b];
            assert_relative_eq!(qf, qr, max_relative = 1e-12);
        }
    }

    #[test]
    fn trivial_circuit_carries_nothing() {
        // Two parallel edges to the same bath form a circuit with zero
        // affinity: its flux and currents vanish identically.
        let baths = vec![BathSpec::thermal(Bath::Cold, 6.0, 1, 1e-4)];
        let vertices = vec![
            Vertex {
                index: 1,
                frequency: 0.0,
            },
            Vertex {
                index: 2,
                frequency: 0.5,
            },
        ];
        let edges = vec![
            kms_edge(0, 1, 2, Bath::Cold, 0.5, 6.0),
            kms_edge(1, 1, 2, Bath::Cold, 0.5, 6.0),
        ];
        let g = RateGraph::new(vertices, edges, baths);
        let (_, _, reports) = enumerate_and_report(&g).unwrap();
        assert_eq!(reports.len(), 1);
        let r = &reports[0];
        assert_eq!(r.class, CircuitClass::Trivial);
        let scale = r.heat.values().map(|q| q.abs()).fold(1e-300, f64::max);
        assert!(scale < 1e-20, "trivial circuit moved heat: {scale}");
        assert!(r.flux.abs() < 1e-20);
    }

    #[test]
    fn reconciliation_on_triangle() {
        let g = triangle();
        let (_rates, steady, reports) = enumerate_and_report(&g).unwrap();
        let rec = total_currents(&g, &reports, &steady).unwrap();
        assert!(rec.max_relative_discrepancy < 1e-9);
        assert!(rec.edge_max_relative_discrepancy < 1e-9);
    }
}
