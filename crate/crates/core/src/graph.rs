//! Multigraph representation of a Pauli master equation and enumeration of
//! its simple circuits.
//!
//! Vertices are system eigenstates (1-based, matching the usual level
//! numbering), undirected edges are bath-assisted transitions carrying an
//! energy quantum and a forward/backward rate pair related by detailed
//! balance. Two independent enumerators produce the complete set of simple
//! circuits: a spanning-tree/chord construction closed under symmetric
//! difference, and a backtracking search used as a cross-check.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 1-based vertex label.
pub type VertexId = usize;
/// Index of an edge in the graph's edge list.
pub type EdgeId = usize;

/// Reservoir label. `Work` is the third thermal bath of absorption devices;
/// driven devices carry only `Cold` and `Hot` edges and account for the
/// field through the edge quanta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Bath {
    #[serde(rename = "c")]
    Cold,
    #[serde(rename = "h")]
    Hot,
    #[serde(rename = "w")]
    Work,
}

impl Bath {
    pub const ALL: [Bath; 3] = [Bath::Cold, Bath::Hot, Bath::Work];

    pub fn label(self) -> &'static str {
        match self {
            Bath::Cold => "c",
            Bath::Hot => "h",
            Bath::Work => "w",
        }
    }
}

impl fmt::Display for Bath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Whether a reservoir is a heat bath with a temperature or a classical
/// work source. Work sources own no graph edges; driving enters through
/// shifted edge quanta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BathKind {
    #[serde(rename = "thermal")]
    Thermal,
    #[serde(rename = "work_source")]
    WorkSource,
}

/// Physical description of one reservoir. Units: temperature in
/// ħω₀/k_B, coupling in ω₀ (ħ = k_B = ω₀ = 1 throughout).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub label: Bath,
    pub temperature: f64,
    pub dimension: u32,
    pub coupling: f64,
    pub kind: BathKind,
}

impl BathSpec {
    pub fn thermal(label: Bath, temperature: f64, dimension: u32, coupling: f64) -> Self {
        BathSpec {
            label,
            temperature,
            dimension,
            coupling,
            kind: BathKind::Thermal,
        }
    }
}

/// System eigenstate. `frequency` is the eigenfrequency in units of ω₀.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub index: VertexId,
    pub frequency: f64,
}

/// One bath-assisted transition. The `tail → head` direction absorbs the
/// quantum from the bath (`rate_up`), `head → tail` emits it (`rate_down`),
/// so detailed balance reads `rate_up / rate_down = exp(-quantum / T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
    pub bath: Bath,
    pub quantum: f64,
    pub rate_up: f64,
    pub rate_down: f64,
}

/// The master equation as a labeled undirected multigraph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    baths: BTreeMap<Bath, BathSpec>,
}

/// Whether the device exchanges energy with three heat baths or with two
/// heat baths plus a work source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviceMode {
    ThreeBath,
    WorkSource,
}

impl RateGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>, baths: Vec<BathSpec>) -> Self {
        let baths = baths.into_iter().map(|b| (b.label, b)).collect();
        RateGraph {
            vertices,
            edges,
            baths,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn baths(&self) -> &BTreeMap<Bath, BathSpec> {
        &self.baths
    }

    pub fn bath(&self, label: Bath) -> Option<&BathSpec> {
        self.baths.get(&label)
    }

    pub fn temperature(&self, label: Bath) -> f64 {
        self.baths[&label].temperature
    }

    pub fn mode(&self) -> DeviceMode {
        if self.baths.contains_key(&Bath::Work) {
            DeviceMode::ThreeBath
        } else {
            DeviceMode::WorkSource
        }
    }

    /// Find the edge connecting `u` and `v` through bath `bath`, if any.
    pub fn find_edge(&self, u: VertexId, v: VertexId, bath: Bath) -> Option<&Edge> {
        self.edges.iter().find(|e| {
            e.bath == bath && ((e.tail == u && e.head == v) || (e.tail == v && e.head == u))
        })
    }

    /// Largest edge quantum; the natural energy scale of the device.
    pub fn max_quantum(&self) -> f64 {
        self.edges.iter().map(|e| e.quantum).fold(0.0, f64::max)
    }

    /// Coldest bath temperature.
    pub fn min_temperature(&self) -> f64 {
        self.baths
            .values()
            .map(|b| b.temperature)
            .fold(f64::INFINITY, f64::min)
    }

    /// Scale-aware tolerance for deciding that an affinity vanishes.
    pub fn affinity_zero_tolerance(&self) -> f64 {
        1e-9 * self.max_quantum() / self.min_temperature()
    }

    fn ensure_valid(&self) -> Result<()> {
        let report = validate_graph(self);
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(report.to_string()))
        }
    }
}

/// A single structural or physical defect found by [`validate_graph`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonContiguousVertices,
    NonFiniteFrequency(VertexId),
    Disconnected,
    DuplicateEdgeId(EdgeId),
    UnknownEndpoint(EdgeId),
    UnknownBath(EdgeId, Bath),
    NonpositiveRate(EdgeId),
    NegativeQuantum(EdgeId),
    KmsViolation { edge: EdgeId, relative_error: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonContiguousVertices => write!(f, "vertex indices are not 1..N"),
            Violation::NonFiniteFrequency(v) => write!(f, "vertex {v} has non-finite frequency"),
            Violation::Disconnected => write!(f, "graph is disconnected"),
            Violation::DuplicateEdgeId(e) => write!(f, "duplicate edge id {e}"),
            Violation::UnknownEndpoint(e) => write!(f, "edge {e} references a missing vertex"),
            Violation::UnknownBath(e, b) => write!(f, "edge {e} references undeclared bath {b}"),
            Violation::NonpositiveRate(e) => write!(f, "edge {e} has a nonpositive rate"),
            Violation::NegativeQuantum(e) => write!(f, "edge {e} has a negative quantum"),
            Violation::KmsViolation {
                edge,
                relative_error,
            } => write!(
                f,
                "edge {edge} violates detailed balance (relative error {relative_error:.3e})"
            ),
        }
    }
}

/// Result of [`validate_graph`]; empty means the graph is usable.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "pass");
        }
        let items: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", items.join("; "))
    }
}

const KMS_REL_TOL: f64 = 1e-12;

/// Check vertex contiguity, connectivity, edge ids, rate positivity and
/// detailed balance of every edge against its bath temperature.
pub fn validate_graph(graph: &RateGraph) -> ValidationReport {
    let mut violations = Vec::new();
    let n = graph.vertex_count();

    let mut indices: Vec<usize> = graph.vertices.iter().map(|v| v.index).collect();
    indices.sort_unstable();
    if indices != (1..=n).collect::<Vec<_>>() {
        violations.push(Violation::NonContiguousVertices);
    }
    for v in &graph.vertices {
        if !v.frequency.is_finite() {
            violations.push(Violation::NonFiniteFrequency(v.index));
        }
    }

    let mut seen = BTreeSet::new();
    for e in &graph.edges {
        if !seen.insert(e.id) {
            violations.push(Violation::DuplicateEdgeId(e.id));
        }
        if e.tail == 0 || e.tail > n || e.head == 0 || e.head > n || e.tail == e.head {
            violations.push(Violation::UnknownEndpoint(e.id));
            continue;
        }
        match graph.bath(e.bath) {
            None => violations.push(Violation::UnknownBath(e.id, e.bath)),
            Some(spec) => {
                if !(e.rate_up > 0.0) || !(e.rate_down > 0.0) {
                    violations.push(Violation::NonpositiveRate(e.id));
                } else if spec.kind == BathKind::Thermal {
                    let expected = (-e.quantum / spec.temperature).exp();
                    let actual = e.rate_up / e.rate_down;
                    let rel = (actual - expected).abs() / expected;
                    if rel > KMS_REL_TOL {
                        violations.push(Violation::KmsViolation {
                            edge: e.id,
                            relative_error: rel,
                        });
                    }
                }
            }
        }
        if e.quantum < 0.0 {
            violations.push(Violation::NegativeQuantum(e.id));
        }
    }

    if n > 0 && !is_connected(graph) {
        violations.push(Violation::Disconnected);
    }

    ValidationReport { violations }
}

fn is_connected(graph: &RateGraph) -> bool {
    let n = graph.vertex_count();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n + 1];
    let mut queue = VecDeque::from([1]);
    seen[1] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for e in &graph.edges {
            for (a, b) in [(e.tail, e.head), (e.head, e.tail)] {
                if a == v && b >= 1 && b <= n && !seen[b] {
                    seen[b] = true;
                    count += 1;
                    queue.push_back(b);
                }
            }
        }
    }
    count == n
}

/// Total and per-bath rate matrices. Entry `(i, j)` is the transition rate
/// from state `j+1` to state `i+1`; diagonals make every column sum to zero.
#[derive(Debug, Clone)]
pub struct RateMatrix {
    pub total: DMatrix<f64>,
    pub per_bath: BTreeMap<Bath, DMatrix<f64>>,
}

pub fn rate_matrix(graph: &RateGraph) -> Result<RateMatrix> {
    graph.ensure_valid()?;
    let n = graph.vertex_count();
    let mut per_bath: BTreeMap<Bath, DMatrix<f64>> = graph
        .baths
        .keys()
        .map(|&b| (b, DMatrix::zeros(n, n)))
        .collect();
    for e in &graph.edges {
        let m = per_bath.get_mut(&e.bath).expect("validated bath");
        m[(e.head - 1, e.tail - 1)] += e.rate_up;
        m[(e.tail - 1, e.head - 1)] += e.rate_down;
    }
    for m in per_bath.values_mut() {
        for j in 0..n {
            let col_sum: f64 = (0..n).filter(|&i| i != j).map(|i| m[(i, j)]).sum();
            m[(j, j)] = -col_sum;
        }
    }
    let mut total = DMatrix::zeros(n, n);
    for m in per_bath.values() {
        total += m;
    }
    Ok(RateMatrix { total, per_bath })
}

/// Spanning tree of the multigraph plus the excluded chord edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximalTree {
    pub tree_edge_ids: BTreeSet<EdgeId>,
    pub chord_edge_ids: BTreeSet<EdgeId>,
}

/// Deterministic spanning tree: breadth-first from vertex 1, scanning edges
/// in ascending id order. Chord count is |E| - |V| + 1.
pub fn spanning_tree_and_chords(graph: &RateGraph) -> Result<MaximalTree> {
    let n = graph.vertex_count();
    let mut in_tree = vec![false; n + 1];
    let mut tree = BTreeSet::new();
    in_tree[1] = true;
    let mut frontier = VecDeque::from([1]);
    while let Some(v) = frontier.pop_front() {
        for e in &graph.edges {
            let other = if e.tail == v {
                e.head
            } else if e.head == v {
                e.tail
            } else {
                continue;
            };
            if !in_tree[other] {
                in_tree[other] = true;
                tree.insert(e.id);
                frontier.push_back(other);
            }
        }
    }
    if tree.len() != n - 1 {
        return Err(Error::Disconnected);
    }
    let chords = graph
        .edges
        .iter()
        .map(|e| e.id)
        .filter(|id| !tree.contains(id))
        .collect();
    Ok(MaximalTree {
        tree_edge_ids: tree,
        chord_edge_ids: chords,
    })
}

/// A simple circuit in canonical form: the vertex sequence starts at the
/// lowest vertex and, of the two orientations, takes the one whose first
/// traversed edge has the smaller id. `edge_ids[k]` joins `vertex_seq[k]`
/// to `vertex_seq[(k+1) % len]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Circuit {
    vertex_seq: Vec<VertexId>,
    edge_ids: Vec<EdgeId>,
}

impl Circuit {
    /// Canonicalize a closed walk given as parallel vertex/edge sequences.
    /// The walk must already be simple (no vertex or edge repeats).
    pub fn canonical(vertex_seq: &[VertexId], edge_ids: &[EdgeId]) -> Self {
        let k = vertex_seq.len();
        assert_eq!(k, edge_ids.len());
        assert!(k >= 2, "a simple circuit traverses at least two edges");
        let start = vertex_seq
            .iter()
            .enumerate()
            .min_by_key(|&(_, v)| v)
            .map(|(i, _)| i)
            .unwrap();
        let fwd_v: Vec<_> = (0..k).map(|t| vertex_seq[(start + t) % k]).collect();
        let fwd_e: Vec<_> = (0..k).map(|t| edge_ids[(start + t) % k]).collect();
        // Reversal keeps the start vertex and walks the other way round.
        let mut rev_v = vec![fwd_v[0]];
        rev_v.extend(fwd_v[1..].iter().rev());
        let rev_e: Vec<_> = fwd_e.iter().rev().copied().collect();
        if fwd_e[0] <= rev_e[0] {
            Circuit {
                vertex_seq: fwd_v,
                edge_ids: fwd_e,
            }
        } else {
            Circuit {
                vertex_seq: rev_v,
                edge_ids: rev_e,
            }
        }
    }

    /// Rebuild a canonical circuit from an unordered set of edges, provided
    /// they form a single simple closed path.
    pub fn from_edge_set(graph: &RateGraph, edge_ids: &BTreeSet<EdgeId>) -> Option<Self> {
        if edge_ids.len() < 2 {
            return None;
        }
        let mut degree: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
        for &id in edge_ids {
            let e = graph.edge(id);
            degree.entry(e.tail).or_default().push(id);
            degree.entry(e.head).or_default().push(id);
        }
        if degree.values().any(|ids| ids.len() != 2) {
            return None;
        }
        if degree.len() != edge_ids.len() {
            return None;
        }
        // Walk from the lowest vertex; a single simple cycle visits every
        // edge exactly once before closing.
        let start = *degree.keys().next().unwrap();
        let mut vseq = vec![start];
        let mut eseq = Vec::with_capacity(edge_ids.len());
        let mut current = start;
        let mut prev_edge: Option<EdgeId> = None;
        loop {
            let next_edge = *degree[&current]
                .iter()
                .find(|&&id| Some(id) != prev_edge)
                .unwrap();
            let e = graph.edge(next_edge);
            let next = if e.tail == current { e.head } else { e.tail };
            eseq.push(next_edge);
            prev_edge = Some(next_edge);
            if next == start {
                break;
            }
            vseq.push(next);
            current = next;
        }
        if eseq.len() != edge_ids.len() {
            return None;
        }
        Some(Circuit::canonical(&vseq, &eseq))
    }

    pub fn len(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_ids.is_empty()
    }

    pub fn vertex_seq(&self) -> &[VertexId] {
        &self.vertex_seq
    }

    pub fn edge_ids(&self) -> &[EdgeId] {
        &self.edge_ids
    }

    pub fn edge_id_set(&self) -> BTreeSet<EdgeId> {
        self.edge_ids.iter().copied().collect()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.vertex_seq.iter().copied().collect()
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        self.edge_ids.contains(&id)
    }

    /// Cyclic comparison against a vertex sequence, in either direction.
    pub fn matches_vertex_cycle(&self, cycle: &[VertexId]) -> bool {
        let k = self.vertex_seq.len();
        if cycle.len() != k {
            return false;
        }
        for shift in 0..k {
            if (0..k).all(|t| self.vertex_seq[t] == cycle[(shift + t) % k]) {
                return true;
            }
            if (0..k).all(|t| self.vertex_seq[t] == cycle[(shift + k - t) % k]) {
                return true;
            }
        }
        false
    }

    /// Compact display form, e.g. `1-3-4`.
    pub fn vertex_string(&self) -> String {
        self.vertex_seq
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

/// Traversal direction of a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Reverse,
}

impl Orientation {
    pub fn signum(self) -> i32 {
        match self {
            Orientation::Forward => 1,
            Orientation::Reverse => -1,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Orientation::Forward => Orientation::Reverse,
            Orientation::Reverse => Orientation::Forward,
        }
    }
}

/// An oriented circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    pub circuit: Circuit,
    pub orientation: Orientation,
}

/// One directed step along a cycle.
#[derive(Debug, Clone, Copy)]
pub struct Step {
    pub from: VertexId,
    pub to: VertexId,
    pub edge_id: EdgeId,
    /// True when the step runs tail → head, i.e. absorbs the quantum.
    pub ascending: bool,
}

impl Cycle {
    pub fn forward(circuit: Circuit) -> Self {
        Cycle {
            circuit,
            orientation: Orientation::Forward,
        }
    }

    pub fn reversed(&self) -> Self {
        Cycle {
            circuit: self.circuit.clone(),
            orientation: self.orientation.reversed(),
        }
    }

    /// Directed edge traversals in cycle order.
    pub fn steps(&self, graph: &RateGraph) -> Vec<Step> {
        let vs = self.circuit.vertex_seq();
        let es = self.circuit.edge_ids();
        let k = es.len();
        let mut steps = Vec::with_capacity(k);
        match self.orientation {
            Orientation::Forward => {
                for t in 0..k {
                    steps.push(make_step(graph, vs[t], vs[(t + 1) % k], es[t]));
                }
            }
            Orientation::Reverse => {
                for t in (0..k).rev() {
                    steps.push(make_step(graph, vs[(t + 1) % k], vs[t], es[t]));
                }
            }
        }
        steps
    }
}

fn make_step(graph: &RateGraph, from: VertexId, to: VertexId, edge_id: EdgeId) -> Step {
    let e = graph.edge(edge_id);
    Step {
        from,
        to,
        edge_id,
        ascending: from == e.tail,
    }
}

/// Enumerate every simple circuit from the fundamental set of a maximal
/// tree: each of the 2^#chords - 1 chord subsets selects a symmetric
/// difference of fundamental edge sets, kept when it forms one simple
/// closed path. Edge sets are carried as bitmasks (|E| ≤ 64 here).
pub fn enumerate_circuits(graph: &RateGraph) -> Result<BTreeSet<Circuit>> {
    graph.ensure_valid()?;
    if graph.edges().len() > 64 {
        return Err(Error::InvalidGraph(
            "edge sets are carried as 64-bit masks; graphs above 64 edges are unsupported".into(),
        ));
    }
    let tree = spanning_tree_and_chords(graph)?;
    let fundamental: Vec<u64> = tree
        .chord_edge_ids
        .iter()
        .map(|&chord| fundamental_circuit_mask(graph, &tree, chord))
        .collect::<Result<_>>()?;

    let mut out = BTreeSet::new();
    let combos: u64 = 1 << fundamental.len();
    for selector in 1..combos {
        let mut mask = 0u64;
        for (bit, fund) in fundamental.iter().enumerate() {
            if selector >> bit & 1 == 1 {
                mask ^= fund;
            }
        }
        if mask == 0 {
            continue;
        }
        let edge_ids: BTreeSet<EdgeId> = (0..graph.edges().len())
            .filter(|&id| mask >> id & 1 == 1)
            .collect();
        if let Some(circuit) = Circuit::from_edge_set(graph, &edge_ids) {
            out.insert(circuit);
        }
    }
    Ok(out)
}

fn fundamental_circuit_mask(graph: &RateGraph, tree: &MaximalTree, chord: EdgeId) -> Result<u64> {
    let e = graph.edge(chord);
    let path = tree_path(graph, &tree.tree_edge_ids, e.tail, e.head)?;
    let mut mask = 1u64 << chord;
    for id in path {
        mask ^= 1 << id;
    }
    Ok(mask)
}

fn tree_path(
    graph: &RateGraph,
    tree_edges: &BTreeSet<EdgeId>,
    from: VertexId,
    to: VertexId,
) -> Result<Vec<EdgeId>> {
    let n = graph.vertex_count();
    let mut parent: Vec<Option<(VertexId, EdgeId)>> = vec![None; n + 1];
    let mut seen = vec![false; n + 1];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &id in tree_edges {
            let e = graph.edge(id);
            let other = if e.tail == v {
                e.head
            } else if e.head == v {
                e.tail
            } else {
                continue;
            };
            if !seen[other] {
                seen[other] = true;
                parent[other] = Some((v, id));
                queue.push_back(other);
            }
        }
    }
    let mut path = Vec::new();
    let mut v = to;
    while v != from {
        let (prev, id) = parent[v].ok_or(Error::Disconnected)?;
        path.push(id);
        v = prev;
    }
    Ok(path)
}

/// Independent enumerator: backtracking over vertex-simple, edge-simple
/// closed walks anchored at their minimal vertex. Produces the same
/// canonical set as [`enumerate_circuits`].
pub fn enumerate_circuits_oracle(graph: &RateGraph) -> Result<BTreeSet<Circuit>> {
    graph.ensure_valid()?;
    let n = graph.vertex_count();
    let mut adjacency: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); n + 1];
    for e in graph.edges() {
        adjacency[e.tail].push((e.head, e.id));
        adjacency[e.head].push((e.tail, e.id));
    }
    for list in &mut adjacency {
        list.sort_unstable_by_key(|&(_, id)| id);
    }

    let mut out = BTreeSet::new();
    let mut vseq: Vec<VertexId> = Vec::new();
    let mut eseq: Vec<EdgeId> = Vec::new();
    let mut on_path = vec![false; n + 1];
    let mut used = vec![false; graph.edges().len()];

    #[allow(clippy::too_many_arguments)]
    fn search(
        start: VertexId,
        current: VertexId,
        adjacency: &[Vec<(VertexId, EdgeId)>],
        vseq: &mut Vec<VertexId>,
        eseq: &mut Vec<EdgeId>,
        on_path: &mut [bool],
        used: &mut [bool],
        out: &mut BTreeSet<Circuit>,
    ) {
        for &(next, edge) in &adjacency[current] {
            if used[edge] {
                continue;
            }
            if next == start {
                // Closing edge: require a larger id than the opening edge so
                // that each circuit is emitted in exactly one direction.
                if !eseq.is_empty() && edge > eseq[0] {
                    eseq.push(edge);
                    out.insert(Circuit::canonical(vseq, eseq));
                    eseq.pop();
                }
                continue;
            }
            if next < start || on_path[next] {
                continue;
            }
            on_path[next] = true;
            used[edge] = true;
            vseq.push(next);
            eseq.push(edge);
            search(start, next, adjacency, vseq, eseq, on_path, used, out);
            vseq.pop();
            eseq.pop();
            used[edge] = false;
            on_path[next] = false;
        }
    }

    for start in 1..=n {
        on_path[start] = true;
        vseq.push(start);
        search(
            start,
            start,
            &adjacency,
            &mut vseq,
            &mut eseq,
            &mut on_path,
            &mut used,
            &mut out,
        );
        vseq.pop();
        on_path[start] = false;
    }
    Ok(out)
}
