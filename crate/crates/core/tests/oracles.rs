//! Cross-checks of the linear-algebra pipeline against independent
//! constructions: a long-time matrix-exponential propagation for the
//! stationary state, an exhaustive spanning-tree sum for the normalization
//! determinant, and the explicit single-circuit flux formula.

use nalgebra::DMatrix;

use heatcycles::{
    build_direct_three_level, enumerate_and_report, enumerate_circuits, rate_matrix, steady_state,
    AbsorptionWireParams, Cycle, DirectThreeLevelParams, DrivenWireParams, ModelSpec, RateGraph,
};

/// Truncated-series matrix exponential; the argument is pre-scaled so the
/// series converges fast.
fn expm_taylor(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut result = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=30 {
        term = (&term * m) / k as f64;
        result += &term;
    }
    result
}

/// Stationary distribution by repeated squaring of exp(W δt), columns
/// renormalized each squaring to hold the probability simplex.
fn steady_by_propagation(w: &DMatrix<f64>) -> Vec<f64> {
    let n = w.nrows();
    let max_diag = (0..n).map(|i| w[(i, i)].abs()).fold(0.0f64, f64::max);
    let dt = 0.5 / max_diag;
    let mut propagator = expm_taylor(&(w * dt));
    for _ in 0..80 {
        propagator = &propagator * &propagator;
        for j in 0..n {
            let s: f64 = (0..n).map(|i| propagator[(i, j)]).sum();
            for i in 0..n {
                propagator[(i, j)] /= s;
            }
        }
    }
    let uniform = nalgebra::DVector::from_element(n, 1.0 / n as f64);
    let p = propagator * uniform;
    p.iter().copied().collect()
}

#[test]
fn stationary_state_matches_long_time_propagation() {
    let (graph, _) =
        heatcycles::build_absorption_wire(&AbsorptionWireParams::reference(0.5)).unwrap();
    let rates = rate_matrix(&graph).unwrap();
    let steady = steady_state(&graph, &rates).unwrap();
    let propagated = steady_by_propagation(&rates.total);
    for (a, b) in steady.populations.iter().zip(&propagated) {
        assert!((a - b).abs() < 1e-9, "solver {a} vs propagation {b} differ");
    }
}

/// All spanning trees by brute force over edge subsets; returns, per root
/// vertex, the sum over trees of the directed rate products toward it.
fn tree_weights(graph: &RateGraph) -> Vec<f64> {
    let n = graph.vertex_count();
    let m = graph.edges().len();
    let mut weights = vec![0.0; n];
    let subsets: u64 = 1 << m;
    for mask in 0..subsets {
        if mask.count_ones() as usize != n - 1 {
            continue;
        }
        let edges: Vec<_> = graph
            .edges()
            .iter()
            .filter(|e| mask >> e.id & 1 == 1)
            .collect();
        // Spanning tree: touches all vertices and is connected.
        let mut seen = vec![false; n + 1];
        let mut stack = vec![1usize];
        seen[1] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for e in &edges {
                let other = if e.tail == v {
                    e.head
                } else if e.head == v {
                    e.tail
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    count += 1;
                    stack.push(other);
                }
            }
        }
        if count != n {
            continue;
        }
        for root in 1..=n {
            // Orient every edge toward the root and multiply the
            // corresponding directed rates.
            let mut depth = vec![usize::MAX; n + 1];
            depth[root] = 0;
            let mut frontier = vec![root];
            while let Some(v) = frontier.pop() {
                for e in &edges {
                    let other = if e.tail == v {
                        e.head
                    } else if e.head == v {
                        e.tail
                    } else {
                        continue;
                    };
                    if depth[other] == usize::MAX {
                        depth[other] = depth[v] + 1;
                        frontier.push(other);
                    }
                }
            }
            let mut product = 1.0;
            for e in &edges {
                // The deeper endpoint moves toward the shallower one.
                let toward_head = depth[e.tail] > depth[e.head];
                product *= if toward_head { e.rate_up } else { e.rate_down };
            }
            weights[root - 1] += product;
        }
    }
    weights
}

#[test]
fn normalization_matches_spanning_tree_sum() {
    for model in [
        ModelSpec::DirectThreeLevel(DirectThreeLevelParams::reference(0.5)),
        ModelSpec::AbsorptionWire(AbsorptionWireParams::reference(0.45)),
    ] {
        let graph = model.build().unwrap();
        let rates = rate_matrix(&graph).unwrap();
        let steady = steady_state(&graph, &rates).unwrap();
        let weights = tree_weights(&graph);
        let total: f64 = weights.iter().sum();
        let rel = (steady.normalization - total).abs() / total;
        assert!(
            rel < 1e-10,
            "{}: determinant {} vs tree sum {}",
            model.name(),
            steady.normalization,
            total
        );
        for (i, (&p, &w)) in steady.populations.iter().zip(&weights).enumerate() {
            let expected = w / total;
            assert!(
                (p - expected).abs() / expected < 1e-10,
                "population {i}: {p} vs {expected}"
            );
        }
    }
}

#[test]
fn triangle_flux_matches_kirchhoff_expression() {
    let graph = build_direct_three_level(&DirectThreeLevelParams::reference(0.5)).unwrap();
    let rates = rate_matrix(&graph).unwrap();
    let steady = steady_state(&graph, &rates).unwrap();
    let circuit = enumerate_circuits(&graph)
        .unwrap()
        .into_iter()
        .next()
        .unwrap();
    let cycle = Cycle::forward(circuit);
    let flux = heatcycles::circuit_flux(&cycle, &graph, &rates, &steady);

    // Directed rate products around the cycle, both ways.
    let mut forward = 1.0;
    let mut backward = 1.0;
    for step in cycle.steps(&graph) {
        let e = graph.edge(step.edge_id);
        if step.ascending {
            forward *= e.rate_up;
            backward *= e.rate_down;
        } else {
            forward *= e.rate_down;
            backward *= e.rate_up;
        }
    }
    let denominator: f64 = tree_weights(&graph).iter().sum();
    let expected = (forward - backward) / denominator;
    assert!(
        (flux - expected).abs() / expected.abs() < 1e-10,
        "flux {flux} vs Kirchhoff {expected}"
    );
}

#[test]
fn driven_circuit_count_decomposes_by_length() {
    let model = ModelSpec::DrivenWire(DrivenWireParams::reference(0.7));
    let graph = model.build().unwrap();
    let circuits = enumerate_circuits(&graph).unwrap();
    let two: Vec<_> = circuits.iter().filter(|c| c.len() == 2).collect();
    let four: Vec<_> = circuits.iter().filter(|c| c.len() == 4).collect();
    assert_eq!(two.len(), 8);
    assert_eq!(four.len(), 96);
    assert_eq!(circuits.len(), 104);
    // The 96 four-edge circuits split as 6 outer vertex pairs with 16
    // parallel-edge selections each.
    let mut by_quadruple: std::collections::BTreeMap<Vec<usize>, usize> = Default::default();
    for c in four {
        let outer: Vec<usize> = c.vertex_set().into_iter().filter(|&v| v >= 3).collect();
        assert_eq!(outer.len(), 2);
        *by_quadruple.entry(outer).or_insert(0) += 1;
    }
    assert_eq!(by_quadruple.len(), 6);
    assert!(by_quadruple.values().all(|&n| n == 16));
}

#[test]
fn wire_edges_balance_energy_around_thermal_circuits() {
    // With three thermal baths every quantum is an eigenfrequency
    // difference, so the signed quanta telescope to zero around any circuit.
    let (graph, _) =
        heatcycles::build_absorption_wire(&AbsorptionWireParams::reference(0.45)).unwrap();
    let (_, _, reports) = enumerate_and_report(&graph).unwrap();
    for report in &reports {
        let cycle = Cycle::forward(report.circuit.clone());
        let net: f64 = cycle
            .steps(&graph)
            .iter()
            .map(|s| {
                let e = graph.edge(s.edge_id);
                if s.ascending {
                    e.quantum
                } else {
                    -e.quantum
                }
            })
            .sum();
        assert!(
            net.abs() < 1e-12,
            "circuit {} exchanges net energy {net}",
            report.circuit.vertex_string()
        );
    }
    // Equivalently, sum of T_alpha X^alpha vanishes per circuit.
    for report in &reports {
        let balance: f64 = report
            .affinities
            .per_bath
            .iter()
            .map(|(&b, &x)| graph.temperature(b) * x)
            .sum();
        assert!(balance.abs() < 1e-12);
    }
}

#[test]
fn driven_tricycles_break_energy_balance_by_work() {
    let model = ModelSpec::DrivenWire(DrivenWireParams::reference(0.7));
    let graph = model.build().unwrap();
    let (_, _, reports) = enumerate_and_report(&graph).unwrap();
    for report in &reports {
        let balance: f64 = report
            .affinities
            .per_bath
            .iter()
            .map(|(&b, &x)| graph.temperature(b) * x)
            .sum();
        match report.class {
            heatcycles::CircuitClass::Tricycle => assert!(
                balance.abs() > 1e-6,
                "tricycle {} balances energy",
                report.circuit.vertex_string()
            ),
            _ => assert!(
                balance.abs() < 1e-12,
                "{} ({}) exchanges work {balance}",
                report.circuit.vertex_string(),
                report.class
            ),
        }
    }
}
