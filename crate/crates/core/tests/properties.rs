//! Property tests: enumerator equivalence on random multigraphs, canonical
//! form stability, detailed balance of the rate function, coefficient sum
//! rules and the reversal algebra of affinities and fluxes.

use proptest::prelude::*;
use std::collections::BTreeSet;

use heatcycles::{
    affinity, bose_rate, circuit_flux, enumerate_circuits, enumerate_circuits_oracle, rate_matrix,
    spanning_tree_and_chords, steady_state, validate_graph, AbsorptionCoefficients,
    AbsorptionWireParams, Bath, BathSpec, Circuit, Cycle, DrivenCoefficients, DrivenWireParams,
    Edge, RateGraph, Vertex,
};

#[derive(Debug, Clone)]
struct RandomGraph {
    n: usize,
    // (u, v, bath index, quantum) with u < v; the first n-1 entries join
    // vertex k+2 to a lower vertex, keeping the graph connected.
    pairs: Vec<(usize, usize, usize, f64)>,
}

fn random_graph_strategy() -> impl Strategy<Value = RandomGraph> {
    (3usize..=6)
        .prop_flat_map(|n| {
            let tree = proptest::collection::vec((0usize..1000, 0usize..3, 0.05f64..2.0), n - 1);
            let extra =
                proptest::collection::vec((1usize..=n, 1usize..=n, 0usize..3, 0.05f64..2.0), 0..=7);
            (Just(n), tree, extra)
        })
        .prop_map(|(n, tree, extra)| {
            let mut pairs = Vec::new();
            for (k, (pick, bath, quantum)) in tree.into_iter().enumerate() {
                let v = k + 2;
                let u = pick % (v - 1) + 1;
                pairs.push((u, v, bath, quantum));
            }
            for (a, b, bath, quantum) in extra {
                if a != b {
                    pairs.push((a.min(b), a.max(b), bath, quantum));
                }
            }
            RandomGraph { n, pairs }
        })
}

fn build_random_graph(spec: &RandomGraph) -> RateGraph {
    let baths = vec![
        BathSpec::thermal(Bath::Cold, 5.0, 1, 1e-4),
        BathSpec::thermal(Bath::Hot, 10.0, 1, 1e-4),
        BathSpec::thermal(Bath::Work, 20.0, 1, 1e-4),
    ];
    let temps = [5.0, 10.0, 20.0];
    let vertices = (1..=spec.n)
        .map(|index| Vertex {
            index,
            frequency: index as f64 * 0.1,
        })
        .collect();
    let edges = spec
        .pairs
        .iter()
        .enumerate()
        .map(|(id, &(u, v, bath, quantum))| {
            let down = 1e-4 * (1.0 + quantum);
            Edge {
                id,
                tail: u,
                head: v,
                bath: Bath::ALL[bath],
                quantum,
                rate_up: down * (-quantum / temps[bath]).exp(),
                rate_down: down,
            }
        })
        .collect();
    RateGraph::new(vertices, edges, baths)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn enumerators_agree_on_random_multigraphs(spec in random_graph_strategy()) {
        let graph = build_random_graph(&spec);
        prop_assert!(validate_graph(&graph).is_valid());
        let tree = spanning_tree_and_chords(&graph).unwrap();
        prop_assert_eq!(
            tree.chord_edge_ids.len(),
            graph.edges().len() + 1 - graph.vertex_count()
        );
        let combinatorial = enumerate_circuits(&graph).unwrap();
        let backtracking = enumerate_circuits_oracle(&graph).unwrap();
        prop_assert_eq!(&combinatorial, &backtracking);
        for circuit in &combinatorial {
            // Simple: no vertex or edge repeats, length at least two.
            let vs: BTreeSet<_> = circuit.vertex_seq().iter().collect();
            let es: BTreeSet<_> = circuit.edge_ids().iter().collect();
            prop_assert_eq!(vs.len(), circuit.vertex_seq().len());
            prop_assert_eq!(es.len(), circuit.edge_ids().len());
            prop_assert!(circuit.len() >= 2);
            // Canonicalization is stable and orientation-blind.
            let again = Circuit::canonical(circuit.vertex_seq(), circuit.edge_ids());
            prop_assert_eq!(&again, circuit);
            let mut rv = vec![circuit.vertex_seq()[0]];
            rv.extend(circuit.vertex_seq()[1..].iter().rev());
            let re: Vec<_> = circuit.edge_ids().iter().rev().copied().collect();
            prop_assert_eq!(&Circuit::canonical(&rv, &re), circuit);
        }
    }

    #[test]
    fn affinity_and_flux_reverse_consistently(spec in random_graph_strategy()) {
        let graph = build_random_graph(&spec);
        let rates = rate_matrix(&graph).unwrap();
        let steady = steady_state(&graph, &rates).unwrap();
        for circuit in enumerate_circuits(&graph).unwrap() {
            let fwd = Cycle::forward(circuit);
            let rev = fwd.reversed();
            let xf = affinity(&fwd, &graph).unwrap();
            let xr = affinity(&rev, &graph).unwrap();
            for (&b, &x) in &xf.per_bath {
                prop_assert!((x + xr.per_bath[&b]).abs() < 1e-12);
            }
            let i_f = circuit_flux(&fwd, &graph, &rates, &steady);
            let i_r = circuit_flux(&rev, &graph, &rates, &steady);
            prop_assert_eq!(i_f, -i_r);
            // Entropy production of the circuit is orientation free and
            // nonnegative.
            let s_f = i_f * xf.total();
            let s_r = i_r * xr.total();
            prop_assert!((s_f - s_r).abs() <= 1e-15 + 1e-9 * s_f.abs());
            prop_assert!(s_f >= -1e-15);
        }
    }

    #[test]
    fn detailed_balance_of_rate_function(
        omega in 0.01f64..5.0,
        temperature in 0.05f64..50.0,
        dimension in 1u32..4,
    ) {
        let bath = BathSpec::thermal(Bath::Cold, temperature, dimension, 1e-6);
        let (up, down) = bose_rate(omega, &bath).unwrap();
        let ratio = down / up;
        let expected = (-omega / temperature).exp();
        prop_assert!((ratio - expected).abs() / expected < 1e-14);
    }

    #[test]
    fn absorption_coefficient_sum_rules(
        delta in -0.9f64..0.9,
        g in 1e-4f64..0.5,
    ) {
        let params = AbsorptionWireParams {
            g,
            ..AbsorptionWireParams::reference(0.4)
        }
        .with_detuning(delta);
        let c = AbsorptionCoefficients::from_params(&params);
        let cp2 = c.c_plus * c.c_plus;
        let cm2 = c.c_minus * c.c_minus;
        let cpp2 = c.cprime_plus * c.cprime_plus;
        let cpm2 = c.cprime_minus * c.cprime_minus;
        prop_assert!((cp2 + cm2 - 1.0).abs() < 1e-12);
        prop_assert!((cpp2 + cpm2 - 1.0).abs() < 1e-12);
        prop_assert!((cp2 - cpm2).abs() < 1e-12);
        prop_assert!((cm2 - cpp2).abs() < 1e-12);
    }

    #[test]
    fn driven_coefficient_sum_rules(
        g in 1e-3f64..0.5,
        lambda in 1e-3f64..0.5,
    ) {
        let params = DrivenWireParams {
            g,
            lambda,
            ..DrivenWireParams::reference(0.7)
        };
        let c = DrivenCoefficients::from_params(&params);
        prop_assert!((c.u_plus * c.u_minus + 1.0).abs() < 1e-12);
        for j in 3..=6 {
            prop_assert!((c.weight(1, j) + c.weight(2, j) - 0.5).abs() < 1e-12);
        }
        prop_assert!((c.omega[0] + c.omega[1]).abs() < 1e-15);
        prop_assert!((c.omega[2] + c.omega[5]).abs() < 1e-15);
        prop_assert!((c.omega[3] + c.omega[4]).abs() < 1e-15);
    }
}
