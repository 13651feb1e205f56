use graphfold::format::{
    family_from_meta, family_meta, format_g12, format_weight, graph_from_json, graph_to_json,
    map_from_json, map_to_json, write_curve_csv, GraphFile,
};
use graphfold::CliError;
use graphfold_core::convolve::cycle_to_line;
use graphfold_core::dynamics::{unitary_evolve, TimeGrid};
use graphfold_core::graph::{Graph, GraphFamilySpec};
use proptest::prelude::*;

fn random_graph() -> impl Strategy<Value = Graph> {
    (2usize..12).prop_flat_map(|n| {
        proptest::collection::btree_map((0..n, 0..n), 1e-6f64..1e6, 0..3 * n).prop_map(move |m| {
            let edges: Vec<_> = m
                .into_iter()
                .filter(|((i, j), _)| i < j)
                .map(|((i, j), w)| (i, j, w))
                .collect();
            Graph::new(n, edges, None).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn graph_json_round_trips_exactly(g in random_graph()) {
        let text = graph_to_json(&GraphFile::new(g.clone(), None));
        let back = graph_from_json(&text, "mem").unwrap().graph;
        prop_assert_eq!(back.node_count(), g.node_count());
        prop_assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn weights_keep_twelve_digits_and_round_trip(w in 1e-9f64..1e9) {
        let s = format_weight(w);
        prop_assert_eq!(s.parse::<f64>().unwrap(), w);
        prop_assert!(s.chars().filter(char::is_ascii_digit).skip_while(|&c| c == '0').count() >= 12);
    }
}

#[test]
fn family_meta_round_trips() {
    let specs = [
        GraphFamilySpec::Hypercube { dim: 3 },
        GraphFamilySpec::Cycle { k: 8 },
        GraphFamilySpec::Hypercycle { dim: 2, k: 6 },
        GraphFamilySpec::WeightedLine { couplings: vec![0.5, 2.0] },
        GraphFamilySpec::WeightedLattice { rows: vec![1.0], cols: vec![1.5, 0.25] },
    ];
    for spec in specs {
        let file = GraphFile::new(spec.build().unwrap(), Some(family_meta(&spec)));
        let back = graph_from_json(&graph_to_json(&file), "mem").unwrap();
        assert_eq!(back.family(), Some(spec.clone()));
        assert_eq!(family_from_meta(&family_meta(&spec)), Some(spec));
    }
}

#[test]
fn parse_errors_carry_position() {
    let text = "{\n  \"nodes\": 3,\n  \"edges\": [[0, 1, 1.0],, ]\n}";
    match graph_from_json(text, "bad.json") {
        Err(CliError::Parse { path, line, column, .. }) => {
            assert_eq!(path, "bad.json");
            assert_eq!(line, 3);
            assert!(column > 0);
        }
        other => panic!("{other:?}"),
    }
    let unknown = "{\"nodes\": 2, \"edges\": [], \"colour\": 1}";
    assert!(matches!(graph_from_json(unknown, "u"), Err(CliError::Parse { .. })));
}

#[test]
fn field_errors_name_the_edge() {
    let cases = [
        ("{\"nodes\": 3, \"edges\": [[0, 1, 1.0], [2, 1, 1.0]]}", "edges[1]"),
        ("{\"nodes\": 3, \"edges\": [[0, 3, 1.0]]}", "edges[0]"),
        ("{\"nodes\": 3, \"edges\": [[0, 1, 1.0], [1, 2, -1.0]]}", "edges[1]"),
        ("{\"nodes\": 2, \"edges\": [[0, 1, 1.0]], \"meta\": 3}", "meta"),
    ];
    for (text, expect) in cases {
        match graph_from_json(text, "g") {
            Err(CliError::Invalid { field, .. }) => assert_eq!(field, expect),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn map_round_trips() {
    let r = cycle_to_line(10).unwrap();
    let back = map_from_json(&map_to_json(&r), "m").unwrap();
    assert_eq!(back, r.map);
    assert!(matches!(map_from_json("{\"assignment\": [0, 2], \"target_count\": 2}", "m"), Err(CliError::Invalid { .. })));
}

#[test]
fn g12_matches_printf() {
    let cases = [
        (0.0, "0"),
        (1.0, "1"),
        (0.5, "0.5"),
        (2f64.sqrt(), "1.41421356237"),
        (1e-5, "1e-05"),
        (123456789012.0, "123456789012"),
        (1234567890123.0, "1.23456789012e+12"),
        (-0.25, "-0.25"),
        (0.0001, "0.0001"),
    ];
    for (x, expect) in cases {
        let got = format_g12(x);
        assert_eq!(got, expect, "{x}");
    }
}

#[test]
fn curve_csv_has_one_row_per_sample() {
    let g = GraphFamilySpec::Cycle { k: 4 }.build().unwrap();
    let grid = TimeGrid::new(2.0, 0.5).unwrap();
    let curve = unitary_evolve(&g, 0, &grid).unwrap();
    let mut buf = Vec::new();
    write_curve_csv(&mut buf, &curve).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,node_0,node_1,node_2,node_3");
    assert_eq!(lines.len(), grid.len() + 1);
    assert_eq!(lines[1], "0,1,0,0,0");
    assert!(lines.iter().skip(1).all(|l| l.split(',').count() == 5));
}
