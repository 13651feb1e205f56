mod common;

use common::*;
use graphfold_core::convolve::{
    cycle_couplings, hypercube_couplings, hypercycle_to_lattice, lattice_fold,
    partial_hypercycle_convolution,
};
use graphfold_core::dynamics::{
    classical_evolve, classical_first_passage, lindblad_evolve, lindblad_evolve_pure_state,
    unitary_evolve, SinkSpec, TimeGrid,
};
use graphfold_core::graph::{
    build_cycle, build_hypercube, build_hypercycle, build_swap_symmetric_lattice,
    build_weighted_lattice, build_weighted_line, cartesian_product, Graph,
};

fn irregular() -> Graph {
    Graph::new(
        6,
        [(0, 1, 1.0), (1, 2, 0.7), (2, 3, 1.3), (3, 4, 0.4), (4, 5, 2.0), (5, 0, 0.9), (1, 4, 1.1)],
        None,
    )
    .unwrap()
}

#[test]
fn unitary_matches_matrix_exponential() {
    for g in [build_hypercube(3).unwrap(), build_cycle(6).unwrap(), irregular()] {
        let grid = TimeGrid::new(4.0, 0.5).unwrap();
        let curve = unitary_evolve(&g, 0, &grid).unwrap();
        for (s, t) in grid.times().enumerate() {
            let oracle = unitary_probabilities(&g, 0, t);
            for (v, p) in oracle.iter().enumerate() {
                assert!((curve.probability(s, v) - p).abs() < 1e-10, "t={t} v={v}");
            }
        }
    }
}

#[test]
fn product_is_kronecker_sum_exactly() {
    let pairs = [
        (build_cycle(4).unwrap(), build_cycle(6).unwrap()),
        (build_hypercube(2).unwrap(), build_weighted_line(&[0.5, 2.0]).unwrap()),
        (irregular(), build_cycle(4).unwrap()),
    ];
    for (g, h) in pairs {
        let p = cartesian_product(&g, &h).unwrap();
        let expect = kron_sum(&dense_adjacency(&g), &dense_adjacency(&h));
        assert_eq!(dense_adjacency(&p), expect);
    }
}

#[test]
fn hypercube_couplings_are_the_lanczos_chain() {
    for dim in 1..=12 {
        let lanczos = lanczos_couplings(&build_hypercube(dim).unwrap(), 0);
        let closed = hypercube_couplings(dim);
        assert_eq!(lanczos.len(), closed.len(), "D={dim}");
        for (a, b) in lanczos.iter().zip(&closed) {
            assert!((a - b).abs() < 1e-10, "D={dim}: {a} vs {b}");
        }
    }
}

#[test]
fn cycle_couplings_are_the_lanczos_chain() {
    for k in (4..=64).step_by(2).chain([128, 256, 512]) {
        let lanczos = lanczos_couplings(&build_cycle(k).unwrap(), 0);
        let closed = cycle_couplings(k).unwrap();
        assert_eq!(lanczos.len(), closed.len(), "k={k}");
        for (a, b) in lanczos.iter().zip(&closed) {
            assert!((a - b).abs() < 1e-10, "k={k}: {a} vs {b}");
        }
    }
}

fn assert_fold_is_symmetric_projection(lattice: &Graph, side: usize) {
    let folded = lattice_fold(lattice, side).unwrap();
    let oracle = symmetric_subspace_adjacency(lattice, side);
    let got = dense_adjacency(&folded.reduced);
    assert_eq!(got.len(), side * (side + 1) / 2);
    for (p, row) in oracle.iter().enumerate() {
        for (q, x) in row.iter().enumerate() {
            assert!((got[p][q] - x).abs() < 1e-12, "({p},{q}): {} vs {x}", got[p][q]);
        }
    }
}

#[test]
fn fold_is_the_swap_symmetric_block() {
    for k in [4, 6, 8, 10] {
        let lattice = hypercycle_to_lattice(2, k).unwrap().reduced;
        assert_fold_is_symmetric_projection(&lattice, k / 2 + 1);
    }
    assert_fold_is_symmetric_projection(&build_weighted_lattice(&[1.0; 3], &[1.0; 3]).unwrap(), 4);
    let w = [0.8, 1.7, 1.1, 0.6, 1.4, 2.2, 0.9, 1.3, 0.5, 1.9, 1.2, 0.7];
    assert_fold_is_symmetric_projection(&build_swap_symmetric_lattice(4, &w).unwrap(), 4);
}

#[test]
fn hypercycle_lattice_is_product_of_lanczos_lines() {
    let lattice = hypercycle_to_lattice(2, 8).unwrap().reduced;
    let line = build_weighted_line(&lanczos_couplings(&build_cycle(8).unwrap(), 0)).unwrap();
    let expect = kron_sum(&dense_adjacency(&line), &dense_adjacency(&line));
    let got = dense_adjacency(&lattice);
    for (r1, r2) in got.iter().zip(&expect) {
        for (a, b) in r1.iter().zip(r2) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn partial_convolution_is_line_times_ring() {
    let k = 6;
    let cyl = partial_hypercycle_convolution(k).unwrap().reduced;
    let line = build_weighted_line(&lanczos_couplings(&build_cycle(k).unwrap(), 0)).unwrap();
    let expect = kron_sum(&dense_adjacency(&line), &dense_adjacency(&build_cycle(k).unwrap()));
    let got = dense_adjacency(&cyl);
    for (r1, r2) in got.iter().zip(&expect) {
        for (a, b) in r1.iter().zip(r2) {
            assert!((a - b).abs() < 1e-12);
        }
    }
    assert_eq!(build_hypercycle(2, k).unwrap().node_count(), k * k);
}

#[test]
fn lindblad_matches_superoperator_exponential() {
    let cases = [
        (build_weighted_line(&[1.0]).unwrap(), 0, 1, 1.0),
        (build_cycle(4).unwrap(), 0, 2, 0.5),
        (irregular(), 0, 3, 2.0),
    ];
    let grid = TimeGrid::new(3.0, 0.5).unwrap();
    for (g, start, target, gamma) in cases {
        let sink = SinkSpec::new(target, gamma).unwrap();
        let dm = lindblad_evolve(&g, start, &sink, &grid).unwrap();
        let ps = lindblad_evolve_pure_state(&g, start, &sink, &grid, 1e-3).unwrap();
        for (s, t) in grid.times().enumerate() {
            let oracle = lindblad_oracle_populations(&g, start, target, gamma, t);
            for (v, p) in oracle.iter().enumerate() {
                assert!((dm.probability(s, v) - p).abs() < 1e-9, "t={t} v={v}");
                assert!((ps.probability(s, v) - p).abs() < 1e-9, "t={t} v={v}");
            }
        }
    }
}

#[test]
fn classical_matches_generator_exponential() {
    let grid = TimeGrid::new(5.0, 0.5).unwrap();
    for g in [irregular(), build_hypercube(3).unwrap(), build_weighted_line(&[1.0, 3.0, 0.5]).unwrap()] {
        let curve = classical_evolve(&g, 1, &grid).unwrap();
        let fp = classical_first_passage(&g, 1, 3, &grid).unwrap();
        for (s, t) in grid.times().enumerate() {
            let oracle = classical_probabilities(&g, 1, t);
            let absorbing = absorbing_probabilities(&g, 1, 3, t);
            for v in 0..g.node_count() {
                assert!((curve.probability(s, v) - oracle[v]).abs() < 1e-10);
                assert!((fp.probability(s, v) - absorbing[v]).abs() < 1e-10);
            }
        }
    }
}
