//! Group-probability equivalence between each family and its convolution.

use graphfold_core::analysis::{verify_equivalence, SinkPair};
use graphfold_core::convolve::{
    cycle_to_line, hypercube_to_line, hypercycle_to_lattice, lattice_fold,
    partial_hypercycle_convolution, ConvolutionResult,
};
use graphfold_core::dynamics::{SinkSpec, TimeGrid};
use graphfold_core::graph::{
    build_cycle, build_hypercube, build_hypercycle, build_swap_symmetric_lattice, farthest_node,
    Graph,
};

fn grid() -> TimeGrid {
    TimeGrid::new(10.0, 0.05).unwrap()
}

fn unitary_deviation(g: &Graph, r: &ConvolutionResult) -> f64 {
    verify_equivalence(g, 0, r, 0, &grid(), None).unwrap()
}

#[test]
fn hypercubes_collapse_to_lines() {
    for dim in 1..=8 {
        let g = build_hypercube(dim).unwrap();
        let dev = unitary_deviation(&g, &hypercube_to_line(dim).unwrap());
        assert!(dev < 1e-8, "D={dim}: {dev:e}");
    }
}

#[test]
fn cycles_collapse_to_lines() {
    for k in (4..=64).step_by(2).chain([96, 128, 192, 256]) {
        let g = build_cycle(k).unwrap();
        let dev = unitary_deviation(&g, &cycle_to_line(k).unwrap());
        assert!(dev < 1e-8, "k={k}: {dev:e}");
    }
}

#[test]
fn hypercycles_collapse_to_lattices() {
    for (dim, k) in [(1, 8), (2, 4), (2, 6), (2, 8), (3, 4)] {
        let g = build_hypercycle(dim, k).unwrap();
        let dev = unitary_deviation(&g, &hypercycle_to_lattice(dim, k).unwrap());
        assert!(dev < 1e-8, "D={dim} k={k}: {dev:e}");
    }
}

#[test]
fn torus_collapses_to_cylinder_and_fold() {
    for k in [4, 6, 8] {
        let torus = build_hypercycle(2, k).unwrap();
        let partial = partial_hypercycle_convolution(k).unwrap();
        assert!(unitary_deviation(&torus, &partial) < 1e-8, "k={k}");
        let lattice = hypercycle_to_lattice(2, k).unwrap();
        let chain = lattice.then(&lattice_fold(&lattice.reduced, k / 2 + 1).unwrap()).unwrap();
        assert!(unitary_deviation(&torus, &chain) < 1e-8, "k={k}");
    }
}

#[test]
fn sink_curves_agree_through_the_fold() {
    let w = [0.8, 1.7, 1.1, 0.6, 1.4, 2.2, 0.9, 1.3, 0.5, 1.9, 1.2, 0.7];
    let lattice = build_swap_symmetric_lattice(4, &w).unwrap();
    let fold = lattice_fold(&lattice, 4).unwrap();
    let target = farthest_node(&lattice, 0).unwrap();
    let pair = SinkPair {
        original: SinkSpec::new(target, 1.0).unwrap(),
        reduced: SinkSpec::new(fold.map.apply(target).unwrap(), 1.0).unwrap(),
    };
    let grid = TimeGrid::new(5.0, 0.1).unwrap();
    let dev = verify_equivalence(&lattice, 0, &fold, 0, &grid, Some(&pair)).unwrap();
    assert!(dev < 1e-8, "{dev:e}");
}

#[test]
fn mismatched_sink_rates_are_rejected() {
    let g = build_cycle(6).unwrap();
    let r = cycle_to_line(6).unwrap();
    let pair = SinkPair {
        original: SinkSpec::new(3, 1.0).unwrap(),
        reduced: SinkSpec::new(3, 0.5).unwrap(),
    };
    assert!(verify_equivalence(&g, 0, &r, 0, &grid(), Some(&pair)).is_err());
    let wrong_target = SinkPair {
        original: SinkSpec::new(3, 1.0).unwrap(),
        reduced: SinkSpec::new(2, 1.0).unwrap(),
    };
    assert!(verify_equivalence(&g, 0, &r, 0, &grid(), Some(&wrong_target)).is_err());
}
