//! Dynamics-preserving graph reductions.
//!
//! Every reduction assumes the walker starts at a distinguished corner: the
//! all-zeros hypercube vertex, ring node 0, or the torus / lattice origin.
//! The returned [`GroupMap`] merges nodes whose amplitudes coincide for that
//! start only.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{
    build_cycle, build_weighted_line, cartesian_power, cartesian_product, check_ring_size,
    check_size, Graph, GroupMap, MAX_NODES,
};
use crate::{Error, Result};

/// Which reduction produced a [`ConvolutionResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Identity,
    HypercubeLine,
    CycleLine,
    ProductOfLines,
    PartialProduct,
    LatticeFold,
    Composite,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Identity => "identity",
            Method::HypercubeLine => "hypercube_line",
            Method::CycleLine => "cycle_line",
            Method::ProductOfLines => "product_of_lines",
            Method::PartialProduct => "partial_product",
            Method::LatticeFold => "lattice_fold",
            Method::Composite => "composite",
        }
    }
}

/// A reduced graph together with the map from original to reduced nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionResult {
    pub reduced: Graph,
    pub map: GroupMap,
    pub method: Method,
}

impl ConvolutionResult {
    pub fn new(reduced: Graph, map: GroupMap, method: Method) -> Result<Self> {
        if map.target_count() != reduced.node_count() {
            return Err(Error::DimensionMismatch {
                what: "map target count vs reduced node count",
                expected: reduced.node_count(),
                found: map.target_count(),
            });
        }
        Ok(ConvolutionResult {
            reduced,
            map,
            method,
        })
    }

    /// The trivial convolution of a graph onto itself.
    pub fn identity(graph: &Graph) -> Self {
        ConvolutionResult {
            reduced: graph.clone(),
            map: GroupMap::identity(graph.node_count()),
            method: Method::Identity,
        }
    }

    /// Applies `next` to this result's reduced graph and composes the maps.
    pub fn then(&self, next: &ConvolutionResult) -> Result<ConvolutionResult> {
        let map = compose_maps(&next.map, &self.map)?;
        ConvolutionResult::new(next.reduced.clone(), map, Method::Composite)
    }
}

/// `β_{i,i+1} = √(i (D + 1 − i))` for `i = 1..=D`.
pub fn hypercube_couplings(dim: usize) -> Vec<f64> {
    (1..=dim)
        .map(|i| libm::sqrt((i * (dim + 1 - i)) as f64))
        .collect()
}

/// `γ_{i,i+1}` for `i = 1..κ−1` with `κ = k/2 + 1`: `√2` at both ends, 1 inside.
pub fn cycle_couplings(k: usize) -> Result<Vec<f64>> {
    check_ring_size(k)?;
    let half = k / 2;
    Ok((1..=half)
        .map(|i| {
            if i == 1 || i == half {
                core::f64::consts::SQRT_2
            } else {
                1.0
            }
        })
        .collect())
}

fn ring_distance(j: usize, k: usize) -> usize {
    j.min(k - j)
}

/// Hypercube of dimension `dim` onto the `(dim + 1)`-node weighted line;
/// a vertex goes to the line node equal to its Hamming weight.
pub fn hypercube_to_line(dim: usize) -> Result<ConvolutionResult> {
    if dim == 0 {
        return Err(Error::Domain("hypercube dimension must be at least 1".into()));
    }
    if dim >= 64 {
        return Err(Error::Size {
            nodes: u128::MAX,
            limit: MAX_NODES,
        });
    }
    check_size(1u128 << dim)?;
    let reduced = build_weighted_line(&hypercube_couplings(dim))?;
    let assignment = (0..1usize << dim).map(|x| x.count_ones() as usize).collect();
    let map = GroupMap::new(1 << dim, dim + 1, assignment)?;
    ConvolutionResult::new(reduced, map, Method::HypercubeLine)
}

/// `k`-ring onto the `(k/2 + 1)`-node line; ring node `j` goes to its ring
/// distance from node 0.
pub fn cycle_to_line(k: usize) -> Result<ConvolutionResult> {
    let couplings = cycle_couplings(k)?;
    check_size(k as u128)?;
    let reduced = build_weighted_line(&couplings)?;
    let assignment = (0..k).map(|j| ring_distance(j, k)).collect();
    let map = GroupMap::new(k, k / 2 + 1, assignment)?;
    ConvolutionResult::new(reduced, map, Method::CycleLine)
}

/// Hypercycle `(dim, k)` onto the `dim`-fold Cartesian power of the reduced
/// ring line: a `κ × … × κ` lattice. Coordinates map to their ring
/// distances, mixed-radix encoded.
pub fn hypercycle_to_lattice(dim: usize, k: usize) -> Result<ConvolutionResult> {
    if dim == 0 {
        return Err(Error::Domain("hypercycle dimension must be at least 1".into()));
    }
    check_ring_size(k)?;
    let kappa = k / 2 + 1;
    check_size((kappa as u128).checked_pow(dim as u32).unwrap_or(u128::MAX))?;
    let source = (k as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    check_size(source)?;
    let line = cycle_to_line(k)?;
    let reduced = cartesian_power(&line.reduced, dim)?;
    let source = source as usize;
    let mut assignment = Vec::with_capacity(source);
    for idx in 0..source {
        let mut rest = idx;
        let mut digits = vec![0usize; dim];
        for d in digits.iter_mut().rev() {
            *d = rest % k;
            rest /= k;
        }
        let image = digits
            .iter()
            .fold(0usize, |acc, &j| acc * kappa + ring_distance(j, k));
        assignment.push(image);
    }
    let map = GroupMap::new(source, reduced.node_count(), assignment)?;
    ConvolutionResult::new(reduced, map, Method::ProductOfLines)
}

/// Torus `(2, k)` with only the first ring reduced: the cylinder
/// `line(γ) □ ring(k)` with `κ · k` nodes.
pub fn partial_hypercycle_convolution(k: usize) -> Result<ConvolutionResult> {
    let line = cycle_to_line(k)?;
    let ring = build_cycle(k)?;
    check_size(k as u128 * k as u128)?;
    let reduced = cartesian_product(&line.reduced, &ring)?;
    let assignment = (0..k * k)
        .map(|idx| ring_distance(idx / k, k) * k + idx % k)
        .collect();
    let map = GroupMap::new(k * k, reduced.node_count(), assignment)?;
    ConvolutionResult::new(reduced, map, Method::PartialProduct)
}

/// Index of the unordered pair `{a, b}` (`a ≤ b`) among the upper-triangle
/// pairs of a `side × side` lattice, enumerated row-major.
pub fn fold_index(a: usize, b: usize, side: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    // rows 0..a hold side, side - 1, ..., side - a + 1 pairs
    a * side - a * a.saturating_sub(1) / 2 + (b - a)
}

/// Folds a swap-symmetric `side × side` lattice across its main diagonal.
///
/// 1. Edges with an endpoint strictly below the diagonal are discarded.
/// 2. Each diagonal square collapses into a line: the pair of mirror edges
///    incident to a diagonal node merges into one edge.
/// 3. Merged edges carry `√(w₁² + w₂²)`; upper-triangle edges away from the
///    diagonal keep their weight.
///
/// Node `(a, b)` of the lattice has index `a * side + b`; the result has
/// `side (side + 1) / 2` nodes labelled `[a, b]` with `a ≤ b`.
pub fn lattice_fold(lattice: &Graph, side: usize) -> Result<ConvolutionResult> {
    if side == 0 {
        return Err(Error::Domain("lattice side must be positive".into()));
    }
    if lattice.node_count() != side * side {
        return Err(Error::DimensionMismatch {
            what: "lattice node count (side²)",
            expected: side * side,
            found: lattice.node_count(),
        });
    }
    let coords = |x: usize| (x / side, x % side);
    let mirror = |x: usize| {
        let (a, b) = coords(x);
        b * side + a
    };
    for e in lattice.edges() {
        let (a, b) = coords(e.i);
        let (c, d) = coords(e.j);
        if a.abs_diff(c) + b.abs_diff(d) != 1 {
            return Err(Error::Domain(format!(
                "edge ({a},{b})-({c},{d}) is not a nearest-neighbour lattice edge"
            )));
        }
        match lattice.weight(mirror(e.i), mirror(e.j)) {
            Some(w) if (w - e.weight).abs() <= 1e-12 * e.weight.max(1.0) => {}
            _ => {
                return Err(Error::Domain(format!(
                    "lattice is not symmetric under coordinate swap at edge ({a},{b})-({c},{d})"
                )))
            }
        }
    }

    let upper = |x: usize| {
        let (a, b) = coords(x);
        a <= b
    };
    let diagonal = |x: usize| {
        let (a, b) = coords(x);
        a == b
    };
    let pair_index = |x: usize| {
        let (a, b) = coords(x);
        fold_index(a, b, side)
    };

    let mut edges = Vec::new();
    for e in lattice.edges() {
        if !(upper(e.i) && upper(e.j)) {
            continue;
        }
        let weight = if diagonal(e.i) || diagonal(e.j) {
            let partner = lattice
                .weight(mirror(e.i), mirror(e.j))
                .unwrap_or(e.weight);
            libm::sqrt(e.weight * e.weight + partner * partner)
        } else {
            e.weight
        };
        edges.push((pair_index(e.i), pair_index(e.j), weight));
    }

    let count = side * (side + 1) / 2;
    let mut labels = Vec::with_capacity(count);
    for a in 0..side {
        for b in a..side {
            labels.push(vec![a as u64, b as u64]);
        }
    }
    let reduced = Graph::new(count, edges, Some(labels))?;
    let assignment = (0..side * side).map(pair_index).collect();
    let map = GroupMap::new(side * side, count, assignment)?;
    ConvolutionResult::new(reduced, map, Method::LatticeFold)
}

/// `outer ∘ inner`.
pub fn compose_maps(outer: &GroupMap, inner: &GroupMap) -> Result<GroupMap> {
    outer.compose(inner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_hypercube, build_hypercycle};
    use core::f64::consts::SQRT_2;

    fn couplings(g: &Graph) -> Vec<f64> {
        g.edges().iter().map(|e| e.weight).collect()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn hypercube_line_couplings() {
        let r = hypercube_to_line(2).unwrap();
        assert!(close(&couplings(&r.reduced), &[SQRT_2, SQRT_2]));
        let r = hypercube_to_line(3).unwrap();
        assert!(close(&couplings(&r.reduced), &[3f64.sqrt(), 2.0, 3f64.sqrt()]));
        let r = hypercube_to_line(4).unwrap();
        assert!(close(&couplings(&r.reduced), &[2.0, 6f64.sqrt(), 6f64.sqrt(), 2.0]));
        assert_eq!(r.map.source_count(), 16);
        assert_eq!(r.method, Method::HypercubeLine);
    }

    #[test]
    fn hypercube_couplings_are_palindromic() {
        for dim in 1..=12 {
            let b = hypercube_couplings(dim);
            for i in 0..dim {
                assert_eq!(b[i], b[dim - 1 - i]);
            }
        }
    }

    #[test]
    fn hypercube_preimages_are_binomial() {
        for dim in 1..=10usize {
            let r = hypercube_to_line(dim).unwrap();
            let mut binom = 1usize;
            for (h, group) in r.map.preimages().iter().enumerate() {
                assert_eq!(group.len(), binom, "dim {dim} shell {h}");
                binom = binom * (dim - h) / (h + 1);
            }
        }
    }

    #[test]
    fn cycle_line_couplings() {
        let r = cycle_to_line(8).unwrap();
        assert_eq!(r.reduced.node_count(), 5);
        assert!(close(&couplings(&r.reduced), &[SQRT_2, 1.0, 1.0, SQRT_2]));
        let r4 = cycle_to_line(4).unwrap();
        assert!(close(
            &couplings(&r4.reduced),
            &couplings(&hypercube_to_line(2).unwrap().reduced)
        ));
        let r6 = cycle_to_line(6).unwrap();
        assert!(close(&couplings(&r6.reduced), &[SQRT_2, 1.0, SQRT_2]));
        assert!(matches!(cycle_to_line(7), Err(Error::Domain(_))));
    }

    #[test]
    fn cycle_preimage_sizes() {
        for k in [4, 6, 8, 10, 20] {
            let sizes: Vec<_> = cycle_to_line(k)
                .unwrap()
                .map
                .preimages()
                .iter()
                .map(Vec::len)
                .collect();
            assert_eq!(sizes[0], 1);
            assert_eq!(sizes[k / 2], 1);
            assert!(sizes[1..k / 2].iter().all(|&s| s == 2));
        }
    }

    #[test]
    fn hypercycle_lattices() {
        let r = hypercycle_to_lattice(2, 8).unwrap();
        assert_eq!(r.reduced.node_count(), 25);
        let r = hypercycle_to_lattice(2, 6).unwrap();
        assert_eq!(r.reduced.node_count(), 16);
        let torus = build_hypercycle(2, 6).unwrap();
        // coordinates (5, 2) -> ring distances (1, 2)
        let src = torus.node_with_label(&[5, 2]).unwrap();
        let dst = r.reduced.node_with_label(&[1, 2]).unwrap();
        assert_eq!(r.map.apply(src), Some(dst));
        let single = hypercycle_to_lattice(1, 6).unwrap();
        let line = cycle_to_line(6).unwrap();
        assert_eq!(single.reduced, line.reduced);
        assert_eq!(single.map, line.map);
    }

    #[test]
    fn lattice_axis_weights_follow_gamma() {
        let r = hypercycle_to_lattice(2, 8).unwrap();
        let g = cycle_couplings(8).unwrap();
        let idx = |a: usize, b: usize| a * 5 + b;
        for (c, &w) in g.iter().enumerate() {
            for other in 0..5 {
                assert_eq!(r.reduced.weight(idx(c, other), idx(c + 1, other)), Some(w));
                assert_eq!(r.reduced.weight(idx(other, c), idx(other, c + 1)), Some(w));
            }
        }
    }

    #[test]
    fn partial_convolution_sizes() {
        assert_eq!(partial_hypercycle_convolution(6).unwrap().reduced.node_count(), 24);
        assert_eq!(partial_hypercycle_convolution(4).unwrap().reduced.node_count(), 12);
        assert!(partial_hypercycle_convolution(5).is_err());
    }

    #[test]
    fn fold_index_enumerates_upper_triangle() {
        for side in 1..8 {
            let mut expected = 0;
            for a in 0..side {
                for b in a..side {
                    assert_eq!(fold_index(a, b, side), expected);
                    assert_eq!(fold_index(b, a, side), expected);
                    expected += 1;
                }
            }
        }
    }

    #[test]
    fn fold_of_torus_lattice() {
        let lattice = hypercycle_to_lattice(2, 6).unwrap().reduced;
        let fold = lattice_fold(&lattice, 4).unwrap();
        assert_eq!(fold.reduced.node_count(), 10);
        // the first diagonal square has √2 sides which merge into 2
        let origin = fold_index(0, 0, 4);
        let next = fold_index(0, 1, 4);
        assert!((fold.reduced.weight(origin, next).unwrap() - 2.0).abs() < 1e-12);
        // diagonal stays injective
        let diag: Vec<_> = (0..4).map(|a| fold.map.apply(a * 4 + a).unwrap()).collect();
        for i in 0..4 {
            for j in 0..i {
                assert_ne!(diag[i], diag[j]);
            }
        }
        assert_eq!(fold.map.apply(4 + 2), fold.map.apply(2 * 4 + 1));
    }

    #[test]
    fn fold_count_is_triangular() {
        for side in 2..7 {
            let lat = crate::graph::build_weighted_lattice(
                &vec![1.0; side - 1],
                &vec![1.0; side - 1],
            )
            .unwrap();
            let f = lattice_fold(&lat, side).unwrap();
            assert_eq!(f.reduced.node_count(), side * (side + 1) / 2);
        }
    }

    #[test]
    fn fold_rejects_asymmetric_lattice() {
        let lat = crate::graph::build_weighted_lattice(&[1.0, 2.0], &[1.0, 1.0]).unwrap();
        assert!(matches!(lattice_fold(&lat, 3), Err(Error::Domain(_))));
        let cube = build_hypercube(2).unwrap();
        assert!(lattice_fold(&cube, 3).is_err());
    }

    #[test]
    fn compose_torus_to_ultimate() {
        let first = hypercycle_to_lattice(2, 6).unwrap();
        let second = lattice_fold(&first.reduced, 4).unwrap();
        let both = compose_maps(&second.map, &first.map).unwrap();
        assert_eq!(both.source_count(), 36);
        assert_eq!(both.target_count(), 10);
        assert!(both.preimages().iter().all(|g| !g.is_empty()));
        assert!(compose_maps(&first.map, &second.map).is_err());
        let chained = first.then(&second).unwrap();
        assert_eq!(chained.map, both);
    }
}
