//! Weighted undirected graphs and the families the walks run on.
//!
//! Node indexing is deterministic:
//! * hypercube nodes are indexed by the integer value of their bitstring
//!   label (first coordinate is the most significant bit);
//! * product graphs (and therefore hypercycles) use row-major mixed-radix
//!   indices, `(u, v) -> u * |H| + v`, matching `A(G) ⊗ I + I ⊗ A(H)`.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::{Error, Result};

/// Node budget for every constructor; dense `n × n` matrices stay desk-sized.
pub const MAX_NODES: usize = 4096;

/// Coordinate label attached to a node, e.g. a bitstring or torus coordinates.
pub type Label = Vec<u64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Weighted undirected graph without self-loops or parallel edges.
///
/// Edges are stored canonically (`i < j`, sorted by `(i, j)`).
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<Edge>,
    labels: Option<Vec<Label>>,
}

impl Graph {
    /// Validates and canonicalizes a graph.
    pub fn new(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
        labels: Option<Vec<Label>>,
    ) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::Validation("graph must have at least one node".into()));
        }
        let mut canon = Vec::new();
        for (i, j, w) in edges {
            if i >= node_count || j >= node_count {
                return Err(Error::Validation(format!(
                    "edge ({i}, {j}) references a node outside 0..{node_count}"
                )));
            }
            if i == j {
                return Err(Error::Validation(format!("self-loop on node {i}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Validation(format!(
                    "edge ({i}, {j}) has non-positive weight {w}"
                )));
            }
            let (i, j) = if i < j { (i, j) } else { (j, i) };
            canon.push(Edge { i, j, weight: w });
        }
        canon.sort_by_key(|e| (e.i, e.j));
        if let Some(pair) = canon.windows(2).find(|p| (p[0].i, p[0].j) == (p[1].i, p[1].j)) {
            let (a, b) = (pair[0], pair[1]);
            return Err(Error::Validation(if a.weight == b.weight {
                format!("parallel edge between nodes {} and {}", a.i, a.j)
            } else {
                format!(
                    "asymmetric duplicate edge between nodes {} and {} (weights {} and {})",
                    a.i, a.j, a.weight, b.weight
                )
            }));
        }
        if let Some(l) = &labels {
            if l.len() != node_count {
                return Err(Error::DimensionMismatch {
                    what: "label count",
                    expected: node_count,
                    found: l.len(),
                });
            }
        }
        Ok(Graph {
            node_count,
            edges: canon,
            labels,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn label(&self, node: usize) -> Option<&Label> {
        self.labels.as_ref().and_then(|l| l.get(node))
    }

    /// Looks a node up by its label.
    pub fn node_with_label(&self, label: &[u64]) -> Option<usize> {
        self.labels
            .as_ref()?
            .iter()
            .position(|l| l.as_slice() == label)
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let (i, j) = if u < v { (u, v) } else { (v, u) };
        self.edges
            .binary_search_by_key(&(i, j), |e| (e.i, e.j))
            .ok()
            .map(|k| self.edges[k].weight)
    }

    pub fn adjacency(&self) -> Matrix {
        let mut a = Matrix::zeros(self.node_count, self.node_count);
        for e in &self.edges {
            a[(e.i, e.j)] = e.weight;
            a[(e.j, e.i)] = e.weight;
        }
        a
    }

    /// Per-node `(neighbor, weight)` lists, neighbors ascending.
    pub fn neighbors(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for e in &self.edges {
            adj[e.i].push((e.j, e.weight));
            adj[e.j].push((e.i, e.weight));
        }
        for list in &mut adj {
            list.sort_by_key(|&(v, _)| v);
        }
        adj
    }

    /// Number of incident edges per node (weights ignored).
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.node_count];
        for e in &self.edges {
            d[e.i] += 1;
            d[e.j] += 1;
        }
        d
    }

    /// Total incident weight per node.
    pub fn strengths(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.node_count];
        for e in &self.edges {
            s[e.i] += e.weight;
            s[e.j] += e.weight;
        }
        s
    }

    pub fn check_node(&self, node: usize) -> Result<()> {
        if node < self.node_count {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "node {node} out of range for a graph of {} nodes",
                self.node_count
            )))
        }
    }

    /// Whether the graph is a path `0 - 1 - ... - (n-1)`.
    pub fn is_path(&self) -> bool {
        self.edges.len() + 1 == self.node_count
            && self.edges.iter().enumerate().all(|(k, e)| e.i == k && e.j == k + 1)
    }

    pub fn is_connected(&self) -> bool {
        distances_from(self, 0).iter().all(Option::is_some)
    }

    /// Replaces the node labels.
    pub fn with_labels(mut self, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != self.node_count {
            return Err(Error::DimensionMismatch {
                what: "label count",
                expected: self.node_count,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }
}

/// Parameters naming one of the built-in families.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphFamilySpec {
    Hypercube { dim: usize },
    Cycle { k: usize },
    Hypercycle { dim: usize, k: usize },
    WeightedLine { couplings: Vec<f64> },
    WeightedLattice { rows: Vec<f64>, cols: Vec<f64> },
}

impl GraphFamilySpec {
    pub fn build(&self) -> Result<Graph> {
        match self {
            GraphFamilySpec::Hypercube { dim } => build_hypercube(*dim),
            GraphFamilySpec::Cycle { k } => build_cycle(*k),
            GraphFamilySpec::Hypercycle { dim, k } => build_hypercycle(*dim, *k),
            GraphFamilySpec::WeightedLine { couplings } => build_weighted_line(couplings),
            GraphFamilySpec::WeightedLattice { rows, cols } => build_weighted_lattice(rows, cols),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GraphFamilySpec::Hypercube { .. } => "hypercube",
            GraphFamilySpec::Cycle { .. } => "cycle",
            GraphFamilySpec::Hypercycle { .. } => "hypercycle",
            GraphFamilySpec::WeightedLine { .. } => "weighted_line",
            GraphFamilySpec::WeightedLattice { .. } => "weighted_lattice",
        }
    }
}

pub(crate) fn check_size(nodes: u128) -> Result<()> {
    if nodes > MAX_NODES as u128 {
        Err(Error::Size {
            nodes,
            limit: MAX_NODES,
        })
    } else {
        Ok(())
    }
}

pub(crate) fn check_ring_size(k: usize) -> Result<()> {
    if k < 4 || !k.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "cycle length k must be even and at least 4 (got {k})"
        )));
    }
    Ok(())
}

/// The `k`-node ring with unit weights.
pub fn build_cycle(k: usize) -> Result<Graph> {
    check_ring_size(k)?;
    check_size(k as u128)?;
    let edges = (0..k).map(|j| (j, (j + 1) % k, 1.0));
    let labels = (0..k as u64).map(|j| vec![j]).collect();
    Graph::new(k, edges, Some(labels))
}

/// The `dim`-dimensional hypercube: `2^dim` nodes, unit edges between
/// bitstrings at Hamming distance one.
pub fn build_hypercube(dim: usize) -> Result<Graph> {
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
    let n = 1usize << dim;
    let mut edges = Vec::with_capacity(n * dim / 2);
    for x in 0..n {
        for b in 0..dim {
            let y = x ^ (1 << b);
            if x < y {
                edges.push((x, y, 1.0));
            }
        }
    }
    let labels = (0..n)
        .map(|x| (0..dim).map(|a| ((x >> (dim - 1 - a)) & 1) as u64).collect())
        .collect();
    Graph::new(n, edges, Some(labels))
}

/// Path graph with `couplings.len() + 1` nodes; edge `(i, i+1)` carries
/// `couplings[i]`.
pub fn build_weighted_line(couplings: &[f64]) -> Result<Graph> {
    if couplings.is_empty() {
        return Err(Error::Domain("a weighted line needs at least one coupling".into()));
    }
    check_size(couplings.len() as u128 + 1)?;
    let n = couplings.len() + 1;
    let edges: Vec<_> = couplings.iter().enumerate().map(|(i, &w)| (i, i + 1, w)).collect();
    let labels = (0..n as u64).map(|i| vec![i]).collect();
    Graph::new(n, edges, Some(labels))
}

/// `line(rows) □ line(cols)`: edges along the first coordinate carry the row
/// couplings, edges along the second carry the column couplings.
pub fn build_weighted_lattice(rows: &[f64], cols: &[f64]) -> Result<Graph> {
    cartesian_product(&build_weighted_line(rows)?, &build_weighted_line(cols)?)
}

/// `side × side` lattice that is invariant under swapping coordinates but
/// otherwise arbitrary.
///
/// `horizontal[a * (side − 1) + b]` weighs the edge `(a, b)–(a, b + 1)`;
/// the edge `(b, a)–(b + 1, a)` copies it. Node `(a, b)` has index
/// `a * side + b`.
pub fn build_swap_symmetric_lattice(side: usize, horizontal: &[f64]) -> Result<Graph> {
    if side < 2 {
        return Err(Error::Domain(format!("lattice side must be at least 2 (got {side})")));
    }
    check_size(side as u128 * side as u128)?;
    if horizontal.len() != side * (side - 1) {
        return Err(Error::DimensionMismatch {
            what: "horizontal weight count side·(side−1)",
            expected: side * (side - 1),
            found: horizontal.len(),
        });
    }
    let mut edges = Vec::with_capacity(2 * horizontal.len());
    for a in 0..side {
        for b in 0..side - 1 {
            let w = horizontal[a * (side - 1) + b];
            edges.push((a * side + b, a * side + b + 1, w));
            edges.push((b * side + a, (b + 1) * side + a, w));
        }
    }
    let labels = (0..side as u64)
        .flat_map(|a| (0..side as u64).map(move |b| vec![a, b]))
        .collect();
    Graph::new(side * side, edges, Some(labels))
}

/// Cartesian (box) product with adjacency `A(G) ⊗ I + I ⊗ A(H)`.
///
/// Node `(u, v)` gets index `u * |H| + v` and the label `label(u) ++ label(v)`.
pub fn cartesian_product(g: &Graph, h: &Graph) -> Result<Graph> {
    let (ng, nh) = (g.node_count(), h.node_count());
    check_size(ng as u128 * nh as u128)?;
    let mut edges = Vec::with_capacity(g.edge_count() * nh + h.edge_count() * ng);
    for e in g.edges() {
        for v in 0..nh {
            edges.push((e.i * nh + v, e.j * nh + v, e.weight));
        }
    }
    for u in 0..ng {
        for e in h.edges() {
            edges.push((u * nh + e.i, u * nh + e.j, e.weight));
        }
    }
    let label_of = |graph: &Graph, x: usize| -> Label {
        graph.label(x).cloned().unwrap_or_else(|| vec![x as u64])
    };
    let mut labels = Vec::with_capacity(ng * nh);
    for u in 0..ng {
        for v in 0..nh {
            let mut l = label_of(g, u);
            l.extend(label_of(h, v));
            labels.push(l);
        }
    }
    Graph::new(ng * nh, edges, Some(labels))
}

/// `dim`-fold Cartesian power of `graph`.
pub fn cartesian_power(graph: &Graph, dim: usize) -> Result<Graph> {
    if dim == 0 {
        return Err(Error::Domain("Cartesian power needs dimension at least 1".into()));
    }
    let total = (graph.node_count() as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    check_size(total)?;
    let mut acc = graph.clone();
    for _ in 1..dim {
        acc = cartesian_product(&acc, graph)?;
    }
    Ok(acc)
}

/// `dim`-fold Cartesian power of the `k`-ring; `dim = 2` is the torus.
pub fn build_hypercycle(dim: usize, k: usize) -> Result<Graph> {
    if dim == 0 {
        return Err(Error::Domain("hypercycle dimension must be at least 1".into()));
    }
    check_ring_size(k)?;
    let total = (k as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    check_size(total)?;
    cartesian_power(&build_cycle(k)?, dim)
}

/// Unweighted BFS distances from `start`; `None` marks unreachable nodes.
pub fn distances_from(graph: &Graph, start: usize) -> Vec<Option<usize>> {
    let adj = graph.neighbors();
    let mut dist = vec![None; graph.node_count()];
    if start >= graph.node_count() {
        return dist;
    }
    dist[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap_or(0);
        for &(v, _) in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Shortest-path hop count between `u` and `v` (weights ignored);
/// `Ok(None)` when `v` cannot be reached from `u`.
pub fn graph_distance(graph: &Graph, u: usize, v: usize) -> Result<Option<usize>> {
    graph.check_node(u)?;
    graph.check_node(v)?;
    Ok(distances_from(graph, u)[v])
}

/// Farthest node from `start` by hop count, smallest index on ties.
pub fn farthest_node(graph: &Graph, start: usize) -> Result<usize> {
    graph.check_node(start)?;
    let dist = distances_from(graph, start);
    if let Some(v) = dist.iter().position(Option::is_none) {
        return Err(Error::Disconnected { from: start, to: v });
    }
    let mut best = start;
    let mut best_d = 0;
    for (v, d) in dist.iter().enumerate() {
        let d = d.unwrap_or(0);
        if d > best_d {
            best = v;
            best_d = d;
        }
    }
    Ok(best)
}

/// Total surjection from the nodes of one graph onto the nodes of another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupMap {
    target_count: usize,
    assignment: Vec<usize>,
}

impl GroupMap {
    pub fn new(source_count: usize, target_count: usize, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != source_count {
            return Err(Error::DimensionMismatch {
                what: "group map assignment length",
                expected: source_count,
                found: assignment.len(),
            });
        }
        let mut hit = vec![false; target_count];
        for (src, &dst) in assignment.iter().enumerate() {
            if dst >= target_count {
                return Err(Error::Validation(format!(
                    "node {src} maps to {dst}, outside 0..{target_count}"
                )));
            }
            hit[dst] = true;
        }
        if let Some(empty) = hit.iter().position(|h| !h) {
            return Err(Error::Validation(format!(
                "group map is not surjective: target node {empty} has no preimage"
            )));
        }
        Ok(GroupMap {
            target_count,
            assignment,
        })
    }

    pub fn identity(n: usize) -> Self {
        GroupMap {
            target_count: n,
            assignment: (0..n).collect(),
        }
    }

    pub fn source_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn target_count(&self) -> usize {
        self.target_count
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, node: usize) -> Option<usize> {
        self.assignment.get(node).copied()
    }

    /// Source nodes grouped by image, each group ascending.
    pub fn preimages(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.target_count];
        for (src, &dst) in self.assignment.iter().enumerate() {
            groups[dst].push(src);
        }
        groups
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &GroupMap) -> Result<GroupMap> {
        if inner.target_count != self.source_count() {
            return Err(Error::DimensionMismatch {
                what: "map composition (inner target count vs outer source count)",
                expected: self.source_count(),
                found: inner.target_count,
            });
        }
        let assignment = inner.assignment.iter().map(|&m| self.assignment[m]).collect();
        Ok(GroupMap {
            target_count: self.target_count,
            assignment,
        })
    }
}
