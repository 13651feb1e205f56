//! Spectra, equiprobable node groups, equivalence checks between a graph
//! and its convolution, and the group-count vs. distinct-eigenvalue report.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::convolve::ConvolutionResult;
use crate::dynamics::{
    lindblad_evolve, unitary_evolve, SinkSpec, TimeGrid, UnitaryPropagator, WalkCurve,
};
use crate::graph::{distances_from, Graph, GroupMap};
use crate::linalg::SymmetricEigen;
use crate::{Error, Result};

/// Default clustering tolerance for distinct eigenvalues.
pub const DISTINCT_TOLERANCE: f64 = 1e-6;

/// Default tolerance for grouping probability trajectories.
pub const GROUP_TOLERANCE: f64 = 1e-8;

/// Adjacency eigenvalues, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

pub fn spectrum(graph: &Graph) -> Result<Spectrum> {
    let eigen = SymmetricEigen::new(&graph.adjacency())?;
    Ok(Spectrum {
        values: eigen.values,
    })
}

/// Eigenvalue clusters: one mean per cluster, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct DistinctEigenvalues {
    pub values: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub tolerance: f64,
    /// Set when some gap between neighbors falls in `(tol, 2·tol]`, i.e. the
    /// clustering depends on the tolerance.
    pub ambiguous: bool,
}

impl DistinctEigenvalues {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Single-linkage clustering of the sorted spectrum: neighbors closer than
/// `tol` share a cluster.
pub fn distinct_eigenvalues(spectrum: &Spectrum, tol: f64) -> Result<DistinctEigenvalues> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Config(format!("tolerance must be positive (got {tol})")));
    }
    let mut values = Vec::new();
    let mut multiplicities = Vec::new();
    let mut ambiguous = false;
    let mut cluster: Vec<f64> = Vec::new();
    let mut flush = |cluster: &mut Vec<f64>| {
        if !cluster.is_empty() {
            values.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
            multiplicities.push(cluster.len());
            cluster.clear();
        }
    };
    for (k, &x) in spectrum.values.iter().enumerate() {
        if k > 0 {
            let gap = spectrum.values[k - 1] - x;
            if gap > tol {
                ambiguous |= gap <= 2.0 * tol;
                flush(&mut cluster);
            }
        }
        cluster.push(x);
    }
    flush(&mut cluster);
    Ok(DistinctEigenvalues {
        values,
        multiplicities,
        tolerance: tol,
        ambiguous,
    })
}

/// `0.25, 0.5, …, 5.0`.
pub fn default_sample_times() -> Vec<f64> {
    (1..=20).map(|i| i as f64 * 0.25).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeGroup {
    pub nodes: Vec<usize>,
    /// Hop distance from the start node; `None` if unreachable.
    pub distance: Option<usize>,
    /// Summed member probability at each sample time.
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupPartition {
    pub start: usize,
    pub sample_times: Vec<f64>,
    pub groups: Vec<NodeGroup>,
}

impl GroupPartition {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Group sizes for nodes at hop distance `d`, in group order.
    pub fn sizes_at_distance(&self, d: usize) -> Vec<usize> {
        self.groups
            .iter()
            .filter(|g| g.distance == Some(d))
            .map(|g| g.nodes.len())
            .collect()
    }

    /// Index of the group containing `node`.
    pub fn group_of(&self, node: usize) -> Option<usize> {
        self.groups.iter().position(|g| g.nodes.contains(&node))
    }
}

struct DisjointSets(Vec<usize>);

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Groups nodes that sit at the same hop distance from `start` and whose
/// unitary probability trajectories agree within `tol` at every sample
/// time.
///
/// Agreement is closed transitively, so a smaller `tol` always yields a
/// refinement of the partition.
pub fn equiprobable_groups(
    graph: &Graph,
    start: usize,
    sample_times: &[f64],
    tol: f64,
) -> Result<GroupPartition> {
    graph.check_node(start)?;
    if sample_times.is_empty() {
        return Err(Error::Config("at least one sample time is required".into()));
    }
    if let Some(t) = sample_times.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::Config(format!("sample times must be positive (got {t})")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Config(format!("tolerance must be positive (got {tol})")));
    }
    let n = graph.node_count();
    let prop = UnitaryPropagator::new(graph)?;
    let series = sample_times
        .iter()
        .map(|&t| prop.probabilities(start, t))
        .collect::<Result<Vec<_>>>()?;
    let dist = distances_from(graph, start);

    let mut sets = DisjointSets::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if dist[u] != dist[v] {
                continue;
            }
            if series.iter().all(|p| (p[u] - p[v]).abs() <= tol) {
                sets.union(u, v);
            }
        }
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        let root = sets.find(v);
        members[root].push(v);
    }
    let mut groups: Vec<NodeGroup> = members
        .into_iter()
        .filter(|m| !m.is_empty())
        .map(|nodes| {
            let probabilities = series
                .iter()
                .map(|p| nodes.iter().map(|&v| p[v]).sum())
                .collect();
            NodeGroup {
                distance: dist[nodes[0]],
                nodes,
                probabilities,
            }
        })
        .collect();
    groups.sort_by_key(|g| (g.distance.is_none(), g.distance, g.nodes[0]));
    Ok(GroupPartition {
        start,
        sample_times: sample_times.to_vec(),
        groups,
    })
}

/// `max_{t, r} |Σ_{v ↦ r} P_orig(v, t) − P_reduced(r, t)|` over graph nodes.
pub fn group_deviation(original: &WalkCurve, map: &GroupMap, reduced: &WalkCurve) -> Result<f64> {
    if map.source_count() != original.node_count() {
        return Err(Error::DimensionMismatch {
            what: "map source count vs original curve nodes",
            expected: original.node_count(),
            found: map.source_count(),
        });
    }
    if map.target_count() != reduced.node_count() {
        return Err(Error::DimensionMismatch {
            what: "map target count vs reduced curve nodes",
            expected: reduced.node_count(),
            found: map.target_count(),
        });
    }
    if original.rows().len() != reduced.rows().len() {
        return Err(Error::DimensionMismatch {
            what: "sample count",
            expected: original.rows().len(),
            found: reduced.rows().len(),
        });
    }
    let mut worst = 0.0f64;
    let mut summed = vec![0.0; map.target_count()];
    for (ro, rr) in original.rows().iter().zip(reduced.rows()) {
        summed.iter_mut().for_each(|x| *x = 0.0);
        for (v, &img) in map.assignment().iter().enumerate() {
            summed[img] += ro[v];
        }
        for (r, s) in summed.iter().enumerate() {
            worst = worst.max((s - rr[r]).abs());
        }
    }
    Ok(worst)
}

/// `max_t |sink_a(t) − sink_b(t)|`.
pub fn sink_deviation(a: &WalkCurve, b: &WalkCurve) -> Result<f64> {
    let (sa, sb) = match (a.sink_column(), b.sink_column()) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(Error::Config("sink deviation needs two sink curves".into())),
    };
    if a.rows().len() != b.rows().len() {
        return Err(Error::DimensionMismatch {
            what: "sample count",
            expected: a.rows().len(),
            found: b.rows().len(),
        });
    }
    Ok(a.series(sa)
        .zip(b.series(sb))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Sink setups for the original and the reduced graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkPair {
    pub original: SinkSpec,
    pub reduced: SinkSpec,
}

/// Maximum deviation between the original walk (summed over each group)
/// and the walk on the reduced graph.
///
/// Without a sink both sides evolve unitarily and every reduced node is
/// compared; with a sink both sides run the master equation and only the
/// sink populations are compared. The map must send the start (and the
/// sink target) of the original onto those of the reduced graph.
pub fn verify_equivalence(
    original: &Graph,
    start_original: usize,
    result: &ConvolutionResult,
    start_reduced: usize,
    grid: &TimeGrid,
    sink: Option<&SinkPair>,
) -> Result<f64> {
    check_correspondence(original, start_original, result, start_reduced, sink)?;
    match sink {
        None => {
            let a = unitary_evolve(original, start_original, grid)?;
            let b = unitary_evolve(&result.reduced, start_reduced, grid)?;
            group_deviation(&a, &result.map, &b)
        }
        Some(pair) => {
            let a = lindblad_evolve(original, start_original, &pair.original, grid)?;
            let b = lindblad_evolve(&result.reduced, start_reduced, &pair.reduced, grid)?;
            sink_deviation(&a, &b)
        }
    }
}

/// Validates the map/start/sink consistency that [`verify_equivalence`]
/// requires, without simulating.
pub fn check_correspondence(
    original: &Graph,
    start_original: usize,
    result: &ConvolutionResult,
    start_reduced: usize,
    sink: Option<&SinkPair>,
) -> Result<()> {
    original.check_node(start_original)?;
    result.reduced.check_node(start_reduced)?;
    if result.map.source_count() != original.node_count() {
        return Err(Error::DimensionMismatch {
            what: "map source count vs original node count",
            expected: original.node_count(),
            found: result.map.source_count(),
        });
    }
    if result.map.target_count() != result.reduced.node_count() {
        return Err(Error::DimensionMismatch {
            what: "map target count vs reduced node count",
            expected: result.reduced.node_count(),
            found: result.map.target_count(),
        });
    }
    if result.map.apply(start_original) != Some(start_reduced) {
        return Err(Error::Validation(format!(
            "map sends start {start_original} to {:?}, not to the reduced start {start_reduced}",
            result.map.apply(start_original)
        )));
    }
    if let Some(pair) = sink {
        original.check_node(pair.original.target)?;
        result.reduced.check_node(pair.reduced.target)?;
        if result.map.apply(pair.original.target) != Some(pair.reduced.target) {
            return Err(Error::Validation(format!(
                "map sends target {} to {:?}, not to the reduced target {}",
                pair.original.target,
                result.map.apply(pair.original.target),
                pair.reduced.target
            )));
        }
        if pair.original.rate != pair.reduced.rate {
            return Err(Error::Validation(format!(
                "sink rates differ ({} vs {})",
                pair.original.rate, pair.reduced.rate
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Discrepant,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Consistent => "CONSISTENT",
            Verdict::Discrepant => "DISCREPANT",
        }
    }
}

/// Number of equiprobable groups seen from `start` against the number of
/// distinct adjacency eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalityReport {
    pub group_count: usize,
    pub distinct_eigenvalue_count: usize,
    pub verdict: Verdict,
    pub partition: GroupPartition,
    pub spectrum: Spectrum,
    pub distinct: DistinctEigenvalues,
}

/// Compares the two counts; the verdict only records whether they agree.
pub fn minimality_report(graph: &Graph, start: usize) -> Result<MinimalityReport> {
    let partition = equiprobable_groups(graph, start, &default_sample_times(), GROUP_TOLERANCE)?;
    let spectrum = spectrum(graph)?;
    let distinct = distinct_eigenvalues(&spectrum, DISTINCT_TOLERANCE)?;
    let verdict = if partition.len() == distinct.len() {
        Verdict::Consistent
    } else {
        Verdict::Discrepant
    };
    Ok(MinimalityReport {
        group_count: partition.len(),
        distinct_eigenvalue_count: distinct.len(),
        verdict,
        partition,
        spectrum,
        distinct,
    })
}
