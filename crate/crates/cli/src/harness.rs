//! Experiment orchestration: equivalence chains between a graph and its
//! convolutions, and seeded hitting-time races.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use graphfold_core::analysis::{check_correspondence, group_deviation, sink_deviation, SinkPair};
use graphfold_core::convolve::{
    cycle_to_line, hypercube_to_line, hypercycle_to_lattice, lattice_fold, ConvolutionResult,
    Method,
};
use graphfold_core::dynamics::{
    lindblad_evolve_with_step, unitary_evolve, SinkSpec, TimeGrid, WalkCurve,
    DEFAULT_LINDBLAD_STEP,
};
use graphfold_core::graph::{farthest_node, Graph, GraphFamilySpec, GroupMap};
use graphfold_core::race::{sample_pairs, summarize, HittingRecord, RaceArena, RaceConfig, WinCounts};
use graphfold_core::Error;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::format::{self, DeviationRow, GraphFile};

/// Convolution chains the equivalence experiment knows how to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chain {
    /// Torus → lattice → folded lattice.
    TorusLatticeFold { k: usize },
    HypercycleLattice { dim: usize, k: usize },
    LatticeFold { side: usize },
    HypercubeLine { dim: usize },
    CycleLine { k: usize },
}

pub const SUPPORTED_CHAINS: &str = "hypercycle (dim 2: torus -> lattice -> fold; otherwise \
     hypercycle -> lattice), lattice -> fold, hypercube -> line, cycle -> line";

impl Chain {
    pub fn for_family(spec: &GraphFamilySpec) -> CliResult<Chain> {
        Ok(match *spec {
            GraphFamilySpec::Hypercube { dim } => Chain::HypercubeLine { dim },
            GraphFamilySpec::Cycle { k } => Chain::CycleLine { k },
            GraphFamilySpec::Hypercycle { dim: 2, k } => Chain::TorusLatticeFold { k },
            GraphFamilySpec::Hypercycle { dim, k } => Chain::HypercycleLattice { dim, k },
            GraphFamilySpec::WeightedLattice { ref rows, ref cols } if rows.len() == cols.len() => {
                Chain::LatticeFold {
                    side: rows.len() + 1,
                }
            }
            _ => {
                return Err(CliError::Usage(format!(
                    "no convolution chain for family {}; supported chains: {SUPPORTED_CHAINS}",
                    spec.name()
                )))
            }
        })
    }

    /// Chain for a graph file: its recorded family, or a lattice fold when
    /// the node count is a perfect square.
    pub fn for_graph(file: &GraphFile) -> CliResult<Chain> {
        if let Some(spec) = file.family() {
            return Chain::for_family(&spec);
        }
        let n = file.graph.node_count();
        let side = (n as f64).sqrt().round() as usize;
        if side >= 2 && side * side == n {
            return Ok(Chain::LatticeFold { side });
        }
        Err(CliError::Usage(format!(
            "cannot infer a convolution chain for a {n}-node graph without family metadata; \
             supported chains: {SUPPORTED_CHAINS}"
        )))
    }

    fn expected_root(&self) -> Option<GraphFamilySpec> {
        match *self {
            Chain::TorusLatticeFold { k } => Some(GraphFamilySpec::Hypercycle { dim: 2, k }),
            Chain::HypercycleLattice { dim, k } => Some(GraphFamilySpec::Hypercycle { dim, k }),
            Chain::HypercubeLine { dim } => Some(GraphFamilySpec::Hypercube { dim }),
            Chain::CycleLine { k } => Some(GraphFamilySpec::Cycle { k }),
            Chain::LatticeFold { .. } => None,
        }
    }
}

/// One graph of a chain and how the root graph maps onto it.
#[derive(Debug, Clone)]
pub struct Representation {
    pub name: String,
    pub graph: Graph,
    pub map_from_root: GroupMap,
    pub start: usize,
    pub target: usize,
}

/// Root first; start is node 0, the target is the farthest node from it.
pub fn build_chain(root: &Graph, chain: Chain) -> CliResult<Vec<Representation>> {
    if let Some(spec) = chain.expected_root() {
        if spec.build()?.edges() != root.edges() {
            return Err(Error::Domain(format!(
                "graph does not match the {} family it was given as",
                spec.name()
            ))
            .into());
        }
    }
    let (names, results): (&[&str], Vec<ConvolutionResult>) = match chain {
        Chain::TorusLatticeFold { k } => {
            let lattice = hypercycle_to_lattice(2, k)?;
            let fold = lattice_fold(&lattice.reduced, k / 2 + 1)?;
            let composite = lattice.then(&fold)?;
            (&["torus", "lattice", "fold"], vec![lattice, composite])
        }
        Chain::HypercycleLattice { dim, k } => {
            (&["hypercycle", "lattice"], vec![hypercycle_to_lattice(dim, k)?])
        }
        Chain::LatticeFold { side } => (&["lattice", "fold"], vec![lattice_fold(root, side)?]),
        Chain::HypercubeLine { dim } => (&["hypercube", "line"], vec![hypercube_to_line(dim)?]),
        Chain::CycleLine { k } => (&["cycle", "line"], vec![cycle_to_line(k)?]),
    };
    let start = 0;
    let target = farthest_node(root, start)?;
    let mut reps = vec![Representation {
        name: names[0].to_string(),
        graph: root.clone(),
        map_from_root: GroupMap::identity(root.node_count()),
        start,
        target,
    }];
    for (name, result) in names[1..].iter().zip(results) {
        let image = |v: usize| result.map.apply(v).expect("node in range");
        reps.push(Representation {
            name: name.to_string(),
            start: image(start),
            target: image(target),
            graph: result.reduced,
            map_from_root: result.map,
        });
    }
    Ok(reps)
}

/// Map from representation `a` onto a coarser representation `b`.
fn map_between(a: &Representation, b: &Representation) -> CliResult<GroupMap> {
    let mut assignment = vec![usize::MAX; a.graph.node_count()];
    for (v, &x) in a.map_from_root.assignment().iter().enumerate() {
        let y = b.map_from_root.assignment()[v];
        if assignment[x] != usize::MAX && assignment[x] != y {
            return Err(Error::Validation(format!(
                "{} node {x} does not map onto a single {} node",
                a.name, b.name
            ))
            .into());
        }
        assignment[x] = y;
    }
    Ok(GroupMap::new(a.graph.node_count(), b.graph.node_count(), assignment)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceOptions {
    /// Sink curves under the master equation when set; unitary group
    /// probabilities otherwise.
    pub sink: bool,
    pub gamma: f64,
    pub grid: TimeGrid,
    pub lindblad_step: f64,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        EquivalenceOptions {
            sink: true,
            gamma: 1.0,
            grid: TimeGrid::new(10.0, 0.05).expect("valid grid"),
            lindblad_step: DEFAULT_LINDBLAD_STEP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EquivalenceOutcome {
    pub representations: Vec<Representation>,
    pub curves: Vec<WalkCurve>,
    pub deviations: Vec<DeviationRow>,
}

impl EquivalenceOutcome {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().map(|r| r.max_deviation).fold(0.0, f64::max)
    }

    /// Writes `<name>.csv` per representation and `deviations.json`.
    pub fn write_to(&self, dir: &Path) -> CliResult<()> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        for (rep, curve) in self.representations.iter().zip(&self.curves) {
            let path = dir.join(format!("{}.csv", rep.name));
            let mut buf = Vec::new();
            format::write_curve_csv(&mut buf, curve).map_err(|e| CliError::io(&path, e))?;
            std::fs::write(&path, buf).map_err(|e| CliError::io(&path, e))?;
        }
        format::write_text(&dir.join("deviations.json"), &format::deviations_to_json(&self.deviations))
    }
}

/// Evolves every representation of the chain from its start node and
/// reports the maximum deviation for each pair.
pub fn run_equivalence_experiment(
    root: &Graph,
    chain: Chain,
    options: &EquivalenceOptions,
) -> CliResult<EquivalenceOutcome> {
    let reps = build_chain(root, chain)?;
    let curves = reps
        .iter()
        .map(|r| {
            if options.sink {
                let sink = SinkSpec::new(r.target, options.gamma)?;
                lindblad_evolve_with_step(&r.graph, r.start, &sink, &options.grid, options.lindblad_step)
            } else {
                unitary_evolve(&r.graph, r.start, &options.grid)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut deviations = Vec::new();
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            let map = map_between(&reps[i], &reps[j])?;
            let max_deviation = if options.sink {
                let result = ConvolutionResult::new(reps[j].graph.clone(), map, Method::Composite)?;
                let pair = SinkPair {
                    original: SinkSpec::new(reps[i].target, options.gamma)?,
                    reduced: SinkSpec::new(reps[j].target, options.gamma)?,
                };
                check_correspondence(&reps[i].graph, reps[i].start, &result, reps[j].start, Some(&pair))?;
                sink_deviation(&curves[i], &curves[j])?
            } else {
                group_deviation(&curves[i], &map, &curves[j])?
            };
            deviations.push(DeviationRow {
                a: reps[i].name.clone(),
                b: reps[j].name.clone(),
                max_deviation,
            });
        }
    }
    Ok(EquivalenceOutcome {
        representations: reps,
        curves,
        deviations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaceExperiment {
    pub pair_count: usize,
    pub seed: u64,
    pub config: RaceConfig,
}

#[derive(Debug, Clone)]
pub struct RaceOutcome {
    pub records: Vec<HittingRecord>,
    pub summary: BTreeMap<usize, WinCounts>,
}

/// Races `pair_count` seeded pairs; records come back in pair order
/// whatever the thread schedule.
pub fn run_hitting_races(graph: &Graph, experiment: &RaceExperiment) -> CliResult<RaceOutcome> {
    if experiment.pair_count == 0 {
        return Err(Error::Config("pair count must be at least 1".into()).into());
    }
    let arena = RaceArena::new(graph, experiment.config)?;
    let pairs = sample_pairs(graph.node_count(), experiment.pair_count, experiment.seed)?;
    let records = pairs
        .par_iter()
        .enumerate()
        .map(|(k, &(s, t))| arena.race(k, s, t))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = summarize(&records);
    Ok(RaceOutcome { records, summary })
}

pub fn summary_table(summary: &BTreeMap<usize, WinCounts>) -> String {
    let mut out = String::from("d,classical,quantum,tie,both_failed\n");
    for (d, c) in summary {
        let _ = writeln!(out, "{d},{},{},{},{}", c.classical, c.quantum, c.tie, c.both_failed);
    }
    out
}

/// Writes the coupling table of a path graph to `destination`.
pub fn export_couplings(line: &Graph, destination: &Path) -> CliResult<Vec<(usize, usize, f64)>> {
    let rows = format::coupling_rows(line)?;
    let mut buf = Vec::new();
    format::write_coupling_csv(&mut buf, &rows).map_err(|e| CliError::io(destination, e))?;
    std::fs::write(destination, buf).map_err(|e| CliError::io(destination, e))?;
    Ok(rows)
}
