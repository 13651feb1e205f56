use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graphfold::error::{CliError, CliResult};
use graphfold::format::{self, GraphFile};
use graphfold::harness::{self, Chain, EquivalenceOptions, RaceExperiment};
use graphfold_core::analysis::{
    distinct_eigenvalues, equiprobable_groups, default_sample_times, minimality_report, spectrum,
    verify_equivalence, SinkPair,
};
use graphfold_core::convolve::{
    cycle_to_line, hypercube_to_line, hypercycle_to_lattice, lattice_fold,
    partial_hypercycle_convolution, ConvolutionResult, Method,
};
use graphfold_core::dynamics::{
    classical_evolve, lindblad_evolve, unitary_evolve, LogBase, SinkSpec, ThresholdPolicy,
    TimeGrid,
};
use graphfold_core::graph::{farthest_node, GraphFamilySpec};
use graphfold_core::race::{ClassicalDetection, RaceConfig};
use serde_json::json;

/// Convolutions of quantum-walk graphs, walk simulation and hitting-time races.
#[derive(Parser)]
#[command(name = "graphfold", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Graph construction.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Convolve a graph into its reduced form and write the node map.
    Convolve(ConvolveArgs),
    /// Evolve a walk and write the probability curve as CSV.
    Simulate(SimulateArgs),
    /// Max deviation between a graph and a reduced graph under a node map.
    Compare(CompareArgs),
    /// Adjacency spectrum and distinct eigenvalues.
    Spectrum(SpectrumArgs),
    /// Equiprobable node groups seen from a start node.
    Groups(GroupsArgs),
    /// Group count vs. distinct eigenvalue count.
    Minimality(MinimalityArgs),
    /// Seeded classical vs. quantum hitting-time races.
    Race(RaceArgs),
    /// Coupling table of a weighted line.
    ExportCouplings(ExportArgs),
    /// Evolve every graph of a convolution chain and report pairwise deviations.
    Experiment(ExperimentArgs),
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Build a graph family and write it as JSON.
    Build(BuildArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Hypercube,
    Cycle,
    Hypercycle,
    Line,
    Lattice,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// Graph family.
    #[arg(long, value_enum)]
    family: Option<Family>,
    /// Dimension (hypercube, hypercycle).
    #[arg(long)]
    dim: Option<usize>,
    /// Ring length (cycle, hypercycle); even, at least 4.
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated couplings of a weighted line.
    #[arg(long, value_delimiter = ',')]
    couplings: Option<Vec<f64>>,
    /// Comma-separated couplings along the first lattice coordinate.
    #[arg(long, value_delimiter = ',')]
    rows: Option<Vec<f64>>,
    /// Comma-separated couplings along the second lattice coordinate
    /// [default: same as --rows].
    #[arg(long, value_delimiter = ',')]
    cols: Option<Vec<f64>>,
}

impl FamilyArgs {
    fn spec(&self) -> CliResult<Option<GraphFamilySpec>> {
        let need = |v: Option<usize>, flag: &str, family: &str| {
            v.ok_or_else(|| CliError::Usage(format!("--family {family} needs --{flag}")))
        };
        let Some(family) = self.family else {
            return Ok(None);
        };
        Ok(Some(match family {
            Family::Hypercube => GraphFamilySpec::Hypercube {
                dim: need(self.dim, "dim", "hypercube")?,
            },
            Family::Cycle => GraphFamilySpec::Cycle {
                k: need(self.k, "k", "cycle")?,
            },
            Family::Hypercycle => GraphFamilySpec::Hypercycle {
                dim: need(self.dim, "dim", "hypercycle")?,
                k: need(self.k, "k", "hypercycle")?,
            },
            Family::Line => GraphFamilySpec::WeightedLine {
                couplings: self
                    .couplings
                    .clone()
                    .ok_or_else(|| CliError::Usage("--family line needs --couplings".into()))?,
            },
            Family::Lattice => {
                let rows = self
                    .rows
                    .clone()
                    .ok_or_else(|| CliError::Usage("--family lattice needs --rows".into()))?;
                let cols = self.cols.clone().unwrap_or_else(|| rows.clone());
                GraphFamilySpec::WeightedLattice { rows, cols }
            }
        }))
    }
}

#[derive(Args, Clone)]
struct SourceArgs {
    /// Graph JSON file.
    #[arg(long = "in", conflicts_with = "family")]
    input: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
}

impl SourceArgs {
    fn load(&self) -> CliResult<GraphFile> {
        if let Some(path) = &self.input {
            return format::read_graph(path);
        }
        match self.family.spec()? {
            Some(spec) => Ok(GraphFile::new(spec.build()?, Some(format::family_meta(&spec)))),
            None => Err(CliError::Usage("one of --in or --family is required".into())),
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Output file [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConvolveMode {
    /// Pick from the family: line, lattice or fold.
    Auto,
    /// Hypercube or cycle onto a weighted line.
    Line,
    /// Hypercycle onto a weighted lattice.
    Lattice,
    /// Torus onto a line × ring cylinder.
    Partial,
    /// Lattice (or torus, via its lattice) folded across the diagonal.
    Fold,
}

#[derive(Args)]
struct ConvolveArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum, default_value = "auto")]
    mode: ConvolveMode,
    /// Reduced graph JSON [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Node map JSON.
    #[arg(long)]
    map: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WalkMode {
    Unitary,
    Classical,
}

#[derive(Args, Clone, Copy)]
struct GridArgs {
    /// Final time.
    #[arg(long, default_value_t = 10.0)]
    tmax: f64,
    /// Sample spacing.
    #[arg(long, default_value_t = 0.1)]
    dt: f64,
}

impl GridArgs {
    fn grid(&self) -> CliResult<TimeGrid> {
        Ok(TimeGrid::new(self.tmax, self.dt)?)
    }
}

#[derive(Args, Clone, Copy)]
struct SinkArgs {
    /// Attach a sink to the target and evolve under the master equation.
    #[arg(long)]
    sink: bool,
    /// Sink target [default: farthest node from the start].
    #[arg(long)]
    target: Option<usize>,
    /// Sink rate.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 0)]
    start: usize,
    #[command(flatten)]
    sink: SinkArgs,
    /// Walk without a sink.
    #[arg(long, value_enum, default_value = "unitary")]
    mode: WalkMode,
    #[command(flatten)]
    grid: GridArgs,
    /// Curve CSV [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Original graph JSON.
    #[arg(long, alias = "in")]
    orig: PathBuf,
    /// Reduced graph JSON.
    #[arg(long)]
    reduced: PathBuf,
    /// Node map JSON from the original onto the reduced graph.
    #[arg(long)]
    map: PathBuf,
    #[arg(long, default_value_t = 0)]
    start: usize,
    #[command(flatten)]
    sink: SinkArgs,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Clustering tolerance for distinct eigenvalues.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GroupsArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 0)]
    start: usize,
    /// Trajectory agreement tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MinimalityArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 0)]
    start: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThresholdBase {
    Ln,
    Log2,
    Log10,
}

#[derive(Clone, Copy, ValueEnum)]
enum Detection {
    /// Classical occupation of the target.
    Occupancy,
    /// Classical cumulative first arrival at the target.
    FirstPassage,
}

#[derive(Args)]
struct RaceArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Number of source/target pairs.
    #[arg(long, default_value_t = 300)]
    pairs: usize,
    /// Pair sampling seed.
    #[arg(long)]
    seed: u64,
    /// Sink rate.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 20.0)]
    tmax: f64,
    #[arg(long, default_value_t = 0.1)]
    dt: f64,
    /// Logarithm in the detection threshold 1/log(n).
    #[arg(long, value_enum, default_value = "ln")]
    threshold_base: ThresholdBase,
    #[arg(long, value_enum, default_value = "occupancy")]
    mode: Detection,
    /// Race CSV [default: stdout]; the per-distance summary goes to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Coupling CSV [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Compare sink curves under the master equation instead of unitary
    /// group probabilities.
    #[arg(long)]
    sink: bool,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 10.0)]
    tmax: f64,
    #[arg(long, default_value_t = 0.05)]
    dt: f64,
    /// Directory for per-graph curve CSVs and deviations.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => format::write_text(path, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn family_of(file: &GraphFile) -> CliResult<Option<GraphFamilySpec>> {
    let Some(spec) = file.family() else {
        return Ok(None);
    };
    if spec.build()?.edges() != file.graph.edges() {
        return Err(graphfold_core::Error::Domain(format!(
            "graph does not match its recorded {} family",
            spec.name()
        ))
        .into());
    }
    Ok(Some(spec))
}

fn lattice_side(n: usize) -> CliResult<usize> {
    let side = (n as f64).sqrt().round() as usize;
    if side * side != n {
        return Err(graphfold_core::Error::Domain(format!("{n} nodes do not form a square lattice")).into());
    }
    Ok(side)
}

fn convolve(args: &ConvolveArgs) -> CliResult<()> {
    let file = args.source.load()?;
    let family = family_of(&file)?;
    let unsupported = |what: &str| {
        CliError::Usage(format!(
            "{what}; supported: hypercube|cycle -> line, hypercycle -> lattice, \
             hypercycle(dim 2) -> partial, lattice|hypercycle(dim 2) -> fold"
        ))
    };
    use GraphFamilySpec as F;
    let mode = match (args.mode, &family) {
        (ConvolveMode::Auto, Some(F::Hypercube { .. } | F::Cycle { .. })) => ConvolveMode::Line,
        (ConvolveMode::Auto, Some(F::Hypercycle { .. })) => ConvolveMode::Lattice,
        (ConvolveMode::Auto, Some(F::WeightedLattice { .. }) | None) => ConvolveMode::Fold,
        (ConvolveMode::Auto, Some(F::WeightedLine { .. })) => {
            return Err(unsupported("a weighted line has no further convolution"))
        }
        (m, _) => m,
    };
    let (result, reduced_family) = match (mode, &family) {
        (ConvolveMode::Line, Some(F::Hypercube { dim })) => {
            let r = hypercube_to_line(*dim)?;
            let couplings = graphfold_core::convolve::hypercube_couplings(*dim);
            (r, Some(F::WeightedLine { couplings }))
        }
        (ConvolveMode::Line, Some(F::Cycle { k })) => {
            let couplings = graphfold_core::convolve::cycle_couplings(*k)?;
            (cycle_to_line(*k)?, Some(F::WeightedLine { couplings }))
        }
        (ConvolveMode::Lattice, Some(F::Hypercycle { dim, k })) => {
            let couplings = graphfold_core::convolve::cycle_couplings(*k)?;
            let fam = (*dim == 2).then(|| F::WeightedLattice {
                rows: couplings.clone(),
                cols: couplings,
            });
            (hypercycle_to_lattice(*dim, *k)?, fam)
        }
        (ConvolveMode::Partial, Some(F::Hypercycle { dim: 2, k })) => {
            (partial_hypercycle_convolution(*k)?, None)
        }
        (ConvolveMode::Fold, Some(F::Hypercycle { dim: 2, k })) => {
            let lattice = hypercycle_to_lattice(2, *k)?;
            let fold = lattice_fold(&lattice.reduced, k / 2 + 1)?;
            (lattice.then(&fold)?, None)
        }
        (ConvolveMode::Fold, Some(F::WeightedLattice { .. }) | None) => {
            (lattice_fold(&file.graph, lattice_side(file.graph.node_count())?)?, None)
        }
        _ => return Err(unsupported("this mode does not apply to the input graph")),
    };
    let meta = format::reduced_meta(&result, reduced_family.as_ref());
    let reduced = GraphFile::new(result.reduced.clone(), Some(meta));
    emit(args.out.as_deref(), &format::graph_to_json(&reduced))?;
    if let Some(path) = &args.map {
        format::write_text(path, &format::map_to_json(&result))?;
    }
    Ok(())
}

fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let file = args.source.load()?;
    let g = &file.graph;
    let grid = args.grid.grid()?;
    let curve = if args.sink.sink {
        if matches!(args.mode, WalkMode::Classical) {
            return Err(CliError::Usage("--sink applies to the quantum walk only".into()));
        }
        let target = match args.sink.target {
            Some(t) => t,
            None => farthest_node(g, args.start)?,
        };
        lindblad_evolve(g, args.start, &SinkSpec::new(target, args.sink.gamma)?, &grid)?
    } else {
        match args.mode {
            WalkMode::Unitary => unitary_evolve(g, args.start, &grid)?,
            WalkMode::Classical => classical_evolve(g, args.start, &grid)?,
        }
    };
    let mut buf = Vec::new();
    format::write_curve_csv(&mut buf, &curve).map_err(|e| CliError::io("<buffer>", e))?;
    emit(args.out.as_deref(), &String::from_utf8(buf).expect("ascii"))
}

fn compare(args: &CompareArgs) -> CliResult<()> {
    let orig = format::read_graph(&args.orig)?.graph;
    let reduced = format::read_graph(&args.reduced)?.graph;
    let map = format::read_map(&args.map)?;
    let result = ConvolutionResult::new(reduced, map, Method::Composite)?;
    let image = |v: usize| -> CliResult<usize> {
        orig.check_node(v)?;
        Ok(result.map.apply(v).expect("checked node"))
    };
    let start_reduced = image(args.start)?;
    let grid = args.grid.grid()?;
    let sink = if args.sink.sink {
        let target = match args.sink.target {
            Some(t) => t,
            None => farthest_node(&orig, args.start)?,
        };
        Some(SinkPair {
            original: SinkSpec::new(target, args.sink.gamma)?,
            reduced: SinkSpec::new(image(target)?, args.sink.gamma)?,
        })
    } else {
        None
    };
    let dev = verify_equivalence(&orig, args.start, &result, start_reduced, &grid, sink.as_ref())?;
    println!("{dev:e}");
    Ok(())
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("json") + "\n"
}

fn spectrum_cmd(args: &SpectrumArgs) -> CliResult<()> {
    let g = args.source.load()?.graph;
    let s = spectrum(&g)?;
    let d = distinct_eigenvalues(&s, args.tol)?;
    if d.ambiguous {
        eprintln!("warning: an eigenvalue gap lies within twice the tolerance {}", args.tol);
    }
    let doc = json!({
        "eigenvalues": s.values(),
        "distinct": d.values,
        "multiplicities": d.multiplicities,
        "ambiguous": d.ambiguous,
    });
    emit(args.out.as_deref(), &pretty(&doc))
}

fn groups_cmd(args: &GroupsArgs) -> CliResult<()> {
    let g = args.source.load()?.graph;
    let p = equiprobable_groups(&g, args.start, &default_sample_times(), args.tol)?;
    let groups: Vec<_> = p
        .groups
        .iter()
        .map(|g| json!({ "d": g.distance, "nodes": g.nodes }))
        .collect();
    let doc = json!({ "start": p.start, "group_count": p.len(), "groups": groups });
    emit(args.out.as_deref(), &pretty(&doc))
}

fn minimality_cmd(args: &MinimalityArgs) -> CliResult<()> {
    let g = args.source.load()?.graph;
    let report = minimality_report(&g, args.start)?;
    emit(args.out.as_deref(), &format::report_to_json(&report))
}

fn race(args: &RaceArgs) -> CliResult<()> {
    let g = args.source.load()?.graph;
    let base = match args.threshold_base {
        ThresholdBase::Ln => LogBase::Natural,
        ThresholdBase::Log2 => LogBase::Two,
        ThresholdBase::Log10 => LogBase::Ten,
    };
    let mut config = RaceConfig::standard();
    config.grid = TimeGrid::new(args.tmax, args.dt)?;
    config.gamma = args.gamma;
    config.threshold = ThresholdPolicy::InverseLog(base);
    config.classical_detection = match args.mode {
        Detection::Occupancy => ClassicalDetection::Occupancy,
        Detection::FirstPassage => ClassicalDetection::FirstPassage,
    };
    let outcome = harness::run_hitting_races(
        &g,
        &RaceExperiment {
            pair_count: args.pairs,
            seed: args.seed,
            config,
        },
    )?;
    let mut buf = Vec::new();
    format::write_race_csv(&mut buf, &outcome.records).map_err(|e| CliError::io("<buffer>", e))?;
    emit(args.out.as_deref(), &String::from_utf8(buf).expect("ascii"))?;
    eprint!("{}", harness::summary_table(&outcome.summary));
    Ok(())
}

fn export(args: &ExportArgs) -> CliResult<()> {
    let g = args.source.load()?.graph;
    match &args.out {
        Some(path) => harness::export_couplings(&g, path).map(|_| ()),
        None => {
            let rows = format::coupling_rows(&g)?;
            format::write_coupling_csv(std::io::stdout().lock(), &rows)
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

fn experiment(args: &ExperimentArgs) -> CliResult<()> {
    let file = args.source.load()?;
    let chain = Chain::for_graph(&file)?;
    let options = EquivalenceOptions {
        sink: args.sink,
        gamma: args.gamma,
        grid: TimeGrid::new(args.tmax, args.dt)?,
        ..EquivalenceOptions::default()
    };
    let outcome = harness::run_equivalence_experiment(&file.graph, chain, &options)?;
    if let Some(dir) = &args.out {
        outcome.write_to(dir)?;
    }
    print!("{}", format::deviations_to_json(&outcome.deviations));
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Graph(GraphCommand::Build(args)) => {
            let spec = args
                .family
                .spec()?
                .ok_or_else(|| CliError::Usage("graph build needs --family".into()))?;
            let file = GraphFile::new(spec.build()?, Some(format::family_meta(&spec)));
            emit(args.out.as_deref(), &format::graph_to_json(&file))
        }
        Command::Convolve(args) => convolve(args),
        Command::Simulate(args) => simulate(args),
        Command::Compare(args) => compare(args),
        Command::Spectrum(args) => spectrum_cmd(args),
        Command::Groups(args) => groups_cmd(args),
        Command::Minimality(args) => minimality_cmd(args),
        Command::Race(args) => race(args),
        Command::ExportCouplings(args) => export(args),
        Command::Experiment(args) => experiment(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
