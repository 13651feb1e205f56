//! Hitting-time races between a classical walker and a quantum walker with
//! a sink, over randomly sampled source/target pairs.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::dynamics::{
    classical_first_passage, hitting_step, lindblad_evolve_pure_state, lindblad_evolve_with_step,
    ClassicalPropagator, CurveKind, HitOutcome, SinkSpec, ThresholdPolicy, TimeGrid, WalkCurve,
    DEFAULT_LINDBLAD_STEP,
};
use crate::graph::{distances_from, Graph};
use crate::{Error, Result};

/// SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `0..bound` by rejection; `bound` must be nonzero.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % bound;
            }
        }
    }
}

/// `count` ordered pairs `(source, target)` with `source ≠ target`.
///
/// The pool of all such pairs, in lexicographic order, is drawn without
/// replacement by a partial Fisher–Yates shuffle. When `count` exceeds the
/// pool a new pass starts from a fresh lexicographic pool, so no pair
/// repeats until every pair has appeared.
pub fn sample_pairs(node_count: usize, count: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    if node_count < 2 {
        return Err(Error::Config(format!(
            "pair sampling needs at least 2 nodes (got {node_count})"
        )));
    }
    let fresh = || -> Vec<(usize, usize)> {
        (0..node_count)
            .flat_map(|s| (0..node_count).filter(move |&t| t != s).map(move |t| (s, t)))
            .collect()
    };
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut pool = fresh();
        let take = (count - out.len()).min(pool.len());
        for i in 0..take {
            let j = i + rng.next_below((pool.len() - i) as u64) as usize;
            pool.swap(i, j);
            out.push(pool[i]);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Winner {
    Classical,
    Quantum,
    Tie,
    BothFailed,
}

impl Winner {
    /// A failure loses to any hit; equal hitting steps tie.
    pub fn from_outcomes(classical: HitOutcome, quantum: HitOutcome) -> Self {
        match (classical.step(), quantum.step()) {
            (None, None) => Winner::BothFailed,
            (Some(_), None) => Winner::Classical,
            (None, Some(_)) => Winner::Quantum,
            (Some(c), Some(q)) if c < q => Winner::Classical,
            (Some(c), Some(q)) if q < c => Winner::Quantum,
            _ => Winner::Tie,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Winner::Classical => "classical",
            Winner::Quantum => "quantum",
            Winner::Tie => "tie",
            Winner::BothFailed => "both_failed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HittingRecord {
    pub pair: usize,
    pub source: usize,
    pub target: usize,
    pub distance: usize,
    pub classical: HitOutcome,
    pub quantum: HitOutcome,
    pub winner: Winner,
}

/// How the master equation is integrated for a race.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuantumRoute {
    /// RK4 on the no-jump amplitudes; same sink curve, far cheaper.
    #[default]
    PureState,
    DensityMatrix,
}

/// What the classical walker's detection watches at the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClassicalDetection {
    /// Instantaneous occupation of the target.
    #[default]
    Occupancy,
    /// Cumulative probability of having reached the target.
    FirstPassage,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaceConfig {
    pub grid: TimeGrid,
    pub gamma: f64,
    pub threshold: ThresholdPolicy,
    pub lindblad_step: f64,
    pub quantum_route: QuantumRoute,
    pub classical_detection: ClassicalDetection,
}

impl RaceConfig {
    /// `t ≤ 20`, `Δt = 0.1`, `Γ = 1`, `p_th = 1/ln n`.
    pub fn standard() -> Self {
        RaceConfig {
            grid: TimeGrid::new(20.0, 0.1).expect("valid grid"),
            gamma: 1.0,
            threshold: ThresholdPolicy::default(),
            lindblad_step: DEFAULT_LINDBLAD_STEP,
            quantum_route: QuantumRoute::default(),
            classical_detection: ClassicalDetection::default(),
        }
    }
}

impl Default for RaceConfig {
    fn default() -> Self {
        Self::standard()
    }
}

/// Per-graph state shared by every race on that graph.
#[derive(Debug, Clone)]
pub struct RaceArena<'g> {
    graph: &'g Graph,
    config: RaceConfig,
    classical: Option<ClassicalPropagator>,
}

impl<'g> RaceArena<'g> {
    pub fn new(graph: &'g Graph, config: RaceConfig) -> Result<Self> {
        config.threshold.threshold(graph.node_count())?;
        SinkSpec::new(0, config.gamma)?;
        if !graph.is_connected() {
            return Err(Error::Domain("races need a connected graph".into()));
        }
        let classical = match config.classical_detection {
            ClassicalDetection::Occupancy => Some(ClassicalPropagator::new(graph)?),
            ClassicalDetection::FirstPassage => None,
        };
        Ok(RaceArena {
            graph,
            config,
            classical,
        })
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn config(&self) -> &RaceConfig {
        &self.config
    }

    pub fn classical_curve(&self, source: usize, target: usize) -> Result<WalkCurve> {
        let grid = &self.config.grid;
        match &self.classical {
            Some(prop) => {
                self.graph.check_node(source)?;
                let rows = grid.times().map(|t| prop.probabilities(source, t)).collect();
                WalkCurve::new(*grid, CurveKind::Classical, self.graph.node_count(), false, rows)
            }
            None => classical_first_passage(self.graph, source, target, grid),
        }
    }

    pub fn quantum_curve(&self, source: usize, target: usize) -> Result<WalkCurve> {
        let sink = SinkSpec::new(target, self.config.gamma)?;
        let (grid, step) = (&self.config.grid, self.config.lindblad_step);
        match self.config.quantum_route {
            QuantumRoute::PureState => {
                lindblad_evolve_pure_state(self.graph, source, &sink, grid, step)
            }
            QuantumRoute::DensityMatrix => {
                lindblad_evolve_with_step(self.graph, source, &sink, grid, step)
            }
        }
    }

    /// Classical hit watched at the target, quantum hit watched at the sink.
    pub fn race(&self, pair: usize, source: usize, target: usize) -> Result<HittingRecord> {
        if source == target {
            return Err(Error::Config(format!("race source and target coincide ({source})")));
        }
        let n = self.graph.node_count();
        let distance = distances_from(self.graph, source)[target].ok_or(Error::Disconnected {
            from: source,
            to: target,
        })?;
        let classical_curve = self.classical_curve(source, target)?;
        let quantum_curve = self.quantum_curve(source, target)?;
        let policy = &self.config.threshold;
        let classical = hitting_step(&classical_curve, target, policy, n)?;
        let sink_column = quantum_curve.sink_column().expect("sink curve");
        let quantum = hitting_step(&quantum_curve, sink_column, policy, n)?;
        Ok(HittingRecord {
            pair,
            source,
            target,
            distance,
            classical,
            quantum,
            winner: Winner::from_outcomes(classical, quantum),
        })
    }
}

/// Races every pair in order.
pub fn run_races(
    graph: &Graph,
    config: RaceConfig,
    pairs: &[(usize, usize)],
) -> Result<Vec<HittingRecord>> {
    let arena = RaceArena::new(graph, config)?;
    pairs
        .iter()
        .enumerate()
        .map(|(k, &(s, t))| arena.race(k, s, t))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WinCounts {
    pub classical: usize,
    pub quantum: usize,
    pub tie: usize,
    pub both_failed: usize,
}

impl WinCounts {
    pub fn total(&self) -> usize {
        self.classical + self.quantum + self.tie + self.both_failed
    }

    /// Races where exactly one walker hit first.
    pub fn decided(&self) -> usize {
        self.classical + self.quantum
    }

    fn add(&mut self, w: Winner) {
        match w {
            Winner::Classical => self.classical += 1,
            Winner::Quantum => self.quantum += 1,
            Winner::Tie => self.tie += 1,
            Winner::BothFailed => self.both_failed += 1,
        }
    }
}

/// Win counts per source–target hop distance.
pub fn summarize(records: &[HittingRecord]) -> BTreeMap<usize, WinCounts> {
    let mut by_distance: BTreeMap<usize, WinCounts> = BTreeMap::new();
    for r in records {
        by_distance.entry(r.distance).or_default().add(r.winner);
    }
    by_distance
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_cycle, build_weighted_line};

    #[test]
    fn splitmix_reference_values() {
        let mut r = SplitMix64::new(1234567);
        assert_eq!(r.next_u64(), 6457827717110365317);
        assert_eq!(r.next_u64(), 3203168211198807973);
    }

    #[test]
    fn bounded_draws_stay_in_range() {
        let mut r = SplitMix64::new(7);
        for bound in [1u64, 2, 3, 7, 1000] {
            for _ in 0..200 {
                assert!(r.next_below(bound) < bound);
            }
        }
    }

    #[test]
    fn pairs_are_distinct_until_exhausted() {
        let pairs = sample_pairs(4, 12, 3).unwrap();
        let mut sorted = pairs.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 12);
        assert!(pairs.iter().all(|(s, t)| s != t));
        let more = sample_pairs(4, 30, 3).unwrap();
        assert_eq!(&more[..12], &pairs[..]);
        assert_eq!(more.len(), 30);
        assert_eq!(sample_pairs(4, 12, 3).unwrap(), pairs);
        assert!(sample_pairs(1, 1, 0).is_err());
    }

    #[test]
    fn winner_rules() {
        use HitOutcome::*;
        assert_eq!(Winner::from_outcomes(Hit(3), Hit(5)), Winner::Classical);
        assert_eq!(Winner::from_outcomes(Hit(5), Hit(3)), Winner::Quantum);
        assert_eq!(Winner::from_outcomes(Hit(4), Hit(4)), Winner::Tie);
        assert_eq!(Winner::from_outcomes(Failure, Hit(9)), Winner::Quantum);
        assert_eq!(Winner::from_outcomes(Hit(9), Failure), Winner::Classical);
        assert_eq!(Winner::from_outcomes(Failure, Failure), Winner::BothFailed);
    }

    #[test]
    fn routes_agree_on_a_small_cycle() {
        let g = build_cycle(6).unwrap();
        let mut cfg = RaceConfig::standard();
        cfg.grid = TimeGrid::new(5.0, 0.1).unwrap();
        let a = RaceArena::new(&g, cfg).unwrap().race(0, 0, 3).unwrap();
        cfg.quantum_route = QuantumRoute::DensityMatrix;
        let b = RaceArena::new(&g, cfg).unwrap().race(0, 0, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.distance, 3);
    }

    #[test]
    fn summary_counts() {
        let g = build_weighted_line(&[1.0, 1.0, 1.0]).unwrap();
        let recs = run_races(&g, RaceConfig::standard(), &[(0, 1), (0, 3), (3, 0)]).unwrap();
        let s = summarize(&recs);
        let total: usize = s.values().map(WinCounts::total).sum();
        assert_eq!(total, 3);
        assert_eq!(s[&3].total(), 2);
        assert!(run_races(&g, RaceConfig::standard(), &[(1, 1)]).is_err());
    }
}
