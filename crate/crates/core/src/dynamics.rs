//! Quantum (unitary and sink-detected master equation) and classical
//! continuous-time walks, plus hitting statistics on the resulting curves.
//!
//! `ħ = Ω = 1`: the Hamiltonian is the adjacency matrix itself.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::graph::Graph;
use crate::linalg::{Matrix, SymmetricEigen};
use crate::{Error, Result};

/// Internal step for the master-equation integrator unless overridden.
pub const DEFAULT_LINDBLAD_STEP: f64 = 1e-3;

/// Maximum `|tr ρ − 1|` tolerated during master-equation integration.
pub const TRACE_TOLERANCE: f64 = 1e-8;

/// Most negative eigenvalue of ρ tolerated before reporting a failure.
pub const PSD_TOLERANCE: f64 = 1e-6;

/// Uniform sample times `0, dt, …, t_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    dt: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, dt: f64) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::Config(format!("t_max must be positive (got {t_max})")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive (got {dt})")));
        }
        if dt > t_max {
            return Err(Error::Config(format!("dt = {dt} exceeds t_max = {t_max}")));
        }
        let ratio = t_max / dt;
        let steps = libm::round(ratio);
        if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::Config(format!(
                "t_max / dt = {ratio} is not an integer"
            )));
        }
        Ok(TimeGrid {
            t_max,
            dt,
            steps: steps as usize,
        })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of intervals; there are `steps + 1` samples.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, index: usize) -> f64 {
        index as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(move |i| self.time(i))
    }
}

/// Normalized single-particle state `Σ α_i |i⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(Complex64::norm_sqr).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "state norm {norm} differs from 1 by more than 1e-9"
            )));
        }
        Ok(QuantumState { amplitudes })
    }

    pub fn basis(n: usize, node: usize) -> Result<Self> {
        if node >= n {
            return Err(Error::Validation(format!("node {node} out of range 0..{n}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n];
        amplitudes[node] = Complex64::new(1.0, 0.0);
        Ok(QuantumState { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Complex64::norm_sqr).collect()
    }
}

/// Dense `n × n` density matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|node⟩⟨node|`.
    pub fn pure_basis(dim: usize, node: usize) -> Result<Self> {
        if node >= dim {
            return Err(Error::Validation(format!("node {node} out of range 0..{dim}")));
        }
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        entries[node * dim + node] = Complex64::new(1.0, 0.0);
        Ok(DensityMatrix { dim, entries })
    }

    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                what: "density matrix entries",
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(DensityMatrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    /// `max |ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max(libm::sqrt((self.get(i, j) - self.get(j, i).conj()).norm_sqr()));
            }
        }
        worst
    }

    /// Whether every eigenvalue is at least `-tolerance`, tested by a
    /// Cholesky factorization of `ρ + tolerance · I`.
    pub fn is_positive_semidefinite(&self, tolerance: f64) -> bool {
        let n = self.dim;
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = self.get(j, j).re + tolerance;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if d.is_nan() || d <= 0.0 {
                return false;
            }
            let ljj = libm::sqrt(d);
            l[j * n + j] = Complex64::new(ljj, 0.0);
            for i in j + 1..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / ljj;
            }
        }
        true
    }
}

/// Detection setup: the `target` node leaks into an ancillary sink at rate
/// `Γ` through the single jump operator `L = |sink⟩⟨target|`.
///
/// The sink is appended to the graph as node `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkSpec {
    pub target: usize,
    pub rate: f64,
}

impl SinkSpec {
    pub fn new(target: usize, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::Config(format!("sink rate must be nonnegative (got {rate})")));
        }
        Ok(SinkSpec { target, rate })
    }

    /// Sink rate `Γ = 1`.
    pub fn unit(target: usize) -> Self {
        SinkSpec { target, rate: 1.0 }
    }

    /// Index of the sink node on a graph with `node_count` nodes.
    pub fn sink_index(node_count: usize) -> usize {
        node_count
    }

    fn check(&self, graph: &Graph) -> Result<()> {
        graph.check_node(self.target)?;
        if !(self.rate.is_finite() && self.rate >= 0.0) {
            return Err(Error::Config(format!(
                "sink rate must be nonnegative (got {})",
                self.rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Unitary,
    Lindblad,
    Classical,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::Unitary => "unitary",
            CurveKind::Lindblad => "lindblad",
            CurveKind::Classical => "classical",
        }
    }
}

/// Per-sample node probabilities of one simulation.
///
/// Master-equation curves carry an extra trailing column for the sink.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkCurve {
    grid: TimeGrid,
    kind: CurveKind,
    node_count: usize,
    has_sink: bool,
    rows: Vec<Vec<f64>>,
}

impl WalkCurve {
    /// Validates the rows (each sums to 1 within `1e-6`, entries within
    /// `[-1e-9, 1 + 1e-9]`) and clamps entries into `[0, 1]`.
    pub fn new(
        grid: TimeGrid,
        kind: CurveKind,
        node_count: usize,
        has_sink: bool,
        mut rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if rows.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                what: "curve sample count",
                expected: grid.len(),
                found: rows.len(),
            });
        }
        let width = node_count + has_sink as usize;
        for (s, row) in rows.iter_mut().enumerate() {
            if row.len() != width {
                return Err(Error::DimensionMismatch {
                    what: "curve row width",
                    expected: width,
                    found: row.len(),
                });
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > 1e-6 {
                return Err(Error::NumericalFailure(format!(
                    "probabilities at sample {s} sum to {total}"
                )));
            }
            for p in row.iter_mut() {
                if !(*p >= -1e-9 && *p <= 1.0 + 1e-9) {
                    return Err(Error::NumericalFailure(format!(
                        "probability {p} at sample {s} is outside [0, 1]"
                    )));
                }
                *p = p.clamp(0.0, 1.0);
            }
        }
        Ok(WalkCurve {
            grid,
            kind,
            node_count,
            has_sink,
            rows,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    /// Graph nodes, excluding the sink.
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn has_sink(&self) -> bool {
        self.has_sink
    }

    /// Column of the sink, when present.
    pub fn sink_column(&self) -> Option<usize> {
        self.has_sink.then_some(self.node_count)
    }

    pub fn width(&self) -> usize {
        self.node_count + self.has_sink as usize
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn probability(&self, sample: usize, column: usize) -> f64 {
        self.rows[sample][column]
    }

    pub fn series(&self, column: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(move |r| r[column])
    }
}

/// `e^{−iAt}` through the eigendecomposition of `A`; independent of any
/// sampling grid.
#[derive(Debug, Clone)]
pub struct UnitaryPropagator {
    eigen: SymmetricEigen,
}

impl UnitaryPropagator {
    pub fn new(graph: &Graph) -> Result<Self> {
        Ok(UnitaryPropagator {
            eigen: SymmetricEigen::new(&graph.adjacency())?,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigen.dim()
    }

    pub fn eigen(&self) -> &SymmetricEigen {
        &self.eigen
    }

    /// `e^{−iAt} |start⟩`.
    pub fn state(&self, start: usize, t: f64) -> Result<QuantumState> {
        let n = self.dim();
        if start >= n {
            return Err(Error::Validation(format!("start node {start} out of range 0..{n}")));
        }
        if t == 0.0 {
            return QuantumState::basis(n, start);
        }
        let v = &self.eigen.vectors;
        let phases: Vec<Complex64> = self
            .eigen
            .values
            .iter()
            .enumerate()
            .map(|(k, &lambda)| {
                let (s, c) = libm::sincos(lambda * t);
                Complex64::new(c, -s) * v[(start, k)]
            })
            .collect();
        let amplitudes = (0..n)
            .map(|j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, ph) in phases.iter().enumerate() {
                    acc += ph * v[(j, k)];
                }
                acc
            })
            .collect();
        QuantumState::new(amplitudes)
    }

    pub fn probabilities(&self, start: usize, t: f64) -> Result<Vec<f64>> {
        Ok(self.state(start, t)?.probabilities())
    }
}

/// Closed-system walk `|ψ(t)⟩ = e^{−iAt}|start⟩` sampled on `grid`.
pub fn unitary_evolve(graph: &Graph, start: usize, grid: &TimeGrid) -> Result<WalkCurve> {
    graph.check_node(start)?;
    let prop = UnitaryPropagator::new(graph)?;
    let rows = grid
        .times()
        .map(|t| prop.probabilities(start, t))
        .collect::<Result<Vec<_>>>()?;
    WalkCurve::new(*grid, CurveKind::Unitary, graph.node_count(), false, rows)
}

/// Generator of `dρ/dt = −i[A, ρ] + Γ (LρL† − ½{L†L, ρ})`, `L = |sink⟩⟨target|`.
#[derive(Debug, Clone)]
struct SinkGenerator {
    dim: usize,
    neighbors: Vec<Vec<(usize, f64)>>,
    target: usize,
    sink: usize,
    rate: f64,
}

impl SinkGenerator {
    fn rhs(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(k, w) in &self.neighbors[i] {
                    acc += rho[k * n + j] * w;
                }
                for &(k, w) in &self.neighbors[j] {
                    acc -= rho[i * n + k] * w;
                }
                out[i * n + j] = Complex64::new(acc.im, -acc.re);
            }
        }
        if self.rate != 0.0 {
            let (t, s, g) = (self.target, self.sink, self.rate);
            out[s * n + s] += rho[t * n + t] * g;
            let half = 0.5 * g;
            for j in 0..n {
                out[t * n + j] -= rho[t * n + j] * half;
            }
            for i in 0..n {
                out[i * n + t] -= rho[i * n + t] * half;
            }
        }
    }
}

/// Fixed-step RK4 integrator for the sink-detected master equation on the
/// full density matrix (graph nodes plus the sink).
///
/// The Hamiltonian is applied through neighbor lists, so one right-hand-side
/// evaluation costs `O(n² · degree)`.
#[derive(Debug, Clone)]
pub struct LindbladIntegrator {
    generator: SinkGenerator,
    rho: Vec<Complex64>,
    scratch: [Vec<Complex64>; 5],
}

impl LindbladIntegrator {
    pub fn new(graph: &Graph, start: usize, sink: &SinkSpec) -> Result<Self> {
        graph.check_node(start)?;
        sink.check(graph)?;
        let n = graph.node_count();
        let dim = n + 1;
        let mut neighbors = graph.neighbors();
        neighbors.push(Vec::new());
        let rho = DensityMatrix::pure_basis(dim, start)?.entries;
        let zero = vec![Complex64::new(0.0, 0.0); dim * dim];
        Ok(LindbladIntegrator {
            generator: SinkGenerator {
                dim,
                neighbors,
                target: sink.target,
                sink: n,
                rate: sink.rate,
            },
            rho,
            scratch: [zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero],
        })
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        DensityMatrix {
            dim: self.generator.dim,
            entries: self.rho.clone(),
        }
    }

    pub fn trace(&self) -> f64 {
        let n = self.generator.dim;
        (0..n).map(|i| self.rho[i * n + i].re).sum()
    }

    /// Advances ρ by one RK4 step of size `h`.
    pub fn step(&mut self, h: f64) {
        let len = self.rho.len();
        let [k1, k2, k3, k4, tmp] = &mut self.scratch;
        let f = &self.generator;
        f.rhs(&self.rho, k1);
        for x in 0..len {
            tmp[x] = self.rho[x] + k1[x] * (0.5 * h);
        }
        f.rhs(tmp, k2);
        for x in 0..len {
            tmp[x] = self.rho[x] + k2[x] * (0.5 * h);
        }
        f.rhs(tmp, k3);
        for x in 0..len {
            tmp[x] = self.rho[x] + k3[x] * h;
        }
        f.rhs(tmp, k4);
        let sixth = h / 6.0;
        for x in 0..len {
            self.rho[x] += (k1[x] + (k2[x] + k3[x]) * 2.0 + k4[x]) * sixth;
        }
    }

    fn populations(&self) -> Vec<f64> {
        let n = self.generator.dim;
        (0..n).map(|i| self.rho[i * n + i].re).collect()
    }
}

fn substeps(grid: &TimeGrid, step: f64) -> Result<(usize, f64)> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Config(format!("integration step must be positive (got {step})")));
    }
    if step >= grid.dt() {
        return Ok((1, grid.dt()));
    }
    let ratio = grid.dt() / step;
    let count = libm::round(ratio);
    if (ratio - count).abs() > 1e-9 * ratio {
        return Err(Error::Config(format!(
            "sample spacing {} is not a multiple of the integration step {step}",
            grid.dt()
        )));
    }
    Ok((count as usize, grid.dt() / count))
}

/// Master-equation walk with the default RK4 step ([`DEFAULT_LINDBLAD_STEP`]).
pub fn lindblad_evolve(
    graph: &Graph,
    start: usize,
    sink: &SinkSpec,
    grid: &TimeGrid,
) -> Result<WalkCurve> {
    lindblad_evolve_with_step(graph, start, sink, grid, DEFAULT_LINDBLAD_STEP)
}

/// Master-equation walk integrated by RK4 on the full density matrix.
///
/// The curve reports the diagonal of ρ with the sink population last. The
/// trace is re-checked (never renormalized) at every sample; drift above
/// [`TRACE_TOLERANCE`] is an [`Error::Integration`]. Positivity is checked
/// at every sample against [`PSD_TOLERANCE`].
pub fn lindblad_evolve_with_step(
    graph: &Graph,
    start: usize,
    sink: &SinkSpec,
    grid: &TimeGrid,
    step: f64,
) -> Result<WalkCurve> {
    let (per_sample, h) = substeps(grid, step)?;
    let mut integrator = LindbladIntegrator::new(graph, start, sink)?;
    let mut rows = Vec::with_capacity(grid.len());
    rows.push(integrator.populations());
    for sample in 1..grid.len() {
        for _ in 0..per_sample {
            integrator.step(h);
        }
        let drift = (integrator.trace() - 1.0).abs();
        if drift > TRACE_TOLERANCE {
            return Err(Error::Integration {
                time: grid.time(sample),
                drift,
                step: h,
            });
        }
        if !integrator.density_matrix().is_positive_semidefinite(PSD_TOLERANCE) {
            return Err(Error::NumericalFailure(format!(
                "density matrix has an eigenvalue below -{PSD_TOLERANCE} at t = {}",
                grid.time(sample)
            )));
        }
        rows.push(integrator.populations());
    }
    WalkCurve::new(*grid, CurveKind::Lindblad, graph.node_count(), true, rows)
}

/// Same dynamics as [`lindblad_evolve_with_step`], integrated on the
/// system amplitudes instead of the full density matrix.
///
/// With a single jump into an otherwise isolated sink and a pure initial
/// state, `ρ(t) = |ψ⟩⟨ψ| ⊕ (1 − ‖ψ‖²)|sink⟩⟨sink|` where
/// `dψ/dt = −i(A − iΓ/2 |target⟩⟨target|)ψ`. This costs `O(n · degree)`
/// per step rather than `O(n² · degree)`.
pub fn lindblad_evolve_pure_state(
    graph: &Graph,
    start: usize,
    sink: &SinkSpec,
    grid: &TimeGrid,
    step: f64,
) -> Result<WalkCurve> {
    graph.check_node(start)?;
    sink.check(graph)?;
    let (per_sample, h) = substeps(grid, step)?;
    let n = graph.node_count();
    let neighbors = graph.neighbors();
    let half = 0.5 * sink.rate;
    let target = sink.target;
    let rhs = |psi: &[Complex64], out: &mut [Complex64]| {
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(k, w) in &neighbors[i] {
                acc += psi[k] * w;
            }
            out[i] = Complex64::new(acc.im, -acc.re);
        }
        out[target] -= psi[target] * half;
    };

    let mut psi = QuantumState::basis(n, start)?.amplitudes;
    let zero = vec![Complex64::new(0.0, 0.0); n];
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero);
    let populations = |psi: &[Complex64]| {
        let mut row: Vec<f64> = psi.iter().map(Complex64::norm_sqr).collect();
        let remaining: f64 = row.iter().sum();
        row.push(1.0 - remaining);
        row
    };
    let mut rows = Vec::with_capacity(grid.len());
    rows.push(populations(&psi));
    for _ in 1..grid.len() {
        for _ in 0..per_sample {
            rhs(&psi, &mut k1);
            for x in 0..n {
                tmp[x] = psi[x] + k1[x] * (0.5 * h);
            }
            rhs(&tmp, &mut k2);
            for x in 0..n {
                tmp[x] = psi[x] + k2[x] * (0.5 * h);
            }
            rhs(&tmp, &mut k3);
            for x in 0..n {
                tmp[x] = psi[x] + k3[x] * h;
            }
            rhs(&tmp, &mut k4);
            for x in 0..n {
                psi[x] += (k1[x] + (k2[x] + k3[x]) * 2.0 + k4[x]) * (h / 6.0);
            }
        }
        rows.push(populations(&psi));
    }
    WalkCurve::new(*grid, CurveKind::Lindblad, n, true, rows)
}

/// Column-stochastic transition matrix of a classical walk.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    matrix: Matrix,
}

impl TransitionMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// `T[(to, from)]`.
    pub fn get(&self, to: usize, from: usize) -> f64 {
        self.matrix[(to, from)]
    }
}

fn check_no_isolated(graph: &Graph) -> Result<Vec<f64>> {
    let strengths = graph.strengths();
    if let Some(v) = strengths.iter().position(|&s| s <= 0.0) {
        return Err(Error::Validation(format!(
            "node {v} is isolated; classical transition probabilities are undefined"
        )));
    }
    Ok(strengths)
}

/// `T_ji = w_ij / Σ_k w_ik`: departures from node `i` normalized by its
/// total incident weight.
pub fn transition_matrix(graph: &Graph) -> Result<TransitionMatrix> {
    let strengths = check_no_isolated(graph)?;
    let n = graph.node_count();
    let mut matrix = Matrix::zeros(n, n);
    for e in graph.edges() {
        matrix[(e.j, e.i)] = e.weight / strengths[e.i];
        matrix[(e.i, e.j)] = e.weight / strengths[e.j];
    }
    Ok(TransitionMatrix { matrix })
}

/// `p(t) = e^{(T − I)t} p(0)` through the symmetric similarity transform
/// `S = D^{−1/2} W D^{−1/2}`, so `e^{Tt} = D^{1/2} e^{St} D^{−1/2}`.
#[derive(Debug, Clone)]
pub struct ClassicalPropagator {
    sqrt_strength: Vec<f64>,
    eigen: SymmetricEigen,
}

impl ClassicalPropagator {
    pub fn new(graph: &Graph) -> Result<Self> {
        let strengths = check_no_isolated(graph)?;
        let sqrt_strength: Vec<f64> = strengths.iter().map(|&s| libm::sqrt(s)).collect();
        let n = graph.node_count();
        let mut sym = Matrix::zeros(n, n);
        for e in graph.edges() {
            let v = e.weight / (sqrt_strength[e.i] * sqrt_strength[e.j]);
            sym[(e.i, e.j)] = v;
            sym[(e.j, e.i)] = v;
        }
        Ok(ClassicalPropagator {
            sqrt_strength,
            eigen: SymmetricEigen::new(&sym)?,
        })
    }

    pub fn probabilities(&self, start: usize, t: f64) -> Vec<f64> {
        let n = self.sqrt_strength.len();
        if t == 0.0 {
            let mut p = vec![0.0; n];
            p[start] = 1.0;
            return p;
        }
        let v = &self.eigen.vectors;
        let weights: Vec<f64> = self
            .eigen
            .values
            .iter()
            .enumerate()
            .map(|(k, &lambda)| libm::exp((lambda - 1.0) * t) * v[(start, k)])
            .collect();
        let scale = 1.0 / self.sqrt_strength[start];
        (0..n)
            .map(|j| {
                let acc: f64 = weights.iter().enumerate().map(|(k, w)| w * v[(j, k)]).sum();
                self.sqrt_strength[j] * acc * scale
            })
            .collect()
    }
}

/// Classical continuous-time walk `p(t) = e^{−t} e^{Tt} p(0)` from `start`.
pub fn classical_evolve(graph: &Graph, start: usize, grid: &TimeGrid) -> Result<WalkCurve> {
    graph.check_node(start)?;
    let prop = ClassicalPropagator::new(graph)?;
    let rows = grid.times().map(|t| prop.probabilities(start, t)).collect();
    WalkCurve::new(*grid, CurveKind::Classical, graph.node_count(), false, rows)
}

/// Classical walk in which `target` is absorbing: the target column of the
/// curve holds the cumulative first-passage probability.
///
/// Departures are still normalized by the full incident weight; the
/// generator restricted to the transient nodes stays symmetrizable.
pub fn classical_first_passage(
    graph: &Graph,
    start: usize,
    target: usize,
    grid: &TimeGrid,
) -> Result<WalkCurve> {
    graph.check_node(start)?;
    graph.check_node(target)?;
    let strengths = check_no_isolated(graph)?;
    let n = graph.node_count();
    if start == target {
        let rows = grid
            .times()
            .map(|_| {
                let mut r = vec![0.0; n];
                r[target] = 1.0;
                r
            })
            .collect();
        return WalkCurve::new(*grid, CurveKind::Classical, n, false, rows);
    }
    let transient: Vec<usize> = (0..n).filter(|&v| v != target).collect();
    let mut position = vec![usize::MAX; n];
    for (p, &v) in transient.iter().enumerate() {
        position[v] = p;
    }
    let m = transient.len();
    let sq: Vec<f64> = transient.iter().map(|&v| libm::sqrt(strengths[v])).collect();
    let mut sym = Matrix::zeros(m, m);
    for e in graph.edges() {
        if e.i == target || e.j == target {
            continue;
        }
        let (a, b) = (position[e.i], position[e.j]);
        let v = e.weight / (sq[a] * sq[b]);
        sym[(a, b)] = v;
        sym[(b, a)] = v;
    }
    let eigen = SymmetricEigen::new(&sym)?;
    let s = position[start];
    let rows = grid
        .times()
        .map(|t| {
            let weights: Vec<f64> = eigen
                .values
                .iter()
                .enumerate()
                .map(|(k, &lambda)| libm::exp((lambda - 1.0) * t) * eigen.vectors[(s, k)])
                .collect();
            let mut row = vec![0.0; n];
            let mut remaining = 0.0;
            for (p, &v) in transient.iter().enumerate() {
                let acc: f64 = weights
                    .iter()
                    .enumerate()
                    .map(|(k, w)| w * eigen.vectors[(p, k)])
                    .sum();
                let prob = sq[p] * acc / sq[s];
                row[v] = prob;
                remaining += prob;
            }
            row[target] = 1.0 - remaining;
            row
        })
        .collect();
    WalkCurve::new(*grid, CurveKind::Classical, n, false, rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => libm::log(x),
            LogBase::Two => libm::log2(x),
            LogBase::Ten => libm::log10(x),
        }
    }
}

/// Detection threshold `p_th`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdPolicy {
    /// `p_th = 1 / log_base(n)`.
    InverseLog(LogBase),
    Fixed(f64),
}

impl Default for ThresholdPolicy {
    fn default() -> Self {
        ThresholdPolicy::InverseLog(LogBase::Natural)
    }
}

impl ThresholdPolicy {
    /// The threshold for a graph with `node_count` nodes (sink excluded).
    /// Fails unless it lies strictly between 0 and 1.
    pub fn threshold(&self, node_count: usize) -> Result<f64> {
        let p = match *self {
            ThresholdPolicy::InverseLog(base) => {
                if node_count < 2 {
                    return Err(Error::Config(format!(
                        "threshold 1/log(n) undefined for n = {node_count}"
                    )));
                }
                1.0 / base.log(node_count as f64)
            }
            ThresholdPolicy::Fixed(p) => p,
        };
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Config(format!(
                "detection threshold {p} must lie in (0, 1) (n = {node_count})"
            )));
        }
        Ok(p)
    }
}

/// Outcome of watching one node of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HitOutcome {
    /// First grid index whose probability reaches the threshold.
    Hit(usize),
    Failure,
}

impl HitOutcome {
    pub fn step(self) -> Option<usize> {
        match self {
            HitOutcome::Hit(s) => Some(s),
            HitOutcome::Failure => None,
        }
    }
}

/// Smallest sample index where the watched column reaches `p_th`.
///
/// Master-equation curves must be watched at their sink column.
pub fn hitting_step(
    curve: &WalkCurve,
    watch: usize,
    policy: &ThresholdPolicy,
    n_for_threshold: usize,
) -> Result<HitOutcome> {
    let p_th = policy.threshold(n_for_threshold)?;
    if watch >= curve.width() {
        return Err(Error::Validation(format!(
            "watched column {watch} out of range 0..{}",
            curve.width()
        )));
    }
    if curve.kind() == CurveKind::Lindblad && curve.sink_column() != Some(watch) {
        return Err(Error::Config(
            "master-equation curves are watched at the sink".into(),
        ));
    }
    Ok(curve
        .series(watch)
        .position(|p| p >= p_th)
        .map_or(HitOutcome::Failure, HitOutcome::Hit))
}
