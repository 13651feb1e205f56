//! Dense reference computations that share no code with the library.

#![allow(dead_code, clippy::needless_range_loop)]

use graphfold_core::graph::Graph;
use graphfold_core::Complex64;

pub type C = Complex64;

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug)]
pub struct CMat {
    pub n: usize,
    pub a: Vec<C>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat { n, a: vec![C::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = C::new(1.0, 0.0);
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> C {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        self.a[i * self.n + j] = v;
    }

    pub fn mul(&self, o: &CMat) -> CMat {
        let n = self.n;
        let mut r = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                if x == C::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    r.a[i * n + j] += x * o.a[k * n + j];
                }
            }
        }
        r
    }

    pub fn scale(&self, s: C) -> CMat {
        CMat { n: self.n, a: self.a.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, o: &CMat) -> CMat {
        CMat { n: self.n, a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect() }
    }

    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.at(i, j).norm_sqr().sqrt()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j) * v[j]).sum())
            .collect()
    }
}

/// `e^M` by scaling and squaring with a degree-20 Taylor polynomial.
pub fn expm(m: &CMat) -> CMat {
    let norm = m.norm1();
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let x = m.scale(C::new(1.0 / 2f64.powi(s), 0.0));
    let mut term = CMat::identity(m.n);
    let mut sum = CMat::identity(m.n);
    for k in 1..=20 {
        term = term.mul(&x).scale(C::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
    }
    for _ in 0..s {
        sum = sum.mul(&sum);
    }
    sum
}

/// Adjacency read edge by edge from the public edge list.
pub fn dense_adjacency(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut a = vec![vec![0.0; n]; n];
    for e in g.edges() {
        a[e.i][e.j] = e.weight;
        a[e.j][e.i] = e.weight;
    }
    a
}

/// `A ⊗ I + I ⊗ B`.
pub fn kron_sum(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (na, nb) = (a.len(), b.len());
    let mut out = vec![vec![0.0; na * nb]; na * nb];
    for i in 0..na {
        for j in 0..na {
            for k in 0..nb {
                out[i * nb + k][j * nb + k] += a[i][j];
            }
        }
    }
    for i in 0..na {
        for k in 0..nb {
            for l in 0..nb {
                out[i * nb + k][i * nb + l] += b[k][l];
            }
        }
    }
    out
}

/// `e^{−iAt}` applied to `|start⟩`, as probabilities.
pub fn unitary_probabilities(g: &Graph, start: usize, t: f64) -> Vec<f64> {
    let a = dense_adjacency(g);
    let n = a.len();
    let mut h = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            h.set(i, j, C::new(0.0, -a[i][j] * t));
        }
    }
    let u = expm(&h);
    (0..n).map(|i| u.at(i, start).norm_sqr()).collect()
}

/// Off-diagonal entries of the tridiagonal matrix Lanczos produces from
/// `A` and `|start⟩` (full reorthogonalization); stops when the Krylov
/// space closes.
pub fn lanczos_couplings(g: &Graph, start: usize) -> Vec<f64> {
    let n = g.node_count();
    let matvec = |x: &[f64]| {
        let mut y = vec![0.0; n];
        for e in g.edges() {
            y[e.i] += e.weight * x[e.j];
            y[e.j] += e.weight * x[e.i];
        }
        y
    };
    let mut cur = vec![0.0; n];
    cur[start] = 1.0;
    let mut betas = Vec::new();
    let mut basis: Vec<Vec<f64>> = vec![cur.clone()];
    loop {
        let mut w = matvec(&cur);
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                for i in 0..n {
                    w[i] -= c * b[i];
                }
            }
        }
        let beta = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if beta < 1e-9 {
            return betas;
        }
        betas.push(beta);
        cur = w.iter().map(|x| x / beta).collect();
        basis.push(cur.clone());
    }
}

/// `Pᵀ A P` for the orthonormal basis of swap-symmetric states of a
/// `side × side` lattice: `|aa⟩` and `(|ab⟩ + |ba⟩)/√2` for `a < b`,
/// ordered row-major over `a ≤ b`.
pub fn symmetric_subspace_adjacency(lattice: &Graph, side: usize) -> Vec<Vec<f64>> {
    let a = dense_adjacency(lattice);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for x in 0..side {
        for y in x..side {
            let mut v = vec![0.0; side * side];
            if x == y {
                v[x * side + y] = 1.0;
            } else {
                v[x * side + y] = 0.5f64.sqrt();
                v[y * side + x] = 0.5f64.sqrt();
            }
            basis.push(v);
        }
    }
    let m = basis.len();
    let n = side * side;
    let mut out = vec![vec![0.0; m]; m];
    for p in 0..m {
        let av: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j] * basis[p][j]).sum()).collect();
        for q in 0..m {
            out[q][p] = basis[q].iter().zip(&av).map(|(x, y)| x * y).sum();
        }
    }
    out
}

/// Superoperator of `dρ/dt = −i[H, ρ] + Γ(LρL† − ½{L†L, ρ})` with
/// `L = |sink⟩⟨target|`, acting on row-major `vec(ρ)` of the graph plus
/// one sink node.
pub fn lindblad_superoperator(g: &Graph, target: usize, gamma: f64) -> CMat {
    let a = dense_adjacency(g);
    let n = a.len();
    let d = n + 1;
    let sink = n;
    let mut h = vec![vec![0.0; d]; d];
    for i in 0..n {
        h[i][..n].copy_from_slice(&a[i]);
    }
    let mut l = vec![vec![0.0; d]; d];
    l[sink][target] = 1.0;
    // L†L = |target⟩⟨target|
    let mut ldl = vec![vec![0.0; d]; d];
    ldl[target][target] = 1.0;
    let idx = |i: usize, j: usize| i * d + j;
    let mut s = CMat::zeros(d * d);
    let i_ = C::new(0.0, 1.0);
    for i in 0..d {
        for j in 0..d {
            let col = idx(i, j);
            // −i(Hρ − ρH) with ρ = |i⟩⟨j|
            for k in 0..d {
                if h[k][i] != 0.0 {
                    let r = idx(k, j);
                    s.a[r * d * d + col] += -i_ * h[k][i];
                }
                if h[j][k] != 0.0 {
                    let r = idx(i, k);
                    s.a[r * d * d + col] += i_ * h[j][k];
                }
            }
            // Γ L|i⟩⟨j|L†
            for p in 0..d {
                for q in 0..d {
                    let v = l[p][i] * l[q][j];
                    if v != 0.0 {
                        s.a[idx(p, q) * d * d + col] += C::new(gamma * v, 0.0);
                    }
                }
            }
            // −Γ/2 (L†L ρ + ρ L†L)
            for k in 0..d {
                if ldl[k][i] != 0.0 {
                    s.a[idx(k, j) * d * d + col] += C::new(-0.5 * gamma * ldl[k][i], 0.0);
                }
                if ldl[j][k] != 0.0 {
                    s.a[idx(i, k) * d * d + col] += C::new(-0.5 * gamma * ldl[j][k], 0.0);
                }
            }
        }
    }
    s
}

/// Populations `ρ_ii(t)` (sink last) from the superoperator exponential.
pub fn lindblad_oracle_populations(g: &Graph, start: usize, target: usize, gamma: f64, t: f64) -> Vec<f64> {
    let d = g.node_count() + 1;
    let s = lindblad_superoperator(g, target, gamma).scale(C::new(t, 0.0));
    let e = expm(&s);
    let mut rho0 = vec![C::new(0.0, 0.0); d * d];
    rho0[start * d + start] = C::new(1.0, 0.0);
    let rho = e.apply(&rho0);
    (0..d).map(|i| rho[i * d + i].re).collect()
}

/// Classical `e^{(T − I)t} p(0)` with `T_ij = w_ij / s_j`.
pub fn classical_probabilities(g: &Graph, start: usize, t: f64) -> Vec<f64> {
    let a = dense_adjacency(g);
    let n = a.len();
    let s: Vec<f64> = (0..n).map(|j| a.iter().map(|r| r[j]).sum()).collect();
    let mut m = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let v = a[i][j] / s[j] - if i == j { 1.0 } else { 0.0 };
            m.set(i, j, C::new(v * t, 0.0));
        }
    }
    let e = expm(&m);
    (0..n).map(|i| e.at(i, start).re).collect()
}

/// Same walk with `target` absorbing; entry `target` is the absorbed mass.
pub fn absorbing_probabilities(g: &Graph, start: usize, target: usize, t: f64) -> Vec<f64> {
    let a = dense_adjacency(g);
    let n = a.len();
    let s: Vec<f64> = (0..n).map(|j| a.iter().map(|r| r[j]).sum()).collect();
    let mut m = CMat::zeros(n);
    for j in 0..n {
        if j == target {
            continue;
        }
        for i in 0..n {
            let v = a[i][j] / s[j] - if i == j { 1.0 } else { 0.0 };
            m.set(i, j, C::new(v * t, 0.0));
        }
    }
    let e = expm(&m);
    (0..n).map(|i| e.at(i, start).re).collect()
}

pub fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
