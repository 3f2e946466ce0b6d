//! Utility estimation from feature PCCs.
//!
//! Per frame: the per-feature PCCs of each reference channel are fused into
//! one similarity vector by a single power-iteration step, the vectors form
//! a similarity graph, and the Fiedler vector of its random-walk Laplacian,
//! oriented by the entropy side information, is the utility estimate.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::stats::pcc;
use crate::tracker::PccTensor;

/// Below this norm a power-iteration product is treated as zero.
const POWER_FLOOR: f64 = 1e-12;
/// Self-similarity entries smaller than this cannot be normalized.
const SELF_FLOOR: f64 = 1e-6;

/// `[M_p]_{q,i} = r_{p,q}^{(i)}` for every reference channel `p`.
pub fn build_channel_matrices(pcc: &PccTensor) -> Vec<DMatrix<f64>> {
    let (n, features) = (pcc.channels(), pcc.features());
    (0..n)
        .map(|p| DMatrix::from_fn(n, features, |q, i| pcc.get(p, q, i)))
        .collect()
}

/// One power-iteration step towards the principal left singular vector of `m`.
pub fn power_iterate(a_prev: &DVector<f64>, m: &DMatrix<f64>) -> DVector<f64> {
    let next = m * (m.transpose() * a_prev);
    let norm = next.norm();
    if norm < POWER_FLOOR || !norm.is_finite() {
        a_prev.clone()
    } else {
        next / norm
    }
}

/// Iterate [`power_iterate`] until successive iterates agree up to sign.
pub fn principal_left_singular_vector(
    m: &DMatrix<f64>,
    start: &DVector<f64>,
    max_iter: usize,
    tol: f64,
) -> DVector<f64> {
    let mut a = start.clone();
    for _ in 0..max_iter {
        let next = power_iterate(&a, m);
        let delta = (&next - &a).norm().min((&next + &a).norm());
        a = next;
        if delta < tol {
            break;
        }
    }
    a
}

/// Per-channel similarity vectors carried from frame to frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSimilarityState {
    vectors: Vec<DVector<f64>>,
    last_similarity: DMatrix<f64>,
}

impl ChannelSimilarityState {
    pub fn new(channels: usize) -> Self {
        let start = DVector::from_element(channels, 1.0 / (channels as f64).sqrt());
        Self {
            vectors: vec![start; channels],
            last_similarity: DMatrix::identity(channels, channels),
        }
    }

    pub fn channels(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    pub fn set_vectors(&mut self, vectors: Vec<DVector<f64>>) -> Result<()> {
        let n = self.channels();
        if vectors.len() != n || vectors.iter().any(|v| v.len() != n) {
            return Err(Error::Dimension {
                what: "similarity vectors",
                expected: n,
                actual: vectors.len(),
            });
        }
        self.vectors = vectors;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph {
    pub similarity: DMatrix<f64>,
    pub adjacency: DMatrix<f64>,
    pub degrees: DVector<f64>,
    pub laplacian: DMatrix<f64>,
}

impl SimilarityGraph {
    /// Build the degree vector and random-walk Laplacian of an adjacency matrix.
    pub fn from_adjacency(adjacency: DMatrix<f64>) -> Self {
        let n = adjacency.nrows();
        let degrees = DVector::from_fn(n, |p, _| adjacency.row(p).sum());
        let laplacian = DMatrix::from_fn(n, n, |p, q| {
            let delta = if p == q { 1.0 } else { 0.0 };
            delta - adjacency[(p, q)] / degrees[p]
        });
        Self {
            similarity: adjacency.clone(),
            adjacency,
            degrees,
            laplacian,
        }
    }

    pub fn channels(&self) -> usize {
        self.adjacency.nrows()
    }
}

/// Similarity matrix from the self-normalized vectors, then its symmetric
/// magnitude as adjacency. A column whose self entry is too small to divide
/// by is taken from the previous frame's similarity matrix.
pub fn assemble_graph(state: &ChannelSimilarityState) -> SimilarityGraph {
    let n = state.channels();
    let mut s = DMatrix::zeros(n, n);
    for (p, a) in state.vectors.iter().enumerate() {
        let pivot = a[p];
        if pivot.abs() < SELF_FLOOR {
            s.set_column(p, &state.last_similarity.column(p));
        } else {
            s.set_column(p, &(a / pivot));
        }
    }
    let adjacency = DMatrix::from_fn(n, n, |p, q| 0.5 * (s[(p, q)].abs() + s[(q, p)].abs()));
    let mut graph = SimilarityGraph::from_adjacency(adjacency);
    graph.similarity = s;
    graph
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fiedler {
    pub vector: DVector<f64>,
    pub eigenvalue: f64,
}

/// Eigenvector of the random-walk Laplacian at the smallest non-trivial
/// eigenvalue, unit 2-norm, with its first non-negligible entry positive.
///
/// Solved through the symmetric form `I - D^-1/2 W D^-1/2`; the trivial
/// direction `D^1/2 1` is shifted out of the way so the result is always
/// `D`-orthogonal to the all-ones vector, also for disconnected graphs.
pub fn fiedler_vector(graph: &SimilarityGraph) -> Result<Fiedler> {
    let n = graph.channels();
    if n < 2 {
        return Err(Error::InsufficientInput(
            "Fiedler vector needs at least 2 channels".into(),
        ));
    }
    if let Some(d) = graph.degrees.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
        return Err(Error::Config(format!("graph degree {d} is not positive")));
    }
    let inv_sqrt = graph.degrees.map(|d| 1.0 / d.sqrt());
    let trivial = graph.degrees.map(f64::sqrt).normalize();
    // eigenvalues of the normalized Laplacian lie in [0, 2]
    let shift = 3.0;
    let sym = DMatrix::from_fn(n, n, |p, q| {
        let delta = if p == q { 1.0 } else { 0.0 };
        delta - graph.adjacency[(p, q)] * inv_sqrt[p] * inv_sqrt[q]
            + shift * trivial[p] * trivial[q]
    });
    let eig = SymmetricEigen::new(sym);
    let k = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("non-empty spectrum");
    let v = eig.eigenvectors.column(k);
    let mut t = DVector::from_fn(n, |p, _| v[p] * inv_sqrt[p]);
    t /= t.norm();
    if let Some(first) = t.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            t = -t;
        }
    }
    Ok(Fiedler {
        vector: t,
        eigenvalue: eig.eigenvalues[k],
    })
}

/// Normalized cut of the bipartition `subset` / complement.
pub fn ncut_score(adjacency: &DMatrix<f64>, subset: &[bool]) -> f64 {
    let n = adjacency.nrows();
    assert_eq!(subset.len(), n, "subset mask length");
    let mut cut = 0.0;
    let (mut vol_a, mut vol_b) = (0.0, 0.0);
    for p in 0..n {
        let degree: f64 = adjacency.row(p).sum();
        if subset[p] {
            vol_a += degree;
        } else {
            vol_b += degree;
        }
        for q in 0..n {
            if subset[p] && !subset[q] {
                cut += adjacency[(p, q)];
            }
        }
    }
    if vol_a <= 0.0 || vol_b <= 0.0 {
        return f64::INFINITY;
    }
    cut * (1.0 / vol_a + 1.0 / vol_b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtilityVector {
    pub u: DVector<f64>,
    pub fiedler: DVector<f64>,
    /// PCC between the Fiedler vector and the side information.
    pub flip_corr: f64,
}

/// Orient `t` so that it correlates non-negatively with `side`.
pub fn disambiguate_sign(t: &DVector<f64>, side: &[f64]) -> UtilityVector {
    let flip_corr = pcc(t.as_slice(), side).unwrap_or(0.0);
    let u = if flip_corr >= 0.0 { t.clone() } else { -t };
    UtilityVector {
        u,
        fiedler: t.clone(),
        flip_corr,
    }
}

#[derive(Debug, Clone)]
pub struct StepOutput {
    pub utility: UtilityVector,
    pub graph: SimilarityGraph,
    pub fiedler_eigenvalue: f64,
}

/// Recursive frame-by-frame utility estimator.
#[derive(Debug, Clone)]
pub struct UtilityEstimator {
    state: ChannelSimilarityState,
}

impl UtilityEstimator {
    pub fn new(channels: usize) -> Self {
        Self {
            state: ChannelSimilarityState::new(channels),
        }
    }

    pub fn state(&self) -> &ChannelSimilarityState {
        &self.state
    }

    pub fn step(&mut self, pcc: &PccTensor, entropy_neg: &[f64]) -> Result<StepOutput> {
        let n = self.state.channels();
        if pcc.channels() != n {
            return Err(Error::Dimension {
                what: "PCC channels",
                expected: n,
                actual: pcc.channels(),
            });
        }
        if entropy_neg.len() != n {
            return Err(Error::Dimension {
                what: "entropy side information",
                expected: n,
                actual: entropy_neg.len(),
            });
        }
        let matrices = build_channel_matrices(pcc);
        for (a, m) in self.state.vectors.iter_mut().zip(&matrices) {
            *a = power_iterate(a, m);
        }
        let graph = assemble_graph(&self.state);
        self.state.last_similarity = graph.similarity.clone();
        let fiedler = fiedler_vector(&graph)?;
        let utility = disambiguate_sign(&fiedler.vector, entropy_neg);
        Ok(StepOutput {
            utility,
            graph,
            fiedler_eigenvalue: fiedler.eigenvalue,
        })
    }
}
