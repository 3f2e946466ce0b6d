//! Sparse feature weighting by l1-regularized least squares.
//!
//! Every (trial, frame, reference channel, row) contributes one dictionary
//! row `[M_p]_q` against the zero-mean MSC target `[gamma_bar]_q`, weighted by
//! `1 / (N * frames)` of its trial. The solver only needs the weighted Gram
//! matrix and correlation vector, so problems accumulate those directly and
//! never hold the rows.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureId;
use crate::msc::MscVector;

/// Regularization weights of the feature-importance sweep.
pub const SWEEP_LAMBDAS: [f64; 5] = [0.002, 0.001, 0.0005, 0.0002, 0.0001];

/// How trial costs combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialWeighting {
    /// Data terms are summed over trials under a single penalty.
    Sum,
    /// Each trial carries its own penalty and the trial costs are summed,
    /// which equals averaging the data terms under one penalty; repeating
    /// trials leaves the argmin unchanged.
    #[default]
    Mean,
}

pub fn zero_mean_msc(gamma: &MscVector) -> Vec<f64> {
    let n = gamma.len() as f64;
    let mean = gamma.0.iter().sum::<f64>() / n;
    gamma.0.iter().map(|g| g - mean).collect()
}

#[inline]
pub fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Sufficient statistics of a weighted least-squares problem with `features` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoProblem {
    features: usize,
    gram: DMatrix<f64>,
    corr: DVector<f64>,
    target_energy: f64,
    rows: usize,
    trials: usize,
    weighting: TrialWeighting,
}

impl LassoProblem {
    pub fn new(features: usize, weighting: TrialWeighting) -> Self {
        Self {
            features,
            gram: DMatrix::zeros(features, features),
            corr: DVector::zeros(features),
            target_energy: 0.0,
            rows: 0,
            trials: 0,
            weighting,
        }
    }

    pub fn features(&self) -> usize {
        self.features
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn push_row(&mut self, row: &[f64], target: f64, weight: f64) -> Result<()> {
        if row.len() != self.features {
            return Err(Error::Dimension {
                what: "dictionary row",
                expected: self.features,
                actual: row.len(),
            });
        }
        if !target.is_finite() || row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("non-finite dictionary row or target".into()));
        }
        for i in 0..self.features {
            let wi = weight * row[i];
            self.corr[i] += wi * target;
            for (j, &rj) in row.iter().enumerate().skip(i) {
                self.gram[(i, j)] += wi * rj;
            }
        }
        self.target_energy += weight * target * target;
        self.rows += 1;
        Ok(())
    }

    /// Add one trial: per frame, the channel matrices `M_p` (N x I) and the
    /// MSC vector. Rows are weighted by `1 / (N * frames)`.
    pub fn add_trial(&mut self, frames: &[(Vec<DMatrix<f64>>, MscVector)]) -> Result<()> {
        let Some((_, gamma0)) = frames.first() else {
            return Err(Error::InsufficientInput("trial without frames".into()));
        };
        let n = gamma0.len();
        let weight = 1.0 / (n as f64 * frames.len() as f64);
        for (matrices, gamma) in frames {
            if gamma.len() != n || matrices.len() != n {
                return Err(Error::Dimension {
                    what: "channels per frame",
                    expected: n,
                    actual: matrices.len().min(gamma.len()),
                });
            }
            let target = zero_mean_msc(gamma);
            for m in matrices {
                if m.nrows() != n || m.ncols() != self.features {
                    return Err(Error::Dimension {
                        what: "channel matrix columns",
                        expected: self.features,
                        actual: m.ncols(),
                    });
                }
                for (q, &t) in target.iter().enumerate() {
                    let row: Vec<f64> = m.row(q).iter().copied().collect();
                    self.push_row(&row, t, weight)?;
                }
            }
        }
        self.trials += 1;
        Ok(())
    }

    fn scale(&self) -> f64 {
        match self.weighting {
            TrialWeighting::Sum => 1.0,
            TrialWeighting::Mean => 1.0 / self.trials.max(1) as f64,
        }
    }

    /// Weighted Gram matrix `sum w x x^T` (full symmetric).
    pub fn gram(&self) -> DMatrix<f64> {
        let s = self.scale();
        DMatrix::from_fn(self.features, self.features, |i, j| {
            s * if i <= j {
                self.gram[(i, j)]
            } else {
                self.gram[(j, i)]
            }
        })
    }

    /// Weighted correlation `sum w x t`.
    pub fn correlation(&self) -> DVector<f64> {
        &self.corr * self.scale()
    }

    /// Data-fit term plus `lambda * |w|_1`.
    pub fn objective(&self, w: &DVector<f64>, lambda: f64) -> f64 {
        let g = self.gram();
        let b = self.correlation();
        let fit = w.dot(&(&g * w)) - 2.0 * b.dot(w) + self.target_energy * self.scale();
        fit + lambda * w.abs().sum()
    }

    /// Smallest `lambda` for which the all-zero solution is optimal.
    pub fn lambda_max(&self) -> f64 {
        self.correlation()
            .iter()
            .fold(0.0, |m: f64, b| m.max((2.0 * b).abs()))
    }

    /// Largest violation of the subgradient optimality conditions at `w`.
    pub fn kkt_residual(&self, w: &DVector<f64>, lambda: f64) -> f64 {
        let grad = (self.gram() * w - self.correlation()) * 2.0;
        grad.iter()
            .zip(w.iter())
            .map(|(&g, &wi)| {
                if wi > 0.0 {
                    (g + lambda).abs()
                } else if wi < 0.0 {
                    (g - lambda).abs()
                } else {
                    (g.abs() - lambda).max(0.0)
                }
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_sweeps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureWeights {
    pub w: DVector<f64>,
    pub lambda: f64,
    pub converged: bool,
    pub sweeps: usize,
    /// Objective after every sweep.
    pub objective_trace: Vec<f64>,
}

impl FeatureWeights {
    pub fn support(&self) -> Vec<usize> {
        self.w
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Cyclic coordinate descent on the precomputed Gram matrix.
///
/// Converged once a sweep moves no coordinate by `tol` or more and the KKT
/// residual is below `tol`. The dictionary columns are strongly collinear,
/// so small coordinate steps alone do not mean the optimum is near.
pub fn coordinate_descent(
    problem: &LassoProblem,
    lambda: f64,
    settings: SolverSettings,
) -> Result<FeatureWeights> {
    if settings.tol <= 0.0 || lambda < 0.0 {
        return Err(Error::Config(format!(
            "invalid solver settings: tol={}, lambda={lambda}",
            settings.tol
        )));
    }
    let g = problem.gram();
    let b = problem.correlation();
    let n = problem.features();
    let mut w = DVector::zeros(n);
    let mut trace = Vec::new();
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < settings.max_sweeps {
        sweeps += 1;
        let mut max_delta: f64 = 0.0;
        for i in 0..n {
            let gii = g[(i, i)];
            if gii <= 0.0 {
                w[i] = 0.0;
                continue;
            }
            let rho = b[i] - (g.row(i) * &w)[0] + gii * w[i];
            let next = soft_threshold(rho, lambda / 2.0) / gii;
            max_delta = max_delta.max((next - w[i]).abs());
            w[i] = next;
        }
        trace.push(problem.objective(&w, lambda));
        if max_delta < settings.tol && problem.kkt_residual(&w, lambda) < settings.tol {
            converged = true;
            break;
        }
    }
    Ok(FeatureWeights {
        w,
        lambda,
        converged,
        sweeps,
        objective_trace: trace,
    })
}

/// Solve for every `lambda` in `lambdas`.
pub fn lambda_sweep(
    problem: &LassoProblem,
    lambdas: &[f64],
    settings: SolverSettings,
) -> Result<Vec<FeatureWeights>> {
    lambdas
        .iter()
        .map(|&l| coordinate_descent(problem, l, settings))
        .collect()
}

/// Write `feature_id,lambda,weight` rows.
pub fn write_weights_csv<W: Write>(
    out: W,
    features: &[FeatureId],
    results: &[FeatureWeights],
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["feature_id", "lambda", "weight"])?;
    for r in results {
        for (id, w) in features.iter().zip(r.w.iter()) {
            wtr.write_record([id.name().to_string(), r.lambda.to_string(), w.to_string()])?;
        }
    }
    wtr.flush()?;
    Ok(())
}
