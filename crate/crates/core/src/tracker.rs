//! Per-feature cross-channel covariance tracking.
//!
//! Every feature owns a Kalman filter whose state is the half-vectorized
//! `N x N` covariance of the mean-removed feature sequences. The process and
//! observation noise covariances are diagonal, so each of the
//! `N (N + 1) / 2` coordinates evolves as an independent scalar filter.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureFrame;

/// Diagonal entries at or below this are treated as zero variance.
const VARIANCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KfConfig {
    /// Recursive averaging factor of the feature mean.
    pub alpha: f64,
    /// Process noise scale.
    pub sigma_q: f64,
    /// Observation noise scale.
    pub sigma_r: f64,
    /// Added to the energy geometric mean.
    pub epsilon: f64,
}

impl Default for KfConfig {
    fn default() -> Self {
        Self {
            alpha: 0.99,
            sigma_q: 1e-4,
            sigma_r: 0.2,
            epsilon: 1e-6,
        }
    }
}

impl KfConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!(
                "alpha must be in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.sigma_q < 0.0 || self.sigma_r <= 0.0 || self.epsilon <= 0.0 {
            return Err(Error::Config(format!(
                "noise scales must be positive: sigma_q={}, sigma_r={}, epsilon={}",
                self.sigma_q, self.sigma_r, self.epsilon
            )));
        }
        Ok(())
    }
}

/// Length of the half-vectorization of an `n x n` symmetric matrix.
pub fn vech_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Position of entry `(p, q)` (either order) in the column-major half-vector.
pub fn vech_index(n: usize, p: usize, q: usize) -> usize {
    let (row, col) = if p >= q { (p, q) } else { (q, p) };
    // columns 0..col hold n, n-1, ... entries
    col * n - col * col.saturating_sub(1) / 2 + (row - col)
}

/// Stack the diagonal and lower triangle column by column.
pub fn vech(matrix: &[Vec<f64>]) -> Vec<f64> {
    let n = matrix.len();
    let mut out = Vec::with_capacity(vech_len(n));
    for q in 0..n {
        for row in matrix.iter().skip(q) {
            out.push(row[q]);
        }
    }
    out
}

/// Rebuild the symmetric matrix from its half-vector.
pub fn unvech(v: &[f64], n: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    let mut j = 0;
    for q in 0..n {
        for p in q..n {
            m[p][q] = v[j];
            m[q][p] = v[j];
            j += 1;
        }
    }
    m
}

/// Kalman filter of one feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFilter {
    channels: usize,
    pairs: Vec<(usize, usize)>,
    feature_mean: Vec<f64>,
    mean: Vec<f64>,
    prior_var: Vec<f64>,
}

impl FeatureFilter {
    pub fn new(channels: usize) -> Self {
        let mut pairs = Vec::with_capacity(vech_len(channels));
        for q in 0..channels {
            for p in q..channels {
                pairs.push((p, q));
            }
        }
        let len = pairs.len();
        Self {
            channels,
            pairs,
            feature_mean: vec![0.0; channels],
            mean: vec![0.0; len],
            prior_var: vec![1.0; len],
        }
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn prior_var(&self) -> &[f64] {
        &self.prior_var
    }

    pub fn feature_mean(&self) -> &[f64] {
        &self.feature_mean
    }

    /// Update the recursive feature mean with the incoming values and return
    /// the values centred on the updated mean.
    pub fn update_feature_mean(&mut self, values: &[f64], alpha: f64) -> Vec<f64> {
        self.feature_mean
            .iter_mut()
            .zip(values)
            .map(|(m, &f)| {
                *m = alpha * *m + (1.0 - alpha) * f;
                f - *m
            })
            .collect()
    }

    /// One Kalman step on every half-vector coordinate.
    pub fn kf_update(&mut self, centered: &[f64], energies: &[f64], cfg: &KfConfig) {
        for (j, &(p, q)) in self.pairs.iter().enumerate() {
            let y = centered[p] * centered[q];
            let r = cfg.sigma_r / ((energies[p] * energies[q]).sqrt() + cfg.epsilon);
            let pred = self.prior_var[j] + cfg.sigma_q;
            let k = pred / (pred + r);
            self.mean[j] += k * (y - self.mean[j]);
            self.prior_var[j] = pred * (1.0 - k);
        }
    }

    /// Tracked covariance matrix.
    pub fn covariance(&self) -> Vec<Vec<f64>> {
        unvech(&self.mean, self.channels)
    }
}

/// PCC values `r[p][q][i]` for all channel pairs and features.
#[derive(Debug, Clone, PartialEq)]
pub struct PccTensor {
    channels: usize,
    features: usize,
    data: Vec<f64>,
}

impl PccTensor {
    pub fn zeros(channels: usize, features: usize) -> Self {
        Self {
            channels,
            features,
            data: vec![0.0; channels * channels * features],
        }
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn features(&self) -> usize {
        self.features
    }

    pub fn get(&self, p: usize, q: usize, i: usize) -> f64 {
        self.data[(p * self.channels + q) * self.features + i]
    }

    pub fn set(&mut self, p: usize, q: usize, i: usize, value: f64) {
        self.data[(p * self.channels + q) * self.features + i] = value;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Normalize a covariance matrix into correlation coefficients.
pub fn covariance_to_pcc(cov: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = cov.len();
    let mut r = vec![vec![0.0; n]; n];
    for p in 0..n {
        for q in 0..n {
            let (cpp, cqq) = (cov[p][p], cov[q][q]);
            r[p][q] = if cpp > VARIANCE_FLOOR && cqq > VARIANCE_FLOOR {
                if p == q {
                    1.0
                } else {
                    (cov[p][q] / (cpp * cqq).sqrt()).clamp(-1.0, 1.0)
                }
            } else {
                0.0
            };
        }
    }
    r
}

/// Bank of per-feature filters for one scene.
#[derive(Debug, Clone)]
pub struct FeatureTracker {
    cfg: KfConfig,
    filters: Vec<FeatureFilter>,
    rejected: usize,
    updates: usize,
}

impl FeatureTracker {
    pub fn new(channels: usize, features: usize, cfg: KfConfig) -> Result<Self> {
        cfg.validate()?;
        if channels == 0 || features == 0 {
            return Err(Error::Config(
                "tracker needs at least one channel and feature".into(),
            ));
        }
        Ok(Self {
            cfg,
            filters: (0..features)
                .map(|_| FeatureFilter::new(channels))
                .collect(),
            rejected: 0,
            updates: 0,
        })
    }

    pub fn channels(&self) -> usize {
        self.filters[0].channels
    }

    pub fn features(&self) -> usize {
        self.filters.len()
    }

    pub fn filter(&self, feature: usize) -> &FeatureFilter {
        &self.filters[feature]
    }

    /// Frames dropped because of non-finite input.
    pub fn rejected_frames(&self) -> usize {
        self.rejected
    }

    pub fn updates(&self) -> usize {
        self.updates
    }

    /// Feed one frame (one [`FeatureFrame`] per channel). Returns `false` and
    /// leaves the state untouched if any value or energy is non-finite.
    pub fn update(&mut self, frames: &[FeatureFrame]) -> Result<bool> {
        let n = self.channels();
        if frames.len() != n {
            return Err(Error::Dimension {
                what: "channels in frame",
                expected: n,
                actual: frames.len(),
            });
        }
        if let Some(f) = frames.iter().find(|f| f.values.len() != self.features()) {
            return Err(Error::Dimension {
                what: "features per channel",
                expected: self.features(),
                actual: f.values.len(),
            });
        }
        let finite = frames.iter().all(|f| {
            f.energy.is_finite() && f.energy >= 0.0 && f.values.iter().all(|v| v.is_finite())
        });
        if !finite {
            self.rejected += 1;
            return Ok(false);
        }
        let energies: Vec<f64> = frames.iter().map(|f| f.energy).collect();
        let mut values = vec![0.0; n];
        for (i, filter) in self.filters.iter_mut().enumerate() {
            for (v, f) in values.iter_mut().zip(frames) {
                *v = f.values[i];
            }
            let centered = filter.update_feature_mean(&values, self.cfg.alpha);
            filter.kf_update(&centered, &energies, &self.cfg);
        }
        self.updates += 1;
        Ok(true)
    }

    pub fn pcc_matrices(&self) -> PccTensor {
        let n = self.channels();
        let mut t = PccTensor::zeros(n, self.features());
        for (i, filter) in self.filters.iter().enumerate() {
            let r = covariance_to_pcc(&filter.covariance());
            for (p, row) in r.iter().enumerate() {
                for (q, &v) in row.iter().enumerate() {
                    t.set(p, q, i, v);
                }
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn vech_layout_and_dimension() {
        let m = vec![
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 5.0],
            vec![3.0, 5.0, 6.0],
        ];
        assert_eq!(vech(&m), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(vech_len(10), 55);
        for p in 0..3 {
            for q in 0..3 {
                assert_eq!(vech(&m)[vech_index(3, p, q)], m[p][q]);
            }
        }
    }

    proptest! {
        #[test]
        fn vech_round_trips(n in 1usize..8, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut m = vec![vec![0.0; n]; n];
            for p in 0..n {
                for q in 0..=p {
                    let v: f64 = rng.random_range(-5.0..5.0);
                    m[p][q] = v;
                    m[q][p] = v;
                }
            }
            prop_assert_eq!(unvech(&vech(&m), n), m);
        }

        #[test]
        fn prior_variance_stays_positive(
            p0 in 1e-6f64..10.0, q in 0.0f64..1.0, r in 1e-3f64..10.0, e in 0.0f64..1e3
        ) {
            let cfg = KfConfig { alpha: 0.5, sigma_q: q, sigma_r: r, epsilon: 1e-6 };
            let mut f = FeatureFilter::new(2);
            f.prior_var = vec![p0; 3];
            f.kf_update(&[0.3, -0.2], &[e, e], &cfg);
            prop_assert!(f.prior_var().iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn alpha_zero_tracks_input() {
        let mut f = FeatureFilter::new(3);
        for k in 0..5 {
            let c = f.update_feature_mean(&[k as f64, 2.0, -1.0], 0.0);
            assert_eq!(c, vec![0.0; 3]);
        }
    }

    #[test]
    fn alpha_one_keeps_zero_mean() {
        let mut f = FeatureFilter::new(2);
        let c = f.update_feature_mean(&[1.5, -2.0], 1.0);
        assert_eq!(c, vec![1.5, -2.0]);
        assert_eq!(f.feature_mean(), &[0.0, 0.0]);
    }

    #[test]
    fn recursive_mean_closed_form() {
        let mut f = FeatureFilter::new(1);
        let c = 3.0;
        for l in 1..=200 {
            f.update_feature_mean(&[c], 0.99);
            let expect = c - 0.99f64.powi(l) * c;
            assert!((f.feature_mean()[0] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn huge_energy_means_perfect_observation() {
        let cfg = KfConfig::default();
        let mut f = FeatureFilter::new(2);
        f.kf_update(&[2.0, 3.0], &[1e18, 1e18], &cfg);
        let expect = [4.0, 6.0, 9.0];
        for (m, e) in f.mean().iter().zip(expect) {
            assert!((m - e).abs() < 1e-9);
        }
    }

    #[test]
    fn silence_freezes_the_mean() {
        let cfg = KfConfig::default();
        let mut f = FeatureFilter::new(2);
        f.prior_var = vec![1e-3; 3];
        f.kf_update(&[2.0, 3.0], &[0.0, 0.0], &cfg);
        // gain ~ (P + q) eps / sigma_r
        assert!(f.mean().iter().all(|m| m.abs() < 1e-7));
    }

    #[test]
    fn non_finite_frame_is_rejected() {
        let mut t = FeatureTracker::new(2, 1, KfConfig::default()).unwrap();
        let good = FeatureFrame {
            values: vec![1.0],
            energy: 1.0,
            entropy_neg: 0.0,
        };
        t.update(&[good.clone(), good.clone()]).unwrap();
        let before = t.filter(0).clone();
        let bad = FeatureFrame {
            values: vec![f64::NAN],
            energy: 1.0,
            entropy_neg: 0.0,
        };
        assert!(!t.update(&[good, bad]).unwrap());
        assert_eq!(t.rejected_frames(), 1);
        assert_eq!(t.filter(0), &before);
    }

    #[test]
    fn pcc_diagonal_and_zero_variance() {
        let cov = vec![
            vec![4.0, 2.0, 0.0],
            vec![2.0, 9.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ];
        let r = covariance_to_pcc(&cov);
        assert_eq!(r[0][0], 1.0);
        assert_eq!(r[2][2], 0.0);
        assert!((r[0][1] - 2.0 / 6.0).abs() < 1e-15);
        assert_eq!(r[0][2], 0.0);
    }
}
