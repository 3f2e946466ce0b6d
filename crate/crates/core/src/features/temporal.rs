use super::FeatureId;

/// Time-domain descriptors. Moments are taken over the time-energy
/// distribution `q[n] = x[n]^2 / sum x^2`; location and spread are
/// normalized by `len - 1`.
pub(super) fn fill(x: &[f64], out: &mut [f64; FeatureId::COUNT]) {
    let len = x.len();
    let energy: f64 = x.iter().map(|v| v * v).sum();
    let span = (len - 1) as f64;

    out[FeatureId::TdEnvelope.index()] = (energy / len as f64).sqrt();

    let crossings = x.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    out[FeatureId::TdZcr.index()] = crossings as f64 / span;

    let (centroid, spread, skewness, kurtosis) = if energy > 0.0 {
        let q = |n: usize| x[n] * x[n] / energy;
        let mean: f64 = (0..len).map(|n| n as f64 * q(n)).sum();
        let central = |k: i32| -> f64 { (0..len).map(|n| (n as f64 - mean).powi(k) * q(n)).sum() };
        let var = central(2);
        let sd = var.sqrt();
        if sd > 1e-12 {
            (
                mean / span,
                sd / span,
                central(3) / (sd * var),
                central(4) / (var * var),
            )
        } else {
            (mean / span, 0.0, 0.0, 0.0)
        }
    } else {
        (0.0, 0.0, 0.0, 0.0)
    };
    out[FeatureId::TdCentroid.index()] = centroid;
    out[FeatureId::TdSpread.index()] = spread;
    out[FeatureId::TdSkewness.index()] = skewness;
    out[FeatureId::TdKurtosis.index()] = kurtosis;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(x: &[f64]) -> [f64; FeatureId::COUNT] {
        let mut out = [0.0; FeatureId::COUNT];
        fill(x, &mut out);
        out
    }

    #[test]
    fn zcr_extremes() {
        assert_eq!(run(&[1.0; 64])[FeatureId::TdZcr.index()], 0.0);
        let alt: Vec<f64> = (0..64)
            .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        assert_eq!(run(&alt)[FeatureId::TdZcr.index()], 1.0);
    }

    #[test]
    fn point_mass_moments() {
        let mut x = vec![0.0; 64];
        x[20] = 0.7;
        let f = run(&x);
        assert!((f[FeatureId::TdCentroid.index()] - 20.0 / 63.0).abs() < 1e-12);
        assert_eq!(f[FeatureId::TdSpread.index()], 0.0);
    }

    #[test]
    fn two_point_mass_moments() {
        // equal energy at n = 10 and n = 30: mean 20, sd 10, symmetric, kurtosis 1
        let mut x = vec![0.0; 41];
        x[10] = 1.0;
        x[30] = -1.0;
        let f = run(&x);
        assert!((f[FeatureId::TdCentroid.index()] - 0.5).abs() < 1e-12);
        assert!((f[FeatureId::TdSpread.index()] - 0.25).abs() < 1e-12);
        assert!(f[FeatureId::TdSkewness.index()].abs() < 1e-12);
        assert!((f[FeatureId::TdKurtosis.index()] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn silence_gives_zeros() {
        let f = run(&[0.0; 32]);
        assert!(f.iter().all(|v| *v == 0.0));
    }
}
