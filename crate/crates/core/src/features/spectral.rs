use super::FeatureId;

const ROLLOFF_FRACTION: f64 = 0.85;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Geometric over arithmetic mean; 1 for an all-zero input.
pub fn flatness(v: &[f64]) -> f64 {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    if mean <= 0.0 {
        return 1.0;
    }
    let log_mean = v
        .iter()
        .map(|&x| x.max(f64::MIN_POSITIVE).ln())
        .sum::<f64>()
        / v.len() as f64;
    (log_mean.exp() / mean).clamp(0.0, 1.0)
}

/// Magnitude-spectrum descriptors of `mag` (bins `0..=len/2`), with flux-type
/// features taken against `prev` when available.
pub(super) fn fill(mag: &[f64], prev: Option<&[f64]>, out: &mut [f64; FeatureId::COUNT]) {
    let bins = mag.len();
    let half = (bins - 1) as f64;
    let sum: f64 = mag.iter().sum();
    let power: Vec<f64> = mag.iter().map(|a| a * a).collect();
    let total_power: f64 = power.iter().sum();

    // least-squares slope of a[k] against k
    let k_mean = half / 2.0;
    let a_mean = sum / bins as f64;
    let (num, den) = mag
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(num, den), (k, &a)| {
            let dk = k as f64 - k_mean;
            (num + dk * (a - a_mean), den + dk * dk)
        });
    out[FeatureId::SdSlope.index()] = num / den;

    out[FeatureId::SdFlatness.index()] = flatness(&power);
    out[FeatureId::SdAmpflatness.index()] = flatness(mag);

    out[FeatureId::SdRolloff.index()] = if total_power > 0.0 {
        let target = ROLLOFF_FRACTION * total_power;
        let mut acc = 0.0;
        let k = power
            .iter()
            .position(|&p| {
                acc += p;
                acc >= target
            })
            .unwrap_or(bins - 1);
        k as f64 / half
    } else {
        0.0
    };

    let (centroid, spread, skewness, kurtosis) = if sum > 0.0 {
        let p = |k: usize| mag[k] / sum;
        let mean: f64 = (0..bins).map(|k| k as f64 * p(k)).sum();
        let central = |e: i32| -> f64 { (0..bins).map(|k| (k as f64 - mean).powi(e) * p(k)).sum() };
        let var = central(2);
        let sd = var.sqrt();
        if sd > 1e-12 {
            (
                mean / half,
                sd / half,
                central(3) / (sd * var),
                central(4) / (var * var),
            )
        } else {
            (mean / half, 0.0, 0.0, 0.0)
        }
    } else {
        (0.0, 0.0, 0.0, 0.0)
    };
    out[FeatureId::SdCentroid.index()] = centroid;
    out[FeatureId::SdSpread.index()] = spread;
    out[FeatureId::SdSkewness.index()] = skewness;
    out[FeatureId::SdKurtosis.index()] = kurtosis;

    let (flux, fluxnorm, variation) = match prev {
        None => (0.0, 0.0, 0.0),
        Some(prev) => {
            let flux = mag
                .iter()
                .zip(prev)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let (na, nb) = (norm(mag), norm(prev));
            if na > 0.0 && nb > 0.0 {
                let mut diff = 0.0;
                let mut dot = 0.0;
                for (a, b) in mag.iter().zip(prev) {
                    let d = a / na - b / nb;
                    diff += d * d;
                    dot += a * b;
                }
                (flux, diff.sqrt(), 1.0 - dot / (na * nb))
            } else {
                (flux, 0.0, 0.0)
            }
        }
    };
    out[FeatureId::SdFlux.index()] = flux;
    out[FeatureId::SdFluxnorm.index()] = fluxnorm;
    out[FeatureId::SdVariation.index()] = variation;
}
