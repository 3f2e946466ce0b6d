// Kalman-tracked cross-channel correlation of a single feature.

use mic_utility::features::FeatureFrame;
use mic_utility::tracker::{FeatureTracker, KfConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn run() -> mic_utility::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut tracker = FeatureTracker::new(3, 1, KfConfig::default())?;
    for _ in 0..1000 {
        let common: f64 = StandardNormal.sample(&mut rng);
        let other: f64 = StandardNormal.sample(&mut rng);
        let values = [common, -common, other];
        let frames: Vec<FeatureFrame> = values
            .iter()
            .map(|&v| FeatureFrame {
                values: vec![v],
                energy: 1.0,
                entropy_neg: 0.0,
            })
            .collect();
        tracker.update(&frames)?;
    }
    let pcc = tracker.pcc_matrices();
    println!("channel 0 copies the common signal, 1 negates it, 2 is independent");
    for p in 0..3 {
        let row: Vec<String> = (0..3)
            .map(|q| format!("{:>7.3}", pcc.get(p, q, 0)))
            .collect();
        println!("{}", row.join(" "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> mic_utility::Result<()> {
    run()
}
