// Frequency-averaged coherence between a source and noisy copies of it.

use mic_utility::msc::msc_track;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn run() -> mic_utility::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let len = 512 * 300 + 1024;
    let mut draw =
        |n: usize| -> Vec<f64> { (0..n).map(|_| StandardNormal.sample(&mut rng)).collect() };
    let source = draw(len);
    let snrs_db = [0.0, 10.0, 20.0];
    let mics: Vec<Vec<f64>> = snrs_db
        .iter()
        .map(|db| {
            let noise_std = 10f64.powf(-db / 20.0);
            source
                .iter()
                .zip(draw(len))
                .map(|(s, n)| s + noise_std * n)
                .collect()
        })
        .collect();

    let track = msc_track(&source, &mics, 1024, 512, 0.9)?;
    let tail = &track[track.len() - 100..];
    for (ch, db) in snrs_db.iter().enumerate() {
        let eta = 10f64.powf(db / 10.0);
        let mean = tail.iter().map(|g| g.0[ch]).sum::<f64>() / tail.len() as f64;
        println!(
            "snr {db:>4} dB  msc {mean:.4}  eta/(eta+1) {:.4}",
            eta / (eta + 1.0)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> mic_utility::Result<()> {
    run()
}
