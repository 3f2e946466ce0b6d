// Compute all 18 single-channel descriptors for a tone and a noise block.

use mic_utility::features::{FeatureExtractor, FeatureId};
use mic_utility::sim::{test_signal, SignalKind};

pub fn run() -> mic_utility::Result<()> {
    let fs = 16_000.0;
    let extractor = FeatureExtractor::new(1024)?;
    let tone = test_signal(SignalKind::Tone { frequency: 440.0 }, 0.2, fs, 0);
    let noise = test_signal(SignalKind::White, 0.2, fs, 1);

    let (first, mag) = extractor.all_features(&noise[..1024], None, 0.0)?;
    let (second, _) = extractor.all_features(&noise[512..1536], Some(&mag), 0.0)?;
    let (pure, _) = extractor.all_features(&tone[..1024], None, 0.0)?;

    println!(
        "{:<16} {:>12} {:>12} {:>12}",
        "feature", "noise[0]", "noise[1]", "tone"
    );
    for id in FeatureId::ALL {
        let k = id.index();
        println!(
            "{:<16} {:>12.5} {:>12.5} {:>12.5}",
            id.name(),
            first[k],
            second[k],
            pure[k]
        );
    }
    println!(
        "tone centroid {:.4} (expected ~{:.4})",
        pure[FeatureId::SdCentroid.index()],
        440.0 / (fs / 2.0)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> mic_utility::Result<()> {
    run()
}
