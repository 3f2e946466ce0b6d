// Encode feature frames, corrupt one in transit, and resynchronize.

use mic_utility::wire::{decode_stream, encode_frame, FeatureWireFrame};

pub fn run() -> mic_utility::Result<()> {
    let frames: Vec<FeatureWireFrame> = (0..5)
        .map(|l| {
            FeatureWireFrame::new(
                l % 2,
                l as u32,
                vec![0.1 * l as f32, -0.5, 2.0, 1e-3],
                4.0,
                -1.2,
            )
        })
        .collect();
    let mut bytes = Vec::new();
    let mut offsets = Vec::new();
    for f in &frames {
        offsets.push(bytes.len());
        bytes.extend(encode_frame(f).expect("counts match"));
    }
    println!("{} frames, {} bytes", frames.len(), bytes.len());

    bytes[offsets[2] + 14] ^= 0x10;
    let decoded = decode_stream(&bytes);
    let kept: Vec<u32> = decoded.frames.iter().map(|f| f.frame_index).collect();
    println!(
        "after one flipped bit: kept {kept:?}, skipped {}",
        decoded.skipped
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> mic_utility::Result<()> {
    run()
}
