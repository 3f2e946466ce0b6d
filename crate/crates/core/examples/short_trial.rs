// A short end-to-end trial: render, extract, estimate utilities, score against coherence.

use mic_utility::harness::trial::run_trial;
use mic_utility::harness::RunConfig;
use mic_utility::sim::RoomSpec;
use mic_utility::stats::median;

pub fn run() -> mic_utility::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.scene.mic_count = 8;
    cfg.scene.duration_s = 12.0;
    cfg.scene.move_windows = vec![(4.0, 5.0)];
    let result = run_trial(&cfg, &RoomSpec::room_c(), 0)?;

    for second in 0..12 {
        let rho: Vec<f64> = result
            .frame_times
            .iter()
            .zip(&result.rho)
            .filter(|(t, _)| t.floor() as usize == second)
            .filter_map(|(_, r)| *r)
            .collect();
        println!(
            "t {second}-{} s  median rho {:.3}",
            second + 1,
            median(&rho).unwrap_or(f64::NAN)
        );
    }
    let last = result.utility.last().expect("frames");
    println!(
        "final utilities {:?}",
        last.iter().map(|u| format!("{u:.3}")).collect::<Vec<_>>()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> mic_utility::Result<()> {
    run()
}
