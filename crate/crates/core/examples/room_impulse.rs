// Image-source impulse responses and their fitted reverberation times.

use mic_utility::sim::{rir_image_source, schroeder_t60, MicSpec, RirSettings, RoomSpec};

pub fn run() -> mic_utility::Result<()> {
    let fs = 16_000.0;
    for room in RoomSpec::presets() {
        let settings = RirSettings::for_room(&room, fs)?;
        let [x, y, z] = room.dims;
        let src = [0.3 * x, 0.4 * y, 0.5 * z];
        let mic = MicSpec::new([0.7 * x, 0.6 * y, 0.4 * z], std::f64::consts::PI);
        let h = rir_image_source(&room, &src, &mic, &settings)?;
        let fitted = schroeder_t60(&h, fs).unwrap_or(f64::NAN);
        println!(
            "room {}  target {:.2} s  eyring beta {:.4}  calibrated beta {:.4}  fitted {:.3} s",
            room.name,
            room.t60,
            room.reflection_from_t60()?,
            settings.reflection,
            fitted
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> mic_utility::Result<()> {
    run()
}
