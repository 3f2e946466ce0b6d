//! Time-varying convolution of a moving source into a microphone array.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::rir::{rir_image_source, MicSpec, RirSettings};
use super::room::{distance, Point, RoomSpec};
use super::signals::{test_signal_with, SignalKind};
use super::trajectory::{synth_trajectory_with, Trajectory, REST_JITTER};
use crate::error::{Error, Result};

/// Minimum clearance of microphones from walls and from the source path.
pub const MIC_MARGIN: f64 = 0.5;
pub const HOP: usize = 512;

// Independent RNG streams drawn from one scene seed.
const STREAM_TRAJECTORY: u64 = 1;
const STREAM_MICS: u64 = 2;
const STREAM_SIGNAL: u64 = 3;
const STREAM_NOISE: u64 = 4;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub room: RoomSpec,
    pub mics: Vec<MicSpec>,
    pub trajectory: Trajectory,
    pub source_signal: Vec<f64>,
    pub snr_db: f64,
    pub rng_seed: u64,
    pub sample_rate: f64,
    /// Wall reflection coefficient; `None` calibrates it to the room's T60.
    pub reflection: Option<f64>,
}

/// Parameters for [`Scene::generate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SceneRecipe {
    pub room: RoomSpec,
    pub mic_count: usize,
    pub signal: SignalKind,
    pub duration: f64,
    pub snr_db: f64,
    pub move_windows: Vec<(f64, f64)>,
    pub rest_jitter: f64,
    pub sample_rate: f64,
}

impl SceneRecipe {
    pub fn new(room: RoomSpec) -> Self {
        Self {
            room,
            mic_count: 10,
            signal: SignalKind::Speechlike,
            duration: 20.0,
            snr_db: 10.0,
            move_windows: vec![(8.0, 10.0), (18.0, 20.0)],
            rest_jitter: REST_JITTER,
            sample_rate: 16_000.0,
        }
    }
}

/// Random microphone placement keeping clear of the walls and of the trajectory.
pub fn place_mics(
    room: &RoomSpec,
    count: usize,
    trajectory: &Trajectory,
    duration: f64,
    rng: &mut impl Rng,
) -> Result<Vec<MicSpec>> {
    let path: Vec<Point> = (0..=(duration * 10.0).ceil() as usize)
        .map(|k| trajectory.position_at(k as f64 / 10.0))
        .chain(trajectory.waypoints.iter().map(|w| w.1))
        .collect();
    let mut mics = Vec::with_capacity(count);
    let mut attempts = 0;
    while mics.len() < count {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::Config(format!(
                "could not place {count} microphones clear of the source path"
            )));
        }
        let pos = [0, 1, 2].map(|k| rng.random_range(MIC_MARGIN..room.dims[k] - MIC_MARGIN));
        let azimuth = rng.random_range(0.0..2.0 * PI);
        if path.iter().all(|p| distance(p, &pos) >= MIC_MARGIN) {
            mics.push(MicSpec::new(pos, azimuth));
        }
    }
    Ok(mics)
}

impl Scene {
    pub fn generate(recipe: &SceneRecipe, seed: u64) -> Result<Self> {
        recipe.room.validate()?;
        if recipe.mic_count < 2 {
            return Err(Error::Config(
                "a scene needs at least two microphones".into(),
            ));
        }
        if recipe.duration.is_nan() || recipe.duration <= 0.0 {
            return Err(Error::Config("duration must be positive".into()));
        }
        let trajectory = synth_trajectory_with(
            &recipe.room,
            &mut stream(seed, STREAM_TRAJECTORY),
            recipe.duration,
            &recipe.move_windows,
            recipe.rest_jitter,
        );
        let mics = place_mics(
            &recipe.room,
            recipe.mic_count,
            &trajectory,
            recipe.duration,
            &mut stream(seed, STREAM_MICS),
        )?;
        let source_signal = test_signal_with(
            recipe.signal,
            recipe.duration,
            recipe.sample_rate,
            &mut stream(seed, STREAM_SIGNAL),
        );
        Ok(Self {
            room: recipe.room.clone(),
            mics,
            trajectory,
            source_signal,
            snr_db: recipe.snr_db,
            rng_seed: seed,
            sample_rate: recipe.sample_rate,
            reflection: None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub mics: Vec<Vec<f64>>,
    pub dry: Vec<f64>,
    /// Channel whose source image is strongest; the SNR is set there.
    pub reference_channel: usize,
    pub noise_std: f64,
}

/// Noise-free source images, one per microphone.
///
/// The source is processed in hops of [`HOP`] samples. Each hop is convolved
/// with the RIRs at the source position at the hop start and overlap-added.
/// RIRs are only recomputed when the position changes.
pub fn render_images(scene: &Scene) -> Result<Vec<Vec<f64>>> {
    let settings = match scene.reflection {
        Some(reflection) => RirSettings {
            reflection,
            ..RirSettings::eyring(&scene.room, scene.sample_rate)?
        },
        None => RirSettings::for_room(&scene.room, scene.sample_rate)?,
    };
    scene.trajectory.validate(&scene.room)?;
    let n = scene.source_signal.len();
    let taps = settings.length.max(1);
    let nfft = (HOP + taps - 1).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd: Arc<dyn Fft<f64>> = planner.plan_fft_forward(nfft);
    let inv: Arc<dyn Fft<f64>> = planner.plan_fft_inverse(nfft);
    let scale = 1.0 / nfft as f64;

    let mut out = vec![vec![0.0; n]; scene.mics.len()];
    let mut spectra: Vec<Vec<Complex64>> = Vec::new();
    let mut cached: Option<Point> = None;
    let mut xbuf = vec![Complex64::default(); nfft];
    let mut ybuf = vec![Complex64::default(); nfft];

    for start in (0..n).step_by(HOP) {
        let pos = scene
            .trajectory
            .position_at(start as f64 / scene.sample_rate);
        if cached != Some(pos) {
            spectra = scene
                .mics
                .iter()
                .map(|mic| {
                    let h = rir_image_source(&scene.room, &pos, mic, &settings)?;
                    let mut buf: Vec<Complex64> =
                        h.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                    buf.resize(nfft, Complex64::default());
                    fwd.process(&mut buf);
                    Ok(buf)
                })
                .collect::<Result<_>>()?;
            cached = Some(pos);
        }
        let end = (start + HOP).min(n);
        xbuf.iter_mut().for_each(|c| *c = Complex64::default());
        for (c, &v) in xbuf.iter_mut().zip(&scene.source_signal[start..end]) {
            c.re = v;
        }
        fwd.process(&mut xbuf);
        for (spec, y) in spectra.iter().zip(out.iter_mut()) {
            for ((o, x), h) in ybuf.iter_mut().zip(&xbuf).zip(spec) {
                *o = x * h;
            }
            inv.process(&mut ybuf);
            let stop = (start + nfft).min(n);
            for (dst, src) in y[start..stop].iter_mut().zip(&ybuf) {
                *dst += src.re * scale;
            }
        }
    }
    Ok(out)
}

pub fn power(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len().max(1) as f64
}

/// Add equal-level white Gaussian noise so that the strongest channel sits at `snr_db`.
/// Returns the reference channel and the noise standard deviation.
pub fn add_noise(images: &mut [Vec<f64>], snr_db: f64, rng: &mut impl Rng) -> Result<(usize, f64)> {
    let (reference, peak) =
        images
            .iter()
            .map(|x| power(x))
            .enumerate()
            .fold(
                (0, 0.0),
                |best, (i, p)| if p > best.1 { (i, p) } else { best },
            );
    if peak <= 0.0 || peak.is_nan() {
        return Err(Error::SilentSource);
    }
    let std = (peak / 10f64.powf(snr_db / 10.0)).sqrt();
    for ch in images.iter_mut() {
        for v in ch.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v += std * z;
        }
    }
    Ok((reference, std))
}

pub fn render_scene(scene: &Scene) -> Result<Rendered> {
    if power(&scene.source_signal) == 0.0 {
        return Err(Error::SilentSource);
    }
    let mut mics = render_images(scene)?;
    let (reference_channel, noise_std) = add_noise(
        &mut mics,
        scene.snr_db,
        &mut stream(scene.rng_seed, STREAM_NOISE),
    )?;
    Ok(Rendered {
        mics,
        dry: scene.source_signal.clone(),
        reference_channel,
        noise_std,
    })
}
