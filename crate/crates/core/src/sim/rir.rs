//! Image-source room impulse responses for cardioid microphones.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::room::{distance, Point, RoomSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicSpec {
    pub position: Point,
    /// Horizontal look direction, unit length.
    pub orientation: [f64; 2],
}

impl MicSpec {
    pub fn new(position: Point, azimuth: f64) -> Self {
        Self {
            position,
            orientation: [azimuth.cos(), azimuth.sin()],
        }
    }

    pub fn look(&self) -> Point {
        [self.orientation[0], self.orientation[1], 0.0]
    }
}

/// Cardioid gain `0.5 (1 + cos theta)` for sound arriving from `from`.
pub fn cardioid_gain(mic: &MicSpec, from: &Point) -> f64 {
    let d = distance(&mic.position, from);
    if d == 0.0 {
        return 1.0;
    }
    let look = mic.look();
    let cos = (0..3)
        .map(|k| look[k] * (from[k] - mic.position[k]))
        .sum::<f64>()
        / d;
    0.5 * (1.0 + cos.clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RirSettings {
    pub sample_rate: f64,
    /// Uniform wall reflection coefficient.
    pub reflection: f64,
    /// Taps; images whose delay falls beyond are dropped.
    pub length: usize,
    /// Cap on the total number of wall reflections per image.
    pub max_order: Option<u32>,
}

impl RirSettings {
    /// Eyring reflectivity and a length covering `t60`.
    pub fn eyring(room: &RoomSpec, sample_rate: f64) -> Result<Self> {
        Ok(Self {
            sample_rate,
            reflection: room.reflection_from_t60()?,
            length: (room.t60 * sample_rate).ceil() as usize,
            max_order: None,
        })
    }

    /// Like [`RirSettings::eyring`] with the reflectivity from [`calibrated_reflection`].
    pub fn for_room(room: &RoomSpec, sample_rate: f64) -> Result<Self> {
        Ok(Self {
            reflection: calibrated_reflection(room, sample_rate)?,
            ..Self::eyring(room, sample_rate)?
        })
    }
}

/// Fixed source/microphone pairs, as fractions of the room extent.
const REFERENCE_PAIRS: [([f64; 3], [f64; 3]); 2] = [
    ([0.3, 0.35, 0.45], [0.7, 0.6, 0.55]),
    ([0.65, 0.3, 0.5], [0.25, 0.7, 0.4]),
];

/// Mean Schroeder T60 over the reference pairs, 0 if the decay is too fast to fit.
fn reference_t60(room: &RoomSpec, settings: &RirSettings) -> Result<f64> {
    let mut sum = 0.0;
    for (s, m) in REFERENCE_PAIRS {
        let src = [0, 1, 2].map(|k| s[k] * room.dims[k]);
        let pos = [0, 1, 2].map(|k| m[k] * room.dims[k]);
        let azimuth = (src[1] - pos[1]).atan2(src[0] - pos[0]);
        let h = rir_image_source(room, &src, &MicSpec::new(pos, azimuth), settings)?;
        sum += schroeder_t60(&h, settings.sample_rate).unwrap_or(0.0);
    }
    Ok(sum / REFERENCE_PAIRS.len() as f64)
}

/// Reflection coefficient whose image-source responses decay at `room.t60`.
///
/// With uniform walls a shoebox decays more slowly than the diffuse-field
/// (Eyring) prediction, since paths bouncing between one pair of walls
/// dominate the tail. The Eyring value serves as the upper bracket of a
/// bisection on the Schroeder T60 of reference responses.
pub fn calibrated_reflection(room: &RoomSpec, sample_rate: f64) -> Result<f64> {
    let mut settings = RirSettings::eyring(room, sample_rate)?;
    let (mut lo, mut hi) = (0.0, settings.reflection);
    settings.reflection = hi;
    if reference_t60(room, &settings)? <= room.t60 {
        return Ok(hi);
    }
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        settings.reflection = mid;
        let t = reference_t60(room, &settings)?;
        if (t - room.t60).abs() <= 0.005 * room.t60 {
            return Ok(mid);
        }
        if t > room.t60 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Relative image offsets along one axis, with their reflection counts.
fn axis_images(len: f64, src: f64, mic: f64, reach: f64) -> Vec<(f64, u32)> {
    let m_max = (reach / (2.0 * len)).ceil() as i64 + 1;
    let mut out = Vec::new();
    for m in -m_max..=m_max {
        for q in 0..2i64 {
            let pos = (1 - 2 * q) as f64 * src + 2.0 * m as f64 * len;
            let off = pos - mic;
            if off.abs() <= reach {
                out.push((off, (2 * m - q).unsigned_abs() as u32));
            }
        }
    }
    out
}

pub fn rir_image_source(
    room: &RoomSpec,
    src: &Point,
    mic: &MicSpec,
    settings: &RirSettings,
) -> Result<Vec<f64>> {
    room.validate()?;
    if !room.contains(src, 0.0) || !room.contains(&mic.position, 0.0) {
        return Err(Error::Config(format!(
            "source {src:?} and microphone {:?} must lie inside the room",
            mic.position
        )));
    }
    if distance(src, &mic.position) < 1e-9 {
        return Err(Error::ZeroDistance);
    }
    let beta = settings.reflection;
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::Config(format!(
            "reflection coefficient {beta} outside [0, 1)"
        )));
    }
    let fs = settings.sample_rate;
    let c = room.speed_of_sound;
    let mut h = vec![0.0; settings.length];
    let reach = settings.length as f64 / fs * c;
    let reach2 = reach * reach;
    let xs = axis_images(room.dims[0], src[0], mic.position[0], reach);
    let ys = axis_images(room.dims[1], src[1], mic.position[1], reach);
    let zs = axis_images(room.dims[2], src[2], mic.position[2], reach);
    let max_order = settings.max_order.unwrap_or(u32::MAX);
    let highest = xs.iter().map(|v| v.1).max().unwrap_or(0)
        + ys.iter().map(|v| v.1).max().unwrap_or(0)
        + zs.iter().map(|v| v.1).max().unwrap_or(0);
    let powers: Vec<f64> = (0..=highest).map(|k| beta.powi(k as i32)).collect();
    let look = mic.look();
    let taps_per_meter = fs / c;
    let scale = 0.5 / (4.0 * PI);
    for &(dx, cx) in &xs {
        let dx2 = dx * dx;
        for &(dy, cy) in &ys {
            let dxy2 = dx2 + dy * dy;
            if dxy2 > reach2 {
                continue;
            }
            let along = look[0] * dx + look[1] * dy;
            for &(dz, cz) in &zs {
                let order = cx + cy + cz;
                if order > max_order {
                    continue;
                }
                let amp = powers[order as usize];
                if amp == 0.0 {
                    continue;
                }
                let d2 = dxy2 + dz * dz;
                if d2 > reach2 {
                    continue;
                }
                let d = d2.sqrt();
                // d > 0, so truncating d * k + 0.5 rounds to nearest
                let tap = (d * taps_per_meter + 0.5) as usize;
                if tap >= h.len() {
                    continue;
                }
                // cardioid 0.5 (1 + cos) with cos = along / d, over 4 pi d
                h[tap] += amp * scale * (d + along) / d2;
            }
        }
    }
    Ok(h)
}

/// Backward-integrated energy decay in dB, normalized to 0 dB at the start.
pub fn schroeder_curve(h: &[f64]) -> Vec<f64> {
    let mut edc = vec![0.0; h.len()];
    let mut acc = 0.0;
    for (e, v) in edc.iter_mut().zip(h).rev() {
        acc += v * v;
        *e = acc;
    }
    let total = acc;
    edc.iter()
        .map(|&e| {
            if e > 0.0 {
                10.0 * (e / total).log10()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect()
}

/// T60 extrapolated from a least-squares line over the -5 to -25 dB span of
/// the Schroeder curve. `None` when the curve never reaches -25 dB.
pub fn schroeder_t60(h: &[f64], sample_rate: f64) -> Option<f64> {
    let edc = schroeder_curve(h);
    let start = edc.iter().position(|&v| v <= -5.0)?;
    let stop = edc.iter().position(|&v| v <= -25.0)?;
    if stop <= start + 1 {
        return None;
    }
    let pts: Vec<(f64, f64)> = (start..=stop)
        .map(|k| (k as f64 / sample_rate, edc[k]))
        .collect();
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let me = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - me)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    let slope = sxy / sxx;
    (slope < 0.0).then(|| -60.0 / slope)
}
