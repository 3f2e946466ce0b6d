//! Source trajectories: rest at random positions, move linearly in between.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::room::{distance, Point, RoomSpec};
use crate::error::{Error, Result};

/// Inset of the region the source rests in.
pub const ROI_MARGIN: f64 = 1.0;
pub const REST_JITTER: f64 = 0.02;
pub const JITTER_INTERVAL: f64 = 0.5;
/// Minimum distance between consecutive resting positions.
const MIN_HOP_DISTANCE: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub waypoints: Vec<(f64, Point)>,
    /// Standard deviation of the per-axis offset applied while resting.
    pub rest_jitter: f64,
    pub move_windows: Vec<(f64, f64)>,
    pub jitter_interval: f64,
    /// Offset held during each jitter interval.
    pub jitter: Vec<Point>,
}

impl Trajectory {
    /// A source that never moves.
    pub fn fixed(position: Point) -> Self {
        Self {
            waypoints: vec![(0.0, position)],
            rest_jitter: 0.0,
            move_windows: Vec::new(),
            jitter_interval: JITTER_INTERVAL,
            jitter: Vec::new(),
        }
    }

    pub fn validate(&self, room: &RoomSpec) -> Result<()> {
        if self.waypoints.is_empty() {
            return Err(Error::Config("trajectory without waypoints".into()));
        }
        if self.waypoints.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Config(
                "waypoint times must increase strictly".into(),
            ));
        }
        if let Some((_, p)) = self.waypoints.iter().find(|(_, p)| !room.contains(p, 0.0)) {
            return Err(Error::Config(format!("waypoint {p:?} outside the room")));
        }
        Ok(())
    }

    pub fn moving(&self, t: f64) -> bool {
        self.move_windows.iter().any(|&(a, b)| t >= a && t < b)
    }

    fn base(&self, t: f64) -> Point {
        let w = &self.waypoints;
        if t <= w[0].0 {
            return w[0].1;
        }
        for pair in w.windows(2) {
            let ((t0, p0), (t1, p1)) = (pair[0], pair[1]);
            if t < t1 {
                let f = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
                return [0, 1, 2].map(|k| p0[k] + f * (p1[k] - p0[k]));
            }
        }
        w[w.len() - 1].1
    }

    pub fn position_at(&self, t: f64) -> Point {
        let base = self.base(t);
        if self.moving(t) || self.jitter.is_empty() {
            return base;
        }
        let k = ((t.max(0.0) / self.jitter_interval) as usize).min(self.jitter.len() - 1);
        [0, 1, 2].map(|i| base[i] + self.jitter[k][i])
    }
}

/// Fixed movement windows of the canonical 20 s protocol, scaled to `duration`.
pub fn canonical_windows(duration: f64) -> Vec<(f64, f64)> {
    let s = (duration / 20.0).min(1.0);
    vec![(8.0 * s, 10.0 * s), (18.0 * s, 20.0 * s)]
}

fn roi_point(room: &RoomSpec, rng: &mut impl Rng) -> Point {
    [0, 1, 2].map(|k| {
        let d = room.dims[k];
        let m = ROI_MARGIN.min(0.5 * d - 0.05);
        rng.random_range(m..d - m)
    })
}

pub fn synth_trajectory(room: &RoomSpec, seed: u64, duration: f64) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    synth_trajectory_with(
        room,
        &mut rng,
        duration,
        &canonical_windows(duration),
        REST_JITTER,
    )
}

/// Three resting positions; the source moves from one to the next during
/// each window in `windows` (cycling back if there are more than two).
pub fn synth_trajectory_with(
    room: &RoomSpec,
    rng: &mut impl Rng,
    duration: f64,
    windows: &[(f64, f64)],
    rest_jitter: f64,
) -> Trajectory {
    let mut rests = vec![roi_point(room, rng)];
    while rests.len() < 3 {
        let prev = rests[rests.len() - 1];
        let mut next = roi_point(room, rng);
        for _ in 0..100 {
            if distance(&prev, &next) >= MIN_HOP_DISTANCE {
                break;
            }
            next = roi_point(room, rng);
        }
        rests.push(next);
    }

    let mut waypoints = vec![(0.0, rests[0])];
    for (k, &(start, end)) in windows.iter().enumerate() {
        let from = rests[k % 3];
        let to = rests[(k + 1) % 3];
        if start > waypoints[waypoints.len() - 1].0 {
            waypoints.push((start, from));
        }
        if end > waypoints[waypoints.len() - 1].0 {
            waypoints.push((end, to));
        }
    }

    let intervals = (duration / JITTER_INTERVAL).ceil() as usize + 1;
    let normal = Normal::new(0.0, rest_jitter.max(0.0)).expect("finite jitter");
    let jitter = (0..intervals)
        .map(|_| [0, 1, 2].map(|_| normal.sample(rng)))
        .collect();

    Trajectory {
        waypoints,
        rest_jitter,
        move_windows: windows.to_vec(),
        jitter_interval: JITTER_INTERVAL,
        jitter,
    }
}
