//! Shoebox room geometry and wall reflectivity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 3];

fn default_speed() -> f64 {
    343.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomSpec {
    #[serde(default)]
    pub name: String,
    /// Extent along x, y, z in meters; the room spans `[0, dims]`.
    pub dims: Point,
    /// Reverberation time in seconds.
    pub t60: f64,
    #[serde(default = "default_speed")]
    pub speed_of_sound: f64,
}

impl RoomSpec {
    pub fn new(name: &str, dims: Point, t60: f64) -> Result<Self> {
        let room = Self {
            name: name.to_string(),
            dims,
            t60,
            speed_of_sound: default_speed(),
        };
        room.validate()?;
        Ok(room)
    }

    pub fn room_a() -> Self {
        Self::preset("A", [5.0, 5.2, 3.0], 0.5)
    }

    pub fn room_b() -> Self {
        Self::preset("B", [6.2, 5.0, 2.5], 0.7)
    }

    pub fn room_c() -> Self {
        Self::preset("C", [4.8, 4.2, 2.3], 0.35)
    }

    pub fn presets() -> [Self; 3] {
        [Self::room_a(), Self::room_b(), Self::room_c()]
    }

    fn preset(name: &str, dims: Point, t60: f64) -> Self {
        Self {
            name: name.to_string(),
            dims,
            t60,
            speed_of_sound: default_speed(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::Config(format!(
                "room dimensions must be positive, got {:?}",
                self.dims
            )));
        }
        if !(self.t60.is_finite() && self.t60 > 0.0) {
            return Err(Error::Config(format!(
                "t60 must be positive, got {}",
                self.t60
            )));
        }
        if !(self.speed_of_sound.is_finite() && self.speed_of_sound > 0.0) {
            return Err(Error::Config("speed of sound must be positive".into()));
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        self.dims.iter().product()
    }

    pub fn surface(&self) -> f64 {
        let [x, y, z] = self.dims;
        2.0 * (x * y + x * z + y * z)
    }

    /// Strictly inside, at least `margin` away from every wall.
    pub fn contains(&self, p: &Point, margin: f64) -> bool {
        p.iter()
            .zip(&self.dims)
            .all(|(c, d)| *c > margin && *c < d - margin)
    }

    /// Uniform wall reflection coefficient reaching `t60` under Eyring's formula.
    pub fn reflection_from_t60(&self) -> Result<f64> {
        self.validate()?;
        let absorption = 1.0 - (-0.161 * self.volume() / (self.surface() * self.t60)).exp();
        if absorption >= 1.0 || !absorption.is_finite() {
            return Err(Error::UnreachableT60 {
                t60: self.t60,
                absorption,
            });
        }
        Ok((1.0 - absorption).sqrt())
    }
}

pub fn distance(a: &Point, b: &Point) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_is_monotone_in_t60() {
        let mut room = RoomSpec::room_a();
        let b1 = room.reflection_from_t60().unwrap();
        room.t60 *= 2.0;
        let b2 = room.reflection_from_t60().unwrap();
        assert!(b1 > 0.0 && b1 < b2 && b2 < 1.0);
    }

    #[test]
    fn long_t60_is_nearly_lossless() {
        let mut room = RoomSpec::room_a();
        room.t60 = 1e6;
        assert!(room.reflection_from_t60().unwrap() > 0.999_999);
    }

    #[test]
    fn tiny_t60_is_unreachable() {
        let mut room = RoomSpec::room_c();
        room.t60 = 1e-300;
        assert!(matches!(
            room.reflection_from_t60(),
            Err(Error::UnreachableT60 { .. })
        ));
    }

    #[test]
    fn containment_with_margin() {
        let room = RoomSpec::room_c();
        assert!(room.contains(&[2.0, 2.0, 1.1], 1.0));
        assert!(!room.contains(&[0.9, 2.0, 1.1], 1.0));
        assert!(!room.contains(&[2.0, 2.0, 2.3], 0.0));
    }

    #[test]
    fn invalid_dims_rejected() {
        assert!(RoomSpec::new("x", [1.0, 0.0, 1.0], 0.3).is_err());
        assert!(RoomSpec::new("x", [1.0, 1.0, 1.0], -0.3).is_err());
    }
}
