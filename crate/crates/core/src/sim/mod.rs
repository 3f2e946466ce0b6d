//! Shoebox room acoustics simulator.

pub mod render;
pub mod rir;
pub mod room;
pub mod signals;
pub mod trajectory;

pub use render::{render_images, render_scene, Rendered, Scene, SceneRecipe};
pub use rir::{cardioid_gain, rir_image_source, schroeder_t60, MicSpec, RirSettings};
pub use room::{Point, RoomSpec};
pub use signals::{test_signal, SignalKind};
pub use trajectory::{synth_trajectory, Trajectory};
