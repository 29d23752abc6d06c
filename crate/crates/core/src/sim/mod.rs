//! Headless teleport-task simulation: arc kinematics, hand traces, the five
//! technique state machines and whole-study log generation.

pub mod config;
pub mod dwell;
pub mod hand;
pub mod kalman;
pub mod kinematic;
pub mod latin;
pub mod parabola;
pub mod spike;
pub mod study;
pub mod technique;
pub mod vec3;

pub use vec3::Vec3;
