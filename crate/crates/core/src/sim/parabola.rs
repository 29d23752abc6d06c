//! Ballistic pointer arc and target hit test.

use super::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Landing {
    pub point: Vec3,
    pub flight_time_s: f64,
}

/// Where an arc launched from `origin` with `velocity` crosses the plane
/// `y = landing_height_m` on its way down (largest root of the height
/// equation). `None` when the arc never reaches that height or only did so
/// in the past.
pub fn parabola_landing(origin: Vec3, velocity: Vec3, gravity_m_s2: f64, landing_height_m: f64) -> Option<Landing> {
    debug_assert!(gravity_m_s2 > 0.0);
    let g = gravity_m_s2;
    let drop = origin.y - landing_height_m;
    let disc = velocity.y * velocity.y + 2.0 * g * drop;
    if disc < 0.0 || !disc.is_finite() {
        return None;
    }
    let sq = disc.sqrt();
    // two algebraically equal forms; pick the one without cancellation
    let t = if velocity.y >= 0.0 {
        (velocity.y + sq) / g
    } else if sq - velocity.y > 0.0 {
        2.0 * drop / (sq - velocity.y)
    } else {
        0.0
    };
    if t < 0.0 {
        return None;
    }
    let point = Vec3::new(
        origin.x + velocity.x * t,
        origin.y + velocity.y * t - 0.5 * g * t * t,
        origin.z + velocity.z * t,
    );
    Some(Landing { point, flight_time_s: t })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitTest {
    pub hit: bool,
    pub deviation_m: f64,
}

/// The boundary counts as inside.
pub fn sphere_hit_test(landing: Vec3, target_center: Vec3, width_m: f64) -> HitTest {
    let deviation_m = landing.distance(target_center);
    HitTest { hit: deviation_m <= width_m / 2.0, deviation_m }
}

/// Maps arm extension (0 = retracted, 1 = fully extended) to launch speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaunchModel {
    pub base_speed_m_s: f64,
    pub gain_m_s: f64,
}

impl Default for LaunchModel {
    fn default() -> Self {
        LaunchModel { base_speed_m_s: 3.0, gain_m_s: 9.0 }
    }
}

impl LaunchModel {
    pub fn speed(&self, extension: f64) -> f64 {
        self.base_speed_m_s + self.gain_m_s * extension.clamp(0.0, 1.0)
    }
}
