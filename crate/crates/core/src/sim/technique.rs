//! Confirmation routing for the five teleport techniques.
//!
//! RP/LP name the hand steering the arc, RG/LG the hand whose pinch confirms;
//! RPDW steers with the right hand and confirms by dwelling.

use serde::{Deserialize, Serialize};

use super::dwell::DwellState;
use super::hand::HandSample;
use super::kalman::{KalmanConfig, PoseFilter};
use super::parabola::{parabola_landing, sphere_hit_test, Landing, LaunchModel};
use super::spike::spike_compensate;
use super::vec3::Vec3;
use crate::error::{Error, Result};
use crate::models::START_CUBE_DEPTH_M;
use crate::trial::{Posture, Technique};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hand {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confirmation {
    Pinch(Hand),
    Dwell,
}

impl Technique {
    pub fn pointer_hand(self) -> Hand {
        match self {
            Technique::LPLG | Technique::LPRG => Hand::Left,
            _ => Hand::Right,
        }
    }

    pub fn confirmation(self) -> Confirmation {
        match self {
            Technique::RPRG | Technique::LPRG => Confirmation::Pinch(Hand::Right),
            Technique::RPLG | Technique::LPLG => Confirmation::Pinch(Hand::Left),
            Technique::RPDW => Confirmation::Dwell,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TechniqueConfig {
    pub technique: Technique,
    pub dwell_threshold_s: f64,
    pub dwell_radius_m: f64,
    pub spike_lookback_s: f64,
    pub kalman: KalmanConfig,
}

impl TechniqueConfig {
    pub fn new(technique: Technique) -> Self {
        TechniqueConfig {
            technique,
            dwell_threshold_s: 0.8,
            dwell_radius_m: 0.3,
            spike_lookback_s: 0.1,
            kalman: KalmanConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dwell_threshold_s >= 0.0) || !(self.dwell_radius_m > 0.0) || !(self.spike_lookback_s >= 0.0) {
            return Err(Error::Config("dwell threshold, dwell radius and lookback must be non-negative".into()));
        }
        self.kalman.validate()
    }
}

/// Shoulder placement and reach used to turn a hand pose into an arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmModel {
    pub shoulder_height_m: f64,
    pub shoulder_half_width_m: f64,
    pub reach_min_m: f64,
    pub reach_max_m: f64,
}

impl ArmModel {
    pub fn for_posture(posture: Posture) -> Self {
        ArmModel {
            shoulder_height_m: match posture {
                Posture::Sitting => 1.05,
                Posture::Standing => 1.45,
            },
            shoulder_half_width_m: 0.19,
            reach_min_m: 0.2,
            reach_max_m: 0.62,
        }
    }

    pub fn shoulder(&self, hand: Hand) -> Vec3 {
        let x = match hand {
            Hand::Left => -self.shoulder_half_width_m,
            Hand::Right => self.shoulder_half_width_m,
        };
        Vec3::new(x, self.shoulder_height_m, 0.0)
    }

    /// 0 with the hand at minimum reach, 1 at full extension.
    pub fn extension(&self, hand: Hand, position: Vec3) -> f64 {
        let r = position.distance(self.shoulder(hand));
        ((r - self.reach_min_m) / (self.reach_max_m - self.reach_min_m)).clamp(0.0, 1.0)
    }

    pub fn hand_position(&self, hand: Hand, direction: Vec3, extension: f64) -> Vec3 {
        let reach = self.reach_min_m + extension.clamp(0.0, 1.0) * (self.reach_max_m - self.reach_min_m);
        self.shoulder(hand) + direction * reach
    }
}

/// One target presentation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneSpec {
    pub start_cube_depth_m: f64,
    pub width_m: f64,
    pub distance_m: f64,
    pub height_m: f64,
    pub angle_deg: f64,
    pub platform_size_m: f64,
    pub gravity_m_s2: f64,
    pub launch: LaunchModel,
    pub arm: ArmModel,
    /// Floor point under the user; teleport displacement is measured from it.
    pub user_origin_m: Vec3,
}

impl SceneSpec {
    pub fn new(width_m: f64, distance_m: f64, height_m: f64, angle_deg: f64, posture: Posture) -> Self {
        SceneSpec {
            start_cube_depth_m: START_CUBE_DEPTH_M,
            width_m,
            distance_m,
            height_m,
            angle_deg,
            platform_size_m: 1.0,
            gravity_m_s2: 9.81,
            launch: LaunchModel::default(),
            arm: ArmModel::for_posture(posture),
            user_origin_m: Vec3::ZERO,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.width_m, self.distance_m, self.platform_size_m, self.gravity_m_s2];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) || !(self.height_m >= 0.0) || !self.angle_deg.is_finite() {
            return Err(Error::Domain("scene geometry must be positive and finite".into()));
        }
        Ok(())
    }

    /// Sphere centre, resting on the platform surface at height H.
    pub fn target_center(&self) -> Vec3 {
        let a = self.angle_deg.to_radians();
        self.user_origin_m + Vec3::new(self.distance_m * a.sin(), self.height_m, self.distance_m * a.cos())
    }

    /// Arc cast from a pointer sample, intersected with the platform plane.
    pub fn cast(&self, hand: Hand, sample: &HandSample) -> Option<Landing> {
        let speed = self.launch.speed(self.arm.extension(hand, sample.position_m));
        parabola_landing(sample.position_m, sample.direction * speed, self.gravity_m_s2, self.target_center().y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub movement_time_s: f64,
    pub endpoint_deviation_m: f64,
    pub error_attempts: u32,
    pub success: bool,
    pub realized_amplitude_m: f64,
    pub selection_point_m: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TechniqueEvent {
    /// A confirmation that missed; `deviation_m` is `None` when the arc
    /// never reached the platform plane.
    Miss { t_s: f64, deviation_m: Option<f64>, landing_m: Option<Vec3> },
    Hit(TrialOutcome),
}

/// Per-trial state of one technique.
#[derive(Debug, Clone)]
pub struct TechniqueMachine {
    pub config: TechniqueConfig,
    pub scene: SceneSpec,
    start_t: Option<f64>,
    prev_pinch: [bool; 2],
    dwell: DwellState,
    filter: PoseFilter,
    history: Vec<HandSample>,
    error_attempts: u32,
    finished: bool,
}

impl TechniqueMachine {
    pub fn new(config: TechniqueConfig, scene: SceneSpec) -> Result<Self> {
        config.validate()?;
        scene.validate()?;
        Ok(TechniqueMachine {
            config,
            scene,
            start_t: None,
            prev_pinch: [false; 2],
            dwell: DwellState::new(config.dwell_threshold_s, config.dwell_radius_m),
            filter: PoseFilter::new(config.kalman),
            history: Vec::new(),
            error_attempts: 0,
            finished: false,
        })
    }

    pub fn error_attempts(&self) -> u32 {
        self.error_attempts
    }

    pub fn finished(&self) -> bool {
        self.finished
    }

    pub fn dwell_progress(&self) -> f64 {
        self.dwell.progress()
    }

    /// Smoothed pointer-hand samples seen so far.
    pub fn pointer_history(&self) -> &[HandSample] {
        &self.history
    }

    /// Feeds one time-aligned pair of hand samples.
    pub fn step(&mut self, left: &HandSample, right: &HandSample) -> Result<Option<TechniqueEvent>> {
        if self.finished {
            return Ok(None);
        }
        let t = right.t_s;
        self.start_t.get_or_insert(t);
        let technique = self.config.technique;
        let hand = technique.pointer_hand();
        let raw = match hand {
            Hand::Left => left,
            Hand::Right => right,
        };
        let smoothed = self.filter.update(raw)?;
        self.history.push(smoothed);

        let edges = [left.pinch && !self.prev_pinch[0], right.pinch && !self.prev_pinch[1]];
        self.prev_pinch = [left.pinch, right.pinch];
        let confirmed = match technique.confirmation() {
            Confirmation::Pinch(Hand::Left) => edges[0],
            Confirmation::Pinch(Hand::Right) => edges[1],
            Confirmation::Dwell => self.dwell.update(&smoothed),
        };
        if !confirmed {
            return Ok(None);
        }

        let effective = spike_compensate(&self.history, t, self.config.spike_lookback_s)?;
        let Some(landing) = self.scene.cast(hand, &effective) else {
            self.error_attempts += 1;
            return Ok(Some(TechniqueEvent::Miss { t_s: t, deviation_m: None, landing_m: None }));
        };
        let hit = sphere_hit_test(landing.point, self.scene.target_center(), self.scene.width_m);
        if !hit.hit {
            self.error_attempts += 1;
            return Ok(Some(TechniqueEvent::Miss {
                t_s: t,
                deviation_m: Some(hit.deviation_m),
                landing_m: Some(landing.point),
            }));
        }
        self.finished = true;
        Ok(Some(TechniqueEvent::Hit(TrialOutcome {
            movement_time_s: t - self.start_t.unwrap_or(t),
            endpoint_deviation_m: hit.deviation_m,
            error_attempts: self.error_attempts,
            success: true,
            realized_amplitude_m: landing.point.distance(self.scene.user_origin_m),
            selection_point_m: landing.point,
        })))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scene() -> SceneSpec {
        SceneSpec::new(1.35, 3.0, 0.0, 0.0, Posture::Standing)
    }

    /// Pose whose arc lands `miss_m` beyond the target centre.
    fn aimed(scene: &SceneSpec, hand: Hand, miss_m: f64) -> (Vec3, Vec3) {
        let shoulder = scene.arm.shoulder(hand);
        let c = scene.target_center();
        let dir = Vec3::from_angles(30f64.to_radians(), (c.x - shoulder.x).atan2(c.z - shoulder.z));
        let horiz = |p: Vec3| ((p.x - shoulder.x).powi(2) + (p.z - shoulder.z).powi(2)).sqrt();
        let want = horiz(c) + miss_m;
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            let pos = scene.arm.hand_position(hand, dir, mid);
            let s = HandSample { t_s: 0.0, position_m: pos, direction: dir, pinch: false };
            if horiz(scene.cast(hand, &s).unwrap().point) < want {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (scene.arm.hand_position(hand, dir, lo), dir)
    }

    fn script(technique: Technique, left_pinch_at: Option<usize>, right_pinch_at: Option<usize>) -> Vec<TechniqueEvent> {
        let scene = scene();
        let mut m = TechniqueMachine::new(TechniqueConfig::new(technique), scene).unwrap();
        let (lp, ld) = aimed(&scene, Hand::Left, 0.0);
        let (rp, rd) = aimed(&scene, Hand::Right, 0.0);
        let mut events = Vec::new();
        for i in 0..60 {
            let t = i as f64 / 90.0;
            let l = HandSample { t_s: t, position_m: lp, direction: ld, pinch: left_pinch_at.is_some_and(|k| i >= k) };
            let r = HandSample { t_s: t, position_m: rp, direction: rd, pinch: right_pinch_at.is_some_and(|k| i >= k) };
            events.extend(m.step(&l, &r).unwrap());
        }
        events
    }

    #[test]
    fn routing_table() {
        assert_eq!(Technique::RPRG.confirmation(), Confirmation::Pinch(Hand::Right));
        assert_eq!(Technique::LPRG.pointer_hand(), Hand::Left);
        assert_eq!(Technique::RPDW.confirmation(), Confirmation::Dwell);
    }

    #[test]
    fn rprg_right_pinch_on_target_succeeds() {
        let events = script(Technique::RPRG, None, Some(30));
        assert_eq!(events.len(), 1);
        match events[0] {
            TechniqueEvent::Hit(o) => {
                assert!(o.success && o.error_attempts == 0);
                assert!((o.movement_time_s - 30.0 / 90.0).abs() < 1e-12);
                assert!(o.endpoint_deviation_m < 1e-6, "{o:?}");
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn rplg_ignores_right_pinch() {
        assert!(script(Technique::RPLG, None, Some(30)).is_empty());
        assert!(matches!(script(Technique::RPLG, Some(30), None)[..], [TechniqueEvent::Hit(_)]));
    }

    #[test]
    fn lplg_and_lprg_routing() {
        assert!(script(Technique::LPLG, None, Some(10)).is_empty());
        assert!(matches!(script(Technique::LPLG, Some(10), None)[..], [TechniqueEvent::Hit(_)]));
        assert!(script(Technique::LPRG, Some(10), None).is_empty());
        assert!(matches!(script(Technique::LPRG, None, Some(10))[..], [TechniqueEvent::Hit(_)]));
    }

    #[test]
    fn rpdw_ignores_pinches_and_fires_on_dwell() {
        let events = script(Technique::RPDW, Some(5), Some(6));
        // 60 samples at 90 Hz span 0.66 s: too short to dwell
        assert!(events.is_empty());
        let scene = scene();
        let mut m = TechniqueMachine::new(TechniqueConfig::new(Technique::RPDW), scene).unwrap();
        let (rp, rd) = aimed(&scene, Hand::Right, 0.0);
        let mut hit_at = None;
        for i in 0..100 {
            let t = i as f64 * 0.01;
            let s = HandSample { t_s: t, position_m: rp, direction: rd, pinch: i % 3 == 0 };
            if let Some(TechniqueEvent::Hit(o)) = m.step(&s, &s).unwrap() {
                hit_at = Some(o.movement_time_s);
                break;
            }
        }
        assert!((hit_at.unwrap() - 0.8).abs() < 0.0101);
    }

    #[test]
    fn miss_counts_and_trial_continues() {
        let scene = scene();
        let mut m = TechniqueMachine::new(TechniqueConfig::new(Technique::RPRG), scene).unwrap();
        let (far, dir) = aimed(&scene, Hand::Right, 1.5);
        let (on, _) = aimed(&scene, Hand::Right, 0.0);
        let mut events = Vec::new();
        for i in 0..120 {
            let t = i as f64 / 90.0;
            let pos = if i < 40 { far } else { on };
            let pinch = (20..25).contains(&i) || (80..85).contains(&i);
            let s = HandSample { t_s: t, position_m: pos, direction: dir, pinch };
            events.extend(m.step(&s, &s).unwrap());
        }
        assert!(matches!(events[0], TechniqueEvent::Miss { deviation_m: Some(d), .. } if (d - 1.5).abs() < 1e-3));
        match events[1] {
            TechniqueEvent::Hit(o) => assert_eq!(o.error_attempts, 1),
            e => panic!("{e:?}"),
        }
        assert_eq!(events.len(), 2);
    }
}
