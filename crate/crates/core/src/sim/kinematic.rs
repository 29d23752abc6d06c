//! Full kinematic trial: a synthetic reach is streamed through a technique
//! machine until a selection lands on the target.

use super::hand::{synth_hand_trace, HandPose, HandSample};
use super::technique::{Confirmation, Hand, SceneSpec, TechniqueConfig, TechniqueEvent, TechniqueMachine, TrialOutcome};
use super::vec3::Vec3;
use crate::error::{Error, Result};

/// Downward wrist jerk while closing the index finger of the pointing hand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinchSpike {
    /// How long before the pinch registers the jerk begins.
    pub lead_s: f64,
    pub pitch_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicParams {
    pub sample_rate_hz: f64,
    pub tremor_sd_m: f64,
    pub reach_duration_s: f64,
    /// Delay between the end of the reach and the first pinch.
    pub reaction_s: f64,
    pub retry_interval_s: f64,
    pub pinch_duration_s: f64,
    pub max_attempts: u32,
    /// Applied only when the pointing hand also confirms.
    pub spike: Option<PinchSpike>,
}

impl Default for KinematicParams {
    fn default() -> Self {
        KinematicParams {
            sample_rate_hz: 90.0,
            tremor_sd_m: 0.0015,
            reach_duration_s: 0.9,
            reaction_s: 0.25,
            retry_interval_s: 0.5,
            pinch_duration_s: 0.15,
            max_attempts: 6,
            spike: Some(PinchSpike { lead_s: 0.06, pitch_deg: 6.0 }),
        }
    }
}

fn angles(d: Vec3) -> (f64, f64) {
    (d.y.clamp(-1.0, 1.0).asin(), d.x.atan2(d.z))
}

/// Hand pose whose arc lands on the target centre, choosing the elevation
/// (5°–70°) that needs an arm extension closest to half way.
pub fn aim(scene: &SceneSpec, hand: Hand) -> Result<HandPose> {
    let shoulder = scene.arm.shoulder(hand);
    let center = scene.target_center();
    let azimuth = (center.x - shoulder.x).atan2(center.z - shoulder.z);
    let horiz = |p: Vec3| ((p.x - shoulder.x).powi(2) + (p.z - shoulder.z).powi(2)).sqrt();
    let want = horiz(center);
    let pose = |dir: Vec3, ext: f64| HandPose { position_m: scene.arm.hand_position(hand, dir, ext), direction: dir };
    let overshoot = |dir: Vec3, ext: f64| {
        let p = pose(dir, ext);
        let s = HandSample { t_s: 0.0, position_m: p.position_m, direction: p.direction, pinch: false };
        scene.cast(hand, &s).map(|l| horiz(l.point) - want)
    };

    let mut best: Option<(f64, HandPose)> = None;
    for step in 0..=130 {
        let dir = Vec3::from_angles((5.0 + 0.5 * step as f64).to_radians(), azimuth);
        // an arc that never reaches the platform plane falls short
        let short = |ext: f64| overshoot(dir, ext).is_none_or(|e| e < 0.0);
        if !short(0.0) || short(1.0) {
            continue;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if short(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let ext = 0.5 * (lo + hi);
        // the bracket can close on the apex discontinuity instead of a root
        if overshoot(dir, ext).is_none_or(|e| e.abs() > 1e-9) {
            continue;
        }
        let score = (ext - 0.5).abs();
        if best.as_ref().is_none_or(|(s, _)| score < *s) {
            best = Some((score, pose(dir, ext)));
        }
    }
    best.map(|(_, p)| p)
        .ok_or_else(|| Error::Domain(format!("target at D={} H={} is out of reach", scene.distance_m, scene.height_m)))
}

/// Runs one trial. The pointing hand reaches from a lowered rest pose to
/// the aimed pose and holds it with tremor; pinches (or the dwell timer)
/// confirm until a selection hits or `max_attempts` pinches are used up.
pub fn simulate_trial(
    config: TechniqueConfig,
    scene: SceneSpec,
    params: &KinematicParams,
    seed: u64,
) -> Result<TrialOutcome> {
    let technique = config.technique;
    let pointer = technique.pointer_hand();
    let other = match pointer {
        Hand::Left => Hand::Right,
        Hand::Right => Hand::Left,
    };
    let target = aim(&scene, pointer)?;
    let rest_pose = |hand: Hand| {
        let dir = Vec3::from_angles((-25f64).to_radians(), 0.0);
        HandPose { position_m: scene.arm.hand_position(hand, dir, 0.2), direction: dir }
    };

    let first_pinch = params.reach_duration_s + params.reaction_s;
    let tail = match technique.confirmation() {
        Confirmation::Dwell => config.dwell_threshold_s * f64::from(params.max_attempts) + 0.5,
        Confirmation::Pinch(_) => params.retry_interval_s * f64::from(params.max_attempts) + 0.5,
    };
    let reach = synth_hand_trace(
        rest_pose(pointer),
        target,
        params.reach_duration_s,
        params.tremor_sd_m,
        params.sample_rate_hz,
        seed,
    )?;
    let held = synth_hand_trace(target, target, tail, params.tremor_sd_m, params.sample_rate_hz, seed ^ 0x9e37_79b9)?;
    let mut pointer_trace = reach;
    pointer_trace.extend(held.into_iter().skip(1).map(|mut s| {
        s.t_s += params.reach_duration_s;
        s
    }));

    let pinch_times: Vec<f64> = match technique.confirmation() {
        Confirmation::Pinch(_) => {
            (0..params.max_attempts).map(|k| first_pinch + f64::from(k) * params.retry_interval_s).collect()
        }
        Confirmation::Dwell => Vec::new(),
    };
    let pinching = |t: f64| pinch_times.iter().any(|&p| t >= p && t < p + params.pinch_duration_s);
    let same_hand = technique.confirmation() == Confirmation::Pinch(pointer);
    let rest = rest_pose(other);

    let mut machine = TechniqueMachine::new(config, scene)?;
    let mut last_miss: Option<(f64, Vec3)> = None;
    for s in &pointer_trace {
        let mut p = *s;
        if same_hand {
            p.pinch = pinching(s.t_s);
            if let Some(spike) = params.spike {
                if pinch_times.iter().any(|&c| s.t_s >= c - spike.lead_s && s.t_s < c + params.pinch_duration_s) {
                    let (el, az) = angles(p.direction);
                    p.direction = Vec3::from_angles(el - spike.pitch_deg.to_radians(), az);
                }
            }
        }
        let o = HandSample {
            t_s: s.t_s,
            position_m: rest.position_m,
            direction: rest.direction,
            pinch: !same_hand && pinching(s.t_s),
        };
        let (left, right) = match pointer {
            Hand::Left => (p, o),
            Hand::Right => (o, p),
        };
        match machine.step(&left, &right)? {
            Some(TechniqueEvent::Hit(outcome)) => return Ok(outcome),
            Some(TechniqueEvent::Miss { deviation_m: Some(d), landing_m: Some(l), .. }) => last_miss = Some((d, l)),
            _ => {}
        }
        if machine.error_attempts() >= params.max_attempts {
            break;
        }
    }
    let end = pointer_trace.last().map_or(0.0, |s| s.t_s);
    let (deviation, landing) =
        last_miss.ok_or_else(|| Error::Convergence("no selection reached the platform".into()))?;
    Ok(TrialOutcome {
        movement_time_s: end - pointer_trace[0].t_s,
        endpoint_deviation_m: deviation,
        error_attempts: machine.error_attempts(),
        success: false,
        realized_amplitude_m: landing.distance(scene.user_origin_m),
        selection_point_m: landing,
    })
}
