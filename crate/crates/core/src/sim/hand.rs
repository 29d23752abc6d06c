//! Tracked-hand samples and synthetic minimum-jerk reaches.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::vec3::Vec3;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandSample {
    pub t_s: f64,
    pub position_m: Vec3,
    /// Unit pointing direction from the arm and wrist.
    pub direction: Vec3,
    /// Index finger closed.
    pub pinch: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandPose {
    pub position_m: Vec3,
    pub direction: Vec3,
}

/// Timestamps must be strictly increasing.
pub fn check_trace(trace: &[HandSample]) -> Result<()> {
    match trace.windows(2).position(|w| !(w[1].t_s > w[0].t_s)) {
        Some(i) => Err(Error::NonMonotoneTimestamps { index: i + 1 }),
        None => Ok(()),
    }
}

/// Normalized position along a minimum-jerk reach at phase `tau` ∈ [0, 1].
pub fn min_jerk(tau: f64) -> f64 {
    let t = tau.clamp(0.0, 1.0);
    let t3 = t * t * t;
    t3 * (10.0 - 15.0 * t + 6.0 * t * t)
}

/// A reach from `from` to `to` sampled at `sample_rate_hz`, with Gaussian
/// tremor (per axis, SD `tremor_sd_m`) added to positions. The last sample
/// is always at exactly `duration_s`.
pub fn synth_hand_trace(
    from: HandPose,
    to: HandPose,
    duration_s: f64,
    tremor_sd_m: f64,
    sample_rate_hz: f64,
    seed: u64,
) -> Result<Vec<HandSample>> {
    if !(duration_s > 0.0) || !(sample_rate_hz > 0.0) || !(tremor_sd_m >= 0.0) {
        return Err(Error::Domain(format!(
            "hand trace needs duration > 0, rate > 0, tremor >= 0 (got {duration_s}, {sample_rate_hz}, {tremor_sd_m})"
        )));
    }
    let d0 = from.direction.normalized().ok_or_else(|| Error::Domain("zero start direction".into()))?;
    let d1 = to.direction.normalized().ok_or_else(|| Error::Domain("zero end direction".into()))?;
    let tremor = Normal::new(0.0, tremor_sd_m).map_err(|e| Error::Domain(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let steps = (duration_s * sample_rate_hz).floor() as usize;
    let mut times: Vec<f64> = (0..=steps).map(|i| i as f64 / sample_rate_hz).collect();
    if duration_s - times[steps] > 1e-9 {
        times.push(duration_s);
    } else {
        times[steps] = duration_s;
    }

    let mut out = Vec::with_capacity(times.len());
    for t in times {
        let s = min_jerk(t / duration_s);
        let mut p = from.position_m.lerp(to.position_m, s);
        if tremor_sd_m > 0.0 {
            p = p + Vec3::new(tremor.sample(&mut rng), tremor.sample(&mut rng), tremor.sample(&mut rng));
        }
        // antipodal endpoints have no defined blend; keep the start direction
        let direction = d0.lerp(d1, s).normalized().unwrap_or(d0);
        out.push(HandSample { t_s: t, position_m: p, direction, pinch: false });
    }
    Ok(out)
}

/// Stationary samples at `pose` over `[t0, t0 + duration_s]`.
pub fn hold(pose: HandPose, t0: f64, duration_s: f64, sample_rate_hz: f64) -> Vec<HandSample> {
    let direction = pose.direction.normalized().unwrap_or(Vec3::new(0.0, 0.0, 1.0));
    let n = (duration_s * sample_rate_hz).round() as usize;
    (0..=n)
        .map(|i| HandSample { t_s: t0 + i as f64 / sample_rate_hz, position_m: pose.position_m, direction, pinch: false })
        .collect()
}
