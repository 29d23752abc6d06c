//! Rollback of the pointer to just before a confirmation gesture, which
//! otherwise jerks the pointer at the moment of selection.

use super::hand::HandSample;
use crate::error::{Error, Result};

/// Pointer sample at `confirmation_time_s - lookback_s`, linearly
/// interpolated between neighbours (direction renormalized). Times before
/// the first sample clamp to it.
pub fn spike_compensate(trace: &[HandSample], confirmation_time_s: f64, lookback_s: f64) -> Result<HandSample> {
    let (first, last) = match (trace.first(), trace.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::InsufficientData { required: 1, got: 0 }),
    };
    if !(lookback_s >= 0.0) {
        return Err(Error::Domain(format!("lookback must be >= 0, got {lookback_s}")));
    }
    if confirmation_time_s < first.t_s || confirmation_time_s > last.t_s {
        return Err(Error::Domain(format!(
            "confirmation at {confirmation_time_s} s outside trace [{}, {}]",
            first.t_s, last.t_s
        )));
    }
    let t = (confirmation_time_s - lookback_s).max(first.t_s);
    // first sample strictly after t
    let i = trace.partition_point(|s| s.t_s <= t);
    if i == 0 {
        return Ok(*first);
    }
    let a = &trace[i - 1];
    if i == trace.len() || a.t_s == t {
        return Ok(*a);
    }
    let b = &trace[i];
    let s = (t - a.t_s) / (b.t_s - a.t_s);
    Ok(HandSample {
        t_s: t,
        position_m: a.position_m.lerp(b.position_m, s),
        direction: a.direction.lerp(b.direction, s).normalized().unwrap_or(a.direction),
        pinch: a.pinch,
    })
}
