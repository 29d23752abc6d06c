//! Dwell confirmation: hold the hand within a radius for a threshold time.

use super::hand::HandSample;
use super::vec3::Vec3;

#[derive(Debug, Clone, PartialEq)]
pub struct DwellState {
    pub threshold_s: f64,
    pub radius_m: f64,
    anchor: Option<(Vec3, f64)>,
    elapsed_s: f64,
}

impl DwellState {
    pub fn new(threshold_s: f64, radius_m: f64) -> Self {
        DwellState { threshold_s, radius_m, anchor: None, elapsed_s: 0.0 }
    }

    /// Fraction of the threshold held so far, in [0, 1]; drives the
    /// progress indicator.
    pub fn progress(&self) -> f64 {
        if self.threshold_s <= 0.0 {
            return 1.0;
        }
        (self.elapsed_s / self.threshold_s).min(1.0)
    }

    pub fn reset(&mut self) {
        self.anchor = None;
        self.elapsed_s = 0.0;
    }

    /// Returns true when this sample completes a dwell. Leaving the radius
    /// re-anchors at the current sample; a completed dwell re-anchors too.
    pub fn update(&mut self, sample: &HandSample) -> bool {
        let (anchor, t0) = match self.anchor {
            Some((p, t0)) if p.distance(sample.position_m) <= self.radius_m => (p, t0),
            _ => (sample.position_m, sample.t_s),
        };
        self.elapsed_s = sample.t_s - t0;
        if self.elapsed_s >= self.threshold_s {
            self.anchor = Some((sample.position_m, sample.t_s));
            self.elapsed_s = 0.0;
            return true;
        }
        self.anchor = Some((anchor, t0));
        false
    }
}

/// Feeds a trace through the detector and returns the times of the
/// selections it fires.
pub fn dwell_selections(trace: &[HandSample], threshold_s: f64, radius_m: f64) -> Vec<f64> {
    let mut d = DwellState::new(threshold_s, radius_m);
    trace.iter().filter(|s| d.update(s)).map(|s| s.t_s).collect()
}
