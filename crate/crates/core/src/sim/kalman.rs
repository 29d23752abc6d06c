//! Constant-velocity Kalman smoothing of hand poses, one filter per axis.

use super::hand::{check_trace, HandSample};
use super::vec3::Vec3;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanConfig {
    /// Spectral density of the white-acceleration process noise.
    pub process_noise: f64,
    /// Variance of a single measurement.
    pub measurement_noise: f64,
}

impl Default for KalmanConfig {
    fn default() -> Self {
        KalmanConfig { process_noise: 20.0, measurement_noise: 1e-4 }
    }
}

impl KalmanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.process_noise > 0.0 && self.measurement_noise > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain("Kalman noise parameters must be > 0".into()))
        }
    }
}

/// Position/velocity filter for a single coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisFilter {
    x: f64,
    v: f64,
    p: [[f64; 2]; 2],
    q: f64,
    r: f64,
}

impl AxisFilter {
    /// Starts at the first measurement with zero velocity, position
    /// variance `r` and unit velocity variance.
    pub fn new(config: KalmanConfig, z0: f64) -> Self {
        AxisFilter {
            x: z0,
            v: 0.0,
            p: [[config.measurement_noise, 0.0], [0.0, 1.0]],
            q: config.process_noise,
            r: config.measurement_noise,
        }
    }

    pub fn estimate(&self) -> f64 {
        self.x
    }

    pub fn velocity(&self) -> f64 {
        self.v
    }

    /// Predicts over `dt` and folds in measurement `z`.
    pub fn update(&mut self, dt: f64, z: f64) -> f64 {
        let [[p00, p01], [p10, p11]] = self.p;
        let (dt2, dt3) = (dt * dt, dt * dt * dt);
        // predict
        let x = self.x + dt * self.v;
        let v = self.v;
        let a00 = p00 + dt * (p10 + p01) + dt2 * p11 + self.q * dt3 / 3.0;
        let a01 = p01 + dt * p11 + self.q * dt2 / 2.0;
        let a10 = p10 + dt * p11 + self.q * dt2 / 2.0;
        let a11 = p11 + self.q * dt;
        // update
        let s = a00 + self.r;
        let (k0, k1) = (a00 / s, a10 / s);
        let y = z - x;
        self.x = x + k0 * y;
        self.v = v + k1 * y;
        self.p = [[(1.0 - k0) * a00, (1.0 - k0) * a01], [a10 - k1 * a00, a11 - k1 * a01]];
        self.x
    }
}

/// Streaming pose filter: positions and direction components are filtered
/// independently and the direction is renormalized.
#[derive(Debug, Clone)]
pub struct PoseFilter {
    config: KalmanConfig,
    state: Option<([AxisFilter; 6], f64)>,
}

impl PoseFilter {
    pub fn new(config: KalmanConfig) -> Self {
        PoseFilter { config, state: None }
    }

    pub fn update(&mut self, s: &HandSample) -> Result<HandSample> {
        let z = [s.position_m.x, s.position_m.y, s.position_m.z, s.direction.x, s.direction.y, s.direction.z];
        let est: [f64; 6] = match &mut self.state {
            None => {
                let filters = z.map(|zi| AxisFilter::new(self.config, zi));
                self.state = Some((filters, s.t_s));
                z
            }
            Some((filters, last_t)) => {
                let dt = s.t_s - *last_t;
                if !(dt > 0.0) {
                    return Err(Error::NonMonotoneTimestamps { index: 0 });
                }
                *last_t = s.t_s;
                let mut out = [0.0; 6];
                for i in 0..6 {
                    out[i] = filters[i].update(dt, z[i]);
                }
                out
            }
        };
        let direction = Vec3::new(est[3], est[4], est[5]).normalized().unwrap_or(s.direction);
        Ok(HandSample { t_s: s.t_s, position_m: Vec3::new(est[0], est[1], est[2]), direction, pinch: s.pinch })
    }
}

pub fn kalman_smooth(trace: &[HandSample], config: KalmanConfig) -> Result<Vec<HandSample>> {
    config.validate()?;
    check_trace(trace)?;
    let mut f = PoseFilter::new(config);
    trace.iter().map(|s| f.update(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix1x2, Matrix2, Matrix2x1, Vector2};

    fn sample(t: f64, x: f64) -> HandSample {
        HandSample { t_s: t, position_m: Vec3::new(x, 1.0, 0.5), direction: Vec3::new(0.0, 0.0, 1.0), pinch: false }
    }

    #[test]
    fn constant_trace_is_fixed_point() {
        let trace: Vec<_> = (0..100).map(|i| sample(i as f64 * 0.011, 0.37)).collect();
        let out = kalman_smooth(&trace, KalmanConfig::default()).unwrap();
        assert!((out[99].position_m.x - 0.37).abs() < 1e-6);
        assert!((out[99].position_m.y - 1.0).abs() < 1e-6);
    }

    #[test]
    fn empty_in_empty_out() {
        assert!(kalman_smooth(&[], KalmanConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn rejects_non_monotone() {
        let trace = vec![sample(0.0, 0.0), sample(0.1, 0.0), sample(0.1, 0.0)];
        assert_eq!(
            kalman_smooth(&trace, KalmanConfig::default()).unwrap_err(),
            Error::NonMonotoneTimestamps { index: 2 }
        );
    }

    /// Textbook matrix-form filter as an independent reference.
    fn matrix_filter(zs: &[(f64, f64)], q: f64, r: f64) -> Vec<f64> {
        let h = Matrix1x2::new(1.0, 0.0);
        let mut x = Vector2::new(zs[0].1, 0.0);
        let mut p = Matrix2::new(r, 0.0, 0.0, 1.0);
        let mut out = vec![zs[0].1];
        for w in zs.windows(2) {
            let dt = w[1].0 - w[0].0;
            let f = Matrix2::new(1.0, dt, 0.0, 1.0);
            let qm = Matrix2::new(dt.powi(3) / 3.0, dt * dt / 2.0, dt * dt / 2.0, dt) * q;
            x = f * x;
            p = f * p * f.transpose() + qm;
            let s = (h * p * h.transpose())[(0, 0)] + r;
            let k: Matrix2x1<f64> = p * h.transpose() / s;
            x += k * (w[1].1 - (h * x)[(0, 0)]);
            p = (Matrix2::identity() - k * h) * p;
            out.push(x[0]);
        }
        out
    }

    #[test]
    fn step_response_matches_matrix_reference() {
        let cfg = KalmanConfig { process_noise: 5.0, measurement_noise: 4e-4 };
        let zs: Vec<(f64, f64)> = (0..120).map(|i| (i as f64 / 90.0, if i < 30 { 0.0 } else { 0.25 })).collect();
        let trace: Vec<_> = zs.iter().map(|&(t, x)| sample(t, x)).collect();
        let ours = kalman_smooth(&trace, cfg).unwrap();
        let reference = matrix_filter(&zs, cfg.process_noise, cfg.measurement_noise);
        for (a, b) in ours.iter().zip(&reference) {
            assert!((a.position_m.x - b).abs() < 1e-9);
        }
        // the output lags the step
        assert!(ours[30].position_m.x < 0.25 && ours[30].position_m.x > 0.0);
    }
}
