//! Predictor construction for the four Fitts' law variants.
//!
//! Negative-signed terms are folded into the predictor, not the slope:
//! the two-part model's width term is stored as `-log2(W)` and the proposed
//! model's depth/altitude term as `-log2(W / max(D, H) + 1)`. A fitted
//! model is therefore always `MT = a + Σ bᵢ·xᵢ`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Depth of the start cube in front of the user, the default reference for
/// the change in target depth.
pub const START_CUBE_DEPTH_M: f64 = 0.59;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelKind {
    Standard,
    TwoPart,
    Vergence,
    Proposed,
}

impl ModelKind {
    /// Also the tie-break order used when ranking.
    pub const ALL: [ModelKind; 4] = [
        ModelKind::Standard,
        ModelKind::TwoPart,
        ModelKind::Vergence,
        ModelKind::Proposed,
    ];

    pub fn predictor_count(self) -> usize {
        match self {
            ModelKind::Standard => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Standard => "Standard",
            ModelKind::TwoPart => "Two-part",
            ModelKind::Vergence => "Vergence",
            ModelKind::Proposed => "Proposed",
        }
    }

    /// The model this one extends by exactly one predictor, if any.
    pub fn nested_base(self) -> Option<ModelKind> {
        match self {
            ModelKind::Vergence | ModelKind::Proposed => Some(ModelKind::Standard),
            _ => None,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_', ' '], "").as_str() {
            "standard" => Ok(ModelKind::Standard),
            "twopart" => Ok(ModelKind::TwoPart),
            "vergence" => Ok(ModelKind::Vergence),
            "proposed" => Ok(ModelKind::Proposed),
            _ => Err(Error::Config(format!("unknown model '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub enum AmplitudeMode {
    /// `sqrt(D² + H²)`: the pointer travels in depth and in elevation.
    #[default]
    Euclidean,
    /// The horizontal depth `D` alone.
    DepthOnly,
}

impl AmplitudeMode {
    pub const ALL: [AmplitudeMode; 2] = [AmplitudeMode::Euclidean, AmplitudeMode::DepthOnly];

    pub fn label(self) -> &'static str {
        match self {
            AmplitudeMode::Euclidean => "euclidean",
            AmplitudeMode::DepthOnly => "depth",
        }
    }
}

impl fmt::Display for AmplitudeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for AmplitudeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(AmplitudeMode::Euclidean),
            "depth" | "depth-only" | "depthonly" => Ok(AmplitudeMode::DepthOnly),
            _ => Err(Error::Config(format!("unknown amplitude mode '{s}'"))),
        }
    }
}

pub fn amplitude_from_grid(distance_m: f64, height_m: f64, mode: AmplitudeMode) -> f64 {
    match mode {
        AmplitudeMode::Euclidean => distance_m.hypot(height_m),
        AmplitudeMode::DepthOnly => distance_m,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetGeometry {
    pub amplitude_m: f64,
    pub width_m: f64,
    pub depth_m: f64,
    pub altitude_m: f64,
    /// Change in target depth relative to the previous target.
    pub ctd_m: f64,
}

impl TargetGeometry {
    pub fn new(amplitude_m: f64, width_m: f64, depth_m: f64, altitude_m: f64, ctd_m: f64) -> Result<Self> {
        let g = TargetGeometry { amplitude_m, width_m, depth_m, altitude_m, ctd_m };
        g.validate()?;
        Ok(g)
    }

    /// Geometry of a grid cell. Every trial starts from the cube, so the
    /// change in depth is measured from `ctd_reference_m`.
    pub fn from_grid(
        width_m: f64,
        distance_m: f64,
        height_m: f64,
        mode: AmplitudeMode,
        ctd_reference_m: f64,
    ) -> Result<Self> {
        Self::new(
            amplitude_from_grid(distance_m, height_m, mode),
            width_m,
            distance_m,
            height_m,
            (distance_m - ctd_reference_m).abs(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("amplitude", self.amplitude_m),
            ("width", self.width_m),
            ("depth", self.depth_m),
            ("altitude", self.altitude_m),
            ("ctd", self.ctd_m),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Domain(format!("{name} is not finite ({v})")));
        }
        if self.width_m <= 0.0 {
            return Err(Error::Domain(format!("width must be positive, got {}", self.width_m)));
        }
        if self.depth_m <= 0.0 {
            return Err(Error::Domain(format!("depth must be positive, got {}", self.depth_m)));
        }
        if self.amplitude_m < 0.0 || self.altitude_m < 0.0 || self.ctd_m < 0.0 {
            return Err(Error::Domain(
                "amplitude, altitude and ctd must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Shannon index of difficulty `log2(A/W + 1)` in bits.
pub fn id_shannon(amplitude_m: f64, width_m: f64) -> Result<f64> {
    if !amplitude_m.is_finite() || !width_m.is_finite() || width_m <= 0.0 || amplitude_m < 0.0 {
        return Err(Error::Domain(format!(
            "index of difficulty needs A >= 0 and W > 0 (A={amplitude_m}, W={width_m})"
        )));
    }
    Ok((amplitude_m / width_m + 1.0).log2())
}

pub fn predictors_standard(g: &TargetGeometry) -> Result<Vec<f64>> {
    Ok(vec![id_shannon(g.amplitude_m, g.width_m)?])
}

pub fn predictors_two_part(g: &TargetGeometry) -> Result<Vec<f64>> {
    if !(g.width_m > 0.0) || !(g.amplitude_m + g.width_m > 0.0) {
        return Err(Error::Domain(format!(
            "two-part model needs W > 0 and A + W > 0 (A={}, W={})",
            g.amplitude_m, g.width_m
        )));
    }
    Ok(vec![(g.amplitude_m + g.width_m).log2(), -g.width_m.log2()])
}

pub fn predictors_vergence(g: &TargetGeometry) -> Result<Vec<f64>> {
    if !g.ctd_m.is_finite() {
        return Err(Error::Domain("ctd is not finite".into()));
    }
    Ok(vec![id_shannon(g.amplitude_m, g.width_m)?, g.ctd_m])
}

pub fn predictors_proposed(g: &TargetGeometry) -> Result<Vec<f64>> {
    let reach = g.depth_m.max(g.altitude_m);
    if !(reach > 0.0) {
        return Err(Error::Domain("proposed model needs max(D, H) > 0".into()));
    }
    let id = id_shannon(g.amplitude_m, g.width_m)?;
    Ok(vec![id, -(g.width_m / reach + 1.0).log2()])
}

pub fn predictors(kind: ModelKind, g: &TargetGeometry) -> Result<Vec<f64>> {
    match kind {
        ModelKind::Standard => predictors_standard(g),
        ModelKind::TwoPart => predictors_two_part(g),
        ModelKind::Vergence => predictors_vergence(g),
        ModelKind::Proposed => predictors_proposed(g),
    }
}

/// One regression observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorRow {
    pub predictors: Vec<f64>,
    pub response_mt_s: f64,
}

impl PredictorRow {
    pub fn new(predictors: Vec<f64>, response_mt_s: f64) -> Result<Self> {
        if predictors.iter().chain([&response_mt_s]).any(|v| !v.is_finite()) {
            return Err(Error::Domain("predictor row contains a non-finite value".into()));
        }
        Ok(PredictorRow { predictors, response_mt_s })
    }
}

/// `coefficients = [intercept, slope₁, ...]`.
pub fn predict_mt(kind: ModelKind, coefficients: &[f64], g: &TargetGeometry) -> Result<f64> {
    let expected = kind.predictor_count() + 1;
    if coefficients.len() != expected {
        return Err(Error::LengthMismatch { expected, got: coefficients.len() });
    }
    let xs = predictors(kind, g)?;
    Ok(coefficients[0] + coefficients[1..].iter().zip(&xs).map(|(b, x)| b * x).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn geom(a: f64, w: f64, d: f64, h: f64, ctd: f64) -> TargetGeometry {
        TargetGeometry::new(a, w, d, h, ctd).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn shannon_id_examples() {
        assert_eq!(id_shannon(0.0, 0.2).unwrap(), 0.0);
        assert_eq!(id_shannon(3.0, 0.2).unwrap(), 4.0);
        assert!(close(id_shannon(9.0, 0.2).unwrap(), 5.5236, 5e-5));
        assert!(id_shannon(1.0, 0.0).is_err());
        assert!(id_shannon(-1.0, 1.0).is_err());
        assert!(id_shannon(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn standard_predictors() {
        let x = predictors_standard(&geom(3.0, 1.35, 3.0, 0.0, 0.0)).unwrap();
        // log2(3/1.35 + 1), evaluated independently
        assert!(close(x[0], 1.688056, 5e-6));
        assert_eq!(predictors_standard(&geom(0.0, 1.0, 3.0, 0.0, 0.0)).unwrap(), vec![0.0]);
        let a = amplitude_from_grid(9.0, 3.0, AmplitudeMode::Euclidean);
        let x = predictors_standard(&geom(a, 0.2, 9.0, 3.0, 0.0)).unwrap();
        assert!(close(x[0], 5.5980, 5e-5));
    }

    #[test]
    fn two_part_predictors() {
        assert_eq!(predictors_two_part(&geom(3.0, 1.0, 3.0, 0.0, 0.0)).unwrap(), vec![2.0, 0.0]);
        let x = predictors_two_part(&geom(9.0, 0.2, 9.0, 0.0, 0.0)).unwrap();
        assert!(close(x[0], 3.2016, 5e-5) && close(x[1], 2.3219, 5e-5));
        let x = predictors_two_part(&geom(3.0, 1.35, 3.0, 0.0, 0.0)).unwrap();
        assert!(close(x[0], 2.1210, 5e-5) && close(x[1], -0.4330, 5e-5));
    }

    #[test]
    fn vergence_predictors() {
        assert_eq!(predictors_vergence(&geom(3.0, 0.2, 3.0, 0.0, 0.0)).unwrap(), vec![4.0, 0.0]);
        let g = TargetGeometry::from_grid(0.2, 9.0, 0.0, AmplitudeMode::Euclidean, START_CUBE_DEPTH_M).unwrap();
        let x = predictors_vergence(&g).unwrap();
        assert!(close(x[0], 5.5236, 5e-5) && close(x[1], 8.41, 1e-12));
        let g = TargetGeometry::from_grid(1.35, 3.0, 0.0, AmplitudeMode::Euclidean, START_CUBE_DEPTH_M).unwrap();
        let x = predictors_vergence(&g).unwrap();
        assert!(close(x[0], 1.688056, 5e-6) && close(x[1], 2.41, 1e-12));
    }

    #[test]
    fn proposed_predictors() {
        let g = TargetGeometry::from_grid(0.2, 9.0, 3.0, AmplitudeMode::Euclidean, START_CUBE_DEPTH_M).unwrap();
        let x = predictors_proposed(&g).unwrap();
        assert!(close(x[0], 5.5980, 5e-5));
        assert!(close(x[1], -0.03171, 5e-6));
        let x = predictors_proposed(&geom(3.0, 1.35, 3.0, 3.0, 0.0)).unwrap();
        assert!(close(x[1], -0.5361, 5e-5));
        let x = predictors_proposed(&geom(3.0, 1e-12, 3.0, 3.0, 0.0)).unwrap();
        assert!(x[1].abs() < 1e-11);
    }

    #[test]
    fn geometry_domain_checks() {
        assert!(TargetGeometry::new(1.0, 0.0, 1.0, 0.0, 0.0).is_err());
        assert!(TargetGeometry::new(1.0, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(TargetGeometry::new(1.0, 1.0, 1.0, -1.0, 0.0).is_err());
        assert!(TargetGeometry::new(f64::INFINITY, 1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn predict_examples() {
        // ID = 4.0 at A=3, W=0.2
        let g = geom(3.0, 0.2, 3.0, 0.0, 2.41);
        let mt = predict_mt(ModelKind::Standard, &[-0.41, 0.83], &g).unwrap();
        assert!(close(mt, 2.91, 1e-12));
        assert_eq!(predict_mt(ModelKind::Standard, &[0.0, 0.0], &g).unwrap(), 0.0);
        // A=3, W=0.2, D=9: second predictor -log2(0.2/9 + 1) = -0.0317
        let g = geom(3.0, 0.2, 9.0, 3.0, 0.0);
        let mt = predict_mt(ModelKind::Proposed, &[-2.46, 1.21, 3.00], &g).unwrap();
        // 1.21*4 - 3.00*0.031709 - 2.46
        assert!(close(mt, 2.284873, 1e-6));
        assert_eq!(
            predict_mt(ModelKind::Proposed, &[1.0, 2.0], &g),
            Err(Error::LengthMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn amplitude_modes() {
        assert_eq!(amplitude_from_grid(3.0, 0.0, AmplitudeMode::Euclidean), 3.0);
        assert!(close(amplitude_from_grid(9.0, 3.0, AmplitudeMode::Euclidean), 9.48683, 5e-6));
        assert_eq!(amplitude_from_grid(9.0, 3.0, AmplitudeMode::DepthOnly), 9.0);
    }

    #[test]
    fn parse_names() {
        assert_eq!("two-part".parse::<ModelKind>().unwrap(), ModelKind::TwoPart);
        assert_eq!("Proposed".parse::<ModelKind>().unwrap(), ModelKind::Proposed);
        assert_eq!("depth".parse::<AmplitudeMode>().unwrap(), AmplitudeMode::DepthOnly);
        assert!("quadratic".parse::<ModelKind>().is_err());
    }

    proptest! {
        #[test]
        fn id_monotone(a in 0.0f64..50.0, da in 1e-3f64..10.0, w in 0.01f64..5.0, dw in 1e-3f64..5.0) {
            prop_assert!(id_shannon(a + da, w).unwrap() > id_shannon(a, w).unwrap());
            prop_assert!(id_shannon(a + 0.1, w + dw).unwrap() < id_shannon(a + 0.1, w).unwrap());
        }

        #[test]
        fn proposed_second_term_nonpositive(w in 1e-9f64..5.0, d in 0.01f64..20.0, h in 0.0f64..20.0, a in 0.0f64..20.0) {
            let x = predictors_proposed(&geom(a, w, d, h, 0.0)).unwrap();
            prop_assert!(x[1] <= 0.0);
        }

        #[test]
        fn planar_reduction(w in 0.01f64..2.0, extra in 0.0f64..20.0, a in 0.0f64..20.0) {
            let d = w + extra;
            let x = predictors_proposed(&geom(a, w, d, 0.0, 0.0)).unwrap();
            prop_assert_eq!(x[1], -(w / d + 1.0).log2());
        }

        #[test]
        fn shared_first_predictor(a in 0.0f64..20.0, w in 0.01f64..2.0, d in 0.1f64..10.0, h in 0.0f64..5.0, ctd in 0.0f64..10.0) {
            let g = geom(a, w, d, h, ctd);
            let s = predictors_standard(&g).unwrap()[0];
            prop_assert_eq!(s.to_bits(), predictors_vergence(&g).unwrap()[0].to_bits());
            prop_assert_eq!(s.to_bits(), predictors_proposed(&g).unwrap()[0].to_bits());
        }

        #[test]
        fn prediction_is_linear_in_coefficients(
            c in proptest::collection::vec(-5.0f64..5.0, 3),
            alpha in -3.0f64..3.0,
            a in 0.0f64..20.0, w in 0.05f64..2.0, d in 0.5f64..10.0, h in 0.0f64..5.0,
        ) {
            let g = geom(a, w, d, h, 0.0);
            let scaled: Vec<f64> = c.iter().map(|v| alpha * v).collect();
            let lhs = predict_mt(ModelKind::Proposed, &scaled, &g).unwrap();
            let rhs = alpha * predict_mt(ModelKind::Proposed, &c, &g).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }
    }
}
