//! Statistical generator for complete study logs with a known ground truth.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::latin::balanced_latin_square;
use super::vec3::Vec3;
use crate::error::{Error, Result};
use crate::models::{predict_mt, AmplitudeMode, ModelKind, TargetGeometry, START_CUBE_DEPTH_M};
use crate::trial::{Posture, Technique, Trial};

/// Mean selection times per technique in the reference experiment, in
/// `Technique::ALL` order.
pub const REFERENCE_TECHNIQUE_MEANS_S: [f64; 5] = [2.58, 2.41, 2.71, 2.61, 2.88];

pub const WIDTHS_M: [f64; 2] = [0.2, 1.35];
pub const DISTANCES_M: [f64; 2] = [3.0, 9.0];
pub const HEIGHTS_M: [f64; 2] = [0.0, 3.0];
pub const ANGLES_DEG: [f64; 3] = [-10.0, 0.0, 10.0];

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub model: ModelKind,
    /// Intercept first, in the stored predictor convention.
    pub coefficients: Vec<f64>,
    pub amplitude_mode: AmplitudeMode,
}

impl Default for GroundTruth {
    /// The proposed model with the reference all-conditions coefficients.
    /// The second slope is negative on the stored (negated) predictor; the
    /// opposite sign predicts negative times for wide, near targets.
    fn default() -> Self {
        GroundTruth {
            model: ModelKind::Proposed,
            coefficients: vec![-2.46, 1.21, -3.00],
            amplitude_mode: AmplitudeMode::Euclidean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// SD of the Gaussian added to each trial's movement time.
    pub mt_sd_s: f64,
    /// Endpoint scatter SD as a fraction of the target width.
    pub endpoint_sd_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Technique offsets from the reference means, noise at human scale.
    Realistic,
    /// No technique offsets and light noise: the log follows the ground
    /// truth closely.
    ModelExact,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "realistic" => Ok(Preset::Realistic),
            "model-exact" => Ok(Preset::ModelExact),
            _ => Err(Error::Config(format!("unknown preset '{s}' (expected realistic or model-exact)"))),
        }
    }
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Realistic => "realistic",
            Preset::ModelExact => "model-exact",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudySpec {
    pub ground_truth: GroundTruth,
    pub noise: NoiseSpec,
    pub participants: usize,
    pub seed: u64,
    /// Added to every movement time of a technique, `Technique::ALL` order.
    pub technique_offsets_s: [f64; 5],
    pub repetitions: usize,
    pub ctd_reference_m: f64,
    /// Movement-time draws at or below this are redrawn.
    pub min_mt_s: f64,
}

impl StudySpec {
    pub fn preset(preset: Preset, seed: u64, participants: usize) -> Self {
        let (noise, offsets) = match preset {
            Preset::Realistic => {
                let grand = REFERENCE_TECHNIQUE_MEANS_S.iter().sum::<f64>() / 5.0;
                (
                    NoiseSpec { mt_sd_s: 0.3, endpoint_sd_fraction: 0.28 },
                    REFERENCE_TECHNIQUE_MEANS_S.map(|m| m - grand),
                )
            }
            Preset::ModelExact => (NoiseSpec { mt_sd_s: 0.05, endpoint_sd_fraction: 0.2 }, [0.0; 5]),
        };
        StudySpec {
            ground_truth: GroundTruth::default(),
            noise,
            participants,
            seed,
            technique_offsets_s: offsets,
            repetitions: 5,
            ctd_reference_m: START_CUBE_DEPTH_M,
            min_mt_s: 0.05,
        }
    }

    pub fn geometry(&self, w: f64, d: f64, h: f64) -> Result<TargetGeometry> {
        TargetGeometry::from_grid(w, d, h, self.ground_truth.amplitude_mode, self.ctd_reference_m)
    }

    /// Ground-truth mean movement time of a cell, technique offset included.
    pub fn expected_mt(&self, technique: Technique, w: f64, d: f64, h: f64) -> Result<f64> {
        let g = self.geometry(w, d, h)?;
        Ok(predict_mt(self.ground_truth.model, &self.ground_truth.coefficients, &g)?
            + self.technique_offsets_s[technique.index()])
    }

    pub fn validate(&self) -> Result<()> {
        if self.participants == 0 || self.repetitions == 0 {
            return Err(Error::Config("participants and repetitions must be >= 1".into()));
        }
        let f = self.noise.endpoint_sd_fraction;
        if !(f > 0.0 && f <= 2.0) {
            return Err(Error::Config(format!("endpoint_sd_fraction must be in (0, 2], got {f}")));
        }
        if !(self.noise.mt_sd_s >= 0.0) || !self.noise.mt_sd_s.is_finite() {
            return Err(Error::Config(format!("mt_sd_s must be >= 0, got {}", self.noise.mt_sd_s)));
        }
        if self.technique_offsets_s.iter().any(|o| !o.is_finite()) {
            return Err(Error::Config("technique offsets must be finite".into()));
        }
        for t in Technique::ALL {
            for w in WIDTHS_M {
                for d in DISTANCES_M {
                    for h in HEIGHTS_M {
                        let mt = self.expected_mt(t, w, d, h).map_err(|e| Error::Config(e.to_string()))?;
                        if !(mt > self.min_mt_s) {
                            return Err(Error::Config(format!(
                                "ground truth predicts {mt:.3} s for {} W={w} D={d} H={h}; movement times must be positive",
                                t.code()
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

const MAX_DRAWS: usize = 10_000;

/// Generates `participants × 400` trials. Technique × posture blocks follow
/// rows of a balanced 10 × 10 Latin square; targets within a block are
/// shuffled. Each participant draws from its own stream of the seed, so a
/// participant's trials do not depend on how many others are generated.
pub fn generate_study(spec: &StudySpec) -> Result<Vec<Trial>> {
    spec.validate()?;
    let square = balanced_latin_square(Technique::ALL.len() * Posture::ALL.len())?;
    let mt_noise = Normal::new(0.0, spec.noise.mt_sd_s).map_err(|e| Error::Config(e.to_string()))?;
    let mut out = Vec::with_capacity(spec.participants * 400);

    for p in 0..spec.participants {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(p as u64);
        let pid = format!("P{:02}", p + 1);
        let mut trial_index = 0u32;
        for (block, &combo) in square[p % square.len()].iter().enumerate() {
            let technique = Technique::ALL[combo / 2];
            let posture = Posture::ALL[combo % 2];
            let mut targets = Vec::new();
            for w in WIDTHS_M {
                for d in DISTANCES_M {
                    for h in HEIGHTS_M {
                        targets.extend(std::iter::repeat_n((w, d, h), spec.repetitions));
                    }
                }
            }
            targets.shuffle(&mut rng);
            for (w, d, h) in targets {
                let angle_deg = *ANGLES_DEG.choose(&mut rng).expect("non-empty");
                let mean = spec.expected_mt(technique, w, d, h)?;
                let movement_time_s = draw(MAX_DRAWS, || {
                    let v = mean + mt_noise.sample(&mut rng);
                    (v > spec.min_mt_s).then_some(v)
                })?;

                let scatter = Normal::new(0.0, spec.noise.endpoint_sd_fraction * w)
                    .map_err(|e| Error::Config(e.to_string()))?;
                let mut error_attempts = 0u32;
                let deviation = draw(MAX_DRAWS, || {
                    let dev = scatter.sample(&mut rng).abs();
                    if dev <= w / 2.0 {
                        Some(dev)
                    } else {
                        error_attempts += 1;
                        None
                    }
                })?;
                let phi = rng.random_range(0.0..std::f64::consts::TAU);
                let a = angle_deg.to_radians();
                let center = Vec3::new(d * a.sin(), h, d * a.cos());
                let selection = center + Vec3::new(phi.cos(), 0.0, phi.sin()) * deviation;

                out.push(Trial {
                    participant_id: pid.clone(),
                    technique,
                    posture,
                    block: block as u32,
                    trial_index,
                    width_m: w,
                    distance_m: d,
                    height_m: h,
                    angle_deg,
                    movement_time_s,
                    endpoint_deviation_m: deviation,
                    error_attempts,
                    success: true,
                    realized_amplitude_m: Some(selection.norm()),
                });
                trial_index += 1;
            }
        }
    }
    Ok(out)
}

fn draw(limit: usize, mut f: impl FnMut() -> Option<f64>) -> Result<f64> {
    (0..limit)
        .find_map(|_| f())
        .ok_or_else(|| Error::Convergence(format!("no acceptable draw in {limit} attempts")))
}
