//! JSON run configuration and its resolution into an [`ExperimentSpec`].

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ExperimentKind, HarnessError};
use crate::channel::ChannelModel;
use crate::estimator::Weighting;
use crate::geometry::{misalignment_angles, RxPose, Scenario, UcaGeometry};

/// SNR used when the config does not set one, in dB relative to the mean
/// received signal power.
///
/// Calibrated so that a single-tone, six-antenna, two-mode sweep over the
/// default pose grid lands at an elevation MAE near 0.8° and an azimuth MAE
/// near 1.6°.
pub const DEFAULT_SNR_DB: f64 = 32.0;
pub const DEFAULT_TRIALS: usize = 50;
pub const DEFAULT_SEED: u64 = 1;
/// Subcarrier counts visited by the subcarrier sweep.
pub const DEFAULT_P_VALUES: [usize; 7] = [1, 2, 4, 8, 16, 32, 64];
/// Antenna counts visited by the antenna sweep.
pub const DEFAULT_Q_VALUES: [usize; 10] = [3, 4, 5, 6, 7, 8, 9, 10, 11, 12];
/// Rotation angles (degrees) whose Y × X product, minus the aligned pose,
/// forms the default pose grid.
pub const DEFAULT_ROTATION_STEPS_DEG: [f64; 4] = [0.0, 20.0, 40.0, 60.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayConfig {
    pub n: usize,
    pub radius_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubcarrierConfig {
    pub start_hz: f64,
    pub step_hz: f64,
    pub count: usize,
}

impl SubcarrierConfig {
    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.count)
            .map(|i| self.start_hz + i as f64 * self.step_hz)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub tx: ArrayConfig,
    pub rx: ArrayConfig,
    pub distance_m: f64,
    pub carrier_hz: f64,
    /// A single tone at the carrier when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcarriers: Option<SubcarrierConfig>,
}

/// A receiver orientation, either as the Y-then-X tilt applied to the
/// aligned receiver or directly as misalignment angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PoseConfig {
    Rotation { rot_y_deg: f64, rot_x_deg: f64 },
    Angles { theta_deg: f64, phi_deg: f64 },
}

impl PoseConfig {
    pub fn to_pose(&self, distance: f64) -> crate::Result<RxPose> {
        match *self {
            PoseConfig::Rotation { rot_y_deg, rot_x_deg } => {
                RxPose::from_rotation_yx(distance, rot_y_deg.to_radians(), rot_x_deg.to_radians())
            }
            PoseConfig::Angles { theta_deg, phi_deg } => {
                RxPose::from_angles(distance, theta_deg.to_radians(), phi_deg.to_radians())
            }
        }
    }
}

/// One step for all three search axes, or one per axis (θ, φ, γ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridStep {
    Uniform(f64),
    PerAxis([f64; 3]),
}

impl GridStep {
    pub fn degrees(&self) -> [f64; 3] {
        match *self {
            GridStep::Uniform(g) => [g; 3],
            GridStep::PerAxis(g) => g,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimationSection {
    /// Picked from the aligned-case Bessel gains when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<i32>>,
    #[serde(default = "default_q")]
    pub q: usize,
    #[serde(default = "default_p")]
    pub p: usize,
    #[serde(default = "default_weighting")]
    pub weighting: Weighting,
    #[serde(default = "default_grid")]
    pub grid_deg: GridStep,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

fn default_q() -> usize {
    6
}
fn default_p() -> usize {
    1
}
fn default_weighting() -> Weighting {
    Weighting::Amplitude
}
fn default_grid() -> GridStep {
    GridStep::Uniform(3.0)
}
fn default_tol() -> f64 {
    1e-10
}
fn default_max_iterations() -> usize {
    200
}

impl Default for EstimationSection {
    fn default() -> Self {
        Self {
            modes: None,
            q: default_q(),
            p: default_p(),
            weighting: default_weighting(),
            grid_deg: default_grid(),
            tol: default_tol(),
            max_iterations: default_max_iterations(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    /// `null` disables noise.
    #[serde(default = "default_snr")]
    pub snr_db: Option<f64>,
}

fn default_snr() -> Option<f64> {
    Some(DEFAULT_SNR_DB)
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self { snr_db: default_snr() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "default_p_values")]
    pub p_values: Vec<usize>,
    #[serde(default = "default_q_values")]
    pub q_values: Vec<usize>,
}

fn default_p_values() -> Vec<usize> {
    DEFAULT_P_VALUES.to_vec()
}
fn default_q_values() -> Vec<usize> {
    DEFAULT_Q_VALUES.to_vec()
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            p_values: default_p_values(),
            q_values: default_q_values(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImiSection {
    #[serde(default = "default_imi_modes")]
    pub modes: Vec<i32>,
    /// Elevation tilt of the misaligned receiver, applied about the Y axis.
    #[serde(default = "default_tilt")]
    pub tilt_deg: f64,
}

fn default_imi_modes() -> Vec<i32> {
    vec![-2, -1, 0, 1, 2]
}
fn default_tilt() -> f64 {
    10.0
}

impl Default for ImiSection {
    fn default() -> Self {
        Self {
            modes: default_imi_modes(),
            tilt_deg: default_tilt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationSection {
    /// Receive rings to compare; the scenario's receiver when empty.
    #[serde(default)]
    pub rings: Vec<ArrayConfig>,
    #[serde(default = "default_imi_modes")]
    pub modes: Vec<i32>,
    #[serde(default = "default_validation_poses")]
    pub poses: Vec<PoseConfig>,
}

fn default_validation_poses() -> Vec<PoseConfig> {
    vec![
        PoseConfig::Angles {
            theta_deg: 0.0,
            phi_deg: 0.0,
        },
        PoseConfig::Angles {
            theta_deg: 17.9,
            phi_deg: -34.2,
        },
    ]
}

impl Default for ValidationSection {
    fn default() -> Self {
        Self {
            rings: Vec::new(),
            modes: default_imi_modes(),
            poses: default_validation_poses(),
        }
    }
}

/// Contents of a run configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioConfig,
    /// The default rotation grid when empty.
    #[serde(default)]
    pub poses: Vec<PoseConfig>,
    #[serde(default)]
    pub estimation: EstimationSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub imi: ImiSection,
    #[serde(default)]
    pub validation: ValidationSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ChannelModel>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(format!("malformed config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// The default pose grid: every Y × X rotation pair from
/// [`DEFAULT_ROTATION_STEPS_DEG`] except the aligned one.
pub fn default_poses() -> Vec<PoseConfig> {
    let mut out = Vec::new();
    for &rot_y_deg in &DEFAULT_ROTATION_STEPS_DEG {
        for &rot_x_deg in &DEFAULT_ROTATION_STEPS_DEG {
            if rot_y_deg != 0.0 || rot_x_deg != 0.0 {
                out.push(PoseConfig::Rotation { rot_y_deg, rot_x_deg });
            }
        }
    }
    out
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    /// Non-finite values disable noise.
    pub snr_db: Option<f64>,
    pub model: Option<ChannelModel>,
}

/// A fully resolved, validated experiment description. Its JSON form is
/// what the run hash covers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub scenario: ScenarioConfig,
    pub poses: Vec<PoseConfig>,
    pub estimation: EstimationSection,
    pub snr_db: Option<f64>,
    pub sweep: SweepSection,
    pub imi: ImiSection,
    pub validation: ValidationSection,
    pub trials: usize,
    pub seed: u64,
    pub model: ChannelModel,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, config: Config, overrides: &Overrides) -> Result<Self, HarnessError> {
        let snr_db = match overrides.snr_db {
            Some(v) if v.is_finite() => Some(v),
            Some(_) => None,
            None => config.noise.snr_db,
        };
        let spec = Self {
            kind,
            poses: if config.poses.is_empty() {
                default_poses()
            } else {
                config.poses
            },
            scenario: config.scenario,
            estimation: config.estimation,
            snr_db,
            sweep: config.sweep,
            imi: config.imi,
            validation: config.validation,
            trials: overrides.trials.or(config.trials).unwrap_or(DEFAULT_TRIALS),
            seed: overrides.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
            model: overrides.model.or(config.model).unwrap_or(ChannelModel::Exact),
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.poses.is_empty() {
            return bad("pose grid is empty".into());
        }
        if let Some(snr) = self.snr_db {
            if !snr.is_finite() {
                return bad("snr_db must be finite or null".into());
            }
        }
        let scenario = self.base_scenario()?;
        for pose in &self.poses {
            pose.to_pose(self.scenario.distance_m)
                .map_err(|e| HarnessError::Config(format!("pose {pose:?}: {e}")))?;
        }
        let est = &self.estimation;
        let n_rx = scenario.rx.n_elements();
        let n_sub = scenario.subcarriers_hz.len();
        if let Some(modes) = &est.modes {
            if modes.len() < 2 {
                return bad("estimation needs at least two modes".into());
            }
            let limit = scenario.rx.max_decodable_mode();
            if let Some(l) = modes.iter().find(|l| l.abs() > limit) {
                return bad(format!("mode {l} aliases on a {n_rx}-element receiver"));
            }
        }
        if est.grid_deg.degrees().iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return bad("grid_deg must be positive".into());
        }
        if !(est.tol.is_finite() && est.tol > 0.0) || est.max_iterations == 0 {
            return bad("tol and max_iterations must be positive".into());
        }
        let check_q = |q: usize| {
            if q < 3 || q > n_rx {
                bad(format!("q = {q} is outside 3..={n_rx}"))
            } else {
                Ok(())
            }
        };
        let check_p = |p: usize| {
            if p == 0 || p > n_sub {
                bad(format!("p = {p} is outside 1..={n_sub} subcarriers"))
            } else {
                Ok(())
            }
        };
        match self.kind {
            ExperimentKind::AngleSweep | ExperimentKind::Ccdf => {
                check_q(est.q)?;
                check_p(est.p)?;
            }
            ExperimentKind::SubcarrierSweep => {
                check_q(est.q)?;
                if self.sweep.p_values.is_empty() {
                    return bad("sweep.p_values is empty".into());
                }
                self.sweep.p_values.iter().try_for_each(|&p| check_p(p))?;
            }
            ExperimentKind::AntennaSweep => {
                check_p(est.p)?;
                if self.sweep.q_values.is_empty() {
                    return bad("sweep.q_values is empty".into());
                }
                self.sweep.q_values.iter().try_for_each(|&q| check_q(q))?;
            }
            ExperimentKind::ImiDemo => {
                let limit = scenario.rx.max_decodable_mode();
                if self.imi.modes.is_empty() || self.imi.modes.iter().any(|l| l.abs() > limit) {
                    return bad(format!("imi.modes must be nonempty with |l| <= {limit}"));
                }
                if !(self.imi.tilt_deg.is_finite() && self.imi.tilt_deg.abs() < 90.0) {
                    return bad("imi.tilt_deg must lie in (-90, 90)".into());
                }
            }
            ExperimentKind::ValidateModel => {
                if self.validation.modes.is_empty() || self.validation.poses.is_empty() {
                    return bad("validation needs modes and poses".into());
                }
                for ring in &self.validation.rings {
                    UcaGeometry::new(ring.n, ring.radius_m)
                        .map_err(|e| HarnessError::Config(format!("validation ring: {e}")))?;
                }
                for pose in &self.validation.poses {
                    pose.to_pose(self.scenario.distance_m)
                        .map_err(|e| HarnessError::Config(format!("validation pose {pose:?}: {e}")))?;
                }
            }
        }
        Ok(())
    }

    /// The configured link with an aligned receiver.
    pub fn base_scenario(&self) -> Result<Scenario, HarnessError> {
        let s = &self.scenario;
        let wrap = |e: crate::Error| HarnessError::Config(e.to_string());
        let tx = UcaGeometry::new(s.tx.n, s.tx.radius_m).map_err(wrap)?;
        let rx = UcaGeometry::new(s.rx.n, s.rx.radius_m).map_err(wrap)?;
        let pose = RxPose::aligned(s.distance_m).map_err(wrap)?;
        let tones = match &s.subcarriers {
            Some(sc) => {
                if sc.count == 0 {
                    return Err(HarnessError::Config("subcarriers.count must be positive".into()));
                }
                sc.frequencies()
            }
            None => vec![s.carrier_hz],
        };
        Scenario::new(tx, rx, pose, s.carrier_hz, tones, Complex64::new(1.0, 0.0)).map_err(wrap)
    }

    /// Receiver poses of the grid with their true (θ, φ) in degrees.
    pub fn pose_truths(&self) -> Result<Vec<(RxPose, f64, f64)>, HarnessError> {
        self.poses
            .iter()
            .map(|p| {
                let pose = p
                    .to_pose(self.scenario.distance_m)
                    .map_err(|e| HarnessError::Config(e.to_string()))?;
                let a = misalignment_angles(&pose);
                Ok((pose, a.theta.to_degrees(), a.phi.to_degrees()))
            })
            .collect()
    }
}
