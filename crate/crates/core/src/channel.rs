//! Received-signal models.
//!
//! Two routes produce the per-antenna samples for a transmitted OAM mode:
//! [`exact_received_signal`] sums spherical waves from every transmit element
//! using exact distances, and [`farfield_received_signal`] evaluates the
//! closed-form Bessel model that the estimator is built on. The exact route is
//! the reference and stays valid in the near field.

use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

pub use crate::bessel::bessel_j;
use crate::error::{Error, Result};
use crate::geometry::{self, element_positions_rx, element_positions_tx, norm, sub, Scenario, UcaGeometry};

/// Minimum Tx–Rx element separation accepted by the exact model, in meters.
pub const MIN_ELEMENT_DISTANCE: f64 = 1e-9;
/// The far-field model is refused below this multiple of the largest radius.
pub const FARFIELD_HARD_RATIO: f64 = 10.0;
/// Between the hard ratio and this one the far-field model is flagged marginal.
pub const FARFIELD_WARN_RATIO: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelModel {
    Exact,
    #[serde(rename = "farfield")]
    FarField,
}

impl FromStr for ChannelModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(ChannelModel::Exact),
            "farfield" | "far-field" => Ok(ChannelModel::FarField),
            other => Err(Error::InvalidArgument(format!("unknown channel model `{other}`"))),
        }
    }
}

/// How far a link is inside the far-field regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FarFieldRegime {
    /// r ≥ 100 × aperture radius.
    Valid,
    /// 10× < r < 100×: usable, but approximation errors become visible.
    Marginal,
    /// r ≤ 10×: the model is not applicable.
    Violated,
}

pub fn farfield_regime(distance: f64, tx: &UcaGeometry, rx: &UcaGeometry) -> FarFieldRegime {
    let aperture = tx.radius().max(rx.radius());
    if distance <= FARFIELD_HARD_RATIO * aperture {
        FarFieldRegime::Violated
    } else if distance < FARFIELD_WARN_RATIO * aperture {
        FarFieldRegime::Marginal
    } else {
        FarFieldRegime::Valid
    }
}

/// Per-antenna samples s_m for transmitted mode `mode` at wavenumber `k`,
/// by exact point-source summation over all transmit elements.
pub fn exact_received_signal(scenario: &Scenario, mode: i32, k: f64) -> Result<Vec<Complex64>> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidArgument(format!("wavenumber must be positive, got {k}")));
    }
    let tx_pos = element_positions_tx(&scenario.tx);
    let rx_pos = element_positions_rx(&scenario.rx, &scenario.pose);
    let weights: Vec<Complex64> = scenario
        .tx
        .azimuths()
        .into_iter()
        .map(|a| Complex64::from_polar(1.0, mode as f64 * a))
        .collect();
    let scale = scenario.alpha / k;

    rx_pos
        .iter()
        .map(|&p_rx| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (p_tx, w) in tx_pos.iter().zip(&weights) {
                let d = norm(sub(p_rx, *p_tx));
                if d < MIN_ELEMENT_DISTANCE {
                    return Err(Error::GeometryOverlap { distance: d });
                }
                acc += w * Complex64::from_polar(1.0 / d, -k * d);
            }
            Ok(scale * acc)
        })
        .collect()
}

/// Antenna-dependent phase δ_m = atan2(sin(φ−φ_m), cos θ cos(φ−φ_m)).
pub fn delta(theta: f64, phi: f64, phi_m: f64) -> f64 {
    let d = phi - phi_m;
    d.sin().atan2(theta.cos() * d.cos())
}

/// Projected radius factor ρ_m = √(cos²θ cos²(φ−φ_m) + sin²(φ−φ_m)).
pub fn rho(theta: f64, phi: f64, phi_m: f64) -> f64 {
    let d = phi - phi_m;
    let c = theta.cos() * d.cos();
    let s = d.sin();
    (c * c + s * s).sqrt()
}

/// Misalignment parameters of the far-field model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarFieldParams {
    pub theta: f64,
    pub phi: f64,
    pub gamma: f64,
    pub distance: f64,
}

impl FarFieldParams {
    /// True parameters of a scenario's pose, with γ from the pose rotation.
    pub fn from_scenario(scenario: &Scenario) -> Self {
        let a = geometry::misalignment_angles(&scenario.pose);
        Self {
            theta: a.theta,
            phi: a.phi,
            gamma: geometry::gamma(&scenario.pose).gamma,
            distance: scenario.pose.distance(),
        }
    }
}

/// Far-field sample at receive antenna `m` for mode `mode`:
///
/// (α/k) · e^{-ikr}/r · e^{ik a_r sinθ cos(φ−φ_m)} · N_t · e^{il(δ_m+γ)} · J_l(k a_r a_t ρ_m / r)
#[allow(clippy::too_many_arguments)]
pub fn farfield_received_signal(
    m: usize,
    mode: i32,
    k: f64,
    params: &FarFieldParams,
    tx: &UcaGeometry,
    rx: &UcaGeometry,
    alpha: Complex64,
) -> Result<Complex64> {
    let FarFieldParams {
        theta,
        phi,
        gamma,
        distance: r,
    } = *params;
    if farfield_regime(r, tx, rx) == FarFieldRegime::Violated {
        return Err(Error::FarFieldViolation {
            distance: r,
            aperture: tx.radius().max(rx.radius()),
        });
    }
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(Error::InvalidArgument(format!(
            "elevation must lie in [0, π/2), got {theta}"
        )));
    }
    let phi_m = rx.azimuth(m);
    let a_r = rx.radius();
    let a_t = tx.radius();
    let common = Complex64::from_polar(1.0 / r, -k * r)
        * Complex64::from_polar(1.0, k * a_r * theta.sin() * (phi - phi_m).cos());
    let bessel = bessel_j(mode, k * a_r * a_t * rho(theta, phi, phi_m) / r);
    let helical = Complex64::from_polar(1.0, mode as f64 * (delta(theta, phi, phi_m) + gamma));
    Ok(alpha / k * common * tx.n_elements() as f64 * helical * bessel)
}

/// Far-field samples for every receive antenna of a scenario.
pub fn farfield_antenna_vector(scenario: &Scenario, mode: i32, k: f64) -> Result<Vec<Complex64>> {
    let params = FarFieldParams::from_scenario(scenario);
    (0..scenario.rx.n_elements())
        .map(|m| farfield_received_signal(m, mode, k, &params, &scenario.tx, &scenario.rx, scenario.alpha))
        .collect()
}

/// Samples of the chosen model for every receive antenna.
pub fn received_signal(scenario: &Scenario, mode: i32, k: f64, model: ChannelModel) -> Result<Vec<Complex64>> {
    match model {
        ChannelModel::Exact => exact_received_signal(scenario, mode, k),
        ChannelModel::FarField => farfield_antenna_vector(scenario, mode, k),
    }
}

/// Normalized inner product |⟨a, b⟩| / (‖a‖ ‖b‖).
pub fn complex_correlation(a: &[Complex64], b: &[Complex64]) -> f64 {
    let inner: Complex64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    inner.norm() / (na * nb)
}

/// Complex samples y[antenna][mode][subcarrier] of one few-shot measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTensor {
    antennas: Vec<usize>,
    modes: Vec<i32>,
    subcarriers: Vec<usize>,
    frequencies: Vec<f64>,
    values: Vec<Complex64>,
}

impl SampleTensor {
    /// `values` is laid out antenna-major, then mode, then subcarrier.
    /// `subcarriers` are indices into the scenario grid and `frequencies`
    /// their values in Hz.
    pub fn new(
        antennas: Vec<usize>,
        modes: Vec<i32>,
        subcarriers: Vec<usize>,
        frequencies: Vec<f64>,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if subcarriers.len() != frequencies.len() {
            return Err(Error::InvalidArgument(
                "subcarrier indices and frequencies differ in length".into(),
            ));
        }
        if values.len() != antennas.len() * modes.len() * subcarriers.len() {
            return Err(Error::InvalidArgument("tensor is not dense over its index sets".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("tensor holds non-finite samples".into()));
        }
        if has_duplicates(&modes) {
            return Err(Error::InvalidArgument("mode list has duplicates".into()));
        }
        if has_duplicates(&antennas) || has_duplicates(&subcarriers) {
            return Err(Error::InvalidArgument(
                "antenna or subcarrier list has duplicates".into(),
            ));
        }
        Ok(Self {
            antennas,
            modes,
            subcarriers,
            frequencies,
            values,
        })
    }

    pub fn antennas(&self) -> &[usize] {
        &self.antennas
    }

    pub fn modes(&self) -> &[i32] {
        &self.modes
    }

    pub fn subcarriers(&self) -> &[usize] {
        &self.subcarriers
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn offset(&self, a: usize, l: usize, k: usize) -> usize {
        (a * self.modes.len() + l) * self.subcarriers.len() + k
    }

    /// Sample for antenna id, mode and subcarrier index, if present.
    pub fn get(&self, antenna: usize, mode: i32, subcarrier: usize) -> Option<Complex64> {
        let a = self.antennas.iter().position(|&x| x == antenna)?;
        let l = self.modes.iter().position(|&x| x == mode)?;
        let k = self.subcarriers.iter().position(|&x| x == subcarrier)?;
        Some(self.values[self.offset(a, l, k)])
    }

    /// Samples of one (antenna, mode) across all subcarriers, in tensor order.
    pub fn series(&self, antenna: usize, mode: i32) -> Option<&[Complex64]> {
        let a = self.antennas.iter().position(|&x| x == antenna)?;
        let l = self.modes.iter().position(|&x| x == mode)?;
        let start = self.offset(a, l, 0);
        Some(&self.values[start..start + self.subcarriers.len()])
    }

    /// Multiplies every sample by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    pub fn mean_power(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len().max(1) as f64
    }
}

fn has_duplicates<T: Ord + Copy>(items: &[T]) -> bool {
    let mut v = items.to_vec();
    v.sort_unstable();
    v.windows(2).any(|w| w[0] == w[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseLevel {
    /// Per-sample complex noise variance σ².
    Variance(f64),
    /// σ² set from the mean signal power of the noiseless tensor.
    SnrDb(f64),
}

/// Additive circularly-symmetric complex Gaussian noise, seeded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub level: NoiseLevel,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        Self {
            level: NoiseLevel::Variance(0.0),
            seed: 0,
        }
    }

    pub fn snr_db(snr_db: f64, seed: u64) -> Self {
        Self {
            level: NoiseLevel::SnrDb(snr_db),
            seed,
        }
    }

    pub fn variance(variance: f64, seed: u64) -> Self {
        Self {
            level: NoiseLevel::Variance(variance),
            seed,
        }
    }

    /// σ² for a tensor whose noiseless mean power is `signal_power`.
    pub fn variance_for(&self, signal_power: f64) -> Result<f64> {
        let v = match self.level {
            NoiseLevel::Variance(v) => v,
            NoiseLevel::SnrDb(db) => signal_power / 10f64.powf(db / 10.0),
        };
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::InvalidArgument(format!("noise variance must be >= 0, got {v}")));
        }
        Ok(v)
    }
}

/// Which antennas, modes and subcarriers a measurement covers.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPlan {
    pub modes: Vec<i32>,
    /// Indices into the scenario's subcarrier grid.
    pub subcarriers: Vec<usize>,
    /// Receive antenna ids; `None` measures every antenna.
    pub antennas: Option<Vec<usize>>,
}

/// Fills y = s + n for every planned (antenna, mode, subcarrier).
///
/// Noise is drawn from a generator created for this call from `noise.seed`,
/// in antenna, mode, subcarrier order.
pub fn simulate_measurement(
    scenario: &Scenario,
    plan: &MeasurementPlan,
    noise: &NoiseSpec,
    model: ChannelModel,
) -> Result<SampleTensor> {
    if plan.modes.is_empty() || plan.subcarriers.is_empty() {
        return Err(Error::InvalidArgument("measurement needs modes and subcarriers".into()));
    }
    if has_duplicates(&plan.modes) {
        return Err(Error::InvalidArgument("modes must be distinct".into()));
    }
    let n_rx = scenario.rx.n_elements();
    let antennas: Vec<usize> = plan.antennas.clone().unwrap_or_else(|| (0..n_rx).collect());
    if let Some(&bad) = antennas.iter().find(|&&a| a >= n_rx) {
        return Err(Error::InvalidArgument(format!(
            "antenna {bad} outside a {n_rx}-element ring"
        )));
    }
    let frequencies = plan
        .subcarriers
        .iter()
        .map(|&i| {
            scenario
                .subcarriers_hz
                .get(i)
                .copied()
                .ok_or_else(|| Error::InvalidArgument(format!("subcarrier index {i} outside the scenario grid")))
        })
        .collect::<Result<Vec<f64>>>()?;

    // field[l][k] = samples over all antennas
    let mut field = Vec::with_capacity(plan.modes.len());
    for &l in &plan.modes {
        let per_k = frequencies
            .iter()
            .map(|&f| received_signal(scenario, l, crate::wavenumber(f), model))
            .collect::<Result<Vec<_>>>()?;
        field.push(per_k);
    }

    let mut values = Vec::with_capacity(antennas.len() * plan.modes.len() * frequencies.len());
    for &a in &antennas {
        for per_mode in &field {
            for per_k in per_mode {
                values.push(per_k[a]);
            }
        }
    }

    let signal_power = values.iter().map(|v| v.norm_sqr()).sum::<f64>() / values.len() as f64;
    let variance = noise.variance_for(signal_power)?;
    if variance > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
        let normal = Normal::new(0.0, (variance / 2.0).sqrt()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        for v in values.iter_mut() {
            let re = normal.sample(&mut rng);
            let im = normal.sample(&mut rng);
            *v += Complex64::new(re, im);
        }
    }

    SampleTensor::new(
        antennas,
        plan.modes.clone(),
        plan.subcarriers.clone(),
        frequencies,
        values,
    )
}
