//! Receive phase correction, mode decoding and interference metrics.
//!
//! Helicity convention: the receiver faces the transmitter, so its local
//! azimuth runs opposite to the transmitter's. A transmitted mode `l` reaches
//! an aligned receiver as e^{-ilφ_m}. [`decode_modes`] works in the receiver's
//! own azimuth; [`decode_transmitted_modes`] and the IMI matrix label decode
//! slots by the transmitted mode they match.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::channel::{received_signal, ChannelModel, SampleTensor};
use crate::error::{Error, Result};
use crate::geometry::{Scenario, UcaGeometry};
use crate::phase::wrap_pi;

/// Ceiling applied to SIR values (and diagonal dominance) in dB.
pub const SIR_CAP_DB: f64 = 200.0;

/// Per-element receive phases that undo the tilt-induced path differences.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMask {
    pub phases: Vec<f64>,
    pub theta: f64,
    pub phi: f64,
    pub wavenumber: f64,
}

/// P_m = −k sinθ (x_m cosφ + y_m sinφ) at each element's local (x_m, y_m),
/// wrapped to (−π, π].
pub fn phase_mask(theta: f64, phi: f64, k: f64, rx: &UcaGeometry) -> PhaseMask {
    let phases = raw_mask(theta, phi, k, rx).into_iter().map(wrap_pi).collect();
    PhaseMask {
        phases,
        theta,
        phi,
        wavenumber: k,
    }
}

fn raw_mask(theta: f64, phi: f64, k: f64, rx: &UcaGeometry) -> Vec<f64> {
    let a = rx.radius();
    let (s_phi, c_phi) = phi.sin_cos();
    rx.azimuths()
        .into_iter()
        .map(|p| -k * theta.sin() * (a * p.cos() * c_phi + a * p.sin() * s_phi))
        .collect()
}

fn check_decodable(modes: &[i32], rx: &UcaGeometry) -> Result<()> {
    let limit = rx.max_decodable_mode();
    match modes.iter().find(|l| l.abs() > limit) {
        Some(&mode) => Err(Error::AliasedMode {
            mode,
            elements: rx.n_elements(),
            limit,
        }),
        None => Ok(()),
    }
}

/// D_l′ = (1/N_r) Σ_m y_m e^{iP_m} e^{−il′φ_m}, in the receiver's azimuth.
pub fn decode_modes(
    samples: &[Complex64],
    mask: Option<&PhaseMask>,
    modes: &[i32],
    rx: &UcaGeometry,
) -> Result<Vec<Complex64>> {
    if samples.len() != rx.n_elements() {
        return Err(Error::InvalidArgument(format!(
            "{} samples for a {}-element ring",
            samples.len(),
            rx.n_elements()
        )));
    }
    if let Some(m) = mask {
        if m.phases.len() != samples.len() {
            return Err(Error::InvalidArgument("mask length differs from ring size".into()));
        }
    }
    check_decodable(modes, rx)?;
    let corrected: Vec<Complex64> = match mask {
        Some(m) => samples
            .iter()
            .zip(&m.phases)
            .map(|(y, p)| y * Complex64::from_polar(1.0, *p))
            .collect(),
        None => samples.to_vec(),
    };
    let azimuths = rx.azimuths();
    let n = rx.n_elements() as f64;
    Ok(modes
        .iter()
        .map(|&l| {
            corrected
                .iter()
                .zip(&azimuths)
                .map(|(y, a)| y * Complex64::from_polar(1.0, -(l as f64) * a))
                .sum::<Complex64>()
                / n
        })
        .collect())
}

/// Decodes with the conjugate pattern of each transmitted mode `l`, which is
/// the receiver-azimuth slot `-l`.
pub fn decode_transmitted_modes(
    samples: &[Complex64],
    mask: Option<&PhaseMask>,
    modes: &[i32],
    rx: &UcaGeometry,
) -> Result<Vec<Complex64>> {
    let mirrored: Vec<i32> = modes.iter().map(|l| -l).collect();
    decode_modes(samples, mask, &mirrored, rx)
}

/// Decoded power, `power[row][col]` for decoded mode `decoded_modes[row]` when
/// transmitting `transmitted_modes[col]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImiMatrix {
    pub decoded_modes: Vec<i32>,
    pub transmitted_modes: Vec<i32>,
    pub power: Vec<Vec<f64>>,
}

impl ImiMatrix {
    pub fn new(decoded_modes: Vec<i32>, transmitted_modes: Vec<i32>, power: Vec<Vec<f64>>) -> Result<Self> {
        if power.len() != decoded_modes.len() || power.iter().any(|r| r.len() != transmitted_modes.len()) {
            return Err(Error::InvalidArgument("IMI shape does not match its mode lists".into()));
        }
        if power.iter().flatten().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidArgument("IMI entries must be finite and >= 0".into()));
        }
        Ok(Self {
            decoded_modes,
            transmitted_modes,
            power,
        })
    }

    /// Power decoded in slot `decoded` when transmitting `transmitted`.
    pub fn get(&self, decoded: i32, transmitted: i32) -> Option<f64> {
        let r = self.decoded_modes.iter().position(|&l| l == decoded)?;
        let c = self.transmitted_modes.iter().position(|&l| l == transmitted)?;
        Some(self.power[r][c])
    }

    fn is_square(&self) -> bool {
        self.decoded_modes == self.transmitted_modes
    }

    /// Per transmitted mode: co-mode power over power leaked into the other
    /// decode slots, in dB, capped at [`SIR_CAP_DB`].
    pub fn diagonal_dominance_db(&self) -> Result<Vec<(i32, f64)>> {
        self.transmitted_modes
            .iter()
            .enumerate()
            .map(|(c, &l)| {
                let r = self
                    .decoded_modes
                    .iter()
                    .position(|&d| d == l)
                    .ok_or_else(|| Error::InvalidArgument(format!("mode {l} has no decode slot")))?;
                let co = self.power[r][c];
                let cross: f64 = (0..self.decoded_modes.len())
                    .filter(|&i| i != r)
                    .map(|i| self.power[i][c])
                    .sum();
                Ok((l, ratio_db(co, cross)))
            })
            .collect()
    }

    /// Per transmitted mode: fraction of its decoded power that lands in its
    /// own slot, in dB (0 dB means no leakage).
    pub fn diagonal_share_db(&self) -> Result<Vec<(i32, f64)>> {
        self.transmitted_modes
            .iter()
            .enumerate()
            .map(|(c, &l)| {
                let r = self
                    .decoded_modes
                    .iter()
                    .position(|&d| d == l)
                    .ok_or_else(|| Error::InvalidArgument(format!("mode {l} has no decode slot")))?;
                let total: f64 = self.power.iter().map(|row| row[c]).sum();
                if self.power[r][c] <= 0.0 {
                    return Err(Error::ZeroSignal(l));
                }
                Ok((l, 10.0 * (self.power[r][c] / total).log10()))
            })
            .collect()
    }

    /// Rows are decoded modes, columns transmitted modes; the header row and
    /// first column carry the mode integers.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("decoded\\transmitted");
        for l in &self.transmitted_modes {
            let _ = write!(out, ",{l}");
        }
        out.push('\n');
        for (row, l) in self.power.iter().zip(&self.decoded_modes) {
            let _ = write!(out, "{l}");
            for p in row {
                let _ = write!(out, ",{p:.17e}");
            }
            out.push('\n');
        }
        out
    }
}

fn ratio_db(signal: f64, interference: f64) -> f64 {
    if interference <= 0.0 {
        return SIR_CAP_DB;
    }
    (10.0 * (signal / interference).log10()).min(SIR_CAP_DB)
}

/// One channel simulation per transmitted mode, decoded into every decode slot.
pub fn imi_matrix(
    scenario: &Scenario,
    transmitted_modes: &[i32],
    decoded_modes: &[i32],
    mask: Option<&PhaseMask>,
    model: ChannelModel,
    k: f64,
) -> Result<ImiMatrix> {
    check_decodable(decoded_modes, &scenario.rx)?;
    let mut power = vec![vec![0.0; transmitted_modes.len()]; decoded_modes.len()];
    for (c, &l) in transmitted_modes.iter().enumerate() {
        let samples = received_signal(scenario, l, k, model)?;
        let decoded = decode_transmitted_modes(&samples, mask, decoded_modes, &scenario.rx)?;
        for (r, d) in decoded.iter().enumerate() {
            power[r][c] = d.norm_sqr();
        }
    }
    ImiMatrix::new(decoded_modes.to_vec(), transmitted_modes.to_vec(), power)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SirReport {
    /// (mode, SIR dB): co-mode power in decode slot l over the power other
    /// transmitted modes put into that slot.
    pub per_mode_db: Vec<(i32, f64)>,
    /// Arithmetic mean of the per-mode dB values.
    pub average_db: f64,
    /// Alternative aggregation: co-mode power over the leakage of transmitted
    /// mode l into the other slots. Diagnostics only.
    pub column_wise_db: Vec<(i32, f64)>,
}

pub fn sir(imi: &ImiMatrix) -> Result<SirReport> {
    if !imi.is_square() {
        return Err(Error::InvalidArgument(
            "SIR needs the same decoded and transmitted mode lists".into(),
        ));
    }
    let n = imi.transmitted_modes.len();
    let mut per_mode = Vec::with_capacity(n);
    let mut column_wise = Vec::with_capacity(n);
    for (i, &l) in imi.transmitted_modes.iter().enumerate() {
        let co = imi.power[i][i];
        if co <= 0.0 {
            return Err(Error::ZeroSignal(l));
        }
        let row: f64 = (0..n).filter(|&j| j != i).map(|j| imi.power[i][j]).sum();
        let col: f64 = (0..n).filter(|&j| j != i).map(|j| imi.power[j][i]).sum();
        per_mode.push((l, ratio_db(co, row)));
        column_wise.push((l, ratio_db(co, col)));
    }
    let average_db = per_mode.iter().map(|(_, v)| v).sum::<f64>() / n as f64;
    Ok(SirReport {
        per_mode_db: per_mode,
        average_db,
        column_wise_db: column_wise,
    })
}

/// Average SIR after minus average SIR before, dB.
pub fn sir_gain(before: &ImiMatrix, after: &ImiMatrix) -> Result<f64> {
    if before.transmitted_modes != after.transmitted_modes || before.decoded_modes != after.decoded_modes {
        return Err(Error::InvalidArgument("IMI matrices use different mode lists".into()));
    }
    Ok(sir(after)?.average_db - sir(before)?.average_db)
}

/// Interference-limited sum capacity Σ_l log₂(1 + SIR_l), bits/s/Hz.
pub fn capacity(imi: &ImiMatrix) -> Result<f64> {
    Ok(sir(imi)?
        .per_mode_db
        .iter()
        .map(|(_, db)| (1.0 + 10f64.powf(db.min(SIR_CAP_DB) / 10.0)).log2())
        .sum())
}

/// Total co-mode power after masking with (θ, φ), summed over the tensor's
/// modes and subcarriers. Each subcarrier uses its own wavenumber.
///
/// Only the antennas present in the tensor contribute; this is the received
/// power figure used to pick between the φ and φ + π candidates.
pub fn corrected_mode_power(tensor: &SampleTensor, rx: &UcaGeometry, theta: f64, phi: f64) -> f64 {
    let antennas = tensor.antennas();
    let n = antennas.len() as f64;
    let mut total = 0.0;
    for (ki, &f) in tensor.frequencies().iter().enumerate() {
        let mask = raw_mask(theta, phi, crate::wavenumber(f), rx);
        for &l in tensor.modes() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &m in antennas {
                let y = tensor.series(m, l).expect("antenna and mode come from the tensor")[ki];
                // transmitted mode l sits in receiver slot -l
                acc += y * Complex64::from_polar(1.0, mask[m] + l as f64 * rx.azimuth(m));
            }
            total += (acc / n).norm_sqr();
        }
    }
    total
}
