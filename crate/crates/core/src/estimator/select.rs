//! Heuristics for choosing antennas, modes and per-antenna weights.

use serde::{Deserialize, Serialize};

use crate::bessel::bessel_j;
use crate::error::{Error, Result};
use crate::geometry::Scenario;

/// Floor applied to every weight so that λ_m stays strictly positive.
pub const WEIGHT_FLOOR: f64 = 1e-12;

/// Two antennas on an even ring are diametric when their indices differ by N/2.
pub fn diametric(a: usize, b: usize, n_rx: usize) -> bool {
    n_rx.is_multiple_of(2) && a != b && (a + n_rx - b) % n_rx == n_rx / 2
}

/// Largest subset of an `n_rx` ring without a diametric pair.
pub fn max_independent_antennas(n_rx: usize) -> usize {
    if n_rx.is_multiple_of(2) {
        n_rx / 2
    } else {
        n_rx
    }
}

/// `q` antennas spread as evenly as possible around an `n_rx` ring.
///
/// Starts from ⌈j·N/Q⌉ and advances any index that is diametric to (or
/// coincides with) an earlier pick by one position. When `q` exceeds the
/// largest diametric-free subset the uniform spread is kept as is: the extra
/// antennas then repeat equations already in the set.
pub fn select_antennas(n_rx: usize, q: usize) -> Result<Vec<usize>> {
    if n_rx < 3 {
        return Err(Error::Infeasible(format!(
            "a {n_rx}-element ring cannot supply 3 antennas"
        )));
    }
    if q < 3 || q > n_rx {
        return Err(Error::Infeasible(format!("need 3 <= Q <= {n_rx}, got {q}")));
    }
    let spread: Vec<usize> = (0..q).map(|j| (j * n_rx).div_ceil(q)).collect();
    if q > max_independent_antennas(n_rx) {
        return Ok(spread);
    }
    let mut picked: Vec<usize> = Vec::with_capacity(q);
    for start in spread {
        let mut idx = start;
        let mut tries = 0;
        while picked.iter().any(|&p| p == idx || diametric(p, idx, n_rx)) {
            idx = (idx + 1) % n_rx;
            tries += 1;
            if tries > n_rx {
                return Err(Error::Infeasible(format!(
                    "no diametric-free set of {q} antennas on {n_rx} elements"
                )));
            }
        }
        picked.push(idx);
    }
    Ok(picked)
}

/// Symmetric mode pair {−l, +l} with the largest aligned-case gain
/// |J_l(k a_r a_t / r)|, searched over 1 ≤ l ≤ ⌊N_r/2⌋ − 1.
pub fn select_modes(scenario: &Scenario) -> (i32, i32) {
    let x = scenario.carrier_wavenumber() * scenario.rx.radius() * scenario.tx.radius() / scenario.pose.distance();
    let limit = scenario.rx.max_decodable_mode().max(1);
    let best = (1..=limit)
        .map(|l| (l, bessel_j(l, x).abs()))
        .fold(
            (1, f64::NEG_INFINITY),
            |acc, (l, v)| if v > acc.1 { (l, v) } else { acc },
        );
    (-best.0, best.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    Uniform,
    Amplitude,
    #[serde(alias = "amplitude-squared")]
    AmplitudeSquared,
}

impl std::str::FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "amplitude" => Ok(Self::Amplitude),
            "amplitude_squared" | "amplitude-squared" => Ok(Self::AmplitudeSquared),
            other => Err(Error::InvalidArgument(format!("unknown weighting `{other}`"))),
        }
    }
}

/// λ_m from per-antenna amplitudes; every weight is at least [`WEIGHT_FLOOR`].
pub fn weight(amplitudes: &[f64], scheme: Weighting) -> Vec<f64> {
    let n = amplitudes.len().max(1) as f64;
    let raw: Vec<f64> = match scheme {
        Weighting::Uniform => vec![1.0; amplitudes.len()],
        Weighting::Amplitude => {
            let mean = amplitudes.iter().sum::<f64>() / n;
            amplitudes.iter().map(|a| a / mean).collect()
        }
        Weighting::AmplitudeSquared => {
            let mean = amplitudes.iter().map(|a| a * a).sum::<f64>() / n;
            amplitudes.iter().map(|a| a * a / mean).collect()
        }
    };
    raw.into_iter()
        .map(|w| {
            if w.is_finite() {
                w.max(WEIGHT_FLOOR)
            } else {
                WEIGHT_FLOOR
            }
        })
        .collect()
}
