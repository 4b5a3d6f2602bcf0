//! Few-shot misalignment estimation from cross-modal phases.
//!
//! For each selected antenna and mode pair the receiver forms
//! ũ = ½∠Σ_k (y_{m,l_i,k} y*_{m,l_j,k})², which tracks (l_i − l_j)(δ_m + γ)
//! independently of frequency, range and the Bessel sign. The angles are then
//! found by fitting the modeled phases to the measured ones over (θ, φ, γ).
//!
//! ũ is only defined modulo π, so the fit compares both sides on the doubled
//! circle: each term is λ_m |e^{2iũ} − e^{2i(l_i−l_j)(δ_m+γ)}|².

pub mod search;
pub mod select;

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{delta, SampleTensor};
use crate::correction::corrected_mode_power;
use crate::error::{Error, Result};
use crate::geometry::UcaGeometry;
use crate::phase::{circular_distance, wrap_pi};

pub use select::{diametric, select_antennas, select_modes, weight, Weighting, WEIGHT_FLOOR};

/// Amplitudes below this are treated as no signal.
pub const AMPLITUDE_FLOOR: f64 = 1e-300;
const ACCUMULATOR_FLOOR: f64 = 1e-300;
const DIAMETRIC_TOL: f64 = 1e-9;
/// Number of best grid cells the local search is started from.
const REFINE_STARTS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationConfig {
    /// L_U: transmitted modes used for estimation.
    pub modes: Vec<i32>,
    /// M_Q: receive antenna ids.
    pub antennas: Vec<usize>,
    /// K_P: subcarrier indices.
    pub subcarriers: Vec<usize>,
    pub weighting: Weighting,
    /// Coarse grid step in degrees for (θ, φ, γ).
    pub grid_deg: [f64; 3],
    /// Local search stops once the simplex loss spread is below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl EstimationConfig {
    pub fn new(modes: Vec<i32>, antennas: Vec<usize>, subcarriers: Vec<usize>) -> Self {
        Self {
            modes,
            antennas,
            subcarriers,
            weighting: Weighting::Amplitude,
            grid_deg: [3.0, 3.0, 3.0],
            tolerance: 1e-10,
            max_iterations: 200,
        }
    }

    /// Checks the config against the receive ring.
    ///
    /// Diametric pairs are rejected whenever a diametric-free set of the
    /// requested size exists on the ring; larger sets must still contain
    /// three mutually non-diametric antennas.
    pub fn validate(&self, rx: &UcaGeometry) -> Result<()> {
        let n_rx = rx.n_elements();
        if self.modes.len() < 2 {
            return Err(Error::DegenerateGeometry("need at least two modes".into()));
        }
        if self.antennas.len() < 3 {
            return Err(Error::DegenerateGeometry("need at least three antennas".into()));
        }
        if self.subcarriers.is_empty() {
            return Err(Error::DegenerateGeometry("need at least one subcarrier".into()));
        }
        if distinct_count(&self.modes) != self.modes.len() {
            return Err(Error::DegenerateGeometry("modes must be distinct".into()));
        }
        if distinct_count(&self.antennas) != self.antennas.len() {
            return Err(Error::DegenerateGeometry("antennas must be distinct".into()));
        }
        if let Some(a) = self.antennas.iter().find(|&&a| a >= n_rx) {
            return Err(Error::DegenerateGeometry(format!(
                "antenna {a} outside a {n_rx}-element ring"
            )));
        }
        if self.grid_deg.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::InvalidArgument("grid steps must be positive".into()));
        }
        let az: Vec<f64> = self.antennas.iter().map(|&a| rx.azimuth(a)).collect();
        let opposed = |i: usize, j: usize| (circular_distance(az[i], az[j]) - PI).abs() <= DIAMETRIC_TOL;
        // azimuth classes modulo π
        let mut classes: Vec<f64> = Vec::new();
        for &a in &az {
            let c = a.rem_euclid(PI);
            if !classes
                .iter()
                .any(|&x| circular_distance(2.0 * x, 2.0 * c) <= 2.0 * DIAMETRIC_TOL)
            {
                classes.push(c);
            }
        }
        if classes.len() < 3 {
            return Err(Error::DegenerateGeometry(
                "fewer than three non-diametric antennas".into(),
            ));
        }
        if self.antennas.len() <= select::max_independent_antennas(n_rx) {
            for i in 0..az.len() {
                for j in i + 1..az.len() {
                    if opposed(i, j) {
                        return Err(Error::DegenerateGeometry(format!(
                            "antennas {} and {} are diametrically opposed",
                            self.antennas[i], self.antennas[j]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn distinct_count<T: Ord + Copy>(v: &[T]) -> usize {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.dedup();
    s.len()
}

/// ũ for antenna `antenna` and modes (l_i, l_j) over `subcarriers`, in (−π, π].
pub fn cross_modal_phase(
    tensor: &SampleTensor,
    antenna: usize,
    mode_i: i32,
    mode_j: i32,
    subcarriers: &[usize],
) -> Result<f64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for &k in subcarriers {
        let missing = |mode| Error::MissingSamples {
            antenna,
            mode,
            subcarrier: k,
        };
        let yi = tensor.get(antenna, mode_i, k).ok_or_else(|| missing(mode_i))?;
        let yj = tensor.get(antenna, mode_j, k).ok_or_else(|| missing(mode_j))?;
        let z = yi * yj.conj();
        acc += z * z;
    }
    if acc.norm() < ACCUMULATOR_FLOOR {
        return Err(Error::ZeroPower { antenna });
    }
    Ok(wrap_pi(0.5 * acc.arg()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossModalPhase {
    pub antenna: usize,
    pub mode_i: i32,
    pub mode_j: i32,
    pub phase: f64,
}

/// Measured cross-modal phases for every selected antenna and mode pair
/// (l_i > l_j), plus each antenna's mean amplitude.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossModalPhaseSet {
    pub entries: Vec<CrossModalPhase>,
    /// (antenna, mean |y| over the selected modes and subcarriers)
    pub amplitudes: Vec<(usize, f64)>,
}

/// Ordered mode pairs (l_i, l_j) with l_i > l_j.
pub fn mode_pairs(modes: &[i32]) -> Vec<(i32, i32)> {
    let mut out = Vec::new();
    for &a in modes {
        for &b in modes {
            if a > b {
                out.push((a, b));
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn measure_phases(tensor: &SampleTensor, config: &EstimationConfig) -> Result<CrossModalPhaseSet> {
    let pairs = mode_pairs(&config.modes);
    let mut entries = Vec::with_capacity(pairs.len() * config.antennas.len());
    let mut amplitudes = Vec::with_capacity(config.antennas.len());
    for &m in &config.antennas {
        let mut sum = 0.0;
        let mut count = 0usize;
        for &l in &config.modes {
            for &k in &config.subcarriers {
                let y = tensor.get(m, l, k).ok_or(Error::MissingSamples {
                    antenna: m,
                    mode: l,
                    subcarrier: k,
                })?;
                sum += y.norm();
                count += 1;
            }
        }
        amplitudes.push((m, sum / count as f64));
    }
    if amplitudes.iter().all(|(_, a)| *a < AMPLITUDE_FLOOR) {
        return Err(Error::NoPower);
    }
    for &m in &config.antennas {
        for &(li, lj) in &pairs {
            entries.push(CrossModalPhase {
                antenna: m,
                mode_i: li,
                mode_j: lj,
                phase: cross_modal_phase(tensor, m, li, lj, &config.subcarriers)?,
            });
        }
    }
    Ok(CrossModalPhaseSet { entries, amplitudes })
}

/// One precomputed loss term.
#[derive(Debug, Clone, Copy)]
struct Term {
    azimuth: f64,
    mode_gap: f64,
    doubled_phase: f64,
    weight: f64,
}

/// Weighted unit-circle distance between measured and modeled cross-modal
/// phases at (θ, φ, γ).
#[derive(Debug, Clone)]
pub struct Loss {
    terms: Vec<Term>,
}

impl Loss {
    /// `weights` are λ_m in the order of `phases.amplitudes`.
    pub fn new(phases: &CrossModalPhaseSet, weights: &[f64], rx: &UcaGeometry) -> Result<Self> {
        if weights.len() != phases.amplitudes.len() {
            return Err(Error::InvalidArgument("one weight per antenna required".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidArgument("weights must be positive".into()));
        }
        let terms = phases
            .entries
            .iter()
            .map(|e| {
                let idx = phases
                    .amplitudes
                    .iter()
                    .position(|(a, _)| *a == e.antenna)
                    .ok_or_else(|| Error::InvalidArgument(format!("no weight for antenna {}", e.antenna)))?;
                Ok(Term {
                    azimuth: rx.azimuth(e.antenna),
                    mode_gap: (e.mode_i - e.mode_j) as f64,
                    doubled_phase: 2.0 * e.phase,
                    weight: weights[idx],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { terms })
    }

    pub fn eval(&self, theta: f64, phi: f64, gamma: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let model = 2.0 * t.mode_gap * (delta(theta, phi, t.azimuth) + gamma);
                t.weight * (2.0 - 2.0 * (t.doubled_phase - model).cos())
            })
            .sum::<f64>()
            .max(0.0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Loss at (θ, φ, γ) for a phase set and per-antenna weights.
pub fn loss(
    theta: f64,
    phi: f64,
    gamma: f64,
    phases: &CrossModalPhaseSet,
    weights: &[f64],
    rx: &UcaGeometry,
) -> Result<f64> {
    Ok(Loss::new(phases, weights, rx)?.eval(theta, phi, gamma))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateDiagnostics {
    /// Best coarse grid cell (radians) and its loss.
    pub grid_point: [f64; 3],
    pub grid_loss: f64,
    /// Local search iterations of the winning start.
    pub iterations: usize,
    pub converged: bool,
    /// Corrected received power of the kept and rejected φ candidates.
    pub power_kept: f64,
    pub power_rejected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MisalignmentEstimate {
    /// Elevation in [0, π/2).
    pub theta: f64,
    /// Azimuth in (−π, π].
    pub phi: f64,
    pub gamma: f64,
    pub residual_loss: f64,
    /// The φ + π candidate delivered more power and replaced the fit.
    pub phi_flipped: bool,
    pub diagnostics: EstimateDiagnostics,
}

/// Grid search, Nelder–Mead polish and φ/φ+π disambiguation.
pub fn estimate(tensor: &SampleTensor, rx: &UcaGeometry, config: &EstimationConfig) -> Result<MisalignmentEstimate> {
    config.validate(rx)?;
    let phases = measure_phases(tensor, config)?;
    let amps: Vec<f64> = phases.amplitudes.iter().map(|(_, a)| *a).collect();
    let weights = weight(&amps, config.weighting);
    let loss = Loss::new(&phases, &weights, rx)?;

    let (starts, grid_best) = coarse_grid(&loss, config.grid_deg);
    let steps = config.grid_deg.map(|g| 0.5 * g.to_radians());
    let objective = |p: &[f64; 3]| {
        let theta = p[0].abs();
        if theta >= FRAC_PI_2 {
            // outside the facing hemisphere
            return 1e6 + theta;
        }
        loss.eval(theta, p[1], p[2])
    };
    let best = starts
        .iter()
        .map(|s| search::nelder_mead(objective, *s, steps, config.tolerance, config.max_iterations))
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("grid is never empty");

    let theta = best.point[0].abs();
    let phi = wrap_pi(best.point[1]);
    let gamma = wrap_pi(best.point[2]);
    let alt_phi = wrap_pi(phi + PI);
    let power = corrected_mode_power(tensor, rx, theta, phi);
    let alt_power = corrected_mode_power(tensor, rx, theta, alt_phi);
    let flipped = alt_power > power;

    Ok(MisalignmentEstimate {
        theta,
        phi: if flipped { alt_phi } else { phi },
        gamma,
        residual_loss: best.value,
        phi_flipped: flipped,
        diagnostics: EstimateDiagnostics {
            grid_point: grid_best.0,
            grid_loss: grid_best.1,
            iterations: best.iterations,
            converged: best.converged,
            power_kept: power.max(alt_power),
            power_rejected: power.min(alt_power),
        },
    })
}

/// Exhaustive grid over θ ∈ [0°, 90°), φ ∈ (−180°, 180°], γ ∈ (−180°, 180°].
/// Returns the best few cells (radians) and the single best with its loss.
fn coarse_grid(loss: &Loss, grid_deg: [f64; 3]) -> (Vec<[f64; 3]>, ([f64; 3], f64)) {
    let thetas = search::axis(0.0, 90.0, grid_deg[0]);
    let phis = search::axis(-180.0 + grid_deg[1], 180.0 + 0.5 * grid_deg[1], grid_deg[1]);
    let gammas = search::axis(-180.0 + grid_deg[2], 180.0 + 0.5 * grid_deg[2], grid_deg[2]);
    let gammas_rad: Vec<f64> = gammas.iter().map(|g| g.to_radians()).collect();

    let common_gap = match loss.terms.first() {
        Some(first) if loss.terms.iter().all(|t| t.mode_gap == first.mode_gap) => Some(2.0 * first.mode_gap),
        _ => None,
    };

    let mut cells: Vec<([f64; 3], f64)> = Vec::with_capacity(thetas.len() * phis.len());
    let mut partial = vec![(0.0, 0.0, 0.0); loss.terms.len()];
    for &t in &thetas {
        let theta = t.to_radians();
        for &p in &phis {
            let phi = p.to_radians();
            // per term: doubled measured phase minus the γ-free model part
            for (slot, term) in partial.iter_mut().zip(&loss.terms) {
                let offset = term.doubled_phase - 2.0 * term.mode_gap * delta(theta, phi, term.azimuth);
                *slot = (offset, 2.0 * term.mode_gap, term.weight);
            }
            let best = match common_gap {
                Some(gap) => best_gamma_closed_form(&partial, gap),
                None => best_gamma_on_grid(&partial, &gammas_rad),
            };
            cells.push(([theta, phi, best.1], best.0));
        }
    }
    cells.sort_by(|a, b| a.1.total_cmp(&b.1));
    let top = cells[0];
    let mut starts: Vec<[f64; 3]> = Vec::with_capacity(REFINE_STARTS);
    for (p, _) in &cells {
        // skip cells adjacent to a start already taken
        let near = starts.iter().any(|s| {
            (s[0] - p[0]).abs() <= 1.5 * grid_deg[0].to_radians()
                && circular_distance(s[1], p[1]) <= 1.5 * grid_deg[1].to_radians()
        });
        if !near {
            starts.push(*p);
        }
        if starts.len() == REFINE_STARTS {
            break;
        }
    }
    (starts, top)
}

/// Scans γ over the grid; `partial` holds (offset, doubled gap, weight) per term.
fn best_gamma_on_grid(partial: &[(f64, f64, f64)], gammas: &[f64]) -> (f64, f64) {
    let mut best = (f64::INFINITY, 0.0);
    for &g in gammas {
        let v: f64 = partial
            .iter()
            .map(|(offset, gap, w)| w * (2.0 - 2.0 * (offset - gap * g).cos()))
            .sum();
        if v < best.0 {
            best = (v, g);
        }
    }
    best
}

/// Exact minimum over γ when every term has the same mode gap G:
/// Σ w (2 − 2cos(o − Gγ)) is smallest at Gγ = arg Σ w e^{io}.
fn best_gamma_closed_form(partial: &[(f64, f64, f64)], gap: f64) -> (f64, f64) {
    let mut phasor = Complex64::new(0.0, 0.0);
    let mut total = 0.0;
    for (offset, _, w) in partial {
        phasor += Complex64::from_polar(*w, *offset);
        total += w;
    }
    let value = (2.0 * total - 2.0 * phasor.norm()).max(0.0);
    (value, wrap_pi(phasor.arg() / gap))
}
