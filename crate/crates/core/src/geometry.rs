//! Array geometry and receiver orientation.
//!
//! The transmitter UCA lies in the XY plane of its own frame, centered at the
//! origin. The receiver UCA is centered at `(0, 0, r)` and oriented by a
//! rotation that maps receiver-local axes into the transmitter frame.
//!
//! Scenario tilts are expressed relative to the aligned receiver, whose local
//! z′ axis points back at the transmitter (z′ = -z). That base orientation is
//! a half turn about Y, so `RxPose::from_rotation_yx(r, 0.0, 0.0)` is the
//! aligned link with θ = 0.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

const DEGENERATE_EPS: f64 = 1e-12;
const ORTHONORMAL_TOL: f64 = 1e-9;

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// A uniform circular array: `n_elements` on a ring of `radius` meters, the
/// n-th element at azimuth 2πn/N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UcaGeometry {
    n_elements: usize,
    radius: f64,
}

impl UcaGeometry {
    pub fn new(n_elements: usize, radius: f64) -> Result<Self> {
        if n_elements == 0 {
            return Err(Error::InvalidGeometry("element count must be >= 1".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidGeometry(format!("radius must be positive, got {radius}")));
        }
        Ok(Self { n_elements, radius })
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Azimuth of element `index`, 2π·index/N.
    pub fn azimuth(&self, index: usize) -> f64 {
        TAU * index as f64 / self.n_elements as f64
    }

    pub fn azimuths(&self) -> Vec<f64> {
        (0..self.n_elements).map(|i| self.azimuth(i)).collect()
    }

    /// Element positions in the array's own plane (z = 0).
    pub fn local_positions(&self) -> Vec<Vec3> {
        self.azimuths()
            .into_iter()
            .map(|a| [self.radius * a.cos(), self.radius * a.sin(), 0.0])
            .collect()
    }

    /// Largest |l| a ring of this size decodes without aliasing: ⌊N/2⌋ − 1.
    pub fn max_decodable_mode(&self) -> i32 {
        (self.n_elements / 2) as i32 - 1
    }
}

/// Row-major 3×3 rotation matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(pub [[f64; 3]; 3]);

impl Rotation {
    pub const IDENTITY: Rotation = Rotation([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    /// Validates that `m` is a proper rotation (RᵀR = I, det = +1).
    pub fn from_matrix(m: [[f64; 3]; 3]) -> Result<Self> {
        let r = Rotation(m);
        let rtr = r.transpose().compose(&r);
        for (i, row) in rtr.0.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                if (v - expected).abs().is_nan() || (v - expected).abs() > ORTHONORMAL_TOL {
                    return Err(Error::InvalidPose("rotation is not orthonormal".into()));
                }
            }
        }
        if (r.determinant() - 1.0).abs() > ORTHONORMAL_TOL {
            return Err(Error::InvalidPose("rotation determinant is not +1".into()));
        }
        Ok(r)
    }

    pub fn about_x(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Rotation([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    }

    pub fn about_y(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Rotation([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
    }

    pub fn about_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Rotation([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn compose(&self, other: &Rotation) -> Rotation {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        Rotation(out)
    }

    pub fn transpose(&self) -> Rotation {
        let m = self.0;
        Rotation([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        let m = self.0;
        [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
    }

    pub fn column(&self, j: usize) -> Vec3 {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }

    pub fn determinant(&self) -> f64 {
        dot(self.0[0], cross(self.0[1], self.0[2]))
    }

    /// Largest absolute entry of RᵀR − I.
    pub fn orthonormality_error(&self) -> f64 {
        let rtr = self.transpose().compose(self);
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((rtr.0[i][j] - expected).abs());
            }
        }
        worst
    }
}

/// Tilt applied to the receiver: rotate about Y by `angle_y`, then about X
/// by `angle_x`, i.e. R = Rx(angle_x) · Ry(angle_y).
pub fn rotation_yx(angle_y: f64, angle_x: f64) -> Rotation {
    Rotation::about_x(angle_x).compose(&Rotation::about_y(angle_y))
}

/// Orientation of the aligned receiver: a half turn about Y, so that
/// x′ = -x, y′ = y and z′ = -z.
pub fn aligned_base() -> Rotation {
    Rotation([[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]])
}

/// Inverse of the (θ, φ) mapping of [`misalignment_angles`] restricted to
/// Y-then-X tilts: returns `(angle_y, angle_x)` such that
/// `RxPose::from_rotation_yx(r, angle_y, angle_x)` has the requested angles.
pub fn tilt_for_angles(theta: f64, phi: f64) -> (f64, f64) {
    // Under the aligned base, d′ = (-sin a cos b, -sin b, cos a cos b).
    let d = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
    let angle_x = (-d[1]).clamp(-1.0, 1.0).asin();
    let angle_y = (-d[0]).atan2(d[2]);
    (angle_y, angle_x)
}

/// Receiver placement: center distance and full local-to-transmitter rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RxPose {
    distance: f64,
    rotation: Rotation,
}

impl RxPose {
    /// Pose from a raw receiver-local → transmitter-frame rotation.
    pub fn from_matrix(distance: f64, rotation: [[f64; 3]; 3]) -> Result<Self> {
        let rotation = Rotation::from_matrix(rotation)?;
        Self::new(distance, rotation)
    }

    pub fn new(distance: f64, rotation: Rotation) -> Result<Self> {
        if !(distance.is_finite() && distance > 0.0) {
            return Err(Error::InvalidPose(format!("distance must be positive, got {distance}")));
        }
        if rotation.orthonormality_error() > ORTHONORMAL_TOL || (rotation.determinant() - 1.0).abs() > ORTHONORMAL_TOL {
            return Err(Error::InvalidPose("rotation is not a proper rotation".into()));
        }
        Ok(Self { distance, rotation })
    }

    /// Aligned receiver at `distance`.
    pub fn aligned(distance: f64) -> Result<Self> {
        Self::new(distance, aligned_base())
    }

    /// Receiver tilted from the aligned orientation by `tilt`.
    pub fn from_tilt(distance: f64, tilt: Rotation) -> Result<Self> {
        Self::new(distance, tilt.compose(&aligned_base()))
    }

    /// Receiver tilted about Y by `angle_y`, then about X by `angle_x` (radians).
    pub fn from_rotation_yx(distance: f64, angle_y: f64, angle_x: f64) -> Result<Self> {
        Self::from_tilt(distance, rotation_yx(angle_y, angle_x))
    }

    /// Receiver whose misalignment angles are (θ, φ), built as a Y-then-X tilt.
    pub fn from_angles(distance: f64, theta: f64, phi: f64) -> Result<Self> {
        let (ay, ax) = tilt_for_angles(theta, phi);
        Self::from_rotation_yx(distance, ay, ax)
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn rotation(&self) -> &Rotation {
        &self.rotation
    }

    /// Receiver center C = (0, 0, r).
    pub fn center(&self) -> Vec3 {
        [0.0, 0.0, self.distance]
    }
}

/// Elevation and azimuth of the transmitter center seen from the receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MisalignmentAngles {
    pub theta: f64,
    pub phi: f64,
    /// sin θ underflowed; φ is undefined and reported as 0.
    pub aligned_degenerate: bool,
}

/// (θ, φ) of the unit vector from C to O in receiver-local coordinates.
pub fn misalignment_angles(pose: &RxPose) -> MisalignmentAngles {
    let d = pose.rotation.transpose().apply([0.0, 0.0, -1.0]);
    let theta = d[2].clamp(-1.0, 1.0).acos();
    let sin_theta = d[0].hypot(d[1]);
    if sin_theta < DEGENERATE_EPS {
        MisalignmentAngles {
            theta,
            phi: 0.0,
            aligned_degenerate: true,
        }
    } else {
        MisalignmentAngles {
            theta,
            phi: d[1].atan2(d[0]),
            aligned_degenerate: false,
        }
    }
}

/// Unit vector (cos φ sin θ, sin φ sin θ, cos θ).
pub fn direction_from_angles(theta: f64, phi: f64) -> Vec3 {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// In-plane rotation angle γ = atan2(w₂, w₁) with w = z′ × z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gamma {
    pub gamma: f64,
    pub aligned_degenerate: bool,
}

pub fn gamma(pose: &RxPose) -> Gamma {
    let z_rx = pose.rotation.column(2);
    let w = cross(z_rx, [0.0, 0.0, 1.0]);
    if norm(w) < DEGENERATE_EPS {
        return Gamma {
            gamma: 0.0,
            aligned_degenerate: true,
        };
    }
    let mut g = w[1].atan2(w[0]);
    if g <= -PI {
        g = PI;
    }
    Gamma {
        gamma: g,
        aligned_degenerate: false,
    }
}

pub fn element_positions_tx(tx: &UcaGeometry) -> Vec<Vec3> {
    tx.local_positions()
}

/// Receiver element positions in the transmitter frame: C + R·local.
pub fn element_positions_rx(rx: &UcaGeometry, pose: &RxPose) -> Vec<Vec3> {
    let c = pose.center();
    rx.local_positions()
        .into_iter()
        .map(|p| {
            let q = pose.rotation.apply(p);
            [c[0] + q[0], c[1] + q[1], c[2] + q[2]]
        })
        .collect()
}

/// Largest fractional bandwidth accepted by [`Scenario::new`].
pub const MAX_FRACTIONAL_BANDWIDTH: f64 = 0.1;

/// A complete link: arrays, receiver pose, carrier, subcarrier grid and the
/// complex gain α that lumps element pattern and transmit power.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub tx: UcaGeometry,
    pub rx: UcaGeometry,
    pub pose: RxPose,
    pub carrier_hz: f64,
    pub subcarriers_hz: Vec<f64>,
    pub alpha: Complex64,
}

impl Scenario {
    pub fn new(
        tx: UcaGeometry,
        rx: UcaGeometry,
        pose: RxPose,
        carrier_hz: f64,
        subcarriers_hz: Vec<f64>,
        alpha: Complex64,
    ) -> Result<Self> {
        if !(carrier_hz.is_finite() && carrier_hz > 0.0) {
            return Err(Error::InvalidScenario("carrier must be positive".into()));
        }
        if subcarriers_hz.is_empty() {
            return Err(Error::InvalidScenario("subcarrier list is empty".into()));
        }
        if subcarriers_hz.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
            return Err(Error::InvalidScenario("subcarrier frequencies must be positive".into()));
        }
        let lo = subcarriers_hz.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = subcarriers_hz.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let span = (hi - carrier_hz).abs().max((carrier_hz - lo).abs());
        if span / carrier_hz > MAX_FRACTIONAL_BANDWIDTH {
            return Err(Error::InvalidScenario(format!(
                "subcarriers span {:.3}% of the carrier; the flat-gain model needs < {}%",
                100.0 * span / carrier_hz,
                100.0 * MAX_FRACTIONAL_BANDWIDTH
            )));
        }
        if alpha.norm() == 0.0 || !alpha.is_finite() {
            return Err(Error::InvalidScenario("gain must be finite and nonzero".into()));
        }
        Ok(Self {
            tx,
            rx,
            pose,
            carrier_hz,
            subcarriers_hz,
            alpha,
        })
    }

    /// Same link with another receiver pose.
    pub fn with_pose(&self, pose: RxPose) -> Self {
        Self { pose, ..self.clone() }
    }

    pub fn carrier_wavenumber(&self) -> f64 {
        crate::wavenumber(self.carrier_hz)
    }

    /// Index of the subcarrier closest to the carrier.
    pub fn carrier_index(&self) -> usize {
        self.subcarriers_hz
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - self.carrier_hz).abs().total_cmp(&(b.1 - self.carrier_hz).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}
