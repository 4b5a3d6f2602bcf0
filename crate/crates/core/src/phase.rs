//! Angle wrapping and circular distance helpers.

use std::f64::consts::{PI, TAU};

/// Wraps an angle to (-π, π].
pub fn wrap_pi(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    a
}

/// Wraps an angle to (-π/2, π/2], i.e. reduces it modulo π.
pub fn wrap_half_pi(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(PI);
    if a > PI / 2.0 {
        a -= PI;
    }
    a
}

/// Shortest distance between two angles on the circle, in [0, π].
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_pi(a - b).abs()
}

/// Same as [`circular_distance`] for angles in degrees.
pub fn circular_distance_deg(a: f64, b: f64) -> f64 {
    circular_distance(a.to_radians(), b.to_radians()).to_degrees()
}
