use thiserror::Error;

/// Errors raised by the simulation, estimation and correction routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid pose: {0}")]
    InvalidPose(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("transmit and receive elements overlap ({distance:.3e} m apart)")]
    GeometryOverlap { distance: f64 },

    #[error("far-field model not applicable: r = {distance} m, aperture radius = {aperture} m")]
    FarFieldViolation { distance: f64, aperture: f64 },

    #[error("sample tensor is missing (antenna {antenna}, mode {mode}, subcarrier {subcarrier})")]
    MissingSamples {
        antenna: usize,
        mode: i32,
        subcarrier: usize,
    },

    #[error("cross-modal accumulator has no power at antenna {antenna}")]
    ZeroPower { antenna: usize },

    #[error("degenerate estimation geometry: {0}")]
    DegenerateGeometry(String),

    #[error("all selected antennas are below the amplitude floor")]
    NoPower,

    #[error("no valid antenna subset: {0}")]
    Infeasible(String),

    #[error("mode {mode} aliases on a {elements}-element ring (|l| must be <= {limit})")]
    AliasedMode { mode: i32, elements: usize, limit: i32 },

    #[error("mode {0} has zero co-mode power")]
    ZeroSignal(i32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
