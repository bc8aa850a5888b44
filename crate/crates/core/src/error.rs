use std::fmt;

use thiserror::Error;

/// Failures raised by the numerical modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("critical currents must be positive (got {ic_plus}, {ic_minus})")]
    InvalidCurrent { ic_plus: f64, ic_minus: f64 },

    #[error("mode set is empty")]
    EmptyModeSet,

    #[error("frequency grid contains zero at index {index}")]
    ZeroFrequency { index: usize },

    #[error("susceptibility determinant vanishes at probe index {index} (|D| = {magnitude:e})")]
    SingularSusceptibility { index: usize, magnitude: f64 },

    #[error("integrator failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },

    #[error("state is not physical: minimum eigenvalue {min_eigenvalue:e}")]
    NonPhysicalState { min_eigenvalue: f64 },

    #[error("tomography record is missing setting {0}")]
    IncompleteRecord(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Non-fatal conditions surfaced to callers and, ultimately, to the run manifest.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Two local minima of the SQUID potential agree in energy.
    DegenerateMinimum { phi_b: f64, chosen: f64, other: f64 },
    /// Pump steady state has three positive roots; the low-amplitude branch was used.
    BistableRegion { roots: Vec<f64> },
    /// Decay rate matrix has a negative eigenvalue.
    NonPositiveRateMatrix { min_eigenvalue: f64 },
    /// Density matrix dipped below the positivity threshold during integration.
    PositivityViolated { t: f64, min_eigenvalue: f64 },
    /// Probe amplitude is not small compared to the pump.
    StrongProbe { ratio: f64 },
    /// Both transmissions vanished at some grid points; R was set to zero there.
    BothZero { count: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::DegenerateMinimum { phi_b, chosen, other } => write!(
                f,
                "DegenerateMinimum: phi_b={phi_b} minima at {chosen} and {other}; kept {chosen}"
            ),
            Warning::BistableRegion { roots } => {
                write!(f, "BistableRegion: photon-number roots {roots:?}; kept lowest")
            }
            Warning::NonPositiveRateMatrix { min_eigenvalue } => write!(
                f,
                "NonPositiveRateMatrix: rate matrix eigenvalue {min_eigenvalue:e}"
            ),
            Warning::PositivityViolated { t, min_eigenvalue } => write!(
                f,
                "PositivityViolated: rho eigenvalue {min_eigenvalue:e} at t={t}"
            ),
            Warning::StrongProbe { ratio } => {
                write!(f, "StrongProbe: eps_probe/eps_pump = {ratio}")
            }
            Warning::BothZero { count } => {
                write!(f, "BothZero: |S+|+|S-| vanished at {count} points")
            }
        }
    }
}
