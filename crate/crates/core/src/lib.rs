//! Numerical core of `sdqsim`: a flux-biased asymmetric SQUID used as a
//! nonreciprocal circuit-QED element.
//!
//! Everything is generic over the real scalar type ([`Real`], implemented for
//! `f32` and `f64`); the `*64` aliases below fix it to `f64`.

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod modes_coupling;
pub mod ode;
pub mod scalar;
pub mod spectroscopy;
pub mod squid_diode;
pub mod tomography;

pub use error::{Error, Result, Warning};
pub use scalar::{linspace, wrap_angle, Cx, Real};

pub type C64 = Cx<f64>;
pub type CMat4f64 = linalg::CMat4<f64>;

pub type JunctionParams64 = squid_diode::JunctionParams<f64>;
pub type SquidConfig64 = squid_diode::SquidConfig<f64>;
pub type DiodeCharacterization64 = squid_diode::DiodeCharacterization<f64>;

pub type Mode64 = modes_coupling::Mode<f64>;
pub type ModeSet64 = modes_coupling::ModeSet<f64>;
pub type AsymmetryModel64 = modes_coupling::AsymmetryModel<f64>;
pub type ComplexCoupling64 = modes_coupling::ComplexCoupling<f64>;

pub type CircuitConfig64 = spectroscopy::CircuitConfig<f64>;
pub type DriveConfig64 = spectroscopy::DriveConfig<f64>;
pub type SpectrumTrace64 = spectroscopy::SpectrumTrace<f64>;

pub type TwoQubitParams64 = dynamics::TwoQubitParams<f64>;
pub type TwoQubitState64 = dynamics::TwoQubitState<f64>;
pub type DynamicsResult64 = dynamics::DynamicsResult<f64>;

pub type TomographyRecord64 = tomography::TomographyRecord<f64>;
pub type ReconstructionResult64 = tomography::ReconstructionResult<f64>;
