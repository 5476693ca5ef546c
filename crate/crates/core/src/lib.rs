//! Discrete-time complex-baseband simulator for programmable-metasurface
//! transceivers.
//!
//! The crate models a grid of unit cells whose reflection coefficients are
//! driven by digital control sequences. Two transceiver paradigms are covered:
//!
//! - an RF chain-free transmitter, where baseband symbols are written straight
//!   into per-cell coefficients that modulate an air-fed single-tone carrier;
//! - a space-down-conversion receiver, where a time-linear phase ramp on every
//!   cell translates the incident wave down by `1 / T_meta`.
//!
//! ```text
//! carrier ──illuminate──▶ cells ──apply_schedule──▶ superpose ──▶ receive_frame
//!                          ▲
//!            symbols_to_schedule / compile_staircase
//! ```
//!
//! All math is generic over the real scalar type ([`Scalar`], implemented for
//! `f32` and `f64`). The `f64` aliases at the crate root are what the CLI and
//! most tests use.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod metasurface;
pub mod model;
pub mod propagation;
pub mod scalar;
pub mod spectral;
pub mod txrx;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Scalar;

pub use metasurface::{QuantizationModel, ShiftDirection, StaircaseRampSpec};
pub use model::{
    CoefficientSchedule, ComplexEnvelope, Orientation, Point3, PointRole, PointSet,
    ReflectionCoefficient, SurfaceGeometry,
};
pub use propagation::{ChannelKind, ChannelModel, ChannelSet, NoiseSpec};
pub use spectral::Spectrum;
pub use txrx::{FramePayload, FrameSpec, LinkReport, ModulationScheme, SurfacePartition};

/// Double-precision complex sample.
pub type C64 = Complex<f64>;
/// Single-precision complex sample.
pub type C32 = Complex<f32>;

pub type Envelope = ComplexEnvelope<f64>;
pub type Envelope32 = ComplexEnvelope<f32>;
pub type Geometry = SurfaceGeometry<f64>;
pub type Coefficient = ReflectionCoefficient<f64>;
pub type Schedule = CoefficientSchedule<f64>;
pub type Points = PointSet<f64>;
pub type Channels = ChannelSet<f64>;
pub type Channel = ChannelModel<f64>;
pub type Quantization = QuantizationModel<f64>;
pub type Staircase = StaircaseRampSpec<f64>;
pub type Frame = FrameSpec<f64>;
pub type Payload = FramePayload<f64>;
pub type Report = LinkReport<f64>;
pub type PowerSpectrum = Spectrum<f64>;
