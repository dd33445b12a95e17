//! Eventological copulas (Kopulas).
//!
//! Distributions of finite sets of events with prescribed marginal
//! probabilities: the two kinds of event-probability distributions and the
//! Möbius transforms between them, set-phenomena and half-rare projection,
//! Kopula families, the frame method and Fréchet-correlation parameters.
//!
//! The numerical core is generic over [`Scalar`] (`f64` and `f32`); the
//! Möbius kernels in [`mobius`] need only ring operations and also run over
//! exact rationals. The aliases at the crate root fix the scalar to `f64`;
//! [`single`] holds the `f32` ones.

pub mod epd;
pub mod error;
pub mod families;
pub mod frame;
pub mod grid;
pub mod io;
pub mod kor;
pub mod lattice;
pub mod mobius;
pub mod oracle;
pub mod phenomena;
pub mod sampling;
pub mod scalar;

pub use error::{KopulaError, Result};
pub use lattice::{EventSetContext, SubsetIndex, MAX_EVENTS};
pub use phenomena::PhenomenonMask;
pub use scalar::Scalar;

pub type Epd1 = epd::Epd1<f64>;
pub type Epd2 = epd::Epd2<f64>;
pub type MarginalSet = epd::MarginalSet<f64>;
pub type HypercubePoint = phenomena::HypercubePoint<f64>;
pub type KopulaFamily = families::KopulaFamily<f64>;
pub type PairParamFn = families::PairParamFn<f64>;
pub type FrameParams = frame::FrameParams<f64>;
pub type TripletParams = frame::TripletParams<f64>;
pub type QuadrupletParams = frame::QuadrupletParams<f64>;
pub type PseudoDistribution = frame::PseudoDistribution<f64>;
pub type KorValue = kor::KorValue<f64>;

/// Single-precision aliases.
pub mod single {
    pub type Epd1 = crate::epd::Epd1<f32>;
    pub type Epd2 = crate::epd::Epd2<f32>;
    pub type MarginalSet = crate::epd::MarginalSet<f32>;
    pub type HypercubePoint = crate::phenomena::HypercubePoint<f32>;
    pub type KopulaFamily = crate::families::KopulaFamily<f32>;
    pub type FrameParams = crate::frame::FrameParams<f32>;
}
