//! Simulation and analysis toolkit for the Kapitza-Whitney pendulum: an
//! inverted planar pendulum whose pivot vibrates rapidly in the vertical
//! direction while a time-periodic horizontal force acts on the bob.
//!
//! The crate integrates both the full fast-oscillatory system and its
//! averaged counterpart, locates periodic orbits by Newton shooting on the
//! stroboscopic map, classifies them through Floquet multipliers, generates
//! Poincare sections for the frictionless case, and solves the inverse
//! problem of designing a horizontal force that realizes a prescribed
//! no-fall motion.
//!
//! # Sign convention
//!
//! The horizontal force enters the momentum equation with a **plus** sign,
//! `dp/dt = ... + h(t) cos q`. The Newton form of the dynamics,
//! `x'' + mu x' + (1 + f''(t)) sin x = h(t) cos x`, uses the same
//! convention. All built-in force variants and every parameter set in the
//! test suite follow it.
//!
//! All core math is generic over the scalar type through the [`Real`]
//! trait; `f64` aliases are exported at the crate root.

use std::fmt;

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive};

pub mod design;
pub mod error;
pub mod integrate;
pub mod model;
pub mod orbits;
pub mod sections;
pub mod spline;

/// Scalar type the toolkit operates on: `f32`, `f64`, or any other
/// IEEE-like floating point with the num-traits surface.
pub trait Real:
    Float + FloatConst + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<S> Real for S where
    S: Float + FloatConst + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

/// Lift an `f64` literal into the working scalar type.
pub(crate) fn fl<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

pub use error::Error;
pub use model::{CriticalPoints, ForceModel, Params, State, StateForce};

pub type Params64 = model::Params<f64>;
pub type State64 = model::State<f64>;
pub type ForceModel64 = model::ForceModel<f64>;
pub type CriticalPoints64 = model::CriticalPoints<f64>;
pub type IntegratorConfig64 = integrate::IntegratorConfig<f64>;
pub type Trajectory64<const N: usize> = integrate::Trajectory<f64, N>;
pub type OrbitResult64 = orbits::OrbitResult<f64>;
pub type SectionJob64 = sections::SectionJob<f64>;
pub type SectionCloud64 = sections::SectionCloud<f64>;
pub type DesignedForce64 = design::DesignedForce<f64>;
