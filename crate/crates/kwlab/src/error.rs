//! Error types shared across the crate.

use thiserror::Error;

use crate::Real;

#[derive(Debug, Clone, Error)]
pub enum Error<T: Real> {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("Phi must be positive, got {0}")]
    NonPositivePhi(T),

    #[error("no a-priori force bound is available for this force model")]
    UnboundedForce,

    #[error("integration exceeded {max_steps} steps at t = {t}")]
    MaxStepsExceeded { max_steps: usize, t: T },

    #[error("vector field became non-finite at t = {t}")]
    NonFiniteField { t: T },

    #[error(
        "Newton shooting stagnated after {iterations} iterations; \
         best iterate ({q}, {p}) with residual {residual}"
    )]
    NewtonStagnation {
        iterations: usize,
        q: T,
        p: T,
        residual: T,
    },

    #[error(
        "period-map Jacobian M - I is singular near ({q}, {p}); \
         a multiplier is close to 1, suggesting a bifurcation"
    )]
    DegenerateJacobian { q: T, p: T },

    #[error("prescribed motion grazes cos q = 0 at t = {t} (q = {q})")]
    MotionGrazesHorizontal { t: T, q: T },

    #[error("amplitude {0} outside the admissible band |A| <= pi/2 - 0.05")]
    AmplitudeOutOfRange(T),
}
