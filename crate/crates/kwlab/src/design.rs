//! Inverse problem: given a prescribed no-fall motion `q(t)`, compute the
//! horizontal force `h(t)` that realizes it, then verify and classify the
//! designed orbit.
//!
//! The canonical prescribed family is `q(t) = pi + A sin t`. The force is
//! recovered by solving the momentum equation for `h`:
//!
//! `h(t) = (p' + mu p - [mu sin q + p cos q] f' + sin q + (f'^2/2) sin 2q) / cos q`
//!
//! with `p = q' + f' sin q` and `p' = q'' + f'' sin q + f' q' cos q`. Note
//! the `f''` contribution makes `h` grow linearly in the fast multiplier
//! `k`; the averaging theorems therefore do not apply to designed forces,
//! and the hypothesis checkers are deliberately not run on them.

use std::sync::Arc;

use crate::error::Error;
use crate::integrate::{self, IntegratorConfig};
use crate::model::{pivot, ForceModel, HorizontalForce, Params};
use crate::orbits::{self, OrbitResult, SystemKind};
use crate::{fl, Real};

/// A prescribed motion with two derivatives, periodic in the slow period.
pub trait Motion<T: Real>: Clone + Send + Sync + 'static {
    fn q(&self, t: T) -> T;
    fn qdot(&self, t: T) -> T;
    fn qddot(&self, t: T) -> T;

    /// `(sin q, cos q)` along the motion. Override when a sharper form
    /// exists; the default goes through `q(t)`.
    fn sin_cos_q(&self, t: T) -> (T, T) {
        let q = self.q(t);
        (q.sin(), q.cos())
    }
}

/// The canonical family `q(t) = pi + A sin t`.
///
/// The amplitude is capped at `pi/2 - 0.05` so `cos q` stays bounded away
/// from zero along the motion.
#[derive(Debug, Clone, Copy)]
pub struct SineMotion<T: Real> {
    pub amplitude: T,
}

impl<T: Real> SineMotion<T> {
    pub fn new(amplitude: T) -> Result<Self, Error<T>> {
        if amplitude.abs() > T::FRAC_PI_2() - fl::<T>(0.05) {
            return Err(Error::AmplitudeOutOfRange(amplitude));
        }
        Ok(Self { amplitude })
    }
}

impl<T: Real> Motion<T> for SineMotion<T> {
    fn q(&self, t: T) -> T {
        T::PI() + self.amplitude * t.sin()
    }
    fn qdot(&self, t: T) -> T {
        self.amplitude * t.cos()
    }
    fn qddot(&self, t: T) -> T {
        -self.amplitude * t.sin()
    }

    // Shift identities around pi keep sin q exactly zero at A = 0, so the
    // designed force vanishes identically there instead of leaving
    // sin(pi)-sized residue.
    fn sin_cos_q(&self, t: T) -> (T, T) {
        let u = self.amplitude * t.sin();
        (-u.sin(), -u.cos())
    }
}

/// A designed horizontal force: uniform samples of `h(t)` over one period
/// plus a closed-form evaluator derived from the motion.
#[derive(Clone)]
pub struct DesignedForce<T: Real> {
    pub samples: Vec<(T, T)>,
    evaluator: Arc<dyn Fn(T) -> T + Send + Sync>,
    bound: T,
    period: T,
}

impl<T: Real> DesignedForce<T> {
    /// Evaluate `h(t)` in closed form.
    pub fn eval_h(&self, t: T) -> T {
        (self.evaluator)(t)
    }

    pub fn period(&self) -> T {
        self.period
    }

    /// Largest |h| over the sample grid.
    pub fn sup_abs(&self) -> T {
        self.bound
    }

    /// View the designed force as a state force `H = h(t) cos q`.
    pub fn to_force_model(&self) -> ForceModel<T> {
        ForceModel::general(HorizontalForce::new(
            self.evaluator.clone(),
            Some(self.bound),
        ))
    }
}

/// The required force along a motion at time `t`.
fn h_required<T: Real, M: Motion<T>>(motion: &M, params: &Params<T>, t: T) -> T {
    let qd = motion.qdot(t);
    let qdd = motion.qddot(t);
    let (_, fdot, fddot) = pivot(t, params);
    let (sq, cq) = motion.sin_cos_q(t);
    let p = qd + fdot * sq;
    let pdot = qdd + fddot * sq + fdot * qd * cq;
    (pdot + params.mu * p - (params.mu * sq + p * cq) * fdot
        + sq
        + fdot * fdot * sq * cq)
        / cq
}

/// Compute the horizontal force realizing the motion, sampled on `n`
/// uniform points over one period. The motion must keep `|cos q| >= 0.01`
/// (checked on a dense grid); grazing motions are rejected with the
/// offending time.
pub fn required_force<T: Real, M: Motion<T>>(
    motion: &M,
    params: &Params<T>,
    n: usize,
) -> Result<DesignedForce<T>, Error<T>> {
    let period = params.period;
    let scan = n.max(4096);
    let half_pi = T::FRAC_PI_2();
    let three_half_pi = fl::<T>(3.0) * half_pi;
    for i in 0..scan {
        let t = period * T::from_usize(i).unwrap() / T::from_usize(scan).unwrap();
        let q = motion.q(t);
        if q <= half_pi || q >= three_half_pi || q.cos().abs() < fl::<T>(0.01) {
            return Err(Error::MotionGrazesHorizontal { t, q });
        }
    }

    let motion = motion.clone();
    let params_c = *params;
    let evaluator: Arc<dyn Fn(T) -> T + Send + Sync> =
        Arc::new(move |t| h_required(&motion, &params_c, t));

    let mut samples = Vec::with_capacity(n);
    let mut bound = T::zero();
    for i in 0..n {
        let t = period * T::from_usize(i).unwrap() / T::from_usize(n).unwrap();
        let h = evaluator(t);
        bound = bound.max(h.abs());
        samples.push((t, h));
    }
    Ok(DesignedForce {
        samples,
        evaluator,
        bound,
        period,
    })
}

/// Forward verification of a designed force.
#[derive(Debug, Clone)]
pub struct DesignReport<T: Real> {
    /// Sup over one period of |q_simulated - q_prescribed|.
    pub sup_error: T,
    pub orbit: OrbitResult<T>,
}

/// Integrate the full system under the designed force from the motion's
/// initial state, measure the tracking error over one period, then locate
/// and classify the periodic orbit through that point.
pub fn verify_design<T: Real, M: Motion<T>>(
    motion: &M,
    force: &DesignedForce<T>,
    params: &Params<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<DesignReport<T>, Error<T>> {
    let fm = force.to_force_model();
    let q0 = motion.q(T::zero());
    let (_, fdot0, _) = pivot(T::zero(), params);
    let p0 = motion.qdot(T::zero()) + fdot0 * motion.sin_cos_q(T::zero()).0;

    let field = orbits::phase_field(SystemKind::Full, params, &fm);
    let out = integrate::integrate(field, T::zero(), [q0, p0], params.period, cfg, &[])
        .map_err(|e| match e.kind {
            integrate::FailureKind::MaxStepsExceeded => Error::MaxStepsExceeded {
                max_steps: cfg.max_steps,
                t: e.t,
            },
            integrate::FailureKind::NonFinite => Error::NonFiniteField { t: e.t },
        })?;

    let n = 4096usize;
    let mut sup_error = T::zero();
    for i in 0..=n {
        let t = params.period * T::from_usize(i).unwrap() / T::from_usize(n).unwrap();
        let q_sim = out.trajectory.eval(t)[0];
        sup_error = sup_error.max((q_sim - motion.q(t)).abs());
    }

    log::warn!(
        "designed forces carry a term proportional to k; averaging-based \
         hypothesis checks do not apply to them"
    );
    let orbit = orbits::find_periodic((q0, p0), SystemKind::Full, params, &fm, cfg)?;
    Ok(DesignReport { sup_error, orbit })
}
