//! Closed-form physics of the Kapitza-Whitney pendulum: vector fields,
//! pivot law, averaging constants, critical-point algebra, theorem
//! hypothesis checks, and the a-priori momentum bound.
//!
//! Phase variables are `(q, p)` with `q = pi` the upright position. The
//! pivot height is `f(t) = (a/k) sin(omega k t)`, so its velocity is
//! `phi(kt) = a omega cos(omega k t)`. The horizontal force enters the
//! momentum equation with a plus sign: `dp/dt = ... + H(q, p, t)`, where
//! the built-in force variants have the structure `H = h(t) cos q`.

use std::sync::Arc;

use crate::error::Error;
use crate::spline::PeriodicSpline;
use crate::{fl, Real};

/// Physical and forcing constants of the pendulum.
///
/// `k` is the fast-frequency multiplier (the small parameter of the
/// averaging is `1/k`), `omega` the vibration frequency factor, `a` the
/// vibration amplitude, and `period` the slow period (default `2 pi`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params<T: Real> {
    pub mu: T,
    pub k: u32,
    pub omega: T,
    pub a: T,
    pub period: T,
}

impl<T: Real> Params<T> {
    /// Standard constructor; `omega` and `k` are positive integers so the
    /// fast period divides the slow period exactly.
    pub fn new(mu: T, k: u32, omega: u32, a: T) -> Result<Self, Error<T>> {
        Self::validate(mu, k, T::from_u32(omega).unwrap(), a, T::TAU())
    }

    /// Relaxed mode accepting a non-integer frequency factor. Exact
    /// T-periodicity of the composite system may fail; a warning is logged.
    pub fn with_real_omega(mu: T, k: u32, omega: T, a: T) -> Result<Self, Error<T>> {
        if omega.fract() != T::zero() {
            log::warn!(
                "non-integer omega = {omega}: the composite system may not be exactly T-periodic"
            );
        }
        Self::validate(mu, k, omega, a, T::TAU())
    }

    /// Same parameters with a different slow period.
    pub fn with_period(mut self, period: T) -> Result<Self, Error<T>> {
        if !(period > T::zero()) {
            return Err(Error::InvalidParams(format!("period must be > 0, got {period}")));
        }
        self.period = period;
        Ok(self)
    }

    /// Same parameters with a different fast-frequency multiplier.
    pub fn with_k(mut self, k: u32) -> Result<Self, Error<T>> {
        if k < 1 {
            return Err(Error::InvalidParams("k must be >= 1".into()));
        }
        self.k = k;
        Ok(self)
    }

    fn validate(mu: T, k: u32, omega: T, a: T, period: T) -> Result<Self, Error<T>> {
        if !(mu >= T::zero()) || !mu.is_finite() {
            return Err(Error::InvalidParams(format!("mu must be >= 0, got {mu}")));
        }
        if k < 1 {
            return Err(Error::InvalidParams("k must be >= 1".into()));
        }
        if !(omega >= T::one()) {
            return Err(Error::InvalidParams(format!("omega must be >= 1, got {omega}")));
        }
        if !(a >= T::zero()) || !a.is_finite() {
            return Err(Error::InvalidParams(format!("a must be >= 0, got {a}")));
        }
        Ok(Self {
            mu,
            k,
            omega,
            a,
            period,
        })
    }

    pub fn fast_period(&self) -> T {
        self.period / T::from_u32(self.k).unwrap()
    }

    /// Pivot vertical velocity `phi(kt) = a omega cos(omega k t)`.
    pub fn phi(&self, t: T) -> T {
        let kk = T::from_u32(self.k).unwrap();
        self.a * self.omega * (self.omega * kk * t).cos()
    }
}

/// A point of the phase plane at a given time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State<T: Real> {
    pub q: T,
    pub p: T,
    pub t: T,
}

impl<T: Real> State<T> {
    pub fn new(q: T, p: T, t: T) -> Self {
        Self { q, p, t }
    }
}

/// General state-dependent horizontal force `H(q, p, t)`, supplied
/// programmatically. Partial derivatives default to central differences;
/// implementors with analytic structure should override them.
pub trait StateForce<T: Real>: Send + Sync {
    fn eval(&self, q: T, p: T, t: T) -> T;

    fn partial_q(&self, q: T, p: T, t: T) -> T {
        let dq = T::epsilon().cbrt();
        (self.eval(q + dq, p, t) - self.eval(q - dq, p, t)) / (fl::<T>(2.0) * dq)
    }

    fn partial_p(&self, q: T, p: T, t: T) -> T {
        let dp = T::epsilon().cbrt();
        (self.eval(q, p + dp, t) - self.eval(q, p - dp, t)) / (fl::<T>(2.0) * dp)
    }

    /// A declared bound `sup |H|`, if one is known.
    fn bound(&self) -> Option<T> {
        None
    }

    /// If the force has the structure `H = h(t) cos q`, the scalar `h(t)`.
    fn horizontal(&self, _t: T) -> Option<T> {
        None
    }
}

/// Constant state force `H(q, p, t) = value`, independent of everything.
#[derive(Debug, Clone, Copy)]
pub struct ConstantForce<T: Real>(pub T);

impl<T: Real> StateForce<T> for ConstantForce<T> {
    fn eval(&self, _q: T, _p: T, _t: T) -> T {
        self.0
    }
    fn partial_q(&self, _q: T, _p: T, _t: T) -> T {
        T::zero()
    }
    fn partial_p(&self, _q: T, _p: T, _t: T) -> T {
        T::zero()
    }
    fn bound(&self) -> Option<T> {
        Some(self.0.abs())
    }
}

/// Force of the form `H = h(t) cos q` with `h` given as a closure.
#[derive(Clone)]
pub struct HorizontalForce<T: Real> {
    h: Arc<dyn Fn(T) -> T + Send + Sync>,
    bound: Option<T>,
}

impl<T: Real> HorizontalForce<T> {
    pub fn new(h: Arc<dyn Fn(T) -> T + Send + Sync>, bound: Option<T>) -> Self {
        Self { h, bound }
    }
}

impl<T: Real> StateForce<T> for HorizontalForce<T> {
    fn eval(&self, q: T, _p: T, t: T) -> T {
        (self.h)(t) * q.cos()
    }
    fn partial_q(&self, q: T, _p: T, t: T) -> T {
        -(self.h)(t) * q.sin()
    }
    fn partial_p(&self, _q: T, _p: T, _t: T) -> T {
        T::zero()
    }
    fn bound(&self) -> Option<T> {
        self.bound
    }
    fn horizontal(&self, t: T) -> Option<T> {
        Some((self.h)(t))
    }
}

/// Horizontal force specification, evaluable as `H(q, p, t)` in the
/// momentum equation.
#[derive(Clone)]
pub enum ForceModel<T: Real> {
    /// No horizontal force.
    Zero,
    /// `H = (c + A sin t) cos q`.
    Harmonic { c: T, amplitude: T },
    /// `H = h(t) cos q` with `h` interpolated from samples by a periodic
    /// cubic spline.
    Tabulated(PeriodicSpline<T>),
    /// General `H(q, p, t)` supplied programmatically.
    General(Arc<dyn StateForce<T>>),
}

impl<T: Real> ForceModel<T> {
    /// Build a tabulated force from `(t, value)` samples over `[0, period)`.
    pub fn tabulated(samples: &[(T, T)], period: T) -> Result<Self, Error<T>> {
        Ok(ForceModel::Tabulated(PeriodicSpline::new(samples, period)?))
    }

    pub fn general(force: impl StateForce<T> + 'static) -> Self {
        ForceModel::General(Arc::new(force))
    }

    /// The contribution `H(q, p, t)` to the momentum equation.
    pub fn eval(&self, q: T, p: T, t: T) -> T {
        match self {
            ForceModel::Zero => T::zero(),
            ForceModel::Harmonic { c, amplitude } => (*c + *amplitude * t.sin()) * q.cos(),
            ForceModel::Tabulated(s) => s.eval(t) * q.cos(),
            ForceModel::General(f) => f.eval(q, p, t),
        }
    }

    pub fn partial_q(&self, q: T, p: T, t: T) -> T {
        match self {
            ForceModel::Zero => T::zero(),
            ForceModel::Harmonic { c, amplitude } => -(*c + *amplitude * t.sin()) * q.sin(),
            ForceModel::Tabulated(s) => -s.eval(t) * q.sin(),
            ForceModel::General(f) => f.partial_q(q, p, t),
        }
    }

    pub fn partial_p(&self, q: T, p: T, t: T) -> T {
        match self {
            ForceModel::Zero | ForceModel::Harmonic { .. } | ForceModel::Tabulated(_) => T::zero(),
            ForceModel::General(f) => f.partial_p(q, p, t),
        }
    }

    /// `h(t)` when the force has the structure `H = h(t) cos q`.
    pub fn horizontal(&self, t: T) -> Option<T> {
        match self {
            ForceModel::Zero => Some(T::zero()),
            ForceModel::Harmonic { c, amplitude } => Some(*c + *amplitude * t.sin()),
            ForceModel::Tabulated(s) => Some(s.eval(t)),
            ForceModel::General(f) => f.horizontal(t),
        }
    }

    pub fn is_horizontal(&self) -> bool {
        match self {
            ForceModel::Zero | ForceModel::Harmonic { .. } | ForceModel::Tabulated(_) => true,
            ForceModel::General(f) => f.horizontal(T::zero()).is_some(),
        }
    }

    /// `sup |H|` over the phase strip, if available.
    pub fn bound(&self) -> Option<T> {
        match self {
            ForceModel::Zero => Some(T::zero()),
            ForceModel::Harmonic { c, amplitude } => Some(c.abs() + amplitude.abs()),
            ForceModel::Tabulated(s) => Some(s.sup_abs(8192)),
            ForceModel::General(f) => f.bound(),
        }
    }
}

/// Pivot height, velocity, and acceleration at time `t`:
/// `f = (a/k) sin(omega k t)`, `f' = a omega cos(omega k t)`,
/// `f'' = -a omega^2 k sin(omega k t)`.
pub fn pivot<T: Real>(t: T, params: &Params<T>) -> (T, T, T) {
    let k = T::from_u32(params.k).unwrap();
    let w = params.omega;
    let arg = w * k * t;
    let f = params.a / k * arg.sin();
    let fdot = params.a * w * arg.cos();
    let fddot = -params.a * w * w * k * arg.sin();
    (f, fdot, fddot)
}

/// Right-hand side of the full first-order system:
/// `dq = p - phi sin q`,
/// `dp = -mu p + [mu sin q + p cos q] phi - sin q - (phi^2/2) sin 2q + H`.
pub fn full_rhs<T: Real>(s: &State<T>, params: &Params<T>, force: &ForceModel<T>) -> (T, T) {
    let phi = params.phi(s.t);
    let (sq, cq) = (s.q.sin(), s.q.cos());
    let two = fl::<T>(2.0);
    let dq = s.p - phi * sq;
    let dp = -params.mu * s.p + (params.mu * sq + s.p * cq) * phi
        - sq
        - phi * phi / two * (two * s.q).sin()
        + force.eval(s.q, s.p, s.t);
    (dq, dp)
}

/// Right-hand side of the averaged system:
/// `dq = p`, `dp = -mu p - sin q - (Phi/2) sin 2q + H`.
pub fn averaged_rhs<T: Real>(
    s: &State<T>,
    phi_mean: T,
    params: &Params<T>,
    force: &ForceModel<T>,
) -> (T, T) {
    let two = fl::<T>(2.0);
    let dq = s.p;
    let dp = -params.mu * s.p - s.q.sin() - phi_mean / two * (two * s.q).sin()
        + force.eval(s.q, s.p, s.t);
    (dq, dp)
}

/// Mean of `phi^2` over its period: `Phi = a^2 omega^2 / 2`.
pub fn phi_mean_square<T: Real>(params: &Params<T>) -> T {
    let aw = params.a * params.omega;
    aw * aw / fl::<T>(2.0)
}

/// Companion quadrature path: integrates `phi^2(kt)` numerically over one
/// fast period with composite Simpson on `n` panels (`n` even).
pub fn phi_mean_square_quadrature<T: Real>(params: &Params<T>, n: usize) -> T {
    let n = if n % 2 == 0 { n } else { n + 1 };
    let period = params.fast_period();
    let h = period / T::from_usize(n).unwrap();
    let f = |t: T| {
        let p = params.phi(t);
        p * p
    };
    let mut acc = f(T::zero()) + f(period);
    for i in 1..n {
        let w = if i % 2 == 1 { fl::<T>(4.0) } else { fl::<T>(2.0) };
        acc = acc + w * f(h * T::from_usize(i).unwrap());
    }
    acc * h / fl::<T>(3.0) / period
}

/// Effective restoring force of the averaged system:
/// `f(q) = -sin q - (Phi/2) sin 2q`.
pub fn effective_force<T: Real>(q: T, phi_mean: T) -> T {
    let two = fl::<T>(2.0);
    -q.sin() - phi_mean / two * (two * q).sin()
}

/// Critical points of the effective force inside `[0, 2 pi]`.
///
/// The interior pair `(qmax2, qmin2)` exists once `Phi >= 1` (degenerate at
/// `Phi = 1`, where both collapse to `pi`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoints<T: Real> {
    pub phi: T,
    pub lambda1: T,
    pub lambda2: T,
    pub qmin1: T,
    pub qmax1: T,
    pub inner: Option<InnerCriticalPoints<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerCriticalPoints<T: Real> {
    pub qmax2: T,
    pub qmin2: T,
}

/// `lambda_{1,2} = (-1 +- sqrt(1 + 8 Phi^2)) / (4 Phi)`,
/// `qmin1 = arccos lambda_1`, `qmax1 = 2 pi - qmin1`, and for `Phi >= 1`
/// additionally `qmax2 = arccos lambda_2`, `qmin2 = 2 pi - qmax2`.
pub fn critical_points<T: Real>(phi_mean: T) -> Result<CriticalPoints<T>, Error<T>> {
    if !(phi_mean > T::zero()) {
        return Err(Error::NonPositivePhi(phi_mean));
    }
    let one = T::one();
    let four = fl::<T>(4.0);
    let eight = fl::<T>(8.0);
    let root = (one + eight * phi_mean * phi_mean).sqrt();
    let lambda1 = (-one + root) / (four * phi_mean);
    let lambda2 = (-one - root) / (four * phi_mean);
    let qmin1 = lambda1.acos();
    let qmax1 = T::TAU() - qmin1;
    let inner = if lambda2 >= -one - fl::<T>(1e-12) {
        let qmax2 = lambda2.max(-one).acos();
        Some(InnerCriticalPoints {
            qmax2,
            qmin2: T::TAU() - qmax2,
        })
    } else {
        None
    };
    Ok(CriticalPoints {
        phi: phi_mean,
        lambda1,
        lambda2,
        qmin1,
        qmax1,
        inner,
    })
}

/// Hypothesis check for the existence theorem: `H(pi/2, 0, t) < 1` and
/// `H(3 pi/2, 0, t) > -1` for all `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem1Report<T: Real> {
    pub satisfied: bool,
    /// Smallest absolute slack over both inequalities.
    pub margin: T,
}

/// Hypothesis check for the two-solution theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Theorem2Report<T: Real> {
    /// `Phi <= 1`: the theorem does not apply (distinct from violated).
    NotApplicable { phi: T },
    Checked {
        satisfied: bool,
        /// Signed min slacks: the two theorem-1 inequalities, then
        /// `H(qmax2, 0, t) + f(qmax2) > 0` and `-f(qmin2) - H(qmin2, 0, t) > 0`.
        margins: [T; 4],
    },
}

/// Minimum of `g` over `grid_n` equispaced points in `[0, period)`, with a
/// refinement pass around the coarse minimizer.
fn grid_min<T: Real>(g: impl Fn(T) -> T, period: T, grid_n: usize) -> T {
    let n = grid_n.max(2);
    let mut best = T::infinity();
    let mut best_t = T::zero();
    for i in 0..n {
        let t = period * T::from_usize(i).unwrap() / T::from_usize(n).unwrap();
        let v = g(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    // Local refinement: shrink a bracket around the coarse minimizer.
    let mut half_width = period / T::from_usize(n).unwrap();
    let mut center = best_t;
    for _ in 0..4 {
        for i in 0..=64usize {
            let t = center - half_width
                + fl::<T>(2.0) * half_width * T::from_usize(i).unwrap() / fl::<T>(64.0);
            let v = g(t);
            if v < best {
                best = v;
                center = t;
            }
        }
        half_width = half_width / fl::<T>(16.0);
    }
    best
}

/// Evaluates the theorem-1 inequalities on a `grid_n`-point time grid.
/// Forces of the structure `H = h(t) cos q` satisfy them identically with
/// margin exactly 1 since `cos(pi/2) = 0`; that case is answered in closed
/// form.
pub fn check_theorem1<T: Real>(
    force: &ForceModel<T>,
    params: &Params<T>,
    grid_n: usize,
) -> Theorem1Report<T> {
    if force.is_horizontal() {
        return Theorem1Report {
            satisfied: true,
            margin: T::one(),
        };
    }
    let half_pi = T::FRAC_PI_2();
    let slack1 = grid_min(
        |t| T::one() - force.eval(half_pi, T::zero(), t),
        params.period,
        grid_n,
    );
    let slack2 = grid_min(
        |t| force.eval(fl::<T>(3.0) * half_pi, T::zero(), t) + T::one(),
        params.period,
        grid_n,
    );
    let satisfied = slack1 > T::zero() && slack2 > T::zero();
    Theorem1Report {
        satisfied,
        margin: slack1.abs().min(slack2.abs()),
    }
}

/// Evaluates the two-solution theorem: requires `Phi > 1` plus the
/// theorem-1 inequalities and `H(qmax2, 0, t) > -f(qmax2)`,
/// `H(qmin2, 0, t) < -f(qmin2)` over the time grid.
pub fn check_theorem2<T: Real>(
    force: &ForceModel<T>,
    params: &Params<T>,
    grid_n: usize,
) -> Theorem2Report<T> {
    let phi = phi_mean_square(params);
    if !(phi > T::one()) {
        return Theorem2Report::NotApplicable { phi };
    }
    let cp = critical_points(phi).expect("Phi > 1 is positive");
    let inner = cp.inner.expect("Phi > 1 has interior critical points");

    let t1 = check_theorem1(force, params, grid_n);
    let (m1, m2) = if force.is_horizontal() {
        (T::one(), T::one())
    } else {
        let half_pi = T::FRAC_PI_2();
        (
            grid_min(
                |t| T::one() - force.eval(half_pi, T::zero(), t),
                params.period,
                grid_n,
            ),
            grid_min(
                |t| force.eval(fl::<T>(3.0) * half_pi, T::zero(), t) + T::one(),
                params.period,
                grid_n,
            ),
        )
    };
    let f_qmax2 = effective_force(inner.qmax2, phi);
    let f_qmin2 = effective_force(inner.qmin2, phi);
    let m3 = grid_min(
        |t| force.eval(inner.qmax2, T::zero(), t) + f_qmax2,
        params.period,
        grid_n,
    );
    let m4 = grid_min(
        |t| -f_qmin2 - force.eval(inner.qmin2, T::zero(), t),
        params.period,
        grid_n,
    );
    let satisfied = t1.satisfied && m3 > T::zero() && m4 > T::zero();
    Theorem2Report::Checked {
        satisfied,
        margins: [m1, m2, m3, m4],
    }
}

/// Gronwall certificate: a constant `c` such that any T-periodic solution
/// satisfies `|p(t)| <= c`. Constants: `c1 = a omega`, `c2 = mu + a omega`,
/// `c3 = mu a omega + 1 + (a omega)^2 / 2 + sup|H|`; then
/// `c = (c1 + c3/c2) e^{c2 T} - c3/c2` for `c2 > 0`, else `c1 + c3 T`.
///
/// The bound may be astronomically conservative; it is a certificate, not
/// an estimate.
pub fn apriori_bound<T: Real>(params: &Params<T>, force: &ForceModel<T>) -> Result<T, Error<T>> {
    let m_h = force.bound().ok_or(Error::UnboundedForce)?;
    let aw = params.a * params.omega;
    let c1 = aw;
    let c2 = params.mu + aw;
    let c3 = params.mu * aw + T::one() + aw * aw / fl::<T>(2.0) + m_h;
    if c2 > T::zero() {
        Ok((c1 + c3 / c2) * (c2 * params.period).exp() - c3 / c2)
    } else {
        Ok(c1 + c3 * params.period)
    }
}

/// Map Newtonian variables `(x, xdot)` at time `t` to phase variables:
/// `q = x`, `p = xdot + f'(t) sin x`.
pub fn to_phase<T: Real>(x: T, xdot: T, t: T, params: &Params<T>) -> State<T> {
    let (_, fdot, _) = pivot(t, params);
    State {
        q: x,
        p: xdot + fdot * x.sin(),
        t,
    }
}

/// Inverse of [`to_phase`]: recovers `(x, xdot)` exactly.
pub fn from_phase<T: Real>(s: &State<T>, params: &Params<T>) -> (T, T) {
    let (_, fdot, _) = pivot(s.t, params);
    (s.q, s.p - fdot * s.q.sin())
}

/// Right-hand side of the second-order Newton form in `(x, xdot)`:
/// `xddot = -mu xdot - (1 + f''(t)) sin x + H(x, xdot + f' sin x, t)`.
pub fn second_order_rhs<T: Real>(
    x: T,
    xdot: T,
    t: T,
    params: &Params<T>,
    force: &ForceModel<T>,
) -> (T, T) {
    let (_, fdot, fddot) = pivot(t, params);
    let p = xdot + fdot * x.sin();
    let xddot = -params.mu * xdot - (T::one() + fddot) * x.sin() + force.eval(x, p, t);
    (xdot, xddot)
}

/// Analytic Jacobian `d(dq, dp)/d(q, p)` of the full system. The trace is
/// identically `-mu` whenever `H` does not depend on `p`.
pub fn rhs_jacobian<T: Real>(
    s: &State<T>,
    params: &Params<T>,
    force: &ForceModel<T>,
) -> [[T; 2]; 2] {
    let phi = params.phi(s.t);
    let (sq, cq) = (s.q.sin(), s.q.cos());
    let two = fl::<T>(2.0);
    let c2q = (two * s.q).cos();
    let j00 = -phi * cq;
    let j01 = T::one();
    let j10 =
        (params.mu * cq - s.p * sq) * phi - cq - phi * phi * c2q + force.partial_q(s.q, s.p, s.t);
    let j11 = -params.mu + phi * cq + force.partial_p(s.q, s.p, s.t);
    [[j00, j01], [j10, j11]]
}

/// Analytic Jacobian of the averaged system.
pub fn averaged_jacobian<T: Real>(
    s: &State<T>,
    phi_mean: T,
    params: &Params<T>,
    force: &ForceModel<T>,
) -> [[T; 2]; 2] {
    let two = fl::<T>(2.0);
    let j10 = -s.q.cos() - phi_mean * (two * s.q).cos() + force.partial_q(s.q, s.p, s.t);
    let j11 = -params.mu + force.partial_p(s.q, s.p, s.t);
    [[T::zero(), T::one()], [j10, j11]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn params(mu: f64, k: u32, omega: u32, a: f64) -> Params<f64> {
        Params::new(mu, k, omega, a).unwrap()
    }

    #[test]
    fn pivot_examples() {
        let p = params(1.0, 10, 10, 1.0);
        let (f, fdot, fddot) = pivot(0.0, &p);
        assert_eq!(f, 0.0);
        assert_eq!(fdot, 10.0);
        assert_eq!(fddot, 0.0);

        // omega k t = pi/2: fddot = -a omega^2 k = -1000.
        let (_, _, fddot) = pivot(PI / 200.0, &p);
        assert!((fddot + 1000.0).abs() < 1e-9);

        let p0 = params(1.0, 10, 10, 0.0);
        for t in [0.0, 0.3, 2.0, 6.0] {
            assert_eq!(pivot(t, &p0), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn full_rhs_examples() {
        let p = params(1.0, 10, 10, 1.0);
        let (dq, dp) = full_rhs(&State::new(PI, 0.0, 0.0), &p, &ForceModel::Zero);
        assert!(dq.abs() < 1e-13 && dp.abs() < 1e-13);

        let (dq, dp) = full_rhs(&State::new(FRAC_PI_2, 0.0, 0.0), &p, &ForceModel::Zero);
        assert!((dq + 10.0).abs() < 1e-12, "dq = {dq}");
        assert!((dp - 9.0).abs() < 1e-12, "dp = {dp}");

        let force = ForceModel::Harmonic {
            c: 10.0,
            amplitude: 1.0,
        };
        let (dq, dp) = full_rhs(&State::new(PI, 0.0, 0.0), &p, &force);
        assert!(dq.abs() < 1e-13);
        assert!((dp + 10.0).abs() < 1e-12);
    }

    #[test]
    fn averaged_rhs_examples() {
        let p = params(1.0, 10, 10, 1.0);
        let phi = 50.0;
        let (dq, dp) = averaged_rhs(&State::new(PI, 0.0, 0.0), phi, &p, &ForceModel::Zero);
        assert!(dq.abs() < 1e-15 && dp.abs() < 1e-13);

        let (_, dp) = averaged_rhs(&State::new(FRAC_PI_2, 0.0, 0.3), phi, &p, &ForceModel::Zero);
        assert!((dp + 1.0).abs() < 1e-12);

        let (_, dp) = averaged_rhs(
            &State::new(3.0 * FRAC_PI_2, 0.0, 0.3),
            phi,
            &p,
            &ForceModel::Zero,
        );
        assert!((dp - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phi_mean_square_examples() {
        assert!((phi_mean_square(&params(1.0, 10, 10, 1.0)) - 50.0).abs() < 1e-12);
        assert!((phi_mean_square(&params(1.0, 10, 2, 1.0)) - 2.0).abs() < 1e-12);
        assert_eq!(phi_mean_square(&params(1.0, 10, 5, 0.0)), 0.0);
    }

    #[test]
    fn phi_mean_square_matches_quadrature() {
        for (k, omega, a) in [(10u32, 10u32, 1.0), (3, 4, 2.0), (7, 2, 0.5)] {
            let p = params(0.0, k, omega, a);
            let analytic = phi_mean_square(&p);
            let quad = phi_mean_square_quadrature(&p, 10_000);
            assert!(
                (analytic - quad).abs() < 1e-12 * analytic.max(1.0),
                "k={k} omega={omega} a={a}: {analytic} vs {quad}"
            );
        }
    }

    #[test]
    fn effective_force_examples() {
        for phi in [0.1, 1.0, 50.0] {
            assert!((effective_force(FRAC_PI_2, phi) + 1.0).abs() < 1e-13);
            assert!((effective_force(3.0 * FRAC_PI_2, phi) - 1.0).abs() < 1e-13);
            assert!(effective_force(PI, phi).abs() < 1e-13);
        }
    }

    #[test]
    fn critical_points_examples() {
        let cp = critical_points(1.0f64).unwrap();
        assert!((cp.lambda1 - 0.5).abs() < 1e-15);
        assert!((cp.lambda2 + 1.0).abs() < 1e-15);
        let inner = cp.inner.unwrap();
        assert!((inner.qmax2 - PI).abs() < 1e-12);
        assert!((inner.qmin2 - PI).abs() < 1e-12);

        let cp = critical_points(1e-8).unwrap();
        assert!((cp.qmin1 - FRAC_PI_2).abs() < 1e-6);
        assert!(cp.inner.is_none());

        let cp = critical_points(1e8).unwrap();
        let inner = cp.inner.unwrap();
        assert!((inner.qmin2 - 5.0 * PI / 4.0).abs() < 1e-6);
        assert!((inner.qmax2 - 3.0 * PI / 4.0).abs() < 1e-6);

        assert!(critical_points(0.0).is_err());
        assert!(critical_points(-1.0).is_err());
    }

    #[test]
    fn critical_points_are_roots_of_derivative() {
        // Derivative of the effective force: -cos q - Phi cos 2q.
        let deriv = |q: f64, phi: f64| -q.cos() - phi * (2.0 * q).cos();
        for phi in [0.2, 0.9, 1.0, 3.0, 50.0, 1e6] {
            let cp = critical_points(phi).unwrap();
            assert!(deriv(cp.qmin1, phi).abs() < 1e-12 * phi.max(1.0));
            assert!(deriv(cp.qmax1, phi).abs() < 1e-12 * phi.max(1.0));
            if let Some(inner) = cp.inner {
                assert!(deriv(inner.qmax2, phi).abs() < 1e-11 * phi.max(1.0));
                assert!(deriv(inner.qmin2, phi).abs() < 1e-11 * phi.max(1.0));
            }
        }
    }

    #[test]
    fn critical_points_bracket_extrema() {
        for phi in [0.3, 2.0, 50.0] {
            let cp = critical_points(phi).unwrap();
            let eps = 1e-4;
            // qmin1 is a local minimum of f.
            let f = |q: f64| effective_force(q, phi);
            assert!(f(cp.qmin1 - eps) > f(cp.qmin1) && f(cp.qmin1 + eps) > f(cp.qmin1));
            assert!(f(cp.qmax1 - eps) < f(cp.qmax1) && f(cp.qmax1 + eps) < f(cp.qmax1));
            if phi > 1.0 {
                let inner = cp.inner.unwrap();
                assert!(f(inner.qmax2 - eps) < f(inner.qmax2));
                assert!(f(inner.qmax2 + eps) < f(inner.qmax2));
                assert!(f(inner.qmin2 - eps) > f(inner.qmin2));
                assert!(f(inner.qmin2 + eps) > f(inner.qmin2));
            }
        }
    }

    #[test]
    fn critical_points_interval_invariants() {
        for phi in [0.01, 0.5, 1.5, 20.0] {
            let cp = critical_points(phi).unwrap();
            assert!(cp.lambda1 > 0.0 && cp.lambda1 < std::f64::consts::SQRT_2 / 2.0);
            assert!(cp.lambda2 <= -std::f64::consts::SQRT_2 / 2.0 + 1e-15);
            assert!(cp.qmin1 > PI / 4.0 && cp.qmin1 < FRAC_PI_2);
            assert!((cp.qmax1 - (TAU - cp.qmin1)).abs() < 1e-15);
            if let Some(inner) = cp.inner {
                assert!(inner.qmax2 > 3.0 * PI / 4.0 - 1e-12 && inner.qmax2 <= PI);
                assert!((inner.qmin2 - (TAU - inner.qmax2)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn theorem1_examples() {
        let p = params(1.0, 10, 10, 1.0);
        let r = check_theorem1(
            &ForceModel::Harmonic {
                c: 10.0,
                amplitude: 1.0,
            },
            &p,
            1024,
        );
        assert!(r.satisfied);
        assert_eq!(r.margin, 1.0);

        let r = check_theorem1(&ForceModel::general(ConstantForce(2.0)), &p, 1024);
        assert!(!r.satisfied);

        let r = check_theorem1(&ForceModel::Zero, &p, 1024);
        assert!(r.satisfied);
        assert_eq!(r.margin, 1.0);
    }

    #[test]
    fn theorem2_examples() {
        // Phi = 50: a = 1, omega = 10.
        let p = params(1.0, 10, 10, 1.0);
        match check_theorem2(&ForceModel::Zero, &p, 1024) {
            Theorem2Report::Checked { satisfied, .. } => assert!(satisfied),
            r => panic!("unexpected: {r:?}"),
        }
        match check_theorem2(
            &ForceModel::Harmonic {
                c: 0.0,
                amplitude: 0.01,
            },
            &p,
            1024,
        ) {
            Theorem2Report::Checked { satisfied, margins } => {
                assert!(satisfied, "margins {margins:?}")
            }
            r => panic!("unexpected: {r:?}"),
        }

        // Phi = 0.5: a = 1, omega = 1.
        let p = params(1.0, 10, 1, 1.0);
        assert!(matches!(
            check_theorem2(&ForceModel::Zero, &p, 1024),
            Theorem2Report::NotApplicable { .. }
        ));
    }

    #[test]
    fn apriori_bound_examples() {
        // Degenerate linear case: mu = 0, a = 0, zero force over 2 pi.
        let mut p = params(0.0, 1, 1, 0.0);
        p.mu = 0.0;
        let c = apriori_bound(&p, &ForceModel::Zero).unwrap();
        assert!((c - TAU).abs() < 1e-12);

        // mu = 1, a = 1, omega = 10, Harmonic{10, 1}.
        let p = params(1.0, 10, 10, 1.0);
        let c = apriori_bound(
            &p,
            &ForceModel::Harmonic {
                c: 10.0,
                amplitude: 1.0,
            },
        )
        .unwrap();
        let expect = (10.0 + 72.0 / 11.0) * (22.0 * PI).exp() - 72.0 / 11.0;
        assert!((c - expect).abs() < 1e-9 * expect);

        // General force without a declared bound.
        struct NoBound;
        impl StateForce<f64> for NoBound {
            fn eval(&self, _q: f64, _p: f64, t: f64) -> f64 {
                t.sin()
            }
        }
        assert!(matches!(
            apriori_bound(&p, &ForceModel::general(NoBound)),
            Err(Error::UnboundedForce)
        ));
    }

    #[test]
    fn state_transform_examples() {
        let p = params(1.0, 10, 10, 1.0);
        let s = to_phase(PI, 0.0, 0.7, &p);
        assert_eq!(s.q, PI);
        assert!(s.p.abs() < 1e-14);

        let s = to_phase(FRAC_PI_2, 0.0, 0.0, &p);
        assert!((s.p - 10.0).abs() < 1e-12);

        for (x, xdot, t) in [(1.0, -0.5, 0.3), (2.9, 4.0, 1.9), (4.4, 0.01, 6.0)] {
            let s = to_phase(x, xdot, t, &p);
            let (x2, xdot2) = from_phase(&s, &p);
            assert_eq!(x, x2);
            assert!((xdot - xdot2).abs() < 1e-14);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = params(0.7, 10, 4, 1.0);
        let force = ForceModel::Harmonic {
            c: 2.0,
            amplitude: 3.0,
        };
        let h = 1e-6;
        for (q, p0, t) in [(2.5, 0.4, 0.1), (3.5, -1.0, 2.0), (1.8, 2.0, 5.5)] {
            let jac = rhs_jacobian(&State::new(q, p0, t), &p, &force);
            let f = |q: f64, pp: f64| full_rhs(&State::new(q, pp, t), &p, &force);
            let (dq_qp, dp_qp) = f(q + h, p0);
            let (dq_qm, dp_qm) = f(q - h, p0);
            let (dq_pp, dp_pp) = f(q, p0 + h);
            let (dq_pm, dp_pm) = f(q, p0 - h);
            assert!((jac[0][0] - (dq_qp - dq_qm) / (2.0 * h)).abs() < 1e-6);
            assert!((jac[0][1] - (dq_pp - dq_pm) / (2.0 * h)).abs() < 1e-6);
            assert!((jac[1][0] - (dp_qp - dp_qm) / (2.0 * h)).abs() < 1e-5);
            assert!((jac[1][1] - (dp_pp - dp_pm) / (2.0 * h)).abs() < 1e-6);
        }
    }

    #[test]
    fn jacobian_trace_is_minus_mu() {
        let p = params(0.37, 10, 4, 1.0);
        let force = ForceModel::Harmonic {
            c: 1.0,
            amplitude: 2.0,
        };
        for (q, p0, t) in [(2.5, 0.4, 0.1), (3.9, -2.0, 1.3), (0.4, 7.0, 9.2)] {
            let jac = rhs_jacobian(&State::new(q, p0, t), &p, &force);
            assert!((jac[0][0] + jac[1][1] + p.mu).abs() < 1e-13);
        }
        // dq is linear in p.
        let jac = rhs_jacobian(&State::new(PI, 0.0, 0.0), &p, &ForceModel::Zero);
        assert_eq!(jac[0][1], 1.0);
    }

    #[test]
    fn zero_vibration_reduces_to_damped_pendulum() {
        let p = params(0.8, 10, 10, 0.0);
        for q in [0.0, 1.0, 2.2, PI, 4.4] {
            for pp in [-1.0, 0.0, 0.5] {
                for t in [0.0, 0.9, 3.3] {
                    let (dq, dp) = full_rhs(&State::new(q, pp, t), &p, &ForceModel::Zero);
                    assert!((dq - pp).abs() < 1e-15);
                    assert!((dp - (-p.mu * pp - q.sin())).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn averaging_identity() {
        // The time average of the full field over one fast period at frozen
        // (q, p) converges to the averaged field. Zero force keeps the only
        // time dependence inside phi(kt).
        let p = params(0.5, 10, 4, 1.0);
        let phi = phi_mean_square(&p);
        let fast = p.fast_period();
        let n = 10_000usize;
        for (q, pp) in [(2.0, 0.3), (PI, 0.0), (2.8, -1.2), (4.0, 2.0)] {
            let t_slow = 0.37;
            // Composite Simpson over one fast period.
            let f = |t: f64| full_rhs(&State::new(q, pp, t), &p, &ForceModel::Zero);
            let h = fast / n as f64;
            let (mut aq, mut ap) = (0.0, 0.0);
            for i in 0..=n {
                let w = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let (dq, dp) = f(t_slow + h * i as f64);
                aq += w * dq;
                ap += w * dp;
            }
            aq *= h / 3.0 / fast;
            ap *= h / 3.0 / fast;
            let (eq, ep) = averaged_rhs(&State::new(q, pp, t_slow), phi, &p, &ForceModel::Zero);
            assert!((aq - eq).abs() < 1e-8, "dq average off: {aq} vs {eq}");
            assert!((ap - ep).abs() < 1e-8, "dp average off: {ap} vs {ep}");
        }
    }

    #[test]
    fn tabulated_force_matches_harmonic_samples() {
        // Tabulate h(t) = 2 + 0.5 sin t and compare against the closed form.
        let n = 256;
        let samples: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                (t, 2.0 + 0.5 * t.sin())
            })
            .collect();
        let tab = ForceModel::tabulated(&samples, TAU).unwrap();
        let harm = ForceModel::Harmonic {
            c: 2.0,
            amplitude: 0.5,
        };
        for i in 0..100 {
            let t = TAU * i as f64 / 100.0 + 0.003;
            let q = 2.0 + 0.01 * i as f64;
            assert!((tab.eval(q, 0.0, t) - harm.eval(q, 0.0, t)).abs() < 1e-8);
        }
        assert!((tab.bound().unwrap() - 2.5).abs() < 1e-6);
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(-0.1, 10, 10, 1.0).is_err());
        assert!(Params::new(1.0, 0, 10, 1.0).is_err());
        assert!(Params::new(1.0, 10, 0, 1.0).is_err());
        assert!(Params::new(1.0, 10, 10, -1.0).is_err());
        assert!(Params::new(1.0f64, 10, 10, 1.0)
            .unwrap()
            .with_period(-1.0)
            .is_err());
        assert!(Params::with_real_omega(1.0, 10, 2.5, 1.0).is_ok());
    }
}
