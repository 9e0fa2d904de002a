//! Periodic-orbit location by Newton shooting on the stroboscopic map,
//! monodromy/Floquet analysis, stability classification, and the no-fall
//! certificate `q(t) in (pi/2, 3pi/2)`.
//!
//! Monodromy matrices come from the variational equations integrated along
//! the base trajectory (finite differences are kept as a test oracle only).
//! Full-system orbits are best seeded from averaged-system orbits: averaged
//! solutions shadow full ones for large `k`.

use num_complex::Complex;

use crate::error::Error;
use crate::integrate::{self, Direction, EventSpec, IntegratorConfig, Trajectory};
use crate::model::{
    averaged_jacobian, averaged_rhs, full_rhs, phi_mean_square, rhs_jacobian, ForceModel, Params,
    State,
};
use crate::{fl, Real};

/// Which vector field a computation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Full,
    Averaged,
}

/// Stability class from the Floquet multipliers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    AsymptoticallyStable,
    Elliptic,
    Hyperbolic,
    Degenerate,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::AsymptoticallyStable => "asymptotically_stable",
            Stability::Elliptic => "elliptic",
            Stability::Hyperbolic => "hyperbolic",
            Stability::Degenerate => "degenerate",
        }
    }
}

/// A located periodic orbit.
#[derive(Debug, Clone, Copy)]
pub struct OrbitResult<T: Real> {
    pub fixed_point: (T, T),
    /// Infinity norm of `P(x) - x` at the fixed point.
    pub residual: T,
    pub monodromy: [[T; 2]; 2],
    pub multipliers: [Complex<T>; 2],
    pub stability: Stability,
    pub q_range: (T, T),
    pub no_fall: bool,
    pub system: SystemKind,
}

/// Phase-plane vector field of the chosen system as a closure over `[q, p]`.
pub fn phase_field<'a, T: Real>(
    kind: SystemKind,
    params: &'a Params<T>,
    force: &'a ForceModel<T>,
) -> impl Fn(T, &[T; 2]) -> [T; 2] + 'a {
    let phi = phi_mean_square(params);
    move |t, y| {
        let s = State::new(y[0], y[1], t);
        let (dq, dp) = match kind {
            SystemKind::Full => full_rhs(&s, params, force),
            SystemKind::Averaged => averaged_rhs(&s, phi, params, force),
        };
        [dq, dp]
    }
}

fn jacobian_of<T: Real>(
    kind: SystemKind,
    s: &State<T>,
    phi: T,
    params: &Params<T>,
    force: &ForceModel<T>,
) -> [[T; 2]; 2] {
    match kind {
        SystemKind::Full => rhs_jacobian(s, params, force),
        SystemKind::Averaged => averaged_jacobian(s, phi, params, force),
    }
}

fn map_err<T: Real, const N: usize>(e: integrate::IntegrationFailure<T, N>) -> Error<T> {
    match e.kind {
        integrate::FailureKind::MaxStepsExceeded => Error::MaxStepsExceeded {
            max_steps: usize::MAX,
            t: e.t,
        },
        integrate::FailureKind::NonFinite => Error::NonFiniteField { t: e.t },
    }
}

/// One application of the stroboscopic (period) map from `t = 0`.
pub fn period_map<T: Real>(
    kind: SystemKind,
    x: (T, T),
    params: &Params<T>,
    force: &ForceModel<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<(T, T), Error<T>> {
    let f = phase_field(kind, params, force);
    let y = integrate::flow(f, T::zero(), [x.0, x.1], params.period, cfg).map_err(map_err)?;
    Ok((y[0], y[1]))
}

/// Monodromy matrix over one period: integrates the 2x2 variational system
/// `Y' = J(t) Y`, `Y(0) = I`, coupled to the base trajectory. Returns the
/// matrix and the period-map image of the initial state.
pub fn monodromy<T: Real>(
    kind: SystemKind,
    x: (T, T),
    params: &Params<T>,
    force: &ForceModel<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<([[T; 2]; 2], (T, T)), Error<T>> {
    let phi = phi_mean_square(params);
    let f = move |t: T, y: &[T; 6]| {
        let s = State::new(y[0], y[1], t);
        let (dq, dp) = match kind {
            SystemKind::Full => full_rhs(&s, params, force),
            SystemKind::Averaged => averaged_rhs(&s, phi, params, force),
        };
        let j = jacobian_of(kind, &s, phi, params, force);
        // Y = [[y2, y3], [y4, y5]], column-major pairs of dY = J Y.
        [
            dq,
            dp,
            j[0][0] * y[2] + j[0][1] * y[4],
            j[0][0] * y[3] + j[0][1] * y[5],
            j[1][0] * y[2] + j[1][1] * y[4],
            j[1][0] * y[3] + j[1][1] * y[5],
        ]
    };
    let y0 = [x.0, x.1, T::one(), T::zero(), T::zero(), T::one()];
    let y = integrate::flow(f, T::zero(), y0, params.period, cfg).map_err(map_err)?;
    Ok(([[y[2], y[3]], [y[4], y[5]]], (y[0], y[1])))
}

/// Eigenvalues of a 2x2 real matrix.
pub fn eigenvalues_2x2<T: Real>(m: &[[T; 2]; 2]) -> [Complex<T>; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let two = fl::<T>(2.0);
    let four = fl::<T>(4.0);
    let disc = tr * tr - four * det;
    if disc >= T::zero() {
        let r = disc.sqrt();
        [
            Complex::new((tr + r) / two, T::zero()),
            Complex::new((tr - r) / two, T::zero()),
        ]
    } else {
        let im = (-disc).sqrt() / two;
        [
            Complex::new(tr / two, im),
            Complex::new(tr / two, -im),
        ]
    }
}

fn classify<T: Real>(multipliers: &[Complex<T>; 2], mu: T) -> Stability {
    let band = fl::<T>(1e-8);
    let m0 = multipliers[0].norm();
    let m1 = multipliers[1].norm();
    if m0 < T::one() - band && m1 < T::one() - band {
        return Stability::AsymptoticallyStable;
    }
    let unit_tol = fl::<T>(1e-6);
    let nonreal = multipliers[0].im != T::zero();
    if mu == T::zero()
        && nonreal
        && (m0 - T::one()).abs() < unit_tol
        && (m1 - T::one()).abs() < unit_tol
    {
        return Stability::Elliptic;
    }
    if m0 > T::one() + band || m1 > T::one() + band {
        return Stability::Hyperbolic;
    }
    Stability::Degenerate
}

const NEWTON_TOL: f64 = 1e-10;
const NEWTON_MAX_ITERS: usize = 50;
const LINE_SEARCH_MAX_HALVINGS: usize = 20;

/// Newton shooting on `F(x) = P(x) - x` with the monodromy-based Jacobian
/// `M - I` and a backtracking line search (the period map is strongly
/// nonlinear near fall boundaries).
pub fn find_periodic<T: Real>(
    guess: (T, T),
    kind: SystemKind,
    params: &Params<T>,
    force: &ForceModel<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<OrbitResult<T>, Error<T>> {
    let tol = fl::<T>(NEWTON_TOL);
    let mut x = guess;
    let mut best = guess;
    let mut best_res = T::infinity();
    // Residuals of the last few iterates; the line search only has to beat
    // their maximum. A strictly monotone search cycles near elliptic fixed
    // points, where the undamped iteration is not monotone but converges.
    let mut recent: Vec<T> = Vec::new();

    for _iter in 0..NEWTON_MAX_ITERS {
        let (m, px) = monodromy(kind, x, params, force, cfg)?;
        let fvec = [px.0 - x.0, px.1 - x.1];
        let res = fvec[0].abs().max(fvec[1].abs());
        if res < best_res {
            best_res = res;
            best = x;
        }
        recent.push(res);
        if recent.len() > 5 {
            recent.remove(0);
        }
        let reference = recent.iter().fold(res, |a, b| a.max(*b));
        if res < tol {
            return finish_orbit(x, res, m, kind, params, force, cfg);
        }

        // Solve (M - I) d = -F.
        let a = [
            [m[0][0] - T::one(), m[0][1]],
            [m[1][0], m[1][1] - T::one()],
        ];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let scale = a[0][0]
            .abs()
            .max(a[0][1].abs())
            .max(a[1][0].abs())
            .max(a[1][1].abs())
            .max(T::one());
        if det.abs() < fl::<T>(1e-14) * scale * scale {
            return Err(Error::DegenerateJacobian { q: x.0, p: x.1 });
        }
        let d = [
            (-fvec[0] * a[1][1] + fvec[1] * a[0][1]) / det,
            (-fvec[1] * a[0][0] + fvec[0] * a[1][0]) / det,
        ];

        // Backtracking against the worst recent residual.
        let mut lambda = T::one();
        let mut accepted = false;
        for _ in 0..LINE_SEARCH_MAX_HALVINGS {
            let trial = (x.0 + lambda * d[0], x.1 + lambda * d[1]);
            match period_map(kind, trial, params, force, cfg) {
                Ok(pt) => {
                    let f_trial = (pt.0 - trial.0).abs().max((pt.1 - trial.1).abs());
                    if f_trial < reference {
                        x = trial;
                        accepted = true;
                        break;
                    }
                }
                Err(_) => {} // shrink and retry
            }
            lambda = lambda / fl::<T>(2.0);
        }
        if !accepted {
            // Full step anyway; next iteration re-evaluates.
            x = (x.0 + d[0], x.1 + d[1]);
        }
    }

    Err(Error::NewtonStagnation {
        iterations: NEWTON_MAX_ITERS,
        q: best.0,
        p: best.1,
        residual: best_res,
    })
}

fn finish_orbit<T: Real>(
    x: (T, T),
    residual: T,
    m: [[T; 2]; 2],
    kind: SystemKind,
    params: &Params<T>,
    force: &ForceModel<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<OrbitResult<T>, Error<T>> {
    let multipliers = eigenvalues_2x2(&m);
    let stability = classify(&multipliers, params.mu);
    let (no_fall, q_range) = no_fall_scan(x, kind, params, force, cfg)?;
    Ok(OrbitResult {
        fixed_point: x,
        residual,
        monodromy: m,
        multipliers,
        stability,
        q_range,
        no_fall,
        system: kind,
    })
}

fn fall_events<T: Real>() -> [EventSpec<T, 2>; 2] {
    [
        EventSpec::new(
            |_t, y: &[T; 2]| y[0] - T::FRAC_PI_2(),
            Direction::Any,
            true,
        ),
        EventSpec::new(
            |_t, y: &[T; 2]| y[0] - fl::<T>(3.0) * T::FRAC_PI_2(),
            Direction::Any,
            true,
        ),
    ]
}

/// Integrate one period with terminal fall events and scan a dense
/// sampling of q. Returns the no-fall verdict and the q-range.
fn no_fall_scan<T: Real>(
    x: (T, T),
    kind: SystemKind,
    params: &Params<T>,
    force: &ForceModel<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<(bool, (T, T)), Error<T>> {
    let f = phase_field(kind, params, force);
    let out = integrate::integrate(f, T::zero(), [x.0, x.1], params.period, cfg, &fall_events())
        .map_err(map_err)?;
    let fell = !out.events.is_empty();
    let n = 10_000usize;
    let mut qmin = T::infinity();
    let mut qmax = T::neg_infinity();
    for i in 0..=n {
        let t = out.trajectory.t_start()
            + (out.trajectory.t_end() - out.trajectory.t_start()) * T::from_usize(i).unwrap()
                / T::from_usize(n).unwrap();
        let q = out.trajectory.eval(t)[0];
        qmin = qmin.min(q);
        qmax = qmax.max(q);
    }
    let inside = qmin > T::FRAC_PI_2() && qmax < fl::<T>(3.0) * T::FRAC_PI_2();
    Ok((!fell && inside, (qmin, qmax)))
}

/// Re-certify a converged orbit: true iff no fall event fires over one
/// period and the dense-sampled q stays strictly inside `(pi/2, 3pi/2)`.
pub fn no_fall_certificate<T: Real>(
    orbit: &OrbitResult<T>,
    params: &Params<T>,
    force: &ForceModel<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<bool, Error<T>> {
    Ok(no_fall_scan(orbit.fixed_point, orbit.system, params, force, cfg)?.0)
}

/// Outcome of iterating the period map from a start point toward a stable
/// orbit.
#[derive(Debug, Clone)]
pub struct BasinProbe<T: Real> {
    /// Distance to the orbit's fixed point after each period.
    pub distances: Vec<T>,
    /// A fall event interrupted the probe.
    pub escaped: bool,
    /// Final distance below 1e-6.
    pub converged: bool,
}

/// Iterate the period map `n_periods` times from `start`, recording the
/// per-period distance to `orbit.fixed_point`. A fall event is reported as
/// escape, not an error.
pub fn basin_probe<T: Real>(
    start: (T, T),
    n_periods: usize,
    orbit: &OrbitResult<T>,
    params: &Params<T>,
    force: &ForceModel<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<BasinProbe<T>, Error<T>> {
    let f = phase_field(orbit.system, params, force);
    let target = orbit.fixed_point;
    let mut y = [start.0, start.1];
    let mut distances = Vec::with_capacity(n_periods);
    let mut escaped = false;
    for _ in 0..n_periods {
        let out =
            integrate::integrate(&f, T::zero(), y, params.period, cfg, &fall_events())
                .map_err(map_err)?;
        if !out.events.is_empty() {
            escaped = true;
            break;
        }
        y = out.trajectory.end_state();
        let (dq, dp) = (y[0] - target.0, y[1] - target.1);
        distances.push((dq * dq + dp * dp).sqrt());
    }
    let converged = !escaped
        && distances
            .last()
            .map(|d| *d < fl::<T>(1e-6))
            .unwrap_or(false);
    Ok(BasinProbe {
        distances,
        escaped,
        converged,
    })
}

/// One entry of an averaging sweep over the fast multiplier `k`.
#[derive(Debug, Clone)]
pub struct SweepPoint<T: Real> {
    pub k: u32,
    /// Sup over one period of the phase-plane distance between the full
    /// and averaged periodic orbits, or the error that prevented it.
    pub distance: Result<T, Error<T>>,
}

/// For each `k`, find the full-system orbit seeded from the averaged one
/// and report the sup-distance between the two orbits over one period.
/// Per-k failures are recorded, not fatal.
pub fn averaging_sweep<T: Real>(
    k_values: &[u32],
    template: &Params<T>,
    force: &ForceModel<T>,
    cfg_for: impl Fn(&Params<T>) -> IntegratorConfig<T>,
) -> Result<Vec<SweepPoint<T>>, Error<T>> {
    // The averaged orbit does not depend on k.
    let avg_cfg = cfg_for(template);
    let averaged = find_periodic(
        (T::PI(), T::zero()),
        SystemKind::Averaged,
        template,
        force,
        &avg_cfg,
    )?;
    let avg_traj = orbit_trajectory(&averaged, template, force, &avg_cfg)?;

    let mut out = Vec::with_capacity(k_values.len());
    for &k in k_values {
        let distance = (|| {
            let params_k = template.with_k(k)?;
            let cfg = cfg_for(&params_k);
            let full = find_periodic(
                averaged.fixed_point,
                SystemKind::Full,
                &params_k,
                force,
                &cfg,
            )?;
            let full_traj = orbit_trajectory(&full, &params_k, force, &cfg)?;
            let n = 2048usize;
            let mut sup = T::zero();
            for i in 0..=n {
                let t = template.period * T::from_usize(i).unwrap() / T::from_usize(n).unwrap();
                let a = avg_traj.eval(t);
                let b = full_traj.eval(t);
                let (dq, dp) = (a[0] - b[0], a[1] - b[1]);
                sup = sup.max((dq * dq + dp * dp).sqrt());
            }
            Ok(sup)
        })();
        out.push(SweepPoint { k, distance });
    }
    Ok(out)
}

/// Dense trajectory of one period of a converged orbit.
pub fn orbit_trajectory<T: Real>(
    orbit: &OrbitResult<T>,
    params: &Params<T>,
    force: &ForceModel<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<Trajectory<T, 2>, Error<T>> {
    let f = phase_field(orbit.system, params, force);
    let out = integrate::integrate(
        f,
        T::zero(),
        [orbit.fixed_point.0, orbit.fixed_point.1],
        params.period,
        cfg,
        &[],
    )
    .map_err(map_err)?;
    Ok(out.trajectory)
}

/// Finite-difference monodromy oracle (test use): perturbs the initial
/// state instead of integrating the variational equations.
pub fn monodromy_finite_difference<T: Real>(
    kind: SystemKind,
    x: (T, T),
    params: &Params<T>,
    force: &ForceModel<T>,
    cfg: &IntegratorConfig<T>,
    eps: T,
) -> Result<[[T; 2]; 2], Error<T>> {
    let two = fl::<T>(2.0);
    let pqp = period_map(kind, (x.0 + eps, x.1), params, force, cfg)?;
    let pqm = period_map(kind, (x.0 - eps, x.1), params, force, cfg)?;
    let ppp = period_map(kind, (x.0, x.1 + eps), params, force, cfg)?;
    let ppm = period_map(kind, (x.0, x.1 - eps), params, force, cfg)?;
    Ok([
        [(pqp.0 - pqm.0) / (two * eps), (ppp.0 - ppm.0) / (two * eps)],
        [(pqp.1 - pqm.1) / (two * eps), (ppp.1 - ppm.1) / (two * eps)],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ConstantForce;
    use std::f64::consts::{E, PI, TAU};

    fn fig1a() -> (Params<f64>, ForceModel<f64>) {
        (
            Params::new(1.0, 10, 10, 1.0).unwrap(),
            ForceModel::Harmonic {
                c: 10.0,
                amplitude: 1.0,
            },
        )
    }

    #[test]
    fn monodromy_determinant_liouville() {
        let (params, force) = fig1a();
        let cfg = IntegratorConfig::for_params(&params);
        let (m, _) = monodromy(SystemKind::Full, (PI, 0.0), &params, &force, &cfg).unwrap();
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let expect = (-TAU).exp();
        assert!(
            (det - expect).abs() < 1e-6 * expect,
            "det {det} vs e^-2pi {expect}"
        );
        let _ = E;
    }

    #[test]
    fn monodromy_determinant_area_preserving() {
        let params = Params::new(0.0f64, 10, 4, 1.0).unwrap();
        let force = ForceModel::Harmonic {
            c: 0.0,
            amplitude: 1.0,
        };
        let cfg = IntegratorConfig::for_params(&params);
        let (m, _) = monodromy(SystemKind::Full, (3.14, -0.16), &params, &force, &cfg).unwrap();
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        assert!((det - 1.0).abs() < 1e-6, "det = {det}");
    }

    #[test]
    fn monodromy_matches_finite_differences() {
        let (params, force) = fig1a();
        let cfg = IntegratorConfig::for_params(&params);
        let x = (3.0, 0.1);
        let (m, _) = monodromy(SystemKind::Full, x, &params, &force, &cfg).unwrap();
        let fd =
            monodromy_finite_difference(SystemKind::Full, x, &params, &force, &cfg, 1e-6).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (m[i][j] - fd[i][j]).abs() < 1e-4,
                    "entry ({i},{j}): {} vs {}",
                    m[i][j],
                    fd[i][j]
                );
            }
        }
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let params = Params::new(0.5, 10, 10, 1.0).unwrap();
        let cfg = IntegratorConfig::for_params(&params);
        let orbit = find_periodic(
            (PI, 0.0),
            SystemKind::Full,
            &params,
            &ForceModel::Zero,
            &cfg,
        )
        .unwrap();
        assert!((orbit.fixed_point.0 - PI).abs() < 1e-12);
        assert!(orbit.fixed_point.1.abs() < 1e-12);
        assert!(orbit.residual < 1e-12);
        assert!(orbit.no_fall);
    }

    #[test]
    fn averaged_orbit_fig1a() {
        let (params, force) = fig1a();
        let cfg = IntegratorConfig::default();
        let orbit =
            find_periodic((PI, 0.0), SystemKind::Averaged, &params, &force, &cfg).unwrap();
        assert!(orbit.residual < 1e-10);
        assert!(orbit.no_fall);
        assert_eq!(orbit.stability, Stability::AsymptoticallyStable);
    }

    #[test]
    fn full_orbit_fig1a_seeded_from_averaged() {
        let (params, force) = fig1a();
        let avg_cfg = IntegratorConfig::default();
        let averaged =
            find_periodic((PI, 0.0), SystemKind::Averaged, &params, &force, &avg_cfg).unwrap();
        let cfg = IntegratorConfig::for_params(&params);
        let orbit = find_periodic(
            averaged.fixed_point,
            SystemKind::Full,
            &params,
            &force,
            &cfg,
        )
        .unwrap();
        assert!(orbit.residual < 1e-10);
        assert_eq!(orbit.stability, Stability::AsymptoticallyStable);
        assert!(orbit.no_fall);

        // Multiplier product law: lambda1 lambda2 = e^{-mu T}.
        let prod = (orbit.multipliers[0] * orbit.multipliers[1]).norm();
        let expect = (-TAU).exp();
        assert!((prod - expect).abs() < 1e-6 * expect);

        // Period-map consistency.
        let px = period_map(SystemKind::Full, orbit.fixed_point, &params, &force, &cfg).unwrap();
        let drift = (px.0 - orbit.fixed_point.0)
            .abs()
            .max((px.1 - orbit.fixed_point.1).abs());
        assert!(drift < 10.0 * orbit.residual.max(1e-12));
    }

    #[test]
    fn no_fall_rejects_falling_pseudo_orbit() {
        let params = Params::new(0.0, 10, 10, 0.0).unwrap();
        let cfg = IntegratorConfig::for_params(&params);
        let pseudo = OrbitResult {
            fixed_point: (PI / 2.0 + 0.01, -5.0),
            residual: 0.0,
            monodromy: [[1.0, 0.0], [0.0, 1.0]],
            multipliers: [Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)],
            stability: Stability::Degenerate,
            q_range: (0.0, 0.0),
            no_fall: false,
            system: SystemKind::Full,
        };
        assert!(!no_fall_certificate(&pseudo, &params, &ForceModel::Zero, &cfg).unwrap());
    }

    #[test]
    fn basin_probe_from_fixed_point_stays_put() {
        let (params, force) = fig1a();
        let cfg = IntegratorConfig::for_params(&params);
        let avg = find_periodic((PI, 0.0), SystemKind::Averaged, &params, &force, &IntegratorConfig::default()).unwrap();
        let orbit =
            find_periodic(avg.fixed_point, SystemKind::Full, &params, &force, &cfg).unwrap();
        let probe = basin_probe(orbit.fixed_point, 5, &orbit, &params, &force, &cfg).unwrap();
        assert!(!probe.escaped);
        for d in &probe.distances {
            assert!(*d < 1e-9, "distance {d}");
        }
    }

    #[test]
    fn kapitza_criterion() {
        // Averaged system, zero force, mu = 0.1: the upright orbit is
        // asymptotically stable iff Phi > 1. Multipliers must match the
        // linearization eps'' = -mu eps' + (1 - Phi) eps.
        let check = |omega: u32, phi_expect: f64, stable: bool| {
            let params = Params::new(0.1, 10, omega, 1.0).unwrap();
            let phi = phi_mean_square(&params);
            assert!((phi - phi_expect).abs() < 1e-12);
            let cfg = IntegratorConfig::default();
            let orbit = find_periodic(
                (PI, 0.0),
                SystemKind::Averaged,
                &params,
                &ForceModel::Zero,
                &cfg,
            )
            .unwrap();
            if stable {
                assert_eq!(orbit.stability, Stability::AsymptoticallyStable);
            } else {
                assert_eq!(orbit.stability, Stability::Hyperbolic);
            }
            // Predicted multipliers: exp(2 pi s), s roots of s^2 + mu s - (1 - Phi).
            let mu = 0.1;
            let disc = mu * mu + 4.0 * (1.0 - phi);
            let predicted: [Complex<f64>; 2] = if disc >= 0.0 {
                [
                    Complex::new(((-mu + disc.sqrt()) / 2.0) * TAU, 0.0).exp(),
                    Complex::new(((-mu - disc.sqrt()) / 2.0) * TAU, 0.0).exp(),
                ]
            } else {
                let s = Complex::new(-mu / 2.0, (-disc).sqrt() / 2.0);
                [(s * TAU).exp(), (s.conj() * TAU).exp()]
            };
            let mut got: Vec<f64> = orbit.multipliers.iter().map(|m| m.norm()).collect();
            let mut want: Vec<f64> = predicted.iter().map(|m| m.norm()).collect();
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-4, "modulus {g} vs predicted {w}");
            }
        };
        check(2, 2.0, true); // Phi = 2
        check(1, 0.5, false); // Phi = 0.5
    }

    #[test]
    fn averaging_sweep_with_no_vibration_is_flat() {
        let params = Params::new(1.0, 10, 10, 0.0).unwrap();
        let force = ForceModel::Harmonic {
            c: 1.0,
            amplitude: 0.5,
        };
        let sweep = averaging_sweep(&[5, 10], &params, &force, IntegratorConfig::for_params)
            .unwrap();
        for pt in sweep {
            let d = pt.distance.unwrap();
            assert!(d < 1e-7, "k = {}: distance {d}", pt.k);
        }
    }

    #[test]
    fn newton_reports_best_iterate_on_stagnation() {
        // With mu = 0, no vibration and a constant push h = 2 the momentum
        // gains at least T per period (dp = 2 - sin q >= 1), so the period
        // map has no fixed point and Newton cannot converge.
        let params = Params::new(0.0f64, 2, 1, 0.0).unwrap();
        let cfg = IntegratorConfig::for_params(&params);
        let res = find_periodic(
            (0.0, 0.0),
            SystemKind::Full,
            &params,
            &ForceModel::general(ConstantForce(2.0)),
            &cfg,
        );
        match res {
            Err(Error::NewtonStagnation { residual, .. }) => {
                assert!(residual.is_finite());
                assert!(residual > 1.0);
            }
            Err(Error::DegenerateJacobian { .. }) => {}
            other => panic!("expected failure, got {other:?}"),
        }
    }
}
