//! Adaptive explicit Runge-Kutta integration with dense output and event
//! detection: a Dormand-Prince 5(4) embedded pair with the free fourth-order
//! interpolant, plus a fixed-step RK4 mode for cross-checks.
//!
//! The step size is capped at a fraction of the fast pivot period so the
//! oscillatory field `phi(kt)` is never aliased.

use crate::model::Params;
use crate::{fl, Real};

/// Tolerances and step limits for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<T: Real> {
    pub rtol: T,
    pub atol: T,
    pub max_step: T,
    pub max_steps: usize,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self {
            rtol: fl(1e-10),
            atol: fl(1e-12),
            max_step: fl(0.01),
            max_steps: 100_000_000,
        }
    }
}

impl<T: Real> IntegratorConfig<T> {
    /// Default configuration with the step cap `min(T/(64 k omega), 0.01)`
    /// tied to the fast period of the given parameters.
    pub fn for_params(params: &Params<T>) -> Self {
        let k = T::from_u32(params.k).unwrap();
        let cap = params.period / (fl::<T>(64.0) * k * params.omega);
        Self {
            max_step: cap.min(fl(0.01)),
            ..Self::default()
        }
    }

    pub fn with_tolerances(mut self, rtol: T, atol: T) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }
}

/// Crossing direction filter for event functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Rising,
    Falling,
    Any,
}

/// A scalar event function `g(t, y)` whose zero crossings are located on
/// the dense output.
pub struct EventSpec<T: Real, const N: usize> {
    pub g: Box<dyn Fn(T, &[T; N]) -> T + Send + Sync>,
    pub direction: Direction,
    pub terminal: bool,
}

impl<T: Real, const N: usize> EventSpec<T, N> {
    pub fn new(
        g: impl Fn(T, &[T; N]) -> T + Send + Sync + 'static,
        direction: Direction,
        terminal: bool,
    ) -> Self {
        Self {
            g: Box::new(g),
            direction,
            terminal,
        }
    }
}

/// One accepted step with its dense-output coefficients.
#[derive(Debug, Clone)]
pub struct Segment<T: Real, const N: usize> {
    pub t0: T,
    pub h: T,
    cont: [[T; N]; 5],
}

impl<T: Real, const N: usize> Segment<T, N> {
    /// Evaluate the interpolant at fraction `theta` of the step.
    fn eval_theta(&self, theta: T) -> [T; N] {
        let one = T::one();
        let mut out = [T::zero(); N];
        for i in 0..N {
            let [c1, c2, c3, c4, c5] = [
                self.cont[0][i],
                self.cont[1][i],
                self.cont[2][i],
                self.cont[3][i],
                self.cont[4][i],
            ];
            out[i] = c1 + theta * (c2 + (one - theta) * (c3 + theta * (c4 + (one - theta) * c5)));
        }
        out
    }
}

/// Time-ordered sequence of accepted steps with dense interpolation.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Real, const N: usize> {
    segments: Vec<Segment<T, N>>,
    t_start: T,
    t_end: T,
    y_end: [T; N],
    forward: bool,
}

impl<T: Real, const N: usize> Trajectory<T, N> {
    pub fn t_start(&self) -> T {
        self.t_start
    }
    pub fn t_end(&self) -> T {
        self.t_end
    }
    pub fn end_state(&self) -> [T; N] {
        self.y_end
    }
    pub fn segments(&self) -> &[Segment<T, N>] {
        &self.segments
    }

    /// Dense evaluation; `t` is clamped to the covered span.
    pub fn eval(&self, t: T) -> [T; N] {
        let t = if self.forward {
            t.max(self.t_start).min(self.t_end)
        } else {
            t.min(self.t_start).max(self.t_end)
        };
        let idx = self.locate(t);
        let seg = &self.segments[idx];
        let theta = (t - seg.t0) / seg.h;
        seg.eval_theta(theta.max(T::zero()).min(T::one()))
    }

    fn locate(&self, t: T) -> usize {
        let n = self.segments.len();
        let (mut lo, mut hi) = (0usize, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let inside_left = if self.forward {
                t < self.segments[mid].t0
            } else {
                t > self.segments[mid].t0
            };
            if inside_left {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }
}

/// Result of a completed integration.
#[derive(Debug, Clone)]
pub struct IntegrationOutput<T: Real, const N: usize> {
    pub trajectory: Trajectory<T, N>,
    pub events: Vec<EventHit<T, N>>,
    pub n_steps: usize,
    pub n_rejected: usize,
    /// Sum of per-step local error estimates, in absolute units.
    pub error_estimate: T,
}

#[derive(Debug, Clone, Copy)]
pub struct EventHit<T: Real, const N: usize> {
    pub t: T,
    pub y: [T; N],
    pub which: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    MaxStepsExceeded,
    NonFinite,
}

/// Integration failure carrying the partial trajectory up to the last good
/// state.
#[derive(Debug)]
pub struct IntegrationFailure<T: Real, const N: usize> {
    pub kind: FailureKind,
    pub t: T,
    pub partial: IntegrationOutput<T, N>,
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
// Error coefficients b5 - b4.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense-output coefficients.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn axpy<T: Real, const N: usize>(y: &[T; N], h: T, terms: &[(f64, &[T; N])]) -> [T; N] {
    let mut out = *y;
    for (c, k) in terms {
        let c = fl::<T>(*c);
        for i in 0..N {
            out[i] = out[i] + h * c * k[i];
        }
    }
    out
}

/// Adaptive integration of `dy/dt = f(t, y)` from `t0` to `t_end` (either
/// direction). Local error per step is kept at `atol + rtol |y|`; event
/// roots are polished on the dense interpolant; terminal events truncate
/// the trajectory.
pub fn integrate<T: Real, const N: usize>(
    f: impl Fn(T, &[T; N]) -> [T; N],
    t0: T,
    y0: [T; N],
    t_end: T,
    cfg: &IntegratorConfig<T>,
    events: &[EventSpec<T, N>],
) -> Result<IntegrationOutput<T, N>, IntegrationFailure<T, N>> {
    assert!(t_end != t0, "empty integration span");
    let forward = t_end > t0;
    let dir = if forward { T::one() } else { -T::one() };

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = cfg.max_step.min((t_end - t0).abs()) * dir;
    let mut segments: Vec<Segment<T, N>> = Vec::new();
    let mut hits: Vec<EventHit<T, N>> = Vec::new();
    let mut n_steps = 0usize;
    let mut n_rejected = 0usize;
    let mut err_acc = T::zero();

    let fail = |kind: FailureKind,
                t: T,
                segments: Vec<Segment<T, N>>,
                hits: Vec<EventHit<T, N>>,
                y: [T; N],
                n_steps: usize,
                n_rejected: usize,
                err_acc: T| IntegrationFailure {
        kind,
        t,
        partial: IntegrationOutput {
            trajectory: Trajectory {
                segments,
                t_start: t0,
                t_end: t,
                y_end: y,
                forward,
            },
            events: hits,
            n_steps,
            n_rejected,
            error_estimate: err_acc,
        },
    };

    loop {
        if (t - t_end) * dir >= T::zero() {
            break;
        }
        // A step too small to matter against |t| means the controller is
        // pinned to a finite-time singularity; stop here rather than
        // crawling until max_steps. A remaining span that small is not a
        // singularity, just an ulp-sized tail.
        let h_floor = fl::<T>(64.0) * T::epsilon() * t.abs().max(T::one());
        if h.abs() < h_floor && (t_end - t).abs() > h_floor {
            return Err(fail(
                FailureKind::NonFinite,
                t,
                segments,
                hits,
                y,
                n_steps,
                n_rejected,
                err_acc,
            ));
        }
        if n_steps + n_rejected >= cfg.max_steps {
            return Err(fail(
                FailureKind::MaxStepsExceeded,
                t,
                segments,
                hits,
                y,
                n_steps,
                n_rejected,
                err_acc,
            ));
        }
        // Clamp to the span end.
        if (t + h - t_end) * dir > T::zero() {
            h = t_end - t;
        }

        let k2 = f(t + fl::<T>(C2) * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(
            t + fl::<T>(C3) * h,
            &axpy(&y, h, &[(A31, &k1), (A32, &k2)]),
        );
        let k4 = f(
            t + fl::<T>(C4) * h,
            &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            t + fl::<T>(C5) * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y1 = axpy(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = f(t + h, &y1);

        let mut finite = true;
        for i in 0..N {
            if !y1[i].is_finite() || !k7[i].is_finite() {
                finite = false;
            }
        }
        if !finite {
            return Err(fail(
                FailureKind::NonFinite,
                t,
                segments,
                hits,
                y,
                n_steps,
                n_rejected,
                err_acc,
            ));
        }

        // Scaled error norm.
        let mut err_sq = T::zero();
        let mut err_abs = T::zero();
        for i in 0..N {
            let e = h
                * (fl::<T>(E1) * k1[i]
                    + fl::<T>(E3) * k3[i]
                    + fl::<T>(E4) * k4[i]
                    + fl::<T>(E5) * k5[i]
                    + fl::<T>(E6) * k6[i]
                    + fl::<T>(E7) * k7[i]);
            let sc = cfg.atol + cfg.rtol * y[i].abs().max(y1[i].abs());
            let r = e / sc;
            err_sq = err_sq + r * r;
            err_abs = err_abs.max(e.abs());
        }
        let err = (err_sq / T::from_usize(N).unwrap()).sqrt();

        if err <= T::one() {
            // Accept: build dense-output coefficients.
            let mut cont = [[T::zero(); N]; 5];
            for i in 0..N {
                let dy = y1[i] - y[i];
                let bspl = h * k1[i] - dy;
                cont[0][i] = y[i];
                cont[1][i] = dy;
                cont[2][i] = bspl;
                cont[3][i] = dy - h * k7[i] - bspl;
                cont[4][i] = h
                    * (fl::<T>(D1) * k1[i]
                        + fl::<T>(D3) * k3[i]
                        + fl::<T>(D4) * k4[i]
                        + fl::<T>(D5) * k5[i]
                        + fl::<T>(D6) * k6[i]
                        + fl::<T>(D7) * k7[i]);
            }
            let seg = Segment { t0: t, h, cont };

            // Event localization on the fresh segment.
            let mut terminal_cut: Option<EventHit<T, N>> = None;
            for (which, ev) in events.iter().enumerate() {
                if let Some(t_ev) = locate_event(ev, &seg, t, t + h, &f) {
                    let y_ev = seg.eval_theta((t_ev - t) / h);
                    let hit = EventHit {
                        t: t_ev,
                        y: y_ev,
                        which,
                    };
                    if ev.terminal {
                        let better = match terminal_cut {
                            None => true,
                            Some(prev) => (t_ev - prev.t) * dir < T::zero(),
                        };
                        if better {
                            terminal_cut = Some(hit);
                        }
                    } else {
                        hits.push(hit);
                    }
                }
            }

            segments.push(seg);
            n_steps += 1;
            err_acc = err_acc + err_abs;

            if let Some(hit) = terminal_cut {
                hits.push(hit);
                hits.sort_by(|a, b| (a.t).partial_cmp(&b.t).unwrap());
                return Ok(IntegrationOutput {
                    trajectory: Trajectory {
                        segments,
                        t_start: t0,
                        t_end: hit.t,
                        y_end: hit.y,
                        forward,
                    },
                    events: hits,
                    n_steps,
                    n_rejected,
                    error_estimate: err_acc,
                });
            }

            t = t + h;
            y = y1;
            k1 = k7; // FSAL
        } else {
            n_rejected += 1;
        }

        // Step-size controller (no PI smoothing; deterministic per build).
        let fac = fl::<T>(0.9) * err.max(fl(1e-30)).powf(fl(-0.2));
        let fac = fac.max(fl(0.2)).min(fl(10.0));
        h = (h * fac).abs().min(cfg.max_step) * dir;
    }

    Ok(IntegrationOutput {
        trajectory: Trajectory {
            segments,
            t_start: t0,
            t_end: t,
            y_end: y,
            forward,
        },
        events: hits,
        n_steps,
        n_rejected,
        error_estimate: err_acc,
    })
}

/// Scan a fresh segment for a directed sign change of `g`, then root-polish
/// on the dense interpolant: bisection followed by a secant cleanup, with an
/// 80-iteration cap and 1e-12 resolution in `t`.
fn locate_event<T: Real, const N: usize>(
    ev: &EventSpec<T, N>,
    seg: &Segment<T, N>,
    ta: T,
    tb: T,
    _f: &impl Fn(T, &[T; N]) -> [T; N],
) -> Option<T> {
    let eval_g = |t: T| (ev.g)(t, &seg.eval_theta((t - seg.t0) / seg.h));
    let m = 8usize;
    let mut prev_t = ta;
    let mut prev_g = eval_g(ta);
    for j in 1..=m {
        let t = ta + (tb - ta) * T::from_usize(j).unwrap() / T::from_usize(m).unwrap();
        let g = eval_g(t);
        let crossed = prev_g * g < T::zero()
            || (g == T::zero() && prev_g != T::zero());
        if crossed {
            let rising = g > prev_g;
            let wanted = match ev.direction {
                Direction::Any => true,
                Direction::Rising => rising,
                Direction::Falling => !rising,
            };
            if wanted {
                // Bisection to 1e-12 in t.
                let (mut lo, mut hi) = (prev_t, t);
                let (mut glo, _ghi) = (prev_g, g);
                let mut iters = 0;
                while (hi - lo).abs() > fl::<T>(1e-13) && iters < 70 {
                    let mid = (lo + hi) / fl::<T>(2.0);
                    let gm = eval_g(mid);
                    if glo * gm <= T::zero() {
                        hi = mid;
                    } else {
                        lo = mid;
                        glo = gm;
                    }
                    iters += 1;
                }
                // Secant polish on the interpolant.
                let (mut x0, mut x1) = (lo, hi);
                let (mut g0, mut g1) = (eval_g(x0), eval_g(x1));
                for _ in 0..10 {
                    if g1 == g0 {
                        break;
                    }
                    let x2 = x1 - g1 * (x1 - x0) / (g1 - g0);
                    if !x2.is_finite() || (x2 - lo) * (x2 - hi) > T::zero() {
                        break;
                    }
                    x0 = x1;
                    g0 = g1;
                    x1 = x2;
                    g1 = eval_g(x1);
                }
                return Some(x1);
            }
        }
        prev_t = t;
        prev_g = g;
    }
    None
}

/// State at `t0 + span` under the flow of `f`: the stroboscopic map when
/// `span` is the slow period.
pub fn flow<T: Real, const N: usize>(
    f: impl Fn(T, &[T; N]) -> [T; N],
    t0: T,
    y0: [T; N],
    span: T,
    cfg: &IntegratorConfig<T>,
) -> Result<[T; N], IntegrationFailure<T, N>> {
    Ok(integrate(f, t0, y0, t0 + span, cfg, &[])?.trajectory.end_state())
}

/// Fixed-step classical RK4, kept as an independent cross-check path.
pub fn rk4<T: Real, const N: usize>(
    f: impl Fn(T, &[T; N]) -> [T; N],
    t0: T,
    y0: [T; N],
    t_end: T,
    n_steps: usize,
) -> [T; N] {
    let h = (t_end - t0) / T::from_usize(n_steps).unwrap();
    let two = fl::<T>(2.0);
    let six = fl::<T>(6.0);
    let mut t = t0;
    let mut y = y0;
    for _ in 0..n_steps {
        let k1 = f(t, &y);
        let k2 = f(t + h / two, &axpy(&y, h / two, &[(1.0, &k1)]));
        let k3 = f(t + h / two, &axpy(&y, h / two, &[(1.0, &k2)]));
        let k4 = f(t + h, &axpy(&y, h, &[(1.0, &k3)]));
        for i in 0..N {
            y[i] = y[i] + h / six * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
        t = t + h;
    }
    y
}
