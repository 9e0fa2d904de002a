//! Periodic cubic spline interpolation.
//!
//! Used by the tabulated force variant: sampled forces are interpolated
//! with a C2-smooth periodic spline so the vector field stays smooth for
//! the adaptive integrator.

use crate::error::Error;
use crate::{fl, Real};

/// Cubic spline through `(t, value)` samples, periodic with the given
/// period. Evaluation folds the argument into one period.
#[derive(Debug, Clone)]
pub struct PeriodicSpline<T: Real> {
    knots: Vec<T>,
    values: Vec<T>,
    /// Second derivatives at the knots (periodic closure: m[n] = m[0]).
    m: Vec<T>,
    period: T,
}

impl<T: Real> PeriodicSpline<T> {
    /// Build the spline. Sample times must be strictly increasing and lie
    /// in `[0, period)`; at least three samples are required.
    pub fn new(samples: &[(T, T)], period: T) -> Result<Self, Error<T>> {
        let n = samples.len();
        if n < 3 {
            return Err(Error::InvalidParams(format!(
                "periodic spline needs at least 3 samples, got {n}"
            )));
        }
        if !(period > T::zero()) {
            return Err(Error::InvalidParams("spline period must be positive".into()));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidParams(
                    "spline sample times must be strictly increasing".into(),
                ));
            }
        }
        if samples[0].0 < T::zero() || samples[n - 1].0 >= period {
            return Err(Error::InvalidParams(
                "spline sample times must lie in [0, period)".into(),
            ));
        }

        let knots: Vec<T> = samples.iter().map(|s| s.0).collect();
        let values: Vec<T> = samples.iter().map(|s| s.1).collect();

        // Interval widths, wrapping the last interval around the period.
        let h: Vec<T> = (0..n)
            .map(|i| {
                if i + 1 < n {
                    knots[i + 1] - knots[i]
                } else {
                    period - knots[n - 1] + knots[0]
                }
            })
            .collect();

        let six = fl::<T>(6.0);
        let two = fl::<T>(2.0);
        let mut sub = vec![T::zero(); n];
        let mut diag = vec![T::zero(); n];
        let mut sup = vec![T::zero(); n];
        let mut rhs = vec![T::zero(); n];
        for i in 0..n {
            let im1 = (i + n - 1) % n;
            let ip1 = (i + 1) % n;
            sub[i] = h[im1];
            diag[i] = two * (h[im1] + h[i]);
            sup[i] = h[i];
            let d_right = (values[ip1] - values[i]) / h[i];
            let d_left = (values[i] - values[im1]) / h[im1];
            rhs[i] = six * (d_right - d_left);
        }

        let m = solve_cyclic_tridiag(&sub, &diag, &sup, &rhs);
        Ok(Self {
            knots,
            values,
            m,
            period,
        })
    }

    pub fn period(&self) -> T {
        self.period
    }

    /// Largest absolute value over a dense sampling of one period.
    pub fn sup_abs(&self, samples: usize) -> T {
        let mut sup = T::zero();
        for i in 0..samples {
            let t = self.period * fl::<T>(i as f64 / samples as f64);
            let v = self.eval(t).abs();
            if v > sup {
                sup = v;
            }
        }
        sup
    }

    pub fn eval(&self, t: T) -> T {
        let n = self.knots.len();
        // Fold into [knots[0], knots[0] + period).
        let mut s = (t - self.knots[0]) % self.period;
        if s < T::zero() {
            s = s + self.period;
        }
        let s = s + self.knots[0];

        // Locate the interval [knots[i], knots[i+1]) containing s.
        let i = match self
            .knots
            .binary_search_by(|k| k.partial_cmp(&s).expect("finite knot"))
        {
            Ok(i) => i,
            Err(0) => n - 1, // s < knots[0] cannot happen after folding
            Err(j) => j - 1,
        };
        let ip1 = (i + 1) % n;
        let t0 = self.knots[i];
        let t1 = if i + 1 < n {
            self.knots[i + 1]
        } else {
            self.knots[0] + self.period
        };
        let h = t1 - t0;
        let a = t1 - s;
        let b = s - t0;
        let six = fl::<T>(6.0);
        self.m[i] * a * a * a / (six * h)
            + self.m[ip1] * b * b * b / (six * h)
            + (self.values[i] / h - self.m[i] * h / six) * a
            + (self.values[ip1] / h - self.m[ip1] * h / six) * b
    }

    /// Derivative of the spline at `t`.
    pub fn eval_deriv(&self, t: T) -> T {
        // Central difference is adequate here; the spline only feeds
        // Jacobian entries where 1e-8-level accuracy suffices.
        let dt = fl::<T>(1e-6);
        (self.eval(t + dt) - self.eval(t - dt)) / (fl::<T>(2.0) * dt)
    }
}

/// Cyclic tridiagonal solve via the Sherman-Morrison correction of a plain
/// tridiagonal system.
fn solve_cyclic_tridiag<T: Real>(sub: &[T], diag: &[T], sup: &[T], rhs: &[T]) -> Vec<T> {
    let n = diag.len();
    debug_assert!(n >= 3);
    let alpha = sub[0]; // corner (0, n-1)
    let beta = sup[n - 1]; // corner (n-1, 0)
    let gamma = -diag[0];

    let mut b = diag.to_vec();
    b[0] = diag[0] - gamma;
    b[n - 1] = diag[n - 1] - alpha * beta / gamma;

    let y = solve_tridiag(sub, &b, sup, rhs);
    let mut u = vec![T::zero(); n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = solve_tridiag(sub, &b, sup, &u);

    let fact = (y[0] + beta * y[n - 1] / gamma) / (T::one() + z[0] + beta * z[n - 1] / gamma);
    (0..n).map(|i| y[i] - fact * z[i]).collect()
}

/// Thomas algorithm; `sub[0]` and `sup[n-1]` are ignored.
fn solve_tridiag<T: Real>(sub: &[T], diag: &[T], sup: &[T], rhs: &[T]) -> Vec<T> {
    let n = diag.len();
    let mut c = vec![T::zero(); n];
    let mut d = vec![T::zero(); n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut x = vec![T::zero(); n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sin_spline(n: usize) -> PeriodicSpline<f64> {
        let period = 2.0 * PI;
        let samples: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let t = period * i as f64 / n as f64;
                (t, t.sin())
            })
            .collect();
        PeriodicSpline::new(&samples, period).unwrap()
    }

    #[test]
    fn reproduces_nodes_exactly() {
        let s = sin_spline(32);
        for i in 0..32 {
            let t = 2.0 * PI * i as f64 / 32.0;
            assert!((s.eval(t) - t.sin()).abs() < 1e-12, "node {i}");
        }
    }

    #[test]
    fn interpolates_sin_accurately() {
        let s = sin_spline(64);
        for i in 0..1000 {
            let t = 2.0 * PI * i as f64 / 1000.0;
            assert!((s.eval(t) - t.sin()).abs() < 1e-6);
        }
    }

    #[test]
    fn periodic_continuation() {
        let s = sin_spline(32);
        for t in [0.3, 1.7, 4.0] {
            assert!((s.eval(t + 2.0 * PI) - s.eval(t)).abs() < 1e-14);
            assert!((s.eval(t - 2.0 * PI) - s.eval(t)).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(PeriodicSpline::new(&[(0.0, 1.0), (1.0, 2.0)], 2.0).is_err());
        assert!(PeriodicSpline::new(&[(0.0, 1.0), (1.0, 2.0), (0.5, 0.0)], 2.0).is_err());
        assert!(PeriodicSpline::new(&[(0.0, 1.0), (1.0, 2.0), (2.5, 0.0)], 2.0).is_err());
    }
}
