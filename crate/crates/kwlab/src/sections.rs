//! Stroboscopic Poincare-section generation and fixed-point hunting,
//! primarily for the frictionless case.
//!
//! Seeds are independent: the job is an embarrassingly parallel map over
//! seeds followed by a deterministic ordered merge. A seed is abandoned
//! when |p| exceeds 50 or a fall event fires; unbounded rotations dominate
//! cost and the interesting structure lives in the no-fall region.

use rayon::prelude::*;

use crate::error::Error;
use crate::integrate::{self, Direction, EventSpec, IntegratorConfig};
use crate::model::{ForceModel, Params};
use crate::orbits::{self, OrbitResult, SystemKind};
use crate::{fl, Real};

/// Grid of section seeds plus iteration budget.
#[derive(Clone)]
pub struct SectionJob<T: Real> {
    pub q_range: (T, T),
    pub p_range: (T, T),
    /// Seed counts `(nq, np)`.
    pub grid: (usize, usize),
    /// Period-map iterations per seed.
    pub iterations: usize,
    pub params: Params<T>,
    pub force: ForceModel<T>,
}

impl<T: Real> SectionJob<T> {
    /// Default window of the no-fall region: q in [pi/2, 3pi/2],
    /// p in [-2, 2], 101x101 seeds, 500 iterations.
    pub fn default_window(params: Params<T>, force: ForceModel<T>) -> Self {
        Self {
            q_range: (T::FRAC_PI_2(), fl::<T>(3.0) * T::FRAC_PI_2()),
            p_range: (fl(-2.0), fl(2.0)),
            grid: (101, 101),
            iterations: 500,
            params,
            force,
        }
    }

    pub fn validate(&self) -> Result<(), Error<T>> {
        if !(self.q_range.1 >= self.q_range.0) || !(self.p_range.1 >= self.p_range.0) {
            return Err(Error::InvalidParams("section ranges must be nonempty".into()));
        }
        if self.grid.0 < 1 || self.grid.1 < 1 {
            return Err(Error::InvalidParams("section grid must be at least 1x1".into()));
        }
        if self.iterations < 1 {
            return Err(Error::InvalidParams("iterations must be >= 1".into()));
        }
        Ok(())
    }

    /// Row-major seed list. A singleton axis collapses to the interval
    /// midpoint.
    pub fn seeds(&self) -> Vec<(T, T)> {
        let axis = |range: (T, T), n: usize| -> Vec<T> {
            if n == 1 {
                vec![(range.0 + range.1) / fl::<T>(2.0)]
            } else {
                (0..n)
                    .map(|i| {
                        range.0
                            + (range.1 - range.0) * T::from_usize(i).unwrap()
                                / T::from_usize(n - 1).unwrap()
                    })
                    .collect()
            }
        };
        let qs = axis(self.q_range, self.grid.0);
        let ps = axis(self.p_range, self.grid.1);
        let mut seeds = Vec::with_capacity(qs.len() * ps.len());
        for q in &qs {
            for p in &ps {
                seeds.push((*q, *p));
            }
        }
        seeds
    }
}

/// One recorded section point. `q` is folded mod 2pi into `[0, 2pi)` at
/// output only; the flow itself integrates the unfolded angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionPoint<T: Real> {
    pub seed_id: usize,
    pub iteration: usize,
    pub q: T,
    pub p: T,
}

/// All iterates of a section job, plus per-seed escape flags.
#[derive(Debug, Clone)]
pub struct SectionCloud<T: Real> {
    pub points: Vec<SectionPoint<T>>,
    pub escaped: Vec<bool>,
}

const ESCAPE_P: f64 = 50.0;

fn fold_q<T: Real>(q: T) -> T {
    let tau = T::TAU();
    let mut f = q % tau;
    if f < T::zero() {
        f = f + tau;
    }
    f
}

/// Iterate the stroboscopic map from every grid seed, recording all
/// iterates (iteration 0 is the seed itself). Per-seed integration failure
/// marks the seed escaped and never aborts the job.
pub fn generate_section<T: Real>(
    job: &SectionJob<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<SectionCloud<T>, Error<T>> {
    job.validate()?;
    let seeds = job.seeds();
    let per_seed: Vec<(Vec<SectionPoint<T>>, bool)> = seeds
        .par_iter()
        .enumerate()
        .map(|(seed_id, seed)| iterate_seed(seed_id, *seed, job, cfg))
        .collect();

    let mut points = Vec::new();
    let mut escaped = Vec::with_capacity(per_seed.len());
    for (pts, esc) in per_seed {
        points.extend(pts);
        escaped.push(esc);
    }
    Ok(SectionCloud { points, escaped })
}

fn iterate_seed<T: Real>(
    seed_id: usize,
    seed: (T, T),
    job: &SectionJob<T>,
    cfg: &IntegratorConfig<T>,
) -> (Vec<SectionPoint<T>>, bool) {
    let f = orbits::phase_field(SystemKind::Full, &job.params, &job.force);
    let events: [EventSpec<T, 2>; 2] = [
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
    ];
    let mut pts = Vec::with_capacity(job.iterations + 1);
    let mut y = [seed.0, seed.1];
    pts.push(SectionPoint {
        seed_id,
        iteration: 0,
        q: fold_q(y[0]),
        p: y[1],
    });
    let mut escaped = false;
    for it in 1..=job.iterations {
        match integrate::integrate(&f, T::zero(), y, job.params.period, cfg, &events) {
            Ok(out) if out.events.is_empty() => {
                y = out.trajectory.end_state();
                if y[1].abs() > fl::<T>(ESCAPE_P) {
                    escaped = true;
                    break;
                }
                pts.push(SectionPoint {
                    seed_id,
                    iteration: it,
                    q: fold_q(y[0]),
                    p: y[1],
                });
            }
            _ => {
                escaped = true;
                break;
            }
        }
    }
    (pts, escaped)
}

/// Result of Newton shooting from a batch of seeds: converged fixed points
/// deduplicated to 1e-6 in the plane, plus per-seed failures.
pub struct FixedPointSearch<T: Real> {
    pub found: Vec<OrbitResult<T>>,
    pub failures: Vec<((T, T), Error<T>)>,
}

/// Run the periodic-orbit search from each seed on the full system and
/// deduplicate the converged fixed points.
pub fn find_map_fixed_points<T: Real>(
    seeds: &[(T, T)],
    params: &Params<T>,
    force: &ForceModel<T>,
    cfg: &IntegratorConfig<T>,
) -> FixedPointSearch<T> {
    let mut found: Vec<OrbitResult<T>> = Vec::new();
    let mut failures = Vec::new();
    let dedup_tol = fl::<T>(1e-6);
    for seed in seeds {
        match orbits::find_periodic(*seed, SystemKind::Full, params, force, cfg) {
            Ok(orbit) => {
                let dup = found.iter().any(|o| {
                    let dq = o.fixed_point.0 - orbit.fixed_point.0;
                    let dp = o.fixed_point.1 - orbit.fixed_point.1;
                    (dq * dq + dp * dp).sqrt() < dedup_tol
                });
                if !dup {
                    found.push(orbit);
                }
            }
            Err(e) => failures.push((*seed, e)),
        }
    }
    FixedPointSearch { found, failures }
}
