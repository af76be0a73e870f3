//! Pathline integration and flow-map construction.
//!
//! Trajectories are traced with classical fourth-order Runge-Kutta at a
//! fixed step, which keeps results bitwise reproducible for a given
//! configuration regardless of evaluation order or thread count. Velocity
//! lookups during substeps use exact intermediate times.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, MultifieldDataset, Point};

/// What happens to a particle that leaves the spatial domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryPolicy {
    /// Keep the last in-domain position for all remaining samples.
    #[default]
    Freeze,
    /// Stop the trajectory; remaining samples are absent.
    Truncate,
}

impl BoundaryPolicy {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "freeze" => Some(BoundaryPolicy::Freeze),
            "truncate" => Some(BoundaryPolicy::Truncate),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BoundaryPolicy::Freeze => "freeze",
            BoundaryPolicy::Truncate => "truncate",
        }
    }
}

/// Integration window and sampling resolution.
///
/// A trajectory is sampled at `intervals + 1` times
/// `t0 + (m / intervals) * duration` for `m = 0..=intervals`; `substeps`
/// internal Runge-Kutta steps are taken between consecutive samples, so the
/// integration step is `duration / (intervals * substeps)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationConfig {
    pub t0: f64,
    /// Signed duration; negative integrates backward in time.
    pub duration: f64,
    pub intervals: usize,
    pub substeps: usize,
    pub boundary: BoundaryPolicy,
}

impl IntegrationConfig {
    pub fn new(t0: f64, duration: f64, intervals: usize) -> Self {
        IntegrationConfig {
            t0,
            duration,
            intervals,
            substeps: 1,
            boundary: BoundaryPolicy::Freeze,
        }
    }

    pub fn with_substeps(mut self, substeps: usize) -> Self {
        self.substeps = substeps;
        self
    }

    pub fn with_boundary(mut self, boundary: BoundaryPolicy) -> Self {
        self.boundary = boundary;
        self
    }

    /// Check the window against a dataset's time axis.
    pub fn validate(&self, ds: &MultifieldDataset) -> Result<()> {
        if self.intervals == 0 {
            return Err(Error::InvalidConfig("intervals must be at least 1".into()));
        }
        if self.substeps == 0 {
            return Err(Error::InvalidConfig("substeps must be at least 1".into()));
        }
        if !self.t0.is_finite() || !self.duration.is_finite() {
            return Err(Error::InvalidConfig("t0 and duration must be finite".into()));
        }
        let axis = ds.time();
        for t in [self.t0, self.t0 + self.duration] {
            if !axis.contains(t) {
                return Err(Error::InvalidConfig(format!(
                    "time {t} outside dataset time axis [{}, {}]",
                    axis.t_start(),
                    axis.t_end()
                )));
            }
        }
        Ok(())
    }
}

/// Discrete particle path: positions sampled at fixed times.
#[derive(Debug, Clone)]
pub struct Trajectory {
    seed: Point,
    times: Vec<f64>,
    positions: Vec<Point>,
    valid_count: usize,
}

impl Trajectory {
    pub fn seed(&self) -> Point {
        self.seed
    }

    /// Sample times, always `intervals + 1` entries.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Sampled positions. Under the freeze policy this has `intervals + 1`
    /// entries with the tail repeating the last in-domain position; under
    /// truncate it has `valid_count` entries.
    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    /// Number of samples integrated before the particle left the domain
    /// (`intervals + 1` when it never left).
    pub fn valid_count(&self) -> usize {
        self.valid_count
    }

    /// Number of stored samples.
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn endpoint(&self) -> Point {
        *self.positions.last().expect("trajectory has at least the seed")
    }
}

/// Trace the pathline seeded at `seed`.
///
/// Positions are advanced with classical RK4; a particle whose step would
/// sample velocity outside the domain is handled per the boundary policy.
pub fn integrate_pathline(
    ds: &MultifieldDataset,
    seed: Point,
    cfg: &IntegrationConfig,
) -> Result<Trajectory> {
    cfg.validate(ds)?;
    if !ds.grid().contains(seed) {
        let (min, max, _, _) = ds.bounds();
        return Err(Error::OutOfDomain {
            position: seed[..ds.grid().dim()].to_vec(),
            min: min[..ds.grid().dim()].to_vec(),
            max: max[..ds.grid().dim()].to_vec(),
        });
    }

    let m = cfg.intervals;
    let times: Vec<f64> = (0..=m)
        .map(|k| cfg.t0 + (k as f64 / m as f64) * cfg.duration)
        .collect();

    let mut positions = Vec::with_capacity(m + 1);
    positions.push(seed);
    let mut p = seed;
    let mut exited_at: Option<usize> = None;

    'outer: for k in 0..m {
        let (ta, tb) = (times[k], times[k + 1]);
        for s in 0..cfg.substeps {
            let t_from = if s == 0 {
                ta
            } else {
                ta + (s as f64 / cfg.substeps as f64) * (tb - ta)
            };
            let t_to = if s + 1 == cfg.substeps {
                tb
            } else {
                ta + ((s + 1) as f64 / cfg.substeps as f64) * (tb - ta)
            };
            match rk4_step(ds, p, t_from, t_to) {
                Some(next) => p = next,
                None => {
                    exited_at = Some(k + 1);
                    break 'outer;
                }
            }
        }
        positions.push(p);
    }

    let valid_count = exited_at.unwrap_or(m + 1);
    if exited_at.is_some() && cfg.boundary == BoundaryPolicy::Freeze {
        // p is the last in-domain position reached (possibly mid-interval)
        while positions.len() < m + 1 {
            positions.push(p);
        }
    }

    Ok(Trajectory {
        seed,
        times,
        positions,
        valid_count,
    })
}

/// One classical RK4 step from `t_from` to `t_to`. Returns `None` when any
/// stage samples the velocity outside the spatial domain.
#[inline]
fn rk4_step(ds: &MultifieldDataset, p: Point, t_from: f64, t_to: f64) -> Option<Point> {
    let h = t_to - t_from;
    if h == 0.0 {
        // degenerate step (zero duration); position is unchanged but the
        // seed must still be sampleable
        ds.try_velocity(t_from, p)?;
        return Some(p);
    }
    let t_mid = 0.5 * (t_from + t_to);
    let k1 = ds.try_velocity(t_from, p)?;
    let k2 = ds.try_velocity(t_mid, axpy(p, 0.5 * h, k1))?;
    let k3 = ds.try_velocity(t_mid, axpy(p, 0.5 * h, k2))?;
    let k4 = ds.try_velocity(t_to, axpy(p, h, k3))?;
    let next = [
        p[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        p[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        p[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    ];
    // the endpoint itself must be inside for the next stage to start there
    ds.grid().contains(next).then_some(next)
}

#[inline]
fn axpy(p: Point, a: f64, v: Point) -> Point {
    [p[0] + a * v[0], p[1] + a * v[1], p[2] + a * v[2]]
}

/// Pathline endpoints seeded at every grid node.
#[derive(Debug, Clone)]
pub struct FlowMap {
    pub grid: GridSpec,
    pub t0: f64,
    pub duration: f64,
    pub endpoints: Vec<Point>,
}

/// Integrate one pathline per grid node and record the endpoints.
///
/// Seeds are independent; the computation is parallel and the result is
/// identical to calling [`integrate_pathline`] per node, bit for bit.
pub fn flow_map(ds: &MultifieldDataset, cfg: &IntegrationConfig) -> Result<FlowMap> {
    cfg.validate(ds)?;
    let grid = ds.grid().clone();
    let endpoints = (0..grid.node_count())
        .into_par_iter()
        .map(|flat| {
            let seed = grid.node_position(grid.node_ijk(flat));
            integrate_pathline(ds, seed, cfg).map(|t| t.endpoint())
        })
        .collect::<Result<Vec<Point>>>()?;
    Ok(FlowMap {
        grid,
        t0: cfg.t0,
        duration: cfg.duration,
        endpoints,
    })
}
