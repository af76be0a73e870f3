//! Analytic unsteady flows and coupled scalar generators for desk-scale
//! studies without external datasets.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, MultifieldDataset, Point, TimeAxis};
use crate::integrate::{integrate_pathline, BoundaryPolicy, IntegrationConfig};

/// Closed-form 2D velocity fields.
///
/// The double gyre uses the stream function
/// `psi = A sin(pi f(x,t)) sin(pi y)` with
/// `f(x,t) = eps sin(omega t) x^2 + (1 - 2 eps sin(omega t)) x`, defined on
/// `[0, 2] x [0, 1]`; velocity is `(-dpsi/dy, dpsi/dx)`.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticFlow {
    Uniform { u: f64, w: f64 },
    Rotation { omega: f64 },
    Saddle { lambda: f64 },
    DoubleGyre { amplitude: f64, epsilon: f64, omega: f64 },
}

impl AnalyticFlow {
    /// The community-standard double gyre: A = 0.1, eps = 0.25,
    /// omega = 2 pi / 10.
    pub fn standard_double_gyre() -> Self {
        AnalyticFlow::DoubleGyre {
            amplitude: 0.1,
            epsilon: 0.25,
            omega: 2.0 * std::f64::consts::PI / 10.0,
        }
    }

    pub fn velocity(&self, t: f64, p: Point) -> Point {
        match *self {
            AnalyticFlow::Uniform { u, w } => [u, w, 0.0],
            AnalyticFlow::Rotation { omega } => [-omega * p[1], omega * p[0], 0.0],
            AnalyticFlow::Saddle { lambda } => [lambda * p[0], -lambda * p[1], 0.0],
            AnalyticFlow::DoubleGyre {
                amplitude,
                epsilon,
                omega,
            } => {
                let pi = std::f64::consts::PI;
                let s = epsilon * (omega * t).sin();
                let f = s * p[0] * p[0] + (1.0 - 2.0 * s) * p[0];
                let df = 2.0 * s * p[0] + (1.0 - 2.0 * s);
                let u = -pi * amplitude * (pi * f).sin() * (pi * p[1]).cos();
                let v = pi * amplitude * (pi * f).cos() * (pi * p[1]).sin() * df;
                [u, v, 0.0]
            }
        }
    }

    /// Stream function whose curl gives [`velocity`](Self::velocity).
    pub fn stream_function(&self, t: f64, p: Point) -> f64 {
        match *self {
            AnalyticFlow::Uniform { u, w } => -u * p[1] + w * p[0],
            AnalyticFlow::Rotation { omega } => 0.5 * omega * (p[0] * p[0] + p[1] * p[1]),
            AnalyticFlow::Saddle { lambda } => -lambda * p[0] * p[1],
            AnalyticFlow::DoubleGyre {
                amplitude,
                epsilon,
                omega,
            } => {
                let pi = std::f64::consts::PI;
                let s = epsilon * (omega * t).sin();
                let f = s * p[0] * p[0] + (1.0 - 2.0 * s) * p[0];
                amplitude * (pi * f).sin() * (pi * p[1]).sin()
            }
        }
    }
}

/// Pointwise scalar definitions and the advected-tracer generator.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarGenSpec {
    Constant {
        value: f64,
    },
    /// `f(x) = gradient . x + offset`, steady.
    Linear {
        gradient: [f64; 2],
        offset: f64,
    },
    /// Isotropic Gaussian `amplitude * exp(-|x - center|^2 / (2 sigma^2))`,
    /// steady.
    GaussianBlob {
        center: [f64; 2],
        sigma: f64,
        amplitude: f64,
    },
    /// The flow's stream function evaluated per frame.
    StreamFunction {
        flow: AnalyticFlow,
    },
    /// Material tracer: every frame value is the initial profile evaluated
    /// at the particle's position pulled back to `t_ref` through the
    /// dataset's velocity field (RK4 with steps no longer than `max_step`).
    Advected {
        initial: Box<ScalarGenSpec>,
        t_ref: f64,
        max_step: f64,
    },
}

impl ScalarGenSpec {
    /// Evaluate a pointwise (non-advected) spec.
    fn eval(&self, t: f64, p: Point) -> Result<f64> {
        match self {
            ScalarGenSpec::Constant { value } => Ok(*value),
            ScalarGenSpec::Linear { gradient, offset } => {
                Ok(gradient[0] * p[0] + gradient[1] * p[1] + offset)
            }
            ScalarGenSpec::GaussianBlob {
                center,
                sigma,
                amplitude,
            } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                Ok(amplitude * (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp())
            }
            ScalarGenSpec::StreamFunction { flow } => Ok(flow.stream_function(t, p)),
            ScalarGenSpec::Advected { .. } => Err(Error::InvalidConfig(
                "advected scalars cannot serve as the initial profile of another advected scalar"
                    .into(),
            )),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ScalarGenSpec::GaussianBlob { sigma, .. } if !(*sigma > 0.0) => Err(
                Error::InvalidConfig("gaussian blob sigma must be positive".into()),
            ),
            ScalarGenSpec::Advected {
                initial, max_step, ..
            } => {
                if !(*max_step > 0.0) {
                    return Err(Error::InvalidConfig("max_step must be positive".into()));
                }
                if matches!(**initial, ScalarGenSpec::Advected { .. }) {
                    return Err(Error::InvalidConfig(
                        "nested advected scalars are not supported".into(),
                    ));
                }
                initial.validate()
            }
            _ => Ok(()),
        }
    }
}

/// Evaluate an analytic flow at every node and frame.
pub fn rasterize_flow(flow: &AnalyticFlow, grid: &GridSpec, time: &TimeAxis) -> MultifieldDataset {
    assert_eq!(grid.dim(), 2, "analytic flows are two-dimensional");
    let nodes = grid.node_count();
    let frames = time.frame_count();
    let mut velocity = vec![0.0; nodes * frames * 2];
    velocity
        .par_chunks_mut(nodes * 2)
        .enumerate()
        .for_each(|(frame, out)| {
            let t = time.frame_time(frame);
            for flat in 0..nodes {
                let p = grid.node_position(grid.node_ijk(flat));
                let v = flow.velocity(t, p);
                out[flat * 2] = v[0];
                out[flat * 2 + 1] = v[1];
            }
        });
    MultifieldDataset::new(grid.clone(), time.clone(), velocity, vec![])
        .expect("analytic velocities are finite")
}

/// Add one generated scalar series to a dataset.
pub fn attach_scalar(
    ds: MultifieldDataset,
    spec: &ScalarGenSpec,
    name: &str,
) -> Result<MultifieldDataset> {
    spec.validate()?;
    let grid = ds.grid().clone();
    let time = ds.time().clone();
    let nodes = grid.node_count();
    let frames = time.frame_count();
    let mut values = vec![0.0; nodes * frames];

    match spec {
        ScalarGenSpec::Advected {
            initial,
            t_ref,
            max_step,
        } => {
            if !time.contains(*t_ref) {
                return Err(Error::InvalidConfig(format!(
                    "advection reference time {t_ref} outside dataset time axis [{}, {}]",
                    time.t_start(),
                    time.t_end()
                )));
            }
            for frame in 0..frames {
                let t_frame = time.frame_time(frame);
                let duration = t_ref - t_frame;
                let steps = (duration.abs() / max_step).ceil().max(1.0) as usize;
                let cfg = IntegrationConfig::new(t_frame, duration, 1)
                    .with_substeps(steps)
                    .with_boundary(BoundaryPolicy::Freeze);
                let out = &mut values[frame * nodes..(frame + 1) * nodes];
                out.par_iter_mut().enumerate().try_for_each(
                    |(flat, v)| -> Result<()> {
                        let seed = grid.node_position(grid.node_ijk(flat));
                        let origin = if duration == 0.0 {
                            seed
                        } else {
                            integrate_pathline(&ds, seed, &cfg)?.endpoint()
                        };
                        *v = initial.eval(*t_ref, origin)?;
                        Ok(())
                    },
                )?;
            }
        }
        _ => {
            for frame in 0..frames {
                let t = time.frame_time(frame);
                let out = &mut values[frame * nodes..(frame + 1) * nodes];
                out.par_iter_mut().enumerate().try_for_each(
                    |(flat, v)| -> Result<()> {
                        let p = grid.node_position(grid.node_ijk(flat));
                        *v = spec.eval(t, p)?;
                        Ok(())
                    },
                )?;
            }
        }
    }

    let mut scalars: Vec<(String, Vec<f64>)> = Vec::with_capacity(ds.scalar_count() + 1);
    for attr in 0..ds.scalar_count() {
        scalars.push((
            ds.scalar_name(attr).unwrap().to_string(),
            ds.scalar_values(attr)?.to_vec(),
        ));
    }
    scalars.push((name.to_string(), values));
    MultifieldDataset::new(grid, time, ds.velocity_values().to_vec(), scalars)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_gyre_grid(nx: usize, ny: usize) -> GridSpec {
        let hx = 2.0 / (nx - 1) as f64;
        let hy = 1.0 / (ny - 1) as f64;
        GridSpec::new_2d([nx, ny], [hx, hy], [0.0, 0.0]).unwrap()
    }

    #[test]
    fn uniform_rasterization() {
        let grid = GridSpec::new_2d([3, 3], [1.0, 1.0], [0.0, 0.0]).unwrap();
        let time = TimeAxis::new(0.0, 1.0, 2).unwrap();
        let flow = AnalyticFlow::Uniform { u: 1.0, w: 0.0 };
        let ds = rasterize_flow(&flow, &grid, &time);
        for pair in ds.velocity_values().chunks(2) {
            assert_eq!(pair, &[1.0, 0.0]);
        }
    }

    #[test]
    fn rotation_velocity_at_unit_point() {
        let flow = AnalyticFlow::Rotation { omega: 1.0 };
        assert_eq!(flow.velocity(3.7, [1.0, 0.0, 0.0]), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn steady_double_gyre_cell_boundary() {
        // eps = 0: f(x) = x, u = 0 along x = 1 for all y
        let flow = AnalyticFlow::DoubleGyre {
            amplitude: 0.1,
            epsilon: 0.0,
            omega: 1.0,
        };
        for k in 0..=10 {
            let y = k as f64 / 10.0;
            let v = flow.velocity(0.3, [1.0, y, 0.0]);
            assert!(v[0].abs() < 1e-15, "u = {} at y = {y}", v[0]);
        }
    }

    #[test]
    fn double_gyre_is_divergence_free() {
        // central-difference divergence of the analytic field: only the
        // discretization error remains
        let grid = double_gyre_grid(128, 64);
        let flow = AnalyticFlow::standard_double_gyre();
        let (nx, ny) = (128, 64);
        let (hx, hy) = (grid.spacing()[0], grid.spacing()[1]);
        for &t in &[0.0, 1.3, 2.5, 7.9] {
            let mut max_div = 0.0f64;
            for j in 1..ny - 1 {
                for i in 1..nx - 1 {
                    let at = |i: usize, j: usize| {
                        grid.node_position([i, j, 0])
                    };
                    let du =
                        flow.velocity(t, at(i + 1, j))[0] - flow.velocity(t, at(i - 1, j))[0];
                    let dv =
                        flow.velocity(t, at(i, j + 1))[1] - flow.velocity(t, at(i, j - 1))[1];
                    let div = du / (2.0 * hx) + dv / (2.0 * hy);
                    max_div = max_div.max(div.abs());
                }
            }
            assert!(max_div < 1e-3, "max divergence {max_div} at t = {t}");
        }
    }

    #[test]
    fn stream_function_matches_attached_scalar() {
        let grid = double_gyre_grid(17, 9);
        let time = TimeAxis::new(0.0, 0.5, 3).unwrap();
        let flow = AnalyticFlow::standard_double_gyre();
        let ds = rasterize_flow(&flow, &grid, &time);
        let ds = attach_scalar(
            ds,
            &ScalarGenSpec::StreamFunction { flow: flow.clone() },
            "psi",
        )
        .unwrap();
        for frame in 0..3 {
            let t = time.frame_time(frame);
            for flat in 0..grid.node_count() {
                let p = grid.node_position(grid.node_ijk(flat));
                let stored = ds.scalar_values(0).unwrap()[frame * grid.node_count() + flat];
                let want = flow.stream_function(t, p);
                assert!((stored - want).abs() <= 1e-12 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn advected_blob_translates_under_uniform_flow() {
        let grid = GridSpec::new_2d([41, 21], [0.25, 0.25], [0.0, 0.0]).unwrap();
        let time = TimeAxis::new(0.0, 0.5, 5).unwrap(); // [0, 2]
        let flow = AnalyticFlow::Uniform { u: 1.0, w: 0.0 };
        let ds = rasterize_flow(&flow, &grid, &time);
        let blob = ScalarGenSpec::GaussianBlob {
            center: [2.0, 2.5],
            sigma: 0.8,
            amplitude: 1.0,
        };
        let ds = attach_scalar(
            ds,
            &ScalarGenSpec::Advected {
                initial: Box::new(blob),
                t_ref: 0.0,
                max_step: 0.05,
            },
            "tracer",
        )
        .unwrap();
        // frame at t = 2: blob center has moved to (4.0, 2.5)
        let frame = 4;
        let nodes = grid.node_count();
        for flat in 0..nodes {
            let p = grid.node_position(grid.node_ijk(flat));
            let stored = ds.scalar_values(0).unwrap()[frame * nodes + flat];
            let dx = p[0] - 4.0;
            let dy = p[1] - 2.5;
            let want = (-(dx * dx + dy * dy) / (2.0 * 0.8 * 0.8)).exp();
            // nodes whose pullback left the domain froze at the boundary
            if p[0] >= 2.0 {
                assert!((stored - want).abs() < 1e-6, "at {:?}: {stored} vs {want}", &p[..2]);
            }
        }
    }

    #[test]
    fn advected_scalar_is_conserved_along_pathlines() {
        // double gyre tracer: sampling the advected field along a forward
        // pathline stays constant up to integration and interpolation error
        let grid = double_gyre_grid(97, 49);
        let time = TimeAxis::new(0.0, 0.1, 31).unwrap(); // [0, 3]
        let flow = AnalyticFlow::standard_double_gyre();
        let ds = rasterize_flow(&flow, &grid, &time);
        let blob = ScalarGenSpec::GaussianBlob {
            center: [1.0, 0.5],
            sigma: 0.3,
            amplitude: 1.0,
        };
        let ds = attach_scalar(
            ds,
            &ScalarGenSpec::Advected {
                initial: Box::new(blob),
                t_ref: 0.0,
                max_step: 0.04,
            },
            "tracer",
        )
        .unwrap();
        let cfg = IntegrationConfig::new(0.0, 3.0, 30).with_substeps(5);
        // the drift budget is dominated by bilinear sampling of the curved
        // blob profile, h^2/(8 sigma^2) * A ~ 3.4e-4, times a factor ~3 for
        // gradient growth over t <= 3; RK4 error is orders below that
        let h = grid.spacing()[0];
        let tol = 2.0 * (h * h / 8.0) * (1.0 / (0.3 * 0.3)) * 3.0;
        for seed in [[0.7, 0.4, 0.0], [1.3, 0.6, 0.0], [0.5, 0.75, 0.0]] {
            let traj = integrate_pathline(&ds, seed, &cfg).unwrap();
            let lifted = crate::lift::lift_trajectory(&ds, &traj, false).unwrap();
            let vals: Vec<f64> = (0..lifted.sample_count()).map(|m| lifted.sample(m)[0]).collect();
            let (min, max) = vals
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                    (a.min(v), b.max(v))
                });
            assert!(
                max - min < tol,
                "tracer drift {} (budget {tol}) along pathline from {:?}",
                max - min,
                &seed[..2]
            );
        }
    }

    #[test]
    fn nested_advection_rejected() {
        let grid = double_gyre_grid(5, 3);
        let time = TimeAxis::new(0.0, 1.0, 2).unwrap();
        let ds = rasterize_flow(&AnalyticFlow::Uniform { u: 0.0, w: 0.0 }, &grid, &time);
        let inner = ScalarGenSpec::Advected {
            initial: Box::new(ScalarGenSpec::Constant { value: 1.0 }),
            t_ref: 0.0,
            max_step: 0.1,
        };
        let spec = ScalarGenSpec::Advected {
            initial: Box::new(inner),
            t_ref: 0.0,
            max_step: 0.1,
        };
        assert!(attach_scalar(ds, &spec, "bad").is_err());
    }

    #[test]
    fn rasterization_is_pure() {
        let grid = double_gyre_grid(33, 17);
        let time = TimeAxis::new(0.0, 0.25, 5).unwrap();
        let flow = AnalyticFlow::standard_double_gyre();
        let a = rasterize_flow(&flow, &grid, &time);
        let b = rasterize_flow(&flow, &grid, &time);
        assert_eq!(a.velocity_values(), b.velocity_values());
    }
}
