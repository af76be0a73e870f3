//! Finite-time Lyapunov exponent baseline.
//!
//! Uses the standard Cauchy-Green form: the flow-map gradient is estimated
//! by central differences of node-sampled endpoints (one-sided at
//! boundaries, matching the resolution the edge pipeline operates at), and
//! the exponent is `ln(sigma_max(grad phi)) / |T|`.

use rayon::prelude::*;

use crate::edge::{spectral_norm, ScalarField};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::integrate::{flow_map, FlowMap, IntegrationConfig};

/// Sign of the integration window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// FTLE values with the window that produced them.
#[derive(Debug, Clone)]
pub struct FtleField {
    pub field: ScalarField,
    pub t0: f64,
    pub duration: f64,
    pub direction: Direction,
}

/// Compute the FTLE field for the given window; backward FTLE is requested
/// with a negative duration.
pub fn ftle_field(
    ds: &crate::grid::MultifieldDataset,
    cfg: &IntegrationConfig,
) -> Result<FtleField> {
    if cfg.duration == 0.0 {
        return Err(Error::InvalidConfig(
            "FTLE needs a non-zero integration duration".into(),
        ));
    }
    let fm = flow_map(ds, cfg)?;
    Ok(ftle_from_flow_map(&fm))
}

/// FTLE from an existing flow map.
pub fn ftle_from_flow_map(fm: &FlowMap) -> FtleField {
    let grid = fm.grid.clone();
    let dim = grid.dim();
    let inv_t = 1.0 / fm.duration.abs();
    let values = (0..grid.node_count())
        .into_par_iter()
        .map(|node| {
            let grad = flow_map_gradient(&grid, &fm.endpoints, node);
            // sigma can underflow to 0 for pathological (fully frozen)
            // neighborhoods; floor it to keep the field finite
            let sigma = spectral_norm(&grad, dim, dim).max(f64::MIN_POSITIVE);
            sigma.ln() * inv_t
        })
        .collect();
    FtleField {
        field: ScalarField::new(grid, values),
        t0: fm.t0,
        duration: fm.duration,
        direction: if fm.duration >= 0.0 {
            Direction::Forward
        } else {
            Direction::Backward
        },
    }
}

/// Row-major `dim x dim` gradient of the endpoint field at `node`:
/// row = endpoint component, column = differencing axis.
fn flow_map_gradient(grid: &GridSpec, endpoints: &[[f64; 3]], node: usize) -> Vec<f64> {
    let dim = grid.dim();
    let ijk = grid.node_ijk(node);
    let mut grad = vec![0.0; dim * dim];
    for axis in 0..dim {
        let n = grid.dims()[axis];
        let h = grid.spacing()[axis];
        let has_minus = ijk[axis] > 0;
        let has_plus = ijk[axis] + 1 < n;
        let at = |delta: isize| -> &[f64; 3] {
            let mut q = ijk;
            q[axis] = (q[axis] as isize + delta) as usize;
            &endpoints[grid.node_index(q)]
        };
        let (a, b, denom) = match (has_minus, has_plus) {
            (true, true) => (at(1), at(-1), 2.0 * h),
            (false, true) => (at(1), at(0), h),
            (true, false) => (at(0), at(-1), h),
            (false, false) => unreachable!("grids have at least 2 nodes per axis"),
        };
        let inv = 1.0 / denom;
        for comp in 0..dim {
            grad[comp * dim + axis] = (a[comp] - b[comp]) * inv;
        }
    }
    grad
}
